//! Run configuration: key=value file, then GEOLEDGER_THREADS, then flags.
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use geoledger::number_base::Ring;

pub const THREADS_ENV: &str = "GEOLEDGER_THREADS";
pub const DEFAULT_Q_MAX: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ring: Ring,
    pub precision: Precision,
    /// None leaves each command at its own default
    pub q_max: Option<u64>,
    pub threads: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ring: Ring::Rat,
            precision: Precision::Double,
            q_max: None,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            output: None,
            format: Format::Csv,
        }
    }
}

pub fn parse_format(s: &str) -> Result<Format, String> {
    match s.to_ascii_lowercase().as_str() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format '{s}' (csv or json)")),
    }
}

pub fn parse_precision(s: &str) -> Result<Precision, String> {
    match s.to_ascii_lowercase().as_str() {
        "double" => Ok(Precision::Double),
        "extended" => Ok(Precision::Extended),
        _ => Err(format!("unknown precision '{s}' (double or extended)")),
    }
}

fn positive(key: &str, v: &str) -> Result<u64, String> {
    match v.parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("{key} must be a positive integer, got '{v}'")),
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    pub fn apply(&mut self, entries: &BTreeMap<String, String>) -> Result<(), String> {
        for (k, v) in entries {
            match k.as_str() {
                "ring" => self.ring = Ring::from_flag(v).map_err(|e| e.to_string())?,
                "precision" => self.precision = parse_precision(v)?,
                "q_max" => self.q_max = Some(positive(k, v)?),
                "threads" => self.threads = positive(k, v)? as usize,
                "output" => self.output = Some(PathBuf::from(v)),
                "format" => self.format = parse_format(v)?,
                _ => return Err(format!("unknown config key '{k}'")),
            }
        }
        Ok(())
    }

    /// Defaults, then the environment, then the config file. Flags are applied by the caller.
    pub fn load(path: Option<&Path>, env_threads: Option<String>) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        if let Some(v) = env_threads {
            cfg.threads = positive(THREADS_ENV, &v)? as usize;
        }
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            cfg.apply(&parse_config(&text)?)?;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let m = parse_config("# batch\nring = qi\nq-max=500 # smaller\n\nformat=json\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply(&m).unwrap();
        assert_eq!(cfg.ring, Ring::Gauss);
        assert_eq!(cfg.q_max, Some(500));
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(parse_config("ring qi").is_err());
        let mut cfg = RunConfig::default();
        assert!(cfg.apply(&parse_config("threads=0").unwrap()).is_err());
        assert!(cfg.apply(&parse_config("colour=red").unwrap()).is_err());
        assert!(RunConfig::load(None, Some("x".into())).is_err());
        assert_eq!(RunConfig::load(None, Some("3".into())).unwrap().threads, 3);
    }
}
