//! Output assembly, JSON encodings and exit codes.
use std::io::Write;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<geoledger::Error> for CliError {
    fn from(e: geoledger::Error) -> Self {
        let code = if matches!(e, geoledger::Error::Parse(_)) { EXIT_USAGE } else { EXIT_NUMERIC };
        CliError { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A finished command: the body, an optional timing footer and the exit status.
#[derive(Debug, Default)]
pub struct Output {
    pub body: String,
    pub footer: Option<String>,
    pub status: u8,
}

impl Output {
    pub fn text(body: String) -> Self {
        Output { body, ..Default::default() }
    }

    pub fn json(v: &Value) -> Self {
        Output::text(format!("{}\n", serde_json::to_string_pretty(v).expect("json")))
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn write(cfg: &RunConfig, out: &Output) -> CliResult<()> {
    let mut text = out.body.clone();
    if let Some(f) = &out.footer {
        text.push_str(f);
        text.push('\n');
    }
    let res = match &cfg.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CliError::usage(format!("cannot write output: {e}")))
}
