mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_format, parse_precision, Precision, RunConfig, THREADS_ENV};

#[derive(Parser, Debug)]
#[command(name = "geoledger", version, about = "Prime geodesic counts and the local factors behind them")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// key=value file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// worker threads (default: $GEOLEDGER_THREADS, then all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// csv or json
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<config::Format>,
    /// write to a file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// series truncation Q_max
    #[arg(long, global = true)]
    pub q_max: Option<u64>,
    /// double (extended is not available)
    #[arg(long, global = true, value_parser = parse_precision)]
    pub precision: Option<Precision>,
    /// base ring: q or qi
    #[arg(long, global = true)]
    pub ring: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ψ_Γ(x) with its main term
    Psi(commands::PsiArgs),
    /// L(s, δ) by series and by the factored form
    ZagierL(commands::ZagierArgs),
    /// a principal or Hecke local polynomial with optional fe/rh checks
    LocalPoly(commands::LocalPolyArgs),
    /// Rankin–Selberg weights and Legendre functions at one point
    Weights(commands::WeightsArgs),
    /// residue point counts N_0, N_∞ and RSO(r)
    OrbitalCount(commands::OrbitalArgs),
    /// the exponential sum S_q(k, N)
    Expsum(commands::ExpsumArgs),
    /// Ψ_Γ(x)/main term along a geometric grid of x
    PgtScan(commands::ScanArgs),
    /// run the acceptance grid
    Verify(commands::VerifyArgs),
}

fn resolve(global: &GlobalArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::load(global.config.as_deref(), std::env::var(THREADS_ENV).ok())?;
    if let Some(t) = global.threads {
        if t == 0 {
            return Err("--threads must be at least 1".into());
        }
        cfg.threads = t;
    }
    if let Some(f) = global.format {
        cfg.format = f;
    }
    if let Some(o) = &global.output {
        cfg.output = Some(o.clone());
    }
    if let Some(q) = global.q_max {
        if q == 0 {
            return Err("--q-max must be at least 1".into());
        }
        cfg.q_max = Some(q);
    }
    if let Some(p) = global.precision {
        cfg.precision = p;
    }
    if let Some(r) = &global.ring {
        cfg.ring = geoledger::number_base::Ring::from_flag(r).map_err(|e| e.to_string())?;
    }
    if cfg.precision == Precision::Extended {
        return Err("extended precision is not available; use --precision double".into());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli.global) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(emit::EXIT_USAGE);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(emit::EXIT_NUMERIC);
    }
    let outcome = commands::run(&cli.command, &cfg).and_then(|out| emit::write(&cfg, &out).map(|_| out.status));
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
