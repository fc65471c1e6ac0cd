use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kato_lab::experiments::report::plot_script;
use kato_lab::experiments::{run, run_evolve, ExperimentConfig, ExperimentKind, RunOptions, SymbolSpec, Verdict};
use kato_lab::Error;

/// Numerical laboratory for local smoothing estimates of linear dispersive
/// and dissipative equations.
#[derive(Parser)]
#[command(name = "kato-lab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment configuration (TOML); a canonical run is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Evaluation backend: auto, oversampled_fft or filon.
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Base seed of randomized data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fill the runtime_ms column.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a polynomial symbol or validate a dispersive one.
    ValidateSymbol {
        /// Registry name (airy, kdv_burgers, heat, schrodinger, airy_dispersion).
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Windowed-energy dichotomy for polynomial flows.
    Thm1,
    /// Whole-time local norm dichotomy for dispersive symbols.
    Thm2,
    /// Empirical local smoothing constants.
    Baseline,
    /// Sharp trace norms.
    Trace,
    /// Global smoothing of dissipative flows.
    Y1,
    /// Dump u(x, T) on a uniform grid.
    Evolve,
}

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_RESOLUTION: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resolution { .. } | Error::Convergence { .. } => EXIT_RESOLUTION,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(cli: Cli) -> Result<u8, Error> {
    let g = cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let kind = match &cli.command {
        Command::ValidateSymbol { .. } => ExperimentKind::ValidateSymbol,
        Command::Thm1 => ExperimentKind::Thm1,
        Command::Thm2 => ExperimentKind::Thm2,
        Command::Baseline => ExperimentKind::Baseline,
        Command::Trace => ExperimentKind::Trace,
        Command::Y1 => ExperimentKind::Y1,
        Command::Evolve => ExperimentKind::Evolve,
    };
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::canonical(kind),
    };
    if let Command::ValidateSymbol { symbol: Some(name) } = &cli.command {
        cfg.symbol = SymbolSpec::Named(name.clone());
    }
    if let Some(b) = g.backend {
        cfg.backend = b;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(o) = g.out {
        cfg.output = Some(o);
    }

    if kind == ExperimentKind::Evolve {
        let bytes = run_evolve(&cfg)?;
        match &cfg.output {
            Some(path) => std::fs::write(path, bytes)?,
            None => print!("{}", String::from_utf8_lossy(&bytes)),
        }
        return Ok(0);
    }

    let report = run(kind, &cfg, &RunOptions { timing: g.timing })?;
    print!("{}", report.summary());
    if kind != ExperimentKind::ValidateSymbol {
        match &cfg.output {
            Some(path) => {
                report.write_csv(path)?;
                if cfg.plot {
                    if let Some((gp, script)) = plot_script(path, kind) {
                        std::fs::write(gp, script)?;
                    }
                }
            }
            None => print!("{}", String::from_utf8_lossy(&report.to_csv_bytes()?)),
        }
    }
    Ok(match report.verdict {
        Some(Verdict::Inconclusive) => EXIT_INCONCLUSIVE,
        _ => 0,
    })
}
