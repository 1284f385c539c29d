use std::path::{Path, PathBuf};
use std::process::ExitCode;

use annealsim_bench::config::{self, parse_m_list, parse_methods, ExperimentConfig, PRESETS};
use annealsim_bench::{run, write_outputs, BenchError};
use clap::{Args, Parser, Subcommand};

/// Error-scaling experiments for gate-based quantum annealing.
#[derive(Parser)]
#[command(name = "annealsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a configuration file.
    Run(RunArgs),
    /// Check a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: `results/NAME`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated slice counts.
    #[arg(long)]
    m_list: Option<String>,
    /// Comma-separated methods.
    #[arg(long)]
    methods: Option<String>,
    /// Reference convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (overrides ANNEALSIM_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

fn load(path: &Path) -> Result<ExperimentConfig, BenchError> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::parse(&text).map_err(BenchError::Config)
}

fn run_command(args: RunArgs) -> Result<(), BenchError> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), _) => config::preset(p).map_err(|v| BenchError::Config(vec![v]))?,
        (None, Some(path)) => load(path)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let mut violations = vec![];
    if let Some(m) = &args.m_list {
        parse_m_list(m).map_or_else(|v| violations.push(v), |m| cfg.m_list = m);
    }
    if let Some(m) = &args.methods {
        parse_methods(m).map_or_else(|v| violations.push(v), |m| cfg.methods = m);
    }
    if let Some(t) = args.tol {
        cfg.reference_tolerance = t;
    }
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    if !violations.is_empty() {
        return Err(BenchError::Config(violations));
    }
    let outcome = run(&cfg, args.threads)?;
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
    let files = write_outputs(&outcome, &dir)?;
    println!(
        "reference: {} slices, difference {:.2e}, sha256 {}",
        outcome.reference.slices,
        outcome.reference.achieved_difference,
        outcome.reference.state_sha256
    );
    for (method, sigma, fit) in outcome.fits() {
        let label = &cfg.sigma[outcome.sigmas.iter().position(|s| *s == sigma).unwrap_or(0)];
        match fit {
            Ok(f) => println!(
                "{:>16} {label}: slope {:+.3} over M = {}..{}",
                method.as_str(),
                f.fit.slope,
                f.m_min,
                f.m_max
            ),
            Err(e) => println!("{:>16} {label}: no fit ({e})", method.as_str()),
        }
    }
    println!("wrote {}", files.results.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Presets => {
            for p in PRESETS {
                let cfg = config::preset(p).expect("built-in preset");
                println!(
                    "{p}: n = {}, T = {}, M = {:?}, methods = {}",
                    cfg.n,
                    cfg.total_time,
                    cfg.m_list,
                    cfg.methods
                        .iter()
                        .map(|m| m.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            Ok(())
        }
        Command::Validate { config } => load(&config).and_then(|cfg| {
            let v = cfg.validate();
            if v.is_empty() {
                println!("ok");
                Ok(())
            } else {
                Err(BenchError::Config(v))
            }
        }),
        Command::Run(args) => run_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
