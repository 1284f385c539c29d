//! Experiment runner behind the `annealsim` command-line tool.
//!
//! ```no_run
//! use annealsim_bench::{config, run, write_outputs};
//!
//! let mut cfg = config::preset("fig1").unwrap();
//! cfg.m_list = vec![16, 32, 64, 128];
//! let outcome = run(&cfg, None).unwrap();
//! write_outputs(&outcome, std::path::Path::new("results/fig1")).unwrap();
//! ```

pub mod config;
pub mod output;
pub mod runner;

pub use config::{preset, ExperimentConfig, Violation};
pub use output::{write_outputs, WrittenFiles};
pub use runner::{run, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<Violation>),
    #[error("reference did not converge: {0}")]
    Convergence(annealsim::Error),
    #[error(transparent)]
    Simulation(#[from] annealsim::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// 2 for configuration problems, 3 for a reference that did not converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Simulation(annealsim::Error::Configuration(_)) => 2,
            BenchError::Convergence(_) => 3,
            _ => 1,
        }
    }
}
