//! Executes an [`ExperimentConfig`]: one reference evolution, then every
//! `(method, M)` job in parallel against it.

use std::time::Instant;

use annealsim::metrics::{infidelity_trace, ErrorRecord, ErrorReport, ReportMetadata, ScalingFit};
use annealsim::model::{Schedule, SpinSystem};
use annealsim::propagators::{
    evolve, Evolution, EvolutionPlan, Method, RecordOptions, ReferenceOptions, Trajectory,
    TrajectoryPoint,
};
use annealsim::statevector::StateVector;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ScheduleSpec};
use crate::BenchError;

/// Summary of the reference evolution shared by all jobs of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSummary {
    /// Slices of the coarse grid the reference was recorded on.
    pub coarse_slices: usize,
    /// Total slices of the finest refinement.
    pub slices: usize,
    pub tolerance: f64,
    pub achieved_difference: f64,
    /// SHA-256 of the little-endian amplitude bytes.
    pub state_sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobTiming {
    pub method: Method,
    pub slices: usize,
    pub wall_time_ms: f64,
    /// Largest `|⟨Π⟩ − 1|` over all slice boundaries.
    pub max_parity_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub sigmas: Vec<usize>,
    pub reference: ReferenceSummary,
    pub reference_state: StateVector,
    pub report: ErrorReport,
    pub timings: Vec<JobTiming>,
    pub threads: usize,
}

impl RunOutcome {
    /// Scaling fit for every method and watched state.
    pub fn fits(&self) -> Vec<(Method, usize, Result<ScalingFit, annealsim::Error>)> {
        self.sigmas
            .iter()
            .flat_map(|&s| {
                self.report
                    .scaling_fits(s)
                    .into_iter()
                    .map(move |(m, f)| (m, s, f))
            })
            .collect()
    }

    pub fn wall_time_ms(&self, method: Method, slices: usize) -> f64 {
        self.timings
            .iter()
            .find(|t| t.method == method && t.slices == slices)
            .map_or(0.0, |t| t.wall_time_ms)
    }
}

pub fn state_hash(state: &StateVector) -> String {
    let mut h = Sha256::new();
    for a in state.amplitudes() {
        h.update(a.re.to_le_bytes());
        h.update(a.im.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Stable identifier of the simulated Hamiltonian and schedule.
fn system_hash(config: &ExperimentConfig) -> String {
    let mut echo = config.clone();
    echo.name.clear();
    echo.preset = None;
    echo.m_list.clear();
    echo.methods.clear();
    echo.sigma.clear();
    echo.out = None;
    echo.trace = false;
    let digest = Sha256::digest(echo.to_text().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Thread count from `ANNEALSIM_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("ANNEALSIM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|n| *n > 0)
}

struct Job {
    method: Method,
    slices: usize,
}

struct JobResult {
    state: StateVector,
    trajectory: Trajectory,
    wall_time_ms: f64,
}

/// Run an experiment. `threads = None` uses `ANNEALSIM_THREADS` or rayon's default.
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutcome, BenchError> {
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(BenchError::Config(violations));
    }
    let system = config.system()?;
    let schedule = config.build_schedule()?;
    let sigmas = config
        .sigma
        .iter()
        .map(|s| config.sigma_index(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|v| BenchError::Config(vec![v]))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.or_else(threads_from_env) {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| BenchError::Io(std::io::Error::other(e)))?;

    pool.install(|| {
        let largest = *config.m_list.last().expect("validated");
        let coarse = if config.trace { largest } else { 1 };
        let reference = reference(&system, &schedule, config, coarse)?;
        let ref_traj = reference.trajectory.as_ref();

        let jobs: Vec<Job> = config
            .methods
            .iter()
            .flat_map(|&method| {
                config
                    .m_list
                    .iter()
                    .map(move |&slices| Job { method, slices })
            })
            .collect();
        let results = jobs
            .par_iter()
            .map(|job| run_job(&system, &schedule, job, config.trace))
            .collect::<Result<Vec<_>, _>>()?;

        let mut records = vec![];
        let mut timings = vec![];
        for (job, res) in jobs.iter().zip(results) {
            let trace = match ref_traj {
                Some(full) if config.trace => {
                    let stride = largest / job.slices;
                    let sub = Trajectory {
                        points: full
                            .points
                            .iter()
                            .step_by(stride)
                            .enumerate()
                            .map(|(m, p)| TrajectoryPoint { m, ..p.clone() })
                            .collect(),
                    };
                    Some(infidelity_trace(&sub, &res.trajectory)?)
                }
                _ => None,
            };
            for &sigma in &sigmas {
                let mut rec =
                    ErrorRecord::new(job.method, job.slices, sigma, &reference.state, &res.state)?;
                rec.trace = trace.clone();
                records.push(rec);
            }
            let max_parity_deviation = res
                .trajectory
                .points
                .iter()
                .map(|p| (p.parity - 1.0).abs())
                .fold(0.0, f64::max);
            timings.push(JobTiming {
                method: job.method,
                slices: job.slices,
                wall_time_ms: res.wall_time_ms,
                max_parity_deviation,
            });
        }

        let summary = ReferenceSummary {
            coarse_slices: coarse,
            slices: reference.slices,
            tolerance: config.reference_tolerance,
            achieved_difference: reference.reference_difference.unwrap_or(f64::NAN),
            state_sha256: state_hash(&reference.state),
        };
        let report = ErrorReport {
            metadata: ReportMetadata {
                experiment: config.name.clone(),
                system_hash: system_hash(config),
                schedule: match &config.schedule {
                    ScheduleSpec::Linear => "linear".into(),
                    ScheduleSpec::Tabulated(_) => "tabulated".into(),
                },
                total_time: config.total_time,
                sigma_label: config.sigma.join(" "),
            },
            records,
        };
        Ok(RunOutcome {
            config: config.clone(),
            sigmas,
            reference: summary,
            reference_state: reference.state,
            report,
            timings,
            threads: rayon::current_num_threads(),
        })
    })
}

fn reference(
    system: &SpinSystem,
    schedule: &Schedule,
    config: &ExperimentConfig,
    coarse: usize,
) -> Result<Evolution, BenchError> {
    let opts = ReferenceOptions::default().with_tolerance(config.reference_tolerance);
    let mut plan = EvolutionPlan::new(Method::Reference, coarse).with_reference(opts);
    if config.trace {
        plan = plan.with_record(RecordOptions {
            snapshots: true,
            watch: vec![],
        });
    }
    evolve(system, schedule, &plan).map_err(|e| match e {
        annealsim::Error::Convergence { .. } => BenchError::Convergence(e),
        other => BenchError::Simulation(other),
    })
}

fn run_job(
    system: &SpinSystem,
    schedule: &Schedule,
    job: &Job,
    snapshots: bool,
) -> Result<JobResult, BenchError> {
    let plan = EvolutionPlan::new(job.method, job.slices).with_record(RecordOptions {
        snapshots,
        watch: vec![],
    });
    let start = Instant::now();
    let ev = evolve(system, schedule, &plan)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(JobResult {
        state: ev.state,
        trajectory: ev.trajectory.expect("recording was requested"),
        wall_time_ms,
    })
}
