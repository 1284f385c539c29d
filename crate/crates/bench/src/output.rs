//! CSV and manifest writers.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::runner::RunOutcome;
use crate::BenchError;

#[derive(Debug, Serialize)]
pub struct ResultRow<'a> {
    pub method: &'a str,
    #[serde(rename = "M")]
    pub slices: usize,
    pub sigma: &'a str,
    pub prob_reference: f64,
    pub prob_method: f64,
    pub error_sigma: f64,
    pub final_infidelity: f64,
    pub parity: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
struct SlopeRow<'a> {
    method: &'a str,
    sigma: &'a str,
    slope: Option<f64>,
    intercept: Option<f64>,
    residual: Option<f64>,
    m_min: Option<f64>,
    m_max: Option<f64>,
    points_used: Option<usize>,
    points_dropped: Option<usize>,
    status: String,
}

#[derive(Debug, Serialize)]
struct TraceRow<'a> {
    method: &'a str,
    #[serde(rename = "M")]
    slices: usize,
    m: usize,
    t_m: f64,
    infidelity: f64,
}

/// Paths of the files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct WrittenFiles {
    pub results: PathBuf,
    pub slopes: PathBuf,
    pub trace: Option<PathBuf>,
    pub manifest: PathBuf,
}

fn label(outcome: &RunOutcome, sigma: usize) -> &str {
    let k = outcome
        .sigmas
        .iter()
        .position(|s| *s == sigma)
        .expect("watched state");
    &outcome.config.sigma[k]
}

/// Write `<name>.csv`, `<name>_slopes.csv`, `<name>_trace.csv` (when traced)
/// and `manifest.json` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<WrittenFiles, BenchError> {
    fs::create_dir_all(dir)?;
    let name = &outcome.config.name;

    let results = dir.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&results)?;
    for r in &outcome.report.records {
        w.serialize(ResultRow {
            method: r.method.as_str(),
            slices: r.slices,
            sigma: label(outcome, r.sigma),
            prob_reference: r.prob_reference,
            prob_method: r.prob_method,
            error_sigma: r.error_sigma,
            final_infidelity: r.final_infidelity,
            parity: r.parity,
            wall_time_ms: outcome.wall_time_ms(r.method, r.slices),
        })?;
    }
    w.flush()?;

    let slopes = dir.join(format!("{name}_slopes.csv"));
    let mut w = csv::Writer::from_path(&slopes)?;
    for (method, sigma, fit) in outcome.fits() {
        let row = match &fit {
            Ok(f) => SlopeRow {
                method: method.as_str(),
                sigma: label(outcome, sigma),
                slope: Some(f.fit.slope),
                intercept: Some(f.fit.intercept),
                residual: Some(f.fit.residual),
                m_min: Some(f.m_min),
                m_max: Some(f.m_max),
                points_used: Some(f.fit.used),
                points_dropped: Some(f.fit.dropped),
                status: "ok".into(),
            },
            Err(e) => SlopeRow {
                method: method.as_str(),
                sigma: label(outcome, sigma),
                slope: None,
                intercept: None,
                residual: None,
                m_min: None,
                m_max: None,
                points_used: None,
                points_dropped: None,
                status: e.to_string(),
            },
        };
        w.serialize(row)?;
    }
    w.flush()?;

    let trace = if outcome.config.trace {
        let path = dir.join(format!("{name}_trace.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        let first_sigma = outcome.sigmas[0];
        for r in outcome
            .report
            .records
            .iter()
            .filter(|r| r.sigma == first_sigma)
        {
            for p in r.trace.iter().flatten() {
                w.serialize(TraceRow {
                    method: r.method.as_str(),
                    slices: r.slices,
                    m: p.m,
                    t_m: p.time,
                    infidelity: p.infidelity,
                })?;
            }
        }
        w.flush()?;
        Some(path)
    } else {
        None
    };

    let manifest = dir.join("manifest.json");
    fs::write(
        &manifest,
        serde_json::to_string_pretty(&manifest_json(outcome))? + "\n",
    )?;
    Ok(WrittenFiles {
        results,
        slopes,
        trace,
        manifest,
    })
}

pub fn manifest_json(outcome: &RunOutcome) -> serde_json::Value {
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let r = &outcome.reference;
    serde_json::json!({
        "software": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix": created,
        "threads": outcome.threads,
        "config": outcome.config.to_text(),
        "system_hash": outcome.report.metadata.system_hash,
        "reference": {
            "integrator": "magnus4",
            "coarse_slices": r.coarse_slices,
            "slices": r.slices,
            "tolerance": r.tolerance,
            "achieved_difference": r.achieved_difference,
            "state_sha256": r.state_sha256,
        },
        "jobs": outcome.timings.iter().map(|t| serde_json::json!({
            "method": t.method.as_str(),
            "M": t.slices,
            "wall_time_ms": t.wall_time_ms,
            "max_parity_deviation": t.max_parity_deviation,
            "reference_sha256": r.state_sha256,
        })).collect::<Vec<_>>(),
    })
}
