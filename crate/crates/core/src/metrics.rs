//! Error measures between evolutions and the power-law fit used to read off
//! error scaling in the slice count `M`.

use crate::error::{Error, Result};
use crate::propagators::{Method, Trajectory};
use crate::statevector::StateVector;

/// Errors at or below this are treated as the double-precision floor and
/// excluded from fits.
pub const ERROR_FLOOR: f64 = 1e-13;

/// Smallest window accepted by [`fit_scaling`].
pub const MIN_WINDOW: usize = 4;

/// A point joins the window only if its local slope is this close to the
/// slope fitted on the points already in it.
pub const SLOPE_CONSISTENCY: f64 = 0.5;

/// `E_σ = | |⟨σ|ref⟩|² − |⟨σ|test⟩|² |`.
pub fn error_sigma(reference: &StateVector, test: &StateVector, sigma: usize) -> Result<f64> {
    check_same(reference, test)?;
    Ok((reference.basis_probability(sigma)? - test.basis_probability(sigma)?).abs())
}

/// `1 − |⟨a|b⟩|²`, clamped to `[0, 1]` against rounding.
pub fn infidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ov = a.overlap(b)?;
    Ok((1.0 - ov.norm_sqr()).clamp(0.0, 1.0))
}

fn check_same(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfidelityPoint {
    pub m: usize,
    pub time: f64,
    pub infidelity: f64,
}

/// Per-step infidelity `I_m`, `m = 1..=M`, of `test` against `reference`.
/// Both trajectories must carry snapshots on the same grid.
pub fn infidelity_trace(reference: &Trajectory, test: &Trajectory) -> Result<Vec<InfidelityPoint>> {
    if reference.len() != test.len() {
        return Err(Error::SizeMismatch {
            left: reference.len(),
            right: test.len(),
        });
    }
    reference
        .points
        .iter()
        .zip(&test.points)
        .filter(|(r, _)| r.m > 0)
        .map(|(r, t)| {
            if r.m != t.m || (r.time - t.time).abs() > 1e-12 * r.time.abs().max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "trajectories disagree at step {} (t = {} vs {})",
                    r.m, r.time, t.time
                )));
            }
            match (&r.snapshot, &t.snapshot) {
                (Some(a), Some(b)) => Ok(InfidelityPoint {
                    m: r.m,
                    time: r.time,
                    infidelity: infidelity(a, b)?,
                }),
                _ => Err(Error::Configuration(
                    "infidelity traces need statevector snapshots".into(),
                )),
            }
        })
        .collect()
}

/// Least-squares line through `(ln M, ln error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub used: usize,
    pub dropped: usize,
}

/// Fit `error ≈ e^intercept · M^slope`. Non-finite, non-positive and
/// floor-level errors are dropped; at least three points must remain.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<LogLogFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(m, e)| *m > 0.0 && m.is_finite() && e.is_finite() && *e > ERROR_FLOOR)
        .map(|(m, e)| (m.ln(), e.ln()))
        .collect();
    let dropped = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            usable: usable.len(),
            dropped,
        });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            required: 3,
            usable: 1,
            dropped,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (usable
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LogLogFit {
        slope,
        intercept,
        residual,
        used: usable.len(),
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub fit: LogLogFit,
    pub m_min: f64,
    pub m_max: f64,
}

/// Fit the asymptotic tail of an error-vs-`M` sweep.
///
/// Floor-level errors are discarded. The window starts as the last
/// [`MIN_WINDOW`] points of the trailing run of strictly decreasing errors and
/// grows toward smaller `M` while each added segment's local slope stays
/// within [`SLOPE_CONSISTENCY`] of the current fit, which excludes the
/// pre-asymptotic head.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(m, e)| *m > 0.0 && e.is_finite() && *e > ERROR_FLOOR)
        .collect();
    let floor_dropped = points.len() - pts.len();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let insufficient = |usable| Error::InsufficientData {
        required: MIN_WINDOW,
        usable,
        dropped: floor_dropped,
    };
    if pts.is_empty() {
        return Err(insufficient(0));
    }
    let mut run_start = pts.len() - 1;
    while run_start > 0 && pts[run_start - 1].1 > pts[run_start].1 {
        run_start -= 1;
    }
    let run_len = pts.len() - run_start;
    if run_len < MIN_WINDOW {
        return Err(insufficient(run_len));
    }
    let mut lo = pts.len() - MIN_WINDOW;
    let mut fit = fit_loglog_slope(&pts[lo..])?;
    while lo > run_start {
        let (m0, e0) = pts[lo - 1];
        let (m1, e1) = pts[lo];
        let local = (e1 / e0).ln() / (m1 / m0).ln();
        if (local - fit.slope).abs() > SLOPE_CONSISTENCY {
            break;
        }
        lo -= 1;
        fit = fit_loglog_slope(&pts[lo..])?;
    }
    fit.dropped = points.len() - fit.used;
    Ok(ScalingFit {
        fit,
        m_min: pts[lo].0,
        m_max: pts[pts.len() - 1].0,
    })
}

/// Outcome of one `(method, M)` run against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub method: Method,
    pub slices: usize,
    pub sigma: usize,
    pub prob_reference: f64,
    pub prob_method: f64,
    pub error_sigma: f64,
    pub final_infidelity: f64,
    pub parity: f64,
    pub trace: Option<Vec<InfidelityPoint>>,
}

impl ErrorRecord {
    pub fn new(
        method: Method,
        slices: usize,
        sigma: usize,
        reference: &StateVector,
        state: &StateVector,
    ) -> Result<Self> {
        Ok(ErrorRecord {
            method,
            slices,
            sigma,
            prob_reference: reference.basis_probability(sigma)?,
            prob_method: state.basis_probability(sigma)?,
            error_sigma: error_sigma(reference, state, sigma)?,
            final_infidelity: infidelity(reference, state)?,
            parity: state.parity_expectation(),
            trace: None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportMetadata {
    pub experiment: String,
    pub system_hash: String,
    pub schedule: String,
    pub total_time: f64,
    pub sigma_label: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorReport {
    pub metadata: ReportMetadata,
    pub records: Vec<ErrorRecord>,
}

impl ErrorReport {
    /// `(M, E_σ)` for one method and basis state, ordered by `M`.
    pub fn sweep(&self, method: Method, sigma: usize) -> Vec<(f64, f64)> {
        let mut pts: Vec<_> = self
            .records
            .iter()
            .filter(|r| r.method == method && r.sigma == sigma)
            .map(|r| (r.slices as f64, r.error_sigma))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut m: Vec<Method> = self.records.iter().map(|r| r.method).collect();
        m.sort();
        m.dedup();
        m
    }

    /// Scaling fit per method for basis state `sigma`.
    pub fn scaling_fits(&self, sigma: usize) -> Vec<(Method, Result<ScalingFit>)> {
        self.methods()
            .into_iter()
            .map(|m| (m, fit_scaling(&self.sweep(m, sigma))))
            .collect()
    }
}
