use super::grid::TimeGrid;
use super::quadrature::GaussLegendre;
use crate::error::{Error, Result};

pub const DEFAULT_QUADRATURE_ORDER: usize = 16;

const BOUNDARY_TOL: f64 = 1e-12;

/// Annealing schedule `λ(t)` on `[0, T]` with `λ(0) = 0` and `λ(T) = 1`.
///
/// Integrals of the linear ramp use closed-form antiderivatives; tabulated
/// schedules are integrated piece by piece with a fixed-order Gauss–Legendre
/// rule, which is exact for the cubic interpolant.
#[derive(Debug, Clone)]
pub struct Schedule {
    kind: ScheduleKind,
    total_time: f64,
    quadrature: GaussLegendre,
}

#[derive(Debug, Clone)]
pub enum ScheduleKind {
    /// `λ(t) = t / T`.
    Linear,
    /// Shape-preserving cubic interpolation through user knots.
    Tabulated(MonotoneCubic),
}

impl Schedule {
    pub fn linear(total_time: f64) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "total time {total_time} must be positive and finite"
            )));
        }
        Ok(Schedule {
            kind: ScheduleKind::Linear,
            total_time,
            quadrature: GaussLegendre::new(DEFAULT_QUADRATURE_ORDER),
        })
    }

    /// Tabulated schedule through `(t, λ)` knots; the last knot time is `T`.
    pub fn tabulated(points: &[(f64, f64)], quadrature_order: usize) -> Result<Self> {
        if quadrature_order == 0 {
            return Err(Error::InvalidSchedule(
                "quadrature order must be positive".into(),
            ));
        }
        let curve = MonotoneCubic::new(points)?;
        let (t0, l0) = points[0];
        let (tn, ln) = points[points.len() - 1];
        if t0 != 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "first knot at t = {t0}, expected 0"
            )));
        }
        if l0.abs() > BOUNDARY_TOL || (ln - 1.0).abs() > BOUNDARY_TOL {
            return Err(Error::InvalidSchedule(format!(
                "boundary values λ(0) = {l0}, λ(T) = {ln}; expected 0 and 1"
            )));
        }
        if let Some((t, l)) = points.iter().find(|(_, l)| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidSchedule(format!(
                "λ({t}) = {l} outside [0, 1]"
            )));
        }
        Ok(Schedule {
            kind: ScheduleKind::Tabulated(curve),
            total_time: tn,
            quadrature: GaussLegendre::new(quadrature_order),
        })
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature.order()
    }

    /// `λ(t)`, rejecting times outside `[0, T]`.
    pub fn lambda_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.value(t))
    }

    /// `λ(t)` with `t` clamped into `[0, T]`.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time);
        match &self.kind {
            ScheduleKind::Linear => t / self.total_time,
            ScheduleKind::Tabulated(c) => c.eval(t).clamp(0.0, 1.0),
        }
    }

    /// Catalyst prefactor `λ(t)(1 − λ(t))`.
    pub fn catalyst_weight(&self, t: f64) -> f64 {
        let l = self.value(t);
        l * (1.0 - l)
    }

    /// `∫_a^b λ(t) dt`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match &self.kind {
            ScheduleKind::Linear => {
                let tt = self.total_time;
                (b - a) * (b + a) / (2.0 * tt)
            }
            ScheduleKind::Tabulated(c) => self.piecewise(c, a, b, |t| self.value(t)),
        }
    }

    /// `∫_a^b λ(t)(1 − λ(t)) dt`.
    pub fn catalyst_integral(&self, a: f64, b: f64) -> f64 {
        match &self.kind {
            ScheduleKind::Linear => {
                let tt = self.total_time;
                let anti = |t: f64| {
                    let s = t / tt;
                    tt * s * s * (0.5 - s / 3.0)
                };
                anti(b) - anti(a)
            }
            ScheduleKind::Tabulated(c) => self.piecewise(c, a, b, |t| self.catalyst_weight(t)),
        }
    }

    /// `Λ(t) = ∫_0^t λ`.
    pub fn cumulative(&self, t: f64) -> f64 {
        self.integral(0.0, t)
    }

    /// `δΛ(t_m) = ∫_{t_{m−1}}^{t_m} λ(t) dt`.
    pub fn delta_lambda(&self, grid: &TimeGrid, m: usize) -> Result<f64> {
        let (a, b) = self.grid_slice(grid, m)?;
        Ok(self.integral(a, b))
    }

    /// `∫_{t_{m−1}}^{t_m} λ(t)(1 − λ(t)) dt`, the Z-catalyst phase angle.
    pub fn delta_lambda_catalyst(&self, grid: &TimeGrid, m: usize) -> Result<f64> {
        let (a, b) = self.grid_slice(grid, m)?;
        Ok(self.catalyst_integral(a, b))
    }

    pub fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        let t = grid.total_time();
        if (t - self.total_time).abs() > BOUNDARY_TOL * self.total_time.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "grid ends at {t} but the schedule has T = {}",
                self.total_time
            )));
        }
        Ok(())
    }

    fn grid_slice(&self, grid: &TimeGrid, m: usize) -> Result<(f64, f64)> {
        self.check_grid(grid)?;
        grid.slice(m)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = BOUNDARY_TOL * self.total_time;
        if !(t >= -slack && t <= self.total_time + slack) {
            return Err(Error::Domain {
                what: "time",
                value: t,
                lo: 0.0,
                hi: self.total_time,
            });
        }
        Ok(())
    }

    fn piecewise(&self, curve: &MonotoneCubic, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        if b < a {
            return -self.piecewise(curve, b, a, f);
        }
        let mut total = 0.0;
        let mut lo = a;
        for &knot in curve.knots().iter().filter(|&&k| k > a && k < b) {
            total += self.quadrature.integrate(lo, knot, &f);
            lo = knot;
        }
        total + self.quadrature.integrate(lo, b, &f)
    }
}

/// Piecewise-cubic Hermite interpolant with Fritsch–Carlson slopes; it does
/// not overshoot the data, so monotone knots give a monotone curve.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidSchedule("need at least two knots".into()));
        }
        if points.iter().any(|(t, l)| !t.is_finite() || !l.is_finite()) {
            return Err(Error::InvalidSchedule("knots must be finite".into()));
        }
        if let Some(w) = points
            .windows(2)
            .find(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidSchedule(format!(
                "knot times not strictly increasing at {} -> {}",
                w[0].0, w[1].0
            )));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes = vec![d[0], d[0]];
        } else {
            for k in 1..n - 1 {
                if d[k - 1] * d[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
                }
            }
            slopes[0] = edge_slope(h[0], h[1], d[0], d[1]);
            slopes[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
        Ok(MonotoneCubic { xs, ys, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let k = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let s = (x - self.xs[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }
}

/// One-sided three-point slope, limited to keep the end interval monotone.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_values() {
        let s = Schedule::linear(16.0).unwrap();
        assert_eq!(s.lambda_at(8.0).unwrap(), 0.5);
        assert_eq!(s.lambda_at(16.0).unwrap(), 1.0);
        assert_eq!(s.lambda_at(0.0).unwrap(), 0.0);
        assert!(matches!(s.lambda_at(16.5), Err(Error::Domain { .. })));
        assert!(matches!(s.lambda_at(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn tabulated_linear_data_interpolates_linearly() {
        let s = Schedule::tabulated(&[(0.0, 0.0), (1.0, 1.0)], 16).unwrap();
        assert!((s.lambda_at(0.25).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tabulated_rejects_bad_boundaries() {
        assert!(Schedule::tabulated(&[(0.0, 0.1), (1.0, 1.0)], 16).is_err());
        assert!(Schedule::tabulated(&[(0.0, 0.0), (1.0, 0.9)], 16).is_err());
        assert!(Schedule::tabulated(&[(0.5, 0.0), (1.0, 1.0)], 16).is_err());
        assert!(Schedule::tabulated(&[(0.0, 0.0), (0.5, 1.3), (1.0, 1.0)], 16).is_err());
        assert!(Schedule::tabulated(&[(0.0, 0.0), (0.0, 0.5), (1.0, 1.0)], 16).is_err());
    }

    #[test]
    fn delta_lambda_closed_form() {
        let s = Schedule::linear(16.0).unwrap();
        let g = TimeGrid::uniform(16.0, 4).unwrap();
        assert_eq!(s.delta_lambda(&g, 1).unwrap(), 0.5);
        let g = TimeGrid::uniform(16.0, 256).unwrap();
        assert!((s.delta_lambda(&g, 256).unwrap() - 0.0623779296875).abs() < 1e-15);
        assert!(matches!(s.delta_lambda(&g, 0), Err(Error::Index { .. })));
        assert!(matches!(s.delta_lambda(&g, 257), Err(Error::Index { .. })));
    }

    #[test]
    fn catalyst_integral_totals() {
        let s = Schedule::linear(6.0).unwrap();
        let g = TimeGrid::uniform(6.0, 1).unwrap();
        assert!((s.delta_lambda_catalyst(&g, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_must_match_schedule() {
        let s = Schedule::linear(16.0).unwrap();
        let g = TimeGrid::uniform(8.0, 4).unwrap();
        assert!(matches!(s.delta_lambda(&g, 1), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn monotone_knots_give_monotone_curve() {
        let pts = [(0.0, 0.0), (1.0, 0.05), (2.0, 0.9), (3.0, 0.95), (4.0, 1.0)];
        let s = Schedule::tabulated(&pts, 16).unwrap();
        let mut prev = 0.0;
        for k in 0..=4000 {
            let v = s.lambda_at(k as f64 * 1e-3).unwrap();
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}
