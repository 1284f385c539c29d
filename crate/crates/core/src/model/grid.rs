use crate::error::{Error, Result};

/// Slice boundaries `0 = t_0 < t_1 < … < t_M = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    boundaries: Vec<f64>,
}

impl TimeGrid {
    /// `M` slices of width `T / M`; the last boundary is exactly `T`.
    pub fn uniform(total_time: f64, slices: usize) -> Result<Self> {
        if slices == 0 {
            return Err(Error::InvalidGrid("slice count must be positive".into()));
        }
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "total time {total_time} must be positive"
            )));
        }
        let m = slices as f64;
        let boundaries = (0..=slices).map(|k| total_time * (k as f64) / m).collect();
        Ok(TimeGrid { boundaries })
    }

    pub fn from_boundaries(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::InvalidGrid("need at least two boundaries".into()));
        }
        if boundaries[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "first boundary is {} instead of 0",
                boundaries[0]
            )));
        }
        if let Some(w) = boundaries.windows(2).find(|w| {
            w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) || !w[1].is_finite()
        }) {
            return Err(Error::InvalidGrid(format!(
                "boundaries not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(TimeGrid { boundaries })
    }

    pub fn slices(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn total_time(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// `t_m` for `m ∈ 0..=M`.
    pub fn time(&self, m: usize) -> f64 {
        self.boundaries[m]
    }

    /// `(t_{m−1}, t_m)` for `m ∈ 1..=M`.
    pub fn slice(&self, m: usize) -> Result<(f64, f64)> {
        self.check_slice(m)?;
        Ok((self.boundaries[m - 1], self.boundaries[m]))
    }

    /// `δt_m = t_m − t_{m−1}`.
    pub fn width(&self, m: usize) -> Result<f64> {
        self.slice(m).map(|(a, b)| b - a)
    }

    pub fn check_slice(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.slices() {
            return Err(Error::Index {
                what: "slice",
                index: m,
                lo: 1,
                hi: self.slices(),
            });
        }
        Ok(())
    }

    /// Iterator over `(m, t_{m−1}, t_m)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.boundaries
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k + 1, w[0], w[1]))
    }
}
