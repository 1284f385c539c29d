use num_complex::Complex64;

use crate::basis;
use crate::error::{Error, Result};
use crate::model::{SpinSystem, MAX_QUBITS};

const NORM_TOL: f64 = 1e-10;

/// Dense `2^N`-amplitude state in the little-endian basis of [`crate::basis`].
///
/// Rotation gates follow the convention `R_P(θ) = exp(+iθP)`. With
/// `H_P = −ΣJZZ − ΣhZ` and `V = −ΣΓX`, a slice `exp(−iδ H_P)` is
/// `R_ZZ(δJ)·R_Z(δh)` and `exp(−iδ(1−λ)V)` is `R_X(δ(1−λ)Γ)`: the listed
/// angles are used unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::Index {
                what: "basis state",
                index,
                lo: 0,
                hi: dim - 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// `|+⟩^⊗N`, every amplitude `2^{−N/2}`.
    pub fn uniform_superposition(n: usize) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector {
            n,
            amps: vec![a; dim],
        })
    }

    /// Ground state of the driver `−Σ Γ_i X_i`, which is `|+⟩^⊗N` when every
    /// `Γ_i ≥ 0`. Negative transverse fields are rejected.
    pub fn driver_ground_state(system: &SpinSystem) -> Result<Self> {
        if let Some((q, g)) = system
            .fields_x()
            .iter()
            .enumerate()
            .find(|(_, g)| **g < 0.0)
        {
            return Err(Error::InvalidSystem(format!(
                "transverse field Γ_{q} = {g} is negative; driver ground state is not |+⟩"
            )));
        }
        Self::uniform_superposition(system.n())
    }

    /// Wrap raw amplitudes; the length must be `2^n` and the norm 1.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::SizeMismatch {
                left: amps.len(),
                right: 1 << n,
            });
        }
        let s = StateVector { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain {
                what: "state norm²",
                value: norm,
                lo: 1.0,
                hi: 1.0,
            });
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn set_amplitudes(&mut self, amps: Vec<Complex64>) {
        debug_assert_eq!(amps.len(), self.amps.len());
        self.amps = amps;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨σ|ψ⟩|²`.
    pub fn basis_probability(&self, sigma: usize) -> Result<f64> {
        self.amps
            .get(sigma)
            .map(|a| a.norm_sqr())
            .ok_or(Error::Index {
                what: "basis state",
                index: sigma,
                lo: 0,
                hi: self.dim() - 1,
            })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `⟨ψ|Π_i X_i|ψ⟩`. The all-X string maps `b` to its complement.
    pub fn parity_expectation(&self) -> f64 {
        let mask = self.dim() - 1;
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| (a.conj() * self.amps[b ^ mask]).re)
            .sum()
    }

    /// `⟨ψ|X_i|ψ⟩`.
    pub fn expectation_x(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = 1 << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| (a.conj() * self.amps[b ^ bit]).re)
            .sum())
    }

    /// `exp(iθ Z_i)`.
    pub fn apply_rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let plus = Complex64::from_polar(1.0, theta);
        let minus = plus.conj();
        let bit = 1 << qubit;
        for (b, a) in self.amps.iter_mut().enumerate() {
            *a *= if b & bit == 0 { plus } else { minus };
        }
        Ok(())
    }

    /// `exp(iθ Z_i Z_j)`.
    pub fn apply_rzz(&mut self, i: usize, j: usize, theta: f64) -> Result<()> {
        self.check_pair(i, j)?;
        let same = Complex64::from_polar(1.0, theta);
        let diff = same.conj();
        for (b, a) in self.amps.iter_mut().enumerate() {
            let odd = ((b >> i) ^ (b >> j)) & 1;
            *a *= if odd == 0 { same } else { diff };
        }
        Ok(())
    }

    /// `exp(iθ X_i)`.
    pub fn apply_rx(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.mix_pairs(1 << qubit, theta);
        Ok(())
    }

    /// `exp(iθ X_i X_j)`.
    pub fn apply_rxx(&mut self, i: usize, j: usize, theta: f64) -> Result<()> {
        self.check_pair(i, j)?;
        self.mix_pairs((1 << i) | (1 << j), theta);
        Ok(())
    }

    /// Rotation by `φ` about `cosψ·X + sinψ·Y`, realized as
    /// `R_Z(−ψ/2) R_X(φ) R_Z(ψ/2)` (rightmost applied first).
    pub fn apply_tilted_rotation(&mut self, qubit: usize, phi: f64, psi: f64) -> Result<()> {
        self.apply_rz(qubit, 0.5 * psi)?;
        self.apply_rx(qubit, phi)?;
        self.apply_rz(qubit, -0.5 * psi)
    }

    /// Multiply amplitude `b` by `exp(−i·scale·diagonal[b])`.
    pub fn apply_diagonal_phase(&mut self, diagonal: &[f64], scale: f64) -> Result<()> {
        if diagonal.len() != self.dim() {
            return Err(Error::SizeMismatch {
                left: diagonal.len(),
                right: self.dim(),
            });
        }
        for (a, e) in self.amps.iter_mut().zip(diagonal) {
            *a *= Complex64::from_polar(1.0, -scale * e);
        }
        Ok(())
    }

    /// `cosθ·I + i sinθ·X_mask` acting on pairs `(b, b ^ mask)`.
    fn mix_pairs(&mut self, mask: usize, theta: f64) {
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        let low = mask.trailing_zeros();
        for b in 0..self.amps.len() {
            // visit each pair once, from the member with the lowest mask bit clear
            if (b >> low) & 1 == 0 {
                let p = b ^ mask;
                let (x, y) = (self.amps[b], self.amps[p]);
                self.amps[b] = x * c + y * is;
                self.amps[p] = x * is + y * c;
            }
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::Index {
                what: "qubit",
                index: q,
                lo: 0,
                hi: self.n - 1,
            });
        }
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        if i == j {
            return Err(Error::Configuration(format!(
                "two-qubit gate needs distinct qubits, got ({i}, {j})"
            )));
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Size {
            what: "statevector",
            qubits: n,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

/// `|⟨σ|ψ⟩|²` for a basis label.
pub fn basis_probability(state: &StateVector, sigma: usize) -> Result<f64> {
    state.basis_probability(sigma)
}

/// Probability that all spins point up.
pub fn all_up_probability(state: &StateVector) -> f64 {
    state.amps[basis::all_up()].norm_sqr()
}
