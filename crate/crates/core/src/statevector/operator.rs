use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::MAX_QUBITS;

/// Largest register for which a dense `2^N × 2^N` matrix is materialized.
pub const DENSE_MAX_QUBITS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-10;

/// Tensor product of single-qubit Paulis, stored as bit masks. A qubit in
/// both masks carries `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    x_mask: usize,
    z_mask: usize,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString {
        x_mask: 0,
        z_mask: 0,
    };

    pub fn from_masks(x_mask: usize, z_mask: usize) -> Self {
        PauliString { x_mask, z_mask }
    }

    pub fn x(i: usize) -> Self {
        Self::from_masks(1 << i, 0)
    }

    pub fn y(i: usize) -> Self {
        Self::from_masks(1 << i, 1 << i)
    }

    pub fn z(i: usize) -> Self {
        Self::from_masks(0, 1 << i)
    }

    pub fn xx(i: usize, j: usize) -> Self {
        Self::from_masks((1 << i) | (1 << j), 0)
    }

    pub fn zz(i: usize, j: usize) -> Self {
        Self::from_masks(0, (1 << i) | (1 << j))
    }

    pub fn x_mask(&self) -> usize {
        self.x_mask
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    fn support(&self) -> usize {
        self.x_mask | self.z_mask
    }

    /// `P|b⟩ = phase·|b ⊕ x_mask⟩` with `phase = i^{#Y}·(−1)^{|b ∧ z_mask|}`.
    #[inline]
    pub fn act(&self, b: usize) -> (Complex64, usize) {
        let ys = (self.x_mask & self.z_mask).count_ones();
        let sign = if (b & self.z_mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let phase = match ys % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (phase, b ^ self.x_mask)
    }
}

/// Hermitian operator on `N` qubits that can act on a vector.
pub trait HermitianOperator {
    fn n(&self) -> usize;

    fn dim(&self) -> usize {
        1 << self.n()
    }

    /// `out = H·x`.
    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]);

    fn to_dense(&self) -> Result<DenseHamiltonian>;

    /// Upper bound on the spectral radius.
    fn norm_bound(&self) -> f64;
}

/// Real-weighted sum of Pauli strings. Diagonal terms are folded into an
/// explicit diagonal so that applying the operator costs one pass per
/// off-diagonal string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    diagonal: Vec<f64>,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Size {
                what: "Pauli sum",
                qubits: n,
                cap: MAX_QUBITS,
            });
        }
        Ok(PauliSum {
            n,
            diagonal: vec![0.0; 1 << n],
            terms: BTreeMap::new(),
        })
    }

    pub fn add_term(&mut self, p: PauliString, coeff: f64) -> Result<()> {
        if p.support() >> self.n != 0 {
            return Err(Error::Index {
                what: "Pauli support qubit",
                index: usize::BITS as usize - p.support().leading_zeros() as usize - 1,
                lo: 0,
                hi: self.n - 1,
            });
        }
        if p.is_diagonal() {
            for (b, d) in self.diagonal.iter_mut().enumerate() {
                *d += coeff * p.act(b).0.re;
            }
        } else {
            *self.terms.entry(p).or_insert(0.0) += coeff;
        }
        Ok(())
    }

    /// Add `scale·diag` to the diagonal.
    pub fn add_diagonal(&mut self, diag: &[f64], scale: f64) -> Result<()> {
        if diag.len() != self.diagonal.len() {
            return Err(Error::SizeMismatch {
                left: diag.len(),
                right: self.diagonal.len(),
            });
        }
        for (d, e) in self.diagonal.iter_mut().zip(diag) {
            *d += scale * e;
        }
        Ok(())
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal_terms(&self) -> impl Iterator<Item = (&PauliString, &f64)> {
        self.terms.iter()
    }

    /// `Σ_k w_k·H_k`.
    pub fn linear_combination(parts: &[(f64, &PauliSum)]) -> Result<PauliSum> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::Configuration("empty linear combination".into()));
        };
        let mut out = PauliSum::zero(first.n)?;
        for (w, h) in parts {
            if h.n != out.n {
                return Err(Error::SizeMismatch {
                    left: h.dim(),
                    right: out.dim(),
                });
            }
            out.add_diagonal(&h.diagonal, *w)?;
            for (p, c) in &h.terms {
                *out.terms.entry(*p).or_insert(0.0) += w * c;
            }
        }
        Ok(out)
    }
}

impl HermitianOperator for PauliSum {
    fn n(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for ((o, xi), d) in out.iter_mut().zip(x).zip(&self.diagonal) {
            *o = xi * d;
        }
        for (p, &c) in &self.terms {
            for (b, xb) in x.iter().enumerate() {
                let (phase, target) = p.act(b);
                out[target] += phase * xb * c;
            }
        }
    }

    fn to_dense(&self) -> Result<DenseHamiltonian> {
        check_dense(self.n)?;
        let dim = self.dim();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (b, d) in self.diagonal.iter().enumerate() {
            m[(b, b)] += Complex64::new(*d, 0.0);
        }
        for (p, &c) in &self.terms {
            for b in 0..dim {
                let (phase, target) = p.act(b);
                m[(target, b)] += phase * c;
            }
        }
        Ok(DenseHamiltonian {
            n: self.n,
            matrix: m,
        })
    }

    fn norm_bound(&self) -> f64 {
        let diag = self.diagonal.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        diag + self.terms.values().map(|c| c.abs()).sum::<f64>()
    }
}

/// Materialized Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseHamiltonian {
    /// Validates shape and Hermiticity (to within `1e-10`).
    pub fn from_matrix(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_dense(n)?;
        let dim = 1 << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::SizeMismatch {
                left: matrix.nrows().max(matrix.ncols()),
                right: dim,
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(DenseHamiltonian { n, matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// `max |H_ij − conj(H_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }
}

impl HermitianOperator for DenseHamiltonian {
    fn n(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let dim = self.dim();
        for (r, o) in out.iter_mut().enumerate().take(dim) {
            *o = (0..dim).map(|c| self.matrix[(r, c)] * x[c]).sum();
        }
    }

    fn to_dense(&self) -> Result<DenseHamiltonian> {
        Ok(self.clone())
    }

    fn norm_bound(&self) -> f64 {
        // max row sum bounds the spectral radius
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

fn check_dense(n: usize) -> Result<()> {
    if n == 0 || n > DENSE_MAX_QUBITS {
        return Err(Error::Size {
            what: "dense Hamiltonian",
            qubits: n,
            cap: DENSE_MAX_QUBITS,
        });
    }
    Ok(())
}
