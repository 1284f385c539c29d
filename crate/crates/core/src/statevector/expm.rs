//! Action of `exp(−i·δt·H)` on a state.
//!
//! Two backends share one accuracy contract (relative 2-norm error below
//! `1e-12`):
//!
//! * [`ExpmBackend::Dense`] diagonalizes the materialized matrix. Exact up to
//!   rounding, but `O(8^N)`; intended for small registers and as a cross-check.
//! * [`ExpmBackend::Krylov`] runs a fully reorthogonalized Lanczos iteration
//!   with the matrix-free operator and exponentiates the small tridiagonal
//!   projection. The step is split whenever the a-posteriori error estimate
//!   does not drop below the target within [`KRYLOV_MAX_DIM`] vectors.
//!
//! [`ExpmBackend::Auto`] uses the dense path up to [`AUTO_DENSE_MAX_QUBITS`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::operator::HermitianOperator;
use super::state::StateVector;
use crate::error::{Error, Result};

pub const KRYLOV_MAX_DIM: usize = 40;
pub const AUTO_DENSE_MAX_QUBITS: usize = 6;

/// Per-substep absolute error target for unit vectors.
const KRYLOV_TOL: f64 = 1e-14;
const BREAKDOWN_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpmBackend {
    #[default]
    Auto,
    Dense,
    Krylov,
}

/// Replace `state` by `exp(−i·dt·H)·state`.
pub fn expm_apply<H: HermitianOperator + ?Sized>(
    h: &H,
    dt: f64,
    state: &mut StateVector,
    backend: ExpmBackend,
) -> Result<()> {
    if h.n() != state.n() {
        return Err(Error::SizeMismatch {
            left: h.dim(),
            right: state.dim(),
        });
    }
    if !dt.is_finite() {
        return Err(Error::Domain {
            what: "duration",
            value: dt,
            lo: f64::MIN,
            hi: f64::MAX,
        });
    }
    if dt == 0.0 {
        return Ok(());
    }
    let use_dense = match backend {
        ExpmBackend::Dense => true,
        ExpmBackend::Krylov => false,
        ExpmBackend::Auto => h.n() <= AUTO_DENSE_MAX_QUBITS,
    };
    let out = if use_dense {
        dense_expm_action(h, dt, state.amplitudes())?
    } else {
        krylov_expm_action(h, dt, state.amplitudes())
    };
    state.set_amplitudes(out);
    Ok(())
}

fn dense_expm_action<H: HermitianOperator + ?Sized>(
    h: &H,
    dt: f64,
    v: &[Complex64],
) -> Result<Vec<Complex64>> {
    let dense = h.to_dense()?;
    let eig = SymmetricEigen::new(dense.into_matrix());
    let q = &eig.eigenvectors;
    let dim = v.len();
    // c = Q† v, scaled by exp(−i dt λ_k), then mapped back with Q
    let coeffs: Vec<Complex64> = (0..dim)
        .map(|k| {
            let c: Complex64 = (0..dim).map(|r| q[(r, k)].conj() * v[r]).sum();
            c * Complex64::from_polar(1.0, -dt * eig.eigenvalues[k])
        })
        .collect();
    Ok((0..dim)
        .map(|r| (0..dim).map(|k| q[(r, k)] * coeffs[k]).sum())
        .collect())
}

fn krylov_expm_action<H: HermitianOperator + ?Sized>(
    h: &H,
    dt: f64,
    v: &[Complex64],
) -> Vec<Complex64> {
    let mut current = v.to_vec();
    let mut remaining = dt;
    // Start from a step that keeps the projected exponent moderate.
    let bound = h.norm_bound().max(f64::MIN_POSITIVE);
    let mut step = remaining.abs().min(8.0 / bound).copysign(dt);
    while remaining != 0.0 {
        if step.abs() > remaining.abs() {
            step = remaining;
        }
        match lanczos_step(h, step, &current) {
            Some(next) => {
                current = next;
                remaining -= step;
                if remaining.abs() < 1e-15 * dt.abs() {
                    remaining = 0.0;
                }
            }
            None => step *= 0.5,
        }
    }
    current
}

/// One Lanczos approximation of `exp(−i·dt·H)·v`, or `None` when the error
/// estimate stays above tolerance at the maximum subspace size.
fn lanczos_step<H: HermitianOperator + ?Sized>(
    h: &H,
    dt: f64,
    v: &[Complex64],
) -> Option<Vec<Complex64>> {
    let dim = v.len();
    let beta0 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if beta0 == 0.0 {
        return Some(v.to_vec());
    }
    let max_k = KRYLOV_MAX_DIM.min(dim);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_k + 1);
    basis.push(v.iter().map(|a| a / beta0).collect());
    let mut alpha: Vec<f64> = Vec::with_capacity(max_k);
    let mut beta: Vec<f64> = Vec::with_capacity(max_k);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];

    for k in 0..max_k {
        h.apply_into(&basis[k], &mut w);
        let a: f64 = basis[k]
            .iter()
            .zip(&w)
            .map(|(b, x)| (b.conj() * x).re)
            .sum();
        alpha.push(a);
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let proj: Complex64 = q.iter().zip(&w).map(|(b, x)| b.conj() * x).sum();
                for (x, b) in w.iter_mut().zip(q) {
                    *x -= proj * b;
                }
            }
        }
        let b_next = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let size = k + 1;
        let breakdown =
            b_next < BREAKDOWN_TOL * (a.abs() + beta.last().copied().unwrap_or(0.0)).max(1.0);
        let last_reached = size == max_k;
        // checking every iteration is cheap relative to the operator applies
        let small = tridiagonal_exp_e1(&alpha, &beta, dt);
        let estimate = beta0 * b_next * small[size - 1].norm();
        if breakdown || estimate < KRYLOV_TOL * beta0 {
            return Some(combine(&basis, &small, beta0));
        }
        if last_reached {
            return None;
        }
        beta.push(b_next);
        basis.push(w.iter().map(|x| x / b_next).collect());
    }
    None
}

/// `exp(−i·dt·T)·e_1` for the symmetric tridiagonal `T`.
fn tridiagonal_exp_e1(alpha: &[f64], beta: &[f64], dt: f64) -> Vec<Complex64> {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let q = &eig.eigenvectors;
    (0..k)
        .map(|r| {
            (0..k)
                .map(|j| Complex64::from_polar(q[(r, j)] * q[(0, j)], -dt * eig.eigenvalues[j]))
                .sum()
        })
        .collect()
}

fn combine(basis: &[Vec<Complex64>], coeffs: &[Complex64], scale: f64) -> Vec<Complex64> {
    let dim = basis[0].len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (q, c) in basis.iter().zip(coeffs) {
        let c = c * scale;
        for (o, b) in out.iter_mut().zip(q) {
            *o += c * b;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{PauliString, PauliSum};
    use std::f64::consts::PI;

    #[test]
    fn diagonal_hamiltonian_multiplies_phases() {
        let mut h = PauliSum::zero(2).unwrap();
        h.add_term(PauliString::z(0), 0.4).unwrap();
        h.add_term(PauliString::zz(0, 1), -1.3).unwrap();
        for backend in [ExpmBackend::Dense, ExpmBackend::Krylov] {
            let mut s = StateVector::uniform_superposition(2).unwrap();
            expm_apply(&h, 0.7, &mut s, backend).unwrap();
            for (b, a) in s.amplitudes().iter().enumerate() {
                let e = h.diagonal()[b];
                let want = Complex64::from_polar(0.5, -0.7 * e);
                assert!((a - want).norm() < 1e-13, "{backend:?} {b}");
            }
        }
    }

    #[test]
    fn full_x_rotation_is_minus_identity() {
        let mut h = PauliSum::zero(1).unwrap();
        h.add_term(PauliString::x(0), -1.0).unwrap();
        for backend in [ExpmBackend::Dense, ExpmBackend::Krylov] {
            let mut s = StateVector::basis_state(1, 0).unwrap();
            s.apply_rx(0, 0.3).unwrap();
            let before = s.clone();
            expm_apply(&h, PI, &mut s, backend).unwrap();
            for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
                assert!((a + b).norm() < 1e-12, "{backend:?}");
            }
        }
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let h = PauliSum::zero(2).unwrap();
        let mut s = StateVector::uniform_superposition(3).unwrap();
        assert!(matches!(
            expm_apply(&h, 0.1, &mut s, ExpmBackend::Auto),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn krylov_splits_long_steps() {
        let mut h = PauliSum::zero(4).unwrap();
        for q in 0..4 {
            h.add_term(PauliString::x(q), -1.0 - q as f64).unwrap();
            h.add_term(PauliString::z(q), 0.5).unwrap();
        }
        h.add_term(PauliString::zz(0, 3), 2.0).unwrap();
        let mut a = StateVector::uniform_superposition(4).unwrap();
        let mut b = a.clone();
        expm_apply(&h, 25.0, &mut a, ExpmBackend::Dense).unwrap();
        expm_apply(&h, 25.0, &mut b, ExpmBackend::Krylov).unwrap();
        let diff: f64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-12, "diff {diff:e}");
    }
}
