//! Independent reference computations for the annealsim test suites.
//!
//! Nothing here goes through the bit-mask kernels of `annealsim`: operators
//! are built from Kronecker products of 2×2 Pauli matrices, exponentials use
//! scaling-and-squaring of a Taylor series, and integrals use adaptive
//! Simpson quadrature.

use annealsim::model::{Schedule, SpinSystem, TimeGrid};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(label: char) -> CMatrix {
    match label {
        'I' => CMatrix::identity(2, 2),
        'X' => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        'Y' => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        'Z' => CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        other => panic!("unknown Pauli {other}"),
    }
}

/// Pauli string on `n` qubits with `ops[(qubit, label)]`; identity elsewhere.
/// Qubit 0 is the least significant factor (rightmost in the Kronecker product).
pub fn pauli_string(n: usize, ops: &[(usize, char)]) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for q in (0..n).rev() {
        let label = ops.iter().find(|(k, _)| *k == q).map_or('I', |(_, l)| *l);
        m = m.kronecker(&pauli(label));
    }
    m
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::from_element(dim, dim, c(0.0, 0.0))
}

/// `H_P = −Σ J ZZ − Σ h Z`.
pub fn problem_matrix(system: &SpinSystem) -> CMatrix {
    let n = system.n();
    let mut h = zeros(1 << n);
    for cp in system.couplings() {
        h -= pauli_string(n, &[(cp.i, 'Z'), (cp.j, 'Z')]) * c(cp.strength, 0.0);
    }
    for (q, f) in system.fields_z().iter().enumerate() {
        h -= pauli_string(n, &[(q, 'Z')]) * c(*f, 0.0);
    }
    h
}

/// `Σ h̃ Z` (zero when absent).
pub fn bias_matrix(system: &SpinSystem) -> CMatrix {
    let n = system.n();
    let mut h = zeros(1 << n);
    if let Some(bias) = system.catalyst().and_then(|k| k.bias_z.as_ref()) {
        for (q, f) in bias.iter().enumerate() {
            h += pauli_string(n, &[(q, 'Z')]) * c(*f, 0.0);
        }
    }
    h
}

/// `−(1−λ)ΣΓX + λ(1−λ)(ΣK XX + α(t)ΣY)` at time `t`.
pub fn off_diagonal_matrix(system: &SpinSystem, schedule: &Schedule, t: f64) -> CMatrix {
    let n = system.n();
    let l = schedule.value(t);
    let w = l * (1.0 - l);
    let mut h = zeros(1 << n);
    for (q, g) in system.fields_x().iter().enumerate() {
        h -= pauli_string(n, &[(q, 'X')]) * c((1.0 - l) * g, 0.0);
    }
    if let Some(cat) = system.catalyst() {
        for k in &cat.xx_couplings {
            h += pauli_string(n, &[(k.i, 'X'), (k.j, 'X')]) * c(w * k.strength, 0.0);
        }
        if let Some(alpha) = &cat.y_field {
            let a = alpha.eval(t);
            for q in 0..n {
                h += pauli_string(n, &[(q, 'Y')]) * c(w * a, 0.0);
            }
        }
    }
    h
}

/// Full annealing Hamiltonian at `t`.
pub fn hamiltonian_matrix(system: &SpinSystem, schedule: &Schedule, t: f64) -> CMatrix {
    let l = schedule.value(t);
    problem_matrix(system) * c(l, 0.0)
        + bias_matrix(system) * c(l * (1.0 - l), 0.0)
        + off_diagonal_matrix(system, schedule, t)
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring with a degree-30 Taylor polynomial.
pub fn expm(a: &CMatrix) -> CMatrix {
    let norm = one_norm(a);
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    let scaled = a * c(2f64.powi(-squarings), 0.0);
    let dim = a.nrows();
    let mut result = CMatrix::identity(dim, dim);
    let mut term = CMatrix::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &scaled * c(1.0 / k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(−i·t·H)`.
pub fn evolution_operator(h: &CMatrix, t: f64) -> CMatrix {
    expm(&(h * c(0.0, -t)))
}

/// `exp(iθ·P)` for a Pauli string `P`.
pub fn rotation(n: usize, ops: &[(usize, char)], theta: f64) -> CMatrix {
    expm(&(pauli_string(n, ops) * c(0.0, theta)))
}

pub fn plus_state(n: usize) -> CVector {
    let dim = 1 << n;
    CVector::from_element(dim, c((dim as f64).sqrt().recip(), 0.0))
}

pub fn to_vector(amps: &[Complex64]) -> CVector {
    CVector::from_column_slice(amps)
}

pub fn probabilities(v: &CVector) -> Vec<f64> {
    v.iter().map(|z| z.norm_sqr()).collect()
}

/// Ising energies by direct summation, `σ_i = 1 − 2·bit_i`.
pub fn brute_force_energies(system: &SpinSystem) -> Vec<f64> {
    let n = system.n();
    (0..1usize << n)
        .map(|idx| {
            let sigma: Vec<f64> = (0..n)
                .map(|q| 1.0 - 2.0 * ((idx >> q) & 1) as f64)
                .collect();
            let mut e = 0.0;
            for a in 0..n {
                for b in 0..n {
                    if a < b {
                        let j = system
                            .couplings()
                            .iter()
                            .find(|cp| cp.i == a && cp.j == b)
                            .map_or(0.0, |cp| cp.strength);
                        e -= j * sigma[a] * sigma[b];
                    }
                }
                e -= system.fields_z()[a] * sigma[a];
            }
            e
        })
        .collect()
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Probabilities after propagating `|+⟩` through the discretized dynamics of
/// the phase-rotated Hamiltonian
/// `H_f(t) = U_f H U_f† + i(∂_t U_f)U_f†` with
/// `U_f(t) = exp(i[Λ(t)H_P + Λ_C(t)H_Z])`, one dense exponential of
/// `H_f(t_m)` per slice.
pub fn phase_frame_probabilities(
    system: &SpinSystem,
    schedule: &Schedule,
    grid: &TimeGrid,
) -> Vec<f64> {
    let n = system.n();
    let hp = problem_matrix(system);
    let hz = bias_matrix(system);
    let big_lambda = |t: f64| adaptive_simpson(&|s| schedule.value(s), 0.0, t, 1e-15);
    let big_lambda_c = |t: f64| {
        adaptive_simpson(
            &|s| {
                let l = schedule.value(s);
                l * (1.0 - l)
            },
            0.0,
            t,
            1e-15,
        )
    };
    let mut psi = plus_state(n);
    for m in 1..=grid.slices() {
        let (a, b) = (grid.time(m - 1), grid.time(m));
        let l = schedule.value(b);
        let w = l * (1.0 - l);
        let generator = &hp * c(big_lambda(b), 0.0) + &hz * c(big_lambda_c(b), 0.0);
        let uf = expm(&(generator * c(0.0, 1.0)));
        let h = hamiltonian_matrix(system, schedule, b);
        // i(∂_t U_f)U_f† = −(λ H_P + λ(1−λ) H_Z)
        let hf = &uf * h * uf.adjoint() - &hp * c(l, 0.0) - &hz * c(w, 0.0);
        psi = evolution_operator(&hf, b - a) * psi;
    }
    probabilities(&psi)
}

/// Discretized evolution with one dense exponential of `H(t_m)` per slice.
pub fn discretized_probabilities(
    system: &SpinSystem,
    schedule: &Schedule,
    grid: &TimeGrid,
) -> Vec<f64> {
    let mut psi = plus_state(system.n());
    for m in 1..=grid.slices() {
        let (a, b) = (grid.time(m - 1), grid.time(m));
        psi = evolution_operator(&hamiltonian_matrix(system, schedule, b), b - a) * psi;
    }
    probabilities(&psi)
}

/// `‖a − b‖₂`.
pub fn distance(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_pauli_is_rotation() {
        let theta = 0.37;
        let r = rotation(1, &[(0, 'Y')], theta);
        let expected =
            CMatrix::identity(2, 2) * c(theta.cos(), 0.0) + pauli('Y') * c(0.0, theta.sin());
        assert!((r - expected).norm() < 1e-15);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kronecker_order_is_little_endian() {
        // X on qubit 1 maps |00⟩ (index 0) to index 2
        let m = pauli_string(2, &[(1, 'X')]);
        assert_eq!(m[(2, 0)], c(1.0, 0.0));
    }
}
