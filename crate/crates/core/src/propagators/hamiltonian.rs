use crate::error::Result;
use crate::model::{diagonal_bias_energies, diagonal_problem_energies, Schedule, SpinSystem};
use crate::statevector::{PauliString, PauliSum};

/// `H(t) = λH_P + λ(1−λ)H_C + (1−λ)V` with `H_C = ΣK XX + Σh̃ Z + α(t)ΣY`.
pub fn build_hamiltonian_at(system: &SpinSystem, schedule: &Schedule, t: f64) -> Result<PauliSum> {
    schedule.lambda_at(t)?;
    Diagonals::new(system)?.hamiltonian_at(system, schedule, t)
}

/// Cached diagonals of `H_P` and the Z catalyst.
#[derive(Debug, Clone)]
pub(crate) struct Diagonals {
    pub problem: Vec<f64>,
    pub bias: Option<Vec<f64>>,
}

impl Diagonals {
    pub fn new(system: &SpinSystem) -> Result<Self> {
        let problem = diagonal_problem_energies(system)?;
        let bias = if system.has_bias_z() {
            Some(diagonal_bias_energies(system)?)
        } else {
            None
        };
        Ok(Diagonals { problem, bias })
    }

    pub fn hamiltonian_at(
        &self,
        system: &SpinSystem,
        schedule: &Schedule,
        t: f64,
    ) -> Result<PauliSum> {
        let lambda = schedule.value(t);
        let weight = lambda * (1.0 - lambda);
        let mut h = PauliSum::zero(system.n())?;
        h.add_diagonal(&self.problem, lambda)?;
        if let Some(bias) = &self.bias {
            h.add_diagonal(bias, weight)?;
        }
        for (q, g) in system.fields_x().iter().enumerate() {
            h.add_term(PauliString::x(q), -(1.0 - lambda) * g)?;
        }
        if let Some(cat) = system.catalyst() {
            for k in &cat.xx_couplings {
                h.add_term(PauliString::xx(k.i, k.j), weight * k.strength)?;
            }
            if let Some(alpha) = &cat.y_field {
                let a = alpha.eval(t);
                for q in 0..system.n() {
                    h.add_term(PauliString::y(q), weight * a)?;
                }
            }
        }
        Ok(h)
    }
}
