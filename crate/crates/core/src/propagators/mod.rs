//! The compared evolutions: converged reference, discretized, Trotterized and
//! phase-decomposed, including catalyst terms.
//!
//! Every evolution starts from the driver ground state `|+⟩^⊗N`. Slices are
//! applied right to left in operator order, i.e. slice 1 first. Within a gate
//! slice the diagonal block (`R_ZZ`, then `R_Z`, then the Z catalyst) acts
//! before the off-diagonal block (`R_XX`, then `R_X` or tilted rotations).
//!
//! The phase-decomposed state approximates the exact state itself. Against the
//! discretized evolution of the phase-rotated Hamiltonian it differs only by
//! a diagonal unitary, so that comparison is made on probabilities.

mod evolve;
mod hamiltonian;

pub use evolve::{
    apply_off_diagonal_sector, evolve, evolve_discretized, evolve_on_grid, evolve_phase_decomposed,
    evolve_reference, evolve_trotterized, Evolution, EvolutionPlan, Method, RecordOptions,
    ReferenceIntegrator, ReferenceOptions, SliceSampling, Trajectory, TrajectoryPoint,
};
pub use hamiltonian::build_hamiltonian_at;
