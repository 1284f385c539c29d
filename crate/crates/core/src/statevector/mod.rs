//! Dense statevector kernel: rotation gates, Hamiltonian exponentials and
//! measurement queries.

mod expm;
mod operator;
mod state;

pub use expm::{expm_apply, ExpmBackend, AUTO_DENSE_MAX_QUBITS, KRYLOV_MAX_DIM};
pub use operator::{DenseHamiltonian, HermitianOperator, PauliString, PauliSum, DENSE_MAX_QUBITS};
pub use state::{all_up_probability, basis_probability, StateVector};
