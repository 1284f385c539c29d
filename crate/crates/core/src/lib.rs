//! Statevector simulation of gate-based quantum annealing.
//!
//! The crate compares four ways of evolving the transverse-field Ising
//! annealing Hamiltonian `H(t) = λ(t)H_P + (1−λ(t))V`:
//!
//! * a converged **reference** for the continuous-time dynamics,
//! * the **discretized** dynamics, one exact exponential per time slice,
//! * the conventional first-order **Trotterized** gate sequence,
//! * the **phase-decomposed** gate sequence, whose diagonal gates carry the
//!   integrated schedule `δΛ(t_m) = ∫ λ dt` and whose slices factorize with no
//!   digitization error.
//!
//! ```
//! use annealsim::model::{Schedule, SpinSystem};
//! use annealsim::propagators::{evolve, EvolutionPlan, Method};
//!
//! let system = SpinSystem::two_level(1.0, 1.0)?;
//! let schedule = Schedule::linear(16.0)?;
//! let run = evolve(&system, &schedule, &EvolutionPlan::new(Method::PhaseDecomposed, 512))?;
//! let p_up = run.state.basis_probability(0)?;
//! assert!((p_up - 0.99988).abs() < 1e-4);
//! # Ok::<(), annealsim::Error>(())
//! ```
//!
//! Basis states are little-endian with bit value 0 meaning spin up; see
//! [`basis`].

pub mod basis;
mod error;
pub mod metrics;
pub mod model;
pub mod propagators;
pub mod statevector;

pub use error::{Error, Result};
