//! Annealing problem definition: spin system, catalysts, schedule and the
//! exactly integrated schedule quantities used as gate angles.

mod grid;
mod quadrature;
mod schedule;
mod system;

pub use grid::TimeGrid;
pub use quadrature::GaussLegendre;
pub use schedule::{MonotoneCubic, Schedule, ScheduleKind, DEFAULT_QUADRATURE_ORDER};
pub use system::{
    diagonal_bias_energies, diagonal_problem_energies, CatalystSpec, Coupling, SpinSystem,
    SpinSystemBuilder, YField, MAX_QUBITS,
};
