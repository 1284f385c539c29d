//! Compiles the guide under `book/` so that `cargo test` runs its listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/conventions.md")]
pub mod conventions {}
#[doc = include_str!("../../../book/src/schedule.md")]
pub mod schedule {}
#[doc = include_str!("../../../book/src/phase-decomposition.md")]
pub mod phase_decomposition {}
#[doc = include_str!("../../../book/src/reference.md")]
pub mod reference {}
#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}
#[doc = include_str!("../../../book/src/catalysts.md")]
pub mod catalysts {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
