use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{qubits} qubits exceeds the supported maximum of {cap} for {what}")]
    Size {
        what: &'static str,
        qubits: usize,
        cap: usize,
    },

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{what} index {index} out of range (valid range {lo}..={hi})")]
    Index {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },

    #[error("invalid spin system: {0}")]
    InvalidSystem(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported configuration: {0}")]
    Configuration(String),

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error(
        "reference evolution did not converge: difference {last_difference:e} at {slices} slices \
         (ceiling {ceiling})"
    )]
    Convergence {
        last_difference: f64,
        slices: usize,
        ceiling: usize,
    },

    #[error("need at least {required} usable points for a fit, got {usable} ({dropped} dropped)")]
    InsufficientData {
        required: usize,
        usable: usize,
        dropped: usize,
    },
}
