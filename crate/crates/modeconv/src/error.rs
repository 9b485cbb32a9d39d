//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by simulation, design, and pipeline code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("envelopes live on different grids")]
    GridMismatch,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("requested {requested} modes but the decomposition has rank {available}")]
    Rank { requested: usize, available: usize },

    #[error("coefficients are not normalized: sum of squares is {norm_sq}")]
    Normalization { norm_sq: f64 },

    #[error("basis is not orthonormal: largest Gram defect {defect:.3e}")]
    NonOrthonormalBasis { defect: f64 },

    #[error("step count {n_steps} below the accuracy floor of {min}")]
    StepCount { n_steps: usize, min: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("photon conservation violated: efficiency {eta} exceeds 1")]
    ConservationViolation { eta: f64 },

    #[error("zero-norm signal")]
    ZeroSignal,

    #[error("comb projection would discard {discarded_frac:.1}% of the pump energy")]
    ProjectionLoss { discarded_frac: f64 },

    #[error("waveshaper mask does not cover the line at {line_freq_ghz} GHz")]
    MaskCoverage { line_freq_ghz: f64 },

    #[error("optimizer failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("expected count rate {expected_rate:.3e} cps exceeds the detector limit {max_rate:.3e} cps; add attenuation")]
    Saturation { expected_rate: f64, max_rate: f64 },

    #[error("separability undefined: all efficiencies in the row are zero")]
    UndefinedSeparability,

    #[error("scan range too narrow: {0}")]
    Range(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the batch front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::ConvergenceFailure(_) => 3,
            Error::ConservationViolation { .. } | Error::Saturation { .. } => 4,
            _ => 1,
        }
    }
}
