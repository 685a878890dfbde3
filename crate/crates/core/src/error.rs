use thiserror::Error;

/// Errors raised by the numerical kernels and the physics layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("eigensolver did not converge for index {0}")]
    NoConvergence(usize),

    #[error("undersampled loop: phase step {step:.4} at sample {index} exceeds the allowed magnitude")]
    UndersampledLoop { index: usize, step: f64 },

    #[error("dispersive approximation invalid: qubit detuning is zero")]
    Resonant,

    #[error("degenerate model: {0}")]
    DegenerateModel(&'static str),

    #[error("point is not a band touching (|h| = {0:e})")]
    NotBandTouching(f64),

    #[error("Berry curvature is singular at a Weyl node (q = 0)")]
    MonopoleSingularity,

    #[error("ground state is degenerate (band splitting {0:e})")]
    DegenerateGroundState(f64),

    #[error("Chern sum {raw:.4} is not within 0.05 of an integer (mesh {mesh})")]
    NonConvergence { raw: f64, mesh: usize },

    #[error("link variable vanishes on the mapped torus; reduce theta_r")]
    GapClosing,
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidInput(_) | Error::NonFinite(_))
    }

    /// Stable snake_case tag for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NonFinite(_) => "non_finite",
            Error::Singular { .. } => "singular",
            Error::NoConvergence(_) => "no_convergence",
            Error::UndersampledLoop { .. } => "undersampled_loop",
            Error::Resonant => "resonant",
            Error::DegenerateModel(_) => "degenerate_model",
            Error::NotBandTouching(_) => "not_band_touching",
            Error::MonopoleSingularity => "monopole_singularity",
            Error::DegenerateGroundState(_) => "degenerate_ground_state",
            Error::NonConvergence { .. } => "non_convergence",
            Error::GapClosing => "gap_closing",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
