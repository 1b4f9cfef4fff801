use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree must be at least {min}, got {got}")]
    DegreeTooSmall { min: u32, got: u32 },

    #[error("map is not a gradient: DQ(x) is not symmetric as a polynomial identity")]
    NotAGradient,

    #[error("form is not harmonic: Laplacian does not vanish")]
    NotHarmonic,

    #[error("expected a cubic form on R^3, got degree {degree} in dimension {n}")]
    NotCubicR3 { n: usize, degree: u32 },

    #[error("no nondegenerate minimum: both shifted eigenvalues vanish at the minimizer")]
    MinimumDegenerate,

    #[error("not an eigenline: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotAnEigenline { residual: f64, tol: f64 },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("zero form")]
    ZeroForm,

    #[error("zero vector")]
    ZeroVector,

    #[error("leading form vanishes on the unit sphere (min sampled norm {min_norm:.3e})")]
    LeadingFormVanishes { min_norm: f64 },

    #[error("target is a critical value: a solution has near-singular Jacobian (|det| = {det:.3e})")]
    CriticalTarget { det: f64 },

    #[error("solver found {found} of {expected} expected lines after {restarts} restarts{}",
            if *.possibly_degenerate { "; map may be degenerate" } else { "" })]
    NonConvergence {
        found: usize,
        expected: usize,
        restarts: usize,
        possibly_degenerate: bool,
    },

    #[error("degenerate stationary point present; index sum is not defined")]
    DegenerateStationaryPoint,

    #[error("reconstructed eigenline residual {residual:.3e} too large")]
    ResidualTooLarge { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
