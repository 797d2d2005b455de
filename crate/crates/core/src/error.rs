use thiserror::Error;

/// Failures surfaced by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max|O - O^dag| = {residual:.3e} (scale {scale:.3e})")]
    NotHermitian { residual: f64, scale: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("no convergence after {depth} refinements: achieved {achieved:.3e}, wanted {target:.3e}")]
    NonConvergence { depth: usize, achieved: f64, target: f64 },

    #[error("steady state is not unique: null space of dimension {}", basis.len())]
    DegenerateSteadyState { basis: Vec<Vec<f64>> },

    #[error("grid too narrow: boundary amplitude {leak:.3e} exceeds {limit:.1e}; widen the grid")]
    BoundaryLeak { leak: f64, limit: f64 },

    #[error("could not bracket target {target} over [{lo}, {hi}] (values {f_lo} .. {f_hi})")]
    Bracketing { target: f64, lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("quadrature did not reach tolerance: estimate {estimate:.3e}, wanted {target:.3e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("phase violation at tau = {tau}: {what}")]
    PhaseViolation { tau: f64, what: String },

    #[error("ground state is degenerate: gap {gap:.3e}; branch values {branches:?}")]
    DegenerateGround { gap: f64, branches: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
