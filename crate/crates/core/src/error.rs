use thiserror::Error;

/// Errors produced by model construction, Liouvillian assembly, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Liouvillian null space is not one-dimensional, so "the" steady
    /// state is not well defined.
    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    /// The steady-state solve produced a solution that violates a residual,
    /// trace, Hermiticity, or positivity tolerance.
    #[error("steady-state solve failed: {0}")]
    Convergence(String),

    /// A quantity that must be real (or must keep a fixed sign) came out
    /// otherwise.
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    /// No chain length in the scanned range satisfies the crossover
    /// condition. Both conductance curves are attached for diagnosis.
    #[error("no crossover in n = {n_min}..={n_max}")]
    NoCrossover {
        n_min: usize,
        n_max: usize,
        n_grid: Vec<usize>,
        sigma_wc: Vec<f64>,
        sigma_nh: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
