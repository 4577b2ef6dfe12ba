use thiserror::Error;

use crate::dist::Role;

pub type Result<T, E = PidError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PidError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("table with {cells} cells exceeds the limit of {limit}")]
    TooLarge { cells: usize, limit: usize },

    #[error("variable set must not be empty")]
    EmptyVariableSet,

    #[error("variable sets must be disjoint: {0}")]
    OverlappingVariables(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "solver did not converge for target {target} after {iterations} iterations \
         (best objective {best_objective_bits:.12} bits, gap estimate {gap_estimate_bits:.3e} bits)"
    )]
    NonConvergence {
        target: Role,
        iterations: usize,
        best_objective_bits: f64,
        gap_estimate_bits: f64,
    },

    #[error("iterate for target {target} violates the marginal constraints by {residual:.3e}")]
    Infeasible { target: Role, residual: f64 },

    #[error("solver failed for target {target}: {source}")]
    Solver {
        target: Role,
        #[source]
        source: Box<PidError>,
    },

    #[error("polytope has {dim} free coordinates; brute-force scan supports at most {max}")]
    DimensionGuard { dim: usize, max: usize },

    #[error("degenerate Gaussian system: {0}")]
    Degenerate(String),

    #[error("internal consistency violated: {0}")]
    Inconsistent(String),
}

impl PidError {
    /// True for errors raised by the numerical optimizer rather than by input validation.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            PidError::NonConvergence { .. }
                | PidError::Infeasible { .. }
                | PidError::Solver { .. }
                | PidError::Inconsistent(_)
        )
    }
}
