use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("potential is unbounded below on the search window [{lo}, {hi}]")]
    UnboundedBelow { lo: f64, hi: f64 },

    #[error("potential does not confine the energy window {e_cap} within |x - x_min| <= {reach}")]
    Unconfined { e_cap: f64, reach: f64 },

    #[error("thermal truncation not converged: {retained} eigenpairs span only {span} above the ground state, need {needed}")]
    TruncationNotConverged { retained: usize, span: f64, needed: f64 },

    #[error("oracle needs {retained} eigenpairs on {n_points} nodes, over the budget of {budget} stored values")]
    OracleBudget {
        retained: usize,
        n_points: usize,
        budget: usize,
    },

    #[error("grid refinement did not converge after {doublings} doublings (last L1 change {last_delta:e})")]
    RefinementNotConverged { doublings: usize, last_delta: f64 },

    #[error("smearing mode AnalyticPolynomial requires a polynomial potential, got {0}")]
    ModeMismatch(&'static str),

    #[error("Gauss-Hermite smearing not stable at x = {x} after {nodes} nodes (change {change:e})")]
    QuadratureNotConverged { x: f64, nodes: usize, change: f64 },

    #[error("density cannot be normalized: {0}")]
    Normalization(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("sampler: {0}")]
    Sampler(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config key '{key}': {message}")]
    ConfigKey { key: String, message: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
