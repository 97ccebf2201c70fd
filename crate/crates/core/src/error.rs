use thiserror::Error;

/// Errors raised by the discretization, the solvers and the experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("region `{0}` contains no lattice nodes")]
    EmptyRegion(String),

    #[error("order s = {s} outside the admissible range (0, {max})")]
    OrderOutOfRange { s: f64, max: f64 },

    #[error("{nodes} nodes exceed the dense assembly cap of {cap}")]
    Capacity { nodes: usize, cap: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("zero is (numerically) a Dirichlet eigenvalue: singular value ratio {ratio:e} below {threshold:e}")]
    DirichletEigenvalue { ratio: f64, threshold: f64 },

    #[error("metric is not positive definite on the window ({0})")]
    NotPositiveDefinite(String),

    #[error("assumption {assumption} violated: {detail}")]
    Assumption { assumption: String, detail: String },

    #[error("index {0} is not an exterior node")]
    NotExterior(usize),

    #[error("forms were assembled from different kernel weights")]
    WeightsMismatch,

    #[error("not enough usable records for a fit: {0}")]
    InsufficientData(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
