use thiserror::Error;

/// Errors produced anywhere in the tomography pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QstError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular value decomposition did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is rank deficient: numerical rank {rank} < {required} columns")]
    RankDeficient { rank: usize, required: usize },

    #[error("matrix is singular (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    Singular { sigma_min: f64, sigma_max: f64 },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {max_deviation:e} at ({row}, {col})")]
    NotHermitian {
        max_deviation: f64,
        row: usize,
        col: usize,
    },

    #[error("element {element} ({label}) has residual imaginary part {residual:e} in its rotation-matrix row")]
    ImaginaryResidual {
        element: usize,
        label: String,
        residual: f64,
    },

    #[error("unknown state name `{0}`")]
    UnknownState(String),

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("perturbation hypothesis violated: ||dA|| = {norm_delta_a:e} >= 1/||A^-1|| = {limit:e}")]
    PerturbationTooLarge { norm_delta_a: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, QstError>;

impl From<serde_json::Error> for QstError {
    fn from(err: serde_json::Error) -> Self {
        QstError::Serialization(err.to_string())
    }
}
