use thiserror::Error;

#[derive(Debug, Error)]
pub enum CqeError {
    #[error("FCIDUMP parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("sector dimension {dim} exceeds the dense diagonalization cap {cap}; restrict the (N_alpha, N_beta) sector")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("exponential series did not converge within {terms} terms; reduce the step scale")]
    SeriesDiverged { terms: usize },

    #[error("scan manifest {path}: {message}")]
    Manifest { path: String, message: String },

    #[error("invalid occupation: {0}")]
    InvalidOccupation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line search stagnated: no decrease of the variance found for any step >= {min_step:e}")]
    Stagnation { min_step: f64 },
}

pub type Result<T> = std::result::Result<T, CqeError>;
