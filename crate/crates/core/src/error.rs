use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),

    #[error("unknown VM type `{0}`")]
    UnknownVmType(String),

    #[error("unknown PM type `{0}`")]
    UnknownPmType(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("mix has {got} entries but the catalog has {expected} VM types")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("PM type `{pm_type}` has more than {cap} feasible configurations")]
    CapExceeded { pm_type: String, cap: usize },

    #[error("no configuration set supplied for PM type `{0}`")]
    MissingConfigSet(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("MPS parse error at line {line}: {msg}")]
    MpsParse { line: usize, msg: String },

    #[error("model too large for the dense solver ({cells} tableau cells, limit {limit})")]
    ModelTooLarge { cells: usize, limit: usize },

    #[error("simplex failed: {0}")]
    Numerical(String),

    #[error("brute-force oracle refused instance: {0}")]
    OracleGuard(String),

    #[error("cannot decode solution: {0}")]
    Decode(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
