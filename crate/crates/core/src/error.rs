use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("missing required column: {0}")]
    MissingColumn(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("match {match_id}: column {column} has no values, cannot impute")]
    ImputationImpossible { match_id: String, column: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("label levels not strictly ordered: p_lose={p_lose} p_win={p_win}")]
    UnorderedLevels { p_lose: f64, p_win: f64 },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),
    #[error("training diverged at iteration {iteration} (non-finite loss)")]
    Diverged { iteration: usize },
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("ROC undefined: {0}")]
    UndefinedRoc(&'static str),

    #[error("index {index} out of range 1..={len}")]
    OutOfRange { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),
    #[error("conflicting judgment for pair ({0}, {1})")]
    ConflictingPair(usize, usize),
    #[error("no random index for matrix order {0}; supply one")]
    MissingRandomIndex(usize),

    #[error("similarity undefined for a zero vector")]
    ZeroVector,
    #[error("singular design matrix (rank {rank} < {cols})")]
    SingularDesign { rank: usize, cols: usize },

    #[error("unknown indicator: {0}")]
    UnknownIndicator(String),
    #[error("invalid sweep: {0}")]
    Spec(String),
}
