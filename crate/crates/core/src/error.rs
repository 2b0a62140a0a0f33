use alloc::string::String;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("column lengths differ: `{column}` has {found} cells, table has {expected} rows")]
    ColumnLength {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` not found")]
    UnknownColumn(String),
    #[error("target not binary: `{column}` has {levels} distinct values")]
    TargetNotBinary { column: String, levels: usize },
    #[error("target `{0}` has missing values")]
    TargetHasMissing(String),
    #[error("class `{label}` has only {count} rows")]
    ClassTooSmall { label: String, count: usize },
    #[error("both classes must be present")]
    SingleClass,
    #[error("no positive labels")]
    NoPositives,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no features selected")]
    NoFeaturesSelected,
    #[error("column `{0}` is not numeric")]
    NotNumeric(String),
    #[error("column `{0}` has missing values")]
    HasMissing(String),
    #[error("feature `{0}` is not used by the model")]
    UnknownFeature(String),
    #[error("expected {expected} features, got {found}")]
    FeatureCount { expected: usize, found: usize },
    #[error("invalid hyperparameter `{name}`: {reason}")]
    InvalidHyperparameter { name: String, reason: String },
    #[error("model fit failed: {0}")]
    Fit(String),
    #[error("no model trained")]
    NoModelTrained,
    #[error("empty input")]
    Empty,
}
