//! Annotation validation, corpus statistics, agreement coefficients,
//! classification scores, preference summaries and the OLS fit.

pub mod agreement;
pub mod annotation;
pub mod f1;
pub mod preference;
pub mod regression;

pub use agreement::{cohen_kappa, fleiss_kappa, AgreementKind, AgreementReport};
pub use annotation::{corpus_stats, validate_annotation, AnnotatedDescription, AnnotationRecord, CorpusStats, ValidationOptions, Violation};
pub use f1::{f1_binary, EvalReport};
pub use preference::{
    bootstrap_ci, preference_agreement, preference_summary, ConceptAgreement, Interval, PreferenceBallot, PreferenceSummary,
    SetVariant, Vote, VoteEncoding,
};
pub use regression::{ols_slope, RegressionFit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("row {row} has {found} ratings, expected {expected}")]
    RaggedRaters { row: usize, expected: usize, found: usize },
    #[error("row {row} has {found} categories, expected {expected}")]
    RaggedCategories { row: usize, expected: usize, found: usize },
    #[error("each item needs at least two raters")]
    TooFewRaters,
    #[error("x is constant; slope undefined")]
    ConstantX,
    #[error("at least two points are required")]
    TooFewPoints,
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
}
