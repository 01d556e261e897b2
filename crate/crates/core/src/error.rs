use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SadicError {
    #[error("letter {letter} outside alphabet 1..={d}")]
    LetterOutOfRange { letter: usize, d: usize },

    #[error("substitution image of letter {0} is empty")]
    ErasingImage(usize),

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("operation requires alphabet size {expected}, got {got}")]
    UnsupportedDimension { expected: usize, got: usize },

    #[error("directive sequence has no term at index {0}")]
    SequenceExhausted(usize),

    #[error("limit word prefix of length {min_len} not reached within depth {depth}")]
    PrefixUnreachable { min_len: usize, depth: usize },

    #[error("projection undefined: <w,u> = {0} is too small")]
    DegenerateProjection(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("coordinate overflow in exact face arithmetic")]
    Overflow,

    #[error("face budget of {budget} exceeded (needed {needed})")]
    FaceBudget { budget: usize, needed: usize },

    #[error("sampling region too small: {0}")]
    RegionTooSmall(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, SadicError>;
