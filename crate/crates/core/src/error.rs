use crate::formula::LanguageTag;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("{construct} is not allowed in {tag:?}")]
    Language { construct: String, tag: LanguageTag },
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("contradictory polarity for atom `{0}`")]
    Contradictory(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("isomorphism search bound {bound} exceeded by a model with {size} worlds")]
    Bound { bound: usize, size: usize },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
