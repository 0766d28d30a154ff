use thiserror::Error;

/// Failure to interpret a textual label or JSON document.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown generator `{name}` in {field}")]
    UnknownGenerator { field: String, name: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("word `{0}` is not alternating")]
    NotAlternating(String),
    #[error("invalid knot complex: {0}")]
    InvalidComplex(String),
    #[error("simplification failed: {0}")]
    Simplify(String),
    #[error("invalid normal form: {0}")]
    InvalidNormalForm(String),
    #[error("invalid type D structure: {0}")]
    InvalidTypeD(String),
    #[error("extremal subspaces need a nontrivial knot (genus 0 given)")]
    TrivialKnot,
    #[error(
        "relative boundedness not witnessed: a label sequence of length {budget} starting at ({a_generator}, {d_generator}) is still nonvanishing"
    )]
    RelativeBoundedness {
        budget: usize,
        a_generator: String,
        d_generator: String,
    },
    #[error("box complex boundary does not square to zero")]
    BoundaryNotSquareZero,
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
