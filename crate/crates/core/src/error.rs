use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("negative exponent at byte {offset}")]
    NegativeExponent { offset: usize },

    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),

    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),

    #[error("variable order is missing variable `{0}`")]
    OrderMissingVariable(String),

    #[error("variable `{0}` appears more than once in the order")]
    DuplicateVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("{found} variables exceed the exhaustive search limit of {max}")]
    TooManyVariables { found: usize, max: usize },

    #[error("polynomial grew to {terms} terms, above the cap of {cap}")]
    ResourceLimit { terms: usize, cap: usize },

    #[error("three-address code line {line}: {message}")]
    Tac { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
