use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("presentation is not left-resolving")]
    NotLeftResolving,
    #[error("symbol `{0}` already in alphabet")]
    SymbolPresent(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("empty presentation")]
    EmptyGraph,
    #[error("presentation is not irreducible")]
    Reducible,
    #[error("resource cap of {0} exceeded")]
    ResourceCap(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
