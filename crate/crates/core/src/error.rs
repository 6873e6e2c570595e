use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate edge ({u}, {v}){}", at_line(*line))]
    DuplicateEdge { u: String, v: String, line: Option<usize> },

    #[error("self-loop on node {node}{}", at_line(*line))]
    SelfLoop { node: String, line: Option<usize> },

    #[error("invalid edge weight {weight}{}: weights must lie in [-1, 1] and be non-zero", at_line(*line))]
    InvalidWeight { weight: String, line: Option<usize> },

    #[error("node id {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("colouring has {got} entries but the graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{0}")]
    InvalidSpec(String),

    #[error("measure {measure} refused: {reason}")]
    Refused { measure: &'static str, reason: String },

    #[error("eigensolver did not converge for the {matrix} after {sweeps} sweeps")]
    NoConvergence { matrix: &'static str, sweeps: usize },

    #[error("{0}")]
    Unsupported(String),
}

fn at_line(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}
