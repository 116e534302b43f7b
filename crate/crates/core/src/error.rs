use thiserror::Error;

use crate::graph::{Cost, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("removing edge ({u}, {v}) disconnects the terminals")]
    DisconnectedAfterExclusion { u: VertexId, v: VertexId },

    #[error("{terminals} terminals exceed the exact solver cap of {cap}")]
    TerminalCapExceeded { terminals: usize, cap: usize },

    #[error("forest has {trees} trees, above the connect cap of {cap}")]
    TreeCapExceeded { trees: usize, cap: usize },

    #[error(
        "removing components {candidate:?} leaves {trees} trees, above the connect cap of {cap}"
    )]
    CandidateCapExceeded {
        candidate: Vec<usize>,
        trees: usize,
        cap: usize,
    },

    #[error("oracle limited to n <= {max_vertices} and |R| <= {max_terminals}, got n = {vertices}, |R| = {terminals}")]
    OracleCapExceeded {
        vertices: usize,
        terminals: usize,
        max_vertices: usize,
        max_terminals: usize,
    },

    #[error("restricted forest costs {restricted}, above (1 + {xi}) * {original}")]
    CostBoundViolated {
        restricted: Cost,
        original: Cost,
        xi: String,
    },

    #[error("restriction postcondition failed: {0}")]
    RestrictionInvariant(String),

    #[error("vertex {0} is not part of the solution tree")]
    VertexNotInSolution(VertexId),

    #[error("this modification needs an optimal input solution (rho = 1), got rho = {0}")]
    RhoNotOne(String),

    #[error("epsilon must be positive, got {0}")]
    EpsilonOutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 1 for bad input, 2 for exceeded caps,
    /// 3 for broken internal assertions.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TerminalCapExceeded { .. }
            | Error::TreeCapExceeded { .. }
            | Error::CandidateCapExceeded { .. }
            | Error::OracleCapExceeded { .. } => 2,
            Error::CostBoundViolated { .. }
            | Error::RestrictionInvariant(_)
            | Error::Internal(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
