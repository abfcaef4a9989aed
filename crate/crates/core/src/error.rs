use thiserror::Error;

use crate::network::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("agent index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("update matrices need two distinct agents, got ({0}, {0})")]
    SameAgent(usize),
    #[error("self-weight epsilon = {0} is outside (0, 1/2]")]
    BadEpsilon(f64),
    #[error("meeting digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("matrix is not primitive (no positive power up to exponent {exponent})")]
    NotPrimitive { exponent: usize },
    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("singular linear system")]
    SingularSystem,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("I - DY is singular; the perturbed chain is not regular")]
    SingularIminusDY,
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("stationary distribution is not uniform (node volumes differ)")]
    NotUniform,
    #[error("n * chi^d = {value} exceeds 1; delta is undefined")]
    DegenerateDelta { value: f64 },
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("parse error{}: {field}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("network violates model assumptions: {0}")]
    Validation(ValidationReport),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("forceful edges {first:?} and {second:?} share an agent")]
    OverlappingForcefulEdges {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("edge {{{0}, {1}}} is not an essential edge of the social network graph")]
    NotEssential(usize, usize),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("exact cut enumeration limited to {limit} nodes, got {n}")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("restricted subgraph on {0:?} is disconnected")]
    SubgraphDisconnected(Vec<usize>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
