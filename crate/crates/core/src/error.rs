use thiserror::Error;

/// Crate-wide error type. The CLI maps these onto exit codes: precondition,
/// validation, parse and reconstruction failures exit 2; cap overruns exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A documented precondition of an operation does not hold (degree bound,
    /// density, parity of a parameter, empty target class, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Structurally invalid input: edges outside the ambient graph, a state
    /// that is not in the claimed class, mismatched ambient graphs, ...
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Text input could not be parsed. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An enumeration or matrix build exceeded its configured cap.
    #[error("cap exceeded: {count} states seen, cap is {cap}")]
    CapExceeded { cap: usize, count: usize },

    /// Inverting a constructive map failed because the input is not in the
    /// map's image (e.g. a corrupted glue edge).
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    /// A constructive search found no candidate. For most operations this is
    /// reachable only outside the documented preconditions; deficit repair
    /// can also hit it at exactly half density, where the exhausted search is
    /// itself the certificate that no bounded repair exists.
    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
