use thiserror::Error;

use crate::tree::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input could not be parsed into the expected shape.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("unknown point label `{0}`")]
    UnknownLabel(String),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("not an ultrametric space of diameter <= 1: {0}")]
    InvalidSpace(String),

    #[error("empty ultrametric space")]
    EmptySpace,

    #[error("invalid tree presentation: {0}")]
    InvalidTree(String),

    /// The tree has no RAY leaf: its end space is empty.
    #[error("trivial tree: no ray survives, end space is empty")]
    TrivialTree,

    #[error("tree is not geodesically complete (TIP leaf {0})")]
    NotGeodesicallyComplete(NodeId),

    #[error("invalid tree point: {0}")]
    InvalidPoint(String),

    #[error("level out of range: {0}")]
    LevelOutOfRange(String),

    #[error("points must be pairwise distinct")]
    RepeatedPoints,

    #[error("map is not well defined: leaves {0} and {1} disagree on a shared point")]
    IllDefined(NodeId, NodeId),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("map is not metrically proper: {0}")]
    NotProper(String),

    #[error("maps do not share source and target")]
    Mismatch,

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("invalid simplicial tree: {0}")]
    InvalidSimplicial(String),
}

impl Error {
    /// True for errors caused by unreadable or structurally malformed input,
    /// as opposed to well-formed objects that fail a check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Malformed(_) | Error::Json(_) | Error::Io(_) | Error::InvalidSimplicial(_)
        )
    }
}
