use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("edge `{0}` has a non-positive or non-finite length")]
    NonPositiveLength(String),

    #[error("graph is disconnected: vertex `{0}` is unreachable from the first vertex")]
    Disconnected(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("walk is not closed in the graph: {0}")]
    NotAClosedWalk(String),

    #[error("not a tree of loops specification: {0}")]
    SpecNotTreeOfLoops(String),

    #[error("negative value {0} in a y-axis diagram")]
    NegativeValue(f64),

    #[error("empty set of diagrams")]
    EmptySet,

    #[error("size mismatch: ideal diagram has {expected} points, computed diagram has {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("graph is not a bouquet")]
    NotABouquet,

    #[error("graph is not a tree of loops")]
    NotTreeOfLoops,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
