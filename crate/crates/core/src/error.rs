use crate::hypergraph::ElementId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("hyperedge `{0}` has no members")]
    EmptyHyperedge(String),

    #[error("unknown element {0}")]
    UnknownElement(ElementId),

    #[error("unknown vertex id `{0}`")]
    UnknownVertexId(String),

    #[error("elements {0} and {1} are of different kinds")]
    KindMismatch(ElementId, ElementId),

    #[error("adjacency is undefined between {0} and itself")]
    SameElement(ElementId),

    #[error("vertex {0} is not incident to any hyperedge")]
    IsolatedVertex(ElementId),

    #[error("hypergraph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("adjacency exponent must be non-negative, got {0}")]
    NegativeExponent(f64),

    #[error("elements {0} and {1} are not adjacent")]
    NotAdjacent(ElementId, ElementId),

    #[error("operation {0} is not legal on the current hypergraph")]
    IllegalOperation(String),

    #[error("record for scale {record} cannot be inverted at scale {current}")]
    OutOfOrderInversion { record: usize, current: usize },

    #[error("inverse of scale {0} does not match the current hypergraph")]
    CorruptRecord(usize),

    #[error("non-finite position for {0}")]
    NonFinite(String),

    #[error("polygon is not convex")]
    NonConvex,

    #[error("cycle search around {0} exceeded {1} steps")]
    Indeterminate(ElementId, u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Format(String),

    #[error("scale {scale}: {source}")]
    AtScale {
        scale: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn at_scale(self, scale: usize) -> Error {
        match self {
            e @ Error::AtScale { .. } => e,
            e => Error::AtScale {
                scale,
                source: Box::new(e),
            },
        }
    }
}
