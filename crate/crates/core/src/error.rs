use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // expressions and relations
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown generator `{name}` at {pos}")]
    UnknownGenerator { name: String, pos: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid relation #{index}: {message}")]
    InvalidRelation { index: usize, message: String },
    #[error("rewrite budget of {budget} steps exceeded while resolving `{generator}`")]
    Nontermination { generator: String, budget: usize },
    #[error("inconsistent relations: {0}")]
    InconsistentRelation(String),
    #[error("no compactification registered for `{0}`")]
    MissingCompactification(String),
    #[error("dimension precondition violated: {0}")]
    DimensionPrecondition(String),

    // measures
    #[error("no value registered for generator `{generator}` under measure {measure}")]
    UnresolvedResidual { generator: String, measure: String },
    #[error("measure values of different kinds cannot be combined: {0}")]
    MeasureMismatch(String),
    #[error("measure `{0}` is not multiplicative")]
    NotMultiplicative(String),
    #[error("measure undefined: {0}")]
    MeasureUndefined(String),

    // fans
    #[error("ray {0:?} is not primitive")]
    NonPrimitiveRay(Vec<i64>),
    #[error("ray {ray:?} has length {got}, expected rank {rank}")]
    RankMismatch { ray: Vec<i64>, rank: usize, got: usize },
    #[error("cone {0:?} is not strongly convex")]
    NotStronglyConvex(Vec<usize>),
    #[error("cone {0:?} is not simplicial (only simplicial cones are supported)")]
    NonSimplicial(Vec<usize>),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("cone set is not face-closed")]
    NotFaceClosed,
    #[error("cone set is not locally closed")]
    NotLocallyClosed,
    #[error("cone set is not contained in the fan")]
    NotSubset,
    #[error("new ray {0:?} is already a ray of the fan")]
    RayOnBoundary(Vec<i64>),
    #[error("new ray {0:?} lies outside the support of the fan")]
    RayOutsideSupport(Vec<i64>),
    #[error("unsupported: {0}")]
    Unsupported(String),

    // spans and sites
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("no declared pullback for {0}")]
    MissingPullback(String),
    #[error("not an open subobject: {0}")]
    NotOpen(String),
    #[error("missing dimension data for `{0}`")]
    MissingDimension(String),
    #[error("ill-shaped arguments: {0}")]
    IllShapedArgs(String),

    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
