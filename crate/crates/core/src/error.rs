use thiserror::Error;

/// Errors raised while building instances or calling a solver outside its
/// preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root node {0} appears as a child in an edge record")]
    RootHasParent(u64),
    #[error("duplicate edge: node {0} has more than one parent record")]
    DuplicateEdge(u64),
    #[error("edge ({parent}, {child}) references undeclared node {parent}")]
    UnknownNode { parent: u64, child: u64 },
    #[error("cycle detected through node {0}")]
    Cycle(u64),
    #[error("node {0} is not connected to the root")]
    Disconnected(u64),
    #[error("tree has no edges; at least one root-leaf edge is required")]
    Empty,
    #[error("edge into node {child}: field `{field}` = {value} is not a finite number")]
    NonFinite { child: u64, field: &'static str, value: f64 },
    #[error("edge into node {child}: w > u ({w} > {u})")]
    WeightAboveBound { child: u64, w: f64, u: f64 },
    #[error("edge into node {child}: w = {w} is negative")]
    NegativeWeight { child: u64, w: f64 },
    #[error("edge into node {child}: c = {c} must be positive")]
    NonPositiveCost { child: u64, c: f64 },
    #[error("edge into node {child}: r = {r} must be a positive integer")]
    InvalidHamming { child: u64, r: f64 },
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("node {0} is not a leaf")]
    NotALeaf(usize),
    #[error("lambda = {0} is outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance has {n} edges, above the enumeration cap of {cap}")]
    OracleCap { n: usize, cap: usize },
    #[error("invalid generator range: {0}")]
    InvalidRange(String),
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
