use thiserror::Error;

use crate::digraph::VertexId;
use crate::freeness::ForbiddenWitness;

/// Errors raised while building or reading a digraph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a digraph of order {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("duplicate arc {0}->{1}")]
    DuplicateArc(VertexId, VertexId),
    #[error("arc {0}->{1} is not present")]
    MissingArc(VertexId, VertexId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("enumeration bound exceeded: n = {n} > {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("cannot place {arcs} arcs on {n} vertices")]
    InfeasibleArcCount { n: usize, arcs: usize },
    #[error("unsupported field order {0}")]
    UnsupportedField(usize),
}

/// Errors raised while validating or decomposing an antidirected tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one arc")]
    Empty,
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("directed path {0}->{1}->{2}")]
    NotAntidirected(VertexId, VertexId, VertexId),
    #[error("not a caterpillar: vertex {0} is at distance at least 2 from the spine")]
    NotACaterpillar(VertexId),
    #[error("vertex {0} is not in the tree")]
    VertexNotInTree(VertexId),
    #[error("u and v must differ")]
    SameVertex,
    #[error("k = {k} exceeds the enumeration bound {limit}")]
    TooLarge { k: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Why an embedding request was refused without running the embedder.
#[derive(Debug, Clone, PartialEq, Eq, Error, serde::Serialize)]
pub enum Refusal {
    #[error("density: a(D) = {arcs} but more than {needed} arcs are required")]
    Density { arcs: usize, needed: usize },
    #[error("host contains an orientation of K(2,{s}): {witness:?}")]
    NotFree { s: usize, witness: ForbiddenWitness },
    #[error("sign balance fails: |D+| = {d_plus}, |D-| = {d_minus}, |T+| = {t_plus}, |T-| = {t_minus}")]
    SignBalance { d_plus: usize, d_minus: usize, t_plus: usize, t_minus: usize },
    #[error("precondition: {0}")]
    Precondition(String),
}

/// A proof-guaranteed step found nothing to work with.
#[derive(Debug, Clone, PartialEq, Eq, Error, serde::Serialize)]
#[error("assertion `{tag}` failed: {detail}")]
pub struct AssertionFailure {
    pub tag: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(Refusal),
    #[error(transparent)]
    InternalAssertion(AssertionFailure),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl EmbedError {
    pub(crate) fn assertion(tag: &str, detail: impl Into<String>) -> Self {
        EmbedError::InternalAssertion(AssertionFailure { tag: tag.to_string(), detail: detail.into() })
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        EmbedError::HypothesisViolated(Refusal::Precondition(msg.into()))
    }
}
