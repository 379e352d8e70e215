//! Error type shared by the whole crate.

use crate::VertexId;
use alloc::string::String;
use core::fmt;

/// Everything that can go wrong when building trees, enumerating cells, or
/// evaluating products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The designated root does not have degree one.
    RootDegree { degree: usize },
    /// The adjacency input does not reach every declared vertex.
    Disconnected { unreached: usize },
    /// A vertex occurs as a child more than once, so the input closes a
    /// cycle (or merges two branches).
    Cyclic { vertex: usize },
    /// A child index refers to a vertex that does not exist.
    UnknownVertex { vertex: usize },
    /// Direction `direction` does not exist at `vertex` (directions run from
    /// 0, toward the root, through degree − 1; the root only has direction 1).
    NoSuchDirection { vertex: VertexId, direction: usize },
    /// The number of points must be positive.
    ZeroPoints,
    /// The tree is not sufficiently subdivided to carry `n` points: some
    /// path between vertices of degree ≠ 2 has fewer than `n − 1` edges.
    NotSufficient { n: usize },
    /// A vertex expected to be essential (degree ≥ 3) is not.
    NotEssential { vertex: VertexId },
    /// A direction split `r` is outside the allowed range at `vertex`.
    SplitOutOfRange { vertex: VertexId, r: usize },
    /// A cell enumeration or oracle would exceed the configured budget.
    BudgetExceeded { budget: u64, estimate: u64 },
    /// The data of a critical cell does not fit into the tree: a required
    /// stack vertex is missing or the assembled ingredients collide.
    CellDoesNotFit { detail: String },
    /// A family of interaction generators repeats an essential vertex where
    /// distinct vertices are required.
    RepeatedEssential { vertex: VertexId },
    /// Interaction generators must be listed by strictly increasing
    /// essential vertex.
    UnsortedFactors,
    /// A generator's data is inconsistent with the tree or the number of
    /// points (wrong tuple lengths, no positive front entry, bad total).
    InvalidGenerator { detail: String },
    /// A product formula was applied to factors of the wrong class.
    WrongInteractionClass { expected: &'static str },
    /// A cell cannot be factored into degree-one generators.
    NotBasisCell { detail: String },
    /// Some essential vertex has more than two branches that carry further
    /// essential vertices, so the tree has no binary core embedding.
    NotBinaryCore { vertex: VertexId },
    /// The operation needs the essential-branches-last embedding produced by
    /// `reembed_binary_core`.
    NotEmbeddedBinaryCore { vertex: VertexId },
    /// The operation needs a linear binary tree (all essential vertices of
    /// degree 3 on one arc, pendant branch listed first); `vertex` breaks it.
    NotLinearBinary { vertex: VertexId },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RootDegree { degree } => {
                write!(f, "root must have degree 1, found degree {degree}")
            }
            Error::Disconnected { unreached } => {
                write!(f, "input does not form a tree: {unreached} vertices unreachable from the root")
            }
            Error::Cyclic { vertex } => {
                write!(f, "input does not form a tree: vertex {vertex} has two parents")
            }
            Error::UnknownVertex { vertex } => write!(f, "unknown vertex {vertex}"),
            Error::NoSuchDirection { vertex, direction } => {
                write!(f, "vertex {vertex} has no direction {direction}")
            }
            Error::ZeroPoints => write!(f, "the number of points must be at least 1"),
            Error::NotSufficient { n } => write!(
                f,
                "tree is not sufficiently subdivided for {n} points; subdivide so that every path between vertices of degree != 2 has at least {} edges",
                n.saturating_sub(1)
            ),
            Error::NotEssential { vertex } => {
                write!(f, "vertex {vertex} is not essential (degree < 3)")
            }
            Error::SplitOutOfRange { vertex, r } => {
                write!(f, "direction split {r} is out of range at vertex {vertex}")
            }
            Error::BudgetExceeded { budget, estimate } => {
                write!(f, "cell budget {budget} exceeded (about {estimate} cells needed)")
            }
            Error::CellDoesNotFit { detail } => {
                write!(f, "cell data does not fit into the tree: {detail}")
            }
            Error::RepeatedEssential { vertex } => {
                write!(f, "essential vertex {vertex} occurs in more than one factor")
            }
            Error::UnsortedFactors => {
                write!(f, "factors must be listed by strictly increasing essential vertex")
            }
            Error::InvalidGenerator { detail } => write!(f, "invalid generator: {detail}"),
            Error::WrongInteractionClass { expected } => {
                write!(f, "factors do not {expected}")
            }
            Error::NotBasisCell { detail } => {
                write!(f, "cell is not a product basis element: {detail}")
            }
            Error::NotBinaryCore { vertex } => write!(
                f,
                "vertex {vertex} has more than two branches carrying essential vertices"
            ),
            Error::NotEmbeddedBinaryCore { vertex } => write!(
                f,
                "branches carrying essential vertices are not listed last at vertex {vertex}; re-embed first"
            ),
            Error::NotLinearBinary { vertex } => write!(
                f,
                "tree is not a linear binary tree with pendant branches first: see vertex {vertex}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
