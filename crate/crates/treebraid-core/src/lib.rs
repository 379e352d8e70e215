//! Discrete configuration spaces of `n` unordered (or ordered) points on a
//! tree, and the integral cohomology ring of the resulting braid group.
//!
//! The pipeline implemented here:
//!
//! 1. [`tree`] — rooted plane trees with a depth-first vertex order, minimal
//!    subdivision, and the decomposition of a tree into components and pruned
//!    subtrees determined by a set of essential (degree ≥ 3) vertices.
//! 2. [`cube`] — the cubical model of the configuration space: cells are
//!    collections of vertices and edges with pairwise disjoint closures,
//!    together with boundary operators, the simplicial-style cup product of
//!    cochains, and the transfer from unordered to ordered cells.
//! 3. [`snf`] — Smith normal form over arbitrary-precision integers, used to
//!    read off integral (co)homology ranks and torsion from boundary
//!    matrices.
//! 4. [`morse`] — a discrete gradient field on the cubical model, its
//!    critical cells in closed form, and the chain-homotopy maps that move
//!    cochains between the full complex and the critical complex.
//! 5. [`interaction`] — the interaction complex: a simplicial complex on the
//!    degree-one generators recording which products of generators survive.
//! 6. [`ring`] — the cup-product structure on the critical basis: closed
//!    formulas for products, a change of basis, and certificates that the
//!    ring is an exterior face ring (and, for linear trees, the cohomology
//!    ring of a right-angled Artin group).
//!
//! The crate is `no_std` (with `alloc`); everything that touches the file
//! system, clocks, or command lines lives in the companion binary crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cube;
pub mod error;
pub mod interaction;
pub mod morse;
pub mod ring;
pub mod snf;
pub mod tree;

pub use error::{Error, Result};

/// Vertex identifiers are indices into the depth-first order of the tree.
pub type VertexId = u32;

/// Coefficients of cochains and ring elements.
///
/// All arithmetic on these goes through checked operations; the library
/// panics on overflow rather than wrapping silently. Smith normal form uses
/// arbitrary precision instead and cannot overflow.
pub type Coeff = i64;
