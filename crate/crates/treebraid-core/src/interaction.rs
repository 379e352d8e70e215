//! The interaction complex: which degree-one classes multiply to a basis
//! element, which multiply to zero, and which sit in between.
//!
//! A generator ⟨k | x,p,q⟩ distributes the other `n − 1` points around the
//! essential vertex `x`: `k` of them on the root side, `p_ℓ` in child
//! direction `ℓ` up to the split, `q_ℓ` beyond it.  A family of generators
//! at distinct essential vertices spans a simplex of the interaction
//! complex when, for every component `C` of the tree minus those vertices,
//! the points the generators commit to `C` number at least `n` per "extra"
//! bounding vertex of `C` — with strict surplus somewhere at or below each
//! generator's split.
//!
//! The same bookkeeping in closed form: summing `k_j − n` over the pruned
//! leaves attached to each direction turns the face inequalities into the
//! sign pattern of the *interaction parameters* (`R0`, `P`, `Q`).  All
//! parameters non-negative with every `P`-row positive somewhere means the
//! product of the generators is a basis element (strong interaction); all
//! non-negative with some `P`-row identically zero leaves a correction term
//! (weak); a negative parameter kills the product (no interaction).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::morse::{CellBlock, CriticalCell};
use crate::tree::{components_for, ComponentDecomposition, RootedPlaneTree};
use crate::{Error, Result, VertexId};

/// A degree-one basis class ⟨k | x,p,q⟩: `k` points on the root side of the
/// essential vertex `x`, `p = (p_1..p_r)` points in the child directions up
/// to the split, `q = (q_1..q_s)` beyond it, with `r + s = d(x) − 1`,
/// `r, s ≥ 1`, some `p` entry positive, and `k + |p| + |q| = n − 1`.
///
/// The split `r` is part of the data: two tuples with the same counts but
/// different splits are different classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InteractionVertex {
    pub k: u32,
    pub x: VertexId,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl InteractionVertex {
    /// Direction count at or below the split.
    pub fn split(&self) -> usize {
        self.p.len()
    }

    /// Check the defining constraints against a model on `n` points.
    pub fn validate(&self, tree: &RootedPlaneTree, n: usize) -> Result<()> {
        if !tree.is_essential(self.x) {
            return Err(Error::NotEssential { vertex: self.x });
        }
        let directions = tree.degree(self.x) - 1;
        if self.p.is_empty() || self.q.is_empty() || self.p.len() + self.q.len() != directions {
            return Err(Error::InvalidGenerator {
                detail: format!(
                    "vertex {} has {} child directions, but the tuples cover {} + {}",
                    self.x,
                    directions,
                    self.p.len(),
                    self.q.len()
                ),
            });
        }
        if self.p.iter().all(|&t| t == 0) {
            return Err(Error::InvalidGenerator {
                detail: format!(
                    "some entry at or below the split of {} must be positive",
                    self.x
                ),
            });
        }
        let total = self.k as usize
            + self.p.iter().map(|&t| t as usize).sum::<usize>()
            + self.q.iter().map(|&t| t as usize).sum::<usize>();
        if total + 1 != n {
            return Err(Error::InvalidGenerator {
                detail: format!(
                    "local informations of {self} sum to {total}, expected {} for {n} points",
                    n.saturating_sub(1)
                ),
            });
        }
        Ok(())
    }

    /// The one-dimensional critical cell carrying the same data.
    pub fn to_cell(&self) -> CriticalCell {
        CriticalCell {
            k: self.k,
            blocks: vec![CellBlock {
                x: self.x,
                p: self.p.clone(),
                q: self.q.clone(),
            }],
        }
    }

    /// Read a one-dimensional critical cell back as a generator.
    pub fn from_cell(cell: &CriticalCell) -> Option<Self> {
        match cell.blocks.as_slice() {
            [b] => Some(InteractionVertex {
                k: cell.k,
                x: b.x,
                p: b.p.clone(),
                q: b.q.clone(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for InteractionVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | {},(", self.k, self.x)?;
        for (i, t) in self.p.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "),(")?;
        for (i, t) in self.q.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")>")
    }
}

/// All generators on `n` points, sorted.
pub fn enumerate_vnt(tree: &RootedPlaneTree, n: usize) -> Vec<InteractionVertex> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let budget = (n - 1) as u32;
    for x in tree.essential_vertices() {
        let directions = tree.degree(x) - 1;
        for r in 1..directions {
            let s = directions - r;
            for p_total in 1..=budget {
                for p in compositions(p_total, r) {
                    for q_total in 0..=(budget - p_total) {
                        let k = budget - p_total - q_total;
                        for q in compositions(q_total, s) {
                            out.push(InteractionVertex {
                                k,
                                x,
                                p: p.clone(),
                                q,
                            });
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// All ways to write `total` as an ordered sum of `parts` non-negative
/// integers.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            acc.push(total);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for v in 0..=total {
            acc.push(v);
            rec(total - v, parts - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut acc = Vec::with_capacity(parts);
    rec(total, parts, &mut acc, &mut out);
    out
}

/// The `C`-local information of `factors[j]`, where `C` is the component of
/// the complement addressed by `(i, l)`: the root component for `i == 0`
/// (with `l == 1`), otherwise the component in direction `l` of the `i`-th
/// factor's essential vertex (both 1-based).
///
/// Own directions report the factor's `p`/`q` entry; a foreign component
/// reports `k` when the factor's vertex bounds it, and `0` otherwise.
pub fn local_information(
    factors: &[InteractionVertex],
    comps: &ComponentDecomposition,
    j: usize,
    i: usize,
    l: usize,
) -> u32 {
    let nu = &factors[j];
    if i == 0 {
        debug_assert_eq!(l, 1, "the root side has a single component");
        return if comps.root_component.bounding.contains(&nu.x) {
            nu.k
        } else {
            0
        };
    }
    if j == i - 1 {
        let r = nu.p.len();
        return if l <= r { nu.p[l - 1] } else { nu.q[l - 1 - r] };
    }
    if comps.branch(i - 1, l).bounding.contains(&nu.x) {
        nu.k
    } else {
        0
    }
}

/// Evaluates the face inequalities for a family with strictly ascending
/// essential vertices: returns whether every component's inequality holds,
/// and whether every factor gets a strict inequality at or below its split.
fn face_inequalities(
    n: usize,
    factors: &[InteractionVertex],
    comps: &ComponentDecomposition,
) -> (bool, bool) {
    let m = factors.len();
    let check = |i: usize, l: usize, extra_bounding: usize| -> (bool, bool) {
        let total: u64 = (0..m)
            .map(|j| u64::from(local_information(factors, comps, j, i, l)))
            .sum();
        let required = (n as u64) * (extra_bounding as u64);
        (total >= required, total > required)
    };
    let mut all_hold = true;
    let mut every_factor_strict = true;
    let root_extra = comps.root_component.bounding.len().saturating_sub(1);
    all_hold &= check(0, 1, root_extra).0;
    for (i0, f) in factors.iter().enumerate() {
        let mut strict_here = false;
        let directions = f.p.len() + f.q.len();
        for l in 1..=directions {
            let extra = comps.branch_leaves(i0, l).len();
            let (holds, strict) = check(i0 + 1, l, extra);
            all_hold &= holds;
            if l <= f.p.len() && strict {
                strict_here = true;
            }
        }
        every_factor_strict &= strict_here;
    }
    (all_hold, every_factor_strict)
}

/// Checks that the factors are sorted by strictly ascending essential
/// vertex; `Ok(false)` flags a repeat (handled by the caller), errors flag
/// disorder.
fn check_ascending(factors: &[InteractionVertex]) -> Result<bool> {
    for w in factors.windows(2) {
        if w[0].x > w[1].x {
            return Err(Error::UnsortedFactors);
        }
        if w[0].x == w[1].x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Is the family a simplex of the interaction complex?
///
/// The empty family is a face; families repeating an essential vertex never
/// are.  Implemented directly from the component inequalities, independent
/// of [`interaction_params`], so the two can cross-check each other.
pub fn is_face(tree: &RootedPlaneTree, n: usize, factors: &[InteractionVertex]) -> Result<bool> {
    if factors.is_empty() {
        return Ok(true);
    }
    for f in factors {
        f.validate(tree, n)?;
    }
    if !check_ascending(factors)? {
        return Ok(false);
    }
    let xs: Vec<VertexId> = factors.iter().map(|f| f.x).collect();
    let comps = components_for(tree, &xs)?;
    let (all_hold, strict) = face_inequalities(n, factors, &comps);
    Ok(all_hold && strict)
}

/// The interaction parameters of a family: the face inequalities rewritten
/// as the signed surpluses `R0`, `P[i][ℓ-1]`, `Q[i][ℓ-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionParams {
    pub r0: i64,
    pub p: Vec<Vec<i64>>,
    pub q: Vec<Vec<i64>>,
}

impl InteractionParams {
    /// `R0 + ΣP + ΣQ`; equals `n − m` for any valid family of `m` factors.
    pub fn total(&self) -> i64 {
        self.r0
            + self
                .p
                .iter()
                .chain(self.q.iter())
                .flat_map(|row| row.iter())
                .sum::<i64>()
    }

    /// All parameters non-negative (weak or strong interaction).
    pub fn nonnegative(&self) -> bool {
        self.r0 >= 0
            && self
                .p
                .iter()
                .chain(self.q.iter())
                .all(|row| row.iter().all(|&v| v >= 0))
    }

    /// Non-negative and every factor keeps a positive entry at or below its
    /// split.
    pub fn classify(&self) -> Interaction {
        if !self.nonnegative() {
            return Interaction::None;
        }
        if self.p.iter().all(|row| row.iter().any(|&v| v > 0)) {
            Interaction::Strong
        } else {
            Interaction::Weak
        }
    }

    /// The basis cell a strongly interacting family multiplies to.
    pub fn to_cell(&self, xs: &[VertexId]) -> CriticalCell {
        debug_assert_eq!(self.classify(), Interaction::Strong);
        CriticalCell {
            k: self.r0 as u32,
            blocks: xs
                .iter()
                .zip(self.p.iter().zip(self.q.iter()))
                .map(|(&x, (p, q))| CellBlock {
                    x,
                    p: p.iter().map(|&v| v as u32).collect(),
                    q: q.iter().map(|&v| v as u32).collect(),
                })
                .collect(),
        }
    }
}

/// How a family of generators multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    /// The product is a single basis element.
    Strong,
    /// The product is not a basis element but need not vanish; it expands
    /// through the correction sums.
    Weak,
    /// The product is zero.
    None,
}

/// Interaction parameters of a family with strictly ascending essential
/// vertices: `R0 = n + Σ(k_j − n)` over the vertices bounding the root
/// component, and each `p`/`q` entry shifted by `Σ(k_j − n)` over the other
/// vertices bounding that direction's component.
pub fn interaction_params(
    tree: &RootedPlaneTree,
    n: usize,
    factors: &[InteractionVertex],
) -> Result<InteractionParams> {
    for f in factors {
        f.validate(tree, n)?;
    }
    if !check_ascending(factors)? {
        let repeat = factors
            .windows(2)
            .find(|w| w[0].x == w[1].x)
            .map(|w| w[0].x)
            .expect("a non-ascending sorted family repeats a vertex");
        return Err(Error::RepeatedEssential { vertex: repeat });
    }
    let xs: Vec<VertexId> = factors.iter().map(|f| f.x).collect();
    let comps = components_for(tree, &xs)?;
    let k_shift = |v: VertexId| -> i64 {
        let idx = xs.binary_search(&v).expect("bounding vertices are factors");
        factors[idx].k as i64 - n as i64
    };
    let r0 = n as i64
        + comps
            .root_component
            .bounding
            .iter()
            .map(|&v| k_shift(v))
            .sum::<i64>();
    let mut p = Vec::with_capacity(factors.len());
    let mut q = Vec::with_capacity(factors.len());
    for (i0, f) in factors.iter().enumerate() {
        let r = f.p.len();
        let mut prow = Vec::with_capacity(r);
        let mut qrow = Vec::with_capacity(f.q.len());
        for l in 1..=(r + f.q.len()) {
            let base = if l <= r {
                f.p[l - 1] as i64
            } else {
                f.q[l - 1 - r] as i64
            };
            let shift: i64 = comps.branch_leaves(i0, l).iter().map(|&v| k_shift(v)).sum();
            if l <= r {
                prow.push(base + shift);
            } else {
                qrow.push(base + shift);
            }
        }
        p.push(prow);
        q.push(qrow);
    }
    Ok(InteractionParams { r0, p, q })
}

/// The strong/weak/none trichotomy.  Families repeating an essential vertex
/// are hard-coded to [`Interaction::None`]: their products vanish.
pub fn classify_interaction(
    tree: &RootedPlaneTree,
    n: usize,
    factors: &[InteractionVertex],
) -> Result<Interaction> {
    for f in factors {
        f.validate(tree, n)?;
    }
    if !check_ascending(factors)? {
        return Ok(Interaction::None);
    }
    Ok(interaction_params(tree, n, factors)?.classify())
}

/// Faces of the interaction complex by dimension (`faces[d]` lists the
/// `(d+1)`-element simplices), up to `up_to_dim`.  Builds each dimension by
/// extending the previous one with vertices at strictly larger essential
/// vertices, so supersets of non-faces are never visited.
pub fn knt_faces(
    tree: &RootedPlaneTree,
    n: usize,
    up_to_dim: usize,
) -> Result<Vec<Vec<Vec<InteractionVertex>>>> {
    let vnt = enumerate_vnt(tree, n);
    let mut layers: Vec<Vec<Vec<InteractionVertex>>> = Vec::new();
    let mut comp_cache: BTreeMap<Vec<VertexId>, ComponentDecomposition> = BTreeMap::new();
    let mut current: Vec<Vec<usize>> = (0..vnt.len()).map(|i| vec![i]).collect();
    while layers.len() <= up_to_dim && !current.is_empty() {
        layers.push(
            current
                .iter()
                .map(|face| face.iter().map(|&i| vnt[i].clone()).collect())
                .collect(),
        );
        if layers.len() > up_to_dim {
            break;
        }
        let mut next = Vec::new();
        for face in &current {
            let max_x = vnt[*face.last().expect("faces are nonempty")].x;
            for (cand, nu) in vnt.iter().enumerate() {
                if nu.x <= max_x {
                    continue;
                }
                let mut family: Vec<InteractionVertex> =
                    face.iter().map(|&i| vnt[i].clone()).collect();
                family.push(nu.clone());
                let xs: Vec<VertexId> = family.iter().map(|f| f.x).collect();
                if !comp_cache.contains_key(&xs) {
                    comp_cache.insert(xs.clone(), components_for(tree, &xs)?);
                }
                let comps = &comp_cache[&xs];
                let (all_hold, strict) = face_inequalities(n, &family, comps);
                if all_hold && strict {
                    let mut extended = face.clone();
                    extended.push(cand);
                    next.push(extended);
                }
            }
        }
        current = next;
    }
    Ok(layers)
}

/// Face counts by dimension; empty when the complex has no vertices.
pub fn f_vector(tree: &RootedPlaneTree, n: usize) -> Result<Vec<u64>> {
    let faces = knt_faces(tree, n, usize::MAX - 1)?;
    Ok(faces.iter().map(|layer| layer.len() as u64).collect())
}

/// Is every clique of the 1-skeleton a face?  (Exactly when the cohomology
/// ring is determined by pairwise products.)
pub fn is_flag(tree: &RootedPlaneTree, n: usize) -> Result<bool> {
    let vnt = enumerate_vnt(tree, n);
    let mut adjacent = vec![Vec::new(); vnt.len()];
    for i in 0..vnt.len() {
        for j in (i + 1)..vnt.len() {
            let (a, b) = if vnt[i].x < vnt[j].x {
                (i, j)
            } else if vnt[j].x < vnt[i].x {
                (j, i)
            } else {
                continue;
            };
            if is_face(tree, n, &[vnt[a].clone(), vnt[b].clone()])? {
                adjacent[i].push(j);
            }
        }
    }
    // Grow cliques in index order; any clique of three or more vertices
    // must itself be a face.
    fn grow(
        tree: &RootedPlaneTree,
        n: usize,
        vnt: &[InteractionVertex],
        adjacent: &[Vec<usize>],
        clique: &mut Vec<usize>,
        candidates: &[usize],
    ) -> Result<bool> {
        for (pos, &c) in candidates.iter().enumerate() {
            clique.push(c);
            if clique.len() >= 3 {
                let mut family: Vec<InteractionVertex> =
                    clique.iter().map(|&i| vnt[i].clone()).collect();
                family.sort_unstable_by_key(|f| f.x);
                if !is_face(tree, n, &family)? {
                    return Ok(false);
                }
            }
            let narrowed: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|d| adjacent[c].binary_search(d).is_ok())
                .collect();
            if !grow(tree, n, vnt, adjacent, clique, &narrowed)? {
                return Ok(false);
            }
            clique.pop();
        }
        Ok(true)
    }
    let all: Vec<usize> = (0..vnt.len()).collect();
    grow(tree, n, &vnt, &adjacent, &mut Vec::new(), &all)
}
