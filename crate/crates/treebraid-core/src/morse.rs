//! The gradient field on the discrete models and its transfer machinery.
//!
//! Every cell of a discrete model is classified by scanning its ingredients
//! in tree order: a vertex-ingredient may *fall* to its parent edge unless
//! that parent is occupied (or the vertex is the root); an edge-ingredient
//! may collapse to its lower endpoint unless a vertex-ingredient sits on a
//! child of that endpoint strictly between the two endpoints.  The first
//! ingredient able to move pairs the cell with a neighbour one dimension up
//! or down; cells with no movable ingredient are **critical**.
//!
//! Critical cells admit a compact normal form ([`CriticalCell`]): a stack of
//! vertices resting on the root, plus one "locked" edge per dimension, each
//! surrounded by stacks of vertices resting on the edge's essential lower
//! endpoint.  [`enumerate_critical`] lists them directly from that
//! description, without touching the (much larger) cell complex.
//!
//! The pairing is acyclic, so alternating up/down paths transfer cochain
//! data between the full cubical complex and the critical cells:
//! [`MorseComplex::phi_bar`] expands the dual of a critical cell into an
//! honest cubical cocycle, [`MorseComplex::phi_under`] projects a cubical
//! cochain back onto the critical-cell basis, and the two maps are mutually
//! inverse on cohomology.  All incidence numbers here use the gradient
//! orientation (edges of a cell ordered by lower endpoint).
//!
//! Dimension-one classes additionally have a closed-form representative
//! ([`cocycle_rep_1dim`]): spread the root stack over the entire far side of
//! the locked edge and each direction stack over the whole branch it points
//! into, with coefficient one on every placement.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cube::{
    boundary_conf, boundary_orbit, count_orbit_cells, enumerate_orbit_cells,
    enumerate_ordered_cells, pairwise_disjoint, pi_star, CochainVec, ConfCube, Ingredient,
    OrbitCube, Orientation,
};
use crate::tree::RootedPlaneTree;
use crate::{Coeff, Error, Result, VertexId};

/// How a single ingredient behaves inside its cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngredientStatus {
    /// A vertex that cannot fall: it is the root, or its parent lies in the
    /// closure of another ingredient.
    Blocked,
    /// A vertex free to fall to the edge above it.
    Unblocked,
    /// An edge free to collapse to its larger endpoint.
    OrderRespecting,
    /// An edge held open by a vertex-ingredient on a child of its lower
    /// endpoint, strictly between the endpoints in tree order.
    OrderDisrespectful,
}

/// Status of `ings[which]` within the cell whose ingredients are `ings`.
///
/// The slice may come from either model; only membership matters, not the
/// listing order.
pub fn ingredient_status(
    tree: &RootedPlaneTree,
    ings: &[Ingredient],
    which: usize,
) -> IngredientStatus {
    match ings[which] {
        Ingredient::Vertex(v) => {
            let Some(u) = tree.parent(v) else {
                return IngredientStatus::Blocked;
            };
            if ings.iter().any(|g| g.contains(u)) {
                IngredientStatus::Blocked
            } else {
                IngredientStatus::Unblocked
            }
        }
        Ingredient::Edge(a, b) => {
            let held_open = ings.iter().any(|g| match *g {
                Ingredient::Vertex(z) => a < z && z < b && tree.parent(z) == Some(a),
                Ingredient::Edge(..) => false,
            });
            if held_open {
                IngredientStatus::OrderDisrespectful
            } else {
                IngredientStatus::OrderRespecting
            }
        }
    }
}

/// A cell together with its pairing partner, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus<C> {
    /// No ingredient can move.
    Critical,
    /// The first movable ingredient is an unblocked vertex; the partner one
    /// dimension up replaces that vertex by its parent edge.
    Redundant(C),
    /// The first movable ingredient is an order-respecting edge; the partner
    /// one dimension down replaces that edge by its larger endpoint.
    Collapsible(C),
}

impl<C> CellStatus<C> {
    pub fn is_critical(&self) -> bool {
        matches!(self, CellStatus::Critical)
    }
}

/// The cube operations the gradient machinery needs, shared by both models.
pub trait ModelCube: Clone + Ord {
    /// The ingredients, in the cube's own storage order.
    fn ingredient_slice(&self) -> &[Ingredient];
    /// Rebuild a cube of the same kind from a modified ingredient list.
    fn from_ingredients(ings: Vec<Ingredient>) -> Self;
    /// Signed faces in the gradient orientation.
    fn faces(&self) -> Vec<(Self, Coeff)>;
}

impl ModelCube for OrbitCube {
    fn ingredient_slice(&self) -> &[Ingredient] {
        self.ingredients()
    }

    fn from_ingredients(ings: Vec<Ingredient>) -> Self {
        OrbitCube::new(ings)
    }

    fn faces(&self) -> Vec<(Self, Coeff)> {
        boundary_orbit(self, Orientation::Gradient)
    }
}

impl ModelCube for ConfCube {
    fn ingredient_slice(&self) -> &[Ingredient] {
        self.coordinates()
    }

    fn from_ingredients(ings: Vec<Ingredient>) -> Self {
        ConfCube::new(ings)
    }

    fn faces(&self) -> Vec<(Self, Coeff)> {
        boundary_conf(self, Orientation::Gradient)
    }
}

fn dim_of<C: ModelCube>(cell: &C) -> usize {
    cell.ingredient_slice().iter().map(Ingredient::dim).sum()
}

/// Classify a cell under the gradient field.
///
/// Ingredients are visited by increasing ordinal; the first one that is
/// either an unblocked vertex or an order-respecting edge decides the
/// status and determines the partner.
pub fn gradient_status<C: ModelCube>(tree: &RootedPlaneTree, cell: &C) -> CellStatus<C> {
    let ings = cell.ingredient_slice();
    let mut order: Vec<usize> = (0..ings.len()).collect();
    order.sort_unstable_by_key(|&i| ings[i].ordinal());
    for &i in &order {
        match ingredient_status(tree, ings, i) {
            IngredientStatus::Unblocked => {
                let Ingredient::Vertex(v) = ings[i] else {
                    unreachable!("only vertices can be unblocked")
                };
                let u = tree.parent(v).expect("an unblocked vertex has a parent");
                let mut replaced = ings.to_vec();
                replaced[i] = Ingredient::edge(u, v);
                return CellStatus::Redundant(C::from_ingredients(replaced));
            }
            IngredientStatus::OrderRespecting => {
                let Ingredient::Edge(_, b) = ings[i] else {
                    unreachable!("only edges can be order-respecting")
                };
                let mut replaced = ings.to_vec();
                replaced[i] = Ingredient::Vertex(b);
                return CellStatus::Collapsible(C::from_ingredients(replaced));
            }
            IngredientStatus::Blocked | IngredientStatus::OrderDisrespectful => {}
        }
    }
    CellStatus::Critical
}

/// One locked edge of a critical cell: the essential vertex `x`, the stack
/// sizes `p` in the child directions up to and including the direction just
/// below the edge, and the stack sizes `q` from the edge's direction on.
///
/// With `r = p.len()`, the edge runs from `x` into child direction `r + 1`;
/// the `q[0]` stack hangs strictly below the edge's far endpoint, every
/// other stack rests directly on the child it names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellBlock {
    pub x: VertexId,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl CellBlock {
    /// The direction index `r`: the edge occupies direction `r + 1`.
    pub fn split(&self) -> usize {
        self.p.len()
    }

    /// Total number of stack vertices attached to this block.
    pub fn stack_total(&self) -> u32 {
        self.p.iter().chain(self.q.iter()).sum()
    }
}

/// A critical cell in normal form: `k` vertices stacked on the root and one
/// [`CellBlock`] per dimension, listed by increasing essential vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CriticalCell {
    pub k: u32,
    pub blocks: Vec<CellBlock>,
}

/// Integer cochain on critical cells, graded by the number of blocks.
pub type MorseCochain = CochainVec<CriticalCell>;

impl CriticalCell {
    /// The unique critical 0-cell: all `n` vertices stacked on the root.
    pub fn root_stack(n: u32) -> Self {
        CriticalCell {
            k: n,
            blocks: Vec::new(),
        }
    }

    /// One block per dimension.
    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    /// Total number of ingredients of the materialized cell.
    pub fn arity(&self) -> usize {
        self.k as usize
            + self.blocks.len()
            + self
                .blocks
                .iter()
                .map(|b| b.stack_total() as usize)
                .sum::<usize>()
    }

    /// Structural checks that do not involve the number of points: blocks
    /// strictly ascending, every `x` essential, tuple lengths matching the
    /// degree, at least one vertex stacked below each edge.
    pub fn validate_shape(&self, tree: &RootedPlaneTree) -> Result<()> {
        let mut prev: Option<VertexId> = None;
        for b in &self.blocks {
            match prev {
                Some(p) if b.x == p => return Err(Error::RepeatedEssential { vertex: b.x }),
                Some(p) if b.x < p => return Err(Error::UnsortedFactors),
                _ => {}
            }
            prev = Some(b.x);
            if !tree.is_essential(b.x) {
                return Err(Error::NotEssential { vertex: b.x });
            }
            let directions = tree.degree(b.x) - 1;
            if b.p.is_empty() || b.q.is_empty() || b.p.len() + b.q.len() != directions {
                return Err(Error::InvalidGenerator {
                    detail: format!(
                        "vertex {} has {} child directions, but the stack tuples cover {} + {}",
                        b.x,
                        directions,
                        b.p.len(),
                        b.q.len()
                    ),
                });
            }
            if b.p.iter().all(|&t| t == 0) {
                return Err(Error::InvalidGenerator {
                    detail: format!(
                        "the edge at {} needs a vertex stacked in some direction at or below its split",
                        b.x
                    ),
                });
            }
        }
        Ok(())
    }

    /// Full validation against a model on `n` points.
    pub fn validate(&self, tree: &RootedPlaneTree, n: usize) -> Result<()> {
        self.validate_shape(tree)?;
        if self.arity() != n {
            return Err(Error::InvalidGenerator {
                detail: format!(
                    "cell uses {} ingredients but the model carries {} points",
                    self.arity(),
                    n
                ),
            });
        }
        Ok(())
    }

    /// Materialize the normal form as an unordered cell: the root stack,
    /// each locked edge, and each direction stack, with the stack in the
    /// edge's own direction shifted one step past the far endpoint.
    pub fn to_orbit_cube(&self, tree: &RootedPlaneTree) -> Result<OrbitCube> {
        self.validate_shape(tree)?;
        let mut ings = Vec::with_capacity(self.arity());
        push_stack(tree, 0, self.k, &mut ings)?;
        for b in &self.blocks {
            let r = b.p.len();
            let far = tree.direction_vertex(b.x, r + 1)?;
            ings.push(Ingredient::edge(b.x, far));
            for (idx, &t) in b.p.iter().chain(b.q.iter()).enumerate() {
                if t == 0 {
                    continue;
                }
                let direction = idx + 1;
                let anchor = tree.direction_vertex(b.x, direction)?;
                let base = if direction == r + 1 {
                    let below = anchor + 1;
                    if (below as usize) >= tree.vertex_count()
                        || tree.parent(below) != Some(anchor)
                    {
                        return Err(Error::CellDoesNotFit {
                            detail: format!(
                                "no vertex hangs below {anchor} to seed the stack in direction {direction} at {}",
                                b.x
                            ),
                        });
                    }
                    below
                } else {
                    anchor
                };
                push_stack(tree, base, t, &mut ings)?;
            }
        }
        if !pairwise_disjoint(&ings) {
            return Err(Error::CellDoesNotFit {
                detail: format!("ingredient closures of {self} collide"),
            });
        }
        Ok(OrbitCube::new(ings))
    }

    /// Parse an unordered cell back into normal form.
    ///
    /// Succeeds exactly on cells assembled as in [`Self::to_orbit_cube`];
    /// the parse is verified by rebuilding the cube and comparing.
    pub fn from_orbit_cube(tree: &RootedPlaneTree, cube: &OrbitCube) -> Result<Self> {
        let mut vertices: BTreeSet<VertexId> = BTreeSet::new();
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for g in cube.ingredients() {
            match *g {
                Ingredient::Vertex(v) => {
                    vertices.insert(v);
                }
                Ingredient::Edge(a, b) => edges.push((a, b)),
            }
        }
        let chain_len = |base: VertexId| -> u32 {
            let mut count = 0u32;
            loop {
                let v = base + count;
                if (v as usize) >= tree.vertex_count() || !vertices.contains(&v) {
                    break;
                }
                if count > 0 && tree.parent(v) != Some(v - 1) {
                    break;
                }
                count += 1;
            }
            count
        };
        let k = chain_len(0);
        let mut blocks = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let Some(pos) = tree.children(a).iter().position(|&c| c == b) else {
                return Err(Error::CellDoesNotFit {
                    detail: format!("({a},{b}) is not a tree edge"),
                });
            };
            let direction = pos + 1;
            if direction < 2 {
                return Err(Error::CellDoesNotFit {
                    detail: format!(
                        "the edge at {a} descends the first child direction, so some vertex could still fall across it"
                    ),
                });
            }
            let r = direction - 1;
            let directions = tree.degree(a).saturating_sub(1);
            let mut t = vec![0u32; directions];
            for (idx, slot) in t.iter_mut().enumerate() {
                let l = idx + 1;
                let anchor = tree.direction_vertex(a, l)?;
                let base = if l == direction { anchor + 1 } else { anchor };
                if l == direction
                    && ((base as usize) >= tree.vertex_count()
                        || tree.parent(base) != Some(anchor))
                {
                    continue;
                }
                *slot = chain_len(base);
            }
            if r >= directions {
                return Err(Error::CellDoesNotFit {
                    detail: format!("edge direction out of range at {a}"),
                });
            }
            blocks.push(CellBlock {
                x: a,
                p: t[..r].to_vec(),
                q: t[r..].to_vec(),
            });
        }
        blocks.sort_unstable_by_key(|b| b.x);
        let cell = CriticalCell { k, blocks };
        let rebuilt = cell.to_orbit_cube(tree)?;
        if &rebuilt != cube {
            return Err(Error::CellDoesNotFit {
                detail: format!("cell is not in critical normal form (parsed {cell})"),
            });
        }
        Ok(cell)
    }
}

impl fmt::Display for CriticalCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}", self.k)?;
        for b in &self.blocks {
            write!(f, " | {},(", b.x)?;
            for (i, t) in b.p.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, "),(")?;
            for (i, t) in b.q.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

fn push_stack(
    tree: &RootedPlaneTree,
    base: VertexId,
    t: u32,
    out: &mut Vec<Ingredient>,
) -> Result<()> {
    for j in 0..t {
        let v = base + j;
        if (v as usize) >= tree.vertex_count() {
            return Err(Error::CellDoesNotFit {
                detail: format!("stack of {t} vertices at {base} runs past the tree"),
            });
        }
        if j > 0 && tree.parent(v) != Some(v - 1) {
            return Err(Error::CellDoesNotFit {
                detail: format!(
                    "vertices {base}..={} do not form a single falling chain",
                    base + t - 1
                ),
            });
        }
        out.push(Ingredient::Vertex(v));
    }
    Ok(())
}

/// All critical `m`-cells of the unordered model on `n` points, sorted.
///
/// Works directly on the normal form: choose `m` essential vertices, an edge
/// direction at each, and stack sizes summing (with the root stack) to
/// `n − m`, with at least one vertex stacked at or below each edge's split.
pub fn enumerate_critical(
    tree: &RootedPlaneTree,
    n: usize,
    m: usize,
) -> Result<Vec<CriticalCell>> {
    if n == 0 {
        return Err(Error::ZeroPoints);
    }
    if !tree.is_sufficient(n) {
        return Err(Error::NotSufficient { n });
    }
    if m == 0 {
        return Ok(vec![CriticalCell::root_stack(n as u32)]);
    }
    let essentials = tree.essential_vertices();
    if essentials.len() < m || n < 2 * m {
        return Ok(Vec::new());
    }
    let mut gen = CriticalGen {
        tree,
        essentials,
        out: Vec::new(),
    };
    let budget = (n - m) as u32;
    let mut acc = Vec::with_capacity(m);
    gen.place_blocks(0, m, budget, &mut acc);
    gen.out.sort_unstable();
    Ok(gen.out)
}

struct CriticalGen<'t> {
    tree: &'t RootedPlaneTree,
    essentials: Vec<VertexId>,
    out: Vec<CriticalCell>,
}

impl CriticalGen<'_> {
    fn place_blocks(&mut self, start: usize, left: usize, budget: u32, acc: &mut Vec<CellBlock>) {
        if left == 0 {
            self.out.push(CriticalCell {
                k: budget,
                blocks: acc.clone(),
            });
            return;
        }
        if (budget as usize) < left || self.essentials.len() - start < left {
            return;
        }
        for j in start..=(self.essentials.len() - left) {
            let x = self.essentials[j];
            let directions = self.tree.degree(x) - 1;
            // Later blocks each need at least one stack vertex of their own.
            let room = budget - (left as u32 - 1);
            for r in 1..directions {
                let mut t = vec![0u32; directions];
                self.place_stacks(j, left, budget, r, 0, room, &mut t, acc);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn place_stacks(
        &mut self,
        j: usize,
        left: usize,
        budget: u32,
        r: usize,
        pos: usize,
        room: u32,
        t: &mut Vec<u32>,
        acc: &mut Vec<CellBlock>,
    ) {
        if pos == t.len() {
            if t[..r].iter().all(|&v| v == 0) {
                return;
            }
            let used: u32 = t.iter().sum();
            acc.push(CellBlock {
                x: self.essentials[j],
                p: t[..r].to_vec(),
                q: t[r..].to_vec(),
            });
            self.place_blocks(j + 1, left - 1, budget - used, acc);
            acc.pop();
            return;
        }
        for v in 0..=room {
            t[pos] = v;
            self.place_stacks(j, left, budget, r, pos + 1, room - v, t, acc);
        }
        t[pos] = 0;
    }
}

/// A model's cells through some top dimension, classified under the
/// gradient field.  All transfer computations run against this table.
pub struct MorseComplex<C: ModelCube> {
    cells: Vec<Vec<C>>,
    status: Vec<Vec<CellStatus<C>>>,
}

/// Build the classified cell table of the unordered model for dimensions
/// `0..=top_dim`, refusing to enumerate more than `budget` cells.
pub fn build_orbit_complex(
    tree: &RootedPlaneTree,
    n: usize,
    top_dim: usize,
    budget: u64,
) -> Result<MorseComplex<OrbitCube>> {
    let mut estimate: u64 = 0;
    for d in 0..=top_dim {
        estimate = estimate.saturating_add(count_orbit_cells(tree, n, d)?);
    }
    if estimate > budget {
        return Err(Error::BudgetExceeded { budget, estimate });
    }
    let mut cells = Vec::with_capacity(top_dim + 1);
    for d in 0..=top_dim {
        let mut layer = enumerate_orbit_cells(tree, n, d)?;
        layer.sort_unstable();
        cells.push(layer);
    }
    Ok(MorseComplex::from_cell_table(tree, cells))
}

/// Ordered-model counterpart of [`build_orbit_complex`].
pub fn build_conf_complex(
    tree: &RootedPlaneTree,
    n: usize,
    top_dim: usize,
    budget: u64,
) -> Result<MorseComplex<ConfCube>> {
    let factorial: u64 = (1..=n as u64).product();
    let mut estimate: u64 = 0;
    for d in 0..=top_dim {
        estimate = estimate.saturating_add(count_orbit_cells(tree, n, d)?.saturating_mul(factorial));
    }
    if estimate > budget {
        return Err(Error::BudgetExceeded { budget, estimate });
    }
    let mut cells = Vec::with_capacity(top_dim + 1);
    for d in 0..=top_dim {
        let mut layer = enumerate_ordered_cells(tree, n, d)?;
        layer.sort_unstable();
        cells.push(layer);
    }
    Ok(MorseComplex::from_cell_table(tree, cells))
}

impl<C: ModelCube> MorseComplex<C> {
    fn from_cell_table(tree: &RootedPlaneTree, cells: Vec<Vec<C>>) -> Self {
        let status = cells
            .iter()
            .map(|layer| layer.iter().map(|c| gradient_status(tree, c)).collect())
            .collect();
        MorseComplex { cells, status }
    }

    /// Highest enumerated dimension.
    pub fn top_dim(&self) -> usize {
        self.cells.len() - 1
    }

    /// All cells of one dimension, ascending.
    pub fn cells(&self, dim: usize) -> &[C] {
        self.cells.get(dim).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Status of the `index`-th cell of `dim`.
    pub fn status(&self, dim: usize, index: usize) -> &CellStatus<C> {
        &self.status[dim][index]
    }

    fn index_of(&self, dim: usize, cell: &C) -> Option<usize> {
        self.cells.get(dim)?.binary_search(cell).ok()
    }

    /// The critical cells of one dimension.
    pub fn critical_cells(&self, dim: usize) -> Vec<&C> {
        self.cells(dim)
            .iter()
            .zip(self.status.get(dim).map(Vec::as_slice).unwrap_or(&[]))
            .filter(|(_, s)| s.is_critical())
            .map(|(c, _)| c)
            .collect()
    }

    /// Expand the dual of a critical cell into a cubical cochain: each cell
    /// `a` receives the signed count of alternating up/down paths climbing
    /// from `a` to the critical cell.
    pub fn phi_bar(&self, critical: &C) -> CochainVec<C> {
        let p = dim_of(critical);
        let target = self
            .index_of(p, critical)
            .expect("cell does not belong to the complex");
        assert!(
            self.status[p][target].is_critical(),
            "phi_bar expects a critical cell"
        );
        let layer = &self.cells[p];
        let mut memo: Vec<Option<Coeff>> = vec![None; layer.len()];
        let mut visiting = vec![false; layer.len()];
        let mut out = CochainVec::new();
        for (i, cell) in layer.iter().enumerate() {
            let v = self.climb_count(p, i, target, &mut memo, &mut visiting);
            if v != 0 {
                out.add(cell.clone(), v);
            }
        }
        out
    }

    /// Signed number of upward paths from cell `i` to the critical `target`.
    fn climb_count(
        &self,
        p: usize,
        i: usize,
        target: usize,
        memo: &mut Vec<Option<Coeff>>,
        visiting: &mut Vec<bool>,
    ) -> Coeff {
        if let Some(v) = memo[i] {
            return v;
        }
        assert!(!visiting[i], "the pairing is not acyclic");
        visiting[i] = true;
        let value = match &self.status[p][i] {
            CellStatus::Critical => Coeff::from(i == target),
            CellStatus::Collapsible(_) => 0,
            CellStatus::Redundant(partner) => {
                let faces = partner.faces();
                let own = faces
                    .iter()
                    .find(|(f, _)| f == &self.cells[p][i])
                    .expect("a redundant cell is a face of its partner")
                    .1;
                let mut total: Coeff = 0;
                for (f, sign) in &faces {
                    if f == &self.cells[p][i] {
                        continue;
                    }
                    let fi = self
                        .index_of(p, f)
                        .expect("every face of a model cell is a model cell");
                    let below = self.climb_count(p, fi, target, memo, visiting);
                    if below != 0 {
                        let term = own
                            .checked_mul(*sign)
                            .and_then(|x| x.checked_mul(below))
                            .expect("coefficient overflow");
                        total = total.checked_sub(term).expect("coefficient overflow");
                    }
                }
                total
            }
        };
        visiting[i] = false;
        memo[i] = Some(value);
        value
    }

    /// Project a cubical cochain of dimension `dim` onto the critical-cell
    /// basis: each critical cell receives the signed count of alternating
    /// down/up paths descending from it, weighted by the cochain.
    pub fn phi_under(&self, z: &CochainVec<C>, dim: usize) -> CochainVec<C> {
        let layer = &self.cells[dim];
        let mut memo: Vec<Option<Coeff>> = vec![None; layer.len()];
        let mut visiting = vec![false; layer.len()];
        let mut out = CochainVec::new();
        for (i, cell) in layer.iter().enumerate() {
            if self.status[dim][i].is_critical() {
                let g = self.descend_value(dim, i, z, &mut memo, &mut visiting);
                if g != 0 {
                    out.add(cell.clone(), g);
                }
            }
        }
        out
    }

    /// Weighted count of downward paths starting at cell `i`.
    fn descend_value(
        &self,
        p: usize,
        i: usize,
        z: &CochainVec<C>,
        memo: &mut Vec<Option<Coeff>>,
        visiting: &mut Vec<bool>,
    ) -> Coeff {
        if let Some(v) = memo[i] {
            return v;
        }
        assert!(!visiting[i], "the pairing is not acyclic");
        visiting[i] = true;
        let cell = &self.cells[p][i];
        let mut total = z.get(cell);
        if p > 0 {
            for (face, sign_here) in cell.faces() {
                let fi = self
                    .index_of(p - 1, &face)
                    .expect("every face of a model cell is a model cell");
                if let CellStatus::Redundant(partner) = &self.status[p - 1][fi] {
                    if partner == cell {
                        continue;
                    }
                    let pi = self
                        .index_of(p, partner)
                        .expect("pairing partners live in the complex");
                    let sign_there = partner
                        .faces()
                        .iter()
                        .find(|(f, _)| f == &face)
                        .expect("a redundant cell is a face of its partner")
                        .1;
                    let below = self.descend_value(p, pi, z, memo, visiting);
                    if below != 0 {
                        let term = sign_here
                            .checked_mul(sign_there)
                            .and_then(|x| x.checked_mul(below))
                            .expect("coefficient overflow");
                        total = total.checked_sub(term).expect("coefficient overflow");
                    }
                }
            }
        }
        visiting[i] = false;
        memo[i] = Some(total);
        total
    }

    /// The coboundary of a critical cell in the critical-cell complex: the
    /// coboundary of its [`Self::phi_bar`] expansion, read off on the
    /// critical cells one dimension up.  Vanishes identically for the
    /// unordered models computed here.
    pub fn morse_coboundary(&self, critical: &C) -> CochainVec<C> {
        let p = dim_of(critical);
        assert!(
            p < self.top_dim(),
            "the complex must extend one dimension above the cell"
        );
        let expanded = self.phi_bar(critical);
        let mut out = CochainVec::new();
        for (i, cell) in self.cells[p + 1].iter().enumerate() {
            if !self.status[p + 1][i].is_critical() {
                continue;
            }
            let mut total: Coeff = 0;
            for (face, sign) in cell.faces() {
                let a = expanded.get(&face);
                if a != 0 {
                    total = total
                        .checked_add(sign.checked_mul(a).expect("coefficient overflow"))
                        .expect("coefficient overflow");
                }
            }
            if total != 0 {
                out.add(cell.clone(), total);
            }
        }
        out
    }
}

impl MorseComplex<OrbitCube> {
    /// Project a cubical cochain onto the normal-form basis.
    pub fn to_morse_basis(
        &self,
        tree: &RootedPlaneTree,
        z: &CochainVec<OrbitCube>,
        dim: usize,
    ) -> Result<MorseCochain> {
        let g = self.phi_under(z, dim);
        let mut out = MorseCochain::new();
        for (cube, &a) in g.iter() {
            out.add(CriticalCell::from_orbit_cube(tree, cube)?, a);
        }
        Ok(out)
    }
}

impl MorseComplex<ConfCube> {
    /// Project a permutation-invariant ordered cochain onto the normal-form
    /// basis.  Every labelled representative of an orbit must end up with
    /// the same coefficient; that common value is reported once.
    ///
    /// # Panics
    ///
    /// If the projection is not constant on orbits, i.e. `z` was not
    /// permutation-invariant.
    pub fn to_morse_basis(
        &self,
        tree: &RootedPlaneTree,
        z: &CochainVec<ConfCube>,
        dim: usize,
    ) -> Result<MorseCochain> {
        let g = self.phi_under(z, dim);
        let mut groups: BTreeMap<CriticalCell, (Coeff, u64)> = BTreeMap::new();
        let mut arity = None;
        for (cube, &a) in g.iter() {
            arity = Some(cube.arity());
            let cell = CriticalCell::from_orbit_cube(tree, &cube.orbit())?;
            let entry = groups.entry(cell).or_insert((a, 0));
            assert!(
                entry.0 == a,
                "projection is not constant on orbits; the input cochain was not permutation-invariant"
            );
            entry.1 += 1;
        }
        let full_orbit: u64 = arity.map_or(1, |n| (1..=n as u64).product());
        let mut out = MorseCochain::new();
        for (cell, (a, seen)) in groups {
            assert!(
                seen == full_orbit,
                "projection misses part of an orbit; the input cochain was not permutation-invariant"
            );
            out.add(cell, a);
        }
        Ok(out)
    }
}

/// Closed-form cocycle representative of a one-dimensional class, in the
/// unordered model: one summand with coefficient `+1` for every way of
/// placing `k` vertices outside the subtree of `x`, `p[i-1]` vertices in
/// child direction `i ≤ r`, and `q[j-r-1]` vertices in direction `j > r`
/// (direction `r + 1` excludes the edge's far endpoint itself).
pub fn cocycle_rep_1dim_orbit(
    tree: &RootedPlaneTree,
    n: usize,
    cell: &CriticalCell,
) -> Result<CochainVec<OrbitCube>> {
    cell.validate(tree, n)?;
    if cell.dim() != 1 {
        return Err(Error::InvalidGenerator {
            detail: format!(
                "the closed-form representative applies to one-dimensional classes, got dimension {}",
                cell.dim()
            ),
        });
    }
    let block = &cell.blocks[0];
    let r = block.p.len();
    let far = tree.direction_vertex(block.x, r + 1)?;
    let mut groups: Vec<(Vec<VertexId>, usize)> = Vec::new();
    let outside: Vec<VertexId> = (0..tree.vertex_count() as VertexId)
        .filter(|&v| !tree.is_ancestor_or_self(block.x, v))
        .collect();
    groups.push((outside, cell.k as usize));
    for (idx, &t) in block.p.iter().chain(block.q.iter()).enumerate() {
        let direction = idx + 1;
        let anchor = tree.direction_vertex(block.x, direction)?;
        let lo = if direction == r + 1 { anchor + 1 } else { anchor };
        let hi = anchor + tree.subtree_size(anchor);
        groups.push(((lo..hi).collect(), t as usize));
    }
    let mut out = CochainVec::new();
    let mut chosen = vec![Ingredient::edge(block.x, far)];
    place_group(&groups, 0, &mut chosen, &mut out);
    Ok(out)
}

/// Ordered-model version of [`cocycle_rep_1dim_orbit`]: the same placements,
/// one summand per labelling of the points.
pub fn cocycle_rep_1dim(
    tree: &RootedPlaneTree,
    n: usize,
    cell: &CriticalCell,
) -> Result<CochainVec<ConfCube>> {
    Ok(pi_star(&cocycle_rep_1dim_orbit(tree, n, cell)?))
}

/// Distribute point placements over vertex pools: one `+1` summand per way
/// of choosing `take` vertices from each group's pool, appended to the
/// ingredients already in `chosen`.
pub(crate) fn place_group(
    groups: &[(Vec<VertexId>, usize)],
    gi: usize,
    chosen: &mut Vec<Ingredient>,
    out: &mut CochainVec<OrbitCube>,
) {
    if gi == groups.len() {
        out.add(OrbitCube::new(chosen.clone()), 1);
        return;
    }
    let (items, take) = &groups[gi];
    if items.len() < *take {
        return;
    }
    pick_from(groups, gi, items, *take, 0, chosen, out);
}

fn pick_from(
    groups: &[(Vec<VertexId>, usize)],
    gi: usize,
    items: &[VertexId],
    left: usize,
    start: usize,
    chosen: &mut Vec<Ingredient>,
    out: &mut CochainVec<OrbitCube>,
) {
    if left == 0 {
        place_group(groups, gi + 1, chosen, out);
        return;
    }
    for i in start..=(items.len() - left) {
        chosen.push(Ingredient::Vertex(items[i]));
        pick_from(groups, gi, items, left - 1, i + 1, chosen, out);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Model;
    use crate::snf::integral_cohomology;
    use crate::tree::build_tree;

    fn minimal_y() -> RootedPlaneTree {
        build_tree(0, &[vec![1], vec![2, 3], vec![], vec![]])
            .unwrap()
            .tree
    }

    /// Two degree-3 essential vertices on one arc, pendant branches first.
    fn linear_binary_2() -> RootedPlaneTree {
        build_tree(
            0,
            &[
                vec![1],
                vec![2, 3],
                vec![],
                vec![4, 5],
                vec![],
                vec![],
            ],
        )
        .unwrap()
        .tree
    }

    /// Root arc into `x1` (degree 3), whose far branch carries `x2` and
    /// `x3` (both degree 4); hosts three-block critical cells.
    fn three_block_host() -> RootedPlaneTree {
        build_tree(
            0,
            &[
                vec![1],
                vec![2, 3],             // x1: leaf branch, then onward
                vec![],
                vec![4, 5, 6],          // x2: two leaf branches, then onward
                vec![],
                vec![],
                vec![7, 8, 9],          // x3: three leaf branches
                vec![],
                vec![],
                vec![],
            ],
        )
        .unwrap()
        .tree
    }

    #[test]
    fn ingredient_statuses_follow_the_blocking_rules() {
        let y = minimal_y();
        // Root vertex: always blocked.
        let c = [Ingredient::Vertex(0), Ingredient::Vertex(2)];
        assert_eq!(ingredient_status(&y, &c, 0), IngredientStatus::Blocked);
        // Vertex 2's parent (1) is free, so 2 may fall.
        assert_eq!(ingredient_status(&y, &c, 1), IngredientStatus::Unblocked);
        // Vertex 3 blocked by the edge (0,1) covering its parent? No: parent
        // of 3 is 1, which lies in the closure of (1,2).
        let c = [Ingredient::edge(1, 2), Ingredient::Vertex(3)];
        assert_eq!(ingredient_status(&y, &c, 1), IngredientStatus::Blocked);
        // The locked edge: vertex 2 sits on a child of 1 between 1 and 3.
        let c = [Ingredient::edge(1, 3), Ingredient::Vertex(2)];
        assert_eq!(
            ingredient_status(&y, &c, 0),
            IngredientStatus::OrderDisrespectful
        );
        // Without the witness the same edge may collapse.
        let c = [Ingredient::edge(1, 3), Ingredient::Vertex(0)];
        assert_eq!(
            ingredient_status(&y, &c, 0),
            IngredientStatus::OrderRespecting
        );
    }

    #[test]
    fn classification_pairs_cells_in_an_involution() {
        let t = minimal_y().subdivide_for(3);
        let complex = build_orbit_complex(&t, 3, 3, 100_000).unwrap();
        let mut redundant = 0usize;
        let mut collapsible = 0usize;
        for d in 0..=complex.top_dim() {
            for (i, cell) in complex.cells(d).iter().enumerate() {
                match complex.status(d, i) {
                    CellStatus::Critical => {}
                    CellStatus::Redundant(up) => {
                        redundant += 1;
                        assert_eq!(dim_of(up), d + 1);
                        // The partner must collapse right back.
                        assert_eq!(gradient_status(&t, up), CellStatus::Collapsible(cell.clone()));
                    }
                    CellStatus::Collapsible(down) => {
                        collapsible += 1;
                        assert_eq!(dim_of(down), d - 1);
                        assert_eq!(gradient_status(&t, down), CellStatus::Redundant(cell.clone()));
                    }
                }
            }
        }
        // Pairs match up one-to-one across the whole table (the top layer
        // has no cells one dimension up, so every top cell pairs downward).
        assert_eq!(redundant, collapsible);
        assert!(redundant > 0);
    }

    #[test]
    fn critical_cells_match_exhaustive_classification() {
        let instances = [
            (minimal_y(), 2usize),
            (minimal_y().subdivide_for(3), 3usize),
            (
                build_tree(0, &[vec![1], vec![2, 3], vec![], vec![4, 5], vec![], vec![]])
                    .unwrap()
                    .tree
                    .subdivide_for(3),
                3usize,
            ),
        ];
        for (tree, n) in instances {
            let complex = build_orbit_complex(&tree, n, n, 1_000_000).unwrap();
            for m in 0..=complex.top_dim() {
                let by_formula = enumerate_critical(&tree, n, m).unwrap();
                let by_scan: Vec<CriticalCell> = complex
                    .critical_cells(m)
                    .into_iter()
                    .map(|c| CriticalCell::from_orbit_cube(&tree, c).unwrap())
                    .collect();
                let mut sorted = by_scan.clone();
                sorted.sort_unstable();
                assert_eq!(by_formula, sorted, "dimension {m} on {n} points");
                // Round trip through the materialized cube.
                for cell in &by_formula {
                    let cube = cell.to_orbit_cube(&tree).unwrap();
                    assert!(gradient_status(&tree, &cube).is_critical());
                    assert_eq!(CriticalCell::from_orbit_cube(&tree, &cube).unwrap(), *cell);
                }
            }
            // Exactly one critical 0-cell: the root stack.
            assert_eq!(
                enumerate_critical(&tree, n, 0).unwrap(),
                vec![CriticalCell::root_stack(n as u32)]
            );
        }
    }

    #[test]
    fn critical_counts_equal_cohomology_ranks() {
        let t = minimal_y().subdivide_for(3);
        let cohomology = integral_cohomology(&t, 3, Model::Unordered, 1_000_000).unwrap();
        for (m, &betti) in cohomology.betti.iter().enumerate() {
            assert_eq!(
                enumerate_critical(&t, 3, m).unwrap().len(),
                betti,
                "dimension {m}"
            );
        }
    }

    #[test]
    fn normal_form_arithmetic_pins_the_three_block_cell() {
        let host = three_block_host();
        // Subdivision relabels vertices but keeps the essential vertices in
        // the same relative order, so they can be recovered positionally.
        let make_cell = |tree: &RootedPlaneTree| -> CriticalCell {
            let ess = tree.essential_vertices();
            assert_eq!(ess.len(), 3);
            assert_eq!(tree.degree(ess[0]), 3);
            assert_eq!(tree.degree(ess[1]), 4);
            assert_eq!(tree.degree(ess[2]), 4);
            CriticalCell {
                k: 2,
                blocks: vec![
                    CellBlock {
                        x: ess[0],
                        p: vec![2],
                        q: vec![0],
                    },
                    CellBlock {
                        x: ess[1],
                        p: vec![1, 0],
                        q: vec![1],
                    },
                    CellBlock {
                        x: ess[2],
                        p: vec![1],
                        q: vec![1, 1],
                    },
                ],
            }
        };
        // Total ingredients: 2 + 3 + (2+0) + (1+0+1) + (1+1+1) = 12.
        let t12 = host.subdivide_for(12);
        let cell = make_cell(&t12);
        assert_eq!(cell.arity(), 12);
        assert!(cell.validate(&t12, 12).is_ok());
        assert!(cell.validate(&t12, 13).is_err());
        assert!(enumerate_critical(&t12, 12, 3).unwrap().contains(&cell));
        // On thirteen points the same stacks no longer exhaust the supply.
        let t13 = host.subdivide_for(13);
        assert!(!enumerate_critical(&t13, 13, 3)
            .unwrap()
            .contains(&make_cell(&t13)));
        // The materialized cube is genuinely critical.
        let cube = cell.to_orbit_cube(&t12).unwrap();
        assert_eq!(cube.dim(), 3);
        assert!(gradient_status(&t12, &cube).is_critical());
    }

    #[test]
    fn every_vertex_cell_climbs_to_the_root_stack_with_weight_one() {
        let y = minimal_y();
        let orbit = build_orbit_complex(&y, 2, 2, 10_000).unwrap();
        let top = CriticalCell::root_stack(2).to_orbit_cube(&y).unwrap();
        let expanded = orbit.phi_bar(&top);
        assert_eq!(expanded.support_len(), orbit.cells(0).len());
        for (_, &a) in expanded.iter() {
            assert_eq!(a, 1);
        }
        let conf = build_conf_complex(&y, 2, 2, 10_000).unwrap();
        let mut pulled = 0usize;
        for rep in conf.critical_cells(0) {
            // Each labelled vertex cell climbs to exactly one of the two
            // labelled root stacks, always with weight one.
            let expanded = conf.phi_bar(rep);
            pulled += expanded.support_len();
            for (_, &a) in expanded.iter() {
                assert_eq!(a, 1);
            }
        }
        assert_eq!(pulled, conf.cells(0).len());
    }

    #[test]
    fn projection_inverts_expansion_on_critical_duals() {
        for (tree, n) in [(minimal_y(), 2usize), (minimal_y().subdivide_for(3), 3)] {
            let complex = build_orbit_complex(&tree, n, n, 1_000_000).unwrap();
            for d in 0..=complex.top_dim() {
                for cell in complex.critical_cells(d) {
                    let expanded = complex.phi_bar(cell);
                    let back = complex.phi_under(&expanded, d);
                    let mut expected = CochainVec::new();
                    expected.add(cell.clone(), 1);
                    assert_eq!(back, expected);
                }
            }
        }
    }

    #[test]
    fn morse_coboundary_vanishes_on_small_models() {
        let instances = [
            (minimal_y(), 2usize),
            (minimal_y().subdivide_for(3), 3),
            (linear_binary_2().subdivide_for(3), 3),
        ];
        for (tree, n) in instances {
            let top = n / 2 + 1;
            let complex = build_orbit_complex(&tree, n, top, 1_000_000).unwrap();
            for d in 0..complex.top_dim() {
                for cell in complex.critical_cells(d) {
                    assert!(
                        complex.morse_coboundary(cell).is_zero(),
                        "nonzero coboundary in dimension {d} on {n} points"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_representative_matches_the_transfer_maps() {
        let y = minimal_y();
        let cell = CriticalCell {
            k: 0,
            blocks: vec![CellBlock {
                x: 1,
                p: vec![1],
                q: vec![0],
            }],
        };
        // Route one: the closed formula.
        let direct = cocycle_rep_1dim_orbit(&y, 2, &cell).unwrap();
        // Route two: expansion of the critical dual.
        let complex = build_orbit_complex(&y, 2, 2, 10_000).unwrap();
        let cube = cell.to_orbit_cube(&y).unwrap();
        assert_eq!(complex.phi_bar(&cube), direct);
        // Route three: ordered expansion of the replicated dual equals the
        // replication of either unordered route.
        let conf = build_conf_complex(&y, 2, 2, 10_000).unwrap();
        let mut ordered_expansion = CochainVec::new();
        for rep in conf.critical_cells(1) {
            if rep.orbit() == cube {
                ordered_expansion.add_cochain(&conf.phi_bar(rep));
            }
        }
        let ordered_direct = cocycle_rep_1dim(&y, 2, &cell).unwrap();
        assert_eq!(ordered_expansion, ordered_direct);
        assert_eq!(pi_star(&direct), ordered_direct);
    }

    #[test]
    fn representative_support_counts_branch_choices() {
        let t = minimal_y().subdivide_for(3);
        // Essential vertex of the subdivided Y, with its two child branches.
        let x = t.essential_vertices()[0];
        let left = t.direction_vertex(x, 1).unwrap();
        let outside = t.vertex_count() as u32 - t.subtree_size(x);
        let cell = CriticalCell {
            k: 1,
            blocks: vec![CellBlock {
                x,
                p: vec![1],
                q: vec![0],
            }],
        };
        let z = cocycle_rep_1dim_orbit(&t, 3, &cell).unwrap();
        let choices = outside as usize * t.subtree_size(left) as usize;
        assert_eq!(z.support_len(), choices);
        let ordered = cocycle_rep_1dim(&t, 3, &cell).unwrap();
        assert_eq!(ordered.support_len(), 6 * choices);
        // The representative is a genuine cocycle: its coboundary vanishes
        // against every 2-cell.
        let complex = build_conf_complex(&t, 3, 2, 1_000_000).unwrap();
        let cofaces = complex.cells(2);
        let delta = crate::cube::coboundary_conf(&ordered, cofaces, Orientation::Gradient);
        assert!(delta.is_zero());
    }

    #[test]
    fn labelled_classification_commutes_with_relabelling() {
        let y = minimal_y();
        let complex = build_conf_complex(&y, 2, 2, 10_000).unwrap();
        let swap = |c: &ConfCube| -> ConfCube {
            let coords = c.coordinates();
            ConfCube::new(vec![coords[1], coords[0]])
        };
        for d in 0..=complex.top_dim() {
            for (i, cell) in complex.cells(d).iter().enumerate() {
                let translated = swap(cell);
                let status_here = complex.status(d, i);
                let status_there = gradient_status(&y, &translated);
                match (status_here, &status_there) {
                    (CellStatus::Critical, CellStatus::Critical) => {}
                    (CellStatus::Redundant(a), CellStatus::Redundant(b)) => {
                        assert_eq!(&swap(a), b);
                    }
                    (CellStatus::Collapsible(a), CellStatus::Collapsible(b)) => {
                        assert_eq!(&swap(a), b);
                    }
                    other => panic!("classification broke equivariance: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn misshapen_normal_forms_are_rejected() {
        let y = minimal_y();
        // Split at the last direction leaves no room for q.
        let bad = CriticalCell {
            k: 0,
            blocks: vec![CellBlock {
                x: 1,
                p: vec![1, 0],
                q: vec![],
            }],
        };
        assert!(matches!(
            bad.validate_shape(&y),
            Err(Error::InvalidGenerator { .. })
        ));
        // No vertex stacked at or below the split.
        let bad = CriticalCell {
            k: 1,
            blocks: vec![CellBlock {
                x: 1,
                p: vec![0],
                q: vec![0],
            }],
        };
        assert!(matches!(
            bad.validate_shape(&y),
            Err(Error::InvalidGenerator { .. })
        ));
        // A stack the tree cannot carry.
        let too_tall = CriticalCell {
            k: 0,
            blocks: vec![CellBlock {
                x: 1,
                p: vec![3],
                q: vec![0],
            }],
        };
        assert!(matches!(
            too_tall.to_orbit_cube(&y),
            Err(Error::CellDoesNotFit { .. })
        ));
        // Blocks out of order.
        let host = three_block_host();
        let unsorted = CriticalCell {
            k: 0,
            blocks: vec![
                CellBlock {
                    x: 3,
                    p: vec![1, 0],
                    q: vec![0],
                },
                CellBlock {
                    x: 1,
                    p: vec![1],
                    q: vec![0],
                },
            ],
        };
        assert_eq!(unsorted.validate_shape(&host), Err(Error::UnsortedFactors));
    }
}
