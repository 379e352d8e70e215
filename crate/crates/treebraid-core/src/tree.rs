//! Rooted plane trees and the decompositions the configuration-space
//! machinery needs.
//!
//! A tree here is always *rooted* at a degree-one vertex and *plane*: every
//! vertex carries an ordered list of children. Vertices are labelled by
//! their first-encounter position in the depth-first walk that always takes
//! the leftmost unexplored branch, so the root is `0`, a parent is always
//! smaller than its children, and the subtree under `v` occupies the
//! contiguous label interval `v .. v + subtree_size(v)`.
//!
//! Directions at a vertex `x` are numbered `0 .. degree(x)`: direction `0`
//! points toward the root and directions `1, 2, …` follow the plane order of
//! the children. The root has no direction `0`.

use crate::error::{Error, Result};
use crate::VertexId;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// A rooted plane tree with vertices in depth-first order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedPlaneTree {
    parent: Vec<VertexId>,
    children: Vec<Vec<VertexId>>,
    subtree: Vec<u32>,
}

/// Result of [`build_tree`]: the relabelled tree plus, for every new label,
/// the input label it came from.
#[derive(Debug, Clone)]
pub struct BuiltTree {
    pub tree: RootedPlaneTree,
    /// `input_label[v]` is the label the input used for the vertex now
    /// called `v`.
    pub input_label: Vec<usize>,
}

/// Builds a tree from a designated root and per-vertex ordered child lists,
/// relabelling everything into depth-first order.
///
/// The input uses arbitrary dense labels `0 .. children_of.len()`. Fails if
/// the root does not have degree one, if some vertex has two parents (the
/// input closes a cycle), or if some vertex is unreachable from the root.
pub fn build_tree(root: usize, children_of: &[Vec<usize>]) -> Result<BuiltTree> {
    let v = children_of.len();
    if root >= v {
        return Err(Error::UnknownVertex { vertex: root });
    }
    if children_of[root].len() != 1 {
        return Err(Error::RootDegree {
            degree: children_of[root].len(),
        });
    }
    let mut seen_as_child = vec![false; v];
    for list in children_of {
        for &c in list {
            if c >= v {
                return Err(Error::UnknownVertex { vertex: c });
            }
            if c == root || seen_as_child[c] {
                return Err(Error::Cyclic { vertex: c });
            }
            seen_as_child[c] = true;
        }
    }

    // Depth-first walk, leftmost child first.
    let mut input_label = Vec::with_capacity(v);
    let mut new_of_old = vec![usize::MAX; v];
    let mut stack = vec![root];
    while let Some(old) = stack.pop() {
        let new = input_label.len();
        new_of_old[old] = new;
        input_label.push(old);
        for &c in children_of[old].iter().rev() {
            stack.push(c);
        }
    }
    if input_label.len() != v {
        return Err(Error::Disconnected {
            unreached: v - input_label.len(),
        });
    }

    let mut parent = vec![0 as VertexId; v];
    let mut children = vec![Vec::new(); v];
    for (new, &old) in input_label.iter().enumerate() {
        children[new] = children_of[old]
            .iter()
            .map(|&c| new_of_old[c] as VertexId)
            .collect();
        for &c in &children[new] {
            parent[c as usize] = new as VertexId;
        }
    }
    let mut subtree = vec![1u32; v];
    for new in (1..v).rev() {
        let p = parent[new] as usize;
        subtree[p] += subtree[new];
    }
    subtree[0] = v as u32;

    Ok(BuiltTree {
        tree: RootedPlaneTree {
            parent,
            children,
            subtree,
        },
        input_label,
    })
}

impl RootedPlaneTree {
    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent of `v`, or `None` for the root.
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        if v == 0 {
            None
        } else {
            Some(self.parent[v as usize])
        }
    }

    /// Children of `v` in plane order. Their labels are strictly increasing.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v as usize].len() + usize::from(v != 0)
    }

    pub fn is_essential(&self, v: VertexId) -> bool {
        self.degree(v) >= 3
    }

    /// All essential vertices, in increasing (= depth-first) order.
    pub fn essential_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count() as VertexId)
            .filter(|&v| self.is_essential(v))
            .collect()
    }

    /// Number of vertices in the subtree under `v` (including `v`). The
    /// subtree is exactly the label interval `v .. v + subtree_size(v)`.
    pub fn subtree_size(&self, v: VertexId) -> u32 {
        self.subtree[v as usize]
    }

    /// Whether `a` lies on the path from `b` to the root (or `a == b`).
    pub fn is_ancestor_or_self(&self, a: VertexId, b: VertexId) -> bool {
        a <= b && b < a + self.subtree[a as usize]
    }

    /// The vertex one step from `x` in direction `direction`: the parent for
    /// direction 0, the `direction`-th child otherwise.
    pub fn direction_vertex(&self, x: VertexId, direction: usize) -> Result<VertexId> {
        if direction == 0 {
            return self.parent(x).ok_or(Error::NoSuchDirection {
                vertex: x,
                direction,
            });
        }
        self.children(x)
            .get(direction - 1)
            .copied()
            .ok_or(Error::NoSuchDirection {
                vertex: x,
                direction,
            })
    }

    /// Maximal paths whose interior vertices all have degree 2, joining two
    /// vertices of degree ≠ 2. Every such path runs top-down, so it is
    /// reported from its end nearest the root.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for top in 0..self.vertex_count() as VertexId {
            if self.degree(top) == 2 {
                continue;
            }
            for &c in self.children(top) {
                let mut bottom = c;
                let mut edges = 1;
                while self.degree(bottom) == 2 {
                    bottom = self.children(bottom)[0];
                    edges += 1;
                }
                out.push(Segment { top, bottom, edges });
            }
        }
        out
    }

    /// Whether the tree can carry `n` points: every path between distinct
    /// vertices of degree ≠ 2 must have at least `n − 1` edges. Such a path
    /// is a concatenation of segments, so checking segments is enough.
    pub fn is_sufficient(&self, n: usize) -> bool {
        n >= 1 && self.segments().iter().all(|s| s.edges + 1 >= n)
    }

    /// Minimally subdivides so the tree can carry `n` points, spreading the
    /// new vertices evenly along each deficient path. Returns an identical
    /// tree when nothing needs to change, so the operation is idempotent.
    pub fn subdivide_for(&self, n: usize) -> RootedPlaneTree {
        if self.is_sufficient(n) {
            return self.clone();
        }
        let v = self.vertex_count();
        let mut lists: Vec<Vec<usize>> = (0..v)
            .map(|u| self.children[u].iter().map(|&c| c as usize).collect())
            .collect();
        let mut next = v;
        for seg in self.segments() {
            if seg.edges + 1 >= n {
                continue;
            }
            let deficit = (n - 1) - seg.edges;
            // Walk the segment's edges top-down and split each one into
            // `1 + extra` edges, handing out the deficit as evenly as it goes.
            let mut upper = seg.top as usize;
            for j in 0..seg.edges {
                let extra = deficit / seg.edges + usize::from(j < deficit % seg.edges);
                let slot = lists[upper]
                    .iter()
                    .position(|&c| {
                        c < v
                            && self.parent[c] == upper as VertexId
                            && self.on_segment(&seg, c as VertexId)
                    })
                    .expect("segment edge present");
                let lower = lists[upper][slot];
                if extra > 0 {
                    let chain: Vec<usize> = (next..next + extra).collect();
                    next += extra;
                    lists[upper][slot] = chain[0];
                    for w in 0..extra {
                        let below = if w + 1 < extra { chain[w + 1] } else { lower };
                        lists.push(vec![below]);
                    }
                }
                upper = lower;
            }
        }
        build_tree(0, &lists)
            .expect("subdividing a valid tree yields a valid tree")
            .tree
    }

    fn on_segment(&self, seg: &Segment, c: VertexId) -> bool {
        // `c` is the child endpoint of one of `seg`'s edges iff it lies on
        // the path from seg.bottom up to seg.top.
        let mut w = seg.bottom;
        loop {
            if w == c {
                return true;
            }
            if w == seg.top {
                return false;
            }
            w = self.parent[w as usize];
        }
    }

    /// For every vertex, whether its subtree contains an essential vertex.
    pub fn essential_in_subtree(&self) -> Vec<bool> {
        let v = self.vertex_count();
        let mut flag = vec![false; v];
        for u in (0..v).rev() {
            flag[u] = self.is_essential(u as VertexId)
                || self.children[u].iter().any(|&c| flag[c as usize]);
        }
        flag
    }

    /// Whether every essential vertex has at most two branches (away from
    /// the root) that carry further essential vertices.
    pub fn is_binary_core(&self) -> bool {
        self.binary_core_violation().is_none()
    }

    fn binary_core_violation(&self) -> Option<VertexId> {
        let flag = self.essential_in_subtree();
        for x in self.essential_vertices() {
            let carriers = self
                .children(x)
                .iter()
                .filter(|&&c| flag[c as usize])
                .count();
            if carriers > 2 {
                return Some(x);
            }
        }
        None
    }

    /// Whether, at every essential vertex, only the last two child branches
    /// carry essential vertices. [`reembed_binary_core`] establishes this.
    pub fn is_embedded_binary_core(&self) -> bool {
        if !self.is_binary_core() {
            return false;
        }
        let flag = self.essential_in_subtree();
        for x in self.essential_vertices() {
            let cs = self.children(x);
            let d = cs.len();
            if cs[..d.saturating_sub(2)]
                .iter()
                .any(|&c| flag[c as usize])
            {
                return false;
            }
        }
        true
    }

    /// Reorders children so that, at every essential vertex, branches free
    /// of essential vertices come first. The reorder is stable, and the tree
    /// is relabelled into depth-first order afterwards.
    ///
    /// Fails if some essential vertex has three or more branches carrying
    /// essential vertices, since then no order puts them all last-or-second-
    /// to-last.
    pub fn reembed_binary_core(&self) -> Result<(RootedPlaneTree, Vec<VertexId>)> {
        if let Some(x) = self.binary_core_violation() {
            return Err(Error::NotBinaryCore { vertex: x });
        }
        let flag = self.essential_in_subtree();
        let v = self.vertex_count();
        let mut lists: Vec<Vec<usize>> = Vec::with_capacity(v);
        for u in 0..v {
            let mut list: Vec<usize> = Vec::with_capacity(self.children[u].len());
            if self.is_essential(u as VertexId) {
                list.extend(
                    self.children[u]
                        .iter()
                        .filter(|&&c| !flag[c as usize])
                        .map(|&c| c as usize),
                );
                list.extend(
                    self.children[u]
                        .iter()
                        .filter(|&&c| flag[c as usize])
                        .map(|&c| c as usize),
                );
            } else {
                list.extend(self.children[u].iter().map(|&c| c as usize));
            }
            lists.push(list);
        }
        let built = build_tree(0, &lists).expect("reordering children keeps the tree valid");
        let mut new_of_old = vec![0 as VertexId; v];
        for (new, &old) in built.input_label.iter().enumerate() {
            new_of_old[old] = new as VertexId;
        }
        Ok((built.tree, new_of_old))
    }
}

/// A maximal path of degree-2 interior vertices; see
/// [`RootedPlaneTree::segments`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub top: VertexId,
    pub bottom: VertexId,
    pub edges: usize,
}

/// One connected piece of the tree minus a set of essential vertices.
///
/// `vertices` can be empty: removing two adjacent essential vertices leaves
/// the open edge between them as a component of the space with no vertex in
/// it. Such a component still has a nonempty `bounding` set and still
/// matters for the interaction conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Vertices in the component, sorted. Never contains a removed vertex.
    pub vertices: Vec<VertexId>,
    /// Removed vertices on the closure of the component, sorted.
    pub bounding: Vec<VertexId>,
}

/// All components of the tree minus an essential-vertex set, indexed the way
/// the interaction machinery addresses them: one component containing the
/// root, and for each removed vertex `x_i` one component per positive
/// direction of `x_i` (the component on the far side of that direction).
#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    pub essentials: Vec<VertexId>,
    pub root_component: Component,
    /// `branch_components[i][l - 1]` is the component in direction `l` of
    /// `essentials[i]`.
    pub branch_components: Vec<Vec<Component>>,
}

fn component_from(
    tree: &RootedPlaneTree,
    start: VertexId,
    removed: &[bool],
) -> Component {
    let mut vertices = Vec::new();
    let mut bounding = BTreeSet::new();
    let mut stack = vec![start];
    let mut seen = BTreeSet::new();
    seen.insert(start);
    while let Some(u) = stack.pop() {
        vertices.push(u);
        let visit = |w: VertexId,
                         seen: &mut BTreeSet<VertexId>,
                         stack: &mut Vec<VertexId>,
                         bounding: &mut BTreeSet<VertexId>| {
            if removed[w as usize] {
                bounding.insert(w);
            } else if seen.insert(w) {
                stack.push(w);
            }
        };
        if let Some(p) = tree.parent(u) {
            visit(p, &mut seen, &mut stack, &mut bounding);
        }
        for &c in tree.children(u) {
            visit(c, &mut seen, &mut stack, &mut bounding);
        }
    }
    vertices.sort_unstable();
    Component {
        vertices,
        bounding: bounding.into_iter().collect(),
    }
}

/// Splits the tree along a set of essential vertices.
///
/// The list must be strictly increasing and consist of essential vertices.
pub fn components_for(
    tree: &RootedPlaneTree,
    essentials: &[VertexId],
) -> Result<ComponentDecomposition> {
    if !essentials.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::UnsortedFactors);
    }
    let mut removed = vec![false; tree.vertex_count()];
    for &x in essentials {
        if !tree.is_essential(x) {
            return Err(Error::NotEssential { vertex: x });
        }
        removed[x as usize] = true;
    }

    let root_component = component_from(tree, 0, &removed);
    let mut branch_components = Vec::with_capacity(essentials.len());
    for &x in essentials {
        let mut per_direction = Vec::with_capacity(tree.children(x).len());
        for &y in tree.children(x) {
            if removed[y as usize] {
                // The open edge between two removed vertices: no vertices,
                // bounded by both ends.
                let mut bounding = vec![x, y];
                bounding.sort_unstable();
                per_direction.push(Component {
                    vertices: Vec::new(),
                    bounding,
                });
            } else {
                per_direction.push(component_from(tree, y, &removed));
            }
        }
        branch_components.push(per_direction);
    }
    Ok(ComponentDecomposition {
        essentials: essentials.to_vec(),
        root_component,
        branch_components,
    })
}

impl ComponentDecomposition {
    /// The component in direction `l ≥ 1` of the `i`-th removed vertex.
    pub fn branch(&self, i: usize, l: usize) -> &Component {
        &self.branch_components[i][l - 1]
    }

    /// Removed vertices bounding the root component.
    pub fn root_leaves(&self) -> &[VertexId] {
        &self.root_component.bounding
    }

    /// Removed vertices other than `essentials[i]` bounding the component in
    /// direction `l` of `essentials[i]`.
    pub fn branch_leaves(&self, i: usize, l: usize) -> Vec<VertexId> {
        let x = self.essentials[i];
        self.branch(i, l)
            .bounding
            .iter()
            .copied()
            .filter(|&y| y != x)
            .collect()
    }
}

/// A component with a root chosen on its closure, trimmed so that distinct
/// pruned trees share no vertex. See [`pruned_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedTree {
    pub root: VertexId,
    /// Sorted vertex set. Contains `root`, except for the degenerate tree
    /// sitting inside an open edge between two removed vertices, which has
    /// no vertices at all.
    pub vertices: Vec<VertexId>,
    /// Removed vertices that are leaves of this pruned tree.
    pub leaves: Vec<VertexId>,
}

/// The pruned-tree decomposition attached to removed vertices `x_1 < … <
/// x_m` and direction splits `r_1, …, r_m`.
///
/// The component containing the root keeps the root as its root. The
/// component in direction `l` of `x_i` is rooted at `x_i` itself — and
/// therefore gains `x_i` as a vertex — except in the distinguished direction
/// `r_i + 1`, where the tree is rooted at the far endpoint of the edge
/// leaving `x_i`, and the open edge is cut off instead.
#[derive(Debug, Clone)]
pub struct PrunedDecomposition {
    pub essentials: Vec<VertexId>,
    pub rs: Vec<usize>,
    pub root_tree: PrunedTree,
    /// `branch_trees[i][l - 1]` for direction `l` of `essentials[i]`.
    pub branch_trees: Vec<Vec<PrunedTree>>,
}

/// Builds the pruned-tree decomposition. Accepts any split `1 ≤ r_i ≤
/// degree(x_i) − 1` (generators are constrained more tightly; the
/// decomposition itself is not).
pub fn pruned_decomposition(
    tree: &RootedPlaneTree,
    essentials: &[VertexId],
    rs: &[usize],
) -> Result<PrunedDecomposition> {
    let comps = components_for(tree, essentials)?;
    if rs.len() != essentials.len() {
        return Err(Error::InvalidGenerator {
            detail: "one direction split per essential vertex".into(),
        });
    }
    for (i, &x) in essentials.iter().enumerate() {
        if rs[i] < 1 || rs[i] > tree.degree(x) - 1 {
            return Err(Error::SplitOutOfRange { vertex: x, r: rs[i] });
        }
    }

    let root_tree = PrunedTree {
        root: 0,
        vertices: comps.root_component.vertices.clone(),
        leaves: comps.root_component.bounding.clone(),
    };
    let mut branch_trees = Vec::with_capacity(essentials.len());
    for (i, &x) in essentials.iter().enumerate() {
        let mut per_direction = Vec::new();
        for l in 1..=tree.children(x).len() {
            let comp = comps.branch(i, l);
            let leaves = comps.branch_leaves(i, l);
            if l == rs[i] + 1 {
                // Rooted at the far end of the edge leaving x_i; the far end
                // is already a component vertex unless it was itself removed
                // (in which case nothing is left).
                let far = tree.children(x)[l - 1];
                per_direction.push(PrunedTree {
                    root: far,
                    vertices: comp.vertices.clone(),
                    leaves,
                });
            } else {
                let mut vertices = comp.vertices.clone();
                vertices.push(x);
                vertices.sort_unstable();
                per_direction.push(PrunedTree {
                    root: x,
                    vertices,
                    leaves,
                });
            }
        }
        branch_trees.push(per_direction);
    }
    Ok(PrunedDecomposition {
        essentials: essentials.to_vec(),
        rs: rs.to_vec(),
        root_tree,
        branch_trees,
    })
}

impl PrunedDecomposition {
    pub fn branch(&self, i: usize, l: usize) -> &PrunedTree {
        &self.branch_trees[i][l - 1]
    }
}

/// Map from each essential vertex to its position in a family, for reading
/// local information off a decomposition.
pub fn index_by_vertex(essentials: &[VertexId]) -> BTreeMap<VertexId, usize> {
    essentials
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect()
}
