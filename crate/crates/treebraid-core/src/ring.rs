//! Cup products in the critical basis: closed formulas, a change of basis,
//! and ring-structure certificates.
//!
//! Products of degree-one classes are governed by the interaction
//! trichotomy of [`crate::interaction`]. A strongly interacting ascending
//! family multiplies to the single basis cell that carries its interaction
//! parameters ([`multiply_strong`]); a weakly interacting family expands
//! through three correction sums that trade root capacity against stacks at
//! the smallest essential vertex ([`multiply_weak`]); every other family
//! annihilates. [`evaluate_product`] folds an arbitrary word of generators
//! right-to-left through this trichotomy — inverting each intermediate
//! basis cell into its unique generator factorization along the way — so
//! every intermediate element stays a combination of basis cells.
//! [`product_cocycle_blocks`] independently assembles the same product as
//! an explicit cocycle of the unordered model, one `+1` summand per way of
//! filling the complement components to the parameter sizes, which lets the
//! closed formulas be cross-checked against the cubical machinery.
//!
//! On trees with binary essential branching — at most two child directions
//! of any essential vertex lead to further essential vertices — whose
//! planar embedding keeps those directions last, a unitriangular change of
//! basis on the degree-one classes ([`ChangedGenerator`]) makes every
//! non-strong product vanish identically, so the cohomology ring becomes
//! the exterior face ring of the interaction complex.
//! [`exterior_face_ring_certificate`] verifies exactly that at desk scale,
//! ordering basis cells by the level-wise comparison [`basis_preorder`].
//! [`raag_presentation`] specializes further to linear binary trees, whose
//! braid groups are right-angled Artin groups.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cube::{CochainVec, Ingredient, OrbitCube};
use crate::error::{Error, Result};
use crate::interaction::{
    compositions, enumerate_vnt, interaction_params, Interaction, InteractionParams,
    InteractionVertex,
};
use crate::morse::{place_group, CellBlock, CriticalCell, MorseCochain};
use crate::tree::{components_for, RootedPlaneTree};
use crate::{Coeff, VertexId};

/// An element of the cohomology ring written in the normal-form basis: a
/// finitely supported integer combination of critical cells. Products of
/// homogeneous inputs stay homogeneous (all support cells of one
/// dimension).
pub type RingElement = MorseCochain;

/// The multiplicative unit in degree zero: the full root stack.
pub fn ring_unit(n: usize) -> RingElement {
    CochainVec::from_entries([(CriticalCell::root_stack(n as u32), 1)])
}

/// Coefficient-wise reduction modulo `p`, as least non-negative residues;
/// entries that reduce to zero are dropped. `p = 0` returns the canonical
/// integer coefficients unchanged.
pub fn mod_p_view(z: &RingElement, p: u32) -> RingElement {
    if p == 0 {
        return z.clone();
    }
    z.map_coeffs(|_, a| a.rem_euclid(p as i64))
}

/// Whether the change of basis acts on a generator: every stack strictly
/// below the split is empty and a single direction lies beyond the split.
pub fn rebase_trigger(v: &InteractionVertex) -> bool {
    v.q.len() == 1
        && v.p
            .split_last()
            .is_some_and(|(_, below)| below.iter().all(|&t| t == 0))
}

/// A degree-one generator together with the basis it is read in.
///
/// With `rebased` unset the symbol denotes the single basis cell
/// `{k | x,p,q}`. With `rebased` set — possible exactly when
/// [`rebase_trigger`] holds — it denotes the unitriangular combination that
/// redistributes up to `k` root points onto the stacks at or below the
/// split, one basis cell per redistribution, all with coefficient one. The
/// original cell appears as the untouched redistribution, which is what
/// makes the change of basis unitriangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangedGenerator {
    pub raw: InteractionVertex,
    pub rebased: bool,
}

impl ChangedGenerator {
    /// The generator in the plain basis.
    pub fn raw(v: InteractionVertex) -> Self {
        ChangedGenerator {
            raw: v,
            rebased: false,
        }
    }

    /// The generator in the changed basis whenever its trigger holds, and
    /// in the plain basis otherwise (the change of basis fixes it there).
    pub fn rebased(v: InteractionVertex) -> Self {
        let rebased = rebase_trigger(&v);
        ChangedGenerator { raw: v, rebased }
    }

    /// The combination of plain generators this symbol denotes.
    pub fn expansion(&self) -> Vec<(InteractionVertex, Coeff)> {
        if !self.rebased {
            return vec![(self.raw.clone(), 1)];
        }
        debug_assert!(rebase_trigger(&self.raw));
        let r = self.raw.p.len();
        let mut out = Vec::new();
        for moved in 0..=self.raw.k {
            for a in compositions(moved, r) {
                let mut p = a;
                p[r - 1] += self.raw.p[r - 1];
                out.push((
                    InteractionVertex {
                        k: self.raw.k - moved,
                        x: self.raw.x,
                        p,
                        q: self.raw.q.clone(),
                    },
                    1,
                ));
            }
        }
        out
    }
}

/// Recovers the unique ascending generator family whose strong product is
/// the given basis cell; inverse to [`multiply_strong`].
///
/// Factors peel off largest essential vertex first. No remaining factor can
/// sit below the departing one, so the departing factor's stacks are its
/// block entries read verbatim, its root capacity is forced by the
/// degree-one budget, and the `n − k` points it displaced flow back into
/// the one remaining parameter whose component contains its vertex.
pub fn factorize_basis(
    tree: &RootedPlaneTree,
    n: usize,
    cell: &CriticalCell,
) -> Result<Vec<InteractionVertex>> {
    cell.validate(tree, n)?;
    let mut xs: Vec<VertexId> = cell.blocks.iter().map(|b| b.x).collect();
    let mut rows: Vec<(Vec<u32>, Vec<u32>)> = cell
        .blocks
        .iter()
        .map(|b| (b.p.clone(), b.q.clone()))
        .collect();
    let mut r0 = cell.k as i64;
    let mut factors = Vec::with_capacity(rows.len());
    while let Some((p, q)) = rows.pop() {
        let x = xs.pop().expect("one vertex per block row");
        let stacked: u32 = p.iter().chain(q.iter()).sum();
        let k = n as i64 - 1 - stacked as i64;
        if k < 0 {
            return Err(Error::NotBasisCell {
                detail: format!("block at vertex {x} stacks more than {} points", n - 1),
            });
        }
        let factor = InteractionVertex {
            k: k as u32,
            x,
            p,
            q,
        };
        factor.validate(tree, n)?;
        // Return the points this factor displaced to the parameter whose
        // component contains its vertex.
        let displaced = n as i64 - k;
        let comps = components_for(tree, &xs)?;
        if comps.root_component.vertices.binary_search(&x).is_ok() {
            r0 += displaced;
        } else {
            let slot = xs
                .iter()
                .enumerate()
                .find_map(|(j, &y)| {
                    (1..tree.degree(y))
                        .find(|&l| comps.branch(j, l).vertices.binary_search(&x).is_ok())
                        .map(|l| (j, l))
                })
                .ok_or_else(|| Error::NotBasisCell {
                    detail: format!("vertex {x} lies in no component of the remaining family"),
                })?;
            let (j, l) = slot;
            let (ref mut pj, ref mut qj) = rows[j];
            if l <= pj.len() {
                pj[l - 1] += displaced as u32;
            } else {
                qj[l - 1 - pj.len()] += displaced as u32;
            }
        }
        factors.push(factor);
    }
    if r0 != n as i64 {
        return Err(Error::NotBasisCell {
            detail: format!("root stack resolves to {r0} instead of {n}"),
        });
    }
    factors.reverse();
    Ok(factors)
}

/// The basis cell a strongly interacting ascending family multiplies to:
/// the root stack becomes `R0` and each factor contributes the block of its
/// `P` and `Q` parameter rows.
pub fn multiply_strong(
    tree: &RootedPlaneTree,
    n: usize,
    factors: &[InteractionVertex],
) -> Result<CriticalCell> {
    let params = interaction_params(tree, n, factors)?;
    if params.classify() != Interaction::Strong {
        return Err(Error::WrongInteractionClass { expected: "strong" });
    }
    let xs: Vec<VertexId> = factors.iter().map(|f| f.x).collect();
    Ok(params.to_cell(&xs))
}

/// Multiplies a generator into a basis cell all of whose essential vertices
/// lie strictly above the generator's, in the weak case: the generator's
/// `P` row is exhausted by the factors below it, and the product unfolds
/// into correction sums over the surviving root capacity `R0` and the
/// generator's `Q` row.
///
/// Every summand is a basis cell whose tail blocks are the input cell's
/// blocks unchanged; the summands are pairwise distinct. With a single
/// direction beyond the split only the first sum survives, and it is empty
/// when `R0 = 0`.
pub fn multiply_weak(
    tree: &RootedPlaneTree,
    n: usize,
    head: &InteractionVertex,
    tail: &CriticalCell,
) -> Result<RingElement> {
    let mut family = vec![head.clone()];
    family.extend(factorize_basis(tree, n, tail)?);
    let params = interaction_params(tree, n, &family)?;
    if params.classify() != Interaction::Weak {
        return Err(Error::WrongInteractionClass { expected: "weak" });
    }
    Ok(weak_expansion(head, tail, &params))
}

/// The three correction sums of a weak multiplication. `params` must be
/// the interaction parameters of `[head] ++ factorize(tail)`, already known
/// to classify as weak; in particular the head's `P` row is all zero.
fn weak_expansion(
    head: &InteractionVertex,
    tail: &CriticalCell,
    params: &InteractionParams,
) -> RingElement {
    debug_assert!(params.p[0].iter().all(|&e| e == 0));
    let r0 = params.r0 as u32;
    let qx: Vec<u32> = params.q[0].iter().map(|&e| e as u32).collect();
    let rx = head.p.len();
    let sx = qx.len();
    let mut out = RingElement::new();
    let mut emit = |k: u32, p: Vec<u32>, q: Vec<u32>, sign: Coeff| {
        let mut blocks = vec![CellBlock { x: head.x, p, q }];
        blocks.extend(tail.blocks.iter().cloned());
        out.add(CriticalCell { k, blocks }, sign);
    };
    // Root points move straight onto the near stacks; the far stacks keep
    // the Q parameters.
    for moved in 1..=r0 {
        for a in compositions(moved, rx) {
            emit(r0 - moved, a, qx.clone(), -1);
        }
    }
    // The split advances past `l` far directions. The first far stack
    // grows by b + 1 — one point locks the advanced split — while the
    // stack just past the new split either keeps its size (second sum) or
    // lends the locking point (third sum, needing a point to lend).
    for l in 1..sx {
        for moved in 0..r0 {
            for a in compositions(moved, rx) {
                for b in 0..(r0 - moved) {
                    let mut p = a.clone();
                    p.push(qx[0] + b + 1);
                    p.extend_from_slice(&qx[1..l]);
                    emit(r0 - moved - b - 1, p, qx[l..].to_vec(), 1);
                }
            }
        }
        if qx[l] > 0 {
            for moved in 0..=r0 {
                for a in compositions(moved, rx) {
                    for b in 0..=(r0 - moved) {
                        let mut p = a.clone();
                        p.push(qx[0] + b + 1);
                        p.extend_from_slice(&qx[1..l]);
                        let mut q = qx[l..].to_vec();
                        q[0] -= 1;
                        emit(r0 - moved - b, p, q, -1);
                    }
                }
            }
        }
    }
    out
}

/// Multiplies one generator into every support cell of an element whose
/// cells all live strictly above the generator's vertex.
fn multiply_generator(
    tree: &RootedPlaneTree,
    n: usize,
    head: &InteractionVertex,
    acc: &RingElement,
) -> Result<RingElement> {
    let mut out = RingElement::new();
    for (cell, &a) in acc.iter() {
        let mut family = vec![head.clone()];
        family.extend(factorize_basis(tree, n, cell)?);
        let params = interaction_params(tree, n, &family)?;
        match params.classify() {
            Interaction::None => {}
            Interaction::Strong => {
                let xs: Vec<VertexId> = family.iter().map(|f| f.x).collect();
                out.add(params.to_cell(&xs), a);
            }
            Interaction::Weak => {
                out.add_cochain(&weak_expansion(head, cell, &params).scaled(a));
            }
        }
    }
    Ok(out)
}

/// Multiplies a word of generators, each read in the basis its flag names.
///
/// Generators sharing an essential vertex annihilate the product. Otherwise
/// the word is sorted ascending by vertex — degree-one classes anticommute,
/// so the result picks up the parity of that permutation — each symbol is
/// expanded in the plain basis, and the expansions fold in right-to-left:
/// multiplying a generator into a basis cell factorizes the cell and reads
/// the enlarged family's interaction class. The empty word is the unit.
pub fn evaluate_product(
    tree: &RootedPlaneTree,
    n: usize,
    word: &[ChangedGenerator],
) -> Result<RingElement> {
    if n == 0 {
        return Err(Error::ZeroPoints);
    }
    for g in word {
        g.raw.validate(tree, n)?;
    }
    let mut order: Vec<usize> = (0..word.len()).collect();
    let mut swaps = 0usize;
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && word[order[j - 1]].raw.x > word[order[j]].raw.x {
            order.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if order
        .windows(2)
        .any(|w| word[w[0]].raw.x == word[w[1]].raw.x)
    {
        return Ok(RingElement::new());
    }
    let mut acc = ring_unit(n);
    for &i in order.iter().rev() {
        let mut next = RingElement::new();
        for (v, c) in word[i].expansion() {
            next.add_cochain(&multiply_generator(tree, n, &v, &acc)?.scaled(c));
        }
        acc = next;
        if acc.is_zero() {
            break;
        }
    }
    Ok(if swaps.is_multiple_of(2) {
        acc
    } else {
        acc.scaled(-1)
    })
}

/// Cochain-level product of an ascending family in the unordered model:
/// one locked edge per factor, and all ways of stacking the complement's
/// components to the interaction parameter sizes, each with coefficient
/// `+1` in the gradient orientation. Specializes to the closed degree-one
/// representative for a single factor, and to the all-ones cochain for the
/// empty family. Families with a negative parameter admit no stacking, so
/// their cochain is zero — matching the vanishing of their products.
///
/// The tree must already be subdivided for `n`; on a cruder tree the locked
/// edges could collide with the stacks.
pub fn product_cocycle_blocks(
    tree: &RootedPlaneTree,
    n: usize,
    factors: &[InteractionVertex],
) -> Result<CochainVec<OrbitCube>> {
    if !tree.is_sufficient(n) {
        return Err(Error::NotSufficient { n });
    }
    let params = interaction_params(tree, n, factors)?;
    if !params.nonnegative() {
        return Ok(CochainVec::new());
    }
    let xs: Vec<VertexId> = factors.iter().map(|f| f.x).collect();
    let comps = components_for(tree, &xs)?;
    let mut locked: Vec<Ingredient> = Vec::with_capacity(factors.len());
    let mut groups: Vec<(Vec<VertexId>, usize)> = Vec::with_capacity(1 + 2 * factors.len());
    groups.push((comps.root_component.vertices.clone(), params.r0 as usize));
    for (i, f) in factors.iter().enumerate() {
        let r = f.p.len();
        let far = tree.direction_vertex(f.x, r + 1)?;
        locked.push(Ingredient::edge(f.x, far));
        for l in 1..=(r + f.q.len()) {
            let take = if l <= r {
                params.p[i][l - 1]
            } else {
                params.q[i][l - 1 - r]
            } as usize;
            let mut pool = comps.branch(i, l).vertices.clone();
            if l == r + 1 {
                pool.retain(|&v| v != far);
            }
            groups.push((pool, take));
        }
    }
    let mut out = CochainVec::new();
    place_group(&groups, 0, &mut locked, &mut out);
    Ok(out)
}

/// Level sets of an ascending essential family: the first level holds the
/// members bounding the root component, and each later level the members
/// bounding the last two direction components of the previous level. On
/// trees with embedded binary essential branching the levels partition the
/// family.
pub fn interaction_levels(
    tree: &RootedPlaneTree,
    xs: &[VertexId],
) -> Result<Vec<Vec<VertexId>>> {
    let comps = components_for(tree, xs)?;
    let mut levels: Vec<Vec<VertexId>> = Vec::new();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut current: Vec<VertexId> = comps.root_leaves().to_vec();
    while !current.is_empty() {
        seen.extend(current.iter().copied());
        let mut next: BTreeSet<VertexId> = BTreeSet::new();
        for &x in &current {
            let i = xs.binary_search(&x).expect("level members are family members");
            let d = tree.degree(x) - 1;
            for l in [d - 1, d] {
                for leaf in comps.branch_leaves(i, l) {
                    if !seen.contains(&leaf) {
                        next.insert(leaf);
                    }
                }
            }
        }
        levels.push(current);
        current = next.into_iter().collect();
    }
    Ok(levels)
}

/// Compares two basis cells over the same ascending essential family:
/// first by root stack, then by the flattened stack entries level by level
/// (members of a level in ascending vertex order, each contributing its
/// near stacks then its far stacks), and finally by the split positions.
/// Cells over different essential families are incomparable.
///
/// The comparison refines the product order used by the change-of-basis
/// congruences: a correction term agrees with its leading cell up to some
/// level and is entrywise at most it there, with at least one entry
/// strictly smaller — which this key orders strictly below.
pub fn basis_preorder(
    tree: &RootedPlaneTree,
    a: &CriticalCell,
    b: &CriticalCell,
) -> Option<Ordering> {
    let xs: Vec<VertexId> = a.blocks.iter().map(|blk| blk.x).collect();
    if xs != b.blocks.iter().map(|blk| blk.x).collect::<Vec<_>>() {
        return None;
    }
    let mut order: Vec<VertexId> = interaction_levels(tree, &xs).ok()?.concat();
    // Members reached by no level (possible only off the binary-core
    // setting) compare last, in vertex order.
    for &x in &xs {
        if !order.contains(&x) {
            order.push(x);
        }
    }
    let key = |cell: &CriticalCell| -> Vec<i64> {
        let mut key = vec![cell.k as i64];
        for &x in &order {
            let blk = cell
                .blocks
                .iter()
                .find(|blk| blk.x == x)
                .expect("every family member has a block");
            key.extend(blk.p.iter().chain(blk.q.iter()).map(|&t| t as i64));
        }
        for &x in &order {
            let blk = cell.blocks.iter().find(|blk| blk.x == x).expect("present");
            key.push(blk.split() as i64);
        }
        key
    };
    Some(key(a).cmp(&key(b)))
}

/// One row of the change-of-basis transition: a strongly interacting
/// family, the basis cell its plain product is, and the full expansion of
/// its rebased product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRow {
    pub factors: Vec<InteractionVertex>,
    pub leading: CriticalCell,
    pub entries: Vec<(CriticalCell, Coeff)>,
}

/// Outcome of [`exterior_face_ring_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub n: usize,
    /// Ascending families of generators at pairwise distinct vertices that
    /// were multiplied.
    pub families_checked: usize,
    /// How many of them interact strongly.
    pub strong_families: usize,
    /// One row per strong family.
    pub transition: Vec<TransitionRow>,
    /// The first failed check, if any.
    pub failure: Option<String>,
}

impl CertificateReport {
    pub fn passes(&self) -> bool {
        self.failure.is_none()
    }
}

/// Finds an essential vertex whose branching exceeds the binary-core shape
/// or sits badly in the planar embedding.
fn binary_embedding_check(tree: &RootedPlaneTree) -> Result<()> {
    let essentials = tree.essential_vertices();
    for &x in &essentials {
        let d = tree.degree(x) - 1;
        let carrying: Vec<usize> = (1..=d)
            .filter(|&l| {
                let anchor = tree
                    .direction_vertex(x, l)
                    .expect("child directions exist up to the degree");
                essentials
                    .iter()
                    .any(|&e| tree.is_ancestor_or_self(anchor, e))
            })
            .collect();
        if carrying.len() > 2 {
            return Err(Error::NotBinaryCore { vertex: x });
        }
        if carrying.iter().any(|&l| l + 2 <= d) {
            return Err(Error::NotEmbeddedBinaryCore { vertex: x });
        }
    }
    Ok(())
}

/// Verifies, by exhausting every ascending family of generators at
/// pairwise distinct vertices, that the rebased products present the
/// cohomology ring as the exterior face ring of the interaction complex:
/// a rebased product is nonzero exactly when its family interacts
/// strongly; each strong product expands with coefficient one on the cell
/// the plain product assembles and otherwise only on strictly
/// [`basis_preorder`]-smaller cells; and the strong families biject with
/// the basis cells through that leading term.
///
/// Requires binary essential branching embedded with the carrying
/// directions last.
pub fn exterior_face_ring_certificate(
    tree: &RootedPlaneTree,
    n: usize,
) -> Result<CertificateReport> {
    binary_embedding_check(tree)?;
    let mut grouped: BTreeMap<VertexId, Vec<InteractionVertex>> = BTreeMap::new();
    for v in enumerate_vnt(tree, n) {
        grouped.entry(v.x).or_default().push(v);
    }
    let by_vertex: Vec<(VertexId, Vec<InteractionVertex>)> = grouped.into_iter().collect();
    let mut report = CertificateReport {
        n,
        families_checked: 0,
        strong_families: 0,
        transition: Vec::new(),
        failure: None,
    };
    let mut leads: BTreeSet<CriticalCell> = BTreeSet::new();
    let mut family: Vec<InteractionVertex> = Vec::new();
    check_families(
        tree,
        n,
        &by_vertex,
        0,
        &mut family,
        &mut report,
        &mut leads,
    )?;
    Ok(report)
}

/// Walks every nonempty ascending family and runs the certificate checks.
#[allow(clippy::too_many_arguments)]
fn check_families(
    tree: &RootedPlaneTree,
    n: usize,
    by_vertex: &[(VertexId, Vec<InteractionVertex>)],
    start: usize,
    family: &mut Vec<InteractionVertex>,
    report: &mut CertificateReport,
    leads: &mut BTreeSet<CriticalCell>,
) -> Result<()> {
    for pick in start..by_vertex.len() {
        for v in &by_vertex[pick].1 {
            family.push(v.clone());
            if report.failure.is_none() {
                certify_family(tree, n, family, report, leads)?;
                check_families(tree, n, by_vertex, pick + 1, family, report, leads)?;
            }
            family.pop();
        }
    }
    Ok(())
}

fn certify_family(
    tree: &RootedPlaneTree,
    n: usize,
    family: &[InteractionVertex],
    report: &mut CertificateReport,
    leads: &mut BTreeSet<CriticalCell>,
) -> Result<()> {
    report.families_checked += 1;
    let word: Vec<ChangedGenerator> = family
        .iter()
        .map(|v| ChangedGenerator::rebased(v.clone()))
        .collect();
    let value = evaluate_product(tree, n, &word)?;
    let params = interaction_params(tree, n, family)?;
    let fail = |detail: String| -> String {
        let mut text = String::from("family");
        for v in family {
            text.push_str(&format!(" {v}"));
        }
        format!("{text}: {detail}")
    };
    if params.classify() != Interaction::Strong {
        if !value.is_zero() {
            report.failure = Some(fail(format!(
                "non-strong rebased product has {} terms",
                value.support_len()
            )));
        }
        return Ok(());
    }
    report.strong_families += 1;
    let leading = multiply_strong(tree, n, family)?;
    if value.get(&leading) != 1 {
        report.failure = Some(fail(format!(
            "leading coefficient on {leading} is {}",
            value.get(&leading)
        )));
        return Ok(());
    }
    for (cell, _) in value.iter() {
        if cell != &leading && basis_preorder(tree, cell, &leading) != Some(Ordering::Less) {
            report.failure = Some(fail(format!("{cell} does not precede {leading}")));
            return Ok(());
        }
    }
    if !leads.insert(leading.clone()) {
        report.failure = Some(fail(format!("{leading} leads two strong products")));
        return Ok(());
    }
    if factorize_basis(tree, n, &leading)? != family {
        report.failure = Some(fail(format!("{leading} factorizes into another family")));
        return Ok(());
    }
    report.transition.push(TransitionRow {
        factors: family.to_vec(),
        leading,
        entries: value.iter().map(|(c, &a)| (c.clone(), a)).collect(),
    });
    Ok(())
}

/// A right-angled Artin presentation: the degree-one generators, and the
/// pairs of generator indices whose group elements commute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaagPresentation {
    pub generators: Vec<InteractionVertex>,
    pub commuting: Vec<(usize, usize)>,
}

/// Presents the braid group of a linear binary tree — every essential
/// vertex of degree three, each next essential vertex inside the previous
/// one's last direction — as a right-angled Artin group: one generator per
/// degree-one basis element, and a commuting pair exactly when the lower
/// generator's far stack and the upper one's root stack jointly cover all
/// `n` points.
pub fn raag_presentation(tree: &RootedPlaneTree, n: usize) -> Result<RaagPresentation> {
    let essentials = tree.essential_vertices();
    for &x in &essentials {
        if tree.degree(x) != 3 {
            return Err(Error::NotLinearBinary { vertex: x });
        }
    }
    for pair in essentials.windows(2) {
        let (upper, lower) = (pair[0], pair[1]);
        if !tree.is_ancestor_or_self(upper, lower) {
            return Err(Error::NotLinearBinary { vertex: lower });
        }
        let last = tree.direction_vertex(upper, 2)?;
        if !tree.is_ancestor_or_self(last, lower) {
            return Err(Error::NotLinearBinary { vertex: upper });
        }
    }
    let generators = enumerate_vnt(tree, n);
    let mut commuting = Vec::new();
    for i in 0..generators.len() {
        for j in (i + 1)..generators.len() {
            if generators[i].x < generators[j].x
                && generators[i].q[0] + generators[j].k >= n as u32
            {
                commuting.push((i, j));
            }
        }
    }
    Ok(RaagPresentation {
        generators,
        commuting,
    })
}
