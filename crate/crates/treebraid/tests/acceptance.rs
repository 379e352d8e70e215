//! The acceptance battery. Nine independent checks cover the whole
//! pipeline: the worked product examples in both models, vanishing of the
//! Morse coboundary, critical-cell counts against Smith normal form, the
//! exhaustive product oracle, the weak correction sums, the changed-basis
//! transition matrix, the right-angled Artin presentations, and the
//! cross-model consistency battery. Each check prints one PASS line; run
//! with `--nocapture` to see them.

use std::collections::BTreeSet;

use treebraid::config::OracleChoice;
use treebraid::harness::{conf_product_oracle, orbit_product_oracle, verify_all};
use treebraid_core::cube::{CochainVec, Ingredient, Model};
use treebraid_core::interaction::{
    classify_interaction, enumerate_vnt, is_face, knt_faces, Interaction, InteractionVertex,
};
use treebraid_core::morse::{
    build_conf_complex, build_orbit_complex, enumerate_critical, CellBlock, CriticalCell,
    MorseCochain,
};
use treebraid_core::ring::{
    basis_preorder, evaluate_product, exterior_face_ring_certificate, factorize_basis,
    multiply_strong, product_cocycle_blocks, raag_presentation, ChangedGenerator,
};
use treebraid_core::snf::integral_cohomology;
use treebraid_core::tree::{build_tree, RootedPlaneTree};
use treebraid_core::{Coeff, VertexId};

const BUDGET: u64 = 4_000_000;

// -- fixtures ---------------------------------------------------------------

fn tree_from(children: &[&[usize]]) -> RootedPlaneTree {
    let lists: Vec<Vec<usize>> = children.iter().map(|c| c.to_vec()).collect();
    build_tree(0, &lists).expect("valid fixture").tree
}

/// One essential vertex, two leaf branches.
fn wye() -> RootedPlaneTree {
    tree_from(&[&[1], &[2, 3], &[], &[]])
}

/// Four essential vertices 1, 3, 4, 7; vertex 3 carries 4 and 7.
fn t0() -> RootedPlaneTree {
    tree_from(&[
        &[1],
        &[2, 3],
        &[],
        &[4, 7],
        &[5, 6],
        &[],
        &[],
        &[8, 9],
        &[],
        &[],
    ])
}

/// Linear binary tree with two essential vertices.
fn lb2() -> RootedPlaneTree {
    tree_from(&[&[1], &[2, 3], &[], &[4, 5], &[], &[]])
}

/// Linear binary tree with three essential vertices.
fn lb3() -> RootedPlaneTree {
    tree_from(&[&[1], &[2, 3], &[], &[4, 5], &[], &[6, 7], &[], &[]])
}

/// Caterpillar whose lower essential vertex hangs off the FIRST direction.
fn caterpillar() -> RootedPlaneTree {
    tree_from(&[&[1], &[2, 5], &[3, 4], &[], &[], &[]])
}

/// Degree-four head with the essential child in the first of three
/// directions: weak interactions with two far directions.
fn deg4() -> RootedPlaneTree {
    tree_from(&[&[1], &[2, 5, 6], &[3, 4], &[], &[], &[], &[]])
}

// -- small constructors -----------------------------------------------------

fn gen(k: u32, x: VertexId, p: &[u32], q: &[u32]) -> InteractionVertex {
    InteractionVertex {
        k,
        x,
        p: p.to_vec(),
        q: q.to_vec(),
    }
}

fn cell(k: u32, blocks: &[(VertexId, &[u32], &[u32])]) -> CriticalCell {
    CriticalCell {
        k,
        blocks: blocks
            .iter()
            .map(|&(x, p, q)| CellBlock {
                x,
                p: p.to_vec(),
                q: q.to_vec(),
            })
            .collect(),
    }
}

fn raw_word(gens: &[InteractionVertex]) -> Vec<ChangedGenerator> {
    gens.iter().cloned().map(ChangedGenerator::raw).collect()
}

fn single(cell: CriticalCell, coeff: Coeff) -> MorseCochain {
    CochainVec::from_entries([(cell, coeff)])
}

/// Carries a generator over to the subdivided tree: essential vertices
/// match up through the depth-first order.
fn relabel(raw: &RootedPlaneTree, fat: &RootedPlaneTree, g: &InteractionVertex) -> InteractionVertex {
    let raw_ess = raw.essential_vertices();
    let fat_ess = fat.essential_vertices();
    let position = raw_ess
        .iter()
        .position(|&v| v == g.x)
        .expect("generator sits at an essential vertex");
    InteractionVertex {
        x: fat_ess[position],
        ..g.clone()
    }
}

/// The top dimension with critical cells.
fn top_critical_dim(fat: &RootedPlaneTree, n: usize) -> usize {
    let mut m = 0;
    while !enumerate_critical(fat, n, m + 1)
        .expect("enumeration succeeds on sufficient trees")
        .is_empty()
    {
        m += 1;
    }
    m
}

// -- the nine checks --------------------------------------------------------

/// On the ten-vertex tree with four points, the three displayed generators
/// multiply pairwise into single basis elements and their triple product is
/// exactly zero — by the closed formulas and by the cubical machinery on
/// the subdivided tree.
#[test]
fn check_1_pairwise_products_collapse_and_the_triple_vanishes_in_both_models() {
    let raw = t0();
    let n = 4;
    let u = gen(0, 1, &[1], &[2]);
    let v = gen(2, 4, &[1], &[0]);
    let w = gen(2, 7, &[1], &[0]);

    // Closed formulas on the tree as given.
    let pair = |a: &InteractionVertex, b: &InteractionVertex| {
        evaluate_product(&raw, n, &raw_word(&[a.clone(), b.clone()])).expect("pair evaluates")
    };
    assert_eq!(
        pair(&u, &v),
        single(cell(0, &[(1, &[1], &[0]), (4, &[1], &[0])]), 1)
    );
    assert_eq!(
        pair(&u, &w),
        single(cell(0, &[(1, &[1], &[0]), (7, &[1], &[0])]), 1)
    );
    assert_eq!(
        pair(&v, &w),
        single(cell(0, &[(4, &[1], &[0]), (7, &[1], &[0])]), 1)
    );
    let triple = evaluate_product(&raw, n, &raw_word(&[u.clone(), v.clone(), w.clone()]))
        .expect("triple evaluates");
    assert!(triple.is_zero());

    // The cubical oracle on the subdivided tree, gradient-flowed back to
    // the critical basis, must agree coefficientwise.
    let fat = raw.subdivide_for(n);
    let complex = build_orbit_complex(&fat, n, 3, BUDGET).expect("complex fits the budget");
    let fu = relabel(&raw, &fat, &u);
    let fv = relabel(&raw, &fat, &v);
    let fw = relabel(&raw, &fat, &w);
    for pair in [[&fu, &fv], [&fu, &fw], [&fv, &fw]] {
        let gens: Vec<InteractionVertex> = pair.iter().map(|g| (*g).clone()).collect();
        let by_formula =
            evaluate_product(&fat, n, &raw_word(&gens)).expect("pair evaluates on the fat tree");
        let by_oracle =
            orbit_product_oracle(&complex, &fat, n, &gens).expect("oracle projects the pair");
        assert_eq!(by_formula, by_oracle, "pair at {:?}", (pair[0].x, pair[1].x));
        assert_eq!(by_oracle.iter().count(), 1, "a single basis element");
    }
    let triple_gens = vec![fu, fv, fw];
    let by_oracle =
        orbit_product_oracle(&complex, &fat, n, &triple_gens).expect("oracle projects the triple");
    assert!(by_oracle.is_zero(), "the cubical triple product vanishes");
    println!("PASS: pairwise products collapse to basis elements and the triple vanishes in both models");
}

/// With nine points on the same tree, the four displayed generators
/// multiply strongly into one basis element with coefficient +1; the
/// block-assembled cocycle representing that product is structurally sound
/// even where projecting it is out of budget.
#[test]
fn check_2_the_nine_point_strong_product_is_a_single_basis_element() {
    let raw = t0();
    let n = 9;
    let family = [
        gen(0, 1, &[1], &[7]),
        gen(2, 3, &[4], &[2]),
        gen(6, 4, &[1], &[1]),
        gen(7, 7, &[1], &[0]),
    ];
    assert_eq!(
        classify_interaction(&raw, n, &family).expect("classifies"),
        Interaction::Strong
    );
    let expected = cell(
        0,
        &[
            (1, &[1], &[0]),
            (3, &[1], &[0]),
            (4, &[1], &[1]),
            (7, &[1], &[0]),
        ],
    );
    assert_eq!(
        multiply_strong(&raw, n, &family).expect("strong product"),
        expected
    );
    let product =
        evaluate_product(&raw, n, &raw_word(&family)).expect("the word evaluates");
    assert_eq!(product, single(expected, 1));

    // The block cocycle on the 9-sufficient subdivision: supported in the
    // right dimension, all coefficients +1, one locked edge per factor.
    let fat = raw.subdivide_for(n);
    let fat_family: Vec<InteractionVertex> =
        family.iter().map(|g| relabel(&raw, &fat, g)).collect();
    let blocks =
        product_cocycle_blocks(&fat, n, &fat_family).expect("the block cocycle assembles");
    assert!(!blocks.is_zero());
    let fat_xs: Vec<VertexId> = fat_family.iter().map(|g| g.x).collect();
    for (cube, &coeff) in blocks.iter() {
        assert_eq!(coeff, 1);
        let edges: Vec<(VertexId, VertexId)> = cube
            .ingredients()
            .iter()
            .filter_map(|g| match g {
                Ingredient::Edge(a, b) => Some((*a, *b)),
                Ingredient::Vertex(_) => None,
            })
            .collect();
        assert_eq!(edges.len(), family.len(), "one edge per factor");
        for &x in &fat_xs {
            assert!(
                edges.iter().any(|&(a, _)| a == x),
                "an edge hangs off essential vertex {x}"
            );
        }
    }

    // Where the budget does allow a projection (four points), the block
    // cocycle and the closed formulas agree through the gradient flow.
    let small_n = 4;
    let small_fat = raw.subdivide_for(small_n);
    let small_complex =
        build_orbit_complex(&small_fat, small_n, 2, BUDGET).expect("complex fits the budget");
    let small_pairs = [
        [gen(0, 1, &[1], &[2]), gen(2, 4, &[1], &[0])],
        [gen(0, 1, &[1], &[2]), gen(2, 7, &[1], &[0])],
        [gen(2, 4, &[1], &[0]), gen(2, 7, &[1], &[0])],
    ];
    for pair in &small_pairs {
        let fat_pair: Vec<InteractionVertex> =
            pair.iter().map(|g| relabel(&raw, &small_fat, g)).collect();
        let cochain = product_cocycle_blocks(&small_fat, small_n, &fat_pair)
            .expect("block cocycle");
        let projected = small_complex
            .to_morse_basis(&small_fat, &cochain, 2)
            .expect("projects");
        let direct = evaluate_product(&small_fat, small_n, &raw_word(&fat_pair))
            .expect("evaluates");
        assert_eq!(projected, direct);
    }
    println!("PASS: the nine-point strong product is one basis element with coefficient +1, and its block cocycle is sound");
}

/// The gradient field leaves no critical cell with a coboundary: the Morse
/// complex of the unordered model has zero differential everywhere.
#[test]
fn check_3_the_morse_coboundary_vanishes_on_every_critical_cell() {
    let instances: [(&str, RootedPlaneTree, usize); 4] = [
        ("wye n=2", wye(), 2),
        ("wye n=3", wye(), 3),
        ("linear-binary-2 n=3", lb2(), 3),
        ("ten-vertex n=3", t0(), 3),
    ];
    let mut checked = 0usize;
    for (label, tree, n) in instances {
        let fat = tree.subdivide_for(n);
        let m_max = top_critical_dim(&fat, n);
        let complex =
            build_orbit_complex(&fat, n, m_max + 1, BUDGET).expect("complex fits the budget");
        for d in 0..=m_max {
            for cube in complex.critical_cells(d) {
                assert!(
                    complex.morse_coboundary(cube).is_zero(),
                    "{label}: nonzero coboundary in dimension {d}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    println!("PASS: the Morse coboundary vanishes on all {checked} critical cells across four instances");
}

/// Critical cells are a basis: in every degree their count equals the
/// cohomology rank computed by Smith normal form, with no torsion.
#[test]
fn check_4_critical_cell_counts_equal_torsion_free_cohomology_ranks() {
    let instances: [(&str, RootedPlaneTree, usize); 4] = [
        ("wye n=2", wye(), 2),
        ("wye n=3", wye(), 3),
        ("linear-binary-2 n=3", lb2(), 3),
        ("ten-vertex n=3", t0(), 3),
    ];
    for (label, tree, n) in instances {
        let fat = tree.subdivide_for(n);
        let cohomology =
            integral_cohomology(&fat, n, Model::Unordered, BUDGET).expect("ranks compute");
        for (d, factors) in cohomology.torsion.iter().enumerate() {
            assert!(factors.is_empty(), "{label}: torsion in degree {d}");
        }
        let top = top_critical_dim(&fat, n);
        for d in 0..=top.max(cohomology.betti.len().saturating_sub(1)) {
            let count = enumerate_critical(&fat, n, d).expect("enumerates").len();
            let rank = cohomology.betti.get(d).copied().unwrap_or(0);
            assert_eq!(count, rank, "{label}: degree {d}");
        }
    }
    println!("PASS: critical cell counts equal torsion-free cohomology ranks in every degree on four instances");
}

/// The closed formulas agree with the full cochain pipeline — restrict a
/// representative to the ordered model, cup there, flow back — for every
/// ordered pair and triple of generators on two instances, and on single
/// constructed instances of each interaction class.
#[test]
fn check_5_products_match_the_ordered_oracle_for_all_pairs_and_triples() {
    let mut class_seen = BTreeSet::new();
    let mut words_checked = 0usize;
    for (tree, n) in [(wye(), 3), (lb2(), 3)] {
        let fat = tree.subdivide_for(n);
        let complex = build_conf_complex(&fat, n, 3, BUDGET).expect("complex fits the budget");
        let vnt = enumerate_vnt(&fat, n);
        let mut words: Vec<Vec<InteractionVertex>> = Vec::new();
        for a in &vnt {
            for b in &vnt {
                words.push(vec![a.clone(), b.clone()]);
            }
        }
        for a in &vnt {
            for b in &vnt {
                for c in &vnt {
                    words.push(vec![a.clone(), b.clone(), c.clone()]);
                }
            }
        }
        for word in words {
            let by_formula =
                evaluate_product(&fat, n, &raw_word(&word)).expect("formula evaluates");
            let by_oracle =
                conf_product_oracle(&complex, &fat, n, &word).expect("oracle projects");
            assert_eq!(by_formula, by_oracle, "word {word:?}");
            words_checked += 1;
            if word.windows(2).all(|p| p[0].x < p[1].x) {
                class_seen.insert(format!(
                    "{:?}",
                    classify_interaction(&fat, n, &word).expect("classifies")
                ));
            }
        }
    }

    // A strong pair, projected through the ordered model.
    let raw = lb2();
    let n = 4;
    let fat = raw.subdivide_for(n);
    let strong_pair = vec![
        relabel(&raw, &fat, &gen(0, 1, &[1], &[2])),
        relabel(&raw, &fat, &gen(2, 3, &[1], &[0])),
    ];
    assert_eq!(
        classify_interaction(&fat, n, &strong_pair).expect("classifies"),
        Interaction::Strong
    );
    let complex = build_conf_complex(&fat, n, 2, BUDGET).expect("complex fits the budget");
    let by_formula =
        evaluate_product(&fat, n, &raw_word(&strong_pair)).expect("formula evaluates");
    let by_oracle =
        conf_product_oracle(&complex, &fat, n, &strong_pair).expect("oracle projects");
    assert_eq!(by_formula, by_oracle);
    assert_eq!(by_formula.iter().count(), 1);
    class_seen.insert("Strong".into());

    // A weak pair on the caterpillar whose essential child sits in a
    // non-final direction, outside the planarity assumption behind the
    // strong form: the corrected formula and the oracle agree.
    let raw = deg4();
    let n = 4;
    let fat = raw.subdivide_for(n);
    let weak_pair = vec![
        relabel(&raw, &fat, &gen(0, 1, &[2], &[0, 1])),
        relabel(&raw, &fat, &gen(2, 2, &[1], &[0])),
    ];
    assert_eq!(
        classify_interaction(&fat, n, &weak_pair).expect("classifies"),
        Interaction::Weak
    );
    let complex = build_conf_complex(&fat, n, 2, BUDGET).expect("complex fits the budget");
    let by_formula =
        evaluate_product(&fat, n, &raw_word(&weak_pair)).expect("formula evaluates");
    let by_oracle =
        conf_product_oracle(&complex, &fat, n, &weak_pair).expect("oracle projects");
    assert_eq!(by_formula, by_oracle);
    assert!(!by_formula.is_zero(), "the weak witness is a nonzero product");
    class_seen.insert("Weak".into());

    assert!(class_seen.contains("Strong"));
    assert!(class_seen.contains("Weak"));
    assert!(class_seen.contains("None"));
    println!(
        "PASS: {words_checked} exhaustive ordered words match the ordered-model oracle, covering Strong, Weak, and None"
    );
}

/// The weak product corrections: with two far directions all three
/// correction sums contribute and match the cubical oracle; with one far
/// direction the result collapses to one straight trade per composition.
#[test]
fn check_6_weak_corrections_match_the_oracle_and_collapse_when_one_far_direction() {
    let raw = deg4();

    // Two far directions, four points: the trade-through-the-split sum
    // fires alone and flips the sign.
    let n = 4;
    let borrow_pair = [gen(0, 1, &[2], &[0, 1]), gen(2, 2, &[1], &[0])];
    assert_eq!(
        classify_interaction(&raw, n, &borrow_pair).expect("classifies"),
        Interaction::Weak
    );
    let by_formula =
        evaluate_product(&raw, n, &raw_word(&borrow_pair)).expect("formula evaluates");
    assert_eq!(
        by_formula,
        single(cell(0, &[(1, &[0, 1], &[0]), (2, &[1], &[0])]), -1)
    );
    let fat = raw.subdivide_for(n);
    let complex = build_orbit_complex(&fat, n, 2, BUDGET).expect("complex fits the budget");
    let fat_pair: Vec<InteractionVertex> =
        borrow_pair.iter().map(|g| relabel(&raw, &fat, g)).collect();
    assert_eq!(
        evaluate_product(&fat, n, &raw_word(&fat_pair)).expect("evaluates"),
        orbit_product_oracle(&complex, &fat, n, &fat_pair).expect("projects")
    );

    // Five points keep a spare point at the root, so all three sums
    // contribute: five terms with mixed signs.
    let n = 5;
    let full_pair = [gen(1, 1, &[2], &[0, 1]), gen(3, 2, &[1], &[0])];
    let by_formula =
        evaluate_product(&raw, n, &raw_word(&full_pair)).expect("formula evaluates");
    let with_head = |k: u32, p: &[u32], q: &[u32]| {
        cell(k, &[(1, p, q), (2, &[1], &[0])])
    };
    assert_eq!(
        by_formula,
        CochainVec::from_entries([
            (with_head(0, &[1], &[0, 1]), -1),
            (with_head(0, &[0, 1], &[1]), 1),
            (with_head(1, &[0, 1], &[0]), -1),
            (with_head(0, &[0, 2], &[0]), -1),
            (with_head(0, &[1, 1], &[0]), -1),
        ])
    );
    let fat = raw.subdivide_for(n);
    let complex = build_orbit_complex(&fat, n, 2, BUDGET).expect("complex fits the budget");
    let fat_pair: Vec<InteractionVertex> =
        full_pair.iter().map(|g| relabel(&raw, &fat, g)).collect();
    assert_eq!(
        evaluate_product(&fat, n, &raw_word(&fat_pair)).expect("evaluates"),
        orbit_product_oracle(&complex, &fat, n, &fat_pair).expect("projects")
    );

    // One far direction: only the straight trades remain, one per
    // composition of the moved points.
    let n = 4;
    let reduced_pair = [gen(1, 1, &[2, 0], &[0]), gen(2, 2, &[1], &[0])];
    let by_formula =
        evaluate_product(&raw, n, &raw_word(&reduced_pair)).expect("formula evaluates");
    assert_eq!(
        by_formula,
        CochainVec::from_entries([
            (cell(0, &[(1, &[1, 0], &[0]), (2, &[1], &[0])]), -1),
            (cell(0, &[(1, &[0, 1], &[0]), (2, &[1], &[0])]), -1),
        ])
    );
    let fat = raw.subdivide_for(n);
    let complex = build_orbit_complex(&fat, n, 2, BUDGET).expect("complex fits the budget");
    let fat_pair: Vec<InteractionVertex> =
        reduced_pair.iter().map(|g| relabel(&raw, &fat, g)).collect();
    assert_eq!(
        evaluate_product(&fat, n, &raw_word(&fat_pair)).expect("evaluates"),
        orbit_product_oracle(&complex, &fat, n, &fat_pair).expect("projects")
    );

    // The caterpillar with one far direction at the head: the single
    // correction term, confirmed in the unordered model too.
    let cat = caterpillar();
    let n = 4;
    let cat_pair = [gen(1, 1, &[2], &[0]), gen(2, 2, &[1], &[0])];
    let by_formula =
        evaluate_product(&cat, n, &raw_word(&cat_pair)).expect("formula evaluates");
    assert_eq!(
        by_formula,
        single(cell(0, &[(1, &[1], &[0]), (2, &[1], &[0])]), -1)
    );
    let fat = cat.subdivide_for(n);
    let complex = build_orbit_complex(&fat, n, 2, BUDGET).expect("complex fits the budget");
    let fat_pair: Vec<InteractionVertex> =
        cat_pair.iter().map(|g| relabel(&cat, &fat, g)).collect();
    assert_eq!(
        evaluate_product(&fat, n, &raw_word(&fat_pair)).expect("evaluates"),
        orbit_product_oracle(&complex, &fat, n, &fat_pair).expect("projects")
    );
    println!("PASS: weak corrections match the unordered oracle with two far directions and collapse with one");
}

/// On a linear binary tree the changed basis makes the ring an exterior
/// face ring: strong products are unitriangular over the critical basis and
/// every non-strong ordered product of changed generators vanishes.
#[test]
fn check_7_the_changed_basis_transition_is_unitriangular_on_linear_binary_trees() {
    let tree = lb2();
    for n in [2usize, 3, 4] {
        let report =
            exterior_face_ring_certificate(&tree, n).expect("the certificate applies");
        assert!(report.passes(), "n={n}: {:?}", report.failure);
        assert!(report.families_checked > 0);
        // Re-verify unitriangularity row by row through the public order.
        for row in &report.transition {
            let leading_coeff = row
                .entries
                .iter()
                .find(|(c, _)| c == &row.leading)
                .map(|&(_, a)| a);
            assert_eq!(leading_coeff, Some(1), "n={n}: leading coefficient");
            for (cell, _) in &row.entries {
                if cell != &row.leading {
                    assert_eq!(
                        basis_preorder(&tree, cell, &row.leading),
                        Some(std::cmp::Ordering::Less),
                        "n={n}: corrections rank strictly below the leading cell"
                    );
                }
            }
        }
        // Every non-strong ordered pair of changed generators is zero.
        let vnt = enumerate_vnt(&tree, n);
        for a in &vnt {
            for b in &vnt {
                let ascending = if a.x < b.x {
                    vec![a.clone(), b.clone()]
                } else if b.x < a.x {
                    vec![b.clone(), a.clone()]
                } else {
                    let product = evaluate_product(
                        &tree,
                        n,
                        &[
                            ChangedGenerator::rebased(a.clone()),
                            ChangedGenerator::rebased(b.clone()),
                        ],
                    )
                    .expect("evaluates");
                    assert!(product.is_zero(), "n={n}: same-vertex products vanish");
                    continue;
                };
                if classify_interaction(&tree, n, &ascending).expect("classifies")
                    != Interaction::Strong
                {
                    let product = evaluate_product(
                        &tree,
                        n,
                        &[
                            ChangedGenerator::rebased(a.clone()),
                            ChangedGenerator::rebased(b.clone()),
                        ],
                    )
                    .expect("evaluates");
                    assert!(
                        product.is_zero(),
                        "n={n}: non-strong product of {a:?} and {b:?}"
                    );
                }
            }
        }
        // The strong families the certificate saw are exactly the faces of
        // the interaction complex.
        let faces = knt_faces(&tree, n, 3).expect("faces enumerate");
        let strong_total: usize = faces.iter().map(|layer| layer.len()).sum();
        assert_eq!(report.strong_families, strong_total, "n={n}");
    }
    println!("PASS: the changed-basis transition is unitriangular and non-strong products vanish for n = 2, 3, 4");
}

/// Linear binary braid groups are right-angled Artin groups: one generator
/// per degree-one basis element, and commutation exactly along the
/// 1-simplices of the interaction complex, by the far-stack rule.
#[test]
fn check_8_linear_binary_braid_groups_present_as_right_angled_artin_groups() {
    for (label, tree) in [("two essentials", lb2()), ("three essentials", lb3())] {
        for n in [2usize, 3] {
            let presentation =
                raag_presentation(&tree, n).expect("linear binary trees present");
            let vnt = enumerate_vnt(&tree, n);
            assert_eq!(
                presentation.generators.len(),
                vnt.len(),
                "{label} n={n}: one generator per degree-one basis element"
            );
            assert_eq!(presentation.generators, vnt);

            // The far-stack rule reproduces the commuting set…
            let by_rule: BTreeSet<(usize, usize)> = (0..vnt.len())
                .flat_map(|i| (i + 1..vnt.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    vnt[i].x < vnt[j].x && vnt[i].q[0] + vnt[j].k >= n as u32
                })
                .collect();
            let commuting: BTreeSet<(usize, usize)> =
                presentation.commuting.iter().copied().collect();
            assert_eq!(commuting, by_rule, "{label} n={n}");

            // …and both sides agree with the face predicate, pair by pair.
            for i in 0..vnt.len() {
                for j in i + 1..vnt.len() {
                    if vnt[i].x == vnt[j].x {
                        continue;
                    }
                    let ascending = if vnt[i].x < vnt[j].x {
                        vec![vnt[i].clone(), vnt[j].clone()]
                    } else {
                        vec![vnt[j].clone(), vnt[i].clone()]
                    };
                    assert_eq!(
                        is_face(&tree, n, &ascending).expect("the predicate applies"),
                        commuting.contains(&(i, j)),
                        "{label} n={n}: pair ({i}, {j})"
                    );
                }
            }

            // …and the commuting pairs are exactly the 1-simplices.
            let edges: BTreeSet<Vec<InteractionVertex>> = knt_faces(&tree, n, 1)
                .expect("faces enumerate")
                .get(1)
                .cloned()
                .unwrap_or_default()
                .into_iter()
                .collect();
            let commuting_families: BTreeSet<Vec<InteractionVertex>> = commuting
                .iter()
                .map(|&(i, j)| vec![vnt[i].clone(), vnt[j].clone()])
                .collect();
            assert_eq!(commuting_families, edges, "{label} n={n}");
        }
    }
    println!("PASS: right-angled Artin presentations match the interaction complex on linear binary trees");
}

/// The consistency battery: double coboundaries vanish, the Leibniz rule
/// holds, the Morse coboundary is zero, counts equal ranks, factorization
/// round-trips, the trichotomy matches the complex, products match both
/// oracles — plus exhaustive anticommutativity and sampled associativity.
#[test]
fn check_9_the_consistency_battery_passes_on_every_suite_instance() {
    let suite: [(&str, RootedPlaneTree, usize); 4] = [
        ("wye n=2", wye(), 2),
        ("wye n=3", wye(), 3),
        ("linear-binary-2 n=3", lb2(), 3),
        ("ten-vertex n=3", t0(), 3),
    ];
    for (label, tree, n) in &suite {
        let report = verify_all(tree, *n, OracleChoice::Both, BUDGET);
        assert!(
            report.budget_hit.is_none(),
            "{label}: {:?}",
            report.budget_hit
        );
        for check in &report.checks {
            assert!(
                check.pass,
                "{label}: {} — {} {:?}",
                check.name, check.detail, check.witness
            );
        }
        assert_eq!(report.exit_code(), 0, "{label}");
    }

    // Graded anticommutativity, exhaustively over generator pairs.
    let mut pairs = 0usize;
    for (_, tree, n) in &suite {
        let vnt = enumerate_vnt(tree, *n);
        for a in &vnt {
            for b in &vnt {
                let ab =
                    evaluate_product(tree, *n, &raw_word(&[a.clone(), b.clone()]))
                        .expect("evaluates");
                let ba =
                    evaluate_product(tree, *n, &raw_word(&[b.clone(), a.clone()]))
                        .expect("evaluates");
                assert_eq!(ba, ab.scaled(-1));
                pairs += 1;
            }
        }
    }

    // Associativity on sampled triples: refolding the left product against
    // the third factor, or the right product under the first, lands on the
    // same element as the flat word.
    let tree = t0();
    let n = 5;
    let vnt = enumerate_vnt(&tree, n);
    let picks: Vec<&InteractionVertex> = vnt.iter().step_by(vnt.len() / 6 + 1).collect();
    let mut triples = 0usize;
    let multiply_right = |element: &MorseCochain, g: &InteractionVertex| -> MorseCochain {
        let mut acc: MorseCochain = CochainVec::new();
        for (cell, &coeff) in element.iter() {
            let mut word = factorize_basis(&tree, n, cell).expect("basis cells factor");
            word.push(g.clone());
            acc.add_cochain(&evaluate_product(&tree, n, &raw_word(&word))
                .expect("evaluates")
                .scaled(coeff));
        }
        acc
    };
    let multiply_left = |g: &InteractionVertex, element: &MorseCochain| -> MorseCochain {
        let mut acc: MorseCochain = CochainVec::new();
        for (cell, &coeff) in element.iter() {
            let mut word = vec![g.clone()];
            word.extend(factorize_basis(&tree, n, cell).expect("basis cells factor"));
            acc.add_cochain(&evaluate_product(&tree, n, &raw_word(&word))
                .expect("evaluates")
                .scaled(coeff));
        }
        acc
    };
    for a in &picks {
        for b in &picks {
            for c in &picks {
                let flat = evaluate_product(
                    &tree,
                    n,
                    &raw_word(&[(*a).clone(), (*b).clone(), (*c).clone()]),
                )
                .expect("evaluates");
                let ab = evaluate_product(&tree, n, &raw_word(&[(*a).clone(), (*b).clone()]))
                    .expect("evaluates");
                let bc = evaluate_product(&tree, n, &raw_word(&[(*b).clone(), (*c).clone()]))
                    .expect("evaluates");
                assert_eq!(multiply_right(&ab, c), flat, "(ab)c");
                assert_eq!(multiply_left(a, &bc), flat, "a(bc)");
                triples += 1;
            }
        }
    }
    assert!(triples > 0);
    println!(
        "PASS: the consistency battery holds on all suite instances ({pairs} anticommuting pairs, {triples} associative triples)"
    );
}
