//! The verification harness: an orchestrated battery of consistency checks
//! pitting the closed product formulas against the cubical machinery on one
//! instance.
//!
//! Checks run in a fixed order — coboundary squares to zero, the cochain
//! Leibniz rule, Morse-coboundary vanishing on critical cells, critical
//! counts against integral cohomology ranks (torsion-free), factorization
//! round-trips, the interaction trichotomy against complex membership,
//! product agreement with the configured oracles, and the exterior face
//! ring certificate where the tree qualifies. Each check reports pass or
//! fail with a witnessing payload; a budget overrun aborts the remainder
//! and reports what completed.

use serde_json::{json, Value};

use treebraid_core::cube::{
    coboundary_conf, coboundary_orbit, cup, orientation_conversion_sign, CochainVec, ConfCube,
    Ingredient, Model, OrbitCube, Orientation,
};
use treebraid_core::interaction::{
    classify_interaction, enumerate_vnt, is_face, knt_faces, Interaction, InteractionVertex,
};
use treebraid_core::morse::{
    build_conf_complex, build_orbit_complex, cocycle_rep_1dim, cocycle_rep_1dim_orbit,
    enumerate_critical, CriticalCell, MorseCochain, MorseComplex,
};
use treebraid_core::ring::{
    evaluate_product, exterior_face_ring_certificate, factorize_basis, product_cocycle_blocks,
    ChangedGenerator,
};
use treebraid_core::snf::integral_cohomology;
use treebraid_core::tree::RootedPlaneTree;
use treebraid_core::{Coeff, Error};

use crate::config::OracleChoice;

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub skipped: bool,
    pub detail: String,
    pub witness: Option<Value>,
}

impl Check {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            pass: true,
            skipped: false,
            detail: detail.into(),
            witness: None,
        }
    }

    fn fail(name: &'static str, detail: impl Into<String>, witness: Value) -> Self {
        Check {
            name,
            pass: false,
            skipped: false,
            detail: detail.into(),
            witness: Some(witness),
        }
    }

    fn skip(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            pass: true,
            skipped: true,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "name": self.name,
            "pass": self.pass,
            "skipped": self.skipped,
            "detail": self.detail,
        });
        if let Some(w) = &self.witness {
            v["witness"] = w.clone();
        }
        v
    }
}

/// The assembled report of one `verify` run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub n: usize,
    pub checks: Vec<Check>,
    /// Set when a budget overrun cut the run short, with the failing stage.
    pub budget_hit: Option<String>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The process exit code the report calls for: budget overruns trump
    /// failures, failures trump success.
    pub fn exit_code(&self) -> i32 {
        if self.budget_hit.is_some() {
            2
        } else if self.all_pass() {
            0
        } else {
            3
        }
    }
}

fn ingredient_value(g: &Ingredient) -> Value {
    match g {
        Ingredient::Vertex(v) => json!(["v", v]),
        Ingredient::Edge(x, y) => json!(["e", x, y]),
    }
}

fn conf_value(c: &ConfCube) -> Value {
    Value::Array(c.coordinates().iter().map(ingredient_value).collect())
}

fn orbit_value(c: &OrbitCube) -> Value {
    Value::Array(c.ingredients().iter().map(ingredient_value).collect())
}

pub fn cell_value(cell: &CriticalCell) -> Value {
    json!({
        "k": cell.k,
        "blocks": cell.blocks.iter().map(|b| json!({
            "x": b.x,
            "p": b.p,
            "q": b.q,
        })).collect::<Vec<_>>(),
    })
}

pub fn generator_value(v: &InteractionVertex) -> Value {
    json!({ "k": v.k, "x": v.x, "p": v.p, "q": v.q })
}

fn cochain_value(z: &MorseCochain) -> Value {
    Value::Array(
        z.iter()
            .map(|(c, &a)| json!({ "cell": cell_value(c), "coeff": a }))
            .collect(),
    )
}

/// Every `stride`-th element, so big layers are sampled deterministically.
fn sampled<T>(items: &[T], cap: usize) -> impl Iterator<Item = &T> {
    let stride = (items.len() / cap.max(1)).max(1);
    items.iter().step_by(stride).take(cap)
}

/// A cell-level pairing of ordered-model cubes, as [`cup`] or a deliberate
/// corruption of it.
pub type CellPairing<'a> = &'a dyn Fn(&ConfCube, &ConfCube) -> Option<(ConfCube, Coeff)>;

/// Cup product of two ordered-model cochains through an exchangeable
/// cell-level pairing; used by the Leibniz check so a deliberately corrupted
/// pairing can be swapped in.
pub fn cup_fold_with(
    z: &CochainVec<ConfCube>,
    w: &CochainVec<ConfCube>,
    cup_cell: CellPairing,
) -> CochainVec<ConfCube> {
    let mut out = CochainVec::new();
    for (c, &a) in z.iter() {
        for (d, &b) in w.iter() {
            if let Some((e, sign)) = cup_cell(c, d) {
                out.add(e, a * b * sign);
            }
        }
    }
    out
}

/// Verifies the cochain Leibniz rule `δ(z∪w) = δz∪w + (−1)^p z∪δw` on
/// single-cell cochains of the ordered model, in the stored coordinate
/// orientation. Cells are taken in complex order, where neighbours overlap
/// and the products are nonzero, rather than spread out by striding. The
/// pairing is a parameter so tests can demonstrate that a corrupted sign
/// convention is caught with a witnessing pair.
pub fn leibniz_check(
    complex: &MorseComplex<ConfCube>,
    cap: usize,
    cup_cell: CellPairing,
) -> Check {
    let name = "cochain-leibniz";
    let top = complex.top_dim();
    let mut pairs = 0usize;
    for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        if p + q + 1 > top {
            continue;
        }
        let rights: Vec<(CochainVec<ConfCube>, CochainVec<ConfCube>)> = complex
            .cells(q)
            .iter()
            .take(cap)
            .map(|d| {
                let w = CochainVec::from_entries([(d.clone(), 1)]);
                let dw = coboundary_conf(&w, complex.cells(q + 1), Orientation::Product);
                (w, dw)
            })
            .collect();
        for c in complex.cells(p).iter().take(cap) {
            let z = CochainVec::from_entries([(c.clone(), 1)]);
            let dz = coboundary_conf(&z, complex.cells(p + 1), Orientation::Product);
            for (d, (w, dw)) in complex.cells(q).iter().zip(&rights) {
                pairs += 1;
                let lhs = coboundary_conf(
                    &cup_fold_with(&z, w, cup_cell),
                    complex.cells(p + q + 1),
                    Orientation::Product,
                );
                let mut rhs = cup_fold_with(&dz, w, cup_cell);
                let sign = if p.is_multiple_of(2) { 1 } else { -1 };
                rhs.add_cochain(&cup_fold_with(&z, dw, cup_cell).scaled(sign));
                if lhs != rhs {
                    return Check::fail(
                        name,
                        format!("rule broken for a ({p},{q})-dimensional pair"),
                        json!({
                            "z": conf_value(c),
                            "w": conf_value(d),
                        }),
                    );
                }
            }
        }
    }
    Check::pass(name, format!("{pairs} cochain pairs"))
}

fn dd_zero_orbit(complex: &MorseComplex<OrbitCube>, cap: usize) -> Check {
    let name = "coboundary-squares-to-zero-unordered";
    let top = complex.top_dim();
    let mut cells = 0usize;
    for d in 0..top.saturating_sub(1) {
        for c in sampled(complex.cells(d), cap) {
            cells += 1;
            let z = CochainVec::from_entries([(c.clone(), 1)]);
            let dz = coboundary_orbit(&z, complex.cells(d + 1), Orientation::Gradient);
            let ddz = coboundary_orbit(&dz, complex.cells(d + 2), Orientation::Gradient);
            if !ddz.is_zero() {
                return Check::fail(name, format!("δδ ≠ 0 in dimension {d}"), orbit_value(c));
            }
        }
    }
    Check::pass(name, format!("{cells} cells"))
}

fn dd_zero_conf(complex: &MorseComplex<ConfCube>, cap: usize) -> Check {
    let name = "coboundary-squares-to-zero-ordered";
    let top = complex.top_dim();
    let mut cells = 0usize;
    for d in 0..top.saturating_sub(1) {
        for c in sampled(complex.cells(d), cap) {
            cells += 1;
            let z = CochainVec::from_entries([(c.clone(), 1)]);
            for orientation in [Orientation::Product, Orientation::Gradient] {
                let dz = coboundary_conf(&z, complex.cells(d + 1), orientation);
                let ddz = coboundary_conf(&dz, complex.cells(d + 2), orientation);
                if !ddz.is_zero() {
                    return Check::fail(name, format!("δδ ≠ 0 in dimension {d}"), conf_value(c));
                }
            }
        }
    }
    Check::pass(name, format!("{cells} cells, both orientations"))
}

fn morse_coboundary_vanishes(
    tree: &RootedPlaneTree,
    complex: &MorseComplex<OrbitCube>,
) -> Check {
    let name = "morse-coboundary-vanishes";
    let mut checked = 0usize;
    for d in 0..complex.top_dim() {
        for cube in complex.critical_cells(d) {
            checked += 1;
            if !complex.morse_coboundary(cube).is_zero() {
                let cell = CriticalCell::from_orbit_cube(tree, cube)
                    .map(|c| cell_value(&c))
                    .unwrap_or_else(|_| orbit_value(cube));
                return Check::fail(name, format!("nonzero in dimension {d}"), cell);
            }
        }
    }
    Check::pass(name, format!("{checked} critical cells"))
}

fn counts_match_cohomology(
    fat: &RootedPlaneTree,
    n: usize,
    m_max: usize,
    budget: u64,
) -> Result<Check, Error> {
    let name = "critical-count-equals-betti";
    let cohomology = integral_cohomology(fat, n, Model::Unordered, budget)?;
    for (d, factors) in cohomology.torsion.iter().enumerate() {
        if !factors.is_empty() {
            return Ok(Check::fail(
                name,
                format!("torsion in degree {d}"),
                json!({ "degree": d, "factors": factors.iter().map(|t| t.to_string()).collect::<Vec<_>>() }),
            ));
        }
    }
    let dims = cohomology.betti.len().max(m_max + 1);
    for d in 0..dims {
        let rank = cohomology.betti.get(d).copied().unwrap_or(0);
        let count = enumerate_critical(fat, n, d)?.len();
        if rank != count {
            return Ok(Check::fail(
                name,
                format!("degree {d}: {count} critical cells vs rank {rank}"),
                json!({ "degree": d, "critical": count, "rank": rank }),
            ));
        }
    }
    Ok(Check::pass(name, format!("{dims} degrees, torsion-free")))
}

fn factorization_roundtrip(
    fat: &RootedPlaneTree,
    n: usize,
    m_max: usize,
) -> Result<Check, Error> {
    let name = "factorization-roundtrip";
    let mut checked = 0usize;
    for m in 1..=m_max.min(3) {
        let cells = enumerate_critical(fat, n, m)?;
        for cell in sampled(&cells, 200) {
            checked += 1;
            let factors = factorize_basis(fat, n, cell)?;
            let word: Vec<ChangedGenerator> =
                factors.into_iter().map(ChangedGenerator::raw).collect();
            let value = evaluate_product(fat, n, &word)?;
            if value != CochainVec::from_entries([(cell.clone(), 1)]) {
                return Ok(Check::fail(
                    name,
                    "refolding the factors does not return the cell",
                    cell_value(cell),
                ));
            }
        }
    }
    Ok(Check::pass(name, format!("{checked} basis cells")))
}

/// Ascending families of up to three generators, deterministically sampled.
fn sample_families(vnt: &[InteractionVertex], cap: usize) -> Vec<Vec<InteractionVertex>> {
    let picks: Vec<&InteractionVertex> = sampled(vnt, 12).collect();
    let mut out = Vec::new();
    for (i, a) in picks.iter().enumerate() {
        for b in &picks[i + 1..] {
            if a.x < b.x {
                out.push(vec![(*a).clone(), (*b).clone()]);
            }
        }
    }
    for (i, a) in picks.iter().enumerate() {
        for (j, b) in picks.iter().enumerate().skip(i + 1) {
            for c in &picks[j + 1..] {
                if a.x < b.x && b.x < c.x {
                    out.push(vec![(*a).clone(), (*b).clone(), (*c).clone()]);
                }
            }
        }
    }
    out.truncate(cap);
    out
}

fn trichotomy_consistency(fat: &RootedPlaneTree, n: usize) -> Result<Check, Error> {
    let name = "trichotomy-consistency";
    let vnt = enumerate_vnt(fat, n);
    let mut checked = 0usize;
    for family in sample_families(&vnt, 400) {
        checked += 1;
        let face = is_face(fat, n, &family)?;
        let strong = classify_interaction(fat, n, &family)? == Interaction::Strong;
        if face != strong {
            return Ok(Check::fail(
                name,
                "complex membership disagrees with the strong classification",
                Value::Array(family.iter().map(generator_value).collect()),
            ));
        }
    }
    Ok(Check::pass(name, format!("{checked} families")))
}

/// Cup-fold of the generators' closed representatives in the ordered model,
/// projected onto the normal-form basis: the brute-force product oracle.
pub fn conf_product_oracle(
    complex: &MorseComplex<ConfCube>,
    tree: &RootedPlaneTree,
    n: usize,
    gens: &[InteractionVertex],
) -> Result<MorseCochain, Error> {
    let reorient = |z: &CochainVec<ConfCube>| {
        z.map_coeffs(|c, a| a * orientation_conversion_sign(c.coordinates()))
    };
    let mut acc = cocycle_rep_1dim(tree, n, &gens[0].to_cell())?;
    for g in &gens[1..] {
        let w = cocycle_rep_1dim(tree, n, &g.to_cell())?;
        acc = cup_fold_with(&acc, &w, &|c, d| cup(c, d));
    }
    complex.to_morse_basis(tree, &reorient(&acc), gens.len())
}

/// The same fold in the unordered model, using the orbitwise pairing.
pub fn orbit_product_oracle(
    complex: &MorseComplex<OrbitCube>,
    tree: &RootedPlaneTree,
    n: usize,
    gens: &[InteractionVertex],
) -> Result<MorseCochain, Error> {
    let mut acc = cocycle_rep_1dim_orbit(tree, n, &gens[0].to_cell())?;
    for (deg, g) in gens[1..].iter().enumerate() {
        let w = cocycle_rep_1dim_orbit(tree, n, &g.to_cell())?;
        acc = treebraid_core::cube::orbit_cup(&acc, &w, deg + 1, complex.cells(deg + 2));
    }
    complex.to_morse_basis(tree, &acc, gens.len())
}

fn oracle_agreement_cubical(
    complex: &MorseComplex<ConfCube>,
    fat: &RootedPlaneTree,
    n: usize,
) -> Result<Check, Error> {
    let name = "product-matches-ordered-oracle";
    let vnt = enumerate_vnt(fat, n);
    let picks: Vec<&InteractionVertex> = sampled(&vnt, 8).collect();
    let mut checked = 0usize;
    let mut words: Vec<Vec<InteractionVertex>> = Vec::new();
    for a in &picks {
        for b in &picks {
            words.push(vec![(*a).clone(), (*b).clone()]);
        }
    }
    if complex.top_dim() >= 3 {
        for (i, a) in picks.iter().enumerate().take(4) {
            for (j, b) in picks.iter().enumerate().take(4) {
                for (k, c) in picks.iter().enumerate().take(4) {
                    if i != j && j != k && i != k {
                        words.push(vec![(*a).clone(), (*b).clone(), (*c).clone()]);
                    }
                }
            }
        }
    }
    for word in words {
        if word.len() > complex.top_dim() {
            continue;
        }
        checked += 1;
        let symbols: Vec<ChangedGenerator> =
            word.iter().cloned().map(ChangedGenerator::raw).collect();
        let by_formula = evaluate_product(fat, n, &symbols)?;
        let by_oracle = conf_product_oracle(complex, fat, n, &word)?;
        if by_formula != by_oracle {
            return Ok(Check::fail(
                name,
                "closed formula disagrees with the ordered-model cup product",
                json!({
                    "factors": word.iter().map(generator_value).collect::<Vec<_>>(),
                    "formula": cochain_value(&by_formula),
                    "oracle": cochain_value(&by_oracle),
                }),
            ));
        }
    }
    Ok(Check::pass(name, format!("{checked} ordered words")))
}

fn oracle_agreement_blocks(
    complex: &MorseComplex<OrbitCube>,
    fat: &RootedPlaneTree,
    n: usize,
    m_max: usize,
) -> Result<Check, Error> {
    let name = "product-matches-block-cocycles";
    let mut families: Vec<Vec<InteractionVertex>> = Vec::new();
    let layers = knt_faces(fat, n, m_max.min(complex.top_dim()).max(1))?;
    for layer in &layers {
        for face in sampled(layer, 60) {
            families.push(face.clone());
        }
    }
    families.extend(sample_families(&enumerate_vnt(fat, n), 60));
    let mut checked = 0usize;
    for family in families {
        if family.len() > complex.top_dim() {
            continue;
        }
        checked += 1;
        let blocks = product_cocycle_blocks(fat, n, &family)?;
        let projected = complex.to_morse_basis(fat, &blocks, family.len())?;
        let symbols: Vec<ChangedGenerator> =
            family.iter().cloned().map(ChangedGenerator::raw).collect();
        let direct = evaluate_product(fat, n, &symbols)?;
        if projected != direct {
            return Ok(Check::fail(
                name,
                "block cocycle projects to a different element",
                json!({
                    "factors": family.iter().map(generator_value).collect::<Vec<_>>(),
                    "projected": cochain_value(&projected),
                    "direct": cochain_value(&direct),
                }),
            ));
        }
    }
    Ok(Check::pass(name, format!("{checked} ascending families")))
}

fn certificate_check(tree: &RootedPlaneTree, n: usize) -> Result<Check, Error> {
    let name = "binary-core-certificate";
    match exterior_face_ring_certificate(tree, n) {
        Ok(report) => {
            if let Some(failure) = report.failure {
                Ok(Check::fail(name, "certificate failed", json!(failure)))
            } else {
                Ok(Check::pass(
                    name,
                    format!(
                        "{} families, {} strong",
                        report.families_checked, report.strong_families
                    ),
                ))
            }
        }
        Err(Error::NotBinaryCore { vertex }) => Ok(Check::skip(
            name,
            format!("not applicable: vertex {vertex} has three essential branches"),
        )),
        Err(Error::NotEmbeddedBinaryCore { vertex }) => Ok(Check::skip(
            name,
            format!("not applicable: essential branches of vertex {vertex} are not embedded last"),
        )),
        Err(e) => Err(e),
    }
}

/// Runs the full battery on one instance. `tree` is the tree as given; it
/// is subdivided internally where the models require it.
pub fn verify_all(
    tree: &RootedPlaneTree,
    n: usize,
    oracle: OracleChoice,
    budget: u64,
) -> VerifyReport {
    let mut report = VerifyReport {
        n,
        checks: Vec::new(),
        budget_hit: None,
    };
    let fat = tree.subdivide_for(n);
    // The top critical dimension, found by direct enumeration.
    let mut m_max = 0;
    loop {
        match enumerate_critical(&fat, n, m_max + 1) {
            Ok(cells) if !cells.is_empty() => m_max += 1,
            _ => break,
        }
    }
    let run = |report: &mut VerifyReport, stage: &str, step: &mut dyn FnMut() -> Result<Check, Error>| {
        if report.budget_hit.is_some() {
            return;
        }
        match step() {
            Ok(check) => report.checks.push(check),
            Err(Error::BudgetExceeded { budget, estimate }) => {
                report.budget_hit =
                    Some(format!("{stage}: {estimate} cells against a budget of {budget}"));
            }
            Err(e) => report.checks.push(Check::fail(
                stage_name(stage),
                format!("errored: {e}"),
                json!(format!("{e}")),
            )),
        }
    };
    let orbit = match build_orbit_complex(&fat, n, m_max + 1, budget) {
        Ok(c) => Some(c),
        Err(Error::BudgetExceeded { budget: b, estimate }) => {
            report.budget_hit = Some(format!(
                "unordered complex: {estimate} cells against a budget of {b}"
            ));
            None
        }
        Err(e) => {
            report.checks.push(Check::fail(
                "coboundary-squares-to-zero-unordered",
                format!("complex build errored: {e}"),
                json!(format!("{e}")),
            ));
            None
        }
    };
    let conf = if report.budget_hit.is_none() && oracle.includes_cubical() {
        match build_conf_complex(&fat, n, (m_max + 2).min(3).min(n), budget) {
            Ok(c) => Some(c),
            Err(Error::BudgetExceeded { budget: b, estimate }) => {
                report.budget_hit = Some(format!(
                    "ordered complex: {estimate} cells against a budget of {b}"
                ));
                None
            }
            Err(e) => {
                report.checks.push(Check::fail(
                    "coboundary-squares-to-zero-ordered",
                    format!("complex build errored: {e}"),
                    json!(format!("{e}")),
                ));
                None
            }
        }
    } else {
        None
    };
    if let Some(orbit) = &orbit {
        run(&mut report, "coboundary-squares-to-zero-unordered", &mut || {
            Ok(dd_zero_orbit(orbit, 400))
        });
    }
    if let Some(conf) = &conf {
        run(&mut report, "coboundary-squares-to-zero-ordered", &mut || {
            Ok(dd_zero_conf(conf, 200))
        });
        run(&mut report, "cochain-leibniz", &mut || {
            Ok(leibniz_check(conf, 40, &|c, d| cup(c, d)))
        });
    }
    if let Some(orbit) = &orbit {
        run(&mut report, "morse-coboundary-vanishes", &mut || {
            Ok(morse_coboundary_vanishes(&fat, orbit))
        });
    }
    run(&mut report, "critical-count-equals-betti", &mut || {
        counts_match_cohomology(&fat, n, m_max, budget)
    });
    run(&mut report, "factorization-roundtrip", &mut || {
        factorization_roundtrip(&fat, n, m_max)
    });
    run(&mut report, "trichotomy-consistency", &mut || {
        trichotomy_consistency(&fat, n)
    });
    if let Some(conf) = &conf {
        run(&mut report, "product-matches-ordered-oracle", &mut || {
            oracle_agreement_cubical(conf, &fat, n)
        });
    }
    if oracle.includes_blocks() {
        if let Some(orbit) = &orbit {
            run(&mut report, "product-matches-block-cocycles", &mut || {
                oracle_agreement_blocks(orbit, &fat, n, m_max)
            });
        }
    }
    run(&mut report, "binary-core-certificate", &mut || {
        certificate_check(tree, n)
    });
    report
}

/// Interns the stage label so error paths can reuse [`Check`]'s static name.
fn stage_name(stage: &str) -> &'static str {
    const NAMES: &[&str] = &[
        "coboundary-squares-to-zero-unordered",
        "coboundary-squares-to-zero-ordered",
        "cochain-leibniz",
        "morse-coboundary-vanishes",
        "critical-count-equals-betti",
        "factorization-roundtrip",
        "trichotomy-consistency",
        "product-matches-ordered-oracle",
        "product-matches-block-cocycles",
        "binary-core-certificate",
    ];
    NAMES.iter().find(|&&n| n == stage).copied().unwrap_or("check")
}
