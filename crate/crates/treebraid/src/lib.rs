//! Command-line front end for the tree braid group cohomology library.
//!
//! Trees come in as plain-text adjacency files ([`tree_io`]); results go
//! out as JSON with deterministically ordered keys, either to stdout or to
//! `--out`. Vertex identifiers in both directions are the ones from the
//! input file; where a command subdivides the tree internally, essential
//! vertices keep their input names and subdivision vertices stay hidden.
//!
//! Exit codes: `0` success, `1` domain or usage error, `2` cell budget
//! exceeded, `3` verification found a genuine inconsistency.

pub mod config;
pub mod harness;
pub mod tree_io;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use treebraid_core::interaction::{knt_faces, InteractionVertex};
use treebraid_core::morse::{enumerate_critical, CellBlock, CriticalCell, MorseCochain};
use treebraid_core::ring::{
    evaluate_product, mod_p_view, raag_presentation, rebase_trigger, ChangedGenerator,
};
use treebraid_core::snf::integral_cohomology;
use treebraid_core::tree::RootedPlaneTree;
use treebraid_core::{Error as CoreError, VertexId};

use config::{resolve_budget, JobConfig, OracleChoice};
use tree_io::{parse_tree, render_tree, ParsedTree, TreeIoError};

/// Schema tag stamped on every JSON document the tool emits.
const SCHEMA: &str = "treebraid/1";

#[derive(Parser, Debug)]
#[command(
    name = "treebraid",
    about = "Integral cohomology rings of tree braid groups",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimally subdivide a tree so n points fit on every segment.
    Subdivide(SubdivideArgs),
    /// List the critical cells of the discrete model, graded by dimension.
    CriticalCells(CriticalCellsArgs),
    /// Integral cohomology ranks and torsion, computed from boundary
    /// matrices by Smith normal form.
    Betti(BettiArgs),
    /// Faces of the interaction complex: which generator families multiply
    /// to a nonzero basis element.
    Knt(KntArgs),
    /// Evaluate a product of degree-one generators in the critical basis.
    Product(ProductArgs),
    /// Present the braid group of a linear binary tree as a right-angled
    /// Artin group.
    Presentation(PresentationArgs),
    /// Reorder children so the essential core embeds last-two-branches;
    /// report the relabelling.
    EmbedBinaryCore(EmbedArgs),
    /// Cross-check the closed formulas against the cubical machinery.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SubdivideArgs {
    /// Number of points the subdivided tree must carry.
    #[arg(long)]
    n: usize,
    /// Tree description file.
    tree: PathBuf,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CriticalCellsArgs {
    #[arg(long)]
    n: usize,
    /// Only this dimension (default: every nonempty one).
    #[arg(long)]
    dim: Option<usize>,
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BettiArgs {
    #[arg(long)]
    n: usize,
    /// Cell budget for the cubical complex (or TREEBRAID_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KntArgs {
    #[arg(long)]
    n: usize,
    /// Largest simplex dimension to enumerate (default 2).
    #[arg(long)]
    dim: Option<usize>,
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProductArgs {
    #[arg(long)]
    n: usize,
    /// Factors as a JSON array of {"k","x","p","q"[,"rebased"]}, inline or
    /// @file.
    #[arg(long)]
    factors: String,
    /// Reduce coefficients modulo this prime (0 keeps integers).
    #[arg(long = "mod")]
    modulus: Option<u32>,
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PresentationArgs {
    #[arg(long)]
    n: usize,
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    /// Which product oracle to run: cubical, blocks, or both.
    #[arg(long, default_value = "both", value_parser = parse_oracle)]
    oracle: OracleChoice,
    #[arg(long)]
    budget: Option<u64>,
    tree: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_oracle(s: &str) -> Result<OracleChoice, String> {
    match s {
        "cubical" => Ok(OracleChoice::Cubical),
        "blocks" => Ok(OracleChoice::Blocks),
        "both" => Ok(OracleChoice::Both),
        other => Err(format!(
            "unknown oracle `{other}` (expected cubical, blocks, or both)"
        )),
    }
}

/// A failure with the exit code it calls for.
#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn domain(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::BudgetExceeded { .. } => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<TreeIoError> for CliError {
    fn from(e: TreeIoError) -> Self {
        CliError::domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::domain(e.to_string())
    }
}

/// Entry point used by the binary and by tests: parses `argv` (without the
/// program name) and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("treebraid"))
        .chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; everything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok((value, out, code)) => match emit(&value, out.as_deref()) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("treebraid: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("treebraid: {e}");
            e.code
        }
    }
}

/// Serializes with sorted keys (the default map is ordered) and a trailing
/// newline, to stdout or a file.
fn emit(value: &Value, out: Option<&Path>) -> Result<(), std::io::Error> {
    let mut text = serde_json::to_string_pretty(value)?.into_bytes();
    text.push(b'\n');
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&text)
        }
    }
}

fn load_tree(path: &Path) -> Result<ParsedTree, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::domain(format!("{}: {e}", path.display())))?;
    Ok(parse_tree(&text)?)
}

fn dispatch(cli: Cli) -> Result<(Value, Option<PathBuf>, i32), CliError> {
    match cli.command {
        Command::Subdivide(a) => {
            let parsed = load_tree(&a.tree)?;
            let config = JobConfig::new("subdivide", Some(a.tree.display().to_string()), a.n);
            Ok((subdivide_value(&parsed, &config)?, a.out, 0))
        }
        Command::CriticalCells(a) => {
            let parsed = load_tree(&a.tree)?;
            let mut config =
                JobConfig::new("critical-cells", Some(a.tree.display().to_string()), a.n);
            config.dim = a.dim;
            Ok((critical_cells_value(&parsed, &config)?, a.out, 0))
        }
        Command::Betti(a) => {
            let parsed = load_tree(&a.tree)?;
            let mut config = JobConfig::new("betti", Some(a.tree.display().to_string()), a.n);
            config.budget = resolve_budget(a.budget);
            Ok((betti_value(&parsed, &config)?, a.out, 0))
        }
        Command::Knt(a) => {
            let parsed = load_tree(&a.tree)?;
            let mut config = JobConfig::new("knt", Some(a.tree.display().to_string()), a.n);
            config.dim = a.dim;
            Ok((knt_value(&parsed, &config)?, a.out, 0))
        }
        Command::Product(a) => {
            let parsed = load_tree(&a.tree)?;
            let mut config = JobConfig::new("product", Some(a.tree.display().to_string()), a.n);
            config.modulus = u64::from(a.modulus.unwrap_or(0));
            Ok((product_value(&parsed, &config, &a.factors)?, a.out, 0))
        }
        Command::Presentation(a) => {
            let parsed = load_tree(&a.tree)?;
            let config =
                JobConfig::new("presentation", Some(a.tree.display().to_string()), a.n);
            Ok((presentation_value(&parsed, &config)?, a.out, 0))
        }
        Command::EmbedBinaryCore(a) => {
            let parsed = load_tree(&a.tree)?;
            Ok((embed_value(&parsed)?, a.out, 0))
        }
        Command::Verify(a) => {
            let parsed = load_tree(&a.tree)?;
            let mut config = JobConfig::new("verify", Some(a.tree.display().to_string()), a.n);
            config.oracle = a.oracle;
            config.budget = resolve_budget(a.budget);
            let report =
                harness::verify_all(&parsed.tree, config.n, config.oracle, config.budget);
            let mut doc = Map::new();
            doc.insert("schema".into(), json!(SCHEMA));
            doc.insert("n".into(), json!(report.n));
            doc.insert("pass".into(), json!(report.all_pass()));
            doc.insert(
                "checks".into(),
                Value::Array(report.checks.iter().map(|c| c.to_value()).collect()),
            );
            if let Some(hit) = &report.budget_hit {
                doc.insert("budget_exceeded".into(), json!(hit));
            }
            // Witness payloads name cells of the internally subdivided tree.
            doc.insert("labels".into(), json!("internal"));
            Ok((Value::Object(doc), a.out, report.exit_code()))
        }
    }
}

// ---------------------------------------------------------------------------
// Label translation
// ---------------------------------------------------------------------------

/// Renders a working vertex id back to the identifier used in the input
/// file.
fn input_id(parsed: &ParsedTree, v: VertexId) -> usize {
    parsed.input_label[v as usize]
}

/// Looks up the working id for an input identifier.
fn working_id(parsed: &ParsedTree, input: usize) -> Result<VertexId, CliError> {
    parsed
        .working_label(input)
        .ok_or_else(|| CliError::domain(format!("vertex {input} is not in the tree")))
}

/// Input names for the essential vertices of the subdivided tree: matched
/// through the depth-first order, which subdivision preserves.
fn fat_essential_names(
    parsed: &ParsedTree,
    fat: &RootedPlaneTree,
) -> HashMap<VertexId, usize> {
    let raw = parsed.tree.essential_vertices();
    let fat_essentials = fat.essential_vertices();
    debug_assert_eq!(raw.len(), fat_essentials.len());
    fat_essentials
        .into_iter()
        .zip(raw)
        .map(|(f, r)| (f, input_id(parsed, r)))
        .collect()
}

fn block_value(b: &CellBlock, name: &dyn Fn(VertexId) -> usize) -> Value {
    json!({ "x": name(b.x), "p": b.p, "q": b.q })
}

fn cell_value(cell: &CriticalCell, name: &dyn Fn(VertexId) -> usize) -> Value {
    json!({
        "k": cell.k,
        "blocks": cell.blocks.iter().map(|b| block_value(b, name)).collect::<Vec<_>>(),
    })
}

fn generator_value(v: &InteractionVertex, name: &dyn Fn(VertexId) -> usize) -> Value {
    json!({ "k": v.k, "x": name(v.x), "p": v.p, "q": v.q })
}

fn cochain_value(z: &MorseCochain, name: &dyn Fn(VertexId) -> usize) -> Value {
    Value::Array(
        z.iter()
            .map(|(c, &a)| json!({ "cell": cell_value(c, name), "coeff": a }))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn subdivide_value(parsed: &ParsedTree, config: &JobConfig) -> Result<Value, CliError> {
    let fat = parsed.tree.subdivide_for(config.n);
    let children: Vec<Vec<VertexId>> = (0..fat.vertex_count())
        .map(|v| fat.children(v as VertexId).to_vec())
        .collect();
    Ok(json!({
        "schema": SCHEMA,
        "n": config.n,
        "root": 0,
        "children": children,
        "vertex_count": fat.vertex_count(),
        "essential_vertices": fat.essential_vertices(),
        "sufficient": fat.is_sufficient(config.n),
        "text": render_tree(&fat),
    }))
}

fn critical_cells_value(parsed: &ParsedTree, config: &JobConfig) -> Result<Value, CliError> {
    let fat = parsed.tree.subdivide_for(config.n);
    let names = fat_essential_names(parsed, &fat);
    let name = |v: VertexId| names[&v];
    let dims: Vec<usize> = match config.dim {
        Some(d) => vec![d],
        None => {
            let mut dims = Vec::new();
            let mut d = 0;
            loop {
                if enumerate_critical(&fat, config.n, d)?.is_empty() {
                    break;
                }
                dims.push(d);
                d += 1;
            }
            dims
        }
    };
    let mut layers = Vec::new();
    let mut total = 0usize;
    for d in dims {
        let cells = enumerate_critical(&fat, config.n, d)?;
        total += cells.len();
        layers.push(json!({
            "dim": d,
            "count": cells.len(),
            "cells": cells.iter().map(|c| cell_value(c, &name)).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({
        "schema": SCHEMA,
        "n": config.n,
        "total": total,
        "dims": layers,
    }))
}

fn betti_value(parsed: &ParsedTree, config: &JobConfig) -> Result<Value, CliError> {
    let fat = parsed.tree.subdivide_for(config.n);
    let cohomology = integral_cohomology(
        &fat,
        config.n,
        treebraid_core::cube::Model::Unordered,
        config.budget,
    )?;
    let torsion: Vec<Value> = cohomology
        .torsion
        .iter()
        .enumerate()
        .filter(|(_, factors)| !factors.is_empty())
        .map(|(d, factors)| {
            json!({
                "dim": d,
                "factors": factors.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "schema": SCHEMA,
        "n": config.n,
        "betti": cohomology.betti,
        "torsion": torsion,
        "cells": cohomology.cell_counts,
    }))
}

fn knt_value(parsed: &ParsedTree, config: &JobConfig) -> Result<Value, CliError> {
    let name = |v: VertexId| input_id(parsed, v);
    let up_to = config.dim.unwrap_or(2);
    let faces = knt_faces(&parsed.tree, config.n, up_to)?;
    let mut layers = Vec::new();
    for (d, simplices) in faces.iter().enumerate() {
        layers.push(json!({
            "dim": d,
            "count": simplices.len(),
            "simplices": simplices
                .iter()
                .map(|family| {
                    Value::Array(family.iter().map(|g| generator_value(g, &name)).collect())
                })
                .collect::<Vec<_>>(),
        }));
    }
    Ok(json!({
        "schema": SCHEMA,
        "n": config.n,
        "dim": up_to,
        "faces": layers,
    }))
}

/// One parsed factor: the generator plus an optional explicit basis flag.
fn parse_factor(
    parsed: &ParsedTree,
    v: &Value,
) -> Result<(InteractionVertex, Option<bool>), CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::domain("each factor must be an object"))?;
    let field = |key: &str| -> Result<&Value, CliError> {
        obj.get(key)
            .ok_or_else(|| CliError::domain(format!("factor is missing \"{key}\"")))
    };
    let int = |key: &str| -> Result<u64, CliError> {
        field(key)?
            .as_u64()
            .ok_or_else(|| CliError::domain(format!("factor field \"{key}\" must be a nonnegative integer")))
    };
    let tuple = |key: &str| -> Result<Vec<u32>, CliError> {
        field(key)?
            .as_array()
            .ok_or_else(|| CliError::domain(format!("factor field \"{key}\" must be an array")))?
            .iter()
            .map(|t| {
                t.as_u64()
                    .map(|t| t as u32)
                    .ok_or_else(|| CliError::domain(format!("factor field \"{key}\" must hold nonnegative integers")))
            })
            .collect()
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "k" | "x" | "p" | "q" | "rebased") {
            return Err(CliError::domain(format!("unknown factor field \"{key}\"")));
        }
    }
    let rebased = match obj.get("rebased") {
        None => None,
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => {
            return Err(CliError::domain("factor field \"rebased\" must be a boolean"))
        }
    };
    let generator = InteractionVertex {
        k: int("k")? as u32,
        x: working_id(parsed, int("x")? as usize)?,
        p: tuple("p")?,
        q: tuple("q")?,
    };
    Ok((generator, rebased))
}

fn product_value(
    parsed: &ParsedTree,
    config: &JobConfig,
    factors_arg: &str,
) -> Result<Value, CliError> {
    let text = match factors_arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::domain(format!("{path}: {e}")))?,
        None => factors_arg.to_string(),
    };
    let factors: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::domain(format!("factors are not valid JSON: {e}")))?;
    let list = factors
        .as_array()
        .ok_or_else(|| CliError::domain("factors must be a JSON array"))?;
    if list.is_empty() {
        return Err(CliError::domain("at least one factor is required"));
    }
    let embedded = parsed.tree.is_embedded_binary_core();
    let mut word = Vec::new();
    let mut factor_values = Vec::new();
    let name = |v: VertexId| input_id(parsed, v);
    for item in list {
        let (generator, flag) = parse_factor(parsed, item)?;
        let rebased = flag.unwrap_or_else(|| embedded && rebase_trigger(&generator));
        let mut value = generator_value(&generator, &name);
        value["rebased"] = json!(rebased);
        factor_values.push(value);
        word.push(if rebased {
            ChangedGenerator::rebased(generator)
        } else {
            ChangedGenerator::raw(generator)
        });
    }
    let product = evaluate_product(&parsed.tree, config.n, &word)?;
    let reduced = mod_p_view(&product, config.modulus as u32);
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("n".into(), json!(config.n));
    doc.insert(
        "embedding".into(),
        json!(if embedded { "binary-core" } else { "general" }),
    );
    doc.insert("factors".into(), Value::Array(factor_values));
    if config.modulus > 0 {
        doc.insert("modulus".into(), json!(config.modulus));
    }
    doc.insert("coefficients".into(), cochain_value(&reduced, &name));
    Ok(Value::Object(doc))
}

fn presentation_value(parsed: &ParsedTree, config: &JobConfig) -> Result<Value, CliError> {
    let name = |v: VertexId| input_id(parsed, v);
    let presentation = raag_presentation(&parsed.tree, config.n)?;
    Ok(json!({
        "schema": SCHEMA,
        "n": config.n,
        "generators": presentation
            .generators
            .iter()
            .map(|g| generator_value(g, &name))
            .collect::<Vec<_>>(),
        "commuting": presentation.commuting,
    }))
}

fn embed_value(parsed: &ParsedTree) -> Result<Value, CliError> {
    let (tree, new_of_old) = parsed.tree.reembed_binary_core()?;
    let children: Vec<Vec<VertexId>> = (0..tree.vertex_count())
        .map(|v| tree.children(v as VertexId).to_vec())
        .collect();
    let mapping: Vec<Value> = new_of_old
        .iter()
        .enumerate()
        .map(|(old, &new)| json!({ "from": input_id(parsed, old as VertexId), "to": new }))
        .collect();
    Ok(json!({
        "schema": SCHEMA,
        "root": 0,
        "children": children,
        "already_embedded": parsed.tree.is_embedded_binary_core(),
        "mapping": mapping,
        "text": render_tree(&tree),
    }))
}

