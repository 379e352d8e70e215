//! Parsing and rendering of the plain-text tree format.
//!
//! A tree file names one vertex per line: `root <id>` designates the root
//! (which must have degree one), and `<id>: <child> <child> …` lists a
//! vertex's children in planar, leftmost-first order. Vertices appearing
//! only as children need no line of their own. Blank lines and `#` comments
//! are ignored. Identifiers are arbitrary non-negative integers; they are
//! densified and relabelled into depth-first order for the library, and the
//! bijection back to the input identifiers is kept alongside the tree.

use std::collections::BTreeMap;
use std::fmt;

use treebraid_core::tree::{build_tree, RootedPlaneTree};
use treebraid_core::VertexId;

/// A parsed tree together with the relabelling bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTree {
    pub tree: RootedPlaneTree,
    /// `input_label[v]` is the identifier the input file used for the
    /// vertex the library calls `v`.
    pub input_label: Vec<usize>,
}

impl ParsedTree {
    /// The working label carrying the given input identifier.
    pub fn working_label(&self, input_id: usize) -> Option<VertexId> {
        self.input_label
            .iter()
            .position(|&l| l == input_id)
            .map(|v| v as VertexId)
    }
}

/// Why a tree file failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeIoError {
    MissingRoot,
    DuplicateRoot { line: usize },
    DuplicateVertex { line: usize, id: usize },
    BadLine { line: usize, text: String },
    BadNumber { line: usize, token: String },
    Shape(treebraid_core::Error),
}

impl fmt::Display for TreeIoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeIoError::MissingRoot => write!(f, "no `root <id>` line"),
            TreeIoError::DuplicateRoot { line } => {
                write!(f, "line {line}: a second `root` line")
            }
            TreeIoError::DuplicateVertex { line, id } => {
                write!(f, "line {line}: vertex {id} already has a child list")
            }
            TreeIoError::BadLine { line, text } => {
                write!(f, "line {line}: expected `<id>: <child> ...`, found {text:?}")
            }
            TreeIoError::BadNumber { line, token } => {
                write!(f, "line {line}: {token:?} is not a vertex identifier")
            }
            TreeIoError::Shape(e) => write!(f, "not a rooted plane tree: {e}"),
        }
    }
}

impl std::error::Error for TreeIoError {}

impl From<treebraid_core::Error> for TreeIoError {
    fn from(e: treebraid_core::Error) -> Self {
        TreeIoError::Shape(e)
    }
}

/// Parses the plain-text format into a depth-first-labelled tree.
pub fn parse_tree(text: &str) -> Result<ParsedTree, TreeIoError> {
    let mut root: Option<usize> = None;
    let mut lists: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut mentioned: BTreeMap<usize, ()> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let number = |token: &str| -> Result<usize, TreeIoError> {
            token.parse().map_err(|_| TreeIoError::BadNumber {
                line,
                token: token.to_string(),
            })
        };
        if let Some(rest) = content.strip_prefix("root") {
            let rest = rest.trim();
            if rest.is_empty() || rest.contains(char::is_whitespace) {
                return Err(TreeIoError::BadLine {
                    line,
                    text: content.to_string(),
                });
            }
            let id = number(rest)?;
            if root.replace(id).is_some() {
                return Err(TreeIoError::DuplicateRoot { line });
            }
            mentioned.insert(id, ());
            continue;
        }
        let Some((head, tail)) = content.split_once(':') else {
            return Err(TreeIoError::BadLine {
                line,
                text: content.to_string(),
            });
        };
        let id = number(head.trim())?;
        if lists.contains_key(&id) {
            return Err(TreeIoError::DuplicateVertex { line, id });
        }
        let mut children = Vec::new();
        for token in tail.split_whitespace() {
            let child = number(token)?;
            mentioned.insert(child, ());
            children.push(child);
        }
        mentioned.insert(id, ());
        lists.insert(id, children);
    }
    let root_id = root.ok_or(TreeIoError::MissingRoot)?;
    // Densify the identifiers in ascending order.
    let ids: Vec<usize> = mentioned.into_keys().collect();
    let dense: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(d, &id)| (id, d)).collect();
    let mut children_of: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for (id, children) in &lists {
        children_of[dense[id]] = children.iter().map(|c| dense[c]).collect();
    }
    let built = build_tree(dense[&root_id], &children_of)?;
    let input_label = built.input_label.iter().map(|&d| ids[d]).collect();
    Ok(ParsedTree {
        tree: built.tree,
        input_label,
    })
}

/// Renders a tree back into the plain-text format, using the tree's own
/// depth-first labels.
pub fn render_tree(tree: &RootedPlaneTree) -> String {
    let mut out = String::from("root 0\n");
    for v in 0..tree.vertex_count() as VertexId {
        let children = tree.children(v);
        if !children.is_empty() {
            out.push_str(&v.to_string());
            out.push(':');
            for c in children {
                out.push(' ');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
    }
    out
}
