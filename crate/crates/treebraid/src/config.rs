//! Job description assembled from command-line arguments.

/// Which consistency oracle a job should use where one applies: the
/// configuration-space cochain machinery, the block-assembled product
/// cocycles, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleChoice {
    Cubical,
    Blocks,
    Both,
}

impl OracleChoice {
    pub fn includes_cubical(self) -> bool {
        matches!(self, OracleChoice::Cubical | OracleChoice::Both)
    }

    pub fn includes_blocks(self) -> bool {
        matches!(self, OracleChoice::Blocks | OracleChoice::Both)
    }
}

/// Cells allowed per built complex when nothing else is configured.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// The configured cell budget: the `--budget` flag wins, then the
/// `TREEBRAID_BUDGET` environment variable, then the default.
pub fn resolve_budget(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("TREEBRAID_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_BUDGET)
    .max(1)
}

/// Everything a single invocation needs to know.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub command: String,
    pub tree_path: Option<String>,
    pub n: usize,
    pub dim: Option<usize>,
    pub oracle: OracleChoice,
    pub budget: u64,
    pub modulus: u64,
    pub out: Option<String>,
}

impl JobConfig {
    /// A configuration with every optional knob at its default.
    pub fn new(command: &str, tree_path: Option<String>, n: usize) -> Self {
        JobConfig {
            command: command.to_string(),
            tree_path,
            n: n.max(1),
            dim: None,
            oracle: OracleChoice::Both,
            budget: DEFAULT_BUDGET,
            modulus: 0,
            out: None,
        }
    }
}
