//! Command-line arguments and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kmilnor::config::Caps;
use kmilnor::fields::Field;
use kmilnor::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Environment variable overriding the K-group cache directory.
pub const CACHE_ENV: &str = "KMILNOR_CACHE_DIR";

#[derive(Parser, Debug, Clone)]
#[command(name = "kmilnor", version, about = "Exact Milnor K-theory and truncated B_n computations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Field: `q` for the rationals, `p=N` for F_N(t).
    #[arg(long, global = true, default_value = "q")]
    pub field: String,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// K-group cache directory (overrides the environment).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Keep computed K-groups in memory only.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Largest accepted support size
    #[arg(long, global = true)]
    pub max_support: Option<usize>,
    /// Largest accepted n
    #[arg(long, global = true)]
    pub max_n: Option<usize>,
    /// Largest residue field order for discrete logs
    #[arg(long, global = true)]
    pub max_residue: Option<u64>,
    /// Largest matrix size for bar-resolution chains
    #[arg(long, global = true)]
    pub max_matrix: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Steinberg,
    ProductFormula,
    DdZero,
    BarCycles,
    Exterior,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GoldenAction {
    Record,
    Check,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Factor a field element over its places.
    Factor {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Normal form of a Milnor K expression such as `2*{2,3} - {-1,5}`.
    Nf {
        #[arg(allow_hyphen_values = true)]
        expression: String,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Support for the dd-zero suite (defaults per field).
        #[arg(long, allow_hyphen_values = true)]
        support: Option<String>,
        /// Degree for the dd-zero suite.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Truncated B_n report for one support.
    Bn {
        #[arg(long, allow_hyphen_values = true)]
        support: String,
        #[arg(long)]
        n: usize,
        /// Include per-stage timings (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Truncated B_n along a chain of growing supports, with induced maps.
    Scan {
        #[arg(long)]
        n: usize,
        /// Repeat for each support in the chain, smallest first.
        #[arg(long = "support", allow_hyphen_values = true, required = true)]
        supports: Vec<String>,
    },
    /// Build the κ chain for terms read from a JSON file.
    Kappa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: PathBuf,
    },
    /// χ′ data and the t₂″ certificate for kernel elements of δ₂.
    Chiprime {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        support: String,
        /// JSON file with terms; without it every kernel basis element is used.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Record or check golden B_n values.
    Golden {
        #[arg(value_enum)]
        action: GoldenAction,
        #[arg(long)]
        file: PathBuf,
        /// Cases as `FIELD:SUPPORT:N`, e.g. `q:-1,2,3:3` or `p=3:t,t+1:5`.
        #[arg(long = "case", allow_hyphen_values = true)]
        cases: Vec<String>,
    },
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "serialize_field")]
    pub field: Field,
    pub support: Option<String>,
    pub n_range: Option<(usize, usize)>,
    pub caps: Caps,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
}

fn serialize_field<S: serde::Serializer>(f: &Field, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.tag())
}

impl RunConfig {
    /// Resolve arguments and environment into a configuration.
    pub fn from_cli(cli: &Cli) -> Result<RunConfig> {
        let g = &cli.global;
        let mut caps = Caps::default();
        if let Some(v) = g.max_support {
            caps.max_support = v;
        }
        if let Some(v) = g.max_n {
            caps.max_n = v;
        }
        if let Some(v) = g.max_residue {
            caps.residue_field_order = v;
        }
        if let Some(v) = g.max_matrix {
            caps.max_matrix_size = v;
        }
        let field = parse_field(&g.field, &caps)?;
        let (support, n_range) = match &cli.command {
            Command::Bn { support, n, .. } | Command::Chiprime { support, n, .. } => (Some(support.clone()), Some((*n, *n))),
            Command::Verify { support, n, .. } => (support.clone(), Some((*n, *n))),
            Command::Scan { n, supports } => (Some(supports.join(";")), Some((*n, *n))),
            Command::Kappa { n, .. } => (None, Some((*n, *n))),
            _ => (None, None),
        };
        let cache_dir = if g.no_cache {
            None
        } else {
            g.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)).or_else(default_cache_dir)
        };
        let format = if g.json { OutputFormat::Json } else { g.format };
        let rc = RunConfig { field, support, n_range, caps, cache_dir, format, seed: g.seed };
        rc.validate()?;
        Ok(rc)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.caps;
        if c.max_support == 0 || c.max_n == 0 || c.residue_field_order == 0 || c.max_matrix_size == 0 {
            return Err(Error::invalid("caps must be positive"));
        }
        Ok(())
    }

    /// The single random source of a run.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .map(|d| d.join("kmilnor"))
}

/// `q` (or `Q`) for the rationals, `p=N` for `F_N(t)`.
pub fn parse_field(s: &str, caps: &Caps) -> Result<Field> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(Field::Rational);
    }
    let p = t
        .strip_prefix("p=")
        .and_then(|v| v.parse::<u64>().ok())
        .ok_or_else(|| Error::invalid(format!("unknown field {s:?}; use q or p=N")))?;
    Field::function_field(p, caps)
}
