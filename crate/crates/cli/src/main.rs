mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use manifest::{digest, OutputDigest, RunManifest};

#[derive(Parser, Debug)]
#[command(
    name = "trif",
    version,
    about = "Classify trifferent codes and minimal ternary linear codes"
)]
pub struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads (0 or unset: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Append a run record to this JSON-lines file.
    #[arg(long, global = true, env = "TRIF_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count equivalence classes a(n,l) by orderly generation.
    Enumerate(EnumerateArgs),
    /// Extend length n-1 codes by one coordinate.
    Extend(ExtendArgs),
    /// Chain extensions across several lengths.
    Pipeline(PipelineArgs),
    /// Canonical forms of the codes in a code list.
    Canon(InputArgs),
    /// Check trifference of the codes in a code list.
    Verify(InputArgs),
    /// Largest cardinality for each minimum distance, T(n,d).
    DistanceTable(DistanceArgs),
    /// Upper bounds on T(n).
    Bounds(BoundsArgs),
    /// Ternary linear codes given by a generator matrix.
    Linear(LinearArgs),
    /// Strong blocking sets in PG(k-1,3).
    Blocking(BlockingArgs),
    /// The built-in catalog of known codes.
    Catalog(CatalogArgs),
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 1)]
    pub min_card: usize,
    #[arg(long)]
    pub max_card: Option<usize>,
    /// Do not write class representatives.
    #[arg(long)]
    pub count_only: bool,
    /// Write representatives with at least `min-card` words here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cardinality at which the search tree is split into tasks.
    #[arg(long, default_value_t = 4)]
    pub split_card: usize,
    #[arg(long, env = "TRIF_CHECKPOINT_DIR")]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    /// Code list of bases (length n-1).
    #[arg(long)]
    pub bases: PathBuf,
    #[arg(long)]
    pub target_card: usize,
    #[arg(long)]
    pub target_length: Option<usize>,
    /// Treat the input codes as full codes and seed from their residuals.
    #[arg(long)]
    pub residual_of: bool,
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long)]
    pub from_length: usize,
    /// Minimum cardinality at each length, starting with `from-length`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub thresholds: Vec<usize>,
    /// Start from these codes instead of generating them.
    #[arg(long)]
    pub bases: Option<PathBuf>,
    #[arg(long)]
    pub no_prune: bool,
    /// Write each stage's codes into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, env = "TRIF_CHECKPOINT_DIR")]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Code list file.
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long)]
    pub length: usize,
    #[arg(long, env = "TRIF_CHECKPOINT_DIR")]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 30)]
    pub max_length: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LinearAction {
    Weights,
    Minimal,
    Trifferent,
    Dual,
    Expand,
}

#[derive(Args, Debug)]
pub struct LinearArgs {
    #[arg(value_enum)]
    pub action: LinearAction,
    /// Generator matrix, one row of digits per line.
    #[arg(long)]
    pub r#gen: PathBuf,
    /// Dual distance to test for (2 or 3).
    #[arg(long, default_value_t = 3)]
    pub at_least: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BlockingAction {
    Check,
    Reduce,
}

#[derive(Args, Debug)]
pub struct BlockingArgs {
    #[arg(value_enum)]
    pub action: BlockingAction,
    /// Use the columns of a generator matrix.
    #[arg(long, conflicts_with_all = ["points", "all_points"])]
    pub r#gen: Option<PathBuf>,
    /// Point list, one point of `dim` digits per line.
    #[arg(long, requires = "dim")]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Start from every point of PG(k-1,3).
    #[arg(long, conflicts_with = "points")]
    pub all_points: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CatalogAction {
    Verify,
    Show,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    #[arg(value_enum)]
    pub action: CatalogAction,
    #[arg(long, required_if_eq("action", "show"))]
    pub length: Option<usize>,
    #[arg(long, required_if_eq("action", "show"))]
    pub card: Option<usize>,
}

/// What a command produced. Files are written and digested by `main`.
#[derive(Default)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
    pub passed: bool,
    pub seed: Option<u64>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            passed: true,
            ..Default::default()
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = commands::run(&cli);
    let (code, outcome) = match outcome {
        Ok(o) => (if o.passed { 0 } else { 1 }, o),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for (path, text) in &outcome.files {
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    print!("{}", outcome.stdout);
    if let Some(path) = &cli.manifest {
        let mut outputs = vec![OutputDigest {
            name: "stdout".into(),
            sha256: digest(outcome.stdout.as_bytes()),
        }];
        outputs.extend(outcome.files.iter().map(|(p, t)| OutputDigest {
            name: p.display().to_string(),
            sha256: digest(t.as_bytes()),
        }));
        let record = RunManifest {
            command: commands::name(&cli.command).to_string(),
            parameters: std::env::args().skip(1).collect(),
            seed: outcome.seed,
            wall_seconds: start.elapsed().as_secs_f64(),
            outputs,
            exit_code: code,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        if let Err(e) = record.append_to(path) {
            eprintln!("error: manifest {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code as u8)
}
