use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ineqcert", version, about = "Certifies G(θ,x,y) ≥ 0 and F(ℓ,x,y) ≥ 0: exact identity ledger, interval branch-and-bound, critical point search")]
pub struct Cli {
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (also INEQCERT_WORKERS); 1 runs sequentially.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replays the algebraic steps of both proofs exactly.
    Identities(IdentitiesArgs),
    /// Runs the branch-and-bound certification and writes a certificate.
    Certify(CertifyArgs),
    /// Multistart Newton probe for stationary points, plus the α/β case split.
    Critical(CriticalArgs),
    /// Brute-force grid evaluation.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeSel {
    Trig,
    Hyp,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SingleMode {
    Trig,
    Hyp,
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeSel>,
    /// Verify only these steps (id such as G19 or name such as G_subtract).
    #[arg(long = "step")]
    pub steps: Vec<String>,
    /// Skip the cos ↔ cosh mirror comparison.
    #[arg(long)]
    pub no_mirror: bool,
    /// Re-verify a claim fixture (`ID: lhs = rhs` lines) instead of the
    /// built-in ledger.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Write the ledger's claims as a fixture file.
    #[arg(long)]
    pub export_fixture: Option<PathBuf>,
    /// Negative control: corrupt this step before verifying it.
    #[arg(long)]
    pub tamper: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// 1 (trigonometric), 2 (hyperbolic) or both.
    #[arg(long)]
    pub lemma: Option<String>,
    /// Tube radius in compact coordinates; 0 disables the tube.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub slice_width: Option<f64>,
    /// Region box budget; accepts `2e6`.
    #[arg(long)]
    pub budget: Option<String>,
    #[arg(long)]
    pub slice_budget: Option<String>,
    #[arg(long)]
    pub max_depth: Option<u32>,
    /// Leaves are accepted when their lower bound exceeds this.
    #[arg(long)]
    pub target_delta: Option<f64>,
    /// Certify the function minus this constant (negative control).
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[arg(long)]
    pub corner_policy: Option<String>,
    #[arg(long)]
    pub corner_samples: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Outer box in compact coordinates `t0:t1,u0:u1,v0:v1`; repeatable.
    #[arg(long = "region")]
    pub regions: Vec<String>,
    /// Residual boxes listed in the certificate.
    #[arg(long)]
    pub keep_boxes: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(long, value_enum)]
    pub mode: Option<SingleMode>,
    #[arg(long)]
    pub starts: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<u32>,
    /// Start from the full system instead of freezing the angle first.
    #[arg(long)]
    pub full: bool,
    /// CSV with one row per start (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary with the α/β case split.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub mode: Option<SingleMode>,
    /// Points per axis (at least 2).
    #[arg(long)]
    pub grid: Option<String>,
    /// Box `t0:t1,x0:x1,y0:y1` (compact coordinates with --compact).
    #[arg(long = "box")]
    pub bx: Option<String>,
    /// Grid in compact coordinates, skipping the tube of radius --rho.
    #[arg(long)]
    pub compact: bool,
    #[arg(long)]
    pub rho: Option<f64>,
    /// CSV with one row per grid point (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary with the grid minimum.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}
