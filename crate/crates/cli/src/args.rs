//! Command-line surface: one subcommand per batch operation, with shared
//! flag groups for algorithm parameters, preprocessing, and convergence.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qrc",
    version,
    about = "Reputation, quality, and author-credit scoring for bipartite interaction networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic interaction data set from the agent model
    Simulate(SimulateArgs),
    /// Score one network with one algorithm and parameter point
    Rank(RankArgs),
    /// Score a whole parameter grid and tabulate metrics per point
    Sweep(SweepArgs),
    /// Compare a scores file against ground truth and/or paper metadata
    Evaluate(EvaluateArgs),
    /// Tabulate the cumulative degree distribution of one network side
    DegreeDist(DegreeDistArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Plain mutual reinforcement (reputation = weighted sum of qualities)
    Bihits,
    /// Degree-damped, mean-shifted variant with four tuning knobs
    Qr,
    /// Author-coupled variant on degree-normalized views, blended by omega
    Er,
    /// Author-credit extension of qr, blended by lambda
    Qrc,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Bihits => "bihits",
            Algo::Qr => "qr",
            Algo::Er => "er",
            Algo::Qrc => "qrc",
        }
    }
}

/// Algorithm tuning knobs. The two-letter names mirror the symbols used
/// throughout: t* are degree-damping exponents, r* are mean-shift strengths,
/// f* are the author-side damping exponents.
#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    /// Quality-update damping exponent (theta_Q)
    #[arg(long, default_value_t = 0.0)]
    pub tq: f64,
    /// Reputation-update damping exponent (theta_R)
    #[arg(long, default_value_t = 0.0)]
    pub tr: f64,
    /// Mean shift of quality inside the reputation update (rho_Q)
    #[arg(long, default_value_t = 0.0)]
    pub rq: f64,
    /// Mean shift of reputation inside the quality update (rho_R)
    #[arg(long, default_value_t = 0.0)]
    pub rr: f64,
    /// Credit-update damping exponent over author output (phi_A)
    #[arg(long, default_value_t = 0.0)]
    pub fa: f64,
    /// Author-count damping exponent inside the quality update (phi_P)
    #[arg(long, default_value_t = 0.0)]
    pub fp: f64,
    /// Mean shift of quality inside the credit update (rho_A)
    #[arg(long, default_value_t = 0.0)]
    pub ra: f64,
    /// Blend between user feedback and author credit in qrc (0 = ignore authors)
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Blend between reader and author signals in er (0 = readers only)
    #[arg(long, default_value_t = 0.2)]
    pub omega: f64,
}

/// Event-stream preprocessing. Repeat interactions are always collapsed to
/// the earliest per (user, paper) pair; everything else is opt-in.
#[derive(Debug, Clone, Args)]
pub struct PrepArgs {
    /// Drop users who uploaded nothing and acted at most once
    #[arg(long)]
    pub filter_low_activity: bool,
    /// File of user ids to drop, one per line
    #[arg(long)]
    pub blocklist: Option<PathBuf>,
    /// Drop papers submitted before this day, and their events (needs --papers)
    #[arg(long)]
    pub min_day: Option<i64>,
    /// Link weight of an upload
    #[arg(long, default_value_t = 1.0)]
    pub w_up: f64,
    /// Link weight of a download
    #[arg(long, default_value_t = 0.1)]
    pub w_down: f64,
    /// Link weight of a view
    #[arg(long, default_value_t = 0.05)]
    pub w_view: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ConvergenceArgs {
    /// Stop once the summed per-sweep score change falls below this
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Give up after this many sweeps
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// RNG seed; the only source of randomness
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of users
    #[arg(long, default_value_t = 1000)]
    pub users: usize,
    /// Number of time steps
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Shape of the ability/activity distribution
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Headroom of item fitness above uploader ability
    #[arg(long, default_value_t = 0.5)]
    pub fitness_spread: f64,
    /// Download selectivity exponent
    #[arg(long, default_value_t = 5.0)]
    pub selectivity: f64,
    /// Per-step upload probability of an active user
    #[arg(long, default_value_t = 0.1)]
    pub upload_prob: f64,
    /// Upload link weight
    #[arg(long, default_value_t = 1.0)]
    pub w_up: f64,
    /// Download link weight
    #[arg(long, default_value_t = 0.1)]
    pub w_down: f64,
    /// Download attempts per active user per step
    #[arg(long, default_value_t = 2)]
    pub downloads_per_step: usize,
    /// Directory receiving events.csv, truth_users.csv, truth_items.csv, manifest.txt
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Interaction events CSV (user_id,paper_id,action,timestamp)
    #[arg(long)]
    pub events: PathBuf,
    /// Paper metadata CSV; required for er and qrc
    #[arg(long)]
    pub papers: Option<PathBuf>,
    /// Use plain 0/1 adjacency instead of interaction weights (bihits only)
    #[arg(long)]
    pub unweighted: bool,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[command(flatten)]
    pub convergence: ConvergenceArgs,
    /// Output scores CSV (class,id,score,rank); manifest goes to <out>.manifest
    #[arg(long, default_value = "scores.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub papers: Option<PathBuf>,
    /// Ground-truth users CSV adds correlation columns
    #[arg(long)]
    pub truth_users: Option<PathBuf>,
    /// Ground-truth items CSV adds correlation columns
    #[arg(long)]
    pub truth_items: Option<PathBuf>,
    /// Grid axis as PARAM=v1,v2,...; repeatable, axes combine as a product
    #[arg(long)]
    pub vary: Vec<String>,
    /// Preset grid: every 0/1 combination of tq, tr, rq, rr
    #[arg(long)]
    pub qr16: bool,
    /// Top-k size for the metadata metric columns
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long)]
    pub unweighted: bool,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[command(flatten)]
    pub convergence: ConvergenceArgs,
    /// Output table, one row per grid point; manifest goes to <out>.manifest
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Scores CSV produced by rank (class,id,score,rank)
    #[arg(long)]
    pub scores: PathBuf,
    /// Second scores CSV; adds a rank-sum comparison of top-k metrics (needs --papers)
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Ground-truth users CSV (user_id,ability,activity)
    #[arg(long)]
    pub truth_users: Option<PathBuf>,
    /// Ground-truth items CSV (item_id,fitness,created_at)
    #[arg(long)]
    pub truth_items: Option<PathBuf>,
    /// Paper metadata CSV; enables the top-k metric report
    #[arg(long)]
    pub papers: Option<PathBuf>,
    /// Events CSV; adds per-paper download counts to the top-k report
    #[arg(long)]
    pub events: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Also write the report as metric,value CSV (with manifest sidecar)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    User,
    Item,
    Author,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActionFilter {
    All,
    Upload,
    Download,
    View,
}

impl ActionFilter {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionFilter::All => "all",
            ActionFilter::Upload => "upload",
            ActionFilter::Download => "download",
            ActionFilter::View => "view",
        }
    }
}

#[derive(Debug, Args)]
pub struct DegreeDistArgs {
    /// Which node class to tabulate
    #[arg(long, value_enum)]
    pub side: SideArg,
    /// Restrict to one interaction kind (user/item sides only)
    #[arg(long, value_enum, default_value_t = ActionFilter::All)]
    pub action: ActionFilter,
    /// Events CSV; required for user and item sides
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Paper metadata CSV; required for the author side
    #[arg(long)]
    pub papers: Option<PathBuf>,
    /// Drop this user's events before tabulating; repeatable
    #[arg(long)]
    pub exclude_user: Vec<String>,
    /// Output CSV (degree,fraction); manifest goes to <out>.manifest
    #[arg(long, default_value = "degree_dist.csv")]
    pub out: PathBuf,
}
