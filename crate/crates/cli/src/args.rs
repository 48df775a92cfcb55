use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "gamelab",
    version,
    about = "Impartial game solvers and push-the-button compounds"
)]
pub struct Cli {
    /// Worker threads for sweeps (heatmap). Defaults to 1.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Load the memo table from FILE before solving and save it afterwards.
    #[arg(long, global = true, value_name = "FILE")]
    pub cache: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Outcome of a position.
    Solve(GameArgs),
    /// Grundy value of a position.
    Grundy(GameArgs),
    /// Table of two-heap P-positions with both coordinates at most --max.
    Ppos(PposArgs),
    /// Grundy values of Zeruclid (1, a, b) for 0 <= a, b <= --max.
    Heatmap(HeatmapArgs),
    /// Certified period of a subtraction-game push compound.
    Period(PeriodArgs),
    /// Push Cram on an empty board.
    Cram(CramArgs),
    /// Run an exhaustive verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[group(id = "game", required = true, multiple = false)]
pub struct GameSelect {
    /// Heap ruleset: nim, wythoff, euclid, zeruclid, subtraction:LIST.
    #[arg(long, group = "game")]
    pub ruleset: Option<String>,
    /// Push compound: nim-euclid, nim-wythoff, euclid-nim, wythoff-nim.
    #[arg(long, group = "game")]
    pub compound: Option<String>,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    #[command(flatten)]
    pub game: GameSelect,
    /// Comma-separated heap sizes.
    #[arg(long)]
    pub pos: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Normal)]
    pub convention: ConventionArg,
    /// For compounds: whether the button has been pushed.
    #[arg(long, value_enum, default_value_t = PhaseArg::Before)]
    pub phase: PhaseArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Normal,
    Misere,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Before,
    After,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed-form characterization.
    Oracle,
    /// Exhaustive search.
    Search,
}

#[derive(Args, Debug)]
pub struct PposArgs {
    #[command(flatten)]
    pub game: GameSelect,
    #[arg(long)]
    pub max: u64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Normal)]
    pub convention: ConventionArg,
    /// How compound tables are produced; heap rulesets are always searched.
    #[arg(long, value_enum, default_value_t = Method::Oracle)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub max: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PeriodArgs {
    /// First ruleset Subtraction({1..k1}).
    #[arg(long, requires = "k2", conflicts_with_all = ["s1", "r2"])]
    pub k1: Option<u64>,
    /// Second ruleset Subtraction({1..k2}).
    #[arg(long, requires = "k1")]
    pub k2: Option<u64>,
    /// Subtraction set of the first ruleset, e.g. 1,2,5.
    #[arg(long, requires = "r2")]
    pub s1: Option<String>,
    /// Second ruleset on one heap: subtraction:LIST, nim, ...
    #[arg(long, requires = "s1")]
    pub r2: Option<String>,
    #[arg(long, value_enum, default_value_t = ConventionArg::Normal)]
    pub convention: ConventionArg,
    /// Sample length when the second ruleset's period must be detected.
    #[arg(long, default_value_t = 2000)]
    pub length: usize,
    /// Number of leading outcomes to echo.
    #[arg(long, default_value_t = 40)]
    pub show: usize,
}

#[derive(Args, Debug)]
pub struct CramArgs {
    #[arg(long)]
    pub rows: u32,
    #[arg(long)]
    pub cols: u32,
    /// Also check whether every first move wins.
    #[arg(long)]
    pub bluff: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// push-lemma, push-characterization, nim-euclid-triple, zeruclid-bounds,
    /// zeruclid-residues, subtraction-periods, cram-propositions, or all.
    pub suite: String,
    /// Seed for the randomized subtraction instances.
    #[arg(long)]
    pub seed: Option<u64>,
}
