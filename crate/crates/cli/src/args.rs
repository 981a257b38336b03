use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use timedeq::algebra::CanonicalHom;
use timedeq::equivalence::LangMode;

#[derive(Parser, Debug)]
#[command(name = "timedeq", version, about = "Saturation-based equivalence checking for timed systems")]
pub struct Cli {
    /// Output format; each command picks a sensible default.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Timed automata.
    #[command(subcommand)]
    Ta(TaCommand),
    /// Saturate a system along one of the four canonical homomorphisms.
    Saturate(SaturateArgs),
    /// Decide one equivalence, for a pair or as a partition.
    Check(CheckArgs),
    /// All eight equivalences and the refinement checks between them.
    Spectrum(SpectrumArgs),
    /// Markov chains.
    #[command(subcommand)]
    Mc(McCommand),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Render a system as Graphviz DOT.
    ExportDot(ExportDotArgs),
}

/// A positional input file; `-` or nothing reads stdin.
#[derive(Args, Debug)]
pub struct Input {
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum TaCommand {
    /// Discretize an automaton into a timed system.
    Compile(CompileArgs),
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    /// Largest delay materialized per step.
    #[arg(long)]
    pub t_max: u64,
    /// Initial state, `loc` or `loc:c=1,d=0`; repeatable. Default: every location at zero.
    #[arg(long)]
    pub initial: Vec<String>,
    /// Stop after this many discrete states.
    #[arg(long, default_value_t = timedeq::timed_automata::STATE_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HomArg {
    /// Strong timed (identity on durations).
    Id,
    /// Strong time-abstract.
    Abstract,
    /// Weak timed.
    Weak,
    /// Weak time-abstract.
    WeakAbstract,
}

impl From<HomArg> for CanonicalHom {
    fn from(h: HomArg) -> Self {
        match h {
            HomArg::Id => CanonicalHom::StrongTimed,
            HomArg::Abstract => CanonicalHom::StrongAbstract,
            HomArg::Weak => CanonicalHom::WeakTimed,
            HomArg::WeakAbstract => CanonicalHom::WeakAbstract,
        }
    }
}

#[derive(Args, Debug)]
pub struct SaturateArgs {
    #[arg(long, value_enum)]
    pub hom: HomArg,
    /// Largest duration materialized; fixes the bounds (no extension).
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Power / star depth; fixes the bounds (no extension).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Emit DOT instead of a system file.
    #[arg(long)]
    pub dot: bool,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    StrongTimed,
    WeakTimed,
    StrongAbstract,
    WeakAbstract,
}

impl From<RelationArg> for CanonicalHom {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::StrongTimed => CanonicalHom::StrongTimed,
            RelationArg::WeakTimed => CanonicalHom::WeakTimed,
            RelationArg::StrongAbstract => CanonicalHom::StrongAbstract,
            RelationArg::WeakAbstract => CanonicalHom::WeakAbstract,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    Bisim,
    Lang,
}

/// Bound overrides shared by `check` and `spectrum`.
#[derive(Args, Debug, Clone, Copy)]
pub struct BoundArgs {
    /// Duration bound for saturation and total time bound for language enumeration.
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Power / star depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Word length bound for language enumeration.
    #[arg(long)]
    pub len: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub relation: RelationArg,
    #[arg(long, value_enum)]
    pub semantics: SemanticsArg,
    /// Compare two states instead of printing the partition.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    pub pair: Option<Vec<String>>,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Subcommand, Debug)]
pub enum McCommand {
    /// Coarsest partition with uniform block-hitting probabilities.
    Lump(LumpArgs),
    /// Hitting probabilities into a set of states.
    Hit(HitArgs),
}

#[derive(Args, Debug)]
pub struct LumpArgs {
    /// Float tolerance when comparing probabilities.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Compare exact rationals instead.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct HitArgs {
    /// Target state; repeatable.
    #[arg(long, required = true)]
    pub target: Vec<String>,
    /// Value iteration to this tolerance instead of an exact solve.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Weak steps by naive rule closure (Boolean systems).
    WeakSteps(OracleStepsArgs),
    /// Weak weights by the step-count recursion (weighted systems).
    Weighted(OracleDepthArgs),
    /// Weak generator sets by path enumeration (convex systems).
    Convex(OracleDepthArgs),
    /// Bounded language of one state by path enumeration.
    Languages(OracleLangArgs),
    /// Monte Carlo hitting estimate with a Wilson interval; seeded by TIMEDEQ_SEED.
    Hitting(OracleHitArgs),
}

#[derive(Args, Debug)]
pub struct OracleStepsArgs {
    #[arg(long)]
    pub t_max: u64,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct OracleDepthArgs {
    #[arg(long)]
    pub t_max: u64,
    #[arg(long)]
    pub depth: usize,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Tl,
    Utl,
    Wtl,
    Wutl,
}

impl From<ModeArg> for LangMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Tl => LangMode::Tl,
            ModeArg::Utl => LangMode::Utl,
            ModeArg::Wtl => LangMode::Wtl,
            ModeArg::Wutl => LangMode::Wutl,
        }
    }
}

#[derive(Args, Debug)]
pub struct OracleLangArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long)]
    pub time: Option<u64>,
    /// Step depth for weighted and convex weak closures.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct OracleHitArgs {
    #[arg(long, required = true)]
    pub target: Vec<String>,
    #[arg(long)]
    pub start: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 60)]
    pub horizon: usize,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct ExportDotArgs {
    /// Graph name.
    #[arg(long)]
    pub name: Option<String>,
    #[command(flatten)]
    pub input: Input,
}
