use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvsteer::thresholds::{Criterion, Family, Variable};

#[derive(Debug, Parser)]
#[command(
    name = "cvsteer",
    version,
    about = "EPR steering of two-mode Gaussian and CV Werner states"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Numerical tolerance. Series truncation for `steer`/`correlators`,
    /// bisection width for `threshold`/`figure`.
    #[arg(long, global = true, env = "CVSTEER_TOL")]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write data here, plus a `.meta.json` sidecar, instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Gaussian,
    TypeI,
    TypeIi,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Gaussian => Criterion::Gaussian,
            CriterionArg::TypeI => Criterion::TypeI,
            CriterionArg::TypeIi => Criterion::TypeIi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Tmst,
    Werner,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Tmst => Family::Tmst,
            FamilyArg::Werner => Family::Werner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariableArg {
    S,
    R,
    U,
}

impl From<VariableArg> for Variable {
    fn from(v: VariableArg) -> Self {
        match v {
            VariableArg::S => Variable::S,
            VariableArg::R => Variable::R,
            VariableArg::U => Variable::U,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyScope {
    All,
    Fock,
    Hermite,
    Correlators,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fock-basis elements ⟨m1 m2|ρ|n1 n2⟩ of a TMST.
    Fock(FockArgs),
    /// Evaluate one steering criterion on one state.
    Steer(SteerArgs),
    /// Pseudospin correlators ⟨s_x s_x⟩, ⟨s_y s_y⟩, ⟨s_z s_z⟩.
    Correlators(CorrelatorArgs),
    /// Steering threshold in η (TMST) or p (Werner), at a point or along a sweep.
    Threshold(ThresholdArgs),
    /// Regenerate the data behind a figure.
    Figure(FigureArgs),
    /// Werner-state thresholds and, given `--p`, verdicts.
    Werner(WernerArgs),
    /// Multivariable Hermite values at the origin and their Fock counterparts.
    Hermite(HermiteArgs),
    /// Randomized comparisons against independent oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct TmstArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
}

#[derive(Debug, Args)]
pub struct FockArgs {
    #[command(flatten)]
    pub tmst: TmstArgs,
    /// Index quadruple `m1,m2,n1,n2`; repeatable.
    #[arg(long, value_parser = parse_index, required_unless_present = "cutoff")]
    pub idx: Vec<[usize; 4]>,
    /// Dump every nonzero element with indices below this cutoff.
    #[arg(long, conflicts_with = "idx")]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StateArgs {
    /// Two-mode squeezed vacuum with squeezing `s`.
    #[arg(long, value_name = "S")]
    pub epr_s: Option<f64>,
    /// TMST `s,eta,r`.
    #[arg(long, value_name = "S,ETA,R", value_parser = parse_triple)]
    pub tmst: Option<[f64; 3]>,
    /// Gaussian standard form `a,b,c,d`.
    #[arg(long, value_name = "A,B,C,D", value_parser = parse_quad, allow_hyphen_values = true)]
    pub sf: Option<[f64; 4]>,
    /// CV Werner state `p,s,u`.
    #[arg(long, value_name = "P,S,U", value_parser = parse_triple)]
    pub werner: Option<[f64; 3]>,
}

#[derive(Debug, Args)]
pub struct SteerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum)]
    pub criterion: CriterionArg,
}

#[derive(Debug, Args)]
pub struct CorrelatorArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value_t = CriterionArg::TypeI)]
    pub criterion: CriterionArg,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value_t = FamilyArg::Tmst)]
    pub family: FamilyArg,
    /// Sweep variable; without it a single threshold is computed.
    #[arg(long, value_enum)]
    pub axis: Option<VariableArg>,
    #[arg(long, requires = "axis")]
    pub min: Option<f64>,
    #[arg(long, requires = "axis")]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 21, requires = "axis")]
    pub points: usize,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Werner thermal parameter; tied to `s` when absent.
    #[arg(long)]
    pub u: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub id: FigureId,
    /// Grid points per axis (figure-specific default).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WernerArgs {
    #[arg(long)]
    pub s: f64,
    /// Thermal parameter; defaults to `s`.
    #[arg(long)]
    pub u: Option<f64>,
    /// Mixing probability to test against each threshold.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct HermiteState {
    /// TMST `s,eta,r`.
    #[arg(long, value_name = "S,ETA,R", value_parser = parse_triple)]
    pub tmst: Option<[f64; 3]>,
    /// Standard form `a,b,c,d` with `d = -c`.
    #[arg(long, value_name = "A,B,C,D", value_parser = parse_quad, allow_hyphen_values = true)]
    pub sf: Option<[f64; 4]>,
}

#[derive(Debug, Args)]
pub struct HermiteArgs {
    #[command(flatten)]
    pub state: HermiteState,
    #[arg(long, value_parser = parse_index, required = true)]
    pub idx: Vec<[usize; 4]>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = VerifyScope::All)]
    pub scope: VerifyScope,
    /// Random parameter draws per check.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Largest total index degree for the Hermite check.
    #[arg(long, default_value_t = 8)]
    pub max_degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop drawing new cases after this many seconds per check.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

fn parse_list<T: std::str::FromStr, const N: usize>(s: &str) -> Result<[T; N], String>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated values, got {}", parts.len()));
    }
    let mut out = Vec::with_capacity(N);
    for p in parts {
        out.push(p.parse::<T>().map_err(|e| format!("`{p}`: {e}"))?);
    }
    out.try_into().map_err(|_| unreachable!())
}

fn parse_index(s: &str) -> Result<[usize; 4], String> {
    parse_list(s)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_list(s)
}

fn parse_quad(s: &str) -> Result<[f64; 4], String> {
    parse_list(s)
}
