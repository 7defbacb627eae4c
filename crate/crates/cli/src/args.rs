use std::path::PathBuf;

use budgetmech::constructions::FamilyName;
use budgetmech::model::{ClassSpec, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "budgetmech", version, about = "Revenue-optimal mechanisms for budget-constrained buyers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a class on a distribution file.
    Solve(SolveArgs),
    /// Generate a family instance.
    Family(FamilyArgs),
    /// Revenue ratio between two benchmarks across a family parameter.
    Sweep(SweepArgs),
    /// Check a mechanism file against a class.
    Verify(VerifyArgs),
    /// Query the extension of a mechanism on a grid of types.
    Extend(ExtendArgs),
    /// Closed-form mechanism for a public valuation and uniform budget.
    Example1(Example1Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file; defaults to a fixed name under $BUDGETMECH_OUT_DIR.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Budgets {
    #[arg(long, default_value_t = 20)]
    pub indicator_cap: usize,
    #[arg(long, default_value_t = 1 << 20)]
    pub enumeration_cap: u128,
    #[arg(long, default_value_t = 128)]
    pub oracle_grid_cap: u32,
    /// Strictness gap for unaffordable deviations in class M.
    #[arg(long, default_value = "0")]
    pub delta: Rational,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// m, sic, cb, posted or menu:<m>.
    #[arg(long)]
    pub class: ClassSpec,
    /// Use the grid oracle with this resolution instead of the exact solver.
    #[arg(long)]
    pub oracle_grid: Option<u32>,
    /// Also write the optimal mechanism as a mechanism file.
    #[arg(long)]
    pub witness_output: Option<PathBuf>,
    #[command(flatten)]
    pub budgets: Budgets,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FamilySelect {
    #[arg(long)]
    pub name: FamilyName,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long = "B", alias = "b")]
    pub b: Option<Rational>,
    #[arg(long = "H", alias = "h")]
    pub h: Option<Rational>,
    #[arg(long)]
    pub eps: Option<Rational>,
    /// Decimal digits for irrational masses.
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[command(flatten)]
    pub family: FamilySelect,
    /// For pair families, where to write the dominating distribution.
    #[arg(long)]
    pub upper_output: Option<PathBuf>,
    /// Also write the family's explicit mechanism.
    #[arg(long)]
    pub witness_output: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilySelect,
    /// Comma-separated values of the family's sweep parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<Rational>,
    /// A class, or `witness`.
    #[arg(long)]
    pub numerator: String,
    #[arg(long)]
    pub denominator: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub budgets: Budgets,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, short)]
    pub distribution: PathBuf,
    #[arg(long, short)]
    pub mechanism: PathBuf,
    #[arg(long)]
    pub class: ClassSpec,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[arg(long, short)]
    pub mechanism: PathBuf,
    /// Points per axis of the query grid.
    #[arg(long, default_value_t = 10)]
    pub grid: u32,
    /// Defaults to the largest valuation in the mechanism.
    #[arg(long)]
    pub v_max: Option<Rational>,
    /// Defaults to the largest budget in the mechanism.
    #[arg(long)]
    pub w_max: Option<Rational>,
    /// Keep support types on their original lottery.
    #[arg(long)]
    pub pinned: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Example1Args {
    #[arg(long)]
    pub v_hat: Rational,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Budgets `0, 1/grid, ..., 1` in the lottery table.
    #[arg(long, default_value_t = 10)]
    pub grid: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}
