use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discrete_fdr::procedures::{Procedure, DEFAULT_CHUNK_BUDGET};
use discrete_fdr::validate::TestFamily;
use discrete_fdr::{Alternative, Config, Direction, Method};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "discrete-fdr",
    version,
    about = "False discovery rate control for discrete p-values"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a procedure and write rejections and adjusted p-values.
    Analyze(AnalyzeArgs),
    /// Write the data behind transformation and critical value plots.
    Plotdata(PlotArgs),
    /// Time the fast and critical value paths on synthetic problems.
    Bench(BenchArgs),
    /// Run the oracle or Monte Carlo property suites.
    Validate(ValidateArgs),
    /// Estimate FDR and power by simulation.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Four columns X1,Y1,X2,Y2, one 2×2 table per row.
    Tables,
    /// drug_id,amnesia_count,other_adverse_count, pooled against all others.
    Hg2011,
    /// count,lambda0 for one-sided Poisson tests.
    Poisson,
    /// One raw p-value per row; supports from --supports.
    Pvalues,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Tables => "tables",
            Format::Hg2011 => "hg2011",
            Format::Poisson => "poisson",
            Format::Pvalues => "pvalues",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlternativeArg {
    Less,
    Greater,
    TwoSided,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::Less => Alternative::Less,
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::TwoSided => Alternative::TwoSided,
        }
    }
}

pub fn alternative_name(a: Alternative) -> &'static str {
    match a {
        Alternative::Less => "less",
        Alternative::Greater => "greater",
        Alternative::TwoSided => "two-sided",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dbh,
    Adbh,
    Dbr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Su,
    Sd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    Xi,
    CriticalValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Fdr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Fisher,
    Poisson,
}

impl From<FamilyArg> for TestFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Fisher => TestFamily::Fisher,
            FamilyArg::Poisson => TestFamily::Poisson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    SuFirstCrossing,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Tables)]
    pub format: Format,
    /// Space-separated atoms, one line per test (pvalues format).
    #[arg(long)]
    pub supports: Option<PathBuf>,
    /// Fisher test alternative [default: two-sided for tables, greater for hg2011]
    #[arg(long, value_enum)]
    pub alternative: Option<AlternativeArg>,
}

impl InputArgs {
    /// Checks the flag combination and resolves the default alternative.
    pub fn alternative(&self) -> CliResult<Option<Alternative>> {
        match (self.format, self.alternative) {
            (Format::Tables, a) => Ok(Some(a.unwrap_or(AlternativeArg::TwoSided).into())),
            (Format::Hg2011, a) => Ok(Some(a.unwrap_or(AlternativeArg::Greater).into())),
            (f, Some(_)) => Err(CliError::usage(format!(
                "--alternative applies to Fisher tests, not to --format {}",
                f.name()
            ))),
            (_, None) => Ok(None),
        }
    }

    pub fn check(&self) -> CliResult<()> {
        match (self.format, &self.supports) {
            (Format::Pvalues, None) => Err(CliError::usage("--format pvalues requires --supports")),
            (Format::Pvalues, Some(_)) | (_, None) => self.alternative().map(drop),
            (f, Some(_)) => Err(CliError::usage(format!(
                "--supports only applies to --format pvalues, not {}",
                f.name()
            ))),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProcedureArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Dbh)]
    pub method: MethodArg,
    /// Crossing direction; DBR always crosses step-down.
    #[arg(long, value_enum, default_value_t = DirectionArg::Sd)]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// DBR parameter [default: 0.05]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Byte budget of one materialised block in the adaptive kernels.
    #[arg(long, default_value_t = DEFAULT_CHUNK_BUDGET)]
    pub chunk_budget: usize,
}

impl ProcedureArgs {
    pub fn config(&self) -> CliResult<Config> {
        let method = match self.method {
            MethodArg::Dbh => Method::Dbh,
            MethodArg::Adbh => Method::Adbh,
            MethodArg::Dbr => Method::Dbr,
        };
        let direction = match self.direction {
            DirectionArg::Su => Direction::StepUp,
            DirectionArg::Sd => Direction::StepDown,
        };
        if self.lambda.is_some() && method != Method::Dbr {
            return Err(CliError::usage("--lambda only applies to --method dbr"));
        }
        let mut config = Config::new(method, direction)
            .with_alpha(self.alpha)
            .with_chunk_budget(self.chunk_budget);
        if let Some(l) = self.lambda {
            config = config.with_lambda(l);
        }
        config
            .validate()
            .map_err(|e| CliError::usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub procedure: ProcedureArgs,
    /// Also compute critical values and write <output>.crit.csv.
    #[arg(long)]
    pub critical_values: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    pub emit: Emit,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub what: What,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// DBR parameter for critical value plots [default: 0.05]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Procedures for critical value plots, e.g. dbh-sd,a-dbh-su,dbr [default: all]
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Procedure>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [250, 500, 1000, 3000])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 25)]
    pub reps: usize,
    #[command(flatten)]
    pub procedure: ProcedureArgs,
    #[arg(long, value_enum, default_value_t = OnOff::Off)]
    pub critical_values: OnOff,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Random problems (oracle) or replications (fdr).
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of hypotheses per simulated data set (fdr).
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Proportions of true nulls (fdr).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.8])]
    pub pi0: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Fisher)]
    pub family: FamilyArg,
    /// Inject a known defect to check that the suite notices.
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<MutationArg>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub procedure: ProcedureArgs,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 0.8)]
    pub pi0: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Fisher)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.2)]
    pub effect_size: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Range of Fisher group sizes, e.g. 20,200.
    #[arg(long, value_delimiter = ',')]
    pub row_totals: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    pub emit: Emit,
}
