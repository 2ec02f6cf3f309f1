//! `ctrade`: error exponents and privacy-utility trade-offs from the shell.

mod commands;
mod error;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chernoff_tradeoff::bayes::TestTarget;

#[derive(Parser)]
#[command(
    name = "ctrade",
    version,
    about = "Error exponents and privacy-utility trade-offs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// KL divergence, Chernoff information and T-divergence of given pmfs.
    Divergence(DivergenceArgs),
    /// Asymptotic error exponent of the utility and/or privacy test.
    Exponent(ExponentArgs),
    /// Exact minimal Bayes error at a finite horizon.
    ExactError(ExactArgs),
    /// Optimal privacy exponent across a grid of utility guarantees.
    Tradeoff(TradeoffArgs),
    /// Seeded consistency suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct DivergenceArgs {
    /// D(p || q) of the first two pmfs.
    #[arg(long)]
    pub kl: bool,
    /// Chernoff information of the first two pmfs.
    #[arg(long)]
    pub chernoff: bool,
    /// T(q1 || q2; q3) of three pmfs.
    #[arg(long)]
    pub t: bool,
    /// Work on the common support instead of rejecting zeros.
    #[arg(long)]
    pub relaxed: bool,
    /// Pmfs: `bern:THETA` or a JSON file.
    #[arg(required = true, num_args = 2..=3)]
    pub pmfs: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Utility,
    Privacy,
    Both,
}

impl TargetArg {
    pub fn targets(self) -> Vec<TestTarget> {
        match self {
            TargetArg::Utility => vec![TestTarget::Utility],
            TargetArg::Privacy => vec![TestTarget::Privacy],
            TargetArg::Both => TestTarget::ALL.to_vec(),
        }
    }
}

#[derive(Args)]
pub struct ModelArgs {
    /// Model JSON; the bundled example when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// `identity` or a policy JSON file.
    #[arg(long, default_value = "identity")]
    pub policy: String,
    #[arg(long, value_enum, default_value = "both")]
    pub target: TargetArg,
}

#[derive(Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    /// Also compute the T-form and Sanov-form values and compare.
    #[arg(long)]
    pub cross_check: bool,
    /// Lattice spacing of the Sanov-form search.
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Every output sequence (any block length).
    Enumerate,
    /// Type classes (single-slot policies only).
    Types,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Enumerate => "enumerate",
            MethodArg::Types => "types",
        }
    }
}

#[derive(Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    /// Horizon in policy blocks.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "enumerate")]
    pub method: MethodArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Args)]
pub struct TradeoffArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Supply slacks, `start:stop:step` or a comma list.
    #[arg(long, default_value = "1,2")]
    pub s: String,
    /// Utility guarantees, `start:stop:step` or a comma list.
    #[arg(long, default_value = "0:0.16:0.01")]
    pub lambda_grid: String,
    /// Policy block length.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Add the finite-length correction to each guarantee.
    #[arg(long, value_enum, default_value = "off")]
    pub correction: Switch,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Disable worker threads (the output is the same either way).
    #[arg(long)]
    pub serial: bool,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// `all` or one suite name.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Trials per suite; each suite's default when omitted.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub model: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Divergence(a) => commands::divergence::run(&a),
        Command::Exponent(a) => commands::exponent::run(&a),
        Command::ExactError(a) => commands::exact::run(&a),
        Command::Tradeoff(a) => commands::tradeoff::run(&a),
        Command::Verify(a) => commands::verify::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
