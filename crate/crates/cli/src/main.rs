//! `rydberg-gate`: simulate, sweep, calibrate and stress-test two-atom
//! Rydberg gates.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence, 1 anything else.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rydberg-gate", version, about = "Two-atom Rydberg gate simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one protocol and print its gate report.
    Simulate(SimulateArgs),
    /// Sweep κ = Ω/V of the geometric protocol at Ω = 1.
    Sweep(SweepArgs),
    /// Find κ giving a target controlled phase.
    Calibrate(CalibrateArgs),
    /// Blockade and geometric gates side by side at equal Ω.
    Compare(CompareArgs),
    /// Monte-Carlo fidelity under quasi-static Rabi and spacing noise.
    Robustness(RobustnessArgs),
    /// Blockade gate over a list of interaction strengths.
    BlockadeScan(BlockadeScanArgs),
    /// Spacing-noise table for both protocols at equal relative spacing noise.
    Contrast(ContrastArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Geometric,
    Blockade,
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file of flag values; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    /// κ = Ω/V (geometric only).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Rabi frequency Ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Interaction strength V.
    #[arg(long)]
    pub v: Option<f64>,
    /// Target controlled phase for the fidelity [rad].
    #[arg(long, allow_negative_numbers = true)]
    pub target_phi: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[arg(long)]
    pub kappa_min: Option<f64>,
    #[arg(long)]
    pub kappa_max: Option<f64>,
    /// Number of evenly spaced κ values, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CalibrateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub target_phi: Option<f64>,
    /// κ search interval.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub bracket: Option<Vec<f64>>,
    /// Preferred κ when the interval holds several roots.
    #[arg(long)]
    pub seed_kappa: Option<f64>,
    /// Rabi frequency for the final report.
    #[arg(long)]
    pub omega: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CompareArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Interaction strength of the blockade gate.
    #[arg(long)]
    pub blockade_v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub target_phi: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RobustnessArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub v: Option<f64>,
    /// Relative standard deviation of Ω.
    #[arg(long)]
    pub sigma_omega: Option<f64>,
    /// Relative standard deviation of the spacing R.
    #[arg(long)]
    pub sigma_r: Option<f64>,
    /// van der Waals coefficient; defaults to V·r0⁶.
    #[arg(long)]
    pub c6: Option<f64>,
    /// Nominal spacing.
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub target_phi: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct BlockadeScanArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    /// Comma-separated interaction strengths.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub v: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ContrastArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub blockade_v_over_omega: Option<f64>,
    #[arg(long)]
    pub sigma_r: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    /// Message plus an optional diagnostic table.
    NonConvergence(String, Option<String>),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence(..) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<rydberg_gates::Error> for CliError {
    fn from(e: rydberg_gates::Error) -> Self {
        use rydberg_gates::Error as E;
        match e {
            E::InvalidParameter(_) => CliError::Config(e.to_string()),
            E::NoBracket { ref scan, .. } => {
                let mut table = String::from("kappa\tphi_c_error_rad\n");
                for (k, err) in scan {
                    table.push_str(&format!("{}\t{}\n", output::fmt_g(*k), output::fmt_g(*err)));
                }
                CliError::NonConvergence(e.to_string(), Some(table))
            }
            E::NotConverged { .. } => CliError::NonConvergence(e.to_string(), None),
            E::NotHermitian { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::Calibrate(a) => &a.common,
            Command::Compare(a) => &a.common,
            Command::Robustness(a) => &a.common,
            Command::BlockadeScan(a) => &a.common,
            Command::Contrast(a) => &a.common,
        }
    }
}

fn parse(argv: &[OsString]) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        ExitCode::from(e.exit_code() as u8)
    })
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let mut cli = match parse(&argv) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(path) = cli.command.common().config.clone() {
        let sub = argv[1].to_string_lossy().into_owned();
        let merged = match config::merge(&argv, &sub, &path) {
            Ok(m) => m,
            Err(e) => return report(e),
        };
        cli = match parse(&merged) {
            Ok(c) => c,
            Err(code) => return code,
        };
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    match &e {
        CliError::Config(msg) => eprintln!("error: {msg}"),
        CliError::NonConvergence(msg, table) => {
            eprintln!("error: {msg}");
            if let Some(t) = table {
                eprint!("{t}");
            }
        }
        CliError::Numerical(msg) | CliError::Io(msg) => eprintln!("error: {msg}"),
    }
    ExitCode::from(e.exit_code())
}
