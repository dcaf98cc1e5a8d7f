use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use magnetic_lqr::cli::{self, Overrides};
use magnetic_lqr::riccati::SolverTag;

/// Periodic LQR design for magnetorquer attitude control.
#[derive(Parser)]
#[command(name = "magnetic-lqr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render SVG line plots.
    #[arg(long)]
    plots: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Solver {
    Gamma,
    Pi,
    Eigen,
    Recursion,
}

impl From<Solver> for SolverTag {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Gamma => SolverTag::GammaSchur,
            Solver::Pi => SolverTag::PiSchur,
            Solver::Eigen => SolverTag::Eigen,
            Solver::Recursion => SolverTag::RecursionOracle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the periodic Riccati equation and write the gain schedule.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        solver: Option<Solver>,
    },
    /// Simulate the closed loop with a stored schedule.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Sample the geomagnetic field over one orbit.
    Field {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = cli::DEFAULT_FIELD_SAMPLES)]
        samples: usize,
    },
    /// Run the invariant suite.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

fn overrides(common: &Common, solver: Option<Solver>) -> Overrides {
    Overrides {
        solver: solver.map(Into::into),
        out: common.out.clone(),
        plots: common.plots,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &args.command {
        Command::Solve { common, solver } => {
            cli::cmd_solve(&common.config, &overrides(common, *solver)).map(|r| r.to_string())
        }
        Command::Simulate { common, schedule } => {
            cli::cmd_simulate(&common.config, schedule, &overrides(common, None))
                .map(|r| r.to_string())
        }
        Command::Field { common, samples } => {
            cli::cmd_field(&common.config, *samples, &overrides(common, None))
                .map(|r| r.to_string())
        }
        Command::Check { common } => match cli::cmd_check(&common.config, &overrides(common, None))
        {
            Ok(report) => {
                println!("{report}");
                return ExitCode::from(if report.passed() { 0 } else { 3 });
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
