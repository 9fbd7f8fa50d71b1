use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dqc_core::config::{RunConfig, Scenario};
use dqc_core::runner::{exit_code, run, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "dqc", version, about = "Driven dissipative quantum control: simulate, optimize, pump, check")]
struct Cli {
    /// Directory for CSV output; overrides `output.dir`.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a two-level system under the configured pulse.
    Simulate { config: PathBuf },
    /// Optimize pulse parameters against the configured objective.
    Optimize { config: PathBuf },
    /// Run the six-level optical pumping model.
    Pump { config: PathBuf },
    /// Run the built-in verification suites.
    Check { config: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, path) = match cli.command {
        Command::Simulate { config } => (Scenario::Simulate, Some(config)),
        Command::Optimize { config } => (Scenario::Optimize, Some(config)),
        Command::Pump { config } => (Scenario::Pump, Some(config)),
        Command::Check { config } => (Scenario::Check, config),
    };
    let cfg = match path {
        Some(p) => RunConfig::load(&p),
        None => Ok(RunConfig::default()),
    };
    let result = cfg.and_then(|cfg| run(&cfg, scenario, cli.output_dir.as_deref()));
    let code = match result {
        Ok((outcome, written)) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for path in written {
                println!("wrote {}", path.display());
            }
            exit_code(&Ok(outcome))
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&Err(e))
        }
    };
    ExitCode::from(code as u8)
}
