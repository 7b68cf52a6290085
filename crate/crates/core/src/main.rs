use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shadowqsd::harness::{self, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(
    name = "shadowqsd",
    version,
    about = "Shadow-based quantum subspace diagonalization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the study named in a config file and write its CSV outputs.
    Run { config: PathBuf },
    /// Print the minimum number of evolved states for a config's model.
    Mnes { config: PathBuf },
    /// Print the exact ground-state energy of a config's model.
    Exact { config: PathBuf },
    /// Recompute every run recorded in an output directory.
    Replay { output: PathBuf },
}

fn dispatch(cmd: Command) -> Result<String, HarnessError> {
    match cmd {
        Command::Run { config } => {
            let out = harness::run_config(&config)?;
            let mut msg = format!("{} -> {}", out.summary, out.output_dir.display());
            if out.lower_bound_violations > 0 {
                msg.push_str(&format!(
                    "\nwarning: {} runs fell below the exact ground energy",
                    out.lower_bound_violations
                ));
            }
            Ok(msg)
        }
        Command::Mnes { config } => {
            let config = ExperimentConfig::from_file(&config)?;
            let (h, mnes) = harness::run_mnes(&config)?;
            Ok(harness::mnes_csv(&config, &h, mnes).trim_end().to_string())
        }
        Command::Exact { config } => {
            let config = ExperimentConfig::from_file(&config)?;
            let (h, e0) = harness::run_exact(&config)?;
            Ok(harness::exact_csv(&h, e0).trim_end().to_string())
        }
        Command::Replay { output } => {
            let n = harness::replay_output(&output)?;
            Ok(format!("replayed {n} runs, all identical"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
