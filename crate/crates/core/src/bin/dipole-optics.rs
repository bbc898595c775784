use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dipole_optics::cli::{exit_code_for_error, parse_scenario, run_scenario, EXIT_CONFIG, EXIT_PASS};
use dipole_optics::Error;

#[derive(Parser)]
#[command(
    name = "dipole-optics",
    version,
    about = "Classical and quantum paraxial optics of a dipole magnet"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trajectory.csv, comparison.csv and summary.txt
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and validate a scenario without running it
    Check { scenario: PathBuf },
}

fn load(path: &PathBuf) -> Result<dipole_optics::cli::Scenario, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: None,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match args.command {
        Command::Check { scenario } => match load(&scenario) {
            Ok(_) => {
                println!("{}: ok", scenario.display());
                EXIT_PASS
            }
            Err(e) => {
                eprintln!("{}: {e}", scenario.display());
                EXIT_CONFIG
            }
        },
        Command::Run {
            scenario,
            out_dir,
            quiet,
        } => {
            let result = load(&scenario).and_then(|sc| {
                let dir = out_dir
                    .or_else(|| sc.out_dir.clone())
                    .unwrap_or_else(|| PathBuf::from("."));
                run_scenario(&sc, &dir)
            });
            match result {
                Ok(report) => {
                    if !quiet {
                        print!("{}", report.summary);
                    }
                    report.exit_code()
                }
                Err(e) => {
                    eprintln!("{}: {e}", scenario.display());
                    exit_code_for_error(&e)
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
