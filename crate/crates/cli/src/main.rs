use std::path::PathBuf;
use std::process::ExitCode;

use chaoslab_cli::{report, runner, selftest, EXIT_ERROR};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chaoslab", version, about = "Check disorder-chaos and self-averaging variance bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a config; exit 2 on a violation, 3 on a failed hypothesis.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Numerical self-checks of the math stack and engines.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<selftest::Fault>,
    },
    /// Summarise a results.csv: slack per theorem, violations, |E| scaling.
    Report { results: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed } => {
            let threads = match runner::threads_from_env() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return code(EXIT_ERROR);
                }
            };
            match runner::run(&config, out.as_deref(), seed, threads) {
                Ok(outcome) => {
                    let fails = outcome.reports.iter().filter(|r| r.verdict.as_str() == "fail").count();
                    println!(
                        "{} rows written to {} ({} violations)",
                        outcome.reports.len(),
                        outcome.results_csv.display(),
                        fails
                    );
                    code(outcome.exit_code)
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    code(EXIT_ERROR)
                }
            }
        }
        Command::Selftest { seed, inject_fault } => {
            let outcome = selftest::selftest(seed, inject_fault);
            print!("{}", outcome.table());
            if outcome.passed() {
                code(0)
            } else {
                for c in outcome.checks.iter().filter(|c| !c.passed) {
                    eprintln!("failed: {}", c.name);
                }
                code(EXIT_ERROR)
            }
        }
        Command::Report { results } => match report::report(&results) {
            Ok(s) => {
                print!("{}", s.text);
                code(s.exit_code)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                code(EXIT_ERROR)
            }
        },
    }
}
