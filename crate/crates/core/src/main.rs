use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hadamard_fvp::runner::{self, exit_code, exit_code_for};
use hadamard_fvp::{load_config, Error};

#[derive(Parser)]
#[command(version, about = "Solve variational problems with Hadamard fractional derivatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write the solution CSV.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Number of grid nodes (overrides the config).
        #[arg(long)]
        k: Option<usize>,
        /// Expansion order (overrides the config).
        #[arg(long = "N")]
        n: Option<usize>,
        /// Output CSV path (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a grid of solves over node counts and expansion orders.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "k-list", value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Output CSV path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Solve { config, k, n, out } => {
            let cfg = load_config(&config)?.with_overrides(k, n, out.as_deref())?;
            let report = runner::run_solve(&cfg)?;
            print!("{}", report.summary());
            println!("wrote {}", cfg.output_path.display());
            Ok(if report.converged {
                exit_code::SUCCESS
            } else {
                exit_code::NOT_CONVERGED
            })
        }
        Command::Study {
            config,
            k_list,
            n_list,
            out,
        } => {
            let cfg = load_config(&config)?;
            let rows = runner::convergence_study(&cfg, &k_list, &n_list)?;
            let csv = runner::study_csv(&rows);
            match out {
                Some(path) => {
                    std::fs::write(&path, csv)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("k = {}, N = {}: {}", r.k, r.order, r.error.as_deref().unwrap_or(""));
            }
            Ok(if rows.iter().all(|r| r.converged) {
                exit_code::SUCCESS
            } else {
                exit_code::NOT_CONVERGED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit_code::CONFIG as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
