use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orlab::{bundled, list_predictions, load_config, parse_check_list, parse_config, run_experiment, RunOptions};

#[derive(Parser)]
#[command(name = "orlab", version, about = "Experiments on approximable solutions of Orlicz-growth elliptic problems")]
struct Cli {
    /// Worker threads for assembly (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config file or a bundled config name.
    Run {
        config: String,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of checks to run.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Print the predicted regularity classes for B(t) ≈ t^p (log t)^beta.
    Predict {
        p: f64,
        beta: f64,
        sigma: f64,
        /// Space dimension n.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(3);
        }
    }
    match cli.command {
        Command::Predict { p, beta, sigma, dim } => match list_predictions(p, beta, sigma, dim) {
            Ok(table) => {
                print!("{table}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
        },
        Command::Run { config, out, checks } => {
            let path = PathBuf::from(&config);
            let cfg = match (path.is_file(), bundled(&config)) {
                (false, Some(text)) => parse_config(text),
                _ => load_config(&path),
            };
            let checks = match checks.as_deref().map(parse_check_list).transpose() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: stage config: {e}");
                    return ExitCode::from(3);
                }
            };
            let cfg = match cfg {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: stage config: {e}");
                    return ExitCode::from(3);
                }
            };
            match run_experiment(&cfg, &RunOptions { out, checks }) {
                Ok(outcome) => {
                    if let Some(msg) = outcome.solver_failure() {
                        eprintln!("error: {msg}; completed snapshots kept in {}", outcome.out_dir.display());
                    }
                    for r in &outcome.reports {
                        println!("{:<20} {}", r.name, r.verdict());
                    }
                    println!();
                    println!("{:<28} {:<32} provenance", "quantity", "value");
                    for r in &outcome.summary {
                        println!("{:<28} {:<32} {}", r.quantity, r.value, r.provenance.label());
                    }
                    println!("\noutputs in {}", outcome.out_dir.display());
                    if outcome.exit_code() == 2 {
                        eprintln!("error: stage checks: some checks failed");
                    }
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
