use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lototsky::config::{compile, validate};
use lototsky::functions::list_functions;
use lototsky::operators::Family;
use lototsky::runner::run;

#[derive(Parser)]
#[command(name = "lototsky", about = "Binomial convex-combination operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config and write its CSV (and optional SVG)
    Run {
        /// Path to a `key = value` config file
        config: PathBuf,
    },
    /// Check a config and print diagnostics without running anything
    Validate {
        config: PathBuf,
    },
    /// Print the supported operator families with their domains
    ListFamilies,
    /// Print the function registry accepted by the `function` key
    ListFunctions,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let cfg = match compile(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run(&cfg) {
                Ok(out) => {
                    println!("wrote {} ({} rows)", out.csv_path.display(), out.rows);
                    if let Some(svg) = &out.svg_path {
                        println!("wrote {}", svg.display());
                    }
                    for note in &out.notes {
                        println!("note: {note}");
                    }
                    if out.checks_passed {
                        println!("checks: pass");
                        ExitCode::SUCCESS
                    } else {
                        println!("checks: FAIL");
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Validate { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let diags = validate(&text);
            if diags.is_empty() {
                println!("ok");
            } else {
                for d in &diags {
                    println!("{}: {}", d.code, d.message);
                }
            }
            ExitCode::SUCCESS
        }
        Command::ListFamilies => {
            for fam in Family::all() {
                let (i, j) = fam.domains::<f64>();
                println!("{:<20} samples on {}, evaluates on {}", fam.name(), i, j);
            }
            ExitCode::SUCCESS
        }
        Command::ListFunctions => {
            for line in list_functions() {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
    }
}
