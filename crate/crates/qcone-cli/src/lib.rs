//! Scenario-driven front end for the qcone engines.
//!
//! Subcommands: `run` executes a scenario file (or a bundled scenario by
//! name) and emits a JSON or text report, `validate` parses and checks a
//! scenario without running it, `examples` lists or exports the bundled
//! scenarios.
//!
//! Exit codes: 0 success, 1 scenario error, 2 engine error, 3 statistical
//! test failure.

pub mod bundled;
pub mod report;
pub mod run;
pub mod scenario;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qcone::spacetime::Boost;

pub const EXIT_OK: u8 = 0;
pub const EXIT_SCENARIO_ERROR: u8 = 1;
pub const EXIT_ENGINE_ERROR: u8 = 2;
pub const EXIT_STATISTICAL_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qcone",
    version,
    about = "Covariant state reduction scenarios: light cones, detector cycles, and no-signaling checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or bundled scenario name) and emit a report.
    Run {
        /// Path to a scenario JSON file, or a bundled name like `fig3`.
        scenario: String,
        /// Report format.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Seed override (takes precedence over the scenario's seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Extra boost velocity to sweep, repeatable.
        #[arg(long = "boost", value_name = "V", allow_negative_numbers = true)]
        boosts: Vec<f64>,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Parse and validate a scenario without running it.
    Validate {
        /// Path to a scenario JSON file, or a bundled name like `fig3`.
        scenario: String,
    },
    /// List the bundled scenarios, or export them to a directory.
    Examples {
        /// Write the bundled scenario files into this directory.
        #[arg(long, value_name = "DIR")]
        export: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

/// Loads scenario text from a path, falling back to the bundled set when the
/// path does not name an existing file.
fn load_scenario_text(spec: &str) -> Result<String, String> {
    let path = Path::new(spec);
    if path.exists() {
        return std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read '{}': {e}", path.display()));
    }
    if let Some(b) = bundled::find(spec) {
        return Ok(b.text.to_string());
    }
    Err(format!(
        "'{spec}' is neither a readable file nor a bundled scenario (try `qcone examples`)"
    ))
}

fn write_output(out: &Option<PathBuf>, body: &str) -> Result<(), String> {
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => std::fs::write(path, body)
            .map_err(|e| format!("cannot write '{}': {e}", path.display())),
    }
}

pub fn cli_main() -> ExitCode {
    // keep exit code 2 reserved for engine errors: bad invocations are
    // input errors like any other scenario problem
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_SCENARIO_ERROR
            } else {
                EXIT_OK // --help and --version land here
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            scenario,
            format,
            seed,
            boosts,
            out,
        } => {
            let text = match load_scenario_text(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_SCENARIO_ERROR);
                }
            };
            let parsed = match scenario::parse_scenario(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("scenario error: {e}");
                    return ExitCode::from(EXIT_SCENARIO_ERROR);
                }
            };
            let mut extra = Vec::with_capacity(boosts.len());
            for v in boosts {
                match Boost::new(v) {
                    Ok(b) => extra.push(b),
                    Err(_) => {
                        eprintln!("scenario error: boost velocity {v} is not strictly inside (-1, 1)");
                        return ExitCode::from(EXIT_SCENARIO_ERROR);
                    }
                }
            }
            let output = match run::run(&parsed, &extra, seed) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_ENGINE_ERROR);
                }
            };
            let body = match format {
                FormatArg::Json => report::emit_json(&output.report),
                FormatArg::Text => report::emit_text(&output.report),
            };
            if let Err(e) = write_output(&out, &body) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_ENGINE_ERROR);
            }
            if output.statistical_failure {
                eprintln!("statistical test failed (see the report's monte_carlo block)");
                return ExitCode::from(EXIT_STATISTICAL_FAILURE);
            }
            ExitCode::from(EXIT_OK)
        }
        Command::Validate { scenario } => {
            let text = match load_scenario_text(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_SCENARIO_ERROR);
                }
            };
            match scenario::parse_scenario(&text) {
                Ok(s) => {
                    println!(
                        "ok: {} scenario with {} event(s), {} observation(s), {} quer{}",
                        s.mode.as_str(),
                        s.doc.events.len(),
                        s.doc.observations.len(),
                        s.doc.queries.len(),
                        if s.doc.queries.len() == 1 { "y" } else { "ies" },
                    );
                    ExitCode::from(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("scenario error: {e}");
                    ExitCode::from(EXIT_SCENARIO_ERROR)
                }
            }
        }
        Command::Examples { export } => {
            match export {
                None => {
                    for b in bundled::BUNDLED {
                        let parsed = scenario::parse_scenario(b.text)
                            .expect("bundled scenarios always validate");
                        println!(
                            "{:<14} {:<16} {}",
                            b.name,
                            format!("[{}]", parsed.mode.as_str()),
                            parsed.doc.description.as_deref().unwrap_or("")
                        );
                    }
                    ExitCode::from(EXIT_OK)
                }
                Some(dir) => {
                    if let Err(e) = std::fs::create_dir_all(&dir) {
                        eprintln!("error: cannot create '{}': {e}", dir.display());
                        return ExitCode::from(EXIT_SCENARIO_ERROR);
                    }
                    for b in bundled::BUNDLED {
                        let path = dir.join(b.file_name);
                        if let Err(e) = std::fs::write(&path, b.text) {
                            eprintln!("error: cannot write '{}': {e}", path.display());
                            return ExitCode::from(EXIT_SCENARIO_ERROR);
                        }
                        println!("wrote {}", path.display());
                    }
                    ExitCode::from(EXIT_OK)
                }
            }
        }
    }
}
