//! `symfield` command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error,
//! 3 internal error.

mod config;
mod report;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::ScenarioConfig;
use report::{module_tolerances, Output};

#[derive(Parser)]
#[command(name = "symfield", version, about = "Numerical scenarios for symplectic field algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML scenario configuration; defaults are used when omitted.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides SYMFIELD_OUT and the config).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Weyl relation residuals across backends and grid refinements.
    CcrCheck,
    /// Projection dichotomy, graded decomposition and morphism residuals.
    Grading,
    /// Essential spectrum of a graded N-body Hamiltonian.
    Hvz,
    /// Rotation and dilation identities in one degree of freedom.
    Demo2d,
    /// Two-sided translation limits of a resolvent.
    Aniso,
    /// Membership conditions for (Delta + 1)^-1 across refinements.
    Membership,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CcrCheck => "ccr-check",
            Command::Grading => "grading",
            Command::Hvz => "hvz",
            Command::Demo2d => "demo2d",
            Command::Aniso => "aniso",
            Command::Membership => "membership",
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<ScenarioConfig, String> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => String::new(),
    };
    ScenarioConfig::parse(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(cli.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Ok(t) = std::env::var("SYMFIELD_THREADS") {
        match t.parse::<usize>() {
            Ok(n) => symfield::set_threads(n),
            Err(_) => {
                eprintln!("configuration error: SYMFIELD_THREADS must be a nonnegative integer");
                return ExitCode::from(2);
            }
        }
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("SYMFIELD_OUT").map(PathBuf::from))
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("symfield-out"));
    let out = match Output::create(&dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cannot create {}: {e}", dir.display());
            return ExitCode::from(3);
        }
    };
    let run = match cli.command {
        Command::CcrCheck => scenarios::ccr_check,
        Command::Grading => scenarios::grading,
        Command::Hvz => scenarios::hvz,
        Command::Demo2d => scenarios::demo2d,
        Command::Aniso => scenarios::aniso,
        Command::Membership => scenarios::membership,
    };
    let outcome = match run(&cfg, &out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}: {e}", cli.command.name());
            return ExitCode::from(3);
        }
    };
    let report = json!({
        "command": cli.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "tolerances": {"module": module_tolerances(), "scenario": outcome.tolerances},
        "pass": outcome.pass,
        "results": outcome.results,
    });
    if let Err(e) = out.json(&report) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(3);
    }
    println!("{} {}: report in {}", cli.command.name(), if outcome.pass { "PASS" } else { "FAIL" }, out.dir().display());
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
