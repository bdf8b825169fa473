//! `groupeq`: structure analysis, gadget compilation, and exhaustive
//! deciders for equations over finite groups with commutator and `w`.
//!
//! Every command prints one JSON report on stdout and a short summary on
//! stderr. Exit codes: 0 ok, 2 parse or validation error, 3 precondition
//! error, 4 search-space or order cap, 5 internal check failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use report::{CliError, Report, EXIT_INVALID, EXIT_OK};

#[derive(Parser, Debug)]
#[command(name = "groupeq", version, about = "Equations and identities over finite groups with commutator and w")]
struct Cli {
    /// Solver worker threads.
    #[arg(long, global = true, env = "GROUPEQ_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Largest search space (number of assignments) a decider may enumerate.
    #[arg(long, global = true, default_value_t = groupeq::solver::DEFAULT_CAP)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Eq,
    Id,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Gadget {
    Coloring,
    Sat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order, exponent, center, and the abelian/nilpotent/solvable flags.
    GroupInfo {
        /// Group-spec file, or `builtin:<name>`.
        group: String,
    },
    /// Series, Fitting subgroup, minimal normal subgroups, classification.
    Structure { group: String },
    /// Build (H, N) by the quotient pipeline for equations or identities.
    Construct {
        group: String,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Compile a DIMACS graph or CNF into an equation file over H.
    Reduce {
        group: String,
        /// DIMACS edge file (coloring) or DIMACS CNF (sat).
        instance: PathBuf,
        #[arg(long, value_enum)]
        gadget: Gadget,
        #[arg(long, value_enum, default_value = "eq")]
        variant: Mode,
        /// Output prefix; writes `<out>.group`, `<out>.eq`, `<out>.roles.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether an equation file has a solution.
    Solve { equation: PathBuf },
    /// Decide whether an equation file holds as an identity.
    CheckId { equation: PathBuf },
    /// Compile, decide, run the oracle, and report agreement.
    Verify {
        group: String,
        instance: PathBuf,
        #[arg(long, value_enum)]
        gadget: Gadget,
        #[arg(long, value_enum, default_value = "eq")]
        variant: Mode,
    },
}

fn echo(cli: &Cli) -> serde_json::Value {
    let path = |p: &PathBuf| p.display().to_string();
    let mode = |m: Mode| if m == Mode::Eq { "eq" } else { "id" };
    let gadget = |g: Gadget| if g == Gadget::Coloring { "coloring" } else { "sat" };
    let (name, args) = match &cli.command {
        Command::GroupInfo { group } => ("group-info", json!({ "group": group })),
        Command::Structure { group } => ("structure", json!({ "group": group })),
        Command::Construct { group, mode: m } => ("construct", json!({ "group": group, "mode": mode(*m) })),
        Command::Reduce { group, instance, gadget: g, variant, out } => (
            "reduce",
            json!({ "group": group, "instance": path(instance), "gadget": gadget(*g), "variant": mode(*variant), "out": path(out) }),
        ),
        Command::Solve { equation } => ("solve", json!({ "equation": path(equation) })),
        Command::CheckId { equation } => ("check-id", json!({ "equation": path(equation) })),
        Command::Verify { group, instance, gadget: g, variant } => (
            "verify",
            json!({ "group": group, "instance": path(instance), "gadget": gadget(*g), "variant": mode(*variant) }),
        ),
    };
    json!({ "name": name, "args": args, "workers": cli.workers, "cap": cli.cap })
}

fn emit(report: Report, error: Option<&CliError>) -> ExitCode {
    for line in &report.summary {
        eprintln!("{line}");
    }
    if let Some(e) = error {
        eprintln!("error: {e}");
    }
    let code = error.map_or(EXIT_OK, |e| e.exit_code);
    let value = report.finish(error);
    println!("{}", serde_json::to_string_pretty(&value).expect("reports are plain JSON"));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let report = Report::new(json!({ "name": null, "args": std::env::args().skip(1).collect::<Vec<_>>() }));
            let err = CliError::new("usage", EXIT_INVALID, e.to_string());
            return emit(report, Some(&err));
        }
    };
    let mut report = Report::new(echo(&cli));
    let outcome = commands::run(&cli, &mut report);
    emit(report, outcome.err().as_ref())
}
