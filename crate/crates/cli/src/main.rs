//! Batch front door for the fiber engine: parse JSON documents, dispatch
//! to the core, and emit deterministic reports.
//!
//! Exit codes: 0 clean, 1 violation or engine bug, 2 invalid or
//! unsupported input.

use clap::{Parser, Subcommand, ValueEnum};
use fibercalc_cli::commands;
use fibercalc_cli::report::Format;
use fibercalc_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fibercalc",
    version,
    about = "Exact invariants, semistable reduction, and inequality checks for degenerate fibers of surface fibrations"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Include step-by-step traces in reports.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the defect invariants of a fiber document.
    Invariants { file: PathBuf },
    /// Resolve the singular points of a fiber and report the blow-up log.
    Resolve { file: PathBuf },
    /// Simulate the cyclic base change and semistable reduction of a fiber.
    Basechange {
        file: PathBuf,
        /// Base-change order; defaults to the smallest admissible one.
        #[arg(long)]
        order: Option<i64>,
    },
    /// Evaluate inequality verdicts for a fibration, point, or
    /// double-point document.
    Check { file: PathBuf },
    /// Look up one double-point contribution to the Miyaoka bound.
    Miyaoka {
        /// Singularity series: A, D, or E.
        #[arg(long)]
        kind: String,
        /// Rank within the series.
        #[arg(long)]
        r: i64,
    },
    /// Run or list the built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Run every corpus entry and verify all stored golden values.
    Run,
    /// List corpus entries with their metadata.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Machine => Format::Machine,
    };
    let result = match &cli.command {
        Command::Invariants { file } => commands::cmd_invariants(file, cli.trace),
        Command::Resolve { file } => commands::cmd_resolve(file, cli.trace),
        Command::Basechange { file, order } => {
            commands::cmd_basechange(file, *order, cli.trace)
        }
        Command::Check { file } => commands::cmd_check(file),
        Command::Miyaoka { kind, r } => commands::cmd_miyaoka(kind, *r),
        Command::Corpus { action } => {
            let dir = commands::corpus_dir();
            match action {
                CorpusAction::Run => commands::cmd_corpus_run(&dir),
                CorpusAction::List => commands::cmd_corpus_list(&dir),
            }
        }
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code())
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Input(_) | Error::Unsupported(_) => ExitCode::from(2),
                Error::Internal(_) => ExitCode::from(1),
            }
        }
    }
}
