//! `birmod`: batch front end for rank tables, operator application, law
//! suites, Burnside boundary runs and diagram export.
//!
//! Exit status is 0 on success, 1 when a checked assertion fails and 2 on
//! bad input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use birmod_core::laws::Suite;
use birmod_core::ops::OpSpec;
use birmod_core::wire::Ring;

use report::Report;

#[derive(Parser)]
#[command(name = "birmod", version, about = "Exact computations with birational modular symbols")]
struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank and invariant factors of a symbol module presentation.
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        modulus: u64,
        /// Impose the sign relations as well.
        #[arg(long)]
        minus: bool,
        #[arg(long, default_value = "q")]
        ring: Ring,
    },
    /// Applies one operator to a formal sum read from a file.
    Apply {
        /// One of sigma:k, rho:k, rhohat:k, ek:k.
        #[arg(long)]
        op: OpSpec,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Coefficient ring of the input.
        #[arg(long, default_value = "z")]
        ring: Ring,
    },
    /// Checks an operator law suite over a parameter grid.
    Laws {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        max_n: usize,
        #[arg(long = "max-N")]
        max_modulus: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<u64>,
        /// Second parameters or levels; defaults to the k list.
        #[arg(long, value_delimiter = ',')]
        ells: Vec<u64>,
    },
    /// Boundary elements in Burnside groups.
    Burnside {
        #[command(subcommand)]
        mode: BurnsideMode,
    },
    /// Builds a diagram from a declaration and exports DOT and an analysis.
    Diagram {
        #[arg(long, value_enum)]
        kind: DiagramKind,
        #[arg(long)]
        decl: PathBuf,
        /// DOT output file; printed in text mode when absent.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// JSON analysis output file.
        #[arg(long)]
        analysis: Option<PathBuf>,
        /// Overrides the functoriality degree shift of a pairs declaration.
        #[arg(long)]
        fstar_shift: Option<i64>,
        /// Exit 1 when a category fails the poset-in-groupoids test.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Subcommand)]
enum BurnsideMode {
    /// Boundary class of a stratified model.
    Boundary {
        #[arg(long)]
        model: PathBuf,
    },
    /// Pushes the boundary of a modification forward and compares.
    Pushforward {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Compatibility of boundaries along a nested pair.
    Tower {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramKind {
    Pairs,
    Equivariant,
    Category,
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("BIRMOD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("BIRMOD_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: Cli) -> Result<Report> {
    configure_threads()?;
    match cli.command {
        Command::Rank { n, modulus, minus, ring } => commands::rank(n, modulus, minus, ring),
        Command::Apply { op, input, output, ring } => commands::apply(op, &input, output.as_deref(), ring),
        Command::Laws { suite, max_n, max_modulus, ks, ells } => {
            let ells = if ells.is_empty() { ks.clone() } else { ells };
            commands::laws(suite, max_n, max_modulus, ks, ells)
        }
        Command::Burnside { mode } => match mode {
            BurnsideMode::Boundary { model } => commands::boundary(&model),
            BurnsideMode::Pushforward { scenario } => commands::pushforward(&scenario),
            BurnsideMode::Tower { input } => commands::tower(&input),
        },
        Command::Diagram { kind, decl, dot, analysis, fstar_shift, strict } => {
            let out = commands::DiagramOut { dot: dot.as_deref(), analysis: analysis.as_deref() };
            match kind {
                DiagramKind::Pairs => commands::pairs_diagram(&decl, out, fstar_shift),
                DiagramKind::Equivariant => {
                    if fstar_shift.is_some() {
                        bail!("--fstar-shift applies to pairs declarations only");
                    }
                    commands::equivariant_diagram(&decl, out)
                }
                DiagramKind::Category => commands::category_diagram(&decl, out, strict),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(r) => {
            r.print(json);
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
