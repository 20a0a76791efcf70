//! `doxa`: check, evaluate, translate and fuzz knowledge/belief models.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use doxa::harness::Family;

mod commands;

#[derive(Parser)]
#[command(name = "doxa", version, about = "Knowledge and belief over relational and simplicial models")]
struct Cli {
    /// Output style for reports.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Rel,
    Simp,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Rel => Family::Rel,
            FamilyArg::Simp => Family::Simp,
        }
    }
}

/// Which belief clause `eval` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    /// Belief complexes (relational: Q relations).
    Standard,
    /// Perspective maps from the file, identity where absent.
    Kasc,
    /// Multiplicity belief, bounded variant.
    Bounded,
    /// Multiplicity belief, minimal variant.
    Minimal,
}

#[derive(Args)]
struct Serial {
    /// Make every agent's belief serial (the default).
    #[arg(long, overrides_with = "no_serial")]
    serial: bool,
    #[arg(long)]
    no_serial: bool,
}

impl Serial {
    fn get(&self) -> bool {
        !self.no_serial
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file. Exit 0 ok, 1 invalid, 2 unreadable.
    Check {
        model: PathBuf,
        /// Also fail when an informational flag (proper, a-serial, ...) is false.
        #[arg(long)]
        strict: bool,
        /// World map (or properize sidecar) to replay as a bounded morphism.
        #[arg(long, requires = "target")]
        morphism: Option<PathBuf>,
        /// Relational model the morphism maps into.
        #[arg(long, requires = "morphism")]
        target: Option<PathBuf>,
    },
    /// Evaluate a formula at a world or facet. Exit 0 true, 1 false, 2 error.
    Eval {
        model: PathBuf,
        #[arg(long)]
        at: String,
        formula: String,
        /// Defaults to `standard`, or `bounded` for non-UCF files.
        #[arg(long, value_enum)]
        semantics: Option<SemanticsArg>,
    },
    /// Relational model to simplicial model, writing witness sidecars next to `-o`.
    Translate {
        model: PathBuf,
        #[arg(long)]
        properize_first: bool,
        /// Agent whose relations are skewed when properizing.
        #[arg(long, requires = "properize_first")]
        distinguished: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simplicial model to relational model.
    ToRelational {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Proper relational model with a bounded morphism onto the input.
    Properize {
        model: PathBuf,
        #[arg(long)]
        distinguished: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Schema-validity fuzz. One JSON line per trial; exit 0 iff nothing failed.
    Suite {
        #[arg(long, env = "DOXA_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::Simp)]
        family: FamilyArg,
        /// Comma-separated schema names or groups (FULL, S5, KD45).
        #[arg(long, default_value = "FULL")]
        schemas: String,
        #[command(flatten)]
        serial: Serial,
        /// Give every agent the same belief complex.
        #[arg(long)]
        tie_beliefs: bool,
        /// Fill formulas are enumerated to this modal depth.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        max_agents: usize,
        #[arg(long, default_value_t = 2)]
        max_atoms: usize,
        #[arg(long, default_value_t = 5)]
        max_worlds: usize,
        #[arg(long, default_value_t = 3)]
        max_nodes: usize,
        #[arg(long, default_value_t = 6)]
        max_facets: usize,
    },
    /// Generate a random model file.
    Gen {
        #[arg(long, value_enum, default_value_t = FamilyArg::Rel)]
        family: FamilyArg,
        #[arg(long, env = "DOXA_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 1)]
        atoms: usize,
        #[arg(long, default_value_t = 3)]
        worlds: usize,
        /// Candidate nodes per color.
        #[arg(long, default_value_t = 2)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        facets: usize,
        #[command(flatten)]
        serial: Serial,
        /// Resample relational models until proper.
        #[arg(long)]
        proper: bool,
        #[arg(long)]
        tie_beliefs: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate formulas under every applicable belief clause, facet by facet.
    CompareSemantics {
        model: PathBuf,
        #[arg(required = true)]
        formulas: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            // Skip causes whose text the outer message already carries.
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
