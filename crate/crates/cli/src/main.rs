mod commands;
mod io;

use clap::{Parser, Subcommand};
use io::{base_words, rationals, words_file, CliError, CliResult};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gtd", version, about = "Exact computations with cocompact G-trees")]
struct Cli {
    /// Ball vertex cap.
    #[arg(long, global = true, env = "GTD_CAP", default_value_t = gtd::treegeom::DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph-of-groups file.
    Validate { tree: PathBuf },
    /// Classify a word and give its translation length.
    Length { tree: PathBuf, word: String },
    /// Grow a ball of the Bass–Serre tree.
    Ball {
        tree: PathBuf,
        #[arg(short, long)]
        radius: Option<String>,
        /// Number of edges instead of a metric radius.
        #[arg(long, conflicts_with = "radius")]
        depth: Option<usize>,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Min-max set and basepoint of a finite set of elements.
    Basepoint {
        tree: PathBuf,
        #[arg(short = 'S', value_delimiter = ',', required = true)]
        s: Vec<String>,
        #[arg(short, long, default_value = "1")]
        radius: String,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Collapse an edge.
    Collapse {
        tree: PathBuf,
        #[arg(short, long)]
        edge: String,
    },
    /// Expand a vertex.
    Expand {
        tree: PathBuf,
        #[arg(short, long)]
        vertex: String,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Whether any edge can be collapsed.
    Reduced { tree: PathBuf },
    /// Compare elliptic/hyperbolic profiles through both markings.
    ProfileCompare {
        first: PathBuf,
        second: PathBuf,
        #[arg(short = 'S', value_delimiter = ',')]
        s: Vec<String>,
        #[arg(long, conflicts_with = "s")]
        words: Option<PathBuf>,
        /// Length of enumerated words when none are given.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Fold a morphism to given times.
    Fold {
        morphism: PathBuf,
        #[arg(short, long, value_name = "CSV", default_value = "1/2")]
        times: String,
        /// `tree` prints just the folded tree(s).
        #[arg(long, default_value = "all", value_parser = ["all", "tree"])]
        emit: String,
        /// Word file; prints the length profile instead.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Check or thicken an ε-approximation.
    Approx {
        #[command(subcommand)]
        action: ApproxAction,
    },
    /// Barycentric coordinates and volume.
    Simplex { tree: PathBuf },
    /// Transverse section from a reduced base.
    Section {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(short, long)]
        radius: Option<String>,
    },
    /// Sample the contraction path from a target back to the base stratum.
    Contract {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(short, long, value_name = "CSV", default_value = "0,1/4,1/2,3/4,1")]
        times: String,
        /// Samples on the straight line to the base's simplex point.
        #[arg(long, default_value_t = 0)]
        line: usize,
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ApproxAction {
    Check { relation: PathBuf },
    Thicken {
        relation: PathBuf,
        #[arg(short, long)]
        delta: String,
    },
}

fn run(cli: Cli) -> CliResult<Value> {
    let cap = cli.cap;
    match cli.command {
        Command::Validate { tree } => commands::validate(&tree),
        Command::Length { tree, word } => commands::length(&tree, &word),
        Command::Ball { tree, radius, depth, emit_dot } => {
            commands::ball(&tree, radius.as_deref(), depth, cap, emit_dot.as_deref())
        }
        Command::Basepoint { tree, s, radius, emit_dot } => {
            commands::basepoint_cmd(&tree, &s, &radius, cap, emit_dot.as_deref())
        }
        Command::Collapse { tree, edge } => commands::collapse(&tree, &edge),
        Command::Expand { tree, vertex, spec } => commands::expand(&tree, &vertex, &spec),
        Command::Reduced { tree } => commands::reduced(&tree),
        Command::ProfileCompare { first, second, s, words, depth } => {
            let words = match (words, s.is_empty()) {
                (Some(f), _) => Some(words_file(&f)?),
                (None, false) => Some(base_words(s.iter().map(String::as_str))?),
                (None, true) => None,
            };
            commands::profile_compare(&first, &second, words, depth)
        }
        Command::Fold { morphism, times, emit, profile } => {
            let profile = profile.map(|f| words_file(&f)).transpose()?;
            commands::fold(&morphism, &rationals(&times)?, &emit, profile)
        }
        Command::Approx { action } => match action {
            ApproxAction::Check { relation } => commands::approx_check(&relation, cap),
            ApproxAction::Thicken { relation, delta } => commands::approx_thicken(&relation, &delta, cap),
        },
        Command::Simplex { tree } => commands::simplex(&tree),
        Command::Section { base, target, radius } => commands::section(&base, &target, radius.as_deref(), cap),
        Command::Contract { base, target, times, line, emit_csv, emit_dot } => {
            let opts = commands::ContractOpts {
                times: rationals(&times)?,
                line,
                cap,
                csv: emit_csv.as_deref(),
                dot: emit_dot.as_deref(),
            };
            commands::contract(&base, &target, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version go to stdout with status 0, bad flags exit 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", e.report());
            if let CliError::Usage(msg) = &e {
                eprintln!("gtd: {msg}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
