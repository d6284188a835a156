use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hodp::dp::extract_dps;
use hodp::order::Precedence;
use hodp::rewrite::{
    bounded_explore, explore_graph, render_trace, Engine, ExplorationVerdict, ExploreLimits,
    InternalMode, Relation,
};
use hodp::{parse_system, parse_term, render_report, run_pipeline, Error, Format, Options};

#[derive(Parser)]
#[command(name = "hodp", version, about = "Higher-order dependency pair termination checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Internal {
    All,
    RulesOnly,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse a rewrite system and print YES, NO or MAYBE.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Print derivations and ordering proofs in full.
        #[arg(long)]
        trace: bool,
        /// Fixed precedence such as "f>g,f>h"; only statuses are searched.
        #[arg(long)]
        precedence: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_symbols: usize,
        #[arg(long, default_value_t = 8)]
        ge_bound: usize,
        /// Search for a cycle from seed terms when termination is not shown.
        #[arg(long)]
        disprove: bool,
        #[arg(long, default_value_t = 200)]
        explore_depth: usize,
        #[arg(long, default_value_t = 100_000)]
        explore_nodes: usize,
        #[arg(long, value_enum, default_value = "all")]
        internal: Internal,
    },
    /// Explore the reductions of one term.
    Explore {
        file: PathBuf,
        term: String,
        /// Use the chain relation instead of plain rewriting.
        #[arg(long)]
        chain: bool,
        #[arg(long, default_value_t = 200)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        nodes: usize,
        /// Write the explored state graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

fn exit_for(e: &Error) -> ExitCode {
    if e.is_input_error() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Check {
            file,
            json,
            trace,
            precedence,
            max_symbols,
            ge_bound,
            disprove,
            explore_depth,
            explore_nodes,
            internal,
        } => {
            let text = read(&file)?;
            let fail = |e: Error| {
                eprintln!("error: {e}");
                exit_for(&e)
            };
            let system = parse_system(&text).map_err(fail)?;
            let precedence = precedence
                .map(|p| Precedence::parse(&p))
                .transpose()
                .map_err(fail)?;
            let options = Options {
                precedence,
                max_symbols,
                ge_bound,
                disprove,
                explore: ExploreLimits {
                    max_depth: explore_depth,
                    max_nodes: explore_nodes,
                },
                internal: match internal {
                    Internal::All => InternalMode::All,
                    Internal::RulesOnly => InternalMode::RulesOnly,
                },
                ..Options::default()
            };
            let report = run_pipeline(&system, &options).map_err(fail)?;
            let format = if json { Format::Json } else { Format::Text { trace } };
            print!("{}", render_report(&report, format));
            Ok(())
        }
        Command::Explore {
            file,
            term,
            chain,
            depth,
            nodes,
            dot,
        } => {
            let text = read(&file)?;
            let fail = |e: Error| {
                eprintln!("error: {e}");
                exit_for(&e)
            };
            let system = parse_system(&text).map_err(fail)?;
            let start = parse_term(&term, &system.signature).map_err(fail)?;
            let dps = extract_dps(&system).map_err(fail)?;
            let engine = Engine::new(&system.rules, &dps);
            let relation = if chain { Relation::BetaChain } else { Relation::BetaRewrite };
            let limits = ExploreLimits {
                max_depth: depth,
                max_nodes: nodes,
            };
            if let Some(path) = dot {
                let graph = explore_graph(&start, &engine, relation, nodes);
                std::fs::write(&path, graph.to_dot()).map_err(|e| {
                    eprintln!("error: {}: {e}", path.display());
                    ExitCode::from(2)
                })?;
            }
            match bounded_explore(&start, &engine, relation, limits).map_err(fail)? {
                ExplorationVerdict::AllTerminated { max_trace_len } => {
                    println!("terminated (longest reduction: {max_trace_len} steps)");
                }
                ExplorationVerdict::BoundExceeded { witness } => {
                    println!("bound exceeded after {} steps", witness.len());
                    print!("{}", render_trace(&witness));
                }
                ExplorationVerdict::CycleFound { witness } => {
                    println!("cycle of length {}", witness.len());
                    print!("{}", render_trace(&witness));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
