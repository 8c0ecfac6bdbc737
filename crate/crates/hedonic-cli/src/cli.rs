//! Command-line surface: argument grammar, dispatch, and output shaping.
//!
//! Exit codes: 0 for success (including negative mathematical answers such
//! as `find-popular` reporting none), 1 where a flag requests it (`verify
//! --strict` on an uncertified partition, `lemma-suite` with failing
//! checks), 2 for usage, parse, and precondition errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hedonic_core::falsify::falsify_popularity;
use hedonic_core::gadgets::{five_agent_noinstance, star_game};
use hedonic_core::popularity::{
    find_popular, popularity_margin, Verdict, VerifyMode, DEFAULT_ENUMERATION_LIMIT,
};
use hedonic_core::qsat::{qsat_solve, DEFAULT_QSAT_LIMIT};
use hedonic_core::{AgentId, Partition};

use crate::formats::{
    parse_game, parse_partition, parse_qdnf, serialize_game, serialize_roles, GameDocument,
};
use crate::harness::{lemma_suite, Model};
use crate::parallel::verify_popular_threaded;

#[derive(Parser)]
#[command(
    name = "hedonic",
    version,
    about = "Coalition-formation games: popularity verification, search, and formula compilers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ashg,
    Fhg,
}

impl From<ModelArg> for Model {
    fn from(arg: ModelArg) -> Model {
        match arg {
            ModelArg::Ashg => Model::Ashg,
            ModelArg::Fhg => Model::Fhg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Compare against every partition.
    Full,
    /// Compare against Pareto-optimal challengers only (same verdict).
    Pareto,
    /// Budgeted randomized search for a counterexample.
    Falsify,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in example game to a file.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Compile a quantified 3-DNF formula into a game.
    Reduce {
        /// Target game model.
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Formula file (DIMACS-like).
        formula: PathBuf,
        /// Output game file.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Output role-table file.
        #[arg(long)]
        roles: PathBuf,
    },
    /// Decide an exists-forall 3-DNF formula and print the least witness.
    Qsat {
        /// Formula file (DIMACS-like).
        formula: PathBuf,
    },
    /// Verify whether a partition is popular.
    Verify {
        game: PathBuf,
        partition: PathBuf,
        /// Verification strategy; chosen from the agent count when absent.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Exit 1 unless the partition is certified popular.
        #[arg(long)]
        strict: bool,
    },
    /// Search for a popular partition by exhaustive enumeration.
    FindPopular {
        game: PathBuf,
        /// Largest agent count to enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Budgeted randomized search for a more popular challenger.
    Falsify {
        game: PathBuf,
        partition: PathBuf,
        /// Number of challengers to examine.
        #[arg(long)]
        budget: u64,
        /// Random seed.
        #[arg(long)]
        seed: u64,
    },
    /// Print the popularity margin and vote tally between two partitions.
    Margin {
        game: PathBuf,
        pi1: PathBuf,
        pi2: PathBuf,
        /// Restrict the vote to these agents (comma-separated indices).
        #[arg(long)]
        subset: Option<String>,
    },
    /// Audit a compiled formula: census, tables, anchors, margin law.
    LemmaSuite {
        /// Target game model.
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Formula file (DIMACS-like).
        formula: PathBuf,
        /// Random seed for the sampling check.
        #[arg(long)]
        seed: u64,
        /// Number of sampled partitions in the sampling check.
        #[arg(long)]
        samples: u64,
    },
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// The five-agent game with no popular partition.
    Fig1 {
        /// Output game file.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// A star: one center valuing each of K leaves.
    Star {
        /// Number of leaves.
        #[arg(long)]
        k: usize,
        /// Output game file.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

/// Parses argv and runs the selected command, returning the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Help and version exit 0 here; usage errors exit 2.
        Err(err) => err.exit(),
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|err| format!("{}: {err}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|err| format!("{}: {err}", path.display()))
}

fn load_game(path: &Path) -> Result<GameDocument, String> {
    parse_game(&read_file(path)?).map_err(|err| format!("{}: {err}", path.display()))
}

fn load_partition(path: &Path, n_agents: usize) -> Result<Partition, String> {
    parse_partition(&read_file(path)?, n_agents)
        .map_err(|err| format!("{}: {err}", path.display()))
}

fn verdict_word(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Popular => "popular",
        Verdict::NotPopular => "not popular",
        Verdict::UnknownWithinBudget => "unknown within budget",
    }
}

fn parse_subset(text: &str) -> Result<Vec<AgentId>, String> {
    text.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<u32>()
                .map(AgentId)
                .map_err(|_| format!("subset entry {token:?} is not an agent index"))
        })
        .collect()
}

/// Strategy used when no `--mode` flag is given: exhaustive modes while the
/// challenger space is enumerable in reasonable time, randomized falsification
/// beyond that.
fn auto_mode(n_agents: usize) -> ModeArg {
    if n_agents <= 8 {
        ModeArg::Pareto
    } else if n_agents <= DEFAULT_ENUMERATION_LIMIT {
        ModeArg::Full
    } else {
        ModeArg::Falsify
    }
}

fn worker_threads() -> usize {
    std::thread::available_parallelism()
        .map(|count| count.get())
        .unwrap_or(1)
        .min(8)
}

const FALSIFY_DEFAULT_BUDGET: u64 = 20_000;

fn dispatch(command: Command) -> Result<i32, String> {
    match command {
        Command::Gadget { which } => {
            let (game, label, output) = match which {
                GadgetCommand::Fig1 { output } => {
                    (five_agent_noinstance(), "five-agent example".to_string(), output)
                }
                GadgetCommand::Star { k, output } => {
                    let game = star_game(k).map_err(|err| err.to_string())?;
                    (game, format!("star with {k} leaves"), output)
                }
            };
            let document = GameDocument::bare(game);
            write_file(&output, &serialize_game(&document))?;
            println!(
                "wrote {label} ({} agents) to {}",
                document.game.n_agents(),
                output.display()
            );
            Ok(0)
        }
        Command::Reduce {
            model,
            formula,
            output,
            roles,
        } => {
            let instance =
                parse_qdnf(&read_file(&formula)?).map_err(|err| format!("{}: {err}", formula.display()))?;
            let model = Model::from(model);
            let artifact = model.reduce(&instance).map_err(|err| err.to_string())?;
            let names = artifact.roles().iter().map(|role| role.to_string()).collect();
            let document = GameDocument::named(artifact.game().clone(), names);
            write_file(&output, &serialize_game(&document))?;
            write_file(&roles, &serialize_roles(&artifact))?;
            println!(
                "compiled {} game with {} agents to {} (roles in {})",
                model.label(),
                artifact.game().n_agents(),
                output.display(),
                roles.display()
            );
            Ok(0)
        }
        Command::Qsat { formula } => {
            let instance =
                parse_qdnf(&read_file(&formula)?).map_err(|err| format!("{}: {err}", formula.display()))?;
            match qsat_solve(&instance, DEFAULT_QSAT_LIMIT).map_err(|err| err.to_string())? {
                Some(witness) => {
                    println!("yes");
                    println!("least witness: x = {witness}");
                }
                None => println!("no"),
            }
            Ok(0)
        }
        Command::Verify {
            game,
            partition,
            mode,
            strict,
        } => {
            let document = load_game(&game)?;
            let target = load_partition(&partition, document.game.n_agents())?;
            let mode = mode.unwrap_or_else(|| auto_mode(document.game.n_agents()));
            let (mode_word, report) = match mode {
                ModeArg::Full => (
                    "full",
                    verify_popular_threaded(
                        &document.game,
                        &target,
                        DEFAULT_ENUMERATION_LIMIT,
                        worker_threads(),
                    )
                    .map_err(|err| err.to_string())?,
                ),
                ModeArg::Pareto => (
                    "pareto",
                    hedonic_core::popularity::verify_popular(
                        &document.game,
                        &target,
                        VerifyMode::ParetoRestricted,
                        DEFAULT_ENUMERATION_LIMIT,
                    )
                    .map_err(|err| err.to_string())?,
                ),
                ModeArg::Falsify => (
                    "falsify",
                    falsify_popularity(&document.game, &target, FALSIFY_DEFAULT_BUDGET, 0)
                        .map_err(|err| err.to_string())?,
                ),
            };
            println!("mode: {mode_word}");
            println!("verdict: {}", verdict_word(report.verdict));
            println!(
                "challengers examined: {}, pruned: {}",
                report.challengers_examined, report.pruned
            );
            if let Some(witness) = &report.witness {
                println!("more popular challenger: {witness}");
            }
            if strict && report.verdict != Verdict::Popular {
                Ok(1)
            } else {
                Ok(0)
            }
        }
        Command::FindPopular { game, limit } => {
            let document = load_game(&game)?;
            match find_popular(&document.game, limit).map_err(|err| err.to_string())? {
                Some((partition, report)) => {
                    println!("popular partition: {partition}");
                    println!("challengers examined: {}", report.challengers_examined);
                }
                None => println!("popular partition: none"),
            }
            Ok(0)
        }
        Command::Falsify {
            game,
            partition,
            budget,
            seed,
        } => {
            let document = load_game(&game)?;
            let target = load_partition(&partition, document.game.n_agents())?;
            let report = falsify_popularity(&document.game, &target, budget, seed)
                .map_err(|err| err.to_string())?;
            println!("verdict: {}", verdict_word(report.verdict));
            println!("challengers examined: {}", report.challengers_examined);
            if let Some(witness) = &report.witness {
                println!("more popular challenger: {witness}");
            }
            Ok(0)
        }
        Command::Margin {
            game,
            pi1,
            pi2,
            subset,
        } => {
            let document = load_game(&game)?;
            let first = load_partition(&pi1, document.game.n_agents())?;
            let second = load_partition(&pi2, document.game.n_agents())?;
            let subset = subset.as_deref().map(parse_subset).transpose()?;
            let tally = popularity_margin(&document.game, &first, &second, subset.as_deref())
                .map_err(|err| err.to_string())?;
            if let Some(agents) = &tally.restricted_to {
                let list: Vec<String> = agents.iter().map(|a| a.0.to_string()).collect();
                println!("restricted to agents: {}", list.join(","));
            }
            println!("margin: {}", tally.margin);
            println!(
                "tally: {} prefer first, {} prefer second, {} indifferent",
                tally.prefers_first, tally.prefers_second, tally.indifferent
            );
            Ok(0)
        }
        Command::LemmaSuite {
            model,
            formula,
            seed,
            samples,
        } => {
            let instance =
                parse_qdnf(&read_file(&formula)?).map_err(|err| format!("{}: {err}", formula.display()))?;
            let report = lemma_suite(Model::from(model), &instance, seed, samples)
                .map_err(|err| err.to_string())?;
            println!("{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_lists_parse_and_reject_garbage() {
        let parsed = parse_subset("2, 0,1").unwrap();
        assert_eq!(parsed, vec![AgentId(2), AgentId(0), AgentId(1)]);
        assert!(parse_subset("1,x").is_err());
        assert!(parse_subset("").is_err());
    }

    #[test]
    fn auto_mode_scales_with_agent_count() {
        assert!(matches!(auto_mode(5), ModeArg::Pareto));
        assert!(matches!(auto_mode(8), ModeArg::Pareto));
        assert!(matches!(auto_mode(9), ModeArg::Full));
        assert!(matches!(auto_mode(13), ModeArg::Full));
        assert!(matches!(auto_mode(14), ModeArg::Falsify));
    }

    #[test]
    fn grammar_accepts_the_documented_shapes() {
        Cli::try_parse_from(["hedonic", "gadget", "fig1", "-o", "game.txt"]).unwrap();
        Cli::try_parse_from(["hedonic", "gadget", "star", "--k", "4", "-o", "game.txt"]).unwrap();
        Cli::try_parse_from([
            "hedonic", "reduce", "--model", "fhg", "f.qdnf", "-o", "g.txt", "--roles", "r.txt",
        ])
        .unwrap();
        Cli::try_parse_from(["hedonic", "qsat", "f.qdnf"]).unwrap();
        Cli::try_parse_from(["hedonic", "verify", "g.txt", "p.txt", "--mode", "full", "--strict"])
            .unwrap();
        Cli::try_parse_from(["hedonic", "find-popular", "g.txt", "--limit", "9"]).unwrap();
        Cli::try_parse_from([
            "hedonic", "falsify", "g.txt", "p.txt", "--budget", "100", "--seed", "7",
        ])
        .unwrap();
        Cli::try_parse_from(["hedonic", "margin", "g.txt", "a.txt", "b.txt", "--subset", "0,2"])
            .unwrap();
        Cli::try_parse_from([
            "hedonic",
            "lemma-suite",
            "--model",
            "ashg",
            "f.qdnf",
            "--seed",
            "3",
            "--samples",
            "50",
        ])
        .unwrap();
    }

    #[test]
    fn grammar_rejects_missing_required_flags() {
        assert!(Cli::try_parse_from(["hedonic", "gadget", "star", "-o", "g.txt"]).is_err());
        assert!(Cli::try_parse_from(["hedonic", "reduce", "f.qdnf", "-o", "g.txt"]).is_err());
        assert!(Cli::try_parse_from(["hedonic", "falsify", "g.txt", "p.txt"]).is_err());
        assert!(Cli::try_parse_from(["hedonic", "wat"]).is_err());
    }
}
