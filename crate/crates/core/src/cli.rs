//! Command-line interface: `solve`, `separator`, `trees` and `game`.

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::automata::{counter_separator_within, register_product_within, tree_separator, AutomatonJson, SafetyAutomaton};
use crate::error::{Error, Limits, Result};
use crate::game::{ParityGame, Player, Priority};
use crate::generate::{random_game, random_vertex_priority_game, GameParams};
use crate::lowerbound::{
    d_tree, extract_decomposition, lower_bound_report, make_accessible, validate_separator, Extraction,
    LowerBoundVerdict, ValidationConfig, Verdict,
};
use crate::pgsolver::{parse_pgsolver, write_pgsolver};
use crate::solvers::{lift_solve, solve_by_separation, zielonka};
use crate::trees::{full_tree_within, min_universal, size_bounds, succinct_leaves, succinct_tree_within};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug, Serialize)]
#[command(name = "paritysep", version, about = "Parity games through separating automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Solve parity games given in PGSolver format or as JSON dumps.
    Solve(SolveArgs),
    /// Build, validate and analyse separating automata.
    #[command(subcommand)]
    Separator(SeparatorCommand),
    /// Universal-tree size bounds and minima.
    #[command(subcommand)]
    Trees(TreesCommand),
    /// Generate games.
    #[command(subcommand)]
    Game(GameCommand),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct Caps {
    /// Largest automaton or product to build.
    #[arg(long, default_value_t = Limits::default().max_states)]
    pub max_states: usize,
    /// Largest tree to build.
    #[arg(long, default_value_t = Limits::default().max_leaves)]
    pub max_leaves: usize,
    /// Largest number of trees to enumerate.
    #[arg(long, default_value_t = Limits::default().max_enumerated)]
    pub max_enumerated: usize,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits {
            max_states: self.max_states,
            max_leaves: self.max_leaves,
            max_enumerated: self.max_enumerated,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Zielonka,
    SepCounter,
    SepTree,
    SepRegister,
    LiftFull,
    LiftSuccinct,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Zielonka => "zielonka",
            Algo::SepCounter => "sep-counter",
            Algo::SepTree => "sep-tree",
            Algo::SepRegister => "sep-register",
            Algo::LiftFull => "lift-full",
            Algo::LiftSuccinct => "lift-succinct",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    /// Game files; `-` reads stdin.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    #[arg(long, value_enum, default_value_t = Algo::Zielonka)]
    pub algo: Algo,
    /// Run every algorithm and compare the winners with Zielonka's.
    #[arg(long)]
    pub cross_check: bool,
    /// Include wall-clock times (makes reports non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Solve up to this many inputs in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub caps: Caps,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatorKind {
    Counter,
    Tree,
    FullTree,
    Register,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatorCommand {
    /// Write a built-in separator as automaton JSON.
    Gen {
        #[arg(long, value_enum)]
        kind: SeparatorKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Priority,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        output: Output,
    },
    /// Test an automaton against the strong separator contract.
    Validate {
        input: String,
        #[arg(long)]
        n: usize,
        /// Defaults to the automaton's alphabet.
        #[arg(long)]
        d: Option<Priority>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1000)]
        lassos: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Extract a tree decomposition and its tree.
    Extract {
        input: String,
        #[arg(long)]
        d: Option<Priority>,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the extracted tree with the lower bounds.
    LowerBound {
        input: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<Priority>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreesCommand {
    /// Lower and upper bounds on universal tree sizes.
    #[command(disable_help_flag = true)]
    Bounds {
        #[arg(short = 'l', long)]
        leaves: usize,
        #[arg(short = 'h', long)]
        height: usize,
        /// Also search for the smallest universal tree (slow beyond ℓ = 5, h = 3).
        #[arg(long)]
        with_min: bool,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        #[arg(long, action = clap::ArgAction::Help)]
        #[serde(skip)]
        help: Option<bool>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        output: Output,
    },
    /// Smallest universal tree by exhaustive search.
    #[command(disable_help_flag = true)]
    Min {
        #[arg(short = 'l', long)]
        leaves: usize,
        #[arg(short = 'h', long)]
        height: usize,
        #[arg(long, action = clap::ArgAction::Help)]
        #[serde(skip)]
        help: Option<bool>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GameFormat {
    Pgsolver,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameCommand {
    /// A seeded random game.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        d: Priority,
        #[arg(long, default_value_t = 3)]
        max_out: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// PGSolver output gives each vertex one priority for all its out-edges.
        #[arg(long, value_enum, default_value_t = GameFormat::Pgsolver)]
        format: GameFormat,
        #[command(flatten)]
        output: Output,
    },
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

/// Parses a game in PGSolver format, or a JSON dump if the text starts with `{`.
pub fn parse_game(text: &str) -> Result<ParityGame> {
    if text.trim_start().starts_with('{') {
        ParityGame::from_dump(&serde_json::from_str(text)?)
    } else {
        parse_pgsolver(text)
    }
}

fn read_automaton(path: &str) -> Result<SafetyAutomaton> {
    let json: AutomatonJson = serde_json::from_str(&read_input(path)?)?;
    SafetyAutomaton::from_json(&json)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_INPUT,
    }
}

fn emit(output: &Output, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn envelope(config: &impl Serialize, body: Value) -> Value {
    let mut out = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
    });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

struct AlgoRun {
    winner: Vec<Player>,
    strategy: Vec<Option<usize>>,
    stats: Value,
}

fn run_algo(g: &ParityGame, algo: Algo, limits: &Limits) -> Result<AlgoRun> {
    let n = g.num_vertices();
    let d = g.bound();
    let h = (d / 2) as usize;
    let merge = |winner: &[Player], even: Option<&Vec<Option<usize>>>, odd: Option<&Vec<Option<usize>>>| {
        (0..n)
            .map(|v| {
                let side = if g.owner(v) == Player::Even { even } else { odd };
                if winner[v] == g.owner(v) {
                    side.and_then(|s| s[v])
                } else {
                    None
                }
            })
            .collect::<Vec<_>>()
    };
    let separation = |a: &SafetyAutomaton| -> Result<AlgoRun> {
        let s = solve_by_separation(g, a, limits)?;
        let strategy = merge(&s.solution.winner, Some(&s.initial_moves), s.solution.odd_strategy.as_ref());
        Ok(AlgoRun {
            winner: s.solution.winner,
            strategy,
            stats: json!({ "product_states": s.product_states, "automaton_states": a.num_states() }),
        })
    };
    let lifting = |t: &crate::trees::OrderedTree| -> Result<AlgoRun> {
        let r = lift_solve(g, t)?;
        let strategy = merge(&r.solution.winner, r.solution.even_strategy.as_ref(), None);
        Ok(AlgoRun {
            winner: r.solution.winner,
            strategy,
            stats: json!({ "lift_count": r.lift_count, "tree_leaves": t.size() }),
        })
    };
    match algo {
        Algo::Zielonka => {
            let s = zielonka(g);
            let strategy = merge(&s.winner, s.even_strategy.as_ref(), s.odd_strategy.as_ref());
            Ok(AlgoRun {
                winner: s.winner,
                strategy,
                stats: json!({}),
            })
        }
        Algo::SepCounter => separation(&counter_separator_within(n, d, limits)?),
        Algo::SepTree => separation(&tree_separator(&succinct_tree_within(n, h, limits)?, d)?),
        Algo::SepRegister => separation(&register_product_within(n, d, limits)?.automaton),
        Algo::LiftFull => lifting(&full_tree_within(n, h, limits)?),
        Algo::LiftSuccinct => lifting(&succinct_tree_within(n, h, limits)?),
    }
}

fn algo_json(g: &ParityGame, algo: Algo, run: &AlgoRun, elapsed: Option<f64>) -> Value {
    let strategy: Vec<Value> = run
        .strategy
        .iter()
        .map(|s| match s {
            Some(e) => {
                let edge = g.edge(*e);
                json!({ "edge": e, "to": edge.dst, "priority": edge.pri })
            }
            None => Value::Null,
        })
        .collect();
    let mut stats = run.stats.clone();
    if let (Some(t), Value::Object(o)) = (elapsed, &mut stats) {
        o.insert("time_ms".into(), json!(t));
    }
    json!({
        "algo": algo.name(),
        "winner_per_vertex": run.winner,
        "strategy": strategy,
        "stats": stats,
    })
}

/// Solves one input; returns its report entry and exit status.
fn solve_one(path: &str, args: &SolveArgs) -> (Value, i32) {
    let limits = args.caps.limits();
    let game = match read_input(path).and_then(|t| parse_game(&t)) {
        Ok(g) => g,
        Err(e) => return (json!({ "input": path, "error": e.to_string() }), EXIT_INPUT),
    };
    let algos: Vec<Algo> = if args.cross_check {
        Algo::value_variants().to_vec()
    } else {
        vec![args.algo]
    };
    let mut runs = Vec::new();
    let mut status = EXIT_OK;
    let mut reference: Option<Vec<Player>> = None;
    let mut divergent = Vec::new();
    for algo in algos {
        let start = Instant::now();
        match run_algo(&game, algo, &limits) {
            Ok(run) => {
                let elapsed = args.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
                match &reference {
                    None => reference = Some(run.winner.clone()),
                    Some(r) if *r != run.winner => divergent.push(algo.name()),
                    Some(_) => {}
                }
                runs.push(algo_json(&game, algo, &run, elapsed));
            }
            Err(e) => {
                if !args.cross_check {
                    status = status.max(exit_code(&e));
                }
                runs.push(json!({ "algo": algo.name(), "error": e.to_string() }));
            }
        }
    }
    let mut entry = json!({
        "input": path,
        "n": game.num_vertices(),
        "d": game.bound(),
        "runs": runs,
    });
    if args.cross_check {
        entry["cross_check"] = json!({ "agree": divergent.is_empty(), "divergent": divergent });
        if !divergent.is_empty() {
            status = EXIT_FAIL;
        }
    }
    (entry, status)
}

fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidGame(format!("thread pool: {e}")))?;
    let results: Vec<(Value, i32)> = pool.install(|| args.inputs.par_iter().map(|p| solve_one(p, args)).collect());
    // Parse errors dominate; then divergence; then caps.
    let status = results.iter().map(|r| r.1).fold(EXIT_OK, |acc, s| match (acc, s) {
        (EXIT_INPUT, _) | (_, EXIT_INPUT) => EXIT_INPUT,
        (EXIT_FAIL, _) | (_, EXIT_FAIL) => EXIT_FAIL,
        (a, b) => a.max(b),
    });
    let body = json!({ "results": results.into_iter().map(|r| r.0).collect::<Vec<_>>() });
    emit(&args.output, &envelope(args, body))?;
    Ok(status)
}

fn automaton_d(a: &SafetyAutomaton, d: Option<Priority>) -> Priority {
    d.unwrap_or(a.alphabet())
}

fn cmd_separator(cmd: &SeparatorCommand) -> Result<i32> {
    match cmd {
        SeparatorCommand::Gen {
            kind,
            n,
            d,
            caps,
            output,
        } => {
            let limits = caps.limits();
            let h = (*d / 2) as usize;
            let a = match kind {
                SeparatorKind::Counter => counter_separator_within(*n, *d, &limits)?,
                SeparatorKind::Tree => tree_separator(&succinct_tree_within(*n, h, &limits)?, *d)?,
                SeparatorKind::FullTree => tree_separator(&full_tree_within(*n, h, &limits)?, *d)?,
                SeparatorKind::Register => register_product_within(*n, *d, &limits)?.automaton,
            };
            emit(output, &serde_json::to_value(a.to_json())?)?;
            Ok(EXIT_OK)
        }
        SeparatorCommand::Validate {
            input,
            n,
            d,
            budget,
            lassos,
            seed,
            output,
        } => {
            let a = read_automaton(input)?;
            let cfg = ValidationConfig {
                budget: *budget,
                lassos: *lassos,
                seed: *seed,
                ..ValidationConfig::new(*n, automaton_d(&a, *d))
            };
            let report = validate_separator(&a, &cfg)?;
            let status = if report.verdict == Verdict::Fail { EXIT_FAIL } else { EXIT_OK };
            emit(output, &envelope(cmd, serde_json::to_value(&report)?))?;
            Ok(status)
        }
        SeparatorCommand::Extract { input, d, output } => {
            let a = make_accessible(&read_automaton(input)?);
            let d = automaton_d(&a, *d);
            let (body, status) = match extract_decomposition(&a, d)? {
                Extraction::Decomposition(dec) => {
                    let dt = d_tree(&dec);
                    (
                        json!({
                            "verdict": "decomposition",
                            "decomposition": dec,
                            "d_tree": dt.tree.to_shape(),
                            "leaf_states": dt.leaf_states,
                        }),
                        EXIT_OK,
                    )
                }
                Extraction::NotSeparator(w) => (
                    json!({ "verdict": "not-strong-separator", "witnesses": [w] }),
                    EXIT_FAIL,
                ),
            };
            emit(output, &envelope(cmd, body))?;
            Ok(status)
        }
        SeparatorCommand::LowerBound {
            input,
            n,
            d,
            caps,
            output,
        } => {
            let a = read_automaton(input)?;
            let report = lower_bound_report(&a, *n, automaton_d(&a, *d), &caps.limits())?;
            let status = match report.verdict {
                LowerBoundVerdict::Consistent => EXIT_OK,
                _ => EXIT_FAIL,
            };
            emit(output, &envelope(cmd, serde_json::to_value(&report)?))?;
            Ok(status)
        }
    }
}

fn cmd_trees(cmd: &TreesCommand) -> Result<i32> {
    match cmd {
        TreesCommand::Bounds {
            leaves,
            height,
            with_min,
            format,
            caps,
            output,
            ..
        } => {
            let b = size_bounds(*leaves, *height)?;
            let constructed = succinct_leaves(*leaves, *height);
            let min = if *with_min {
                Some(min_universal(*leaves, *height, &caps.limits())?.size)
            } else {
                None
            };
            match format {
                TableFormat::Json => {
                    let mut row = serde_json::to_value(b)?;
                    row["constructed"] = json!(constructed);
                    if let Some(m) = min {
                        row["min"] = json!(m);
                    }
                    emit(output, &envelope(cmd, row))?;
                }
                TableFormat::Csv => {
                    let mut text = String::from("leaves,height,g,binom_lower,jl_upper,constructed,min\n");
                    text += &format!(
                        "{},{},{},{},{},{},{}\n",
                        b.leaves,
                        b.height,
                        b.g,
                        b.binom_lower,
                        b.jl_upper,
                        constructed,
                        min.map(|m| m.to_string()).unwrap_or_default()
                    );
                    match &output.out {
                        Some(path) => std::fs::write(path, text)?,
                        None => print!("{text}"),
                    }
                }
            }
            Ok(EXIT_OK)
        }
        TreesCommand::Min {
            leaves,
            height,
            caps,
            output,
            ..
        } => {
            let m = min_universal(*leaves, *height, &caps.limits())?;
            emit(output, &envelope(cmd, serde_json::to_value(m)?))?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_game(cmd: &GameCommand) -> Result<i32> {
    let GameCommand::Random {
        n,
        d,
        max_out,
        seed,
        format,
        output,
    } = cmd;
    let params = GameParams {
        n: *n,
        d: *d,
        max_out: *max_out,
    };
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(*seed);
    let text = match format {
        GameFormat::Pgsolver => write_pgsolver(&random_vertex_priority_game(&params, &mut rng)?)?,
        GameFormat::Json => serde_json::to_string_pretty(&random_game(&params, &mut rng)?.to_dump())? + "\n",
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

/// Runs the command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Separator(cmd) => cmd_separator(cmd),
        Command::Trees(cmd) => cmd_trees(cmd),
        Command::Game(cmd) => cmd_game(cmd),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(&Cli::parse())
}
