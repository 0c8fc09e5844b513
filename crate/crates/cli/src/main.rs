//! `muller-hurry`: solve, play and check Muller games from the command line.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use muller_core::engine::{referee_play, verify_bound, RefereeConfig, SearchMode, Verdict};
use muller_core::finite_time::{solve_finite, StoppingRule, DEFAULT_STATE_CAP};
use muller_core::gamefile::GameFile;
use muller_core::par::ExecMode;
use muller_core::scoring::low_score_word;
use muller_core::strategy::{AnyStrategy, BuildOptions, StrategyName};
use muller_core::zielonka::solve_game;
use muller_core::{Player, VertexSet};

const FORMAT: &str = "muller-hurry/1";

#[derive(Parser)]
#[command(name = "muller-hurry", version, about = "Muller games with finite-time referees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Winning regions of the infinite game.
    Solve {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Winning regions of the game stopped by a referee.
    SolveFinite {
        file: PathBuf,
        #[command(flatten)]
        rule: FiniteRule,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Plays two named strategies against each other under a referee.
    Play {
        file: PathBuf,
        #[arg(long)]
        p0: StrategyName,
        #[arg(long)]
        p1: StrategyName,
        #[arg(long)]
        start: Option<usize>,
        /// `k<K>` for a uniform threshold, `mcnaughton` or `none`.
        #[arg(long, default_value = "k3", value_parser = parse_rule)]
        rule: StoppingRule,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Searches for opponent play that scores 3 against a score-bounding strategy.
    VerifyBound {
        file: PathBuf,
        #[arg(long, value_parser = parse_player)]
        player: Player,
        #[arg(long, conflicts_with = "random")]
        exhaustive: bool,
        #[arg(long, requires_all = ["trials", "seed"])]
        random: bool,
        /// Play length; defaults to 3^|V| for the exhaustive search.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        json: bool,
    },
    /// Prints a word of length k^n - 1 on which every set scores below k.
    GenWord {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Starts the play service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Idle seconds before a session is dropped.
        #[arg(long, default_value_t = 3600)]
        ttl: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FiniteRule {
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    mcnaughton: bool,
}

impl FiniteRule {
    fn rule(&self) -> StoppingRule {
        match self.k {
            Some(k) => StoppingRule::Uniform(k),
            None => StoppingRule::McNaughton,
        }
    }
}

fn parse_rule(s: &str) -> Result<StoppingRule, String> {
    match s {
        "mcnaughton" => Ok(StoppingRule::McNaughton),
        "none" => Ok(StoppingRule::None),
        _ => s
            .strip_prefix('k')
            .and_then(|k| k.parse().ok())
            .map(StoppingRule::Uniform)
            .ok_or_else(|| format!("expected k<K>, mcnaughton or none, got {s:?}")),
    }
}

fn parse_player(s: &str) -> Result<Player, String> {
    s.parse::<usize>().ok().and_then(Player::from_index).ok_or_else(|| format!("player must be 0 or 1, got {s:?}"))
}

enum Failure {
    /// Bad input: exit code 2.
    Input(String),
    /// The checked property does not hold: exit code 1.
    Falsified(String),
}

type Outcome = Result<(), Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> Result<GameFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    GameFile::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(value: Value) {
    let mut value = value;
    value.as_object_mut().expect("object").insert("format".into(), FORMAT.into());
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
}

fn regions_line(w0: VertexSet, w1: VertexSet) -> String {
    format!("W0={w0} W1={w1}")
}

fn solve(file: &Path, as_json: bool) -> Outcome {
    let g = load(file)?;
    let d = solve_game(&g.arena, &g.condition).map_err(input)?;
    if as_json {
        emit(json!({ "command": "solve", "w0": d.w0, "w1": d.w1 }));
    } else {
        println!("{}", regions_line(d.w0, d.w1));
    }
    Ok(())
}

fn rule_json(rule: StoppingRule, n: usize) -> Value {
    let thresholds: serde_json::Map<String, Value> = rule
        .thresholds(n)
        .into_iter()
        .filter_map(|(s, t)| t.ok().map(|t| (s.to_string(), json!(t))))
        .collect();
    json!({ "rule": rule, "thresholds": thresholds })
}

fn solve_finite_cmd(file: &Path, rule: StoppingRule, as_json: bool, state_cap: usize) -> Outcome {
    let g = load(file)?;
    let (pg, sol) = solve_finite(&g.arena, &g.condition, rule, state_cap).map_err(input)?;
    if as_json {
        emit(json!({
            "command": "solve-finite",
            "w0": sol.w0,
            "w1": sol.w1,
            "rule": rule_json(rule, g.condition.universe().len()),
            "states": pg.len(),
            "maxDepth": pg.max_depth(),
        }));
    } else {
        println!("{}", regions_line(sol.w0, sol.w1));
        println!("product states: {}, longest play: {}", pg.len(), pg.max_depth());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn play(
    file: &Path,
    names: [StrategyName; 2],
    start: Option<usize>,
    rule: StoppingRule,
    budget: usize,
    seed: u64,
    as_json: bool,
) -> Outcome {
    let g = load(file)?;
    let start = start.or(g.start).unwrap_or(0);
    let arena = Arc::new(g.arena);
    let cond = Arc::new(g.condition);
    let build = |name, p: Player| {
        let opts = BuildOptions { rule, seed: seed.wrapping_add(p.index() as u64), ..BuildOptions::default() };
        AnyStrategy::build(name, p, &arena, &cond, opts).map_err(input)
    };
    let s0 = build(names[0], Player::Zero)?;
    let s1 = build(names[1], Player::One)?;
    let cfg = RefereeConfig { rule, budget, detect_lasso: true };
    let rec = referee_play(&arena, &cond, cfg, &[start], &s0, &s1).map_err(input)?;
    let steps: Vec<String> = rec.steps.iter().map(|v| v.to_string()).collect();
    let verdict = match rec.verdict {
        Verdict::Stopped { winner, set, step } => {
            json!({ "kind": "stopped", "winner": winner.index(), "set": set, "step": step })
        }
        Verdict::Lasso { infinity_set, winner, cycle_start } => {
            json!({ "kind": "lasso", "winner": winner.index(), "infinitySet": infinity_set, "cycleStart": cycle_start })
        }
        Verdict::BudgetExhausted => json!({ "kind": "budget-exhausted" }),
    };
    if as_json {
        emit(json!({
            "command": "play",
            "p0": names[0],
            "p1": names[1],
            "history": rec.steps,
            "verdict": verdict,
        }));
    } else {
        println!("play: {}", steps.join(" "));
        match rec.verdict {
            Verdict::Stopped { winner, set, step } => {
                println!("stopped at step {step}: Player {winner} wins with {set}")
            }
            Verdict::Lasso { infinity_set, winner, cycle_start } => println!(
                "repeats from step {cycle_start}: infinity set {infinity_set}, Player {winner} wins"
            ),
            Verdict::BudgetExhausted => println!("no verdict after {} vertices", rec.steps.len()),
        }
    }
    Ok(())
}

struct VerifyArgs {
    player: Player,
    random: bool,
    depth: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    exec: ExecMode,
    json: bool,
}

fn verify(file: &Path, a: VerifyArgs) -> Outcome {
    let g = load(file)?;
    let arena = Arc::new(g.arena);
    let cond = Arc::new(g.condition);
    let d = solve_game(&arena, &cond).map_err(input)?;
    let mode = if a.random {
        let depth = a.depth.ok_or_else(|| input("--random needs --depth"))?;
        SearchMode::Random { trials: a.trials.unwrap_or(1000), depth, seed: a.seed.unwrap_or(0) }
    } else {
        let depth = a.depth.unwrap_or_else(|| 3usize.saturating_pow(arena.vertex_count() as u32));
        SearchMode::exhaustive(depth)
    };
    let r = verify_bound(&arena, &cond, &d, a.player, None, mode, a.exec).map_err(input)?;
    let holds = r.max_opponent_score <= 2;
    if a.json {
        emit(json!({
            "command": "verify-bound",
            "player": r.player.index(),
            "maxOpponentScore": r.max_opponent_score,
            "witness": r.witness,
            "plays": r.plays,
            "nodes": r.nodes,
            "holds": holds,
        }));
    } else {
        let witness = r.witness.as_ref().map_or("-".to_string(), |w| {
            w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        });
        println!("max opponent score: {} (witness: {witness})", r.max_opponent_score);
        println!("plays: {}, nodes: {}", r.plays, r.nodes);
    }
    if holds {
        Ok(())
    } else {
        Err(Failure::Falsified(format!("an opponent set reached score {}", r.max_opponent_score)))
    }
}

fn gen_word(k: u32, n: u32, as_json: bool) -> Outcome {
    let w = low_score_word(k, n).map_err(input)?;
    if as_json {
        emit(json!({ "command": "gen-word", "k": k, "n": n, "word": w }));
    } else if n < 10 {
        println!("{}", w.iter().map(|v| v.to_string()).collect::<String>());
    } else {
        println!("{}", w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}

fn serve(bind: IpAddr, port: u16, ttl: u64) -> Outcome {
    let addr = SocketAddr::new(bind, port);
    let rt = tokio::runtime::Runtime::new().map_err(input)?;
    eprintln!("listening on http://{addr}");
    rt.block_on(muller_service::serve(addr, Duration::from_secs(ttl))).map_err(input)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve { file, json } => solve(&file, json),
        Command::SolveFinite { file, rule, json, state_cap } => solve_finite_cmd(&file, rule.rule(), json, state_cap),
        Command::Play { file, p0, p1, start, rule, budget, seed, json } => {
            play(&file, [p0, p1], start, rule, budget, seed, json)
        }
        Command::VerifyBound { file, player, exhaustive: _, random, depth, trials, seed, sequential, json } => verify(
            &file,
            VerifyArgs {
                player,
                random,
                depth,
                trials,
                seed,
                exec: if sequential { ExecMode::Sequential } else { ExecMode::Parallel },
                json,
            },
        ),
        Command::GenWord { k, n, json } => gen_word(k, n, json),
        Command::Serve { port, bind, ttl } => serve(bind, port, ttl),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Falsified(msg)) => {
            eprintln!("falsified: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
