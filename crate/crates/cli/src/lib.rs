//! `ptlab` command-line interface.
//!
//! Exit codes: 0 success, 1 internal failure, 2 usage or input error.

pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ptlab_core::classical::{
    evaluate, noncontextual_optimal, optimal_value_with, perfect_feasibility, DeterministicStrategy,
    Feasibility, Optimum, SolverConfig,
};
use ptlab_core::fraction::{common_denominator, format_fraction, format_over};
use ptlab_core::games::{
    builtin_game, contextual_variables, parse_game, validate, Game, Party, BUILTIN_NAMES,
};
use ptlab_core::quantum::{
    builtin_setup, play_match, quantum_value, round_distribution, verify_stabilizers, MatchStrategy,
};
use serde::{Deserialize, Serialize};

use report::*;

#[derive(Debug, Parser)]
#[command(name = "ptlab", version, about = "Parity pseudotelepathy games: classical bounds and the entangled strategy")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Worker threads for solvers and matches (default: all cores).
    #[arg(long, global = true, env = "PTLAB_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in games.
    List,
    /// Classical values, witnesses and infeasibility certificates.
    Classical {
        /// Built-in name or path to a game file.
        game: String,
        #[arg(long, value_enum, default_value_t = ClassicalMode::Optimal)]
        mode: ClassicalMode,
    },
    /// Check and inspect the entangled strategy.
    Quantum {
        game: String,
        #[arg(long, value_enum, default_value_t = QuantumAction::Verify)]
        action: QuantumAction,
        /// Question pair for `distribution`, e.g. "Xz:Yy".
        #[arg(long)]
        pair: Option<String>,
    },
    /// Play a seeded match.
    Play {
        game: String,
        /// `quantum`, `classical-optimal`, or a strategy file.
        #[arg(long, default_value = "quantum")]
        strategy: String,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        /// Decimal or 0x-prefixed hex.
        #[arg(long, default_value = "0", value_parser = parse_seed)]
        seed: u64,
    },
    /// Check a game for structural problems.
    Validate { game: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassicalMode {
    Optimal,
    Noncontextual,
    Feasibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantumAction {
    Verify,
    Value,
    Distribution,
}

/// Strategy file: hex bit vectors over each party's contextual variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub alice: String,
    pub bob: String,
}

pub fn parse_seed(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {text:?}: {e}"))
}

enum Failure {
    Usage(anyhow::Error),
    Internal(anyhow::Error),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy())
        .collect::<Vec<_>>()
        .join(" ");
    let ctx = Ctx {
        format: cli.format,
        threads: cli.threads.map_or_else(ptlab_core::default_threads, |t| t as usize),
        echo,
        start: Instant::now(),
    };
    let outcome = match &cli.command {
        Command::List => cmd_list(&ctx),
        Command::Classical { game, mode } => cmd_classical(&ctx, game, *mode),
        Command::Quantum { game, action, pair } => cmd_quantum(&ctx, game, *action, pair.as_deref()),
        Command::Play {
            game,
            strategy,
            rounds,
            seed,
        } => cmd_play(&ctx, game, strategy, *rounds, *seed),
        Command::Validate { game } => cmd_validate(&ctx, game),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}

struct Ctx {
    format: Format,
    threads: usize,
    echo: String,
    start: Instant,
}

impl Ctx {
    fn emit<T: Serialize>(&self, game: Option<&str>, result: &T, table: impl FnOnce() -> String) -> Outcome {
        match self.format {
            Format::Table => write_stdout(&table())?,
            Format::Json => {
                let report = Report {
                    command: self.echo.clone(),
                    game: game.map(str::to_string),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
                    result,
                };
                let text = serde_json::to_string_pretty(&report).map_err(internal)?;
                write_stdout(&(text + "\n"))?;
            }
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig { threads: self.threads }
    }
}

/// A closed pipe on stdout is not an error.
fn write_stdout(text: &str) -> Outcome {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(internal(e)),
        _ => Ok(()),
    }
}

/// A built-in name, else a game file.
fn load_game(reference: &str) -> Result<Game, Failure> {
    if let Some(g) = builtin_game(reference) {
        return Ok(g);
    }
    let path = Path::new(reference);
    if !path.exists() {
        return Err(usage(anyhow!(
            "{reference:?} is neither a built-in game ({}) nor a file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {reference}"))
        .map_err(usage)?;
    parse_game(&text)
        .with_context(|| format!("parsing {reference}"))
        .map_err(usage)
}

fn load_valid_game(reference: &str) -> Result<Game, Failure> {
    let g = load_game(reference)?;
    validate(&g).map_err(|vs| {
        let list: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        usage(anyhow!("invalid game {}: {}", g.name, list.join("; ")))
    })?;
    Ok(g)
}

fn summary(g: &Game) -> GameSummary {
    GameSummary {
        name: g.name.clone(),
        pairs: g.pairs.len(),
        predicates: g.predicate_count(),
        alice_variables: contextual_variables(g, Party::Alice).len(),
        bob_variables: contextual_variables(g, Party::Bob).len(),
    }
}

fn summary_line(s: &GameSummary) -> String {
    format!(
        "{}: {} pairs, {} predicates, {} + {} contextual variables",
        s.name, s.pairs, s.predicates, s.alice_variables, s.bob_variables
    )
}

fn cmd_list(ctx: &Ctx) -> Outcome {
    let games: Vec<GameSummary> = BUILTIN_NAMES
        .iter()
        .map(|n| summary(&builtin_game(n).expect("built-in")))
        .collect();
    ctx.emit(None, &games, || {
        games.iter().map(|s| summary_line(s) + "\n").collect()
    })
}

fn cmd_validate(ctx: &Ctx, reference: &str) -> Outcome {
    let g = load_game(reference)?;
    let violations: Vec<String> = match validate(&g) {
        Ok(()) => Vec::new(),
        Err(vs) => vs.iter().map(|v| v.to_string()).collect(),
    };
    let result = Validation {
        valid: violations.is_empty(),
        summary: summary(&g),
        violations,
    };
    ctx.emit(Some(&g.name), &result, || {
        let mut out = String::new();
        if result.valid {
            let _ = writeln!(out, "valid");
            let _ = writeln!(out, "{}", summary_line(&result.summary));
        } else {
            let _ = writeln!(out, "invalid: {} violation(s)", result.violations.len());
            for v in &result.violations {
                let _ = writeln!(out, "  {v}");
            }
        }
        out
    })?;
    if result.valid {
        Ok(())
    } else {
        Err(usage(anyhow!("{} is not a valid game", g.name)))
    }
}

fn optimal_result(g: &Game, opt: &Optimum) -> Result<OptimalResult, Failure> {
    let den = common_denominator(g.pairs.iter().map(|p| &p.weight))
        .ok_or_else(|| internal(anyhow!("weight denominators overflow")))?;
    let evaluation = evaluate(g, &opt.alice, &opt.bob).map_err(internal)?;
    Ok(OptimalResult {
        value: format_over(&opt.value, den),
        reduced: format_fraction(&opt.value),
        wins: opt.wins,
        witness: Witness {
            alice: opt.alice.to_hex(),
            bob: opt.bob.to_hex(),
        },
        evaluation,
    })
}

fn optimal_table(g: &Game, r: &OptimalResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "value    {} ({})", r.value, r.reduced);
    let _ = writeln!(out, "wins     {} of {} pairs", r.wins, g.pairs.len());
    let _ = writeln!(out, "alice    {}", r.witness.alice);
    let _ = writeln!(out, "bob      {}", r.witness.bob);
    let failed = &r.evaluation.failed_predicates;
    let _ = writeln!(
        out,
        "failed   {}",
        if failed.is_empty() { "-".to_string() } else { failed.join(" ") }
    );
    out
}

fn cmd_classical(ctx: &Ctx, reference: &str, mode: ClassicalMode) -> Outcome {
    let g = load_valid_game(reference)?;
    let result = match mode {
        ClassicalMode::Optimal => {
            let opt = optimal_value_with(&g, ctx.solver()).map_err(usage)?;
            ClassicalResult::Optimal(optimal_result(&g, &opt)?)
        }
        ClassicalMode::Noncontextual => {
            let opt = noncontextual_optimal(&g).map_err(usage)?;
            ClassicalResult::Noncontextual(optimal_result(&g, &opt)?)
        }
        ClassicalMode::Feasibility => ClassicalResult::Feasibility(match perfect_feasibility(&g).map_err(usage)? {
            Feasibility::Feasible { alice, bob } => FeasibilityResult::Feasible {
                witness: Witness {
                    alice: alice.to_hex(),
                    bob: bob.to_hex(),
                },
            },
            Feasibility::Infeasible(certificate) => FeasibilityResult::Infeasible { certificate },
        }),
    };
    ctx.emit(Some(&g.name), &result, || match &result {
        ClassicalResult::Optimal(r) | ClassicalResult::Noncontextual(r) => optimal_table(&g, r),
        ClassicalResult::Feasibility(FeasibilityResult::Feasible { witness }) => {
            format!("feasible\nalice    {}\nbob      {}\n", witness.alice, witness.bob)
        }
        ClassicalResult::Feasibility(FeasibilityResult::Infeasible { certificate }) => format!(
            "infeasible\ncertificate ({} predicates): {}\n",
            certificate.predicates.len(),
            certificate.predicates.join(" ")
        ),
    })
}

fn sign(a: i8) -> &'static str {
    if a > 0 {
        "+1"
    } else {
        "-1"
    }
}

fn cmd_quantum(ctx: &Ctx, reference: &str, action: QuantumAction, pair: Option<&str>) -> Outcome {
    let g = load_valid_game(reference)?;
    let setup = builtin_setup();
    let result = match action {
        QuantumAction::Verify => QuantumResult::Verify(verify_stabilizers(&setup)),
        QuantumAction::Value => QuantumResult::Value {
            value: quantum_value(&setup, &g).map_err(usage)?,
        },
        QuantumAction::Distribution => {
            let name = pair.ok_or_else(|| usage(anyhow!("--pair is required for distribution")))?;
            let index = g
                .find_pair(name)
                .ok_or_else(|| usage(anyhow!("unknown pair {name:?} in {}", g.name)))?;
            QuantumResult::Distribution(round_distribution(&setup, &g, index).map_err(usage)?)
        }
    };
    ctx.emit(Some(&g.name), &result, || {
        let mut out = String::new();
        match &result {
            QuantumResult::Verify(report) => {
                for c in &report.checks {
                    let residual = c.residual.map_or("missing".to_string(), |r| format!("{r:.1e}"));
                    let _ = writeln!(
                        out,
                        "{:<12} {}  residual {:<8} {}",
                        c.relation,
                        sign(c.eigenvalue),
                        residual,
                        if c.holds { "ok" } else { "FAIL" }
                    );
                }
            }
            QuantumResult::Value { value } => {
                let _ = writeln!(out, "{value:.12}");
            }
            QuantumResult::Distribution(d) => {
                let _ = writeln!(out, "{}  {}  probability  win", d.pair, d.observables.join(" "));
                for o in &d.outcomes {
                    let answers: Vec<&str> = o.answers.iter().map(|&a| sign(a)).collect();
                    let _ = writeln!(
                        out,
                        "{:width$}  {}  {:.6}     {}",
                        "",
                        answers.join(" "),
                        o.probability,
                        if o.wins { "yes" } else { "no" },
                        width = d.pair.len()
                    );
                }
            }
        }
        out
    })
}

fn load_strategy_file(g: &Game, path: &str) -> Result<(DeterministicStrategy, DeterministicStrategy), Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading strategy {path}"))
        .map_err(usage)?;
    let file: StrategyFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing strategy {path}"))
        .map_err(usage)?;
    let alice = DeterministicStrategy::from_hex(g, Party::Alice, &file.alice).map_err(usage)?;
    let bob = DeterministicStrategy::from_hex(g, Party::Bob, &file.bob).map_err(usage)?;
    Ok((alice, bob))
}

fn cmd_play(ctx: &Ctx, reference: &str, strategy: &str, rounds: u64, seed: u64) -> Outcome {
    let g = load_valid_game(reference)?;
    let setup;
    let classical;
    let s = match strategy {
        "quantum" => {
            setup = builtin_setup();
            MatchStrategy::Quantum(&setup)
        }
        "classical-optimal" => {
            let opt = optimal_value_with(&g, ctx.solver()).map_err(usage)?;
            classical = (opt.alice, opt.bob);
            MatchStrategy::Classical {
                alice: &classical.0,
                bob: &classical.1,
            }
        }
        path => {
            classical = load_strategy_file(&g, path)?;
            MatchStrategy::Classical {
                alice: &classical.0,
                bob: &classical.1,
            }
        }
    };
    let tally = play_match(&g, &s, rounds, seed, ctx.threads).map_err(usage)?;
    let result = PlayResult {
        strategy: strategy.to_string(),
        win_rate: tally.win_rate(),
        tally,
    };
    ctx.emit(Some(&g.name), &result, || {
        let t = &result.tally;
        let mut out = String::new();
        let _ = writeln!(out, "strategy {}  seed {}", result.strategy, t.seed);
        let _ = writeln!(
            out,
            "rounds {}  wins {}  losses {}  win rate {}",
            t.rounds,
            t.wins,
            t.rounds - t.wins,
            result.win_rate.map_or("-".to_string(), |r| format!("{r:.6}"))
        );
        for p in &t.pairs {
            let _ = writeln!(out, "  {:<8} {:>8} {:>8}", p.pair, p.rounds, p.wins);
        }
        out
    })
}
