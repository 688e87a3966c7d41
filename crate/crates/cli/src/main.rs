//! `pddb`: check, evaluate, query and explain p-programs.
//!
//! Exit codes: 0 success, 1 validation or user error, 2 strict-mode refusal
//! or non-convergence under `--strict`, 3 I/O failure.

mod import;
mod output;

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pddb_core::calculus::{conjoin, disjoin};
use pddb_core::engine::{Database, EngineError, FixpointOptions, FixpointResult, Status};
use pddb_core::lang::{validate, GroundAtom, PProgram, PRule};
use pddb_core::oracle::{ignorance_oracle, independence_oracle, Connective};
use pddb_core::parser::{parse_program, parse_query, render_rule};
use pddb_core::proof::{prove, render_tree, ProofError, ProveOptions};
use pddb_core::synth::reduced_level;
use pddb_core::{ConfidenceLevel, Mode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "pddb", version, about = "Probabilistic deductive database over confidence levels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a program; diagnostics go to standard error.
    Check {
        program: PathBuf,
        #[command(flatten)]
        edb: EdbArgs,
    },
    /// Compute the least fixpoint and print every derived atom.
    Eval {
        program: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
        /// Also list atoms whose value is the truth-order bottom.
        #[arg(long)]
        all: bool,
    },
    /// Print the derived atoms matching a pattern such as `p(1,Y)`.
    Query {
        program: PathBuf,
        pattern: String,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Build the proof tree of a ground goal.
    Prove {
        program: PathBuf,
        goal: String,
        #[command(flatten)]
        eval: EvalArgs,
        /// Tree depth used when the fixpoint is not reached exactly.
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Limit on printed tree lines in text output.
        #[arg(long, default_value_t = 2000)]
        max_lines: usize,
    },
    /// Turn CSV rows `args...,alpha,beta,gamma,delta` into facts.
    Import {
        csv: PathBuf,
        /// Predicate name for the facts.
        #[arg(long)]
        pred: String,
        /// Disjunctive mode attached to the facts.
        #[arg(long, default_value = "pc")]
        disj: Mode,
    },
    /// Compare closed-form combinations against the numeric oracles.
    Selftest {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Grid step of the independence oracle.
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct EdbArgs {
    /// Load facts for `pred` from a CSV file. Repeatable.
    #[arg(long = "edb", value_name = "PRED=PATH")]
    edb: Vec<EdbSpec>,
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Stop once an iteration changes no component by more than this.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Refuse programs that may not terminate and fail on approximations.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    edb: EdbArgs,
}

impl EvalArgs {
    fn options(&self) -> FixpointOptions {
        FixpointOptions {
            max_iters: self.max_iters,
            eps: self.eps,
            strict: self.strict,
        }
    }
}

#[derive(Debug, Clone)]
struct EdbSpec {
    pred: String,
    path: PathBuf,
}

impl FromStr for EdbSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pred, path) = s
            .split_once('=')
            .ok_or_else(|| format!("expected PRED=PATH, got `{s}`"))?;
        if pred.is_empty() || path.is_empty() {
            return Err(format!("expected PRED=PATH, got `{s}`"));
        }
        Ok(EdbSpec {
            pred: pred.to_string(),
            path: PathBuf::from(path),
        })
    }
}

/// An error whose diagnostics were already printed.
#[derive(Debug)]
struct Reported;

impl std::fmt::Display for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("diagnostics reported")
    }
}

impl std::error::Error for Reported {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<std::io::Error>() {
            return 3;
        }
        let strict = matches!(cause.downcast_ref(), Some(EngineError::StrictRefusal(_)))
            || matches!(cause.downcast_ref(), Some(ProofError::Engine(EngineError::StrictRefusal(_))));
        if strict {
            return 2;
        }
    }
    1
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path, edb: &EdbArgs) -> Result<PProgram> {
    let text = read(path)?;
    let mut program = parse_program(&text).map_err(|e| {
        eprintln!("{}", e.to_diagnostic());
        anyhow!(Reported)
    })?;
    for spec in &edb.edb {
        let csv = read(&spec.path)?;
        let disj = program.disj_mode_of(&spec.pred).unwrap_or(PRule::DEFAULT_DISJ);
        let facts = import::facts_from_csv(&csv, &spec.pred, disj)
            .with_context(|| format!("in {}", spec.path.display()))?;
        program.rules.extend(facts);
    }
    Ok(program)
}

fn load_database(path: &Path, edb: &EdbArgs) -> Result<Database> {
    let program = load_program(path, edb)?;
    match Database::load(&program) {
        Ok(db) => {
            for d in db.diagnostics() {
                eprintln!("{d}");
            }
            Ok(db)
        }
        Err(EngineError::Invalid(diags)) => {
            for d in &diags {
                eprintln!("{d}");
            }
            Err(anyhow!(Reported))
        }
        Err(e) => Err(e.into()),
    }
}

fn evaluate(db: &Database, args: &EvalArgs) -> Result<FixpointResult> {
    if args.strict {
        db.check_strict()?;
    }
    Ok(db.evaluate(&args.options())?)
}

/// Exit status after printing a result of the given status.
fn status_code(args: &EvalArgs, status: Status) -> u8 {
    if args.strict && status == Status::Approximate {
        eprintln!("error: no exact fixpoint within {} iterations", args.max_iters);
        2
    } else {
        0
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_check(path: &Path, edb: &EdbArgs) -> Result<u8> {
    let program = load_program(path, edb)?;
    let diags = validate(&program);
    for d in &diags {
        eprintln!("{d}");
    }
    Ok(if diags.iter().any(|d| d.is_error()) { 1 } else { 0 })
}

fn cmd_eval(path: &Path, args: &EvalArgs, all: bool) -> Result<u8> {
    let db = load_database(path, &args.edb)?;
    let r = evaluate(&db, args)?;
    let mut atoms: Vec<(GroundAtom, ConfidenceLevel)> =
        r.valuation.sorted().into_iter().map(|(a, c)| (a.clone(), c)).collect();
    if all {
        let mut extra: BTreeSet<GroundAtom> = db.instances(&r.valuation)?.into_iter().map(|i| i.head).collect();
        for rule in &db.program().rules {
            for atom in std::iter::once(&rule.head).chain(&rule.body) {
                if let Some(g) = atom.to_ground() {
                    extra.insert(g);
                }
            }
        }
        atoms.extend(
            extra
                .into_iter()
                .filter(|a| !r.valuation.contains(a))
                .map(|a| (a, ConfidenceLevel::FALSE)),
        );
        atoms.sort_by(|x, y| x.0.cmp(&y.0));
    }
    if args.json {
        print_json(&output::eval_json(&atoms, &r))?;
    } else {
        print!("{}", output::eval_text(&atoms, &r));
    }
    Ok(status_code(args, r.status))
}

fn cmd_query(path: &Path, pattern: &str, args: &EvalArgs) -> Result<u8> {
    let pattern = parse_query(pattern).map_err(|e| anyhow!("bad query pattern: {e}"))?;
    let db = load_database(path, &args.edb)?;
    let r = evaluate(&db, args)?;
    let q = db.query(&r, &pattern);
    for w in &q.warnings {
        eprintln!("{w}");
    }
    if args.json {
        print_json(&output::query_json(&q, &r))?;
    } else {
        print!("{}", output::query_text(&q));
    }
    Ok(status_code(args, r.status))
}

fn cmd_prove(path: &Path, goal: &str, args: &EvalArgs, depth: usize, max_lines: usize) -> Result<u8> {
    let atom = parse_query(goal).map_err(|e| anyhow!("bad goal: {e}"))?;
    let ground = atom
        .to_ground()
        .ok_or_else(|| anyhow!("goal {atom} is not ground; proof trees are built for ground atoms only"))?;
    let db = load_database(path, &args.edb)?;
    if args.strict {
        evaluate(&db, args)?;
    }
    let opts = ProveOptions {
        depth,
        fixpoint: args.options(),
    };
    let p = prove(&db, &atom, &opts)?;
    if args.json {
        print_json(&output::prove_json(&ground, &p)?)?;
    } else {
        print!("{}", render_tree(&p.tree, max_lines)?);
        println!("{}", output::prove_summary(&p));
    }
    let status = if p.exact { Status::Exact } else { Status::Approximate };
    Ok(status_code(args, status))
}

fn cmd_import(path: &Path, pred: &str, disj: Mode) -> Result<u8> {
    let text = read(path)?;
    let facts = import::facts_from_csv(&text, pred, disj)?;
    let mut out = std::io::stdout().lock();
    for f in &facts {
        writeln!(out, "{}", render_rule(f))?;
    }
    Ok(0)
}

const IGN_TOL: f64 = 1e-6;
const IND_TOL: f64 = 0.02;

fn cmd_selftest(samples: usize, seed: u64, grid_step: f64) -> Result<u8> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        bail!("grid step must lie in (0,1]");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = [[0.0f64; 2]; 2];
    for _ in 0..samples {
        let a = reduced_level(&mut rng);
        let b = reduced_level(&mut rng);
        for (m, mode) in [Mode::Ignorance, Mode::Independence].into_iter().enumerate() {
            for (k, op) in [Connective::Conj, Connective::Disj].into_iter().enumerate() {
                let oracle = match mode {
                    Mode::Ignorance => ignorance_oracle(op, &a, &b)?,
                    _ => independence_oracle(op, &a, &b, grid_step)?,
                };
                let closed = match op {
                    Connective::Conj => conjoin(mode, &a, &b)?,
                    Connective::Disj => disjoin(mode, &a, &b)?,
                };
                dev[m][k] = dev[m][k].max(oracle.max_abs_diff(&closed));
            }
        }
    }
    let entry = |d: [f64; 2], tol: f64| {
        json!({"conj": d[0], "disj": d[1], "tolerance": tol, "pass": d[0] <= tol && d[1] <= tol})
    };
    let pass = dev[0].iter().all(|d| *d <= IGN_TOL) && dev[1].iter().all(|d| *d <= IND_TOL);
    print_json(&json!({
        "samples": samples,
        "seed": seed,
        "grid_step": grid_step,
        "modes": {"ign": entry(dev[0], IGN_TOL), "ind": entry(dev[1], IND_TOL)},
        "pass": pass,
    }))?;
    Ok(if pass { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { program, edb } => cmd_check(&program, &edb),
        Command::Eval { program, eval, all } => cmd_eval(&program, &eval, all),
        Command::Query { program, pattern, eval } => cmd_query(&program, &pattern, &eval),
        Command::Prove {
            program,
            goal,
            eval,
            depth,
            max_lines,
        } => cmd_prove(&program, &goal, &eval, depth, max_lines),
        Command::Import { csv, pred, disj } => cmd_import(&csv, &pred, disj),
        Command::Selftest {
            samples,
            seed,
            grid_step,
        } => cmd_selftest(samples, seed, grid_step),
    }
}

fn main() -> ExitCode {
    // clap would exit with 2 on usage errors, which is reserved here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            if !err.is::<Reported>() {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
