//! Acceptance checks. Runs without the libtest harness so that each
//! criterion prints exactly one PASS or FAIL line.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use pddb_core::calculus::{conjoin, disjoin, negate, Mode};
use pddb_core::engine::{Database, FixpointOptions, Status, Valuation};
use pddb_core::lang::GroundAtom;
use pddb_core::oracle::{ignorance_oracle, independence_oracle, Connective};
use pddb_core::parser::parse_program;
use pddb_core::proof::{build_ddt, dpt_confidence};
use pddb_core::synth::{acyclic_program, chain_closure, cycle_closure, random_graph_closure, reduced_level, ProgramShape};
use pddb_core::trilattice::{join, leq, meet};
use pddb_core::{ConfidenceLevel, LatticeOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type AtomTable = Vec<(String, Vec<Value>, ConfidenceLevel)>;
type Criterion = (&'static str, fn() -> Check);

const TOL: f64 = 1e-9;
const SAMPLES: usize = 1000;
const T: LatticeOrder = LatticeOrder::Truth;

fn cl(a: f64, b: f64, g: f64, d: f64) -> ConfidenceLevel {
    ConfidenceLevel::new(a, b, g, d).unwrap()
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn pddb(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_pddb"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// `eval --json` on a shipped example: status string and atom table.
fn eval_json(name: &str, extra: &[&str]) -> Result<(String, AtomTable), String> {
    let path = example(name);
    let mut args = vec!["eval", path.to_str().unwrap(), "--json"];
    args.extend_from_slice(extra);
    let (code, stdout) = pddb(&args);
    if code != 0 {
        return Err(format!("{name}: exit {code}"));
    }
    let v: Value = serde_json::from_slice(&stdout).map_err(|e| e.to_string())?;
    let atoms = v["atoms"]
        .as_array()
        .ok_or("no atoms")?
        .iter()
        .map(|a| {
            let b = &a["belief"];
            let d = &a["doubt"];
            let f = |x: &Value| x.as_f64().unwrap();
            (
                a["pred"].as_str().unwrap().to_string(),
                a["args"].as_array().unwrap().clone(),
                cl(f(&b[0]), f(&b[1]), f(&d[0]), f(&d[1])),
            )
        })
        .collect();
    Ok((v["status"].as_str().unwrap_or("").to_string(), atoms))
}

fn lookup(atoms: &[(String, Vec<Value>, ConfidenceLevel)], pred: &str, args: &[i64]) -> Option<ConfidenceLevel> {
    atoms
        .iter()
        .find(|(p, a, _)| p == pred && a.iter().map(|x| x.as_i64()).eq(args.iter().map(|&n| Some(n))))
        .map(|(_, _, c)| *c)
}

fn expect(what: &str, got: Option<ConfidenceLevel>, want: ConfidenceLevel) -> Result<(), String> {
    match got {
        Some(c) if c.approx_eq(&want, TOL) => Ok(()),
        Some(c) => Err(format!("{what} = {c}, expected {want}")),
        None => Err(format!("{what} missing")),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let (status, atoms) = eval_json("ex52.pddb", &[])?;
    ensure(status == "exact", || format!("status {status}"))?;
    expect("B", lookup(&atoms, "B", &[]), cl(0.9, 0.95, 0.0, 0.1))?;
    expect("C", lookup(&atoms, "C", &[]), cl(0.7, 0.8, 0.1, 0.2))?;
    expect("A", lookup(&atoms, "A", &[]), cl(0.45, 0.8, 0.1, 0.4))?;
    let text = std::fs::read_to_string(example("ex52.pddb")).unwrap();
    let db = Database::load(&parse_program(&text).unwrap()).unwrap();
    let val = |a: ConfidenceLevel, b: ConfidenceLevel, c: ConfidenceLevel| -> Valuation {
        [
            (GroundAtom::new("A", vec![]), a),
            (GroundAtom::new("B", vec![]), b),
            (GroundAtom::new("C", vec![]), c),
        ]
        .into_iter()
        .collect()
    };
    let v1 = val(cl(0.5, 0.9, 0.0, 0.0), cl(0.9, 1.0, 0.0, 0.0), cl(0.8, 0.9, 0.05, 0.1));
    let v2 = val(cl(0.5, 0.7, 0.1, 0.4), cl(0.9, 1.0, 0.0, 0.0), cl(0.9, 1.0, 0.0, 0.0));
    let v3 = val(cl(0.45, 0.8, 0.1, 0.4), cl(0.9, 0.95, 0.0, 0.1), cl(0.7, 0.8, 0.1, 0.2));
    let s = |v: &Valuation| db.satisfies(v).unwrap();
    ensure(s(&v1) && s(&v3) && !s(&v2), || {
        format!("satisfies v1={} v2={} v3={}", s(&v1), s(&v2), s(&v3))
    })?;
    Ok("v3 reproduced, v1 and v3 satisfy, v2 does not".into())
}

fn criterion_2() -> Check {
    let (status, atoms) = eval_json("tc1.pddb", &[])?;
    ensure(status == "exact", || format!("status {status}"))?;
    expect("p(1,2)", lookup(&atoms, "p", &[1, 2]), cl(1.0, 1.0, 0.0, 0.0))?;
    expect("p(1,3)", lookup(&atoms, "p", &[1, 3]), cl(1.0, 1.0, 0.0, 0.0))?;
    expect("p(3,2)", lookup(&atoms, "p", &[3, 2]), cl(0.9, 0.9, 0.0, 0.0))?;
    Ok("p(1,2), p(1,3), p(3,2) exact".into())
}

fn criterion_3() -> Check {
    let (status, atoms) = eval_json("tc2.pddb", &[])?;
    ensure(status == "exact", || format!("pc status {status}"))?;
    expect("pc p(1,2)", lookup(&atoms, "p", &[1, 2]), cl(0.0, 1.0, 0.0, 0.0))?;
    let (status, atoms) = eval_json("tc2_low.pddb", &[])?;
    ensure(status == "exact", || format!("low status {status}"))?;
    expect("low p(1,2)", lookup(&atoms, "p", &[1, 2]), cl(0.0, 0.1, 0.0, 0.0))?;
    let (status, atoms) = eval_json("tc2_ign.pddb", &["--max-iters", "200"])?;
    ensure(status == "approximate", || format!("ign status {status}"))?;
    let p = lookup(&atoms, "p", &[1, 2]).ok_or("ign p(1,2) missing")?;
    ensure(p.beta() >= 0.99, || format!("ign p(1,2) = {p}"))?;
    Ok(format!("pc [0,1], weak edge [0,0.1], ign approximate with belief upper {}", p.beta()))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ig, mut ind) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let a = reduced_level(&mut rng);
        let b = reduced_level(&mut rng);
        for op in [Connective::Conj, Connective::Disj] {
            let (ci, cd) = match op {
                Connective::Conj => (conjoin(Mode::Ignorance, &a, &b), conjoin(Mode::Independence, &a, &b)),
                Connective::Disj => (disjoin(Mode::Ignorance, &a, &b), disjoin(Mode::Independence, &a, &b)),
            };
            let oi = ignorance_oracle(op, &a, &b).map_err(|e| e.to_string())?;
            let od = independence_oracle(op, &a, &b, 0.01).map_err(|e| e.to_string())?;
            ig = ig.max(oi.max_abs_diff(&ci.unwrap()));
            ind = ind.max(od.max_abs_diff(&cd.unwrap()));
        }
    }
    ensure(ig <= 1e-6 && ind <= 0.02, || format!("max deviation ign {ig:e}, ind {ind:e}"))?;
    Ok(format!("max deviation ign {ig:e} (tol 1e-6), ind {ind:e} (tol 0.02)"))
}

/// A random consistent, not necessarily reduced, level.
fn consistent_level(rng: &mut ChaCha8Rng) -> ConfidenceLevel {
    let a: f64 = rng.gen();
    let g = rng.gen_range(0.0..=1.0 - a);
    let b = rng.gen_range(a..=1.0);
    let d = rng.gen_range(g..=1.0);
    cl(a, b, g, d)
}

fn raw_level(rng: &mut ChaCha8Rng) -> ConfidenceLevel {
    cl(rng.gen(), rng.gen(), rng.gen(), rng.gen())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let orders = LatticeOrder::ALL;
    let dual = [
        Mode::Ignorance,
        Mode::Independence,
        Mode::PositiveCorrelation,
        Mode::NegativeCorrelation,
    ];
    let mut failures = Vec::new();
    let mut fail = |law: &str| failures.push(law.to_string());
    for _ in 0..SAMPLES {
        let (a, b, c) = (raw_level(&mut rng), raw_level(&mut rng), raw_level(&mut rng));
        let (x, y) = (raw_level(&mut rng), raw_level(&mut rng));
        for o in orders {
            if meet(o, &a, &a) != a || join(o, &a, &a) != a {
                fail("idempotence");
            }
            if meet(o, &a, &b) != meet(o, &b, &a) || join(o, &a, &b) != join(o, &b, &a) {
                fail("lattice commutativity");
            }
            if meet(o, &meet(o, &a, &b), &c) != meet(o, &a, &meet(o, &b, &c))
                || join(o, &join(o, &a, &b), &c) != join(o, &a, &join(o, &b, &c))
            {
                fail("lattice associativity");
            }
            if join(o, &a, &meet(o, &a, &b)) != a || meet(o, &a, &join(o, &a, &b)) != a {
                fail("absorption");
            }
            for o2 in orders {
                let (a2, b2) = (join(o2, &a, &x), join(o2, &b, &y));
                if !leq(o2, &meet(o, &a, &b), &meet(o, &a2, &b2)) || !leq(o2, &join(o, &a, &b), &join(o, &a2, &b2)) {
                    fail("interlacing");
                }
            }
        }

        let (p, q) = (consistent_level(&mut rng), consistent_level(&mut rng));
        let (r, s) = (reduced_level(&mut rng), reduced_level(&mut rng));
        let (rx, ry) = (reduced_level(&mut rng), reduced_level(&mut rng));
        let (r2, s2) = (join(T, &r, &rx), join(T, &s, &ry));
        for m in Mode::ALL {
            for res in [conjoin(m, &p, &q), disjoin(m, &p, &q)].into_iter().flatten() {
                if !res.is_consistent() {
                    fail("consistency preservation");
                }
            }
            for res in [conjoin(m, &r, &s), disjoin(m, &r, &s)].into_iter().flatten() {
                if !res.is_reduced() {
                    fail("reduced preservation");
                }
            }
            if let (Ok(lo), Ok(hi)) = (conjoin(m, &r, &s), conjoin(m, &r2, &s2)) {
                if !lo.leq(T, &hi) {
                    fail("conjunction monotonicity");
                }
            }
            if let (Ok(lo), Ok(hi)) = (disjoin(m, &r, &s), disjoin(m, &r2, &s2)) {
                if !lo.leq(T, &hi) {
                    fail("disjunction monotonicity");
                }
            }
            if let Ok(k) = conjoin(m, &p, &q) {
                if !(k.leq(T, &p) && k.leq(T, &q)) {
                    fail("conjunction bounding");
                }
                if conjoin(m, &q, &p).ok() != Some(k) {
                    fail("conjunction commutativity");
                }
            }
            if let Ok(d) = disjoin(m, &p, &q) {
                if !(p.leq(T, &d) && q.leq(T, &d)) {
                    fail("disjunction bounding");
                }
                if disjoin(m, &q, &p).ok() != Some(d) {
                    fail("disjunction commutativity");
                }
            }
            let (t, f) = (ConfidenceLevel::TRUE, ConfidenceLevel::FALSE);
            let id = conjoin(m, &t, &p).ok() == Some(p)
                && disjoin(m, &f, &p).ok() == Some(p)
                && conjoin(m, &f, &p).ok() == Some(f)
                && disjoin(m, &t, &p).ok() == Some(t);
            if !id {
                fail("identity and annihilator");
            }
            if let Ok(k) = conjoin(m, &r, &s) {
                if disjoin(Mode::PositiveCorrelation, &r, &k).ok() != Some(r) {
                    fail("pc absorption");
                }
            }
            if let Ok(d) = disjoin(m, &r, &s) {
                if conjoin(Mode::PositiveCorrelation, &r, &d).ok() != Some(r) {
                    fail("pc absorption");
                }
            }
        }
        for m in dual {
            let l1 = negate(&conjoin(m, &p, &q).unwrap());
            let r1 = disjoin(m, &negate(&p), &negate(&q)).unwrap();
            let l2 = negate(&disjoin(m, &p, &q).unwrap());
            let r2 = conjoin(m, &negate(&p), &negate(&q)).unwrap();
            if !l1.bits_eq(&r1) || !l2.bits_eq(&r2) {
                fail("De Morgan duality");
            }
        }
        if !negate(&negate(&p)).bits_eq(&p) {
            fail("negation involution");
        }
    }
    failures.sort();
    failures.dedup();
    ensure(failures.is_empty(), || format!("counterexamples for {}", failures.join(", ")))?;
    Ok(format!("{SAMPLES} samples per law, zero counterexamples"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut dbs = Vec::new();
    while dbs.len() < 50 {
        if let Ok(db) = Database::load(&acyclic_program(&mut rng, &ProgramShape::default())) {
            dbs.push(db);
        }
    }
    let acyclic = dbs.len();
    for n in [3, 5, 8] {
        dbs.push(Database::load(&cycle_closure(n, cl(0.8, 0.9, 0.0, 0.1))).unwrap());
        dbs.push(Database::load(&random_graph_closure(&mut rng, n, 2 * n as usize)).unwrap());
    }
    let mut atoms = 0;
    for (i, db) in dbs.iter().enumerate() {
        let r = db.evaluate(&FixpointOptions::default()).map_err(|e| e.to_string())?;
        let k = r.closure_stage().ok_or_else(|| format!("program {i} not exact"))?;
        for (atom, value) in r.valuation.sorted() {
            atoms += 1;
            let full = dpt_confidence(&*build_ddt(db, atom, k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(full.bits_eq(&value), || format!("program {i}, {atom}: tree {full:?} vs {value:?}"))?;
            for j in 0..k {
                let t = dpt_confidence(&*build_ddt(db, atom, j).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                ensure(t.leq(T, &value), || format!("program {i}, {atom}: depth {j} exceeds fixpoint"))?;
            }
        }
    }
    Ok(format!("{acyclic} acyclic and {} cyclic programs, {atoms} atoms bit-exact", dbs.len() - acyclic))
}

fn criterion_7() -> Check {
    let conf = cl(0.9, 0.95, 0.0, 0.05);
    let sizes = [10i64, 50, 100];
    let mut best = [f64::INFINITY; 3];
    for _ in 0..3 {
        for (i, &n) in sizes.iter().enumerate() {
            let db = Database::load(&chain_closure(n, conf)).unwrap();
            let start = Instant::now();
            let r = db.evaluate(&FixpointOptions::default()).map_err(|e| e.to_string())?;
            best[i] = best[i].min(start.elapsed().as_secs_f64());
            ensure(r.status == Status::Exact, || format!("chain {n} not exact"))?;
            ensure(r.iterations as i64 <= n + 2, || format!("chain {n} took {} iterations", r.iterations))?;
        }
    }
    // least-squares slope of log time against log n
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = best.iter().map(|t| t.max(1e-9).ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    ensure(slope <= 3.0, || format!("time exponent {slope:.2} exceeds 3"))?;
    let db = Database::load(&cycle_closure(100, conf)).unwrap();
    let r = db.evaluate(&FixpointOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.status == Status::Exact, || "100-node cycle not exact".into())?;
    Ok(format!(
        "chains within n+2 iterations, time exponent {slope:.2}, cycle exact after {} iterations",
        r.iterations
    ))
}

fn criterion_8() -> Check {
    let mut names: Vec<String> = std::fs::read_dir(example(""))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".pddb"))
        .collect();
    names.sort();
    ensure(!names.is_empty(), || "no shipped examples".into())?;
    for name in &names {
        let path = example(name);
        let first = pddb(&["eval", path.to_str().unwrap(), "--json"]);
        let second = pddb(&["eval", path.to_str().unwrap(), "--json"]);
        ensure(first.0 == 0 && first == second, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} examples byte-identical", names.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("two-derivation program", criterion_1),
        ("transitive closure", criterion_2),
        ("self-loop closure variants", criterion_3),
        ("mode formulas match oracles", criterion_4),
        ("algebraic property suites", criterion_5),
        ("proof tree soundness and completeness", criterion_6),
        ("termination and complexity", criterion_7),
        ("determinism of eval --json", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
