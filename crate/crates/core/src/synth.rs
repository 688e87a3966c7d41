//! Random and structured program generators for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::Mode;
use crate::lang::{Atom, Constant, GroundAtom, PProgram, PRule, Term};
use crate::trilattice::ConfidenceLevel;

/// A random reduced confidence level. Endpoints are rounded to two decimals
/// with probability one half and include the lattice constants now and then.
pub fn reduced_level<R: Rng + ?Sized>(rng: &mut R) -> ConfidenceLevel {
    match rng.gen_range(0..20) {
        0 => return ConfidenceLevel::TRUE,
        1 => return ConfidenceLevel::FALSE,
        2 => return ConfidenceLevel::new(0.0, 1.0, 0.0, 1.0).expect("in range"),
        _ => {}
    }
    let round = rng.gen_bool(0.5);
    let mut pick = |lo: f64, hi: f64| {
        let x = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        let x = if round { (x * 100.0).round() / 100.0 } else { x };
        x.clamp(lo, hi.max(lo))
    };
    let alpha = pick(0.0, 1.0);
    let gamma = pick(0.0, 1.0 - alpha);
    let beta = pick(alpha, 1.0 - gamma);
    let delta = pick(gamma, 1.0 - alpha);
    ConfidenceLevel::new(alpha, beta, gamma, delta).expect("in range")
}

/// Shape of generated acyclic programs.
#[derive(Debug, Clone, Copy)]
pub struct ProgramShape {
    pub predicates: usize,
    pub max_facts: usize,
    pub max_rules: usize,
    pub constants: i64,
    pub modes: &'static [Mode],
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            predicates: 6,
            max_facts: 20,
            max_rules: 8,
            constants: 3,
            modes: &[
                Mode::Ignorance,
                Mode::Independence,
                Mode::PositiveCorrelation,
                Mode::NegativeCorrelation,
            ],
        }
    }
}

fn var(i: usize) -> Term {
    Term::var(["X", "Y", "Z", "W"][i % 4])
}

/// A random range-restricted program whose dependency graph is acyclic:
/// predicate `q<i>` only refers to predicates with a smaller index. The two
/// lowest predicates hold the facts.
pub fn acyclic_program<R: Rng + ?Sized>(rng: &mut R, shape: &ProgramShape) -> PProgram {
    let n = shape.predicates.max(3);
    let arity: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
    let name = |i: usize| format!("q{i}");
    let disj: Vec<Mode> = (0..n).map(|_| *shape.modes.choose(rng).expect("modes")).collect();
    let mut rules = Vec::new();

    let facts = rng.gen_range(1..=shape.max_facts);
    for _ in 0..facts {
        let p = rng.gen_range(0..2);
        let args = (0..arity[p])
            .map(|_| Constant::Int(rng.gen_range(1..=shape.constants)))
            .collect();
        rules.push(PRule::fact(GroundAtom::new(&name(p), args), reduced_level(rng), disj[p]));
    }

    let n_rules = rng.gen_range(1..=shape.max_rules);
    for _ in 0..n_rules {
        let h = rng.gen_range(2..n);
        let body_len = rng.gen_range(1..=2);
        let mut body = Vec::new();
        for _ in 0..body_len {
            let b = rng.gen_range(0..h);
            let args = (0..arity[b])
                .map(|_| {
                    if rng.gen_bool(0.85) {
                        var(rng.gen_range(0..3))
                    } else {
                        Term::from(rng.gen_range(1..=shape.constants))
                    }
                })
                .collect();
            body.push(Atom::new(&name(b), args));
        }
        let body_vars: Vec<Term> = {
            let mut v: Vec<Term> = body
                .iter()
                .flat_map(|a| a.args.iter().filter(|t| matches!(t, Term::Var(_))).cloned())
                .collect();
            v.sort();
            v.dedup();
            v
        };
        let head_args = (0..arity[h])
            .map(|_| {
                if !body_vars.is_empty() && rng.gen_bool(0.8) {
                    body_vars.choose(rng).expect("nonempty").clone()
                } else {
                    Term::from(rng.gen_range(1..=shape.constants))
                }
            })
            .collect();
        rules.push(PRule {
            head: Atom::new(&name(h), head_args),
            body,
            conf: reduced_level(rng),
            conj: *shape.modes.choose(rng).expect("modes"),
            disj: disj[h],
            span: None,
        });
    }
    PProgram::new(rules)
}

/// The two transitive-closure rules over `e/2` used throughout: a recursive
/// rule first, then the base rule.
pub fn closure_rules(disj: Mode) -> Vec<PRule> {
    let (x, y, z) = (Term::var("X"), Term::var("Y"), Term::var("Z"));
    let head = Atom::new("p", vec![x.clone(), y.clone()]);
    vec![
        PRule {
            head: head.clone(),
            body: vec![
                Atom::new("e", vec![x.clone(), z.clone()]),
                Atom::new("p", vec![z, y.clone()]),
            ],
            conf: ConfidenceLevel::TRUE,
            conj: Mode::Independence,
            disj,
            span: None,
        },
        PRule {
            head,
            body: vec![Atom::new("e", vec![x, y])],
            conf: ConfidenceLevel::TRUE,
            conj: Mode::Independence,
            disj,
            span: None,
        },
    ]
}

fn edge(from: i64, to: i64, conf: ConfidenceLevel) -> PRule {
    PRule::fact(GroundAtom::ints("e", &[from, to]), conf, PRule::DEFAULT_DISJ)
}

/// pc transitive closure over the chain `1 -> 2 -> ... -> n`.
pub fn chain_closure(n: i64, conf: ConfidenceLevel) -> PProgram {
    let mut rules = closure_rules(Mode::PositiveCorrelation);
    rules.extend((1..n).map(|i| edge(i, i + 1, conf)));
    PProgram::new(rules)
}

/// The chain plus the back edge `n -> 1`.
pub fn cycle_closure(n: i64, conf: ConfidenceLevel) -> PProgram {
    let mut p = chain_closure(n, conf);
    p.rules.push(edge(n, 1, conf));
    p
}

/// pc transitive closure over a random graph on `nodes` vertices.
pub fn random_graph_closure<R: Rng + ?Sized>(rng: &mut R, nodes: i64, edges: usize) -> PProgram {
    let mut rules = closure_rules(Mode::PositiveCorrelation);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..edges {
        let a = rng.gen_range(1..=nodes);
        let b = rng.gen_range(1..=nodes);
        if seen.insert((a, b)) {
            rules.push(edge(a, b, reduced_level(rng)));
        }
    }
    PProgram::new(rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{recursive_predicates, validate};
    use rand::SeedableRng;

    #[test]
    fn generated_levels_are_reduced() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            assert!(reduced_level(&mut rng).is_reduced());
        }
    }

    #[test]
    fn generated_programs_are_valid_and_acyclic() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let p = acyclic_program(&mut rng, &ProgramShape::default());
            assert!(validate(&p).iter().all(|d| !d.is_error()), "{:?}", validate(&p));
            assert!(recursive_predicates(&p).is_empty());
            assert!(p.predicates().len() <= 6);
            assert!(p.rules.iter().filter(|r| r.is_fact()).count() <= 20);
        }
    }

    #[test]
    fn closures_are_recursive() {
        let p = cycle_closure(5, ConfidenceLevel::TRUE);
        assert_eq!(recursive_predicates(&p).len(), 1);
        assert!(validate(&p).iter().all(|d| !d.is_error()));
    }
}
