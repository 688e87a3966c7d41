//! Valuations, the immediate-consequence operator and naive bottom-up
//! fixpoint evaluation.
//!
//! Ground rule instances are found by joining body atoms against the support
//! of the current valuation. An instance with a body atom outside the support
//! has confidence `FALSE` and contributes nothing to a disjunction, so the
//! full Herbrand instantiation is never materialized.
//!
//! The instances for one head atom are combined in a fixed order: rule index
//! first, then the values of the rule's variables taken in name order. Two
//! substitutions of the same rule whose body atoms coincide as a multiset
//! denote the same ground instance and are counted once.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::calculus::{conjoin_all, disjoin_all, CombinationError, Mode};
use crate::lang::{
    recursive_predicates, validate, Atom, Constant, DiagCode, Diagnostic, GroundAtom, GroundRule,
    PProgram, PRule, Severity, Substitution, Symbol, Term,
};
use crate::trilattice::{ConfidenceLevel, LatticeOrder};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("program is invalid: {}", summarize(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("strict mode refuses the program: {0}")]
    StrictRefusal(Diagnostic),
    #[error("cannot combine confidences for {atom}: {source}")]
    Combination {
        atom: String,
        #[source]
        source: CombinationError,
    },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{} {}", d.code, d.message))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Finite map from ground atoms to confidence levels. Absent atoms are
/// `FALSE`, and `FALSE` is never stored.
#[derive(Debug, Clone, Default)]
pub struct Valuation {
    map: HashMap<GroundAtom, ConfidenceLevel>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, atom: &GroundAtom) -> ConfidenceLevel {
        self.map.get(atom).copied().unwrap_or(ConfidenceLevel::FALSE)
    }

    pub fn set(&mut self, atom: GroundAtom, c: ConfidenceLevel) {
        if c.is_false() {
            self.map.remove(&atom);
        } else {
            self.map.insert(atom, c);
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.map.contains_key(atom)
    }

    /// Entries sorted by atom.
    pub fn sorted(&self) -> Vec<(&GroundAtom, ConfidenceLevel)> {
        let mut v: Vec<_> = self.map.iter().map(|(a, c)| (a, *c)).collect();
        v.sort_by(|x, y| x.0.cmp(y.0));
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroundAtom, &ConfidenceLevel)> {
        self.map.iter()
    }

    /// Same support and bit-identical confidences.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.map.len() == other.map.len()
            && self
                .map
                .iter()
                .all(|(a, c)| other.map.get(a).is_some_and(|d| d.bits_eq(c)))
    }

    /// Largest componentwise change between the two valuations.
    pub fn residual(&self, other: &Self) -> f64 {
        let one = self
            .map
            .iter()
            .map(|(a, c)| c.max_abs_diff(&other.get(a)));
        let two = other
            .map
            .iter()
            .filter(|(a, _)| !self.map.contains_key(*a))
            .map(|(_, c)| c.max_abs_diff(&ConfidenceLevel::FALSE));
        one.chain(two).fold(0.0, f64::max)
    }

    /// Pointwise `self <=_t other`.
    pub fn leq_truth(&self, other: &Self) -> bool {
        self.map
            .iter()
            .all(|(a, c)| c.leq(LatticeOrder::Truth, &other.get(a)))
    }
}

impl FromIterator<(GroundAtom, ConfidenceLevel)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (GroundAtom, ConfidenceLevel)>>(iter: T) -> Self {
        let mut v = Valuation::new();
        for (a, c) in iter {
            v.set(a, c);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixpointOptions {
    pub max_iters: usize,
    /// Zero demands bit-exact convergence.
    pub eps: f64,
    /// Refuse programs whose recursive predicates are not combined with pc.
    pub strict: bool,
}

impl Default for FixpointOptions {
    fn default() -> Self {
        FixpointOptions {
            max_iters: 10_000,
            eps: 0.0,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Exact,
    Approximate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::Approximate => "approximate",
        })
    }
}

#[derive(Debug, Clone)]
pub struct FixpointResult {
    pub valuation: Valuation,
    /// Number of operator applications performed. When exact, the last one
    /// reproduced its input.
    pub iterations: usize,
    pub status: Status,
    /// Largest componentwise change in the last application.
    pub residual: f64,
}

impl FixpointResult {
    /// The least `k` with `T^k = lfp`, when the fixpoint was reached.
    pub fn closure_stage(&self) -> Option<usize> {
        (self.status == Status::Exact).then(|| self.iterations - 1)
    }
}

/// A ground rule instance found by matching, with the values of the rule's
/// variables in name order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub rule: usize,
    pub values: Vec<Constant>,
    pub head: GroundAtom,
    pub body: Vec<GroundAtom>,
    /// Rule confidence under the valuation that was matched against.
    pub conf: ConfidenceLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub atom: GroundAtom,
    pub bindings: Substitution,
    pub conf: ConfidenceLevel,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryResult {
    pub answers: Vec<Answer>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
enum Slot {
    Var(usize),
    Const(Constant),
}

#[derive(Debug, Clone)]
struct CompiledAtom {
    pred: Symbol,
    slots: Vec<Slot>,
}

#[derive(Debug, Clone)]
struct CompiledRule {
    vars: Vec<Symbol>,
    head: CompiledAtom,
    body: Vec<CompiledAtom>,
    conf: ConfidenceLevel,
    conj: Mode,
    /// Two body atoms share a predicate, so distinct substitutions may
    /// yield the same ground instance.
    needs_dedupe: bool,
}

impl CompiledRule {
    fn compile(rule: &PRule, conf: ConfidenceLevel) -> Self {
        let vars: Vec<Symbol> = rule.variables().into_iter().collect();
        let compile_atom = |a: &Atom| CompiledAtom {
            pred: a.pred.clone(),
            slots: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Slot::Const(c.clone()),
                    Term::Var(v) => Slot::Var(vars.binary_search(v).expect("variable collected")),
                })
                .collect(),
        };
        let head = compile_atom(&rule.head);
        let body: Vec<CompiledAtom> = rule.body.iter().map(compile_atom).collect();
        let preds: BTreeSet<&Symbol> = body.iter().map(|a| &a.pred).collect();
        CompiledRule {
            needs_dedupe: preds.len() < body.len(),
            vars,
            head,
            body,
            conf,
            conj: rule.conj,
        }
    }
}

/// Hash index over the support of a valuation. Entries are only added or
/// updated, which suits ascending iteration.
#[derive(Debug, Default)]
pub(crate) struct MatchIndex {
    atoms: Vec<(GroundAtom, ConfidenceLevel)>,
    ids: HashMap<GroundAtom, usize>,
    by_pred: HashMap<Symbol, Vec<usize>>,
    by_arg: HashMap<(Symbol, usize, Constant), Vec<usize>>,
}

impl MatchIndex {
    pub(crate) fn new(valuation: &Valuation) -> Self {
        let mut index = Self::default();
        for (a, c) in valuation.iter() {
            index.set(a.clone(), *c);
        }
        index
    }

    fn set(&mut self, atom: GroundAtom, conf: ConfidenceLevel) {
        if let Some(&id) = self.ids.get(&atom) {
            self.atoms[id].1 = conf;
            return;
        }
        let id = self.atoms.len();
        self.by_pred.entry(atom.pred.clone()).or_default().push(id);
        for (pos, c) in atom.args.iter().enumerate() {
            self.by_arg
                .entry((atom.pred.clone(), pos, c.clone()))
                .or_default()
                .push(id);
        }
        self.ids.insert(atom.clone(), id);
        self.atoms.push((atom, conf));
    }
}

type Emit<'e, 'a> = dyn FnMut(&[Option<Constant>], &[&'a GroundAtom], &[ConfidenceLevel]) + 'e;

struct Matcher<'a> {
    rule: &'a CompiledRule,
    index: &'a MatchIndex,
    bindings: Vec<Option<Constant>>,
    body: Vec<&'a GroundAtom>,
    confs: Vec<ConfidenceLevel>,
}

impl<'a> Matcher<'a> {
    fn run(&mut self, j: usize, emit: &mut Emit<'_, 'a>) {
        if j == self.rule.body.len() {
            emit(&self.bindings, &self.body, &self.confs);
            return;
        }
        let index = self.index;
        let atom = &self.rule.body[j];
        let Some(all) = index.by_pred.get(&atom.pred) else {
            return;
        };
        let bound = atom.slots.iter().enumerate().find_map(|(pos, s)| match s {
            Slot::Const(c) => Some((pos, c.clone())),
            Slot::Var(v) => self.bindings[*v].clone().map(|c| (pos, c)),
        });
        let ids: &[usize] = match bound {
            Some((pos, c)) => match index.by_arg.get(&(atom.pred.clone(), pos, c)) {
                Some(v) => v,
                None => return,
            },
            None => all,
        };
        for &id in ids {
            let (ground, conf) = &index.atoms[id];
            let mut newly = Vec::new();
            if bind(&atom.slots, ground, &mut self.bindings, &mut newly) {
                self.body.push(ground);
                self.confs.push(*conf);
                self.run(j + 1, emit);
                self.body.pop();
                self.confs.pop();
            }
            for v in newly {
                self.bindings[v] = None;
            }
        }
    }
}

/// Unifies compiled slots with a ground atom of the same predicate,
/// recording fresh bindings in `newly`. On failure the caller must still
/// undo `newly`.
fn bind(slots: &[Slot], ground: &GroundAtom, bindings: &mut [Option<Constant>], newly: &mut Vec<usize>) -> bool {
    if ground.args.len() != slots.len() {
        return false;
    }
    for (slot, c) in slots.iter().zip(&ground.args) {
        match slot {
            Slot::Const(k) => {
                if k != c {
                    return false;
                }
            }
            Slot::Var(v) => match &bindings[*v] {
                Some(b) => {
                    if b != c {
                        return false;
                    }
                }
                None => {
                    bindings[*v] = Some(c.clone());
                    newly.push(*v);
                }
            },
        }
    }
    true
}

fn ground_slots(slots: &[Slot], bindings: &[Option<Constant>]) -> Vec<Constant> {
    slots
        .iter()
        .map(|s| match s {
            Slot::Const(c) => c.clone(),
            Slot::Var(v) => bindings[*v].clone().expect("range restricted"),
        })
        .collect()
}

/// A validated program ready for evaluation.
#[derive(Debug, Clone)]
pub struct Database {
    program: PProgram,
    compiled: Vec<CompiledRule>,
    diagnostics: Vec<Diagnostic>,
    disj: HashMap<Symbol, Mode>,
    recursive: BTreeSet<Symbol>,
    predicates: BTreeSet<Symbol>,
}

impl Database {
    /// Validates the program and reduces fact confidences.
    pub fn load(program: &PProgram) -> Result<Self, EngineError> {
        let diagnostics = validate(program);
        let errors: Vec<Diagnostic> = diagnostics.iter().filter(|d| d.is_error()).cloned().collect();
        if !errors.is_empty() {
            return Err(EngineError::Invalid(errors));
        }
        let compiled = program
            .rules
            .iter()
            .map(|r| {
                let conf = if r.is_fact() {
                    r.conf.reduce().expect("validated confidences are consistent")
                } else {
                    r.conf
                };
                CompiledRule::compile(r, conf)
            })
            .collect();
        let mut disj = HashMap::new();
        for r in &program.rules {
            disj.entry(r.head.pred.clone()).or_insert(r.disj);
        }
        Ok(Database {
            program: program.clone(),
            compiled,
            diagnostics,
            disj,
            recursive: recursive_predicates(program),
            predicates: program.predicates(),
        })
    }

    pub fn program(&self) -> &PProgram {
        &self.program
    }

    /// Warnings produced by validation.
    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn recursive_predicates(&self) -> &BTreeSet<Symbol> {
        &self.recursive
    }

    pub fn disj_mode(&self, pred: &str) -> Mode {
        self.disj.get(pred).copied().unwrap_or(PRule::DEFAULT_DISJ)
    }

    /// Confidence attached to rule `i`; facts carry their reduced form.
    pub fn rule_confidence(&self, i: usize) -> ConfidenceLevel {
        self.compiled[i].conf
    }

    /// Variables of rule `i` in the order used by [`Instance::values`].
    pub fn rule_variables(&self, i: usize) -> &[Symbol] {
        &self.compiled[i].vars
    }

    /// The ground rule of instance `inst`, with the database's confidence.
    pub fn ground_rule(&self, inst: &Instance) -> GroundRule {
        GroundRule {
            head: inst.head.clone(),
            body: inst.body.clone(),
            conf: self.compiled[inst.rule].conf,
            conj: self.compiled[inst.rule].conj,
        }
    }

    pub fn substitution(&self, inst: &Instance) -> Substitution {
        self.compiled[inst.rule]
            .vars
            .iter()
            .cloned()
            .zip(inst.values.iter().cloned())
            .collect()
    }

    fn combination_error(atom: &GroundAtom, source: CombinationError) -> EngineError {
        EngineError::Combination {
            atom: atom.to_string(),
            source,
        }
    }

    /// Runs the matcher for rule `i` from the given partial bindings.
    fn for_each_match<'a>(
        &'a self,
        i: usize,
        index: &'a MatchIndex,
        bindings: Vec<Option<Constant>>,
        emit: &mut Emit<'_, 'a>,
    ) {
        let rule = &self.compiled[i];
        let mut matcher = Matcher {
            rule,
            index,
            bindings,
            body: Vec::with_capacity(rule.body.len()),
            confs: Vec::with_capacity(rule.body.len()),
        };
        matcher.run(0, emit);
    }

    /// Enumerates the instances of rule `i` whose body lies in the index's
    /// support, optionally restricted to one head atom.
    fn match_rule(
        &self,
        i: usize,
        index: &MatchIndex,
        head: Option<&GroundAtom>,
        out: &mut Vec<Instance>,
    ) -> Result<(), EngineError> {
        let rule = &self.compiled[i];
        let mut bindings: Vec<Option<Constant>> = vec![None; rule.vars.len()];
        if let Some(goal) = head {
            if goal.pred != rule.head.pred || !bind(&rule.head.slots, goal, &mut bindings, &mut Vec::new()) {
                return Ok(());
            }
        }
        let mut err = None;
        let mut emit = |b: &[Option<Constant>], body: &[&GroundAtom], confs: &[ConfidenceLevel]| {
            if err.is_some() {
                return;
            }
            let head_atom = GroundAtom {
                pred: rule.head.pred.clone(),
                args: ground_slots(&rule.head.slots, b),
            };
            let conf = conjoin_all(rule.conj, std::iter::once(&rule.conf).chain(confs));
            match conf {
                Ok(conf) => out.push(Instance {
                    rule: i,
                    values: b.iter().map(|c| c.clone().expect("range restricted")).collect(),
                    head: head_atom,
                    body: body.iter().map(|a| (*a).clone()).collect(),
                    conf,
                }),
                Err(e) => err = Some(Self::combination_error(&head_atom, e)),
            }
        };
        self.for_each_match(i, index, bindings, &mut emit);
        err.map_or(Ok(()), Err)
    }

    /// Heads of the instances that use one of the `changed` atoms.
    fn affected_heads(&self, index: &MatchIndex, changed: &[GroundAtom]) -> BTreeSet<GroundAtom> {
        let mut heads = BTreeSet::new();
        for (i, rule) in self.compiled.iter().enumerate() {
            for atom in &rule.body {
                for delta in changed.iter().filter(|d| d.pred == atom.pred) {
                    let mut bindings = vec![None; rule.vars.len()];
                    if !bind(&atom.slots, delta, &mut bindings, &mut Vec::new()) {
                        continue;
                    }
                    let mut emit = |b: &[Option<Constant>], _: &[&GroundAtom], _: &[ConfidenceLevel]| {
                        heads.insert(GroundAtom {
                            pred: rule.head.pred.clone(),
                            args: ground_slots(&rule.head.slots, b),
                        });
                    };
                    self.for_each_match(i, index, bindings, &mut emit);
                }
            }
        }
        heads
    }

    /// Sorts instances canonically and drops repeated ground instances.
    fn canonicalize(&self, mut items: Vec<Instance>) -> Vec<Instance> {
        items.sort_by(|x, y| {
            x.head
                .cmp(&y.head)
                .then(x.rule.cmp(&y.rule))
                .then_with(|| x.values.cmp(&y.values))
        });
        let mut out: Vec<Instance> = Vec::with_capacity(items.len());
        let mut seen: BTreeSet<(usize, Vec<GroundAtom>)> = BTreeSet::new();
        let mut group: Option<GroundAtom> = None;
        for inst in items {
            if group.as_ref() != Some(&inst.head) {
                seen.clear();
                group = Some(inst.head.clone());
            }
            if self.compiled[inst.rule].needs_dedupe {
                let mut key = inst.body.clone();
                key.sort();
                if !seen.insert((inst.rule, key)) {
                    continue;
                }
            }
            out.push(inst);
        }
        out
    }

    /// All distinct ground instances whose body lies in the support of `v`,
    /// sorted by head, rule index and substitution.
    pub fn instances(&self, v: &Valuation) -> Result<Vec<Instance>, EngineError> {
        let index = MatchIndex::new(v);
        let mut items = Vec::new();
        for i in 0..self.compiled.len() {
            self.match_rule(i, &index, None, &mut items)?;
        }
        Ok(self.canonicalize(items))
    }

    pub(crate) fn instances_for_indexed(
        &self,
        index: &MatchIndex,
        atom: &GroundAtom,
    ) -> Result<Vec<Instance>, EngineError> {
        let mut items = Vec::new();
        for i in 0..self.compiled.len() {
            self.match_rule(i, index, Some(atom), &mut items)?;
        }
        Ok(self.canonicalize(items))
    }

    /// The instances with head `atom` whose body lies in the support of `v`.
    pub fn instances_for(&self, v: &Valuation, atom: &GroundAtom) -> Result<Vec<Instance>, EngineError> {
        self.instances_for_indexed(&MatchIndex::new(v), atom)
    }

    /// Confidence propagated to the head by one ground rule instance.
    pub fn rule_conf(&self, rule: &GroundRule, v: &Valuation) -> Result<ConfidenceLevel, EngineError> {
        let body: Vec<ConfidenceLevel> = rule.body.iter().map(|b| v.get(b)).collect();
        conjoin_all(rule.conj, std::iter::once(&rule.conf).chain(&body))
            .map_err(|e| Self::combination_error(&rule.head, e))
    }

    /// Disjunction of all rule confidences for `atom` under `v`.
    pub fn atom_conf(&self, v: &Valuation, atom: &GroundAtom) -> Result<ConfidenceLevel, EngineError> {
        let insts = self.instances_for(v, atom)?;
        disjoin_all(self.disj_mode(&atom.pred), insts.iter().map(|i| &i.conf))
            .map_err(|e| Self::combination_error(atom, e))
    }

    fn combine(&self, instances: &[Instance]) -> Result<Valuation, EngineError> {
        let mut next = Valuation::new();
        for group in instances.chunk_by(|a, b| a.head == b.head) {
            let head = &group[0].head;
            let c = disjoin_all(self.disj_mode(&head.pred), group.iter().map(|i| &i.conf))
                .map_err(|e| Self::combination_error(head, e))?;
            next.set(head.clone(), c);
        }
        Ok(next)
    }

    /// One application of the immediate-consequence operator.
    pub fn tp_step(&self, v: &Valuation) -> Result<Valuation, EngineError> {
        self.combine(&self.instances(v)?)
    }

    /// `T^k` starting from the empty valuation.
    pub fn iterate(&self, k: usize) -> Result<Valuation, EngineError> {
        let mut v = Valuation::new();
        for _ in 0..k {
            let next = self.tp_step(&v)?;
            if next.bits_eq(&v) {
                break;
            }
            v = next;
        }
        Ok(v)
    }

    /// Checks the strict-mode precondition.
    pub fn check_strict(&self) -> Result<(), EngineError> {
        match self
            .diagnostics
            .iter()
            .find(|d| d.code == DiagCode::NonterminatingMode)
        {
            Some(d) => Err(EngineError::StrictRefusal(d.clone())),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, options: &FixpointOptions) -> Result<FixpointResult, EngineError> {
        if options.max_iters == 0 {
            return Err(EngineError::InvalidOptions("max_iters must be at least 1".into()));
        }
        if options.eps.is_nan() || options.eps < 0.0 {
            return Err(EngineError::InvalidOptions("eps must be nonnegative".into()));
        }
        if options.strict {
            self.check_strict()?;
        }
        // Only heads with an instance touching an atom changed by the
        // previous round can change. Those are recomputed from scratch, so
        // every round equals one application of `tp_step`.
        let mut v = Valuation::new();
        let mut index = MatchIndex::default();
        let mut changed: Option<Vec<GroundAtom>> = None;
        let mut residual = 0.0;
        for i in 1..=options.max_iters {
            let updates: Vec<(GroundAtom, ConfidenceLevel)> = match &changed {
                None => self
                    .combine(&self.instances(&v)?)?
                    .sorted()
                    .into_iter()
                    .map(|(a, c)| (a.clone(), c))
                    .collect(),
                Some(delta) => {
                    let mut out = Vec::new();
                    for head in self.affected_heads(&index, delta) {
                        let insts = self.instances_for_indexed(&index, &head)?;
                        let c = disjoin_all(self.disj_mode(&head.pred), insts.iter().map(|i| &i.conf))
                            .map_err(|e| Self::combination_error(&head, e))?;
                        out.push((head, c));
                    }
                    out
                }
            };
            let moved: Vec<(GroundAtom, ConfidenceLevel)> = updates
                .into_iter()
                .filter(|(a, c)| !c.bits_eq(&v.get(a)))
                .collect();
            if moved.is_empty() {
                return Ok(FixpointResult {
                    valuation: v,
                    iterations: i,
                    status: Status::Exact,
                    residual: 0.0,
                });
            }
            residual = moved
                .iter()
                .map(|(a, c)| c.max_abs_diff(&v.get(a)))
                .fold(0.0, f64::max);
            for (a, c) in &moved {
                v.set(a.clone(), *c);
                index.set(a.clone(), *c);
            }
            changed = Some(moved.into_iter().map(|(a, _)| a).collect());
            if options.eps > 0.0 && residual <= options.eps {
                return Ok(FixpointResult {
                    valuation: v,
                    iterations: i,
                    status: Status::Approximate,
                    residual,
                });
            }
        }
        Ok(FixpointResult {
            valuation: v,
            iterations: options.max_iters,
            status: Status::Approximate,
            residual,
        })
    }

    /// Every rule instance and every atom is bounded by `v` in the truth order.
    pub fn satisfies(&self, v: &Valuation) -> Result<bool, EngineError> {
        let instances = self.instances(v)?;
        let truth = LatticeOrder::Truth;
        if !instances
            .iter()
            .all(|i| i.conf.leq(truth, &v.get(&i.head)))
        {
            return Ok(false);
        }
        let next = self.combine(&instances)?;
        Ok(next.leq_truth(v))
    }

    /// Ground atoms of the result unifying with `pattern`, sorted.
    pub fn query(&self, result: &FixpointResult, pattern: &Atom) -> QueryResult {
        let mut warnings = Vec::new();
        let warn = |message: String| Diagnostic {
            severity: Severity::Warning,
            code: DiagCode::UnknownPredicate,
            message,
            rule: None,
            span: None,
        };
        if !self.predicates.contains(&pattern.pred) {
            warnings.push(warn(format!("predicate {} does not occur in the program", pattern.pred)));
        } else if self.program.arity_of(&pattern.pred) != Some(pattern.arity()) {
            warnings.push(warn(format!(
                "predicate {} has arity {}, not {}",
                pattern.pred,
                self.program.arity_of(&pattern.pred).unwrap_or(0),
                pattern.arity()
            )));
        }
        let mut answers: Vec<Answer> = result
            .valuation
            .iter()
            .filter_map(|(a, c)| {
                let mut theta = Substitution::new();
                pattern.match_ground(a, &mut theta).then(|| Answer {
                    atom: a.clone(),
                    bindings: theta,
                    conf: *c,
                })
            })
            .collect();
        answers.sort_by(|x, y| x.atom.cmp(&y.atom));
        QueryResult { answers, warnings }
    }
}
