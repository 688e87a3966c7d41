//! Abstract syntax of p-programs and static validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::calculus::Mode;
use crate::parser::SourceSpan;
use crate::trilattice::ConfidenceLevel;

pub type Symbol = Arc<str>;

/// Variable bindings, ordered by variable name.
pub type Substitution = BTreeMap<Symbol, Constant>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Int(i64),
    /// Lowercase identifier.
    Sym(Symbol),
    /// Single-quoted string.
    Str(Symbol),
}

impl Constant {
    pub fn sym(s: &str) -> Self {
        Constant::Sym(Arc::from(s))
    }

    /// Classifies free text (for instance a CSV cell) the way the parser
    /// would: integers, identifiers, and anything else as a quoted string.
    pub fn from_text(s: &str) -> Self {
        if let Ok(n) = s.parse::<i64>() {
            return Constant::Int(n);
        }
        let mut chars = s.chars();
        let is_ident = chars.next().is_some_and(|c| c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if is_ident {
            Constant::Sym(Arc::from(s))
        } else {
            Constant::Str(Arc::from(s))
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(n) => write!(f, "{n}"),
            Constant::Sym(s) => f.write_str(s),
            Constant::Str(s) => {
                f.write_str("'")?;
                for c in s.chars() {
                    match c {
                        '\'' => f.write_str("\\'")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("'")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Constant),
    Var(Symbol),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Arc::from(name))
    }
}

impl From<Constant> for Term {
    fn from(c: Constant) -> Self {
        Term::Const(c)
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Self {
        Term::Const(Constant::Int(n))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => f.write_str(v),
        }
    }
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, pred: &str, args: &[T]) -> fmt::Result {
    f.write_str(pred)?;
    if !args.is_empty() {
        f.write_str("(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            a.fmt(f)?;
        }
        f.write_str(")")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom {
            pred: Arc::from(pred),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    pub fn is_ground(&self) -> bool {
        self.variables().next().is_none()
    }

    /// The ground atom, if every argument is a constant.
    pub fn to_ground(&self) -> Option<GroundAtom> {
        self.substitute(&Substitution::new())
    }

    /// Applies `theta`; `None` if a variable is left unbound.
    pub fn substitute(&self, theta: &Substitution) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(v) => theta.get(v).cloned(),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            pred: self.pred.clone(),
            args,
        })
    }

    /// Extends `theta` so that this atom matches `ground`.
    pub fn match_ground(&self, ground: &GroundAtom, theta: &mut Substitution) -> bool {
        if self.pred != ground.pred || self.args.len() != ground.args.len() {
            return false;
        }
        for (t, c) in self.args.iter().zip(&ground.args) {
            match t {
                Term::Const(k) if k != c => return false,
                Term::Const(_) => {}
                Term::Var(v) => match theta.get(v) {
                    Some(bound) if bound != c => return false,
                    Some(_) => {}
                    None => {
                        theta.insert(v.clone(), c.clone());
                    }
                },
            }
        }
        true
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_args(f, &self.pred, &self.args)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: Symbol,
    pub args: Vec<Constant>,
}

impl GroundAtom {
    pub fn new(pred: &str, args: Vec<Constant>) -> Self {
        GroundAtom {
            pred: Arc::from(pred),
            args,
        }
    }

    pub fn ints(pred: &str, args: &[i64]) -> Self {
        Self::new(pred, args.iter().map(|&n| Constant::Int(n)).collect())
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().cloned().map(Term::Const).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_args(f, &self.pred, &self.args)
    }
}

/// A p-rule `head c <- body ; conj=.., disj=..`.
#[derive(Debug, Clone)]
pub struct PRule {
    pub head: Atom,
    pub body: Vec<Atom>,
    pub conf: ConfidenceLevel,
    pub conj: Mode,
    pub disj: Mode,
    pub span: Option<SourceSpan>,
}

impl PartialEq for PRule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head
            && self.body == other.body
            && self.conf.bits_eq(&other.conf)
            && self.conj == other.conj
            && self.disj == other.disj
    }
}

impl PRule {
    pub const DEFAULT_CONJ: Mode = Mode::Ignorance;
    pub const DEFAULT_DISJ: Mode = Mode::PositiveCorrelation;

    pub fn fact(head: GroundAtom, conf: ConfidenceLevel, disj: Mode) -> Self {
        PRule {
            head: head.to_atom(),
            body: Vec::new(),
            conf,
            conj: Self::DEFAULT_CONJ,
            disj,
            span: None,
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// All variables of the rule, sorted by name.
    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.head
            .variables()
            .chain(self.body.iter().flat_map(|a| a.variables()))
            .cloned()
            .collect()
    }

    pub fn ground(&self, theta: &Substitution) -> Option<GroundRule> {
        Some(GroundRule {
            head: self.head.substitute(theta)?,
            body: self
                .body
                .iter()
                .map(|a| a.substitute(theta))
                .collect::<Option<Vec<_>>>()?,
            conf: self.conf,
            conj: self.conj,
        })
    }
}

/// A ground instance of a p-rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundRule {
    pub head: GroundAtom,
    pub body: Vec<GroundAtom>,
    pub conf: ConfidenceLevel,
    pub conj: Mode,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PProgram {
    pub rules: Vec<PRule>,
}

impl PProgram {
    pub fn new(rules: Vec<PRule>) -> Self {
        PProgram { rules }
    }

    /// Every predicate name used in a head or a body.
    pub fn predicates(&self) -> BTreeSet<Symbol> {
        self.rules
            .iter()
            .flat_map(|r| std::iter::once(&r.head).chain(&r.body))
            .map(|a| a.pred.clone())
            .collect()
    }

    /// Predicates with at least one defining rule or fact.
    pub fn defined_predicates(&self) -> BTreeSet<Symbol> {
        self.rules.iter().map(|r| r.head.pred.clone()).collect()
    }

    /// The disjunctive mode of a predicate: that of its first defining rule.
    pub fn disj_mode_of(&self, pred: &str) -> Option<Mode> {
        self.rules
            .iter()
            .find(|r| &*r.head.pred == pred)
            .map(|r| r.disj)
    }

    pub fn arity_of(&self, pred: &str) -> Option<usize> {
        self.rules
            .iter()
            .flat_map(|r| std::iter::once(&r.head).chain(&r.body))
            .find(|a| &*a.pred == pred)
            .map(|a| a.arity())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// The fixed set of diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagCode {
    /// Malformed input text.
    Syntax,
    /// Probability literal outside `[0,1]`.
    ValueRange,
    /// A belief or doubt interval with lower bound above upper bound.
    EmptyInterval,
    /// Rules for one head predicate disagree on the disjunctive mode.
    ModeAgreement,
    /// A head variable missing from the body, or a non-ground fact.
    RangeRestriction,
    /// Rule confidence violates `alpha + gamma <= 1`.
    InconsistentConfidence,
    /// A predicate used with two different arities.
    ArityMismatch,
    /// Rule confidence is consistent but not reduced.
    NonreducedConfidence,
    /// Recursive predicate with a disjunctive mode other than pc.
    NonterminatingMode,
    /// Body or query predicate with no defining rule.
    UnknownPredicate,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "SYNTAX",
            DiagCode::ValueRange => "VALUE_RANGE",
            DiagCode::EmptyInterval => "EMPTY_INTERVAL",
            DiagCode::ModeAgreement => "MODE_AGREEMENT",
            DiagCode::RangeRestriction => "RANGE_RESTRICTION",
            DiagCode::InconsistentConfidence => "INCONSISTENT_CONFIDENCE",
            DiagCode::ArityMismatch => "ARITY_MISMATCH",
            DiagCode::NonreducedConfidence => "NONREDUCED_CONFIDENCE",
            DiagCode::NonterminatingMode => "NONTERMINATING_MODE",
            DiagCode::UnknownPredicate => "UNKNOWN_PREDICATE",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub rule: Option<usize>,
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    fn at(rule_idx: usize, rule: &PRule, severity: Severity, code: DiagCode, message: String) -> Self {
        Diagnostic {
            severity,
            code,
            message,
            rule: Some(rule_idx),
            span: rule.span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    /// `severity CODE line:col message`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (line, col) = self.span.map_or((0, 0), |s| (s.line, s.column));
        write!(f, "{} {} {}:{} {}", self.severity, self.code, line, col, self.message)
    }
}

/// Runs every static check. The list is sorted by rule index, then by
/// severity and code, so identical programs give identical output.
pub fn validate(program: &PProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut arity: HashMap<&str, usize> = HashMap::new();
    let mut disj: HashMap<&str, (Mode, usize)> = HashMap::new();

    for (i, rule) in program.rules.iter().enumerate() {
        if !rule.conf.is_consistent() {
            out.push(Diagnostic::at(
                i,
                rule,
                Severity::Error,
                DiagCode::InconsistentConfidence,
                format!("confidence {} of rule for {} is inconsistent", rule.conf, rule.head),
            ));
        } else if !rule.conf.is_reduced() {
            out.push(Diagnostic::at(
                i,
                rule,
                Severity::Warning,
                DiagCode::NonreducedConfidence,
                format!(
                    "confidence {} is not reduced; equivalent to {}",
                    rule.conf,
                    rule.conf.reduce().map(|c| c.to_string()).unwrap_or_default()
                ),
            ));
        }

        let body_vars: BTreeSet<&Symbol> = rule.body.iter().flat_map(|a| a.variables()).collect();
        let unsafe_vars: BTreeSet<&Symbol> = rule
            .head
            .variables()
            .filter(|v| !body_vars.contains(v))
            .collect();
        if !unsafe_vars.is_empty() {
            let names: Vec<&str> = unsafe_vars.iter().map(|v| &***v).collect();
            let message = if rule.is_fact() {
                format!("fact {} is not ground", rule.head)
            } else {
                format!(
                    "head variable(s) {} of {} do not occur in the body",
                    names.join(", "),
                    rule.head
                )
            };
            out.push(Diagnostic::at(i, rule, Severity::Error, DiagCode::RangeRestriction, message));
        }

        for atom in std::iter::once(&rule.head).chain(&rule.body) {
            match arity.get(&*atom.pred) {
                Some(&n) if n != atom.arity() => out.push(Diagnostic::at(
                    i,
                    rule,
                    Severity::Error,
                    DiagCode::ArityMismatch,
                    format!("predicate {} used with arity {} and {}", atom.pred, n, atom.arity()),
                )),
                Some(_) => {}
                None => {
                    arity.insert(&atom.pred, atom.arity());
                }
            }
        }

        match disj.get(&*rule.head.pred) {
            Some(&(mode, first)) if mode != rule.disj => out.push(Diagnostic::at(
                i,
                rule,
                Severity::Error,
                DiagCode::ModeAgreement,
                format!(
                    "predicate {} has disj={} here but disj={} in rule {}",
                    rule.head.pred,
                    rule.disj,
                    mode,
                    first + 1
                ),
            )),
            Some(_) => {}
            None => {
                disj.insert(&rule.head.pred, (rule.disj, i));
            }
        }
    }

    let recursive = recursive_predicates(program);
    let defined = program.defined_predicates();
    let mut warned_recursive = BTreeSet::new();
    let mut warned_unknown = BTreeSet::new();
    for (i, rule) in program.rules.iter().enumerate() {
        let pred = &rule.head.pred;
        if recursive.contains(pred)
            && rule.disj != Mode::PositiveCorrelation
            && warned_recursive.insert(pred.clone())
        {
            out.push(Diagnostic::at(
                i,
                rule,
                Severity::Warning,
                DiagCode::NonterminatingMode,
                format!(
                    "recursive predicate {} uses disj={}; the fixpoint may only be reached in the limit",
                    pred, rule.disj
                ),
            ));
        }
        for atom in &rule.body {
            if !defined.contains(&atom.pred) && warned_unknown.insert(atom.pred.clone()) {
                out.push(Diagnostic::at(
                    i,
                    rule,
                    Severity::Warning,
                    DiagCode::UnknownPredicate,
                    format!("predicate {} has no rules or facts", atom.pred),
                ));
            }
        }
    }

    out.sort_by_key(|d| (d.rule, d.severity, d.code));
    out
}

/// Predicates lying on a cycle of the head-to-body dependency graph.
pub fn recursive_predicates(program: &PProgram) -> BTreeSet<Symbol> {
    let mut graph: DiGraph<Symbol, ()> = DiGraph::new();
    let mut nodes: BTreeMap<Symbol, NodeIndex> = BTreeMap::new();
    let mut node = |g: &mut DiGraph<Symbol, ()>, p: &Symbol| {
        *nodes.entry(p.clone()).or_insert_with(|| g.add_node(p.clone()))
    };
    for rule in &program.rules {
        let h = node(&mut graph, &rule.head.pred);
        for atom in &rule.body {
            let b = node(&mut graph, &atom.pred);
            graph.update_edge(h, b, ());
        }
    }
    let mut out = BTreeSet::new();
    for scc in tarjan_scc(&graph) {
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if cyclic {
            out.extend(scc.into_iter().map(|n| graph[n].clone()));
        }
    }
    out
}

/// Every constant occurring in the program.
pub fn constants_of(program: &PProgram) -> BTreeSet<Constant> {
    program
        .rules
        .iter()
        .flat_map(|r| std::iter::once(&r.head).chain(&r.body))
        .flat_map(|a| &a.args)
        .filter_map(|t| match t {
            Term::Const(c) => Some(c.clone()),
            Term::Var(_) => None,
        })
        .collect()
}
