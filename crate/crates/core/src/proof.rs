//! Disjunctive proof trees.
//!
//! Goal nodes and rule nodes alternate. Trees built here are ground and share
//! identical subtrees through `Arc`, so traversals work on the underlying DAG
//! with explicit stacks; every count they report refers to the fully expanded
//! tree.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::calculus::{conjoin_all, disjoin_all, CombinationError, Mode};
use crate::engine::{Database, EngineError, FixpointOptions, MatchIndex, Status};
use crate::lang::{Atom, Constant, GroundAtom, GroundRule, PRule, Substitution, Symbol};
use crate::trilattice::ConfidenceLevel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProofError {
    #[error("goal {0} is not ground; use a query for non-ground patterns")]
    NonGround(String),
    #[error("substitution does not ground rule {0}")]
    Unground(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Combination(#[from] CombinationError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalNode {
    pub atom: GroundAtom,
    pub mode: Mode,
    pub children: Vec<Arc<DptNode>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleNode {
    pub rule_index: usize,
    pub rule: Arc<PRule>,
    /// Bindings of the rule's variables. Keys may carry a `#n` renaming
    /// suffix that keeps different uses of one rule apart.
    pub theta: Substitution,
    pub instance: GroundRule,
    pub children: Vec<Arc<DptNode>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DptNode {
    Goal(GoalNode),
    Rule(RuleNode),
}

/// Variable name without its renaming suffix.
pub fn base_name(var: &str) -> &str {
    var.split('#').next().unwrap_or(var)
}

fn strip_renaming(theta: &Substitution) -> Substitution {
    theta
        .iter()
        .map(|(k, v)| (Symbol::from(base_name(k)), v.clone()))
        .collect()
}

impl DptNode {
    pub fn goal(atom: GroundAtom, mode: Mode, children: Vec<Arc<DptNode>>) -> Arc<DptNode> {
        Arc::new(DptNode::Goal(GoalNode {
            atom,
            mode,
            children,
        }))
    }

    /// A rule node carrying the rule's own confidence.
    pub fn rule(
        rule_index: usize,
        rule: Arc<PRule>,
        theta: Substitution,
        children: Vec<Arc<DptNode>>,
    ) -> Result<Arc<DptNode>, ProofError> {
        let instance = rule
            .ground(&strip_renaming(&theta))
            .ok_or(ProofError::Unground(rule_index))?;
        Ok(Arc::new(DptNode::Rule(RuleNode {
            rule_index,
            rule,
            theta,
            instance,
            children,
        })))
    }

    pub fn children(&self) -> &[Arc<DptNode>] {
        match self {
            DptNode::Goal(g) => &g.children,
            DptNode::Rule(r) => &r.children,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, DptNode::Goal(g) if g.children.is_empty())
    }
}

type NodeKey = *const DptNode;

fn key(node: &DptNode) -> NodeKey {
    node as *const DptNode
}

/// Distinct nodes of the DAG, children before parents.
fn postorder(root: &DptNode) -> Vec<&DptNode> {
    let mut out = Vec::new();
    let mut done: HashSet<NodeKey> = HashSet::new();
    let mut stack: Vec<(&DptNode, bool)> = vec![(root, false)];
    while let Some((node, expanded)) = stack.pop() {
        if done.contains(&key(node)) {
            continue;
        }
        if expanded {
            done.insert(key(node));
            out.push(node);
        } else {
            stack.push((node, true));
            for c in node.children().iter().rev() {
                if !done.contains(&key(c)) {
                    stack.push((c, false));
                }
            }
        }
    }
    out
}

/// Confidence of every node of a tree.
pub struct Confidences {
    map: HashMap<NodeKey, ConfidenceLevel>,
}

impl Confidences {
    pub fn of(tree: &DptNode) -> Result<Self, ProofError> {
        let mut map: HashMap<NodeKey, ConfidenceLevel> = HashMap::new();
        for node in postorder(tree) {
            let kids: Vec<ConfidenceLevel> = node.children().iter().map(|c| map[&key(c)]).collect();
            let c = match node {
                DptNode::Goal(g) => disjoin_all(g.mode, &kids)?,
                DptNode::Rule(r) => {
                    conjoin_all(r.instance.conj, std::iter::once(&r.instance.conf).chain(&kids))?
                }
            };
            map.insert(key(node), c);
        }
        Ok(Confidences { map })
    }

    pub fn get(&self, node: &DptNode) -> Option<ConfidenceLevel> {
        self.map.get(&key(node)).copied()
    }
}

/// Bottom-up confidence: failure leaves are `FALSE`, rule leaves carry the
/// rule confidence, rule nodes conjoin and goal nodes disjoin.
pub fn dpt_confidence(tree: &DptNode) -> Result<ConfidenceLevel, ProofError> {
    Ok(Confidences::of(tree)?.get(tree).expect("root visited"))
}

/// Number of edges on the longest root-to-leaf path.
pub fn height(tree: &DptNode) -> usize {
    let mut h: HashMap<NodeKey, usize> = HashMap::new();
    for node in postorder(tree) {
        let v = node
            .children()
            .iter()
            .map(|c| h[&key(c)] + 1)
            .max()
            .unwrap_or(0);
        h.insert(key(node), v);
    }
    h[&key(tree)]
}

/// Number of nodes of the fully expanded tree.
pub fn expanded_size(tree: &DptNode) -> BigUint {
    let mut n: HashMap<NodeKey, BigUint> = HashMap::new();
    for node in postorder(tree) {
        let mut total = BigUint::one();
        for c in node.children() {
            total += &n[&key(c)];
        }
        n.insert(key(node), total);
    }
    n.remove(&key(tree)).expect("root visited")
}

/// Checks alternation, that each rule node instantiates its rule under its
/// substitution and matches its parent and children, that all substitutions
/// agree, and that the rule children of every goal carry distinct branch
/// substitutions. Failure leaves are accepted wherever they occur, since a
/// depth bound may cut a derivable goal.
pub fn is_well_formed(tree: &DptNode) -> bool {
    if !matches!(tree, DptNode::Goal(_)) {
        return false;
    }
    let mut bindings: HashMap<&str, &Constant> = HashMap::new();
    for node in postorder(tree) {
        match node {
            DptNode::Goal(g) => {
                let mut labels: HashSet<(usize, Substitution)> = HashSet::new();
                for c in &g.children {
                    let DptNode::Rule(r) = &**c else {
                        return false;
                    };
                    if r.instance.head != g.atom {
                        return false;
                    }
                    if !labels.insert((r.rule_index, strip_renaming(&r.theta))) {
                        return false;
                    }
                }
            }
            DptNode::Rule(r) => {
                if r.children.len() != r.instance.body.len() {
                    return false;
                }
                for (c, b) in r.children.iter().zip(&r.instance.body) {
                    match &**c {
                        DptNode::Goal(g) if &g.atom == b => {}
                        _ => return false,
                    }
                }
                let Some(expected) = r.rule.ground(&strip_renaming(&r.theta)) else {
                    return false;
                };
                if expected.head != r.instance.head
                    || expected.body != r.instance.body
                    || expected.conj != r.instance.conj
                {
                    return false;
                }
                for (k, v) in &r.theta {
                    match bindings.get(&**k) {
                        Some(prev) if *prev != v => return false,
                        Some(_) => {}
                        None => {
                            bindings.insert(k, v);
                        }
                    }
                }
            }
        }
    }
    true
}

/// Sum, over the branches containing `atom` as a goal, of the number of
/// repeated occurrences of `atom` on that branch.
pub fn simplicity_violations(tree: &DptNode, atom: &GroundAtom) -> BigUint {
    // Per node: branch count, summed occurrences, branches free of `atom`.
    let mut stats: HashMap<NodeKey, (BigUint, BigUint, BigUint)> = HashMap::new();
    for node in postorder(tree) {
        let hit = matches!(node, DptNode::Goal(g) if &g.atom == atom);
        let (mut n, mut s, mut z) = (BigUint::zero(), BigUint::zero(), BigUint::zero());
        if node.children().is_empty() {
            n = BigUint::one();
            if !hit {
                z = BigUint::one();
            }
        }
        for c in node.children() {
            let (cn, cs, cz) = &stats[&key(c)];
            n += cn;
            s += cs;
            if !hit {
                z += cz;
            }
        }
        if hit {
            s += &n;
            z = BigUint::zero();
        }
        stats.insert(key(node), (n, s, z));
    }
    let (n, s, z) = stats.remove(&key(tree)).expect("root visited");
    s - (n - z)
}

/// No branch contains the same goal atom twice.
pub fn is_simple(tree: &DptNode) -> bool {
    let mut below: HashMap<NodeKey, BTreeSet<&GroundAtom>> = HashMap::new();
    for node in postorder(tree) {
        let mut set: BTreeSet<&GroundAtom> = BTreeSet::new();
        for c in node.children() {
            set.extend(below[&key(c)].iter().copied());
        }
        if let DptNode::Goal(g) = node {
            if !set.insert(&g.atom) {
                return false;
            }
        }
        below.insert(key(node), set);
    }
    true
}

/// Every goal atom occurring in the tree.
pub fn goal_atoms(tree: &DptNode) -> BTreeSet<GroundAtom> {
    postorder(tree)
        .into_iter()
        .filter_map(|n| match n {
            DptNode::Goal(g) => Some(g.atom.clone()),
            DptNode::Rule(_) => None,
        })
        .collect()
}

/// Removes every rule node that has a goal child repeating an ancestor goal
/// atom. The result is a simple tree; the input is expanded, so this is
/// meant for small trees.
pub fn prune_repeats(tree: &Arc<DptNode>) -> Arc<DptNode> {
    fn go(node: &Arc<DptNode>, ancestors: &mut Vec<GroundAtom>) -> Arc<DptNode> {
        let DptNode::Goal(g) = &**node else {
            return node.clone();
        };
        ancestors.push(g.atom.clone());
        let mut kept = Vec::new();
        for c in &g.children {
            let DptNode::Rule(r) = &**c else { continue };
            let repeats = r.children.iter().any(|gc| match &**gc {
                DptNode::Goal(cg) => ancestors.contains(&cg.atom),
                DptNode::Rule(_) => false,
            });
            if repeats {
                continue;
            }
            let children = r.children.iter().map(|gc| go(gc, ancestors)).collect();
            kept.push(Arc::new(DptNode::Rule(RuleNode {
                children,
                ..r.clone()
            })));
        }
        ancestors.pop();
        DptNode::goal(g.atom.clone(), g.mode, kept)
    }
    go(tree, &mut Vec::new())
}

/// The derivation tree of height at most `2k - 1` whose confidence is
/// `T^k(goal)`.
///
/// Rule instances are those whose body lies in the support of `T^k`. A goal
/// at level 0 is a failure leaf, a goal at level 1 expands into its facts
/// only, and a goal at level `j >= 2` expands every instance for its atom
/// with body goals at level `j - 1`.
pub fn build_ddt(db: &Database, goal: &GroundAtom, k: usize) -> Result<Arc<DptNode>, ProofError> {
    let mode = |a: &GroundAtom| db.disj_mode(&a.pred);
    if k == 0 {
        return Ok(DptNode::goal(goal.clone(), mode(goal), Vec::new()));
    }
    let support = db.iterate(k)?;
    let index = MatchIndex::new(&support);
    let rules: Vec<Arc<PRule>> = db.program().rules.iter().cloned().map(Arc::new).collect();

    let mut instances: HashMap<GroundAtom, Vec<crate::engine::Instance>> = HashMap::new();
    let mut needed: Vec<BTreeSet<GroundAtom>> = vec![BTreeSet::new(); k + 1];
    needed[k].insert(goal.clone());
    for j in (1..=k).rev() {
        let atoms: Vec<GroundAtom> = needed[j].iter().cloned().collect();
        for a in atoms {
            if !instances.contains_key(&a) {
                let insts = db.instances_for_indexed(&index, &a)?;
                instances.insert(a.clone(), insts);
            }
            if j >= 2 {
                for inst in &instances[&a] {
                    needed[j - 1].extend(inst.body.iter().cloned());
                }
            }
        }
    }

    let mut counter = 0usize;
    let mut prev: HashMap<GroundAtom, Arc<DptNode>> = needed[0]
        .iter()
        .map(|a| (a.clone(), DptNode::goal(a.clone(), mode(a), Vec::new())))
        .collect();
    for (j, level) in needed.iter().enumerate().skip(1) {
        let mut cur = HashMap::new();
        for a in level {
            let mut kids = Vec::new();
            for inst in &instances[a] {
                if j == 1 && !inst.body.is_empty() {
                    continue;
                }
                counter += 1;
                let theta: Substitution = db
                    .rule_variables(inst.rule)
                    .iter()
                    .zip(&inst.values)
                    .map(|(v, c)| (Symbol::from(format!("{v}#{counter}")), c.clone()))
                    .collect();
                let children = inst.body.iter().map(|b| prev[b].clone()).collect();
                kids.push(Arc::new(DptNode::Rule(RuleNode {
                    rule_index: inst.rule,
                    rule: rules[inst.rule].clone(),
                    theta,
                    instance: db.ground_rule(inst),
                    children,
                })));
            }
            cur.insert(a.clone(), DptNode::goal(a.clone(), mode(a), kids));
        }
        prev = cur;
    }
    Ok(prev.remove(goal).expect("goal built at top level"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProveOptions {
    /// Tree depth used when the fixpoint is not reached exactly.
    pub depth: usize,
    pub fixpoint: FixpointOptions,
}

impl Default for ProveOptions {
    fn default() -> Self {
        ProveOptions {
            depth: 20,
            fixpoint: FixpointOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProofResult {
    pub confidence: ConfidenceLevel,
    pub tree: Arc<DptNode>,
    pub depth: usize,
    pub exact: bool,
    /// The engine's value for the goal (exact or approximate).
    pub engine_value: ConfidenceLevel,
}

pub fn prove(db: &Database, goal: &Atom, options: &ProveOptions) -> Result<ProofResult, ProofError> {
    let ground = goal
        .to_ground()
        .ok_or_else(|| ProofError::NonGround(goal.to_string()))?;
    let result = db.evaluate(&options.fixpoint)?;
    let (depth, exact) = match result.closure_stage() {
        Some(k) => (k, true),
        None => (options.depth, false),
    };
    let tree = build_ddt(db, &ground, depth)?;
    Ok(ProofResult {
        confidence: dpt_confidence(&tree)?,
        tree,
        depth,
        exact: exact && result.status == Status::Exact,
        engine_value: result.valuation.get(&ground),
    })
}

fn write_theta(out: &mut String, theta: &Substitution) {
    let base: BTreeMap<&str, &Constant> = theta.iter().map(|(k, v)| (base_name(k), v)).collect();
    out.push('{');
    for (i, (k, v)) in base.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{k}={v}");
    }
    out.push('}');
}

/// Indented text rendering of the expanded tree, one node per line. Rule
/// numbers count from 1. Output stops after `max_lines` lines.
pub fn render_tree(tree: &DptNode, max_lines: usize) -> Result<String, ProofError> {
    let confs = Confidences::of(tree)?;
    let mut out = String::new();
    let mut lines = 0usize;
    let mut stack: Vec<(&DptNode, usize)> = vec![(tree, 0)];
    while let Some((node, depth)) = stack.pop() {
        if lines == max_lines {
            out.push_str("% output truncated\n");
            break;
        }
        lines += 1;
        out.push_str(&"  ".repeat(depth));
        let c = confs.get(node).expect("confidence computed");
        match node {
            DptNode::Goal(g) => {
                let _ = write!(out, "{} {} disj={}", g.atom, c, g.mode);
                if g.children.is_empty() {
                    out.push_str(" (failure)");
                }
            }
            DptNode::Rule(r) => {
                let _ = write!(out, "rule {} ", r.rule_index + 1);
                if r.children.is_empty() {
                    out.push_str("fact ");
                } else {
                    write_theta(&mut out, &r.theta);
                    out.push(' ');
                }
                let _ = write!(out, "{c} conj={}", r.instance.conj);
            }
        }
        out.push('\n');
        for child in node.children().iter().rev() {
            stack.push((child, depth + 1));
        }
    }
    Ok(out)
}

/// Substitution with renaming suffixes removed, as displayed.
pub fn display_substitution(theta: &Substitution) -> Substitution {
    strip_renaming(theta)
}
