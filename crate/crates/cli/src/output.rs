//! Text and JSON renderings of results. JSON numbers carry full precision.

use std::collections::HashMap;
use std::sync::Arc;

use pddb_core::engine::{FixpointResult, QueryResult};
use pddb_core::lang::{Constant, GroundAtom, Substitution};
use pddb_core::proof::{display_substitution, Confidences, DptNode, ProofError, ProofResult};
use pddb_core::ConfidenceLevel;
use serde_json::{json, Map, Value};

fn constant(c: &Constant) -> Value {
    match c {
        Constant::Int(n) => json!(n),
        Constant::Sym(s) | Constant::Str(s) => json!(&**s),
    }
}

fn args(a: &GroundAtom) -> Value {
    Value::Array(a.args.iter().map(constant).collect())
}

fn bindings(theta: &Substitution) -> Value {
    Value::Object(theta.iter().map(|(k, v)| (k.to_string(), constant(v))).collect())
}

fn conf_fields(obj: &mut Map<String, Value>, c: &ConfidenceLevel) {
    obj.insert("belief".into(), json!([c.alpha(), c.beta()]));
    obj.insert("doubt".into(), json!([c.gamma(), c.delta()]));
}

fn atom_entry(a: &GroundAtom, c: &ConfidenceLevel) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("pred".into(), json!(&*a.pred));
    obj.insert("args".into(), args(a));
    conf_fields(&mut obj, c);
    obj
}

fn trailer(obj: &mut Map<String, Value>, r: &FixpointResult) {
    obj.insert("iterations".into(), json!(r.iterations));
    obj.insert("status".into(), json!(r.status.to_string()));
    obj.insert("residual".into(), json!(r.residual));
}

pub fn status_line(r: &FixpointResult) -> String {
    let residual = if r.residual == 0.0 { "0".to_string() } else { format!("{:e}", r.residual) };
    format!("% status={} iterations={} residual={residual}", r.status, r.iterations)
}

pub fn eval_text(atoms: &[(GroundAtom, ConfidenceLevel)], r: &FixpointResult) -> String {
    let mut out = String::new();
    for (a, c) in atoms {
        out.push_str(&format!("{a} {c}\n"));
    }
    out.push_str(&status_line(r));
    out.push('\n');
    out
}

pub fn eval_json(atoms: &[(GroundAtom, ConfidenceLevel)], r: &FixpointResult) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "atoms".into(),
        Value::Array(atoms.iter().map(|(a, c)| Value::Object(atom_entry(a, c))).collect()),
    );
    trailer(&mut obj, r);
    Value::Object(obj)
}

pub fn query_text(q: &QueryResult) -> String {
    let mut out = String::new();
    for a in &q.answers {
        out.push_str(&format!("{} {}", a.atom, a.conf));
        for (k, v) in &a.bindings {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
    }
    out
}

pub fn query_json(q: &QueryResult, r: &FixpointResult) -> Value {
    let answers = q
        .answers
        .iter()
        .map(|a| {
            let mut obj = atom_entry(&a.atom, &a.conf);
            obj.insert("bindings".into(), bindings(&a.bindings));
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("answers".into(), Value::Array(answers));
    trailer(&mut obj, r);
    Value::Object(obj)
}

pub fn prove_summary(p: &ProofResult) -> String {
    format!(
        "% confidence {} {} depth={}",
        p.confidence,
        if p.exact { "exact" } else { "approximate" },
        p.depth
    )
}

/// The proof tree as a node table. Shared subtrees appear once and are
/// referenced by id; the root is node 0.
pub fn prove_json(goal: &GroundAtom, p: &ProofResult) -> Result<Value, ProofError> {
    let confs = Confidences::of(&p.tree)?;
    let mut ids: HashMap<*const DptNode, usize> = HashMap::new();
    let mut order: Vec<&Arc<DptNode>> = Vec::new();
    ids.insert(Arc::as_ptr(&p.tree), 0);
    order.push(&p.tree);
    // breadth-first numbering keeps ids stable across runs
    let mut next = 0;
    while next < order.len() {
        let node = order[next];
        next += 1;
        for child in node.children() {
            if let std::collections::hash_map::Entry::Vacant(e) = ids.entry(Arc::as_ptr(child)) {
                e.insert(order.len());
                order.push(child);
            }
        }
    }
    let nodes: Vec<Value> = order
        .iter()
        .enumerate()
        .map(|(id, node)| {
            let mut obj = Map::new();
            obj.insert("id".into(), json!(id));
            match &***node {
                DptNode::Goal(g) => {
                    obj.insert("kind".into(), json!("goal"));
                    obj.insert("pred".into(), json!(&*g.atom.pred));
                    obj.insert("args".into(), args(&g.atom));
                    obj.insert("mode".into(), json!(g.mode.name()));
                }
                DptNode::Rule(r) => {
                    obj.insert("kind".into(), json!("rule"));
                    obj.insert("rule".into(), json!(r.rule_index + 1));
                    obj.insert("substitution".into(), bindings(&display_substitution(&r.theta)));
                    obj.insert("mode".into(), json!(r.instance.conj.name()));
                }
            }
            let c = confs.get(node).expect("every node has a confidence");
            conf_fields(&mut obj, &c);
            let kids: Vec<usize> = node.children().iter().map(|c| ids[&Arc::as_ptr(c)]).collect();
            obj.insert("children".into(), json!(kids));
            Value::Object(obj)
        })
        .collect();
    let mut obj = atom_entry(goal, &p.confidence);
    obj.insert("exact".into(), json!(p.exact));
    obj.insert("depth".into(), json!(p.depth));
    obj.insert("nodes".into(), Value::Array(nodes));
    Ok(Value::Object(obj))
}
