//! Possible-worlds oracles for the two-event combination formulas.
//!
//! Two events F and G each take one of the values true (`1`), false (`0`) or
//! unknown (`⊥`), giving nine worlds with probabilities `w_ij`. A pair of
//! confidence levels constrains the marginals; the ignorance combination of
//! F and G is the range of `P(F op G)` over all such distributions, found
//! exactly by enumerating the vertices of the constraint polytope.

use thiserror::Error;

use crate::trilattice::ConfidenceLevel;

pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("the world constraints are infeasible for {0} and {1}")]
    Infeasible(ConfidenceLevel, ConfidenceLevel),
    #[error("grid step must lie in (0,1], got {0}")]
    BadStep(f64),
}

/// Value of one event in a world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub const ALL: [Truth; 3] = [Truth::True, Truth::False, Truth::Unknown];

    fn index(self) -> usize {
        match self {
            Truth::True => 0,
            Truth::False => 1,
            Truth::Unknown => 2,
        }
    }
}

/// Index of world `(F = i, G = j)` among the nine variables.
pub fn world(i: Truth, j: Truth) -> usize {
    3 * i.index() + j.index()
}

/// Nine world probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldDistribution {
    pub w: [f64; 9],
}

impl WorldDistribution {
    pub fn get(&self, i: Truth, j: Truth) -> f64 {
        self.w[world(i, j)]
    }

    /// Nonnegative and summing to one within the feasibility tolerance.
    pub fn is_valid(&self) -> bool {
        self.w.iter().all(|&x| x >= -FEASIBILITY_TOL)
            && (self.w.iter().sum::<f64>() - 1.0).abs() <= FEASIBILITY_TOL
    }

    /// Probability that F (`first`) or G has value `t`.
    pub fn marginal(&self, first: bool, t: Truth) -> f64 {
        Truth::ALL
            .iter()
            .map(|&o| if first { self.get(t, o) } else { self.get(o, t) })
            .sum()
    }

    /// Whether the marginals respect both confidence levels.
    pub fn satisfies(&self, c1: &ConfidenceLevel, c2: &ConfidenceLevel) -> bool {
        let within = |x: f64, lo: f64, hi: f64| x >= lo - FEASIBILITY_TOL && x <= hi + FEASIBILITY_TOL;
        self.is_valid()
            && within(self.marginal(true, Truth::True), c1.alpha(), c1.beta())
            && within(self.marginal(true, Truth::False), c1.gamma(), c1.delta())
            && within(self.marginal(false, Truth::True), c2.alpha(), c2.beta())
            && within(self.marginal(false, Truth::False), c2.gamma(), c2.delta())
    }

    pub fn evaluate(&self, objective: &Objective) -> f64 {
        objective.coefficients.iter().zip(&self.w).map(|(c, w)| c * w).sum()
    }
}

/// A linear objective: the sum of a subset of the world probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub coefficients: [f64; 9],
}

impl Objective {
    pub fn worlds(pred: impl Fn(Truth, Truth) -> bool) -> Self {
        let mut coefficients = [0.0; 9];
        for i in Truth::ALL {
            for j in Truth::ALL {
                if pred(i, j) {
                    coefficients[world(i, j)] = 1.0;
                }
            }
        }
        Objective { coefficients }
    }
}

/// The nine-world polytope for two confidence levels: the simplex equality,
/// four marginal intervals (eight inequalities), and nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Rows `a . w <= b`: eight interval bounds followed by nine `-w <= 0`.
    pub rows: Vec<([f64; 9], f64)>,
    pub c1: ConfidenceLevel,
    pub c2: ConfidenceLevel,
}

impl LinearProgram {
    pub const INEQUALITIES: usize = 17;

    pub fn new(c1: &ConfidenceLevel, c2: &ConfidenceLevel) -> Self {
        let sums = [
            (Objective::worlds(|i, _| i == Truth::True), c1.alpha(), c1.beta()),
            (Objective::worlds(|i, _| i == Truth::False), c1.gamma(), c1.delta()),
            (Objective::worlds(|_, j| j == Truth::True), c2.alpha(), c2.beta()),
            (Objective::worlds(|_, j| j == Truth::False), c2.gamma(), c2.delta()),
        ];
        let mut rows = Vec::with_capacity(Self::INEQUALITIES);
        for (obj, lo, hi) in sums {
            let neg = obj.coefficients.map(|x| -x);
            rows.push((neg, -lo));
            rows.push((obj.coefficients, hi));
        }
        for k in 0..9 {
            let mut a = [0.0; 9];
            a[k] = -1.0;
            rows.push((a, 0.0));
        }
        LinearProgram {
            rows,
            c1: *c1,
            c2: *c2,
        }
    }

    fn feasible(&self, w: &[f64; 9]) -> bool {
        let sum: f64 = w.iter().sum();
        (sum - 1.0).abs() <= FEASIBILITY_TOL
            && self.rows.iter().all(|(a, b)| {
                let lhs: f64 = a.iter().zip(w).map(|(x, y)| x * y).sum();
                lhs <= b + FEASIBILITY_TOL
            })
    }

    /// All basic feasible solutions: every choice of 8 tight inequalities
    /// plus the simplex equality whose 9x9 system is nonsingular and whose
    /// solution satisfies every constraint.
    pub fn vertices(&self) -> Vec<WorldDistribution> {
        let mut out = Vec::new();
        let mut choice = [0usize; 8];
        for (slot, c) in choice.iter_mut().enumerate() {
            *c = slot;
        }
        let n = self.rows.len();
        loop {
            let mut m = [[0.0f64; 10]; 9];
            for (r, &row) in choice.iter().enumerate() {
                let (a, b) = &self.rows[row];
                m[r][..9].copy_from_slice(a);
                m[r][9] = *b;
            }
            m[8] = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
            if let Some(w) = solve(m) {
                if self.feasible(&w) {
                    out.push(WorldDistribution { w: w.map(|x| x.max(0.0)) });
                }
            }
            // next combination in lexicographic order
            let mut i = 8;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if choice[i] < n - 8 + i {
                    choice[i] += 1;
                    for j in i + 1..8 {
                        choice[j] = choice[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

/// Gaussian elimination with partial pivoting on an augmented 9x10 matrix.
fn solve(mut m: [[f64; 10]; 9]) -> Option<[f64; 9]> {
    for col in 0..9 {
        let pivot = (col..9).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for r in 0..9 {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    let pivot_row = m[col];
                    for (x, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    let mut w = [0.0; 9];
    for (k, x) in w.iter_mut().enumerate() {
        *x = m[k][9] / m[k][k];
    }
    Some(w)
}

/// Extremes of an objective over the polytope, with attaining distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    pub argmin: WorldDistribution,
    pub argmax: WorldDistribution,
}

fn extremes_over(vertices: &[WorldDistribution], objective: &Objective) -> Option<Extremes> {
    let mut it = vertices.iter();
    let first = it.next()?;
    let v0 = first.evaluate(objective);
    let mut e = Extremes {
        min: v0,
        max: v0,
        argmin: *first,
        argmax: *first,
    };
    for v in it {
        let x = v.evaluate(objective);
        if x < e.min {
            e.min = x;
            e.argmin = *v;
        }
        if x > e.max {
            e.max = x;
            e.argmax = *v;
        }
    }
    Some(e)
}

pub fn lp_extremes(lp: &LinearProgram, objective: &Objective) -> Result<Extremes, OracleError> {
    extremes_over(&lp.vertices(), objective).ok_or(OracleError::Infeasible(lp.c1, lp.c2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    Conj,
    Disj,
}

/// Worlds where the compound event is true, and where it is false.
pub fn objectives(op: Connective) -> (Objective, Objective) {
    use Truth::*;
    match op {
        Connective::Conj => (
            Objective::worlds(|i, j| i == True && j == True),
            Objective::worlds(|i, j| i == False || j == False),
        ),
        Connective::Disj => (
            Objective::worlds(|i, j| i == True || j == True),
            Objective::worlds(|i, j| i == False && j == False),
        ),
    }
}

fn level(t: (f64, f64), f: (f64, f64)) -> ConfidenceLevel {
    let c = |x: f64| x.clamp(0.0, 1.0);
    ConfidenceLevel::new(c(t.0), c(t.1), c(f.0), c(f.1)).expect("clamped")
}

/// Exact ignorance combination by vertex enumeration.
pub fn ignorance_oracle(
    op: Connective,
    c1: &ConfidenceLevel,
    c2: &ConfidenceLevel,
) -> Result<ConfidenceLevel, OracleError> {
    let lp = LinearProgram::new(c1, c2);
    let vertices = lp.vertices();
    let (t, f) = objectives(op);
    let et = extremes_over(&vertices, &t).ok_or(OracleError::Infeasible(*c1, *c2))?;
    let ef = extremes_over(&vertices, &f).ok_or(OracleError::Infeasible(*c1, *c2))?;
    Ok(level((et.min, et.max), (ef.min, ef.max)))
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let n = ((hi - lo) / step).floor() as usize;
    for k in 0..=n {
        out.push(lo + k as f64 * step);
    }
    if out.last().is_some_and(|&x| x < hi) {
        out.push(hi);
    }
    out
}

/// Achievable values of P(true) and of P(false) for one event on the grid.
fn marginals(c: &ConfidenceLevel, step: f64) -> (Vec<f64>, Vec<f64>) {
    let slack = 1e-12;
    let trues: Vec<f64> = grid(c.alpha(), c.beta(), step)
        .into_iter()
        .filter(|p1| p1 + c.gamma() <= 1.0 + slack)
        .collect();
    let falses: Vec<f64> = grid(c.gamma(), c.delta(), step)
        .into_iter()
        .filter(|p0| p0 + c.alpha() <= 1.0 + slack)
        .collect();
    (trues, falses)
}

fn range2(xs: &[f64], ys: &[f64], f: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in xs {
        for &y in ys {
            let v = f(x, y);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

/// Independence combination by grid search over product distributions
/// `w_ij = p_i q_j`.
pub fn independence_oracle(
    op: Connective,
    c1: &ConfidenceLevel,
    c2: &ConfidenceLevel,
    grid_step: f64,
) -> Result<ConfidenceLevel, OracleError> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(OracleError::BadStep(grid_step));
    }
    let (p1, p0) = marginals(c1, grid_step);
    let (q1, q0) = marginals(c2, grid_step);
    if p1.is_empty() || p0.is_empty() || q1.is_empty() || q0.is_empty() {
        return Err(OracleError::Infeasible(*c1, *c2));
    }
    // Each objective depends only on the true marginals or only on the
    // false marginals of the two events.
    let or = |x: f64, y: f64| x + y - x * y;
    let and = |x: f64, y: f64| x * y;
    let (t, f) = match op {
        Connective::Conj => (range2(&p1, &q1, and), range2(&p0, &q0, or)),
        Connective::Disj => (range2(&p1, &q1, or), range2(&p0, &q0, and)),
    };
    Ok(level(t, f))
}
