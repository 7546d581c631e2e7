//! Completion-time LP relaxation, solved by cutting planes.
//!
//! Variables are one completion time `C_j` per line and one energization time
//! `E_J` per island. The base model holds `C_j ≥ p_j`, `E_J ≥ C_j` for member
//! lines and `E_child ≥ E_parent` along the precedence tree. The parallel
//! machine inequalities
//!
//! ```text
//! Σ_{j∈A} p_j C_j ≥ f(A) = (Σ_{j∈A} p_j)² / 2m + Σ_{j∈A} p_j² / 2
//! ```
//!
//! are added lazily: whenever the current optimum violates one by more than
//! [`CUT_TOLERANCE`], the most violated one is appended and the LP re-solved.

pub mod simplex;

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::Problem;
pub use simplex::{simplex_solve, DualSimplex, LpVertex};

/// Absolute violation below which a cut is considered satisfied.
pub const CUT_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
    #[error("simplex stopped after {pivots} pivots")]
    IterationLimit { pivots: usize },
    #[error("cutting-plane loop stopped with {cuts} cuts (last violation {last_violation:.3e})")]
    CutLimit { cuts: usize, last_violation: f64 },
    #[error("invalid LP model: {0}")]
    InvalidModel(String),
}

/// `Σ terms ≥ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
    pub label: String,
}

/// Minimization over nonnegative variables with `≥` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub var_names: Vec<String>,
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl LpModel {
    pub fn new(var_names: Vec<String>, objective: Vec<f64>) -> Self {
        assert_eq!(var_names.len(), objective.len());
        LpModel { var_names, objective, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, rhs: f64, label: &str) {
        self.constraints.push(LinearConstraint { terms, rhs, label: label.to_string() });
    }

    /// Plain-text listing, one inequality per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("minimize\n  ");
        let obj: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| format!("{c} {}", self.var_names[j]))
            .collect();
        out.push_str(&if obj.is_empty() { "0".to_string() } else { obj.join(" + ") });
        out.push_str("\nsubject to\n");
        for c in &self.constraints {
            let lhs: Vec<String> = c.terms.iter().map(|&(v, a)| format!("{a} {}", self.var_names[v])).collect();
            let _ = writeln!(out, "  {}: {} >= {}", c.label, lhs.join(" + "), c.rhs);
        }
        out.push_str("bounds\n  all variables >= 0\n");
        out
    }
}

/// One valid inequality over a set of lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    /// Line indices, ascending.
    pub lines: Vec<usize>,
    pub rhs: f64,
}

/// `f(A)` for the given member lines.
pub fn cut_rhs(lines: &[usize], repair_times: &[f64], crews: usize) -> f64 {
    let (sum, sum_sq) = lines.iter().fold((0.0, 0.0), |(s, q), &j| {
        let p = repair_times[j];
        (s + p, q + p * p)
    });
    sum * sum / (2.0 * crews as f64) + 0.5 * sum_sq
}

impl Cut {
    pub fn new(mut lines: Vec<usize>, repair_times: &[f64], crews: usize) -> Self {
        lines.sort_unstable();
        let rhs = cut_rhs(&lines, repair_times, crews);
        Cut { lines, rhs }
    }

    pub fn lhs(&self, completion: &[f64], repair_times: &[f64]) -> f64 {
        self.lines.iter().map(|&j| repair_times[j] * completion[j]).sum()
    }

    /// `f(A) − Σ p_j C_j`; positive when violated.
    pub fn violation(&self, completion: &[f64], repair_times: &[f64]) -> f64 {
        self.rhs - self.lhs(completion, repair_times)
    }

    fn to_constraint(&self, repair_times: &[f64], label: String) -> LinearConstraint {
        LinearConstraint { terms: self.lines.iter().map(|&j| (j, repair_times[j])).collect(), rhs: self.rhs, label }
    }
}

/// Most violated parallel-machine inequality for `completion`, or `None` when
/// no violation exceeds `tol`.
///
/// Writing `f(A) = (1/m)·½(P² + Σp²) + ((m−1)/2m)·Σp²` turns each inequality
/// into the single-machine one for the shifted times
/// `C'_j = C_j − (m−1)p_j/2m`, whose most violated set is always a prefix of
/// the lines sorted by `C'_j`. Lines with `p_j = 0` never change either side
/// and are left out. Ties are broken by line index.
pub fn separate(completion: &[f64], repair_times: &[f64], crews: usize, tol: f64) -> Option<(Cut, f64)> {
    let m = crews as f64;
    let shift = (m - 1.0) / (2.0 * m);
    let key = |j: usize| completion[j] - shift * repair_times[j];
    let mut order: Vec<usize> = (0..completion.len()).filter(|&j| repair_times[j] > 0.0).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));

    let (mut sum, mut sum_sq, mut lhs) = (0.0, 0.0, 0.0);
    let mut best: Option<(usize, f64)> = None;
    for (k, &j) in order.iter().enumerate() {
        let p = repair_times[j];
        sum += p;
        sum_sq += p * p;
        lhs += p * completion[j];
        let violation = sum * sum / (2.0 * m) + 0.5 * sum_sq - lhs;
        if best.is_none_or(|(_, v)| violation > v) {
            best = Some((k + 1, violation));
        }
    }
    let (len, violation) = best?;
    (violation > tol).then(|| (Cut::new(order[..len].to_vec(), repair_times, crews), violation))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub completion: Vec<f64>,
    pub energization: Vec<f64>,
    pub midpoints: Vec<f64>,
    pub objective: f64,
    /// Number of LP solves in the cutting-plane loop.
    pub iterations: usize,
    /// Cuts added by separation (the pool also holds the initial singletons).
    pub cuts_added: usize,
    pub cuts: Vec<Cut>,
    pub crews: usize,
}

impl LpSolution {
    /// Checks `Σ_A p_j M_j ≥ (Σ_A p_j)² / 2m` on every pooled cut.
    pub fn midpoint_bound_holds(&self, repair_times: &[f64], tol: f64) -> bool {
        let m = self.crews as f64;
        self.cuts.iter().all(|cut| {
            let sum: f64 = cut.lines.iter().map(|&j| repair_times[j]).sum();
            let lhs: f64 = cut.lines.iter().map(|&j| repair_times[j] * self.midpoints[j]).sum();
            lhs >= sum * sum / (2.0 * m) - tol * sum.max(1.0)
        })
    }
}

/// `M_j = C_j − p_j / 2`.
pub fn lp_midpoints(completion: &[f64], repair_times: &[f64]) -> Vec<f64> {
    completion.iter().zip(repair_times).map(|(c, p)| c - p / 2.0).collect()
}

/// Variables `C_0..C_{n-1}` followed by `E_0..E_{k-1}`.
pub fn base_model(problem: &Problem) -> LpModel {
    let n = problem.num_lines();
    let p = problem.repair_times();
    let mut names: Vec<String> = (0..n).map(|j| format!("C[{}]", problem.line_id(j))).collect();
    names.extend((0..problem.islands.len()).map(|j| format!("E[{j}]")));
    let mut objective = vec![0.0; n];
    objective.extend(problem.islands.islands().iter().map(|i| i.weight));
    let mut model = LpModel::new(names, objective);

    for (j, &pj) in p.iter().enumerate() {
        model.add_constraint(vec![(j, 1.0)], pj, &format!("release_{}", problem.line_id(j)));
    }
    for island in problem.islands.islands() {
        for &j in &island.lines {
            model.add_constraint(
                vec![(n + island.id, 1.0), (j, -1.0)],
                0.0,
                &format!("member_{}_{}", island.id, problem.line_id(j)),
            );
        }
    }
    for &(from, to) in problem.precedence.edges() {
        model.add_constraint(vec![(n + to, 1.0), (n + from, -1.0)], 0.0, &format!("precedence_{from}_{to}"));
    }
    model
}

struct CutLoop<'a> {
    repair_times: &'a [f64],
    crews: usize,
    model: LpModel,
    cuts: Vec<Cut>,
    iterations: usize,
    cuts_added: usize,
    limit: usize,
}

impl CutLoop<'_> {
    /// Re-solves and separates until the optimum of `solver` violates no cut.
    /// New cuts go to both `solver` and the shared pool.
    fn run(&mut self, solver: &mut DualSimplex) -> Result<LpVertex, LpError> {
        let n = self.repair_times.len();
        loop {
            let vertex = solver.solve()?;
            self.iterations += 1;
            let Some((cut, violation)) = separate(&vertex.values[..n], self.repair_times, self.crews, CUT_TOLERANCE)
            else {
                return Ok(vertex);
            };
            if self.cuts_added >= self.limit || self.cuts.contains(&cut) {
                return Err(LpError::CutLimit { cuts: self.cuts.len(), last_violation: violation });
            }
            let row = cut.to_constraint(self.repair_times, format!("cut_{}", self.cuts.len()));
            solver.add_constraint(&row)?;
            self.model.constraints.push(row);
            self.cuts.push(cut);
            self.cuts_added += 1;
        }
    }
}

/// Cutting-plane solution of the relaxation for `crews` crews.
///
/// Completion times carry no cost, so the optimal face is usually not a
/// single point. A second pass minimizes `Σ C_j + Σ E_J` while holding the
/// harm at its optimum, which picks the earliest completion times.
///
/// Returns the final model (base rows plus every pooled cut) alongside the
/// solution so callers can dump it.
pub fn solve_relaxation_model(problem: &Problem, crews: usize) -> Result<(LpSolution, LpModel), LpError> {
    if crews == 0 {
        return Err(LpError::InvalidModel("crew count must be at least 1".into()));
    }
    let n = problem.num_lines();
    let p = problem.repair_times();
    let mut model = base_model(problem);
    let cuts: Vec<Cut> = (0..n).filter(|&j| p[j] > 0.0).map(|j| Cut::new(vec![j], &p, crews)).collect();
    for (k, cut) in cuts.iter().enumerate() {
        model.constraints.push(cut.to_constraint(&p, format!("cut_{k}")));
    }
    let weights = model.objective.clone();
    let mut state =
        CutLoop { repair_times: &p, crews, model, cuts, iterations: 0, cuts_added: 0, limit: (10 * n * n).max(10) };

    let first = state.run(&mut DualSimplex::new(&state.model)?)?;

    let mut tie_break = state.model.clone();
    tie_break.objective = vec![1.0; weights.len()];
    let bound = first.objective + 1e-9 * first.objective.abs().max(1.0);
    let terms = weights.iter().enumerate().filter(|(_, w)| **w != 0.0).map(|(v, w)| (v, -w)).collect();
    tie_break.add_constraint(terms, -bound, "harm_at_optimum");
    let vertex = state.run(&mut DualSimplex::new(&tie_break)?)?;

    let completion = vertex.values[..n].to_vec();
    let energization = vertex.values[n..].to_vec();
    let midpoints = lp_midpoints(&completion, &p);
    // the tie-break vertex may sit up to its slack above the optimum
    let objective = first.objective;
    let CutLoop { model, cuts, iterations, cuts_added, .. } = state;
    let solution = LpSolution { completion, energization, midpoints, objective, iterations, cuts_added, cuts, crews };
    Ok((solution, model))
}

pub fn solve_relaxation(problem: &Problem, crews: usize) -> Result<LpSolution, LpError> {
    solve_relaxation_model(problem, crews).map(|(s, _)| s)
}
