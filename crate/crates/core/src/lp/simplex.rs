//! Dense tableau simplex for covering-type LPs
//!
//! ```text
//! minimize  c·x   subject to  A x ≥ b,  x ≥ 0,   with c ≥ 0.
//! ```
//!
//! The solver pivots on the dual `max b·y s.t. Aᵀy ≤ c, y ≥ 0`, whose slack
//! basis is feasible because `c ≥ 0`, so no phase one is needed. Primal values
//! are read off the reduced costs of the dual slacks. A new primal row is a
//! new dual column; it can be appended to the current tableau and pivoting
//! resumes from the previous optimum.
//!
//! Entering and leaving variables follow Bland's rule.

use super::{LinearConstraint, LpError, LpModel};

const PIVOT_EPS: f64 = 1e-11;
const OPTIMALITY_EPS: f64 = 1e-9;

/// Optimal primal vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LpVertex {
    pub values: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub struct DualSimplex {
    num_vars: usize,
    cost: Vec<f64>,
    /// One row per primal variable; columns are `[slack_0..slack_n | y_0..y_k]`.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Dual objective coefficient per column (`0` for slacks, `b_r` for `y_r`).
    column_cost: Vec<f64>,
    reduced: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    max_pivots: usize,
}

impl DualSimplex {
    pub fn new(model: &LpModel) -> Result<Self, LpError> {
        let n = model.num_vars();
        if let Some((j, &c)) = model.objective.iter().enumerate().find(|(_, c)| !c.is_finite() || **c < 0.0) {
            return Err(LpError::InvalidModel(format!(
                "objective coefficient of `{}` is {c}; costs must be finite and nonnegative",
                model.var_names[j]
            )));
        }
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let mut solver = DualSimplex {
            num_vars: n,
            cost: model.objective.clone(),
            rows,
            rhs: model.objective.clone(),
            column_cost: vec![0.0; n],
            reduced: vec![0.0; n],
            basis: (0..n).collect(),
            pivots: 0,
            max_pivots: 0,
        };
        for c in &model.constraints {
            solver.add_constraint(c)?;
        }
        Ok(solver)
    }

    pub fn num_constraints(&self) -> usize {
        self.column_cost.len() - self.num_vars
    }

    /// Appends a `≥` row of the primal. The current basis stays dual feasible.
    pub fn add_constraint(&mut self, c: &LinearConstraint) -> Result<(), LpError> {
        let n = self.num_vars;
        let mut dense = vec![0.0; n];
        for &(v, a) in &c.terms {
            if v >= n {
                return Err(LpError::InvalidModel(format!("constraint `{}` references variable {v}", c.label)));
            }
            dense[v] += a;
        }
        if !c.rhs.is_finite() || dense.iter().any(|a| !a.is_finite()) {
            return Err(LpError::InvalidModel(format!("constraint `{}` has non-finite data", c.label)));
        }
        // Column in the current basis: B⁻¹a, with B⁻¹ stored in the slack block.
        let col: Vec<f64> =
            self.rows.iter().map(|row| dense.iter().enumerate().map(|(i, &a)| a * row[i]).sum()).collect();
        // Reduced cost b_r − (c_B B⁻¹) a, where c_B B⁻¹ is the primal point.
        let x = self.primal_values();
        let reduced = c.rhs - dense.iter().zip(&x).map(|(a, xi)| a * xi).sum::<f64>();
        for (row, v) in self.rows.iter_mut().zip(col) {
            row.push(v);
        }
        self.column_cost.push(c.rhs);
        self.reduced.push(reduced);
        self.max_pivots = 50 * (self.column_cost.len() + n) + 1000;
        Ok(())
    }

    fn primal_values(&self) -> Vec<f64> {
        (0..self.num_vars).map(|i| -self.reduced[i]).collect()
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][col];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rows[i][col] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
            }
        }
        let f = self.reduced[col];
        for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        self.reduced[col] = 0.0;
        self.basis[r] = col;
        self.pivots += 1;
    }

    pub fn solve(&mut self) -> Result<LpVertex, LpError> {
        let scale = self.column_cost.iter().fold(1.0_f64, |m, b| m.max(b.abs()));
        loop {
            let entering = (0..self.reduced.len()).find(|&j| self.reduced[j] > OPTIMALITY_EPS * scale);
            let Some(col) = entering else { break };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-12 * best.abs().max(1.0)
                                || (ratio <= best + 1e-12 * best.abs().max(1.0) && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Infeasible);
            };
            if self.pivots >= self.max_pivots {
                return Err(LpError::IterationLimit { pivots: self.pivots });
            }
            self.pivot(r, col);
        }
        let values: Vec<f64> = self.primal_values().into_iter().map(|v| v.max(0.0)).collect();
        let objective = values.iter().zip(&self.cost).map(|(x, c)| x * c).sum();
        Ok(LpVertex { values, objective, pivots: self.pivots })
    }
}

/// Solves `model` from scratch.
pub fn simplex_solve(model: &LpModel) -> Result<LpVertex, LpError> {
    DualSimplex::new(model)?.solve()
}
