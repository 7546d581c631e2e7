//! Brute-force optimum and bound certification for small instances.
//!
//! With all jobs released at time zero and harm nondecreasing in every
//! completion time, some idle-free list schedule is optimal, so enumerating
//! every priority list and list-scheduling it finds `H^{m,*}` exactly.

use serde::Serialize;
use thiserror::Error;

use crate::lp::cut_rhs;
use crate::model::Problem;
use crate::schedule::infinite_crew_energization;
use crate::seq_opt::optimal_single_crew_harm;

/// Largest line count accepted by [`brute_force_optimal`] (9! lists).
pub const MAX_BRUTE_FORCE_LINES: usize = 9;
/// Largest line count accepted by [`exhaustive_separation`].
pub const MAX_SEPARATION_LINES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{n} lines exceed the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("at least one crew is required")]
    NoCrews,
    #[error("bound violated: {0}")]
    BoundViolated(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub crews: usize,
    pub optimal_harm: f64,
    /// Lexicographically smallest optimal list (line indices).
    pub optimal_list: Vec<usize>,
    pub lists_enumerated: u64,
}

struct Search<'a> {
    problem: &'a Problem,
    repair: Vec<f64>,
    free_at: Vec<f64>,
    completion: Vec<f64>,
    used: Vec<bool>,
    list: Vec<usize>,
    island_done: Vec<f64>,
    energization: Vec<f64>,
    best: f64,
    best_list: Vec<usize>,
    leaves: u64,
}

impl Search<'_> {
    fn harm(&mut self) -> f64 {
        let islands = self.problem.islands.islands();
        for (j, island) in islands.iter().enumerate() {
            self.island_done[j] = island.lines.iter().map(|&l| self.completion[l]).fold(0.0, f64::max);
        }
        let prec = &self.problem.precedence;
        let mut h = 0.0;
        for &j in prec.topological_order() {
            let above = prec.parent(j).map_or(0.0, |p| self.energization[p]);
            self.energization[j] = self.island_done[j].max(above);
            h += islands[j].weight * self.energization[j];
        }
        h
    }

    fn descend(&mut self) {
        let n = self.repair.len();
        if self.list.len() == n {
            self.leaves += 1;
            let h = self.harm();
            if h < self.best {
                self.best = h;
                self.best_list.clone_from(&self.list);
            }
            return;
        }
        let mut crew = 0;
        for c in 1..self.free_at.len() {
            if self.free_at[c] < self.free_at[crew] {
                crew = c;
            }
        }
        let start = self.free_at[crew];
        for j in 0..n {
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.list.push(j);
            self.completion[j] = start + self.repair[j];
            self.free_at[crew] = self.completion[j];
            self.descend();
            self.free_at[crew] = start;
            self.list.pop();
            self.used[j] = false;
        }
    }
}

/// Exact `H^{m,*}` by enumerating all `n!` priority lists.
pub fn brute_force_optimal(problem: &Problem, crews: usize) -> Result<OracleResult, OracleError> {
    let n = problem.num_lines();
    if n > MAX_BRUTE_FORCE_LINES {
        return Err(OracleError::TooLarge { n, limit: MAX_BRUTE_FORCE_LINES });
    }
    if crews == 0 {
        return Err(OracleError::NoCrews);
    }
    let k = problem.islands.len();
    let mut search = Search {
        problem,
        repair: problem.repair_times(),
        free_at: vec![0.0; crews],
        completion: vec![0.0; n],
        used: vec![false; n],
        list: Vec::with_capacity(n),
        island_done: vec![0.0; k],
        energization: vec![0.0; k],
        best: f64::INFINITY,
        best_list: Vec::new(),
        leaves: 0,
    };
    search.descend();
    Ok(OracleResult {
        crews,
        optimal_harm: search.best,
        optimal_list: search.best_list,
        lists_enumerated: search.leaves,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub crews: usize,
    pub single_crew_optimum: f64,
    pub infinite_crew_optimum: f64,
    pub optimum: f64,
    /// `H^{m,*} − H^{1,*}/m`.
    pub single_crew_slack: f64,
    /// `H^{m,*} − H^{∞,*}`.
    pub infinite_crew_slack: f64,
}

/// Certifies `H^{m,*} ≥ H^{1,*}/m` and `H^{m,*} ≥ H^{∞,*}`.
pub fn check_bounds(problem: &Problem, crews: usize) -> Result<BoundsReport, OracleError> {
    let optimum = brute_force_optimal(problem, crews)?.optimal_harm;
    let single = optimal_single_crew_harm(problem).harm;
    let (_, infinite) = infinite_crew_energization(&problem.islands, &problem.precedence, &problem.repair_times());
    let report = BoundsReport {
        crews,
        single_crew_optimum: single,
        infinite_crew_optimum: infinite,
        optimum,
        single_crew_slack: optimum - single / crews as f64,
        infinite_crew_slack: optimum - infinite,
    };
    let tol = 1e-9 * optimum.abs().max(1.0);
    if report.single_crew_slack < -tol {
        return Err(OracleError::BoundViolated(format!("H^m* = {optimum} < H^1*/m = {}", single / crews as f64)));
    }
    if report.infinite_crew_slack < -tol {
        return Err(OracleError::BoundViolated(format!("H^m* = {optimum} < H^inf* = {infinite}")));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetViolation {
    pub lines: Vec<usize>,
    pub violation: f64,
}

/// Maximizes `f(A) − Σ_A p_j C_j` over every non-empty subset `A`. The
/// smallest bitmask wins ties.
pub fn exhaustive_separation(
    completion: &[f64],
    repair_times: &[f64],
    crews: usize,
) -> Result<SubsetViolation, OracleError> {
    let n = completion.len();
    if n > MAX_SEPARATION_LINES {
        return Err(OracleError::TooLarge { n, limit: MAX_SEPARATION_LINES });
    }
    if crews == 0 {
        return Err(OracleError::NoCrews);
    }
    let mut best = SubsetViolation { lines: Vec::new(), violation: f64::NEG_INFINITY };
    let mut members = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        members.clear();
        members.extend((0..n).filter(|&j| mask >> j & 1 == 1));
        let lhs: f64 = members.iter().map(|&j| repair_times[j] * completion[j]).sum();
        let violation = cut_rhs(&members, repair_times, crews) - lhs;
        if violation > best.violation {
            best = SubsetViolation { lines: members.clone(), violation };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn two_island_optimum() {
        let problem = Problem::from_raw(&two_island()).unwrap();
        let r = brute_force_optimal(&problem, 2).unwrap();
        assert_eq!(r.optimal_harm, 22.0);
        assert_eq!(r.lists_enumerated, 2);
        assert_eq!(r.optimal_list, vec![0, 1]);
    }

    #[test]
    fn fork_optimum() {
        let problem = Problem::from_raw(&fork()).unwrap();
        let r = brute_force_optimal(&problem, 2).unwrap();
        assert_eq!(r.optimal_harm, 21.0);
        assert_eq!(r.lists_enumerated, 6);
    }

    #[test]
    fn many_crews_reach_the_infinite_crew_bound() {
        let problem = Problem::from_raw(&fork()).unwrap();
        let r = brute_force_optimal(&problem, 3).unwrap();
        assert_eq!(r.optimal_harm, 18.0);
    }

    #[test]
    fn guard_trips_above_nine_lines() {
        let mut raw = single_line(1.0, 1.0);
        for k in 1..10 {
            raw.nodes.push(raw_node(&format!("n{k}"), 1.0));
            raw.lines.push(raw_line(&format!("l{k}"), "0", &format!("n{k}"), 1.0, false));
        }
        let problem = Problem::from_raw(&raw).unwrap();
        assert_eq!(brute_force_optimal(&problem, 2), Err(OracleError::TooLarge { n: 10, limit: 9 }));
    }

    #[test]
    fn bounds_on_fixtures() {
        let problem = Problem::from_raw(&two_island()).unwrap();
        let b = check_bounds(&problem, 2).unwrap();
        assert_eq!((b.optimum, b.single_crew_optimum, b.infinite_crew_optimum), (22.0, 32.0, 22.0));
        assert_eq!(b.infinite_crew_slack, 0.0);

        let problem = Problem::from_raw(&fork()).unwrap();
        let b = check_bounds(&problem, 2).unwrap();
        assert_eq!(b.single_crew_slack, 21.0 - 15.5);
        assert_eq!(b.infinite_crew_slack, 3.0);

        let b = check_bounds(&problem, 1).unwrap();
        assert_eq!(b.single_crew_slack, 0.0);
    }

    #[test]
    fn exhaustive_separation_examples() {
        let r = exhaustive_separation(&[0.1, 0.1], &[1.0, 1.0], 1).unwrap();
        assert_eq!(r.lines, vec![0, 1]);
        assert!((r.violation - 2.8).abs() < 1e-12);

        let r = exhaustive_separation(&[2.0, 1.0], &[2.0, 1.0], 2).unwrap();
        assert!(r.violation <= 0.0);

        let r = exhaustive_separation(&[3.0], &[3.0], 1).unwrap();
        assert_eq!(r.violation, 0.0);

        assert!(exhaustive_separation(&[0.0; 13], &[1.0; 13], 1).is_err());
    }
}
