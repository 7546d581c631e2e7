//! LP-midpoint list scheduling and single-to-multi-crew conversion.

use std::fmt;
use std::str::FromStr;

use crate::lp::{solve_relaxation, LpError, LpSolution};
use crate::model::Problem;
use crate::schedule::{
    energization_times, infinite_crew_energization, list_schedule, EnergizationVector, HarmReport, Schedule,
    ScheduleOutput,
};
use crate::seq_opt::{expand_sequence, optimal_single_crew_harm, WithinIslandOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// List scheduling by ascending LP midpoints.
    LpList,
    /// Optimal single-crew sequence used as the priority list.
    Convert,
    /// Optimal single-crew schedule (one crew regardless of the instance).
    SingleOptimal,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::LpList => "lp-list",
            Algorithm::Convert => "convert",
            Algorithm::SingleOptimal => "single-optimal",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lp-list" => Ok(Algorithm::LpList),
            "convert" => Ok(Algorithm::Convert),
            "single-optimal" => Ok(Algorithm::SingleOptimal),
            other => Err(format!("unknown algorithm `{other}` (expected lp-list, convert or single-optimal)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Lp(LpSolution),
    SingleCrew { island_order: Vec<usize>, line_order: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoResult {
    pub algorithm: Algorithm,
    pub priority: Vec<usize>,
    pub schedule: Schedule,
    pub energization: EnergizationVector,
    pub report: HarmReport,
    pub provenance: Provenance,
}

impl AlgoResult {
    fn evaluate(
        problem: &Problem,
        algorithm: Algorithm,
        priority: Vec<usize>,
        crews: usize,
        provenance: Provenance,
    ) -> Self {
        let p = problem.repair_times();
        let schedule = list_schedule(&priority, crews, &p).expect("priority lists cover every line");
        let energization = energization_times(&schedule.completion_times(), &problem.islands, &problem.precedence);
        let mut report = HarmReport::new(algorithm.tag(), crews, &energization, &problem.islands);
        report.infinite_crew_optimum = Some(infinite_crew_energization(&problem.islands, &problem.precedence, &p).1);
        AlgoResult { algorithm, priority, schedule, energization, report, provenance }
    }

    pub fn harm(&self) -> f64 {
        self.report.harm
    }

    pub fn lp_solution(&self) -> Option<&LpSolution> {
        match &self.provenance {
            Provenance::Lp(s) => Some(s),
            Provenance::SingleCrew { .. } => None,
        }
    }

    pub fn output(&self, problem: &Problem) -> ScheduleOutput {
        ScheduleOutput::new(self.algorithm.tag(), &self.schedule, &self.energization, problem)
    }
}

/// Priority list by ascending midpoint. Midpoints within `1e-9` (relative) of
/// the first in a run count as tied; ties go to the island closer to the
/// root, then to the smaller line index.
pub fn midpoint_priority(midpoints: &[f64], problem: &Problem) -> Vec<usize> {
    let mut order: Vec<usize> = (0..midpoints.len()).collect();
    order.sort_by(|&a, &b| midpoints[a].total_cmp(&midpoints[b]).then(a.cmp(&b)));
    let depth = |j: usize| problem.precedence.depth(problem.islands.island_of_line(j));
    let mut start = 0;
    while start < order.len() {
        let lead = midpoints[order[start]];
        let tol = 1e-9 * lead.abs().max(1.0);
        let end = start + order[start..].iter().take_while(|&&j| midpoints[j] - lead <= tol).count();
        order[start..end].sort_by_key(|&j| (depth(j), j));
        start = end;
    }
    order
}

/// Solve the relaxation, sort lines by LP midpoint, list-schedule on `crews`.
pub fn lp_list_schedule(problem: &Problem, crews: usize) -> Result<AlgoResult, LpError> {
    let solution = solve_relaxation(problem, crews)?;
    let priority = midpoint_priority(&solution.midpoints, problem);
    Ok(AlgoResult::evaluate(problem, Algorithm::LpList, priority, crews, Provenance::Lp(solution)))
}

/// List-schedule the optimal single-crew sequence on `crews` crews.
pub fn convert_single_to_m(problem: &Problem, crews: usize, within: WithinIslandOrder) -> AlgoResult {
    let plan = optimal_single_crew_harm(problem);
    let line_order = expand_sequence(&plan.island_order, &problem.islands, within, &problem.repair_times());
    let mut result = AlgoResult::evaluate(
        problem,
        Algorithm::Convert,
        line_order.clone(),
        crews,
        Provenance::SingleCrew { island_order: plan.island_order, line_order },
    );
    result.report.single_crew_optimum = Some(plan.harm);
    result
}

/// The exact one-crew schedule.
pub fn single_optimal(problem: &Problem, within: WithinIslandOrder) -> AlgoResult {
    let mut result = convert_single_to_m(problem, 1, within);
    result.algorithm = Algorithm::SingleOptimal;
    result.report.algorithm = Algorithm::SingleOptimal.tag().to_string();
    result
}

pub fn run(
    problem: &Problem,
    algorithm: Algorithm,
    crews: usize,
    within: WithinIslandOrder,
) -> Result<AlgoResult, LpError> {
    match algorithm {
        Algorithm::LpList => lp_list_schedule(problem, crews),
        Algorithm::Convert => Ok(convert_single_to_m(problem, crews, within)),
        Algorithm::SingleOptimal => Ok(single_optimal(problem, within)),
    }
}
