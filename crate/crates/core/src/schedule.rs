//! Crew schedules, island energization times and the harm objective.

use std::collections::BTreeMap;
use std::ops::Index;

use serde::Serialize;
use thiserror::Error;

use crate::model::{IslandSet, PrecedenceGraph, Problem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("priority list is not a permutation of the {expected} lines: {reason}")]
    ListNotPermutation { expected: usize, reason: String },
    #[error("at least one crew is required")]
    NoCrews,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub line: usize,
    pub start: f64,
    pub completion: f64,
}

/// Per-crew job sequences. Every crew works back to back from time zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    crews: Vec<Vec<Assignment>>,
    num_lines: usize,
}

impl Schedule {
    pub fn crews(&self) -> &[Vec<Assignment>] {
        &self.crews
    }

    pub fn crew_count(&self) -> usize {
        self.crews.len()
    }

    fn per_line(&self, f: impl Fn(&Assignment) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.num_lines];
        for a in self.crews.iter().flatten() {
            out[a.line] = f(a);
        }
        out
    }

    /// Completion time per line index.
    pub fn completion_times(&self) -> Vec<f64> {
        self.per_line(|a| a.completion)
    }

    pub fn start_times(&self) -> Vec<f64> {
        self.per_line(|a| a.start)
    }

    pub fn makespan(&self) -> f64 {
        self.crews.iter().flatten().map(|a| a.completion).fold(0.0, f64::max)
    }

    pub fn busy_time(&self) -> f64 {
        self.crews.iter().flatten().map(|a| a.completion - a.start).sum()
    }
}

/// Greedy list scheduling: the next job of the list goes to the crew that
/// becomes free first, lowest crew index on ties.
pub fn list_schedule(priority: &[usize], crews: usize, repair_times: &[f64]) -> Result<Schedule, ScheduleError> {
    if crews == 0 {
        return Err(ScheduleError::NoCrews);
    }
    let n = repair_times.len();
    let not_perm = |reason: String| ScheduleError::ListNotPermutation { expected: n, reason };
    if priority.len() != n {
        return Err(not_perm(format!("list has {} entries", priority.len())));
    }
    let mut seen = vec![false; n];
    for &j in priority {
        if j >= n {
            return Err(not_perm(format!("line index {j} out of range")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(not_perm(format!("line index {j} repeated")));
        }
    }

    let mut free_at = vec![0.0_f64; crews];
    let mut out = vec![Vec::new(); crews];
    for &j in priority {
        let mut k = 0;
        for c in 1..crews {
            if free_at[c] < free_at[k] {
                k = c;
            }
        }
        let start = free_at[k];
        let completion = start + repair_times[j];
        free_at[k] = completion;
        out[k].push(Assignment { line: j, start, completion });
    }
    Ok(Schedule { crews: out, num_lines: n })
}

/// Energization time per island id.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergizationVector(Vec<f64>);

impl EnergizationVector {
    pub fn new(values: Vec<f64>) -> Self {
        EnergizationVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Index<usize> for EnergizationVector {
    type Output = f64;

    fn index(&self, island: usize) -> &f64 {
        &self.0[island]
    }
}

/// An island energizes once its own lines and every upstream island are
/// done: `E_J = max(C_J, E_parent(J))`, evaluated root-down. A line-less
/// island completes at time zero.
pub fn energization_times(completion: &[f64], islands: &IslandSet, precedence: &PrecedenceGraph) -> EnergizationVector {
    let mut e = vec![0.0; islands.len()];
    for &j in precedence.topological_order() {
        let own = islands.islands()[j].lines.iter().map(|&l| completion[l]).fold(0.0, f64::max);
        let above = precedence.parent(j).map_or(0.0, |p| e[p]);
        e[j] = own.max(above);
    }
    EnergizationVector(e)
}

pub fn harm(energization: &EnergizationVector, islands: &IslandSet) -> f64 {
    islands.islands().iter().map(|i| i.weight * energization[i.id]).sum()
}

/// Energization with a crew per line: every job starts at zero, so `E_J` is
/// the longest single repair on the path from the root island to `J`.
/// Returns the vector and its harm.
pub fn infinite_crew_energization(
    islands: &IslandSet,
    precedence: &PrecedenceGraph,
    repair_times: &[f64],
) -> (EnergizationVector, f64) {
    let e = energization_times(repair_times, islands, precedence);
    let h = harm(&e, islands);
    (e, h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IslandEnergization {
    pub island: usize,
    pub weight: f64,
    pub energization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmReport {
    pub algorithm: String,
    pub crews: usize,
    pub harm: f64,
    pub islands: Vec<IslandEnergization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_crew_optimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinite_crew_optimum: Option<f64>,
}

impl HarmReport {
    pub fn new(algorithm: &str, crews: usize, energization: &EnergizationVector, islands: &IslandSet) -> Self {
        HarmReport {
            algorithm: algorithm.to_string(),
            crews,
            harm: harm(energization, islands),
            islands: islands
                .islands()
                .iter()
                .map(|i| IslandEnergization { island: i.id, weight: i.weight, energization: energization[i.id] })
                .collect(),
            single_crew_optimum: None,
            infinite_crew_optimum: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentRecord {
    pub line: String,
    pub start: f64,
    pub completion: f64,
}

/// File form of a schedule with its energization times and harm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleOutput {
    pub algorithm: String,
    pub crews: usize,
    pub assignments: Vec<Vec<AssignmentRecord>>,
    pub energization: BTreeMap<String, f64>,
    pub harm: f64,
}

impl ScheduleOutput {
    pub fn new(algorithm: &str, schedule: &Schedule, energization: &EnergizationVector, problem: &Problem) -> Self {
        ScheduleOutput {
            algorithm: algorithm.to_string(),
            crews: schedule.crew_count(),
            assignments: schedule
                .crews()
                .iter()
                .map(|crew| {
                    crew.iter()
                        .map(|a| AssignmentRecord {
                            line: problem.line_id(a.line).to_string(),
                            start: a.start,
                            completion: a.completion,
                        })
                        .collect()
                })
                .collect(),
            energization: (0..energization.len()).map(|j| (j.to_string(), energization[j])).collect(),
            harm: harm(energization, &problem.islands),
        }
    }
}
