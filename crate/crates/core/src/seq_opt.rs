//! Exact single-crew sequencing.
//!
//! With one crew, lines of an island are best repaired back to back and in
//! any internal order, so each island collapses into a composite job
//! `(p_J, ω_J)`. What remains is one-machine weighted completion time under
//! out-tree precedence, solved by repeatedly merging the composite with the
//! largest weight-to-processing ratio into its parent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::model::{IslandSet, PrecedenceGraph, Problem};
use crate::schedule::{energization_times, harm, list_schedule, EnergizationVector};

/// A chain of islands sequenced back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeJob {
    pub islands: Vec<usize>,
    pub processing: f64,
    pub weight: f64,
}

impl CompositeJob {
    pub fn from_islands(order: &[usize], islands: &IslandSet) -> Self {
        let (processing, weight) = order.iter().fold((0.0, 0.0), |(p, w), &j| {
            let isl = &islands.islands()[j];
            (p + isl.processing, w + isl.weight)
        });
        CompositeJob { islands: order.to_vec(), processing, weight }
    }

    /// Line sequence with each island's lines kept contiguous.
    pub fn line_sequence(&self, islands: &IslandSet, within: WithinIslandOrder, repair_times: &[f64]) -> Vec<usize> {
        expand_sequence(&self.islands, islands, within, repair_times)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    weight: f64,
    processing: f64,
    id: usize,
    version: u32,
}

impl Candidate {
    /// Ratio comparison by cross-multiplication; zero processing ranks above
    /// every finite ratio. `Greater` means "merge first".
    fn priority_cmp(&self, other: &Self) -> Ordering {
        let a_inf = self.processing == 0.0;
        let b_inf = other.processing == 0.0;
        let by_ratio = match (a_inf, b_inf) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.weight * other.processing).total_cmp(&(other.weight * self.processing)),
        };
        by_ratio.then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.priority_cmp(other) == Ordering::Equal && self.version == other.version
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority_cmp(other).then_with(|| self.version.cmp(&other.version))
    }
}

/// Optimal one-crew island order. The result is a linear extension of the
/// precedence tree; ratio ties go to the smaller island id.
pub fn optimal_island_sequence(islands: &IslandSet, precedence: &PrecedenceGraph) -> Vec<usize> {
    let k = islands.len();
    let mut rep: Vec<usize> = (0..k).collect();
    let mut next: Vec<Option<usize>> = vec![None; k];
    let mut tail: Vec<usize> = (0..k).collect();
    let mut weight: Vec<f64> = islands.islands().iter().map(|i| i.weight).collect();
    let mut processing: Vec<f64> = islands.islands().iter().map(|i| i.processing).collect();
    let mut version = vec![0u32; k];

    fn find(rep: &mut [usize], mut x: usize) -> usize {
        while rep[x] != x {
            rep[x] = rep[rep[x]];
            x = rep[x];
        }
        x
    }

    let mut heap: BinaryHeap<Candidate> = (0..k)
        .filter(|&j| precedence.parent(j).is_some())
        .map(|j| Candidate { weight: weight[j], processing: processing[j], id: j, version: 0 })
        .collect();

    while let Some(c) = heap.pop() {
        if rep[c.id] != c.id || version[c.id] != c.version {
            continue;
        }
        let parent_island = precedence.parent(c.id).expect("only non-root composites are queued");
        let target = find(&mut rep, parent_island);
        rep[c.id] = target;
        next[tail[target]] = Some(c.id);
        tail[target] = tail[c.id];
        weight[target] += weight[c.id];
        processing[target] += processing[c.id];
        version[target] += 1;
        if precedence.parent(target).is_some() {
            heap.push(Candidate {
                weight: weight[target],
                processing: processing[target],
                id: target,
                version: version[target],
            });
        }
    }

    let mut order = Vec::with_capacity(k);
    let mut cur = Some(precedence.root());
    while let Some(j) = cur {
        order.push(j);
        cur = next[j];
    }
    debug_assert_eq!(order.len(), k);
    order
}

/// Order of lines inside an island when an island sequence is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WithinIslandOrder {
    /// Ascending line id.
    #[default]
    Given,
    /// Descending line id.
    Reversed,
    /// Ascending repair time, so the longest repair of each island goes last.
    AdversarialLongestLast,
}

impl FromStr for WithinIslandOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "given" => Ok(WithinIslandOrder::Given),
            "reversed" => Ok(WithinIslandOrder::Reversed),
            "adversarial-longest-last" => Ok(WithinIslandOrder::AdversarialLongestLast),
            other => Err(format!(
                "unknown within-island order `{other}` (expected given, reversed or adversarial-longest-last)"
            )),
        }
    }
}

impl fmt::Display for WithinIslandOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WithinIslandOrder::Given => "given",
            WithinIslandOrder::Reversed => "reversed",
            WithinIslandOrder::AdversarialLongestLast => "adversarial-longest-last",
        })
    }
}

/// Concatenates each island's lines as one contiguous block.
pub fn expand_sequence(
    order: &[usize],
    islands: &IslandSet,
    within: WithinIslandOrder,
    repair_times: &[f64],
) -> Vec<usize> {
    let mut out = Vec::new();
    for &j in order {
        // island line lists are already ascending by index
        let mut block = islands.islands()[j].lines.clone();
        match within {
            WithinIslandOrder::Given => {}
            WithinIslandOrder::Reversed => block.reverse(),
            WithinIslandOrder::AdversarialLongestLast => {
                block.sort_by(|&a, &b| repair_times[a].total_cmp(&repair_times[b]).then(a.cmp(&b)))
            }
        }
        out.extend(block);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleCrewPlan {
    pub island_order: Vec<usize>,
    pub line_order: Vec<usize>,
    pub energization: EnergizationVector,
    pub harm: f64,
}

/// Optimal one-crew plan and its harm `H^{1,*}`.
pub fn optimal_single_crew_harm(problem: &Problem) -> SingleCrewPlan {
    let island_order = optimal_island_sequence(&problem.islands, &problem.precedence);
    let p = problem.repair_times();
    let line_order = expand_sequence(&island_order, &problem.islands, WithinIslandOrder::Given, &p);
    let schedule = list_schedule(&line_order, 1, &p).expect("expanded order covers every line");
    let energization = energization_times(&schedule.completion_times(), &problem.islands, &problem.precedence);
    let harm = harm(&energization, &problem.islands);
    SingleCrewPlan { island_order, line_order, energization, harm }
}
