#![allow(dead_code)]

use std::path::PathBuf;

use self::perms::permutations;
use restoration_sched::harness::{generate_indexed, load_instance, GenParams};
use restoration_sched::model::Problem;
use restoration_sched::schedule::{energization_times, harm, list_schedule};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str) -> Problem {
    Problem::new(load_instance(fixture(name)).expect("fixture loads"))
}

pub fn random_problem(seed: u64, max_lines: usize, switch_probability: f64) -> Problem {
    let params = GenParams { seed, max_lines, switch_probability, ..GenParams::default() };
    Problem::new(generate_indexed(&params, 0))
}

/// Harm of list-scheduling `list` on `crews` crews.
pub fn list_harm(problem: &Problem, list: &[usize], crews: usize) -> f64 {
    let s = list_schedule(list, crews, &problem.repair_times()).unwrap();
    let e = energization_times(&s.completion_times(), &problem.islands, &problem.precedence);
    harm(&e, &problem.islands)
}

/// Minimum one-crew harm over every island permutation, each island's lines
/// kept contiguous in ascending order. Ignores precedence on purpose.
pub fn best_island_permutation(problem: &Problem) -> f64 {
    let k = problem.islands.len();
    permutations(k)
        .into_iter()
        .map(|order| {
            let list: Vec<usize> =
                order.iter().flat_map(|&j| problem.islands.islands()[j].lines.iter().copied()).collect();
            list_harm(problem, &list, 1)
        })
        .fold(f64::INFINITY, f64::min)
}

pub mod perms {
    /// All permutations of `0..n` (Heap's algorithm).
    pub fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut a: Vec<usize> = (0..n).collect();
        let mut out = vec![a.clone()];
        let mut c = vec![0; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i)
                } else {
                    a.swap(c[i], i)
                }
                out.push(a.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }
}
