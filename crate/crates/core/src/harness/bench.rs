//! Batch runs over random instances with every guarantee checked per row.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::generate::{generate_indexed, GenParams};
use super::HarnessError;
use crate::algos::{convert_single_to_m, lp_list_schedule};
use crate::model::{Problem, RawInstance};
use crate::oracle::{brute_force_optimal, MAX_BRUTE_FORCE_LINES};
use crate::schedule::infinite_crew_energization;
use crate::seq_opt::{optimal_single_crew_harm, WithinIslandOrder};

/// Slack for comparisons that involve LP values.
const LP_TOL: f64 = 1e-6;
/// Slack for comparisons between exactly computed harms.
const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: u64,
    pub lines: usize,
    pub islands: usize,
    pub crews: usize,
    pub h_lp: f64,
    pub h_lp_list: f64,
    pub h_convert: f64,
    pub h_single: f64,
    pub h_infinite: f64,
    pub h_opt: Option<f64>,
    pub ratio_lp_list: Option<f64>,
    pub ratio_convert: Option<f64>,
    pub lp_cuts: usize,
    pub time_lp_list_ms: f64,
    pub time_convert_ms: f64,
    pub time_oracle_ms: Option<f64>,
}

const COLUMNS: [&str; 13] = [
    "instance",
    "lines",
    "islands",
    "crews",
    "h_lp",
    "h_lp_list",
    "h_convert",
    "h_single",
    "h_infinite",
    "h_opt",
    "ratio_lp_list",
    "ratio_convert",
    "lp_cuts",
];
const TIMING_COLUMNS: [&str; 3] = ["time_lp_list_ms", "time_convert_ms", "time_oracle_ms"];

/// A failed guarantee, with the instance needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchViolation {
    pub instance_id: u64,
    pub crews: usize,
    pub message: String,
    pub instance: RawInstance,
}

impl std::fmt::Display for BenchViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "instance {} with {} crews: {}", self.instance_id, self.crews, self.message)
    }
}

fn ratio(value: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        if value == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        value / optimum
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs every algorithm on one instance and checks all guarantees. The
/// oracle column is filled only when the instance is small enough.
pub fn bench_instance(id: u64, problem: &Problem, crews: usize) -> Result<BenchRow, BenchViolation> {
    let fail =
        |message: String| BenchViolation { instance_id: id, crews, message, instance: problem.instance.to_raw() };
    let m = crews as f64;
    let p = problem.repair_times();

    let t = Instant::now();
    let alg1 = lp_list_schedule(problem, crews).map_err(|e| fail(format!("LP failed: {e}")))?;
    let time_lp_list_ms = ms(t);
    let lp = alg1.lp_solution().expect("lp-list keeps its LP solution");

    let t = Instant::now();
    let alg2 = convert_single_to_m(problem, crews, WithinIslandOrder::Given);
    let time_convert_ms = ms(t);

    let single = optimal_single_crew_harm(problem);
    let (e_inf, h_inf) = infinite_crew_energization(&problem.islands, &problem.precedence, &p);

    // list start bound and per-job LP doubling
    let starts = alg1.schedule.start_times();
    let completions = alg1.schedule.completion_times();
    let mut before = 0.0;
    for &j in &alg1.priority {
        if starts[j] > before / m + EXACT_TOL * before.max(1.0) {
            return Err(fail(format!("lp-list start of line {} exceeds its list bound", problem.line_id(j))));
        }
        if completions[j] > 2.0 * lp.completion[j] + LP_TOL {
            return Err(fail(format!("lp-list completion of line {} exceeds twice its LP value", problem.line_id(j))));
        }
        before += p[j];
    }
    for j in 0..problem.islands.len() {
        if alg1.energization[j] > 2.0 * lp.energization[j] + LP_TOL {
            return Err(fail(format!("lp-list energization of island {j} exceeds twice its LP value")));
        }
        let bound = single.energization[j] / m + (m - 1.0) / m * e_inf[j];
        if alg2.energization[j] > bound + EXACT_TOL * bound.max(1.0) {
            return Err(fail(format!("convert energization of island {j} exceeds its mixed bound {bound}")));
        }
    }
    if alg1.harm() > 2.0 * lp.objective + LP_TOL * lp.objective.max(1.0) {
        return Err(fail("lp-list harm exceeds twice the LP bound".into()));
    }

    let (h_opt, time_oracle_ms) = if problem.num_lines() <= MAX_BRUTE_FORCE_LINES {
        let t = Instant::now();
        let opt = brute_force_optimal(problem, crews).map_err(|e| fail(e.to_string()))?.optimal_harm;
        (Some(opt), Some(ms(t)))
    } else {
        (None, None)
    };
    if let Some(opt) = h_opt {
        let tol = EXACT_TOL * opt.max(1.0);
        let checks = [
            (h_inf <= opt + tol, "infinite-crew optimum exceeds the m-crew optimum"),
            (single.harm / m <= opt + tol, "single-crew optimum over m exceeds the m-crew optimum"),
            (lp.objective <= opt + LP_TOL * opt.max(1.0), "LP bound exceeds the m-crew optimum"),
            (opt <= alg1.harm() + tol && opt <= alg2.harm() + tol, "an algorithm beat the optimum"),
            (alg1.harm() <= 2.0 * opt + tol, "lp-list exceeds twice the optimum"),
            (alg2.harm() <= (2.0 - 1.0 / m) * opt + tol, "convert exceeds (2 - 1/m) times the optimum"),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(fail(msg.to_string()));
        }
    }

    Ok(BenchRow {
        instance: id,
        lines: problem.num_lines(),
        islands: problem.islands.len(),
        crews,
        h_lp: lp.objective,
        h_lp_list: alg1.harm(),
        h_convert: alg2.harm(),
        h_single: single.harm,
        h_infinite: h_inf,
        h_opt,
        ratio_lp_list: h_opt.map(|o| ratio(alg1.harm(), o)),
        ratio_convert: h_opt.map(|o| ratio(alg2.harm(), o)),
        lp_cuts: lp.cuts_added,
        time_lp_list_ms,
        time_convert_ms,
        time_oracle_ms,
    })
}

/// `count` generated instances, each run for every crew count in `params`.
/// Rows come back ordered by instance id, then crew count. The first failing
/// instance (in that order) aborts the run.
pub fn run_bench(params: &GenParams, count: u64) -> Result<Vec<BenchRow>, Box<BenchViolation>> {
    let results: Vec<Result<Vec<BenchRow>, BenchViolation>> = (0..count)
        .into_par_iter()
        .map(|id| {
            let problem = Problem::new(generate_indexed(params, id));
            params.crews.iter().map(|&m| bench_instance(id, &problem, m)).collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r.map_err(Box::new)?);
    }
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with a fixed header; timing columns are appended only on request.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W, include_timing: bool) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if include_timing {
        header.extend(TIMING_COLUMNS);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.instance.to_string(),
            r.lines.to_string(),
            r.islands.to_string(),
            r.crews.to_string(),
            r.h_lp.to_string(),
            r.h_lp_list.to_string(),
            r.h_convert.to_string(),
            r.h_single.to_string(),
            r.h_infinite.to_string(),
            fmt_opt(r.h_opt),
            fmt_opt(r.ratio_lp_list),
            fmt_opt(r.ratio_convert),
            r.lp_cuts.to_string(),
        ];
        if include_timing {
            rec.extend([r.time_lp_list_ms.to_string(), r.time_convert_ms.to_string(), fmt_opt(r.time_oracle_ms)]);
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

pub fn rows_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::model::{RawLine, RawNode};

    fn small_params(seed: u64) -> GenParams {
        GenParams { seed, max_lines: 6, ..GenParams::default() }
    }

    #[test]
    fn csv_is_deterministic_without_timing() {
        let render = || {
            let rows = run_bench(&small_params(7), 12).unwrap();
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf, false).unwrap();
            buf
        };
        let a = render();
        assert_eq!(a, render());
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("instance,lines,islands,crews,h_lp,"));
        assert_eq!(text.lines().count(), 1 + 12 * 2);
    }

    #[test]
    fn rows_keep_their_ordering_and_bounds() {
        let rows = run_bench(&small_params(3), 10).unwrap();
        for (k, r) in rows.iter().enumerate() {
            assert_eq!(r.instance, (k / 2) as u64);
            let opt = r.h_opt.unwrap();
            assert!(r.h_infinite <= opt && opt <= r.h_lp_list && opt <= r.h_convert);
            assert!(r.h_lp <= opt + 1e-6);
        }
    }

    #[test]
    fn undamaged_network_has_zero_harm() {
        let raw = RawInstance {
            root: "r".into(),
            crews: 2,
            nodes: vec![
                RawNode { id: "r".into(), weight: 0.0 },
                RawNode { id: "a".into(), weight: 3.0 },
                RawNode { id: "b".into(), weight: 2.0 },
            ],
            lines: vec![
                RawLine { id: "x".into(), from: "r".into(), to: "a".into(), repair_time: 0.0, is_switch: false },
                RawLine { id: "y".into(), from: "a".into(), to: "b".into(), repair_time: 0.0, is_switch: true },
            ],
        };
        let problem = Problem::new(validate(&raw).unwrap());
        let row = bench_instance(0, &problem, 2).unwrap();
        assert_eq!((row.h_lp, row.h_lp_list, row.h_convert, row.h_opt), (0.0, 0.0, 0.0, Some(0.0)));
        assert_eq!(row.ratio_convert, Some(1.0));
    }
}
