//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use restoration_sched::algos::{convert_single_to_m, lp_list_schedule};
use restoration_sched::harness::{generate_indexed, GenParams};
use restoration_sched::lp::separate;
use restoration_sched::model::Problem;
use restoration_sched::oracle::{brute_force_optimal, exhaustive_separation};
use restoration_sched::seq_opt::{optimal_single_crew_harm, WithinIslandOrder};

use common::load_fixture;

const SEED_SEQUENCING: u64 = 2024;
const SEED_GUARANTEES: u64 = 7;
const SEED_SEPARATION: u64 = 31;

struct Outcome {
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), summary: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Independent list scheduler: returns (start, completion) per line.
fn list_times(list: &[usize], crews: usize, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut free = vec![0.0f64; crews];
    let mut start = vec![0.0; p.len()];
    let mut done = vec![0.0; p.len()];
    for &j in list {
        let mut c = 0;
        for k in 1..crews {
            if free[k] < free[c] {
                c = k;
            }
        }
        start[j] = free[c];
        done[j] = free[c] + p[j];
        free[c] = done[j];
    }
    (start, done)
}

/// `E_J` as the latest completion among lines in `J` and every island above it.
fn energization(problem: &Problem, completion: &[f64]) -> Vec<f64> {
    let islands = problem.islands.islands();
    (0..islands.len())
        .map(|j| {
            let mut e: f64 = 0.0;
            let mut at = Some(j);
            while let Some(i) = at {
                e = islands[i].lines.iter().map(|&l| completion[l]).fold(e, f64::max);
                at = problem.precedence.parent(i);
            }
            e
        })
        .collect()
}

fn harm_of(problem: &Problem, e: &[f64]) -> f64 {
    problem.islands.islands().iter().map(|i| i.weight * e[i.id]).sum()
}

/// Unlimited crews: every line finishes at its own repair time.
fn infinite_crew(problem: &Problem) -> (Vec<f64>, f64) {
    let e = energization(problem, &problem.repair_times());
    let h = harm_of(problem, &e);
    (e, h)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let t = Instant::now();
    let cases = [("two_island.json", [32.0, 22.0, 22.0, 22.0, 22.0]), ("fork.json", [31.0, 18.0, 21.0, 21.0, 21.0])];
    for (name, expected) in cases {
        let problem = load_fixture(name);
        let got = [
            optimal_single_crew_harm(&problem).harm,
            infinite_crew(&problem).1,
            brute_force_optimal(&problem, 2).unwrap().optimal_harm,
            lp_list_schedule(&problem, 2).unwrap().harm(),
            convert_single_to_m(&problem, 2, WithinIslandOrder::Given).harm(),
        ];
        let single_brute = brute_force_optimal(&problem, 1).unwrap().optimal_harm;
        out.check(got == expected && single_brute == expected[0], || {
            format!("{name}: got [H1*, Hinf*, H2*, Alg1, Alg2] = {got:?}, single brute force {single_brute}")
        });
    }
    let elapsed = t.elapsed();
    out.check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"));
    out.summary = format!("fixture values exact in {:.0?}", elapsed);
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let t = Instant::now();
    let params = GenParams {
        seed: SEED_SEQUENCING,
        min_lines: 1,
        max_lines: 9,
        switch_probability: 0.5,
        ..GenParams::default()
    };
    let mut tested = 0;
    let mut index = 0;
    while tested < 200 {
        let problem = Problem::new(generate_indexed(&params, index));
        index += 1;
        if problem.islands.len() > 7 {
            continue;
        }
        tested += 1;
        let fast = optimal_single_crew_harm(&problem).harm;
        let exact = brute_force_optimal(&problem, 1).unwrap().optimal_harm;
        out.check(fast == exact, || format!("instance {}: sequencing {fast} vs brute force {exact}", index - 1));
    }
    let elapsed = t.elapsed();
    out.check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"));
    out.summary = format!("{tested} instances, one crew, sequencing = brute force in {:.1?}", elapsed);
    out
}

/// Criteria 3 to 7a share one batch of 500 instances, each run at m = 2 and 3.
struct Batch {
    c3: Outcome,
    c4: Outcome,
    c5: Outcome,
    c6: Outcome,
    c7: Outcome,
    elapsed: Duration,
    pairs: usize,
    worst: (f64, f64),
}

fn batch() -> Batch {
    let t = Instant::now();
    let mut b = Batch {
        c3: Outcome::new(),
        c4: Outcome::new(),
        c5: Outcome::new(),
        c6: Outcome::new(),
        c7: Outcome::new(),
        elapsed: Duration::ZERO,
        pairs: 0,
        worst: (1.0, 1.0),
    };
    let params = GenParams { seed: SEED_GUARANTEES, min_lines: 1, max_lines: 8, ..GenParams::default() };
    for id in 0..500u64 {
        let problem = Problem::new(generate_indexed(&params, id));
        let p = problem.repair_times();
        let single = optimal_single_crew_harm(&problem);
        let (e_inf, h_inf) = infinite_crew(&problem);
        for m in [2usize, 3] {
            b.pairs += 1;
            let mf = m as f64;
            let tag = |s: &str| format!("instance {id}, m={m}: {s}");
            let opt = brute_force_optimal(&problem, m).unwrap().optimal_harm;

            let alg1 = lp_list_schedule(&problem, m).unwrap();
            let lp = alg1.lp_solution().unwrap();
            let (s1, c1) = list_times(&alg1.priority, m, &p);
            let h1 = harm_of(&problem, &energization(&problem, &c1));

            let alg2 = convert_single_to_m(&problem, m, WithinIslandOrder::Given);
            let (_, c2) = list_times(&alg2.priority, m, &p);
            let e2 = energization(&problem, &c2);
            let h2 = harm_of(&problem, &e2);

            b.c3.check(h1 == alg1.harm() && h2 == alg2.harm(), || tag("library harm differs from recomputation"));
            b.c3.check(h1 <= 2.0 * opt, || tag(&format!("Alg1 {h1} > 2 * {opt}")));
            b.c3.check(h2 <= (2.0 - 1.0 / mf) * opt + 1e-9, || tag(&format!("Alg2 {h2} > (2 - 1/m) * {opt}")));
            if opt > 0.0 {
                b.worst.0 = b.worst.0.max(h1 / opt);
                b.worst.1 = b.worst.1.max(h2 / opt);
            }

            let mut earlier = 0.0;
            for &j in &alg1.priority {
                b.c4.check(s1[j] <= earlier / mf + 1e-9, || {
                    tag(&format!("line {j} starts at {} > {}", s1[j], earlier / mf))
                });
                b.c4.check(c1[j] <= 2.0 * lp.completion[j] + 1e-6, || {
                    tag(&format!("line {j} completes at {} > 2 * {}", c1[j], lp.completion[j]))
                });
                earlier += p[j];
            }

            for j in 0..problem.islands.len() {
                let bound = single.energization[j] / mf + (mf - 1.0) / mf * e_inf[j];
                b.c5.check(e2[j] <= bound + 1e-9, || tag(&format!("island {j}: E = {} > {bound}", e2[j])));
            }

            b.c6.check(opt >= single.harm / mf, || tag(&format!("H* {opt} < H1*/m {}", single.harm / mf)));
            b.c6.check(opt >= h_inf, || tag(&format!("H* {opt} < Hinf* {h_inf}")));

            b.c7.check(lp.objective <= opt + 1e-6 * opt.max(1.0), || tag(&format!("LP {} > H* {opt}", lp.objective)));
        }
    }
    b.elapsed = t.elapsed();
    b.c3.check(b.elapsed < Duration::from_secs(300), || format!("took {:?}", b.elapsed));
    b
}

/// Random (C, p, m) with C spread from well below to well above feasibility,
/// so both verdicts occur.
fn separation_agreement() -> (Outcome, usize, usize) {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_SEPARATION);
    let (mut violated, mut clean) = (0, 0);
    for case in 0..200 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(1..=4);
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..10.0)).collect();
        let total: f64 = p.iter().sum();
        let spread = rng.gen_range(0.1..1.5) * total;
        let c: Vec<f64> = p.iter().map(|&pj| pj + rng.gen_range(0.0..spread)).collect();

        let exhaustive = exhaustive_separation(&c, &p, m).unwrap();
        let tol = 1e-9;
        match separate(&c, &p, m, tol) {
            Some((_, v)) => {
                violated += 1;
                out.check(exhaustive.violation > tol, || format!("case {case}: prefix found {v}, exhaustive is clean"));
                out.check((v - exhaustive.violation).abs() <= 1e-9, || {
                    format!("case {case}: prefix {v} vs exhaustive {}", exhaustive.violation)
                });
            }
            None => {
                clean += 1;
                out.check(exhaustive.violation <= tol, || {
                    format!("case {case}: prefix clean, exhaustive violation {}", exhaustive.violation)
                });
            }
        }
    }
    (out, violated, clean)
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let problem = load_fixture("graham_m3.json");
    let omega: f64 = problem.islands.weights().iter().sum();
    let opt = brute_force_optimal(&problem, 3).unwrap().optimal_harm;
    let alg2 = convert_single_to_m(&problem, 3, WithinIslandOrder::AdversarialLongestLast).harm();
    out.check(problem.islands.len() == 1, || format!("{} islands", problem.islands.len()));
    out.check(opt == 3.0 * omega, || format!("optimum {opt} != 3 * {omega}"));
    out.check(3.0 * alg2 == 5.0 * opt, || format!("ratio {alg2}/{opt} != 5/3"));
    out.summary = format!("adversarial Alg2 {alg2} / optimum {opt} = 5/3");
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new();
    let problem = load_fixture("ieee123_style.json");
    let k = problem.islands.len();
    let g = &problem.precedence;
    let mut indegree = vec![0; k];
    for &(_, to) in g.edges() {
        indegree[to] += 1;
    }
    out.check(problem.instance.nodes().len() == 123, || format!("{} nodes", problem.instance.nodes().len()));
    out.check(problem.instance.num_switches() == 6, || format!("{} switches", problem.instance.num_switches()));
    out.check(k == 7, || format!("{k} islands"));
    out.check(g.edges().len() == 6 && g.topological_order().len() == 7, || "precedence is not a 7-vertex tree".into());
    out.check(indegree.iter().filter(|&&d| d == 0).count() == 1 && indegree.iter().all(|&d| d <= 1), || {
        format!("in-degrees {indegree:?}")
    });
    out.summary = format!("{k} islands, {} precedence edges", g.edges().len());
    out
}

fn report(number: u32, title: &str, out: &Outcome) -> bool {
    let ok = out.failures.is_empty();
    let detail =
        if ok { out.summary.clone() } else { format!("{} failure(s), first: {}", out.failures.len(), out.failures[0]) };
    println!("criterion {number} [{}] {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn main() -> ExitCode {
    let mut all = true;
    all &= report(1, "fixture exactness", &criterion_1());
    all &= report(2, "single-crew sequencing equals enumeration", &criterion_2());

    let mut b = batch();
    let pairs = b.pairs;
    b.c3.summary = format!(
        "{pairs} instance/crew pairs in {:.1?}; worst ratios Alg1 {:.4}, Alg2 {:.4}",
        b.elapsed, b.worst.0, b.worst.1
    );
    b.c4.summary = format!("start and 2x LP completion bounds hold on {pairs} pairs");
    b.c5.summary = format!("per-island mixed bound holds on {pairs} pairs");
    b.c6.summary = format!("H* >= H1*/m and H* >= Hinf* on {pairs} pairs");
    all &= report(3, "approximation guarantees", &b.c3);
    all &= report(4, "per-job list and LP bounds", &b.c4);
    all &= report(5, "per-island bound for Alg2", &b.c5);
    all &= report(6, "optimum lower bounds", &b.c6);

    let (sep, violated, clean) = separation_agreement();
    let mut c7 = b.c7;
    c7.failures.extend(sep.failures);
    c7.summary =
        format!("LP <= H* on {pairs} pairs; separation agrees on 200 vectors ({violated} violated, {clean} clean)");
    all &= report(7, "LP soundness and exact separation", &c7);

    all &= report(8, "Graham tightness", &criterion_8());
    all &= report(9, "feeder partition", &criterion_9());

    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
