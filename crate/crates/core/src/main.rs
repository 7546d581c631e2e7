use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use restoration_sched::algos::{self, Algorithm};
use restoration_sched::harness::bench::{rows_json, write_csv};
use restoration_sched::harness::io::{result_json, write_text};
use restoration_sched::harness::{load_instance, run_bench, GenParams, HarnessError};
use restoration_sched::lp::{solve_relaxation_model, LpError};
use restoration_sched::model::Problem;
use restoration_sched::oracle::{brute_force_optimal, OracleError};
use restoration_sched::seq_opt::WithinIslandOrder;

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "restoration-sched", version, about = "Repair-crew scheduling for damaged distribution feeders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and print a summary.
    Validate { instance: PathBuf },
    /// Print the island partition and precedence tree.
    Islands { instance: PathBuf },
    /// Build a schedule with one of the algorithms.
    Schedule {
        instance: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(Algorithm))]
        alg: Algorithm,
        /// Crew count; defaults to the instance's.
        #[arg(long)]
        crews: Option<usize>,
        /// Write the final LP (base rows and cut pool) to this file.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
        #[arg(long, default_value = "given", value_parser = clap::value_parser!(WithinIslandOrder))]
        within_island_order: WithinIslandOrder,
        /// Write the result JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by enumerating every priority list.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        crews: Option<usize>,
    },
    /// Run all algorithms on seeded random instances and write a CSV.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 8)]
        max_lines: usize,
        #[arg(long, default_value_t = 1)]
        min_lines: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        crews: Vec<usize>,
        #[arg(long, default_value_t = 0.4)]
        switch_probability: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the rows as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Append wall-time columns to the CSV.
        #[arg(long)]
        timing: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure { code, message: message.to_string() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match e {
            HarnessError::Io { .. } | HarnessError::Csv(_) => EXIT_FAILURE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e)
    }
}

impl From<LpError> for Failure {
    fn from(e: LpError) -> Self {
        Failure::new(EXIT_FAILURE, e)
    }
}

fn load(path: &Path, crews: Option<usize>) -> Result<Problem, Failure> {
    let mut instance = load_instance(path)?;
    if let Some(m) = crews {
        instance = instance.with_crews(m).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    }
    Ok(Problem::new(instance))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::new(EXIT_FAILURE, e)),
        _ => Ok(()),
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    emit(&serde_json::to_string_pretty(value).expect("json values serialize"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { instance } => {
            let problem = load(&instance, None)?;
            print_json(&json!({
                "valid": true,
                "nodes": problem.instance.nodes().len(),
                "lines": problem.num_lines(),
                "switches": problem.instance.num_switches(),
                "islands": problem.islands.len(),
                "crews": problem.crews(),
            }))?;
        }
        Command::Islands { instance } => {
            let problem = load(&instance, None)?;
            let inst = &problem.instance;
            let islands: Vec<_> = problem
                .islands
                .islands()
                .iter()
                .map(|i| {
                    json!({
                        "id": i.id,
                        "lines": i.lines.iter().map(|&l| problem.line_id(l)).collect::<Vec<_>>(),
                        "nodes": i.nodes.iter().map(|&n| inst.nodes()[n].id.as_str()).collect::<Vec<_>>(),
                        "weight": i.weight,
                        "processing": i.processing,
                        "parent": problem.precedence.parent(i.id),
                    })
                })
                .collect();
            print_json(&json!({
                "root_island": problem.precedence.root(),
                "islands": islands,
                "precedence": problem.precedence.edges(),
            }))?;
        }
        Command::Schedule { instance, alg, crews, dump_lp, within_island_order, out } => {
            let problem = load(&instance, crews)?;
            let m = problem.crews();
            if let Some(path) = dump_lp {
                let (_, model) = solve_relaxation_model(&problem, m)?;
                write_text(path, &model.to_text())?;
            }
            let result = algos::run(&problem, alg, m, within_island_order)?;
            let text = result_json(&result, &problem);
            match out {
                Some(path) => write_text(path, &(text + "\n"))?,
                None => emit(&text)?,
            }
        }
        Command::Oracle { instance, crews } => {
            let problem = load(&instance, crews)?;
            let result = brute_force_optimal(&problem, problem.crews()).map_err(|e| match e {
                OracleError::TooLarge { .. } => Failure::new(EXIT_INVALID, e),
                other => Failure::new(EXIT_FAILURE, other),
            })?;
            print_json(&json!({
                "crews": result.crews,
                "optimal_harm": result.optimal_harm,
                "optimal_list": result.optimal_list.iter().map(|&l| problem.line_id(l)).collect::<Vec<_>>(),
                "lists_enumerated": result.lists_enumerated,
            }))?;
        }
        Command::Bench { seed, count, max_lines, min_lines, crews, switch_probability, out, json, timing } => {
            let params = GenParams { seed, min_lines, max_lines, switch_probability, crews, ..GenParams::default() };
            params.check()?;
            let rows = match run_bench(&params, count) {
                Ok(rows) => rows,
                Err(violation) => {
                    let replay = out.with_extension("violation.json");
                    let body = serde_json::to_string_pretty(&violation.instance).expect("instances serialize");
                    write_text(&replay, &(body + "\n"))?;
                    return Err(Failure::new(
                        EXIT_VIOLATION,
                        format!("{violation}; instance written to {}", replay.display()),
                    ));
                }
            };
            let file = File::create(&out).map_err(|source| HarnessError::Io { path: out.clone(), source })?;
            write_csv(&rows, BufWriter::new(file), timing)?;
            if let Some(path) = json {
                write_text(path, &(rows_json(&rows) + "\n"))?;
            }
            eprintln!("{} rows written to {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = io::stdout().flush();
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
