//! Instance files, random instances and batch benchmarking.

pub mod bench;
pub mod generate;
pub mod io;

use std::path::PathBuf;

use thiserror::Error;

use crate::model::ModelError;

pub use bench::{run_bench, BenchRow, BenchViolation};
pub use generate::{generate_indexed, generate_random, GenParams};
pub use io::{load_instance, parse_instance, save_instance, save_result};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
