use std::fs;
use std::path::Path;

use serde_json::error::Category;

use super::HarnessError;
use crate::algos::AlgoResult;
use crate::model::{validate, NetworkInstance, Problem, RawInstance};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Schema errors name the offending field when serde reports one, e.g.
/// "unknown field `voltage`" becomes `Schema("voltage")`.
fn classify(err: serde_json::Error) -> HarnessError {
    match err.classify() {
        Category::Data => {
            let msg = err.to_string();
            let field = msg.split('`').nth(1).map(str::to_string);
            HarnessError::Schema(field.unwrap_or(msg))
        }
        _ => HarnessError::Parse { line: err.line(), column: err.column(), message: err.to_string() },
    }
}

pub fn parse_raw(text: &str) -> Result<RawInstance, HarnessError> {
    serde_json::from_str(text).map_err(classify)
}

pub fn parse_instance(text: &str) -> Result<NetworkInstance, HarnessError> {
    Ok(validate(&parse_raw(text)?)?)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<NetworkInstance, HarnessError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_instance(&text)
}

pub fn instance_json(instance: &NetworkInstance) -> String {
    serde_json::to_string_pretty(&instance.to_raw()).expect("instances always serialize")
}

pub fn save_instance(path: impl AsRef<Path>, instance: &NetworkInstance) -> Result<(), HarnessError> {
    let path = path.as_ref();
    fs::write(path, instance_json(instance) + "\n").map_err(io_err(path))
}

pub fn result_json(result: &AlgoResult, problem: &Problem) -> String {
    serde_json::to_string_pretty(&result.output(problem)).expect("results always serialize")
}

pub fn save_result(path: impl AsRef<Path>, result: &AlgoResult, problem: &Problem) -> Result<(), HarnessError> {
    let path = path.as_ref();
    fs::write(path, result_json(result, problem) + "\n").map_err(io_err(path))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<(), HarnessError> {
    let path = path.as_ref();
    fs::write(path, text).map_err(io_err(path))
}
