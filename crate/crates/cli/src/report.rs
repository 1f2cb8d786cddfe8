//! Deterministic JSON reports.
//!
//! Keys are sorted (serde_json's default map is ordered) and floats are
//! rounded to six significant digits unless raw output is requested.

use serde_json::{json, Map, Number, Value};

use crate::error::AppError;
use crate::ops::{execute, Command, Outcome};
use crate::params::Params;
use cbe_core::exec::Exec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Report of one command: the result fields plus `command`, `version`,
/// `inputs` and `seed`.
pub fn build(cmd: Command, params: &Params, outcome: &Outcome) -> Value {
    let mut m: Map<String, Value> = outcome.result.clone();
    m.insert("command".into(), json!(cmd.name()));
    m.insert("version".into(), json!(VERSION));
    m.insert("inputs".into(), serde_json::to_value(params).unwrap_or(Value::Null));
    let seed = match cmd {
        Command::Simulate => Some(params.grid().seed),
        _ => params.seed,
    };
    m.insert("seed".into(), json!(seed));
    Value::Object(m)
}

/// Runs a command and returns the report with its CSV, if any.
pub fn run(cmd: Command, params: &Params, exec: Exec) -> Result<(Value, Option<String>), AppError> {
    let outcome = execute(cmd, params, exec)?;
    Ok((build(cmd, params, &outcome), outcome.csv))
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            Number::from_f64(round_sig(x, 6)).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Value, raw: bool) -> String {
    let v = if raw { report.clone() } else { round_value(report.clone()) };
    let mut s = serde_json::to_string_pretty(&v).unwrap_or_else(|_| "null".into());
    s.push('\n');
    s
}

pub fn render_error(e: &AppError) -> String {
    let mut s = e.to_json().to_string();
    s.push('\n');
    s
}
