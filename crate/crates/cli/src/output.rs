//! Report envelopes. Every float goes out with 15 significant digits and
//! object keys are sorted, so equal runs give byte-identical files.

use std::path::Path;

use fourbody::report::sig15;
use serde::Serialize;
use serde_json::{Number, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds every non-integer number in `value` to 15 significant digits.
pub fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(sig15(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: Value,
    input: Value,
    result: Value,
}

pub fn json_report<I: Serialize, R: Serialize>(command: &str, config: &RunConfig, input: &I, result: &R) -> String {
    let envelope = Envelope {
        tool: "fourbody",
        version: VERSION,
        command,
        config: to_value(config),
        input: to_value(input),
        result: to_value(result),
    };
    let mut text = serde_json::to_string_pretty(&round_floats(to_value(&envelope))).expect("report serializes");
    text.push('\n');
    text
}

/// CSV table preceded by `#` lines naming the tool, command, config and
/// input.
pub fn csv_report<I: Serialize>(command: &str, config: &RunConfig, input: &I, table: &str) -> String {
    let compact = |v: Value| serde_json::to_string(&round_floats(v)).expect("json serializes");
    format!(
        "# fourbody {VERSION} {command}\n# config {}\n# input {}\n{table}",
        compact(to_value(config)),
        compact(to_value(input))
    )
}

/// Writes to `out`, or stdout when no path is configured.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "stdout".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_rounded_integers_kept() {
        let v = round_floats(json!({"a": 0.1 + 0.2, "b": [1, 2.0000000000000004], "c": "x", "n": 12345678901234567u64}));
        assert_eq!(v, json!({"a": 0.3, "b": [1, 2.0], "c": "x", "n": 12345678901234567u64}));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = RunConfig::default();
        let a = json_report("t", &cfg, &json!({"m": 1.5}), &json!({"z": 1.0 / 3.0, "a": 2}));
        let b = json_report("t", &cfg, &json!({"m": 1.5}), &json!({"a": 2, "z": 1.0 / 3.0}));
        assert_eq!(a, b);
        assert!(a.contains("0.333333333333333"));
        assert!(!a.contains("0.3333333333333333"));
    }
}
