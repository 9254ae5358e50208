use serde::Serialize;
use serde_json::Value;

use crate::{Command, Global, Output};

#[derive(Serialize)]
struct Config<'a> {
    #[serde(flatten)]
    global: &'a Global,
    command: &'a Command,
}

#[derive(Serialize)]
struct Envelope<'a> {
    version: &'static str,
    seed: u64,
    config: Config<'a>,
    result: &'a Value,
}

/// The report for `result`, with the reproducibility envelope for JSON output.
pub fn render(global: &Global, command: &Command, result: &Value, native_csv: Option<String>) -> String {
    match global.output {
        Output::Json => {
            let env = Envelope {
                version: env!("CARGO_PKG_VERSION"),
                seed: global.seed,
                config: Config { global, command },
                result,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
            s.push('\n');
            s
        }
        Output::Csv => native_csv.unwrap_or_else(|| flatten_csv(global, result)),
    }
}

/// `path,value` rows for every scalar leaf, preceded by version and seed rows.
fn flatten_csv(global: &Global, result: &Value) -> String {
    let mut rows = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("seed".to_string(), global.seed.to_string()),
    ];
    flatten("", result, &mut rows);
    let mut s = String::from("field,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{k},{}\n", quote(&v)));
    }
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
