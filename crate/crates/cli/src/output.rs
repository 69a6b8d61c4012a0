use serde_json::{json, Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

pub fn envelope(command: &str, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "result": result,
    })
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut out = String::new();
            if let Some(cmd) = report.get("command").and_then(Value::as_str) {
                out.push_str(cmd);
                out.push('\n');
            }
            table(report.get("result").unwrap_or(report), &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            format!("[{}]", items.join(", "))
        }
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>, tables: &mut Vec<(String, Vec<Value>)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows, tables);
            }
        }
        Value::Array(xs) if !xs.is_empty() && xs.iter().all(Value::is_object) => {
            tables.push((prefix.to_string(), xs.clone()));
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn table(v: &Value, out: &mut String) {
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    match v {
        Value::Array(xs) if xs.iter().all(Value::is_object) => tables.push((String::new(), xs.clone())),
        _ => flatten("", v, &mut rows, &mut tables),
    }
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, x) in &rows {
        out.push_str(&format!("  {k:<width$}  {x}\n"));
    }
    for (name, items) in tables {
        if !name.is_empty() {
            out.push_str(&format!("{name}:\n"));
        }
        grid(&items, out);
    }
}

fn grid(items: &[Value], out: &mut String) {
    let mut columns: Vec<String> = Vec::new();
    let flat: Vec<Map<String, Value>> = items
        .iter()
        .map(|item| {
            let mut rows = Vec::new();
            let mut nested = Vec::new();
            flatten("", item, &mut rows, &mut nested);
            rows.into_iter().map(|(k, s)| (k, Value::String(s))).collect()
        })
        .collect();
    for m in &flat {
        for k in m.keys() {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let cell = |m: &Map<String, Value>, c: &str| m.get(c).and_then(Value::as_str).unwrap_or("-").to_string();
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| flat.iter().map(|m| cell(m, c).chars().count()).max().unwrap_or(0).max(c.chars().count()))
        .collect();
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("  {}\n", padded.join("  ").trim_end())
    };
    out.push_str(&line(columns.clone()));
    for m in &flat {
        out.push_str(&line(columns.iter().map(|c| cell(m, c)).collect()));
    }
}
