//! Report records and the JSON / CSV emitters shared by every subcommand.
//!
//! Records are ordered key/value lists rather than maps so that output field
//! order is stable across runs and across targets, which the sweep harness
//! relies on for byte-identical reports.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    U(u64),
    I(i64),
    F(f64),
    S(String),
    B(bool),
    Null,
    Array(Vec<Value>),
    Object(Record),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Record { fields: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.push((key.to_string(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

/// Floats print with 16 digits after the point in scientific notation, enough
/// to round-trip any f64. Non-finite values have no JSON representation and
/// become null.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        "null".to_string()
    }
}

fn escape_json(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn value_json(v: &Value, out: &mut String) {
    match v {
        Value::U(n) => {
            let _ = write!(out, "{n}");
        }
        Value::I(n) => {
            let _ = write!(out, "{n}");
        }
        Value::F(x) => out.push_str(&fmt_float(*x)),
        Value::S(s) => escape_json(s, out),
        Value::B(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Null => out.push_str("null"),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                value_json(item, out);
            }
            out.push(']');
        }
        Value::Object(rec) => record_json(rec, out),
    }
}

fn record_json(rec: &Record, out: &mut String) {
    out.push('{');
    for (i, (k, v)) in rec.fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        escape_json(k, out);
        out.push(':');
        value_json(v, out);
    }
    out.push('}');
}

pub fn to_json(rec: &Record) -> String {
    let mut out = String::new();
    record_json(rec, &mut out);
    out
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::U(n) => n.to_string(),
        Value::I(n) => n.to_string(),
        Value::F(x) => fmt_float(*x),
        Value::S(s) => s.clone(),
        Value::B(b) => b.to_string(),
        Value::Null => String::new(),
        // Nested structure has no natural CSV shape; embed it as compact JSON.
        Value::Array(_) | Value::Object(_) => {
            let mut s = String::new();
            value_json(v, &mut s);
            s
        }
    };
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// One header row from the first record, then one row per record. Rows use
/// the header's key order; missing keys produce empty cells.
pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::new();
    let Some(first) = records.first() else {
        return out;
    };
    let header: Vec<&str> = first.fields.iter().map(|(k, _)| k.as_str()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for rec in records {
        let row: Vec<String> = header
            .iter()
            .map(|k| rec.get(k).map(|v| csv_cell(v)).unwrap_or_default())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
