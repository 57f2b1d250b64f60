//! Report assembly and rendering.
//!
//! Every command produces one [`Report`]; the machine format is a single
//! JSON document with alphabetically sorted keys, so identical inputs
//! yield byte-identical output.

use fibercalc_core::Rat;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub name: Option<String>,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
    pub body: Value,
}

impl Report {
    pub fn new(command: &str, name: Option<&str>) -> Self {
        Report {
            command: command.to_string(),
            name: name.map(str::to_string),
            violations: Vec::new(),
            warnings: Vec::new(),
            body: Value::Object(Map::new()),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        if let Value::Object(map) = &mut self.body {
            map.insert(key.to_string(), value);
        }
    }

    pub fn violation(&mut self, message: impl Into<String>) {
        self.violations.push(message.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn exit_code(&self) -> u8 {
        if self.ok() {
            0
        } else {
            1
        }
    }

    /// Compare a computed value against a golden one, recording a
    /// violation on mismatch.
    pub fn expect_eq<T: PartialEq + std::fmt::Display>(
        &mut self,
        what: &str,
        got: &T,
        want: &T,
    ) {
        if got != want {
            self.violation(format!("{what}: computed {got}, golden file says {want}"));
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let doc = json!({
                    "command": self.command,
                    "name": self.name,
                    "status": if self.ok() { "ok" } else { "violation" },
                    "violations": self.violations,
                    "warnings": self.warnings,
                    "data": self.body,
                });
                let mut out = serde_json::to_string_pretty(&doc)
                    .expect("report serialization cannot fail");
                out.push('\n');
                out
            }
            Format::Text => {
                let mut out = String::new();
                match &self.name {
                    Some(name) => out.push_str(&format!("{} — {}\n", self.command, name)),
                    None => out.push_str(&format!("{}\n", self.command)),
                }
                out.push_str(&format!(
                    "status: {}\n",
                    if self.ok() { "ok" } else { "violation" }
                ));
                for v in &self.violations {
                    out.push_str(&format!("violation: {v}\n"));
                }
                for w in &self.warnings {
                    out.push_str(&format!("warning: {w}\n"));
                }
                render_value(&self.body, 0, &mut out);
                out
            }
        }
    }
}

fn render_value(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) if !is_empty(val) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render_value(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{key}: {}\n", scalar(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) if !is_empty(item) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_value(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar(item))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(value))),
    }
}

fn is_empty(value: &Value) -> bool {
    match value {
        Value::Object(map) => map.is_empty(),
        Value::Array(items) => items.is_empty(),
        _ => false,
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(_) => "[]".to_string(),
        Value::Object(_) => "{}".to_string(),
        other => other.to_string(),
    }
}

/// Exact rational as a JSON string value.
pub fn rv(r: &Rat) -> Value {
    Value::String(r.to_string())
}

/// Exact rational plus its decimal approximation, as a two-field object.
pub fn rv_approx(r: &Rat) -> Value {
    json!({
        "exact": r.to_string(),
        "approx": r.to_f64().unwrap_or(f64::NAN),
    })
}
