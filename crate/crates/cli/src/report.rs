//! Report documents: a flat key -> value map plus a `checks` array, written
//! as JSON with every float at 17 significant digits so the document
//! round-trips doubles exactly and diffs cleanly in CI.

use std::fmt::Write as _;

use serde_json::Value;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Pass when value <= threshold (NaN never passes).
    pub fn le(name: impl Into<String>, value: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        }
    }
}

/// Ordered flat document; keys serialize in insertion order, `checks` last.
#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, Value)>,
    checks: Vec<Check>,
}

impl Report {
    pub fn new(task: &str, source: &str, dim: usize, samples: usize, seed: u64) -> Report {
        let mut r = Report::default();
        r.push_str("task", task);
        r.push_str("source", source);
        r.push_int("dim", dim as i64);
        r.push_int("samples", samples as i64);
        r.push_int("seed", seed as i64);
        r
    }

    pub fn push_str(&mut self, key: &str, value: &str) {
        self.entries
            .push((key.to_string(), Value::String(value.to_string())));
    }

    pub fn push_int(&mut self, key: &str, value: i64) {
        self.entries
            .push((key.to_string(), Value::Number(value.into())));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.entries.push((
            key.to_string(),
            serde_json::Number::from_f64(value)
                .map(Value::Number)
                .unwrap_or(Value::Null),
        ));
    }

    pub fn push_array(&mut self, key: &str, values: &[f64]) {
        let arr = values
            .iter()
            .map(|&v| {
                serde_json::Number::from_f64(v)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            })
            .collect();
        self.entries.push((key.to_string(), Value::Array(arr)));
    }

    pub fn push_value(&mut self, key: &str, value: Value) {
        self.entries.push((key.to_string(), value));
    }

    pub fn add_check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// Render with insertion-ordered keys and 17-significant-digit floats.
    pub fn to_json(&self) -> String {
        let mut buf = String::from("{\n");
        for (key, value) in &self.entries {
            write_str(&mut buf, key);
            buf.push_str(": ");
            write_value(&mut buf, value);
            buf.push_str(",\n");
        }
        buf.push_str("\"checks\": [");
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                buf.push(',');
            }
            buf.push_str("\n  {\"name\": ");
            write_str(&mut buf, &c.name);
            buf.push_str(", \"value\": ");
            write_f64(&mut buf, c.value);
            buf.push_str(", \"threshold\": ");
            write_f64(&mut buf, c.threshold);
            buf.push_str(", \"pass\": ");
            buf.push_str(if c.pass { "true" } else { "false" });
            buf.push('}');
        }
        if !self.checks.is_empty() {
            buf.push('\n');
        }
        buf.push_str("]\n}\n");
        buf
    }
}

fn write_str(buf: &mut String, s: &str) {
    buf.push('"');
    for ch in s.chars() {
        match ch {
            '"' => buf.push_str("\\\""),
            '\\' => buf.push_str("\\\\"),
            '\n' => buf.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(buf, "\\u{:04x}", c as u32);
            }
            c => buf.push(c),
        }
    }
    buf.push('"');
}

fn write_f64(buf: &mut String, v: f64) {
    if v.is_finite() {
        let _ = write!(buf, "{v:.16e}");
    } else {
        buf.push_str("null");
    }
}

fn write_value(buf: &mut String, v: &Value) {
    match v {
        Value::Null => buf.push_str("null"),
        Value::Bool(b) => buf.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(buf, "{i}");
            } else {
                write_f64(buf, n.as_f64().unwrap_or(f64::NAN));
            }
        }
        Value::String(s) => write_str(buf, s),
        Value::Array(items) => {
            buf.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    buf.push(',');
                }
                write_value(buf, item);
            }
            buf.push(']');
        }
        Value::Object(map) => {
            // nested objects are small (per-sample dumps); BTreeMap order is
            // already deterministic
            buf.push('{');
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    buf.push(',');
                }
                write_str(buf, k);
                buf.push_str(": ");
                write_value(buf, val);
            }
            buf.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let mut r = Report::new("classify", "funk", 3, 10, 42);
        let tricky = [0.1, 1.0 / 3.0, std::f64::consts::PI, 2.0f64.powi(-40)];
        r.push_array("values", &tricky);
        let text = r.to_json();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let back: Vec<f64> = parsed["values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert_eq!(back, tricky);
    }

    #[test]
    fn deterministic_bytes_and_key_order() {
        let build = || {
            let mut r = Report::new("verify", "flat", 2, 5, 7);
            r.push_num("alpha", 0.25);
            r.add_check(Check::le("thing", 1e-12, 1e-8));
            r.to_json()
        };
        let text = build();
        assert_eq!(text, build());
        let task_pos = text.find("\"task\"").unwrap();
        let alpha_pos = text.find("\"alpha\"").unwrap();
        let checks_pos = text.find("\"checks\"").unwrap();
        assert!(task_pos < alpha_pos && alpha_pos < checks_pos);
    }

    #[test]
    fn check_threshold_logic() {
        assert!(Check::le("x", 1e-9, 1e-8).pass);
        assert!(!Check::le("x", 1e-7, 1e-8).pass);
        assert!(!Check::le("x", f64::NAN, 1e-8).pass);
    }

    #[test]
    fn string_escaping() {
        let mut r = Report::default();
        r.push_str("note", "a \"quoted\" line\nwith\\slash");
        let text = r.to_json();
        assert!(serde_json::from_str::<Value>(&text).is_ok());
    }
}
