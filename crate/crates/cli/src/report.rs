//! What a subcommand produced, and how it is written out.

use std::io::Write;

use serde_json::{json, Value};

use ielc_core::{ReductionTrace, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Well-formed input, negative answer.
    Negative,
    /// Malformed input or exhausted budget.
    Error,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::Error => "error",
        }
    }
}

pub struct Report {
    pub status: Status,
    text: String,
    result: Value,
    trace: Option<Value>,
    diagnostics: Vec<String>,
}

impl Report {
    pub fn ok(text: impl Into<String>, result: Value) -> Report {
        Report {
            status: Status::Ok,
            text: text.into(),
            result,
            trace: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn negative_with(text: impl Into<String>, result: Value) -> Report {
        Report {
            status: Status::Negative,
            ..Report::ok(text, result)
        }
    }

    pub fn negative(diagnostic: impl Into<String>) -> Report {
        Report {
            status: Status::Negative,
            diagnostics: vec![diagnostic.into()],
            ..Report::ok("", Value::Null)
        }
    }

    pub fn error(diagnostic: impl Into<String>) -> Report {
        Report {
            status: Status::Error,
            ..Report::negative(diagnostic)
        }
    }

    pub fn with_trace(mut self, trace: Value) -> Report {
        self.trace = Some(trace);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "schema": 1,
            "status": self.status.name(),
            "result": self.result,
            "diagnostics": self.diagnostics,
        });
        if let Some(t) = &self.trace {
            obj["trace"] = t.clone();
        }
        obj
    }

    pub fn emit(&self, as_json: bool) {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        if as_json {
            let _ = writeln!(out, "{}", self.to_json());
            return;
        }
        if !self.text.is_empty() {
            let _ = writeln!(out, "{}", self.text);
        }
        let color = std::env::var("IELC_COLOR").is_ok_and(|v| v == "1");
        let label = match self.status {
            Status::Error => "error",
            _ => "note",
        };
        for d in &self.diagnostics {
            if color {
                let code = if self.status == Status::Error { "31" } else { "33" };
                eprintln!("\x1b[1;{code}m{label}\x1b[0m: {d}");
            } else {
                eprintln!("{label}: {d}");
            }
        }
    }
}

pub fn trace_json(trace: &ReductionTrace) -> Value {
    json!(trace
        .steps
        .iter()
        .map(|s| json!({ "tag": s.tag.name(), "path": s.path.to_string(), "term": s.result.to_string() }))
        .collect::<Vec<_>>())
}

pub fn invalid_model(violations: &[Violation]) -> Report {
    let listed: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Report {
        diagnostics: listed.iter().map(|v| format!("violation {v}")).collect(),
        ..Report::negative_with(
            "invalid model",
            json!({ "valid": false, "violations": listed }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let v = Report::error("boom").to_json();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["status"], "error");
        assert_eq!(v["diagnostics"][0], "boom");
        assert!(v.get("trace").is_none());
        let v = Report::ok("", json!({"x": 1})).with_trace(json!([])).to_json();
        assert_eq!(v["status"], "ok");
        assert_eq!(v["result"]["x"], 1);
        assert!(v["trace"].is_array());
    }

    #[test]
    fn negative_keeps_result() {
        let r = Report::negative_with("no", json!({"model": null}));
        assert_eq!(r.status, Status::Negative);
        assert_eq!(r.to_json()["result"], json!({"model": null}));
    }
}
