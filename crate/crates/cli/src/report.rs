use crate::config::{Output, RunConfig};
use distint_core::TraceEntry;
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rows for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub status: String,
    /// `null` when there is no finite value.
    pub value: Option<f64>,
    pub error_estimate: Option<f64>,
    pub trace: Vec<TraceEntry>,
    pub details: Value,
    pub config: RunConfig,
    #[serde(skip)]
    pub table: Option<Table>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Report {
    pub fn new(command: &'static str, input: &str, status: impl Into<String>, config: &RunConfig) -> Report {
        Report {
            tool: "distint",
            version: VERSION,
            command,
            input: input.to_string(),
            status: status.into(),
            value: None,
            error_estimate: None,
            trace: Vec::new(),
            details: Value::Null,
            config: config.clone(),
            table: None,
        }
    }

    pub fn value(mut self, v: f64) -> Report {
        self.value = finite(v);
        self
    }

    pub fn error(mut self, e: f64) -> Report {
        self.error_estimate = finite(e);
        self
    }

    pub fn trace(mut self, t: Vec<TraceEntry>) -> Report {
        self.trace = t;
        self
    }

    pub fn details(mut self, d: Value) -> Report {
        self.details = d;
        self
    }

    pub fn table(mut self, t: Table) -> Report {
        self.table = Some(t);
        self
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(&self.status)
    }

    pub fn render(&self) -> String {
        match self.config.output {
            Output::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Output::Csv => self.csv(),
            Output::Text => self.text(),
        }
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        match &self.table {
            Some(t) => {
                let _ = writeln!(s, "{}", t.header.join(","));
                for r in &t.rows {
                    let _ = writeln!(s, "{}", r.join(","));
                }
            }
            None => {
                let _ = writeln!(s, "status,value,error_estimate");
                let _ = writeln!(s, "{},{},{}", self.status, num(self.value), num(self.error_estimate));
            }
        }
        s
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.command, self.input);
        let _ = writeln!(s, "status: {}", self.status);
        if let Some(v) = self.value {
            let _ = writeln!(s, "value: {v}");
        }
        if let Some(e) = self.error_estimate {
            let _ = writeln!(s, "error estimate: {e:e}");
        }
        if let Value::Object(m) = &self.details {
            for (k, v) in m {
                if !matches!(v, Value::Array(_) | Value::Object(_) | Value::Null) {
                    let _ = writeln!(s, "{k}: {v}");
                }
            }
        }
        if self.config.trace {
            for t in &self.trace {
                let _ = writeln!(s, "  [{}, {}] {} -> {} (diag {:e})", t.lo, t.hi, t.strategy, t.value, t.diagnostics);
            }
        }
        s
    }
}

pub fn num(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn exit_code(status: &str) -> i32 {
    match status {
        "Finite" | "Exists" | "Converged" | "MeasureConsistent" => 0,
        "PlusInfinity" | "MinusInfinity" | "NotIntegrable" | "NoValue" | "Diverged" | "ViolationAt" => 2,
        _ => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonfinite_values_become_null() {
        let r = Report::new("integrate", "pow(alpha=-1)", "PlusInfinity", &RunConfig::default()).value(f64::INFINITY);
        let v: Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["value"], Value::Null);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn csv_falls_back_to_one_row() {
        let cfg = RunConfig { output: Output::Csv, ..RunConfig::default() };
        let r = Report::new("integrate", "x", "Finite", &cfg).value(0.5);
        assert_eq!(r.render(), "status,value,error_estimate\nFinite,0.5,\n");
    }
}
