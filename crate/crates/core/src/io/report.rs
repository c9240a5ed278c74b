//! Certification reports in a text and a machine (JSON) rendering.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::matrix::IncidenceMatrix;
use crate::pf::PerronCertificate;
use crate::rational::{format_rational, to_decimal, Rational};

use super::document::{matrix_value, FORMAT_VERSION};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Violated,
    Inconclusive,
    InvalidInput,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
            Verdict::InvalidInput => "invalid-input",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Violated => 1,
            Verdict::InvalidInput => 2,
            Verdict::Inconclusive => 3,
        }
    }

    /// The worse of two verdicts; invalid input dominates.
    pub fn combine(self, other: Verdict) -> Verdict {
        let rank = |v: Verdict| match v {
            Verdict::Verified => 0,
            Verdict::Inconclusive => 1,
            Verdict::Violated => 2,
            Verdict::InvalidInput => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub operation: String,
    /// Input location, a document path or an index.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(operation: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            operation: operation.to_string(),
            location: location.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Interval {
        lower: Rational,
        upper: Rational,
        iterations: usize,
        width_reached: bool,
        witness: Vec<Rational>,
    },
    /// One-based index to power.
    Schedule(Vec<(usize, u32)>),
    Matrix(IncidenceMatrix),
    Values(Vec<(String, Value)>),
    Document(Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub name: String,
    pub body: Body,
}

impl Certificate {
    pub fn interval(name: impl Into<String>, c: &PerronCertificate) -> Self {
        Self {
            name: name.into(),
            body: Body::Interval {
                lower: c.lower.clone(),
                upper: c.upper.clone(),
                iterations: c.iterations,
                width_reached: c.width_reached,
                witness: c.witness.entries().to_vec(),
            },
        }
    }

    pub fn matrix(name: impl Into<String>, m: &IncidenceMatrix) -> Self {
        Self {
            name: name.into(),
            body: Body::Matrix(m.clone()),
        }
    }

    pub fn values(name: impl Into<String>, values: Vec<(&str, Value)>) -> Self {
        Self {
            name: name.into(),
            body: Body::Values(values.into_iter().map(|(k, v)| (k.to_string(), v)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub certificates: Vec<Certificate>,
    pub diagnostics: Vec<Diagnostic>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Text,
    Machine,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            verdict: Verdict::Verified,
            certificates: Vec::new(),
            diagnostics: Vec::new(),
            seed: None,
        }
    }

    /// Lowers the verdict and records why.
    pub fn flag(&mut self, verdict: Verdict, diagnostic: Diagnostic) {
        self.verdict = self.verdict.combine(verdict);
        self.diagnostics.push(diagnostic);
    }

    pub fn note(&mut self, diagnostic: Diagnostic) {
        self.diagnostics.push(diagnostic);
    }

    pub fn certify(&mut self, certificate: Certificate) {
        self.certificates.push(certificate);
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn body_value(body: &Body) -> Value {
    match body {
        Body::Interval {
            lower,
            upper,
            iterations,
            width_reached,
            witness,
        } => json!({
            "type": "interval",
            "lower": rat(lower),
            "upper": rat(upper),
            "iterations": iterations,
            "width_reached": width_reached,
            "witness": witness.iter().map(rat).collect::<Vec<_>>(),
        }),
        Body::Schedule(entries) => json!({
            "type": "schedule",
            "entries": entries.iter().map(|(j, p)| json!({"index": j, "power": p})).collect::<Vec<_>>(),
        }),
        Body::Matrix(m) => json!({"type": "matrix", "entries": matrix_value(m)}),
        Body::Values(values) => {
            let mut m = Map::new();
            m.insert("type".into(), json!("values"));
            let mut inner = Map::new();
            for (k, v) in values {
                inner.insert(k.clone(), v.clone());
            }
            m.insert("values".into(), Value::Object(inner));
            Value::Object(m)
        }
        Body::Document(doc) => json!({"type": "document", "document": doc}),
    }
}

pub fn report_value(report: &Report) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "kind": "report",
        "command": report.command,
        "verdict": report.verdict.name(),
        "certificates": report.certificates.iter().map(|c| {
            let mut v = body_value(&c.body);
            v.as_object_mut().expect("object").insert("name".into(), json!(c.name));
            v
        }).collect::<Vec<_>>(),
        "diagnostics": report.diagnostics.iter().map(|d| json!({
            "operation": d.operation,
            "location": d.location,
            "message": d.message,
        })).collect::<Vec<_>>(),
        "reproduction": {"seed": report.seed, "version": TOOL_VERSION},
    })
}

const DECIMALS: usize = 12;

fn approx(r: &Rational) -> String {
    format!("~{}", to_decimal(r, DECIMALS))
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit_report(report: &Report, mode: Mode) -> String {
    if mode == Mode::Machine {
        let mut text = serde_json::to_string_pretty(&report_value(report)).expect("serializable");
        text.push('\n');
        return text;
    }
    let mut out = String::new();
    let _ = writeln!(out, "lamcert {} {}", TOOL_VERSION, report.command);
    let _ = writeln!(out, "verdict: {}", report.verdict.name());
    let mut decimals = false;
    for c in &report.certificates {
        let _ = writeln!(out, "\n[{}]", c.name);
        match &c.body {
            Body::Interval {
                lower,
                upper,
                iterations,
                width_reached,
                witness,
            } => {
                decimals = true;
                let _ = writeln!(out, "  lower      {}  ({})", format_rational(lower), approx(lower));
                let _ = writeln!(out, "  upper      {}  ({})", format_rational(upper), approx(upper));
                let _ = writeln!(
                    out,
                    "  iterations {iterations}{}",
                    if *width_reached { "" } else { " (target width not reached)" }
                );
                let w: Vec<String> = witness.iter().map(format_rational).collect();
                let _ = writeln!(out, "  witness    ({})", w.join(", "));
            }
            Body::Schedule(entries) => {
                if entries.is_empty() {
                    let _ = writeln!(out, "  (empty)");
                }
                for (j, p) in entries {
                    let _ = writeln!(out, "  {j} -> {p}");
                }
            }
            Body::Matrix(m) => {
                for row in m.rows() {
                    let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(out, "  [{}]", cells.join(" "));
                }
            }
            Body::Values(values) => {
                for (k, v) in values {
                    let _ = writeln!(out, "  {k}: {}", render_value(v));
                }
            }
            Body::Document(doc) => {
                let text = serde_json::to_string_pretty(doc).expect("serializable");
                for line in text.lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
    }
    if !report.diagnostics.is_empty() {
        let _ = writeln!(out, "\ndiagnostics:");
        for d in &report.diagnostics {
            let _ = writeln!(out, "  {} at {}: {}", d.operation, d.location, d.message);
        }
    }
    if decimals {
        let _ = writeln!(
            out,
            "\ndecimals marked ~ are approximate, non-normative; the rationals are the certificate"
        );
    }
    if let Some(seed) = report.seed {
        let _ = writeln!(out, "seed: {seed}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn empty_report_envelope() {
        let v: Value = serde_json::from_str(&emit_report(&Report::new("perron"), Mode::Machine)).unwrap();
        assert_eq!(v["verdict"], "verified");
        assert_eq!(v["reproduction"]["version"], TOOL_VERSION);
    }

    #[test]
    fn verdicts_combine() {
        assert_eq!(Verdict::Verified.combine(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Violated.combine(Verdict::Inconclusive), Verdict::Violated);
        assert_eq!(Verdict::Violated.combine(Verdict::InvalidInput), Verdict::InvalidInput);
    }

    #[test]
    fn text_marks_decimals() {
        let mut r = Report::new("perron");
        r.certify(Certificate {
            name: "bracket".into(),
            body: Body::Interval {
                lower: int(1),
                upper: int(2),
                iterations: 3,
                width_reached: true,
                witness: vec![int(1)],
            },
        });
        let text = emit_report(&r, Mode::Text);
        assert!(text.contains("approximate, non-normative"));
        assert!(text.contains("lower      1  (~1.000000000000)"));
    }
}
