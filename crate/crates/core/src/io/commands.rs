//! One function per subcommand: document in, report out.

use serde_json::{json, Value};

use crate::disc::{
    certify_improvement, default_p_max, pipeline, tighten, validate_stabilization, ComponentBound,
    DiscError, Enlargement, LayeredFamily, TighteningCertificate,
};
use crate::matrix::{IncidenceMatrix, IndexSubset, WeightVector};
use crate::pf::{
    check_subinvariance, dominated_power_check, is_irreducible, perron_bounds, power_subinvariance,
    scc_decompose, submatrix_strict_drop, PfError, SubinvarianceReport,
};
use crate::pushaway::{
    enumerate_all_orders, push_away, weight_delta, weights_from_events, IntersectionPattern,
    PushAwayError, PushAwayResult, Strategy,
};
use crate::rational::{format_rational, Rational};

use super::document::{
    DiscSystemDoc, Document, EnlargementDoc, LayeredFamilyDoc, PatternDoc, Payload, SubinvarianceCase,
};
use super::report::{Body, Certificate, Diagnostic, Report, Verdict};

pub const DEFAULT_MAX_ITERATIONS: usize = 500;
pub const DEFAULT_WIDTH: &str = "1/1000000000";
pub const DEFAULT_CAP: usize = 100_000;

fn one_based(indices: &[usize]) -> Value {
    json!(indices.iter().map(|i| i + 1).collect::<Vec<_>>())
}

fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Verdict for a failed disc-model operation: broken hypotheses of a lemma
/// are violations, malformed data is invalid input.
pub fn disc_verdict(e: &DiscError) -> Verdict {
    match e {
        DiscError::InvariantViolation { .. }
        | DiscError::SurrogateViolation { .. }
        | DiscError::NonIncreaseViolation { .. }
        | DiscError::PropagationTimeout { .. }
        | DiscError::Pf(PfError::LemmaViolation { .. }) => Verdict::Violated,
        DiscError::NotSeparable { .. } => Verdict::Inconclusive,
        _ => Verdict::InvalidInput,
    }
}

fn disc_location(e: &DiscError) -> String {
    match e {
        DiscError::InvariantViolation { row, .. } => format!("row {}", row + 1),
        DiscError::SurrogateViolation { index }
        | DiscError::NonIncreaseViolation { index }
        | DiscError::PropagationTimeout { index, .. } => format!("index {}", index + 1),
        DiscError::Pf(PfError::LemmaViolation { index, .. }) => format!("index {}", index + 1),
        DiscError::LayerRuleViolation { surface, .. } => format!("surface {surface}"),
        _ => "payload".to_string(),
    }
}

fn flag_disc(report: &mut Report, operation: &str, e: &DiscError) {
    report.flag(disc_verdict(e), Diagnostic::new(operation, disc_location(e), e.to_string()));
}

fn invalid(report: &mut Report, operation: &str, location: &str, message: impl Into<String>) {
    report.flag(Verdict::InvalidInput, Diagnostic::new(operation, location, message));
}

fn subinvariance_values(name: &str, r: &SubinvarianceReport) -> Certificate {
    Certificate::values(
        name,
        vec![
            ("holds", json!(r.holds)),
            ("strict_indices", one_based(&r.strict_indices)),
            ("violated_indices", one_based(&r.violated_indices)),
        ],
    )
}

pub fn perron(doc: &Document, max_iterations: usize, width: &Rational) -> Report {
    let mut report = Report::new("perron");
    let m = match &doc.payload {
        Payload::Matrix(m) => m.clone(),
        Payload::DiscSystem(d) => match d.system.build() {
            Ok(s) => s.incidence_matrix().clone(),
            Err(e) => {
                flag_disc(&mut report, "perron", &e);
                return report;
            }
        },
        other => {
            invalid(
                &mut report,
                "perron",
                "kind",
                format!("perron needs a matrix or disc-system document, got {}", other.kind()),
            );
            return report;
        }
    };
    perron_matrix(&mut report, &m, max_iterations, width);
    report
}

fn perron_matrix(report: &mut Report, m: &IncidenceMatrix, max_iterations: usize, width: &Rational) {
    if !is_irreducible(m) {
        let parts: Vec<Value> = scc_decompose(m).iter().map(|c| one_based(c.indices())).collect();
        report.certify(Certificate::values("components", vec![("strongly_connected", Value::Array(parts))]));
        invalid(report, "perron", "payload.entries", "matrix is not irreducible");
        return;
    }
    let cert = perron_bounds(m, max_iterations, width).expect("irreducible matrix");
    report.certify(Certificate::interval("spectral radius", &cert));
    if !cert.verify(m) {
        report.flag(
            Verdict::Violated,
            Diagnostic::new("perron", "witness", "witness does not reproduce the bracket"),
        );
    }
    if !cert.width_reached {
        report.flag(
            Verdict::Inconclusive,
            Diagnostic::new(
                "perron",
                "options",
                format!("width {} not reached in {max_iterations} iterations", format_rational(width)),
            ),
        );
    }
}

pub fn certify(doc: &Document, options: &Options) -> Report {
    match &doc.payload {
        Payload::Matrix(_) => perron(doc, DEFAULT_MAX_ITERATIONS, &options.width),
        Payload::SubinvarianceCase(c) => subinvariance_case(c),
        Payload::DiscSystem(d) => disc_system(d),
        Payload::Enlargement(e) => enlargement(e, options.p_max),
        Payload::LayeredFamily(f) => layers(f, options.p_max),
        Payload::Pattern(p) => pushaway(p, options),
        Payload::Trace(t) => {
            let mut report = Report::new("certify trace");
            let verdict = validate_stabilization(t);
            report.certify(Certificate::values(
                "stabilization",
                vec![
                    ("holds", json!(verdict.holds)),
                    ("stabilization_index", json!(verdict.stabilization_index)),
                    ("systems", json!(t.systems.len())),
                ],
            ));
            if let Some(why) = verdict.diagnostic {
                report.flag(Verdict::Violated, Diagnostic::new("validate_stabilization", "payload.systems", why));
            }
            report
        }
    }
}

fn subinvariance_case(c: &SubinvarianceCase) -> Report {
    let mut report = Report::new("certify subinvariance-case");
    let op = "check_subinvariance";
    let v = match WeightVector::new(c.weights.clone()) {
        Ok(v) => v,
        Err(e) => {
            invalid(&mut report, op, "payload.weights", e.to_string());
            return report;
        }
    };
    let n = c.matrix.dim();
    if v.len() != n {
        invalid(&mut report, op, "payload.weights", format!("expected {n} weights, found {}", v.len()));
        return report;
    }
    let base = check_subinvariance(&c.matrix, &v, &c.lambda).expect("dimensions checked");
    report.certify(subinvariance_values("M v <= lambda v", &base));
    if !base.holds {
        report.flag(
            Verdict::Violated,
            Diagnostic::new(op, format!("index {}", base.violated_indices[0] + 1), "(M v)_i > lambda v_i"),
        );
        return report;
    }
    if let Some(p) = c.power {
        match power_subinvariance(&c.matrix, &v, &c.lambda, p) {
            Ok(r) => report.certify(subinvariance_values(&format!("M^{p} v <= lambda^{p} v"), &r)),
            Err(e) => report.flag(Verdict::Violated, Diagnostic::new("power_subinvariance", "payload.power", e.to_string())),
        }
    }
    if let Some(nm) = &c.dominated {
        let p = c.power.unwrap_or(1);
        match dominated_power_check(nm, &c.matrix, &v, &c.lambda, p) {
            Ok(r) => {
                report.certify(subinvariance_values(&format!("N^{p} v <= M^{p} v <= lambda^{p} v"), &r));
                if !r.holds {
                    report.flag(
                        Verdict::Violated,
                        Diagnostic::new(
                            "dominated_power_check",
                            format!("index {}", r.violated_indices[0] + 1),
                            "domination of v does not carry to this power",
                        ),
                    );
                }
            }
            Err(PfError::DimensionMismatch { expected, found }) => invalid(
                &mut report,
                "dominated_power_check",
                "payload.dominated",
                format!("expected dimension {expected}, found {found}"),
            ),
            Err(e) => report.flag(Verdict::Violated, Diagnostic::new("dominated_power_check", "payload.dominated", e.to_string())),
        }
    }
    if let Some(subset) = &c.subset {
        let op = "submatrix_strict_drop";
        let zero_based: Vec<usize> = subset.iter().map(|i| i - 1).collect();
        let subset = match IndexSubset::new(zero_based, n) {
            Ok(s) => s,
            Err(e) => {
                invalid(&mut report, op, "payload.subset", e.to_string());
                return report;
            }
        };
        let p_max = c.p_max.unwrap_or_else(|| default_p_max(n));
        match submatrix_strict_drop(&c.matrix, &subset, &v, &c.lambda, p_max) {
            Ok(Some((p, i))) => report.certify(Certificate::values(
                "strict drop of the submatrix",
                vec![("power", json!(p)), ("index", json!(i + 1)), ("p_max", json!(p_max))],
            )),
            Ok(None) => report.flag(
                Verdict::Violated,
                Diagnostic::new(op, "payload.subset", format!("no strict drop up to power {p_max}")),
            ),
            Err(PfError::SubmatrixNotIrreducible) => {
                invalid(&mut report, op, "payload.subset", "submatrix is not irreducible")
            }
            Err(e) => report.flag(Verdict::Violated, Diagnostic::new(op, "payload.subset", e.to_string())),
        }
    }
    report
}

fn disc_system(d: &DiscSystemDoc) -> Report {
    let mut report = Report::new("certify disc-system");
    let system = match d.system.build() {
        Ok(s) => s,
        Err(e) => {
            flag_disc(&mut report, "disc_system", &e);
            return report;
        }
    };
    report.certify(Certificate::matrix("M", system.incidence_matrix()));
    let base = check_subinvariance(system.incidence_matrix(), system.weights(), system.lambda())
        .expect("validated system");
    report.certify(subinvariance_values("M v <= lambda v", &base));
    if let Some(imp) = &d.improvement {
        let op = "certify_improvement";
        let zero_based: Vec<usize> = imp.scc.iter().map(|i| i - 1).collect();
        let scc = match IndexSubset::new(zero_based, imp.matrix.dim()) {
            Ok(s) => s,
            Err(e) => {
                invalid(&mut report, op, "payload.improvement.scc", e.to_string());
                return report;
            }
        };
        match certify_improvement(&system, &imp.matrix, &scc) {
            Ok(cert) => record_certificate(&mut report, op, &cert),
            Err(e) => flag_disc(&mut report, op, &e),
        }
    }
    report
}

fn record_components(report: &mut Report, components: &[ComponentBound]) {
    for (i, c) in components.iter().enumerate() {
        report.certify(Certificate::interval(
            format!("component {} {}", i + 1, one_based(c.subset.indices())),
            &c.bound,
        ));
    }
}

fn record_certificate(report: &mut Report, op: &str, cert: &TighteningCertificate) {
    report.certify(Certificate::interval("before: spectral radius of M", &cert.before));
    report.certify(Certificate::interval(
        format!("after: component {}", one_based(cert.scc_used.indices())),
        &cert.after,
    ));
    report.certify(Certificate::values(
        "separation",
        vec![
            ("after.upper", rat(&cert.after.upper)),
            ("before.lower", rat(&cert.before.lower)),
            ("after.upper < before.lower", json!(cert.verdict)),
        ],
    ));
    if !cert.verdict {
        let open: Vec<String> = cert
            .components
            .iter()
            .filter(|c| !c.separated)
            .map(|c| one_based(c.subset.indices()).to_string())
            .collect();
        let message = if open.is_empty() {
            "strict schedule incomplete".to_string()
        } else {
            format!("not separated below the base growth rate: {}", open.join(", "))
        };
        report.flag(Verdict::Violated, Diagnostic::new(op, "certificate", message));
    }
}

fn schedule_certificate(cert: &TighteningCertificate, p_max: u32) -> Vec<Certificate> {
    vec![
        Certificate {
            name: "strict schedule".into(),
            body: Body::Schedule(cert.strict_schedule.iter().map(|(&j, &p)| (j + 1, p)).collect()),
        },
        Certificate::values("schedule bound", vec![("p_max", json!(p_max))]),
    ]
}

pub fn enlargement(doc: &EnlargementDoc, p_max: Option<u32>) -> Report {
    let mut report = Report::new("tighten");
    let op = "tighten";
    let built = doc.base.build().and_then(|base| {
        Enlargement::new(
            base,
            doc.new_discs.iter().map(|d| d.label.clone()).collect(),
            doc.new_discs.iter().map(|d| d.weight.clone()).collect(),
            doc.new_discs.iter().map(|d| d.image.clone()).collect(),
        )
    });
    let e = match built {
        Ok(e) => e,
        Err(err) => {
            flag_disc(&mut report, op, &err);
            return report;
        }
    };
    match tighten(&e, p_max.or(doc.p_max)) {
        Ok(out) => {
            report.certify(Certificate::matrix("M-bar", &out.mbar));
            report.certify(Certificate::matrix("M-hat", &out.mhat));
            report.certify(Certificate::values(
                "weights",
                vec![("v", json!(out.weights.entries().iter().map(rat).collect::<Vec<_>>())), ("lambda", rat(e.base().lambda()))],
            ));
            for c in schedule_certificate(&out.certificate, out.p_max) {
                report.certify(c);
            }
            record_components(&mut report, &out.certificate.components);
            record_certificate(&mut report, op, &out.certificate);
        }
        Err(err) => flag_disc(&mut report, op, &err),
    }
    report
}

pub fn layers(doc: &LayeredFamilyDoc, p_max: Option<u32>) -> Report {
    let mut report = Report::new("layers");
    let op = "pipeline";
    let family = doc.base.build().and_then(|base| {
        LayeredFamily::new(
            base,
            doc.layers.iter().map(|l| l.iter().map(|s| s.label.clone()).collect()).collect(),
            doc.layers.iter().map(|l| l.iter().map(|s| s.carried.clone()).collect()).collect(),
            doc.layers.iter().map(|l| l.iter().map(|s| s.weight.clone()).collect()).collect(),
        )
    });
    let family = match family {
        Ok(f) => f,
        Err(err) => {
            flag_disc(&mut report, op, &err);
            return report;
        }
    };
    let u = match &doc.u {
        Some(u) => match WeightVector::new(u.clone()) {
            Ok(u) => u,
            Err(e) => {
                invalid(&mut report, op, "payload.u", e.to_string());
                return report;
            }
        },
        None => family.weight_vector(),
    };
    let lambda = doc.lambda.clone().unwrap_or_else(|| family.base().lambda().clone());
    match pipeline(&family, &doc.update, &u, &lambda, p_max.or(doc.p_max)) {
        Ok(out) => {
            report.certify(Certificate::values(
                "order",
                vec![("labels", json!(family.order())), ("kept", one_based(out.kept.indices()))],
            ));
            for (name, m) in [("W", &out.w), ("T0", &out.t0), ("T1", &out.t1), ("T2", &out.t2), ("T3", &out.t3)] {
                report.certify(Certificate::matrix(name, m));
            }
            if !out.strict_tightening {
                report.note(Diagnostic::new(
                    op,
                    format!("index {}", family.dim()),
                    "u of the tightening surface is not below u of the first base disc",
                ));
            }
            for c in schedule_certificate(&out.certificate, out.p_max) {
                report.certify(c);
            }
            record_components(&mut report, &out.certificate.components);
            record_certificate(&mut report, op, &out.certificate);
        }
        Err(err) => flag_disc(&mut report, op, &err),
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub width: Rational,
    pub p_max: Option<u32>,
    pub enumerate_all: bool,
    pub cap: usize,
    pub order: Option<Vec<u32>>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            width: crate::rational::parse_rational(DEFAULT_WIDTH).expect("valid default"),
            p_max: None,
            enumerate_all: false,
            cap: DEFAULT_CAP,
            order: None,
        }
    }
}

fn ids(set: impl IntoIterator<Item = u32>) -> Value {
    json!(set.into_iter().collect::<Vec<_>>())
}

fn weights_value(w: &std::collections::BTreeMap<u32, Rational>) -> Value {
    let mut m = serde_json::Map::new();
    for (c, r) in w {
        m.insert(c.to_string(), rat(r));
    }
    Value::Object(m)
}

/// Invariants every push-away result must satisfy.
pub fn result_problems(pattern: &IntersectionPattern, r: &PushAwayResult) -> Vec<String> {
    let mut problems = Vec::new();
    let glued: Vec<u32> = r.glued.iter().copied().collect();
    if !pattern.is_s_antichain(&glued) {
        problems.push("glued set is not an antichain of the s-forest".to_string());
    }
    if r.glued.len() + r.removed.len() + r.discarded.len() != pattern.len() {
        problems.push("statuses do not partition the curves".to_string());
    }
    if r.events.len() != r.glued.len() + r.discarded.len() {
        problems.push("event count differs from glued plus discarded".to_string());
    }
    if weights_from_events(pattern, &r.events) != r.final_weights {
        problems.push("event log weights differ from the closed form".to_string());
    }
    problems
}

pub fn pushaway(doc: &PatternDoc, options: &Options) -> Report {
    let mut report = Report::new("pushaway");
    let op = "push_away";
    let pattern = match doc.build() {
        Ok(p) => p,
        Err(e) => {
            invalid(&mut report, "pattern", "payload", e.to_string());
            return report;
        }
    };
    let strategy = match &options.order {
        Some(order) => Strategy::Supplied(order),
        None => Strategy::LowestId,
    };
    let result = match push_away(&pattern, strategy) {
        Ok(r) => r,
        Err(e @ (PushAwayError::NotAlive(_) | PushAwayError::NotInnermost { .. } | PushAwayError::IncompleteOrder(_))) => {
            invalid(&mut report, op, "--order", e.to_string());
            return report;
        }
        Err(e) => {
            invalid(&mut report, op, "payload", e.to_string());
            return report;
        }
    };
    report.certify(Certificate::values(
        "result",
        vec![
            ("glued", ids(result.glued.iter().copied())),
            ("removed", ids(result.removed.iter().copied())),
            ("discarded", ids(result.discarded.iter().copied())),
            ("order", ids(result.events.iter().map(|e| e.curve))),
            ("final_weights", weights_value(&result.final_weights)),
            ("weight_delta", weights_value(&weight_delta(&pattern, &result))),
        ],
    ));
    for problem in result_problems(&pattern, &result) {
        report.flag(Verdict::Violated, Diagnostic::new(op, "result", problem));
    }
    if options.enumerate_all {
        let op = "enumerate_all_orders";
        match enumerate_all_orders(&pattern, options.cap) {
            Ok(all) => {
                report.certify(Certificate::values(
                    "enumeration",
                    vec![
                        ("sequences", json!(all.sequences)),
                        ("distinct_results", json!(all.results.len())),
                        ("confluent", json!(all.is_confluent())),
                    ],
                ));
                if !all.is_confluent() {
                    for (form, order) in &all.results {
                        report.flag(
                            Verdict::Violated,
                            Diagnostic::new(
                                op,
                                format!("order {}", ids(order.iter().copied())),
                                format!("glued {}", ids(form.glued.iter().copied())),
                            ),
                        );
                    }
                } else if !all.results.contains_key(&result.normalized) {
                    report.flag(
                        Verdict::Violated,
                        Diagnostic::new(op, "result", "strategy result differs from the enumerated one"),
                    );
                }
            }
            Err(e) => report.flag(Verdict::Inconclusive, Diagnostic::new(op, "--cap", e.to_string())),
        }
    }
    report
}
