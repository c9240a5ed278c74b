//! Versioned JSON documents.
//!
//! Every document is an envelope `{"format_version", "kind", "payload"}`.
//! Rationals are always strings (`"3/4"`, `"2"`); matrix entries are JSON
//! integers, or digit strings when they do not fit in 64 bits. Index lists
//! in documents are one-based.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::disc::{DiscError, DiscSystem, StabilizationTrace, TraceDisc};
use crate::matrix::{IncidenceMatrix, WeightVector};
use crate::pushaway::{ComponentId, Curve, IntersectionPattern, PushAwayError};
use crate::rational::{format_rational, parse_rational, Rational};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Matrix,
    SubinvarianceCase,
    DiscSystem,
    Enlargement,
    LayeredFamily,
    Pattern,
    Trace,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Matrix,
        Kind::SubinvarianceCase,
        Kind::DiscSystem,
        Kind::Enlargement,
        Kind::LayeredFamily,
        Kind::Pattern,
        Kind::Trace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Matrix => "matrix",
            Kind::SubinvarianceCase => "subinvariance-case",
            Kind::DiscSystem => "disc-system",
            Kind::Enlargement => "enlargement",
            Kind::LayeredFamily => "layered-family",
            Kind::Pattern => "pattern",
            Kind::Trace => "trace",
        }
    }

    pub fn from_name(name: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A disc with its image multiset and weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscRecord {
    pub label: String,
    pub image: Vec<String>,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemRecord {
    pub discs: Vec<DiscRecord>,
    pub lambda: Rational,
}

impl SystemRecord {
    pub fn build(&self) -> Result<DiscSystem, DiscError> {
        let weights = WeightVector::new(self.discs.iter().map(|d| d.weight.clone()).collect())?;
        DiscSystem::new(
            self.discs.iter().map(|d| d.label.clone()).collect(),
            self.discs.iter().map(|d| d.image.clone()).collect(),
            weights,
            self.lambda.clone(),
        )
    }

    pub fn from_system(system: &DiscSystem) -> Self {
        Self {
            discs: system
                .labels()
                .iter()
                .zip(system.images())
                .zip(system.weights().entries())
                .map(|((label, image), weight)| DiscRecord {
                    label: label.clone(),
                    image: image.clone(),
                    weight: weight.clone(),
                })
                .collect(),
            lambda: system.lambda().clone(),
        }
    }
}

/// Inputs for the subinvariance family of checks on one matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubinvarianceCase {
    pub matrix: IncidenceMatrix,
    pub weights: Vec<Rational>,
    pub lambda: Rational,
    /// Also check `M^p v <= λ^p v` at this power.
    pub power: Option<u32>,
    /// A matrix `N` to compare against `M` at `power` (default 1).
    pub dominated: Option<IncidenceMatrix>,
    /// One-based indices: look for a strict drop of the submatrix.
    pub subset: Option<Vec<usize>>,
    pub p_max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Improvement {
    pub matrix: IncidenceMatrix,
    /// One-based indices of the component to certify.
    pub scc: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscSystemDoc {
    pub system: SystemRecord,
    pub improvement: Option<Improvement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnlargementDoc {
    pub base: SystemRecord,
    pub new_discs: Vec<DiscRecord>,
    pub p_max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceRecord {
    pub label: String,
    pub carried: Vec<String>,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredFamilyDoc {
    pub base: SystemRecord,
    /// Top layer first; the last layer is the bottom one and ends with `Δ`.
    pub layers: Vec<Vec<SurfaceRecord>>,
    /// Replacement rows for the bottom layer.
    pub update: Vec<Vec<String>>,
    /// Defaults to the base weights followed by the surface weights.
    pub u: Option<Vec<Rational>>,
    /// Defaults to the base system's `λ`.
    pub lambda: Option<Rational>,
    pub p_max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternDoc {
    pub curves: Vec<Curve>,
    pub components: BTreeMap<ComponentId, Rational>,
}

impl PatternDoc {
    pub fn build(&self) -> Result<IntersectionPattern, PushAwayError> {
        IntersectionPattern::new(self.curves.clone(), self.components.clone())
    }

    pub fn from_pattern(pattern: &IntersectionPattern) -> Self {
        Self {
            curves: pattern.curves().to_vec(),
            components: pattern.components().clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Matrix(IncidenceMatrix),
    SubinvarianceCase(SubinvarianceCase),
    DiscSystem(DiscSystemDoc),
    Enlargement(EnlargementDoc),
    LayeredFamily(LayeredFamilyDoc),
    Pattern(PatternDoc),
    Trace(StabilizationTrace),
}

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::Matrix(_) => Kind::Matrix,
            Payload::SubinvarianceCase(_) => Kind::SubinvarianceCase,
            Payload::DiscSystem(_) => Kind::DiscSystem,
            Payload::Enlargement(_) => Kind::Enlargement,
            Payload::LayeredFamily(_) => Kind::LayeredFamily,
            Payload::Pattern(_) => Kind::Pattern,
            Payload::Trace(_) => Kind::Trace,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub payload: Payload,
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Self { payload }
    }

    pub fn kind(&self) -> Kind {
        self.payload.kind()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub expected: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}", self.path, self.expected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("not well-formed JSON: {0}")]
    Json(String),
    #[error("unsupported format_version {0:?} (supported: \"1\")")]
    VersionUnsupported(String),
    #[error("{} schema error(s), first: {}", .0.len(), .0[0])]
    Schema(Vec<SchemaError>),
}

impl ParseError {
    pub fn schema_errors(&self) -> &[SchemaError] {
        match self {
            ParseError::Schema(errors) => errors,
            _ => &[],
        }
    }
}

/// Parses and validates a document. Never panics on bad input; every schema
/// problem found is reported with its path.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut r = Reader::default();
    let Some(top) = r.object(&value, "$", &["format_version", "kind", "payload"]) else {
        return Err(ParseError::Schema(r.errors));
    };
    match top.get("format_version") {
        Some(Value::String(v)) if v == FORMAT_VERSION => {}
        Some(Value::String(v)) => return Err(ParseError::VersionUnsupported(v.clone())),
        Some(_) => r.err("format_version", "a version string"),
        None => r.err("format_version", "a version string (missing)"),
    }
    let kind = match top.get("kind") {
        Some(Value::String(k)) => {
            let kind = Kind::from_name(k);
            if kind.is_none() {
                r.err("kind", format!("one of {}", kind_list()));
            }
            kind
        }
        _ => {
            r.err("kind", format!("one of {}", kind_list()));
            None
        }
    };
    let payload = match (kind, top.get("payload")) {
        (_, None) => {
            r.err("payload", "an object (missing)");
            None
        }
        (Some(kind), Some(p)) => r.payload(kind, p),
        (None, Some(_)) => None,
    };
    match payload {
        Some(payload) if r.errors.is_empty() => Ok(Document { payload }),
        _ => {
            if r.errors.is_empty() {
                r.err("payload", "a valid payload");
            }
            Err(ParseError::Schema(r.errors))
        }
    }
}

fn kind_list() -> String {
    Kind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

#[derive(Default)]
struct Reader {
    errors: Vec<SchemaError>,
}

fn at(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

fn nth(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

impl Reader {
    fn err(&mut self, path: &str, expected: impl Into<String>) {
        self.errors.push(SchemaError {
            path: path.to_string(),
            expected: expected.into(),
        });
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str, allowed: &[&str]) -> Option<&'v Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            self.err(path, "an object");
            return None;
        };
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(&at(path, key), format!("no such field (allowed: {})", allowed.join(", ")));
            }
        }
        Some(obj)
    }

    fn required<'v>(&mut self, obj: &'v Map<String, Value>, path: &str, key: &str) -> Option<&'v Value> {
        match obj.get(key) {
            Some(Value::Null) | None => {
                self.err(&at(path, key), "a value (missing)");
                None
            }
            some => some,
        }
    }

    fn list_of<T>(
        &mut self,
        v: &Value,
        path: &str,
        mut item: impl FnMut(&mut Self, &Value, &str) -> Option<T>,
    ) -> Option<Vec<T>> {
        let Some(items) = v.as_array() else {
            self.err(path, "an array");
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, x) in items.iter().enumerate() {
            match item(self, x, &nth(path, i)) {
                Some(t) => out.push(t),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn string(&mut self, v: &Value, path: &str) -> Option<String> {
        match v {
            Value::String(s) if !s.is_empty() => Some(s.clone()),
            _ => {
                self.err(path, "a nonempty string");
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        let b = v.as_bool();
        if b.is_none() {
            self.err(path, "a boolean");
        }
        b
    }

    fn rational(&mut self, v: &Value, path: &str) -> Option<Rational> {
        let r = v.as_str().and_then(parse_rational);
        if r.is_none() {
            self.err(path, "a rational string such as \"3/4\" or \"2\"");
        }
        r
    }

    fn nonneg_rational(&mut self, v: &Value, path: &str) -> Option<Rational> {
        let r = self.rational(v, path)?;
        if r.is_negative() {
            self.err(path, "a nonnegative rational");
            return None;
        }
        Some(r)
    }

    fn count(&mut self, v: &Value, path: &str) -> Option<u32> {
        let c = v.as_u64().and_then(|x| u32::try_from(x).ok());
        if c.is_none() {
            self.err(path, "a nonnegative integer below 2^32");
        }
        c
    }

    fn positive_count(&mut self, v: &Value, path: &str) -> Option<u32> {
        let c = self.count(v, path)?;
        if c == 0 {
            self.err(path, "a positive integer");
            return None;
        }
        Some(c)
    }

    fn entry(&mut self, v: &Value, path: &str) -> Option<BigUint> {
        let e = match v {
            Value::Number(n) => n.as_u64().map(BigUint::from),
            Value::String(s) if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) => s.parse().ok(),
            _ => None,
        };
        if e.is_none() {
            self.err(path, "a nonnegative integer");
        }
        e
    }

    fn matrix(&mut self, v: &Value, path: &str) -> Option<IncidenceMatrix> {
        let rows = self.list_of(v, path, |r, row, p| r.list_of(row, p, Self::entry))?;
        if rows.is_empty() {
            self.err(path, "a nonempty square matrix");
            return None;
        }
        let n = rows.len();
        let mut square = true;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                self.err(&nth(path, i), format!("a row of length {n}"));
                square = false;
            }
        }
        if !square {
            return None;
        }
        IncidenceMatrix::from_rows(rows).ok()
    }

    fn indices(&mut self, v: &Value, path: &str) -> Option<Vec<usize>> {
        self.list_of(v, path, |r, x, p| r.positive_count(x, p).map(|c| c as usize))
    }

    fn labels(&mut self, v: &Value, path: &str) -> Option<Vec<String>> {
        self.list_of(v, path, Self::string)
    }

    fn disc(&mut self, v: &Value, path: &str) -> Option<DiscRecord> {
        let obj = self.object(v, path, &["label", "image", "weight"])?;
        let label = self.required(obj, path, "label").and_then(|x| self.string(x, &at(path, "label")));
        let image = self.required(obj, path, "image").and_then(|x| self.labels(x, &at(path, "image")));
        let weight = self
            .required(obj, path, "weight")
            .and_then(|x| self.nonneg_rational(x, &at(path, "weight")));
        Some(DiscRecord {
            label: label?,
            image: image?,
            weight: weight?,
        })
    }

    fn system(&mut self, v: &Value, path: &str, extra: &[&str]) -> Option<SystemRecord> {
        let allowed: Vec<&str> = ["discs", "lambda"].iter().chain(extra).copied().collect();
        let obj = self.object(v, path, &allowed)?;
        let discs = self
            .required(obj, path, "discs")
            .and_then(|x| self.list_of(x, &at(path, "discs"), Self::disc));
        let lambda = self
            .required(obj, path, "lambda")
            .and_then(|x| self.nonneg_rational(x, &at(path, "lambda")));
        Some(SystemRecord {
            discs: discs?,
            lambda: lambda?,
        })
    }

    fn optional<T>(
        &mut self,
        obj: &Map<String, Value>,
        path: &str,
        key: &str,
        read: impl FnOnce(&mut Self, &Value, &str) -> Option<T>,
    ) -> Result<Option<T>, ()> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => read(self, v, &at(path, key)).map(Some).ok_or(()),
        }
    }

    fn payload(&mut self, kind: Kind, v: &Value) -> Option<Payload> {
        let path = "payload";
        match kind {
            Kind::Matrix => {
                let obj = self.object(v, path, &["entries"])?;
                let m = self.required(obj, path, "entries")?;
                self.matrix(m, &at(path, "entries")).map(Payload::Matrix)
            }
            Kind::SubinvarianceCase => {
                let obj = self.object(
                    v,
                    path,
                    &["matrix", "weights", "lambda", "power", "dominated", "subset", "p_max"],
                )?;
                let matrix = self.required(obj, path, "matrix").and_then(|x| self.matrix(x, &at(path, "matrix")));
                let weights = self
                    .required(obj, path, "weights")
                    .and_then(|x| self.list_of(x, &at(path, "weights"), Self::nonneg_rational));
                let lambda = self
                    .required(obj, path, "lambda")
                    .and_then(|x| self.nonneg_rational(x, &at(path, "lambda")));
                let power = self.optional(obj, path, "power", Self::positive_count);
                let dominated = self.optional(obj, path, "dominated", Self::matrix);
                let subset = self.optional(obj, path, "subset", Self::indices);
                let p_max = self.optional(obj, path, "p_max", Self::positive_count);
                Some(Payload::SubinvarianceCase(SubinvarianceCase {
                    matrix: matrix?,
                    weights: weights?,
                    lambda: lambda?,
                    power: power.ok()?,
                    dominated: dominated.ok()?,
                    subset: subset.ok()?,
                    p_max: p_max.ok()?,
                }))
            }
            Kind::DiscSystem => {
                let system = self.system(v, path, &["improvement"]);
                let obj = v.as_object()?;
                let improvement = self.optional(obj, path, "improvement", |r, x, p| {
                    let o = r.object(x, p, &["matrix", "scc"])?;
                    let matrix = r.required(o, p, "matrix").and_then(|m| r.matrix(m, &at(p, "matrix")));
                    let scc = r.required(o, p, "scc").and_then(|s| r.indices(s, &at(p, "scc")));
                    Some(Improvement {
                        matrix: matrix?,
                        scc: scc?,
                    })
                });
                Some(Payload::DiscSystem(DiscSystemDoc {
                    system: system?,
                    improvement: improvement.ok()?,
                }))
            }
            Kind::Enlargement => {
                let obj = self.object(v, path, &["base", "new_discs", "p_max"])?;
                let base = self
                    .required(obj, path, "base")
                    .and_then(|x| self.system(x, &at(path, "base"), &[]));
                let new_discs = self
                    .required(obj, path, "new_discs")
                    .and_then(|x| self.list_of(x, &at(path, "new_discs"), Self::disc));
                let p_max = self.optional(obj, path, "p_max", Self::positive_count);
                Some(Payload::Enlargement(EnlargementDoc {
                    base: base?,
                    new_discs: new_discs?,
                    p_max: p_max.ok()?,
                }))
            }
            Kind::LayeredFamily => {
                let obj = self.object(v, path, &["base", "layers", "update", "u", "lambda", "p_max"])?;
                let base = self
                    .required(obj, path, "base")
                    .and_then(|x| self.system(x, &at(path, "base"), &[]));
                let layers = self.required(obj, path, "layers").and_then(|x| {
                    self.list_of(x, &at(path, "layers"), |r, layer, p| {
                        r.list_of(layer, p, |r, s, p| {
                            let o = r.object(s, p, &["label", "carried", "weight"])?;
                            let label = r.required(o, p, "label").and_then(|x| r.string(x, &at(p, "label")));
                            let carried = r.required(o, p, "carried").and_then(|x| r.labels(x, &at(p, "carried")));
                            let weight = r
                                .required(o, p, "weight")
                                .and_then(|x| r.nonneg_rational(x, &at(p, "weight")));
                            Some(SurfaceRecord {
                                label: label?,
                                carried: carried?,
                                weight: weight?,
                            })
                        })
                    })
                });
                let update = self
                    .required(obj, path, "update")
                    .and_then(|x| self.list_of(x, &at(path, "update"), Self::labels));
                let u = self.optional(obj, path, "u", |r, x, p| r.list_of(x, p, Self::nonneg_rational));
                let lambda = self.optional(obj, path, "lambda", Self::nonneg_rational);
                let p_max = self.optional(obj, path, "p_max", Self::positive_count);
                Some(Payload::LayeredFamily(LayeredFamilyDoc {
                    base: base?,
                    layers: layers?,
                    update: update?,
                    u: u.ok()?,
                    lambda: lambda.ok()?,
                    p_max: p_max.ok()?,
                }))
            }
            Kind::Pattern => {
                let obj = self.object(v, path, &["components", "curves"])?;
                let components = self.required(obj, path, "components").and_then(|x| {
                    self.list_of(x, &at(path, "components"), |r, c, p| {
                        let o = r.object(c, p, &["id", "weight"])?;
                        let id = r.required(o, p, "id").and_then(|x| r.count(x, &at(p, "id")));
                        let w = r.required(o, p, "weight").and_then(|x| r.nonneg_rational(x, &at(p, "weight")));
                        Some((id?, w?))
                    })
                });
                let curves = self.required(obj, path, "curves").and_then(|x| {
                    self.list_of(x, &at(path, "curves"), |r, c, p| {
                        let o = r.object(c, p, &["id", "delta_parent", "component", "s_parent", "w_delta", "w_s"])?;
                        let id = r.required(o, p, "id").and_then(|x| r.count(x, &at(p, "id")));
                        let delta_parent = r.optional(o, p, "delta_parent", Self::count);
                        let component = r.required(o, p, "component").and_then(|x| r.count(x, &at(p, "component")));
                        let s_parent = r.optional(o, p, "s_parent", Self::count);
                        let w_delta = r
                            .required(o, p, "w_delta")
                            .and_then(|x| r.nonneg_rational(x, &at(p, "w_delta")));
                        let w_s = r.required(o, p, "w_s").and_then(|x| r.nonneg_rational(x, &at(p, "w_s")));
                        Some(Curve {
                            id: id?,
                            delta_parent: delta_parent.ok()?,
                            component: component?,
                            s_parent: s_parent.ok()?,
                            w_delta: w_delta?,
                            w_s: w_s?,
                        })
                    })
                });
                let components = components?;
                let mut map = BTreeMap::new();
                for (i, (id, w)) in components.into_iter().enumerate() {
                    if map.insert(id, w).is_some() {
                        self.err(&nth(&at(path, "components"), i), "a component id not used before");
                    }
                }
                Some(Payload::Pattern(PatternDoc {
                    curves: curves?,
                    components: map,
                }))
            }
            Kind::Trace => {
                let obj = self.object(v, path, &["systems", "stabilization_index"])?;
                let systems = self.required(obj, path, "systems").and_then(|x| {
                    self.list_of(x, &at(path, "systems"), |r, sys, p| {
                        r.list_of(sys, p, |r, d, p| {
                            let o = r.object(d, p, &["id", "class", "weight", "transverse"])?;
                            let id = r.required(o, p, "id").and_then(|x| r.string(x, &at(p, "id")));
                            let class = r.required(o, p, "class").and_then(|x| r.string(x, &at(p, "class")));
                            let weight = r
                                .required(o, p, "weight")
                                .and_then(|x| r.nonneg_rational(x, &at(p, "weight")));
                            let transverse = r.optional(o, p, "transverse", Self::boolean);
                            Some(TraceDisc {
                                id: id?,
                                class: class?,
                                weight: weight?,
                                transverse: transverse.ok()?.unwrap_or(false),
                            })
                        })
                    })
                });
                let claimed = self.optional(obj, path, "stabilization_index", Self::count);
                Some(Payload::Trace(StabilizationTrace {
                    systems: systems?,
                    claimed: claimed.ok()?.map(|j| j as usize),
                }))
            }
        }
    }
}

fn rational_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn rationals_value(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rational_value).collect())
}

pub(crate) fn entry_value(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(small) => json!(small),
        None => Value::String(x.to_string()),
    }
}

pub(crate) fn matrix_value(m: &IncidenceMatrix) -> Value {
    Value::Array(
        m.rows()
            .map(|row| Value::Array(row.iter().map(entry_value).collect()))
            .collect(),
    )
}

fn disc_value(d: &DiscRecord) -> Value {
    json!({"label": d.label, "image": d.image, "weight": rational_value(&d.weight)})
}

fn system_value(s: &SystemRecord) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("discs".into(), Value::Array(s.discs.iter().map(disc_value).collect()));
    m.insert("lambda".into(), rational_value(&s.lambda));
    m
}

fn put_opt<T>(m: &mut Map<String, Value>, key: &str, v: &Option<T>, f: impl FnOnce(&T) -> Value) {
    if let Some(x) = v {
        m.insert(key.into(), f(x));
    }
}

pub fn payload_value(payload: &Payload) -> Value {
    match payload {
        Payload::Matrix(m) => json!({ "entries": matrix_value(m) }),
        Payload::SubinvarianceCase(c) => {
            let mut m = Map::new();
            m.insert("matrix".into(), matrix_value(&c.matrix));
            m.insert("weights".into(), rationals_value(&c.weights));
            m.insert("lambda".into(), rational_value(&c.lambda));
            put_opt(&mut m, "power", &c.power, |p| json!(p));
            put_opt(&mut m, "dominated", &c.dominated, matrix_value);
            put_opt(&mut m, "subset", &c.subset, |s| json!(s));
            put_opt(&mut m, "p_max", &c.p_max, |p| json!(p));
            Value::Object(m)
        }
        Payload::DiscSystem(d) => {
            let mut m = system_value(&d.system);
            put_opt(&mut m, "improvement", &d.improvement, |i| {
                json!({"matrix": matrix_value(&i.matrix), "scc": i.scc})
            });
            Value::Object(m)
        }
        Payload::Enlargement(e) => {
            let mut m = Map::new();
            m.insert("base".into(), Value::Object(system_value(&e.base)));
            m.insert("new_discs".into(), Value::Array(e.new_discs.iter().map(disc_value).collect()));
            put_opt(&mut m, "p_max", &e.p_max, |p| json!(p));
            Value::Object(m)
        }
        Payload::LayeredFamily(f) => {
            let mut m = Map::new();
            m.insert("base".into(), Value::Object(system_value(&f.base)));
            let layers = f
                .layers
                .iter()
                .map(|layer| {
                    Value::Array(
                        layer
                            .iter()
                            .map(|s| json!({"label": s.label, "carried": s.carried, "weight": rational_value(&s.weight)}))
                            .collect(),
                    )
                })
                .collect();
            m.insert("layers".into(), Value::Array(layers));
            m.insert("update".into(), json!(f.update));
            put_opt(&mut m, "u", &f.u, |u| rationals_value(u));
            put_opt(&mut m, "lambda", &f.lambda, rational_value);
            put_opt(&mut m, "p_max", &f.p_max, |p| json!(p));
            Value::Object(m)
        }
        Payload::Pattern(p) => {
            let components: Vec<Value> = p
                .components
                .iter()
                .map(|(id, w)| json!({"id": id, "weight": rational_value(w)}))
                .collect();
            let curves: Vec<Value> = p
                .curves
                .iter()
                .map(|c| {
                    json!({
                        "id": c.id,
                        "delta_parent": c.delta_parent,
                        "component": c.component,
                        "s_parent": c.s_parent,
                        "w_delta": rational_value(&c.w_delta),
                        "w_s": rational_value(&c.w_s),
                    })
                })
                .collect();
            json!({"components": components, "curves": curves})
        }
        Payload::Trace(t) => {
            let systems: Vec<Value> = t
                .systems
                .iter()
                .map(|sys| {
                    Value::Array(
                        sys.iter()
                            .map(|d| {
                                json!({
                                    "id": d.id,
                                    "class": d.class,
                                    "weight": rational_value(&d.weight),
                                    "transverse": d.transverse,
                                })
                            })
                            .collect(),
                    )
                })
                .collect();
            let mut m = Map::new();
            m.insert("systems".into(), Value::Array(systems));
            put_opt(&mut m, "stabilization_index", &t.claimed, |j| json!(j));
            Value::Object(m)
        }
    }
}

pub fn document_value(doc: &Document) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "kind": doc.kind().name(),
        "payload": payload_value(&doc.payload),
    })
}

pub fn emit_document(doc: &Document) -> String {
    let mut text = serde_json::to_string_pretty(&document_value(doc)).expect("serializable");
    text.push('\n');
    text
}
