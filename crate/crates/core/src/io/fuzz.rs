//! Seeded randomized suites with greedy counterexample shrinking.
//!
//! Size envelopes:
//! * `pf`: irreducible `n x n`, `n <= 5`, entries `0..=3`.
//! * `propagation`: irreducible `n x n`, `2 <= n <= 6`, entries `0..=2`,
//!   integer weights `1..=5` with the first one largest.
//! * `pipeline`: base of `1..=3` discs, height `1..=2`, `1..=2` surfaces per
//!   layer.
//! * `confluence`: patterns of `0..=6` curves over two components.
//!
//! Every property checked is a theorem about the inputs, so a single
//! failure is a defect.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::disc::{
    default_p_max, pipeline, strict_schedule, DiscError, DiscSystem, LayeredFamily, PipelineOutcome,
};
use crate::matrix::{IncidenceMatrix, IndexSubset, WeightVector};
use crate::pf::{
    check_subinvariance, is_irreducible, perron_bounds, perron_bounds_from, power_subinvariance,
    propagation_check, row_copy, submatrix,
};
use crate::pushaway::corpus::{decode, space_size};
use crate::pushaway::{
    enumerate_all_orders, project, push_away, Curve, IntersectionPattern, Strategy,
};
use crate::rational::{self, int, Rational};

use super::commands::result_problems;
use super::document::{
    document_value, DiscRecord, Document, LayeredFamilyDoc, PatternDoc, Payload, SubinvarianceCase,
    SurfaceRecord, SystemRecord,
};
use super::report::{Body, Certificate, Diagnostic, Report, Verdict};

pub const SUITES: [&str; 4] = ["pf", "propagation", "pipeline", "confluence"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite {0:?} (known: pf, propagation, pipeline, confluence)")]
pub struct UnknownSuite(pub String);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Repeatedly replaces `case` by the first smaller candidate that still
/// fails, until no candidate fails.
pub fn shrink<C: Clone>(
    mut case: C,
    mut message: String,
    candidates: impl Fn(&C) -> Vec<C>,
    fails: impl Fn(&C) -> Option<String>,
) -> (C, String) {
    'outer: loop {
        for cand in candidates(&case) {
            if let Some(m) = fails(&cand) {
                case = cand;
                message = m;
                continue 'outer;
            }
        }
        return (case, message);
    }
}

fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, max_entry: u64) -> IncidenceMatrix {
    loop {
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=max_entry) } else { 0 }).collect())
            .collect();
        let m = IncidenceMatrix::from_u64_rows(&rows).expect("square");
        if is_irreducible(&m) {
            return m;
        }
    }
}

/// Irreducible matrix of dimension `n` with entries in `0..=max_entry`.
pub fn random_irreducible<R: Rng + ?Sized>(rng: &mut R, n: usize, max_entry: u64) -> IncidenceMatrix {
    random_matrix(rng, n, max_entry)
}

fn smaller_matrices(m: &IncidenceMatrix) -> Vec<IncidenceMatrix> {
    let n = m.dim();
    let mut out = Vec::new();
    if n > 1 {
        for drop in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
            let subset = IndexSubset::new(keep, n).expect("increasing");
            out.push(submatrix(m, &subset).expect("in range"));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !m.get(i, j).is_zero() {
                let mut smaller = m.clone();
                smaller.set(i, j, m.get(i, j) - BigUint::one());
                out.push(smaller);
            }
        }
    }
    out
}

// ---- pf ----

fn pf_property(m: &IncidenceMatrix) -> Option<String> {
    if !is_irreducible(m) {
        return None;
    }
    let width = rational::ten_to_minus(9);
    let cert = perron_bounds(m, 500, &width).ok()?;
    if rational::cmp(&cert.lower, &cert.upper).is_gt() || !cert.verify(m) {
        return Some("Collatz-Wielandt witness does not reproduce its bracket".into());
    }
    let n = m.dim();
    let start: Vec<Rational> = (0..n).map(|i| int(i as i64 + 1)).collect();
    let other = perron_bounds_from(m, &WeightVector::new(start).expect("positive"), 500, &width).ok()?;
    if rational::cmp(&other.lower, &cert.upper).is_gt() || rational::cmp(&cert.lower, &other.upper).is_gt() {
        return Some("brackets from two start vectors are disjoint".into());
    }
    if !check_subinvariance(m, &cert.witness, &cert.upper).ok()?.holds {
        return Some("witness is not sub-invariant at the upper bound".into());
    }
    for p in 1..=3 {
        match power_subinvariance(m, &cert.witness, &cert.upper, p) {
            Ok(r) if r.holds => {}
            _ => return Some(format!("sub-invariance does not pass to power {p}")),
        }
    }
    for drop in 0..n {
        if n == 1 {
            break;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
        let sub = submatrix(m, &IndexSubset::new(keep, n).expect("increasing")).expect("in range");
        if is_irreducible(&sub) {
            let s = perron_bounds(&sub, 500, &width).expect("irreducible");
            if rational::cmp(&s.lower, &cert.upper).is_gt() {
                return Some(format!("principal submatrix without index {} grows faster", drop + 1));
            }
        }
    }
    None
}

// ---- propagation ----

/// `M` irreducible with weights `u` whose first entry is the largest;
/// `src` names the row copied over the first one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationCase {
    pub m: IncidenceMatrix,
    pub u: Vec<Rational>,
    pub src: usize,
}

impl PropagationCase {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let n = rng.gen_range(2..=6);
        let m = random_irreducible(rng, n, 2);
        let mut u: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
        u[0] = u.iter().max().copied().unwrap_or(1) + 1;
        Self {
            m,
            u: u.into_iter().map(int).collect(),
            src: rng.gen_range(1..n),
        }
    }

    /// Smallest `λ` with `Mu <= λu`.
    pub fn lambda(&self) -> Rational {
        let mu = self.m.apply(&self.u);
        mu.iter()
            .zip(&self.u)
            .map(|(a, b)| a / b)
            .max_by(rational::cmp)
            .expect("nonempty")
    }
}

// Shortest path length from every index to index 0.
fn distance_to_first(t: &IncidenceMatrix) -> Vec<Option<u32>> {
    let n = t.dim();
    let mut dist = vec![None; n];
    dist[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for j in 0..n {
            if dist[j].is_none() && t.is_positive(j, k) {
                dist[j] = Some(dist[k].expect("visited") + 1);
                queue.push_back(j);
            }
        }
    }
    dist
}

fn propagation_property(c: &PropagationCase) -> Option<String> {
    let n = c.m.dim();
    if n < 2 || c.src == 0 || c.src >= n || c.u.len() != n || !is_irreducible(&c.m) {
        return None;
    }
    // the copied row must belong to a lighter disc
    if rational::cmp(&c.u[c.src], &c.u[0]).is_ge() {
        return None;
    }
    let u = WeightVector::new(c.u.clone()).ok()?;
    if !u.is_strictly_positive() {
        return None;
    }
    let lambda = c.lambda();
    let t = row_copy(&c.m, c.src, 0).expect("in range");
    match propagation_check(&c.m, &t) {
        Ok(true) => {}
        Ok(false) => return Some("rows of powers diverge before the first row is reached".into()),
        Err(e) => return Some(format!("propagation check failed: {e}")),
    }
    let sub = check_subinvariance(&t, &u, &lambda).ok()?;
    if !sub.holds || sub.strict_indices.first() != Some(&0) {
        return Some("row copy does not give a strict drop at the first index".into());
    }
    let schedule = strict_schedule(&t, &u, &lambda, default_p_max(n)).ok()?;
    for (j, d) in distance_to_first(&t).into_iter().enumerate() {
        if let Some(d) = d {
            match schedule.get(&j) {
                Some(&p) if p <= d + 1 => {}
                Some(&p) => return Some(format!("index {} drops only at power {p}, path length {d}", j + 1)),
                None => return Some(format!("index {} never drops, path length {d}", j + 1)),
            }
        }
    }
    None
}

fn smaller_propagation(c: &PropagationCase) -> Vec<PropagationCase> {
    let mut out: Vec<PropagationCase> = smaller_matrices(&c.m)
        .into_iter()
        .filter(|m| m.dim() == c.m.dim())
        .map(|m| PropagationCase { m, ..c.clone() })
        .collect();
    for i in 1..c.u.len() {
        if rational::cmp(&c.u[i], &int(1)).is_gt() {
            let mut smaller = c.clone();
            smaller.u[i] = &c.u[i] - int(1);
            out.push(smaller);
        }
    }
    out
}

fn propagation_document(c: &PropagationCase) -> Document {
    Document::new(Payload::SubinvarianceCase(SubinvarianceCase {
        matrix: row_copy(&c.m, c.src, 0).unwrap_or_else(|_| c.m.clone()),
        weights: c.u.clone(),
        lambda: c.lambda(),
        power: None,
        dominated: None,
        subset: None,
        p_max: None,
    }))
}

// ---- pipeline ----

/// A layered family whose surrogate holds with equality on every surface
/// row, with a strictly lighter tightening surface and update rows that do
/// not increase weight.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R) -> LayeredFamilyDoc {
    loop {
        if let Some(doc) = try_family(rng) {
            return doc;
        }
    }
}

fn weight_of(labels: &[String], weights: &BTreeMap<String, Rational>) -> Rational {
    labels.iter().fold(int(0), |acc, l| acc + &weights[l])
}

fn try_family<R: Rng + ?Sized>(rng: &mut R) -> Option<LayeredFamilyDoc> {
    let k = rng.gen_range(1..=3);
    let m = random_irreducible(rng, k, 2);
    let v: Vec<Rational> = (0..k).map(|_| int(rng.gen_range(1..=4))).collect();
    let mv = m.apply(&v);
    let lambda = mv.iter().zip(&v).map(|(a, b)| a / b).max_by(rational::cmp)?;
    if lambda == int(0) {
        return None;
    }
    let base_labels: Vec<String> = (1..=k).map(|i| format!("E{i}")).collect();
    let discs: Vec<DiscRecord> = (0..k)
        .map(|i| DiscRecord {
            label: base_labels[i].clone(),
            image: (0..k)
                .flat_map(|j| std::iter::repeat_n(base_labels[j].clone(), m.get(i, j).try_into().unwrap_or(0)))
                .collect(),
            weight: v[i].clone(),
        })
        .collect();
    let mut weights: BTreeMap<String, Rational> =
        base_labels.iter().cloned().zip(v.iter().cloned()).collect();
    let height = rng.gen_range(1..=2);
    let mut layers: Vec<Vec<SurfaceRecord>> = Vec::new();
    let mut above: Vec<String> = base_labels.clone();
    for t in 0..height {
        let bottom = t + 1 == height;
        let count = rng.gen_range(1..=2);
        let mut layer = Vec::new();
        for s in 0..count {
            let label = if bottom && s + 1 == count {
                "Delta".to_string()
            } else {
                format!("S{}_{}", height - 1 - t, s + 1)
            };
            let targets: Vec<&String> = base_labels.iter().chain(if t == 0 { [].iter() } else { above.iter() }).collect();
            let size = rng.gen_range(1..=3);
            let carried: Vec<String> = (0..size).map(|_| (*targets.choose(rng).expect("nonempty")).clone()).collect();
            let weight = weight_of(&carried, &weights) / &lambda;
            weights.insert(label.clone(), weight.clone());
            layer.push(SurfaceRecord { label, carried, weight });
        }
        above = layer.iter().map(|s| s.label.clone()).collect();
        layers.push(layer);
    }
    let delta = &weights["Delta"];
    if rational::cmp(delta, &v[0]).is_ge() {
        return None;
    }
    let bottom = layers.last().expect("height >= 1");
    let bottom_labels: Vec<String> = bottom.iter().map(|s| s.label.clone()).collect();
    let pool: Vec<String> = base_labels.iter().chain(&bottom_labels).cloned().collect();
    let mut update = Vec::new();
    for s in bottom {
        // rows of T0 on the bottom layer are those of W, worth λ u_s
        let budget = &lambda * &s.weight;
        let mut row: Vec<String> = Vec::new();
        let mut spent = int(0);
        for _ in 0..rng.gen_range(1..=4) {
            let pick = pool.choose(rng).expect("nonempty").clone();
            let next = &spent + &weights[&pick];
            if rational::cmp(&next, &budget).is_le() {
                spent = next;
                row.push(pick);
            }
        }
        if row.is_empty() {
            return None;
        }
        update.push(row);
    }
    Some(LayeredFamilyDoc {
        base: SystemRecord { discs, lambda },
        layers,
        update,
        u: None,
        lambda: None,
        p_max: None,
    })
}

pub fn build_family(doc: &LayeredFamilyDoc) -> Result<LayeredFamily, DiscError> {
    let base: DiscSystem = doc.base.build()?;
    LayeredFamily::new(
        base,
        doc.layers.iter().map(|l| l.iter().map(|s| s.label.clone()).collect()).collect(),
        doc.layers.iter().map(|l| l.iter().map(|s| s.carried.clone()).collect()).collect(),
        doc.layers.iter().map(|l| l.iter().map(|s| s.weight.clone()).collect()).collect(),
    )
}

fn rows_differ(a: &IncidenceMatrix, b: &IncidenceMatrix) -> Vec<usize> {
    (0..a.dim()).filter(|&i| a.row(i) != b.row(i)).collect()
}

/// Block-structure facts for one pipeline run; `None` when all hold.
pub fn block_structure_problem(family: &LayeredFamily, out: &PipelineOutcome) -> Option<String> {
    if !family.respects_layer_rule(&out.w) {
        return Some("W breaks the layer zero-pattern".into());
    }
    if rows_differ(&out.w, &out.t0).iter().any(|&i| i != 0) {
        return Some("T0 differs from W outside the first row".into());
    }
    let bottom = family.bottom_range();
    if rows_differ(&out.t0, &out.t1).iter().any(|i| !bottom.contains(i)) {
        return Some("T1 differs from T0 outside the bottom layer".into());
    }
    if rows_differ(&out.t1, &out.t2).iter().any(|&i| i != 0) {
        return Some("T2 differs from T1 outside the first row".into());
    }
    None
}

fn pipeline_property(doc: &LayeredFamilyDoc) -> Option<String> {
    let family = build_family(doc).ok()?;
    let u = family.weight_vector();
    let lambda = family.base().lambda().clone();
    match pipeline(&family, &doc.update, &u, &lambda, None) {
        Ok(out) => {
            if let Some(problem) = block_structure_problem(&family, &out) {
                return Some(problem);
            }
            for c in &out.certificate.components {
                if rational::cmp(&c.bound.lower, &lambda).is_gt() {
                    return Some(format!(
                        "component {:?} grows faster than the surrogate",
                        c.subset.one_based()
                    ));
                }
            }
            None
        }
        Err(DiscError::PropagationTimeout { .. } | DiscError::NotSeparable { .. }) => None,
        Err(e) => Some(format!("pipeline failed: {e}")),
    }
}

fn smaller_families(doc: &LayeredFamilyDoc) -> Vec<LayeredFamilyDoc> {
    let mut out = Vec::new();
    for (i, row) in doc.update.iter().enumerate() {
        if row.len() > 1 {
            for drop in 0..row.len() {
                let mut smaller = doc.clone();
                smaller.update[i].remove(drop);
                out.push(smaller);
            }
        }
    }
    out
}

// ---- confluence ----

/// Random shape with random weights that respect both forests.
pub fn random_pattern<R: Rng + ?Sized>(rng: &mut R, n: usize) -> IntersectionPattern {
    let shape = loop {
        if let Some(s) = decode(n, rng.gen_range(0..space_size(n))) {
            break s;
        }
    };
    let mut w_s: Vec<Rational> = Vec::with_capacity(n);
    let mut w_delta: Vec<Option<Rational>> = vec![None; n];
    for i in 0..n {
        let cap = shape.s_parent[i].map_or_else(|| int(1), |p| w_s[p].clone());
        w_s.push(cap * Rational::new(rng.gen_range(1..=4).into(), 4.into()));
    }
    // Δ-parents may come after their children, so resolve by depth
    fn resolve<R: Rng + ?Sized>(i: usize, parent: &[Option<usize>], out: &mut [Option<Rational>], rng: &mut R) -> Rational {
        if let Some(w) = &out[i] {
            return w.clone();
        }
        let cap = match parent[i] {
            Some(p) => resolve(p, parent, out, rng),
            None => int(1),
        };
        let w = cap * Rational::new(rng.gen_range(1..=4).into(), 4.into());
        out[i] = Some(w.clone());
        w
    }
    for i in 0..n {
        resolve(i, &shape.delta_parent, &mut w_delta, rng);
    }
    let curves = (0..n)
        .map(|i| Curve {
            id: i as u32,
            delta_parent: shape.delta_parent[i].map(|p| p as u32),
            component: shape.component[i],
            s_parent: shape.s_parent[i].map(|p| p as u32),
            w_delta: w_delta[i].clone().expect("resolved"),
            w_s: w_s[i].clone(),
        })
        .collect();
    IntersectionPattern::new(curves, BTreeMap::from([(0, int(1)), (1, int(1))])).expect("valid by construction")
}

/// Confluence, antichain, partition, weight and factorization checks.
pub fn confluence_problem(pattern: &IntersectionPattern, cap: usize) -> Option<String> {
    let all = match enumerate_all_orders(pattern, cap) {
        Ok(all) => all,
        Err(e) => return Some(e.to_string()),
    };
    if !all.is_confluent() {
        return Some(format!("{} distinct results", all.results.len()));
    }
    let result = push_away(pattern, Strategy::LowestId).ok()?;
    if !all.results.contains_key(&result.normalized) {
        return Some("lowest-id result differs from the enumerated one".into());
    }
    if let Some(p) = result_problems(pattern, &result).into_iter().next() {
        return Some(p);
    }
    for &c in pattern.components().keys() {
        let restricted = pattern.component_restrict(c).ok()?;
        let alone = push_away(&restricted, Strategy::LowestId).ok()?;
        if alone.normalized != project(pattern, &result, c).ok()?.normalized {
            return Some(format!("component {c} does not factor"));
        }
    }
    None
}

fn smaller_patterns(p: &IntersectionPattern) -> Vec<IntersectionPattern> {
    let mut out = Vec::new();
    for drop in p.curves() {
        let curves: Vec<Curve> = p
            .curves()
            .iter()
            .filter(|c| c.id != drop.id)
            .map(|c| Curve {
                delta_parent: if c.delta_parent == Some(drop.id) { drop.delta_parent } else { c.delta_parent },
                s_parent: if c.s_parent == Some(drop.id) { drop.s_parent } else { c.s_parent },
                ..c.clone()
            })
            .collect();
        if let Ok(smaller) = IntersectionPattern::new(curves, p.components().clone()) {
            out.push(smaller);
        }
    }
    out
}

// ---- driver ----

#[allow(clippy::too_many_arguments)]
fn failure<C: Clone>(
    report: &mut Report,
    suite: &str,
    trial: usize,
    case: C,
    message: String,
    candidates: impl Fn(&C) -> Vec<C>,
    fails: impl Fn(&C) -> Option<String>,
    document: impl Fn(&C) -> Document,
) {
    let (small, why) = shrink(case, message, candidates, fails);
    report.flag(
        Verdict::Violated,
        Diagnostic::new(&format!("fuzz {suite}"), format!("trial {trial}"), why),
    );
    report.certify(Certificate {
        name: format!("counterexample from trial {trial}"),
        body: Body::Document(document_value(&document(&small))),
    });
}

pub const CONFLUENCE_CAP: usize = 1_000;

pub fn fuzz_suite(name: &str, trials: usize, seed: u64) -> Result<Report, UnknownSuite> {
    if !SUITES.contains(&name) {
        return Err(UnknownSuite(name.to_string()));
    }
    let mut report = Report::new(&format!("fuzz {name}"));
    report.seed = Some(seed);
    let mut rng = rng(seed);
    let mut failures = 0;
    for trial in 0..trials {
        let before = report.diagnostics.len();
        match name {
            "pf" => {
                let n = rng.gen_range(1..=5);
                let m = random_irreducible(&mut rng, n, 3);
                if let Some(why) = pf_property(&m) {
                    failure(&mut report, name, trial, m, why, smaller_matrices, pf_property, |m| {
                        Document::new(Payload::Matrix(m.clone()))
                    });
                }
            }
            "propagation" => {
                let c = PropagationCase::random(&mut rng);
                if let Some(why) = propagation_property(&c) {
                    failure(&mut report, name, trial, c, why, smaller_propagation, propagation_property, propagation_document);
                }
            }
            "pipeline" => {
                let doc = random_family(&mut rng);
                if let Some(why) = pipeline_property(&doc) {
                    failure(&mut report, name, trial, doc, why, smaller_families, pipeline_property, |d| {
                        Document::new(Payload::LayeredFamily(d.clone()))
                    });
                }
            }
            _ => {
                let n = rng.gen_range(0..=6);
                let p = random_pattern(&mut rng, n);
                let check = |p: &IntersectionPattern| confluence_problem(p, CONFLUENCE_CAP);
                if let Some(why) = check(&p) {
                    failure(&mut report, name, trial, p, why, smaller_patterns, check, |p| {
                        Document::new(Payload::Pattern(PatternDoc::from_pattern(p)))
                    });
                }
            }
        }
        if report.diagnostics.len() > before {
            failures += 1;
        }
    }
    report.certificates.insert(
        0,
        Certificate::values(
            "suite",
            vec![
                ("name", json!(name)),
                ("trials", json!(trials)),
                ("seed", json!(seed)),
                ("failures", json!(failures)),
            ],
        ),
    );
    Ok(report)
}
