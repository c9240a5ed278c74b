use std::collections::{BTreeMap, HashMap, VecDeque};
use std::ops::Range;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::matrix::{IncidenceMatrix, IndexSubset, WeightVector};
use crate::pf::{check_subinvariance, row_copy, submatrix, PfError};
use crate::rational::{self, Rational};

use super::certify::{certify_components, default_p_max, strict_schedule, TighteningCertificate};
use super::system::{count_row, index_labels, Enlargement, Label};
use super::{DiscError, DiscSystem};

/// Surfaces `S^{h0} = E, S^{h0-1}, ..., S^0` with their carried-by data.
///
/// `layers[0]` is `S^{h0-1}` and the last entry is `S^0`, the bottom layer
/// whose last surface is the tightening disc. A surface in `layers[t]` is
/// carried only by base discs and by surfaces of the layer directly above
/// (`layers[t-1]`, or the base system for `t = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredFamily {
    base: DiscSystem,
    layers: Vec<Vec<Label>>,
    carried: Vec<Vec<Vec<Label>>>,
    weights: Vec<Vec<Rational>>,
}

impl LayeredFamily {
    pub fn new(
        base: DiscSystem,
        layers: Vec<Vec<Label>>,
        carried: Vec<Vec<Vec<Label>>>,
        weights: Vec<Vec<Rational>>,
    ) -> Result<Self, DiscError> {
        if layers.is_empty() {
            return Err(DiscError::Malformed("a layered family needs height >= 1".into()));
        }
        if carried.len() != layers.len() || weights.len() != layers.len() {
            return Err(DiscError::Malformed(
                "carried and weights must list one entry per layer".into(),
            ));
        }
        for (t, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(DiscError::Malformed(format!("layer {t} is empty")));
            }
            if carried[t].len() != layer.len() || weights[t].len() != layer.len() {
                return Err(DiscError::Malformed(format!(
                    "layer {t}: carried/weights do not match its surfaces"
                )));
            }
            if let Some(s) = weights[t].iter().position(|w| *w < Rational::zero()) {
                return Err(DiscError::Malformed(format!(
                    "weight of surface {:?} is negative",
                    layer[s]
                )));
            }
        }
        let family = Self {
            base,
            layers,
            carried,
            weights,
        };
        family.check_layer_rule()?;
        Ok(family)
    }

    pub fn base(&self) -> &DiscSystem {
        &self.base
    }

    pub fn height(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Label>] {
        &self.layers
    }

    pub fn carried(&self) -> &[Vec<Vec<Label>>] {
        &self.carried
    }

    pub fn layer_weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.base.len() + self.layers.iter().map(Vec::len).sum::<usize>()
    }

    /// All labels in matrix order: base discs, then layers top to bottom.
    pub fn order(&self) -> Vec<Label> {
        self.base
            .labels()
            .iter()
            .chain(self.layers.iter().flatten())
            .cloned()
            .collect()
    }

    /// Base weights followed by surface weights, in matrix order.
    pub fn weight_vector(&self) -> WeightVector {
        WeightVector::new(
            self.base
                .weights()
                .entries()
                .iter()
                .chain(self.weights.iter().flatten())
                .cloned()
                .collect(),
        )
        .expect("base weights are not all zero")
    }

    /// Matrix indices of the surfaces in `layers[t]`.
    pub fn layer_range(&self, t: usize) -> Range<usize> {
        let start = self.base.len() + self.layers[..t].iter().map(Vec::len).sum::<usize>();
        start..start + self.layers[t].len()
    }

    /// Matrix indices of the bottom layer `S^0`.
    pub fn bottom_range(&self) -> Range<usize> {
        self.layer_range(self.height() - 1)
    }

    /// Base discs followed by the bottom layer: the rows kept in `T3`.
    pub fn kept_indices(&self) -> IndexSubset {
        let idx = (0..self.base.len()).chain(self.bottom_range()).collect();
        IndexSubset::new(idx, self.dim()).expect("kept indices are increasing")
    }

    fn check_layer_rule(&self) -> Result<(), DiscError> {
        let mut all = HashMap::new();
        index_labels(&self.order(), &mut all)?;
        for (t, layer) in self.layers.iter().enumerate() {
            let above: &[Label] = if t == 0 { &[] } else { &self.layers[t - 1] };
            for (surface, image) in layer.iter().zip(&self.carried[t]) {
                for target in image {
                    let allowed = self.base.labels().contains(target) || above.contains(target);
                    if allowed {
                        continue;
                    }
                    if all.contains_key(target) {
                        return Err(DiscError::LayerRuleViolation {
                            surface: surface.clone(),
                            target: target.clone(),
                        });
                    }
                    return Err(DiscError::UnknownLabel {
                        label: target.clone(),
                        context: format!("carried data of {surface}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Zero-pattern predicate for a matrix in this family's order: base rows
    /// vanish outside the base columns, and a surface row is supported on
    /// base columns and the layer directly above.
    pub fn respects_layer_rule(&self, w: &IncidenceMatrix) -> bool {
        if w.dim() != self.dim() {
            return false;
        }
        let k = self.base.len();
        let base_ok = (0..k).all(|i| (k..w.dim()).all(|j| !w.is_positive(i, j)));
        base_ok
            && (0..self.height()).all(|t| {
                let above = if t == 0 { 0..0 } else { self.layer_range(t - 1) };
                self.layer_range(t).all(|i| {
                    (k..w.dim()).all(|j| above.contains(&j) || !w.is_positive(i, j))
                })
            })
    }
}

/// Block matrix `W` of the family, rows and columns in [`LayeredFamily::order`].
pub fn build_layer_matrix(family: &LayeredFamily) -> Result<IncidenceMatrix, DiscError> {
    let order = family.order();
    let n = order.len();
    let mut columns = HashMap::new();
    index_labels(&order, &mut columns)?;
    let mut rows: Vec<Vec<BigUint>> = family
        .base
        .incidence_matrix()
        .rows()
        .map(|r| {
            let mut row = r.to_vec();
            row.resize(n, BigUint::zero());
            row
        })
        .collect();
    for (layer, carried) in family.layers.iter().zip(&family.carried) {
        for (surface, image) in layer.iter().zip(carried) {
            rows.push(count_row(image, &columns, n, &format!("carried data of {surface}"))?);
        }
    }
    let w = IncidenceMatrix::from_rows(rows)?;
    debug_assert!(family.respects_layer_rule(&w));
    Ok(w)
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub w: IncidenceMatrix,
    pub t0: IncidenceMatrix,
    pub t1: IncidenceMatrix,
    pub t2: IncidenceMatrix,
    pub t3: IncidenceMatrix,
    /// Indices of `E ∪ D` inside `W`.
    pub kept: IndexSubset,
    pub p_max: u32,
    /// `u_Δ < u_{E_1}`.
    pub strict_tightening: bool,
    pub certificate: TighteningCertificate,
}

/// Runs `W -> T0 -> T1 -> T2 -> T3`.
///
/// * `T0`: the row of `Δ` (last index) copied over the first row of `W`.
/// * `T1`: the bottom-layer rows replaced by `d_update`, each a multiset over
///   base discs and bottom-layer surfaces.
/// * `T2`: the row of `Δ` of `T1` copied over the first row.
/// * `T3`: `T2` restricted to base discs and the bottom layer; equals `M̂`.
///
/// The certificate records the strict-drop schedule of `T2` against `u` and
/// brackets every component of `T3` below the growth rate of the base.
pub fn pipeline(
    family: &LayeredFamily,
    d_update: &[Vec<Label>],
    u: &WeightVector,
    lambda: &Rational,
    p_max: Option<u32>,
) -> Result<PipelineOutcome, DiscError> {
    let w = build_layer_matrix(family)?;
    let m = w.dim();
    if u.len() != m {
        return Err(PfError::DimensionMismatch {
            expected: m,
            found: u.len(),
        }
        .into());
    }
    let surrogate = check_subinvariance(&w, u, lambda)?;
    if let Some(&index) = surrogate.violated_indices.first() {
        return Err(DiscError::SurrogateViolation { index });
    }

    let delta = m - 1;
    let t0 = row_copy(&w, delta, 0)?;
    let t1 = replace_bottom_rows(family, &t0, d_update)?;

    let t0u = t0.apply(u.entries());
    let t1u = t1.apply(u.entries());
    if let Some(index) = family.bottom_range().find(|&j| rational::cmp(&t1u[j], &t0u[j]).is_gt()) {
        return Err(DiscError::NonIncreaseViolation { index });
    }

    let t2 = row_copy(&t1, delta, 0)?;
    let kept = family.kept_indices();
    let t3 = submatrix(&t2, &kept)?;

    let bottom = family.bottom_range();
    let e = Enlargement::new(
        family.base.clone(),
        family.layers[family.height() - 1].clone(),
        bottom.clone().map(|j| u[j].clone()).collect(),
        d_update.to_vec(),
    )?;
    let mhat = row_copy(&e.assemble()?, e.dim() - 1, 0)?;
    if mhat != t3 {
        return Err(PfError::LemmaViolation {
            lemma: "T3 equals the tightened enlargement matrix",
            index: 0,
            power: 1,
        }
        .into());
    }

    let p_max = p_max.unwrap_or_else(|| default_p_max(m));
    let strict_tightening = rational::cmp(&u[delta], &u[0]).is_lt();
    let schedule = strict_schedule(&t2, u, lambda, p_max)?;
    let mut complete = schedule.len() == m;
    if strict_tightening {
        let sub = check_subinvariance(&t2, u, lambda)?;
        if let Some(&index) = sub.violated_indices.first() {
            return Err(PfError::LemmaViolation {
                lemma: "T2 u <= λu",
                index,
                power: 1,
            }
            .into());
        }
        check_propagation(&t2, &schedule)?;
        if let Some(index) = (0..m).find(|j| !schedule.contains_key(j)) {
            return Err(DiscError::PropagationTimeout { index, p_max });
        }
    } else {
        complete = false;
    }

    let certificate = certify_components(
        family.base.incidence_matrix(),
        &t3,
        schedule,
        complete,
    )?;
    Ok(PipelineOutcome {
        w,
        t0,
        t1,
        t2,
        t3,
        kept,
        p_max,
        strict_tightening,
        certificate,
    })
}

fn replace_bottom_rows(
    family: &LayeredFamily,
    t0: &IncidenceMatrix,
    d_update: &[Vec<Label>],
) -> Result<IncidenceMatrix, DiscError> {
    let bottom = family.bottom_range();
    if d_update.len() != bottom.len() {
        return Err(PfError::DimensionMismatch {
            expected: bottom.len(),
            found: d_update.len(),
        }
        .into());
    }
    let order = family.order();
    let mut columns = HashMap::new();
    for j in (0..family.base.len()).chain(bottom.clone()) {
        columns.insert(order[j].clone(), j);
    }
    let mut t1 = t0.clone();
    for (i, image) in bottom.zip(d_update) {
        if image.is_empty() {
            return Err(DiscError::EmptyImage(order[i].clone()));
        }
        let row = count_row(image, &columns, t0.dim(), &format!("updated image of {}", order[i]))?;
        for (j, x) in row.into_iter().enumerate() {
            t1.set(i, j, x);
        }
    }
    Ok(t1)
}

// With Tu <= λu and (Tu)_1 < λu_1, an index whose shortest walk to the first
// row has length q must drop strictly by power q + 1.
fn check_propagation(t: &IncidenceMatrix, schedule: &BTreeMap<usize, u32>) -> Result<(), DiscError> {
    let n = t.dim();
    let mut reverse = vec![Vec::new(); n];
    for (i, succ) in t.adjacency().into_iter().enumerate() {
        for j in succ {
            reverse[j].push(i);
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in &reverse[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    for (j, &d) in dist.iter().enumerate() {
        if d == usize::MAX {
            continue;
        }
        let bound = (d + 1) as u32;
        if schedule.get(&j).is_none_or(|&p| p > bound) && (bound as usize) <= n * (n + 1) {
            return Err(PfError::LemmaViolation {
                lemma: "strict drop propagation",
                index: j,
                power: bound,
            }
            .into());
        }
    }
    Ok(())
}
