use std::collections::BTreeMap;

use crate::matrix::{IncidenceMatrix, IndexSubset, WeightVector};
use crate::pf::{is_irreducible, scc_decompose, submatrix, PerronCertificate, PerronIteration, PfError};
use crate::rational::{self, Rational};

use super::system::{apply_tightening, build_bar_matrix, Enlargement};
use super::{DiscError, DiscSystem};

/// Refinement steps allowed per comparison before giving up as inconclusive.
pub const SEPARATION_CAP: usize = 4096;

/// Digits of agreement after which two overlapping brackets are taken to
/// enclose equal radii and the comparison stops as inconclusive.
const SEPARATION_DIGITS: u32 = 40;

/// Default power bound `n(n+1)`: the shortest walk to the tightened row has
/// length at most `n`, and one more application turns it into a strict drop.
pub fn default_p_max(n: usize) -> u32 {
    (n * (n + 1)) as u32
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentBound {
    pub subset: IndexSubset,
    pub bound: PerronCertificate,
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TighteningCertificate {
    /// Index -> least power with `(T^p u)_j < λ^p u_j`.
    pub strict_schedule: BTreeMap<usize, u32>,
    pub scc_used: IndexSubset,
    /// Bracket around the growth rate of the original system.
    pub before: PerronCertificate,
    /// Bracket around the largest component of the tightened matrix.
    pub after: PerronCertificate,
    /// Every component examined, in component order.
    pub components: Vec<ComponentBound>,
    pub verdict: bool,
}

/// Least power `p <= p_max` of strict drop for every index that has one.
pub fn strict_schedule(
    t: &IncidenceMatrix,
    u: &WeightVector,
    lambda: &Rational,
    p_max: u32,
) -> Result<BTreeMap<usize, u32>, DiscError> {
    if t.dim() != u.len() {
        return Err(PfError::DimensionMismatch {
            expected: t.dim(),
            found: u.len(),
        }
        .into());
    }
    let mut schedule = BTreeMap::new();
    let mut power = u.entries().to_vec();
    let mut bound = u.entries().to_vec();
    for p in 1..=p_max {
        power = t.apply(&power);
        for b in bound.iter_mut() {
            *b *= lambda;
        }
        for j in 0..t.dim() {
            if rational::cmp(&power[j], &bound[j]).is_lt() {
                schedule.entry(j).or_insert(p);
            }
        }
        if schedule.len() == t.dim() {
            break;
        }
    }
    Ok(schedule)
}

enum Separation {
    Below,
    NotBelow,
    Unresolved,
}

// Refines both brackets until `after.upper < before.lower` or
// `after.lower >= before.upper`. Brackets are monotone, so whichever
// outcome is reached first is final.
fn separate(before: &mut PerronIteration, after: &mut PerronIteration, cap: usize) -> Separation {
    let resolution = rational::ten_to_minus(SEPARATION_DIGITS);
    for step in 0..=cap {
        if after.cmp_upper_lower(before).is_lt() {
            return Separation::Below;
        }
        if before.cmp_upper_lower(after).is_le() {
            return Separation::NotBelow;
        }
        if step % 16 == 15 && before.narrower_than(&resolution) && after.narrower_than(&resolution) {
            return Separation::Unresolved;
        }
        before.step();
        after.step();
    }
    Separation::Unresolved
}

/// Certifies `λ(N) < λ(M)` for the irreducible submatrix `N` of
/// `after_matrix` on `scc`, where `M` is the incidence matrix of `before`.
pub fn certify_improvement(
    before: &DiscSystem,
    after_matrix: &IncidenceMatrix,
    scc: &IndexSubset,
) -> Result<TighteningCertificate, DiscError> {
    let sub = submatrix(after_matrix, scc)?;
    if !is_irreducible(&sub) {
        return Err(PfError::SubmatrixNotIrreducible.into());
    }
    let mut before_it = PerronIteration::new(before.incidence_matrix())?;
    let mut after_it = PerronIteration::new(&sub)?;
    let verdict = match separate(&mut before_it, &mut after_it, SEPARATION_CAP) {
        Separation::Below => true,
        Separation::NotBelow => false,
        Separation::Unresolved => {
            return Err(DiscError::NotSeparable {
                iterations: SEPARATION_CAP,
            })
        }
    };
    let after = after_it.certificate(true);
    Ok(TighteningCertificate {
        strict_schedule: BTreeMap::new(),
        scc_used: scc.clone(),
        before: before_it.certificate(true),
        after: after.clone(),
        components: vec![ComponentBound {
            subset: scc.clone(),
            bound: after,
            separated: verdict,
        }],
        verdict,
    })
}

/// Brackets every strongly connected component of `tightened` against the
/// growth rate of `base`. The reported `scc_used` is the component with the
/// largest certified lower bound.
pub(crate) fn certify_components(
    base: &IncidenceMatrix,
    tightened: &IncidenceMatrix,
    schedule: BTreeMap<usize, u32>,
    schedule_complete: bool,
) -> Result<TighteningCertificate, DiscError> {
    let mut before_it = PerronIteration::new(base)?;
    let mut components = Vec::new();
    for subset in scc_decompose(tightened) {
        let sub = submatrix(tightened, &subset)?;
        let mut it = PerronIteration::new(&sub)?;
        let separated = match separate(&mut before_it, &mut it, SEPARATION_CAP) {
            Separation::Below => true,
            Separation::NotBelow => false,
            // Only inconclusive when the verdict depends on it.
            Separation::Unresolved if schedule_complete => {
                return Err(DiscError::NotSeparable {
                    iterations: SEPARATION_CAP,
                })
            }
            Separation::Unresolved => false,
        };
        components.push(ComponentBound {
            subset,
            bound: it.certificate(true),
            separated,
        });
    }
    let before = before_it.certificate(true);
    let best = components
        .iter()
        .max_by(|a, b| {
            rational::cmp(&a.bound.lower, &b.bound.lower)
                // ties go to the earliest component
                .then_with(|| b.subset.cmp(&a.subset))
        })
        .expect("a matrix has at least one component");
    let verdict = schedule_complete
        && components
            .iter()
            .all(|c| c.separated && rational::cmp(&c.bound.upper, &before.lower).is_lt());
    Ok(TighteningCertificate {
        strict_schedule: schedule,
        scc_used: best.subset.clone(),
        after: best.bound.clone(),
        before,
        components,
        verdict,
    })
}

#[derive(Clone, Debug)]
pub struct TightenOutcome {
    pub mbar: IncidenceMatrix,
    pub mhat: IncidenceMatrix,
    pub weights: WeightVector,
    pub p_max: u32,
    pub certificate: TighteningCertificate,
}

/// Enlargement -> `M̄` -> `M̂`, the strict-drop schedule of `M̂` against the
/// enlarged weights, and certification of every component of `M̂` below the
/// growth rate of the base system.
pub fn tighten(e: &Enlargement, p_max: Option<u32>) -> Result<TightenOutcome, DiscError> {
    let delta = e
        .delta_index()
        .ok_or_else(|| DiscError::Malformed("enlargement has no tightening disc".into()))?;
    let mbar = build_bar_matrix(e)?;
    let mhat = apply_tightening(&mbar, delta, e.parallel_to())?;
    let weights = e.weight_vector();
    let p_max = p_max.unwrap_or_else(|| default_p_max(mhat.dim()));
    let schedule = strict_schedule(&mhat, &weights, e.base().lambda(), p_max)?;
    if let Some(index) = (0..mhat.dim()).find(|j| !schedule.contains_key(j)) {
        return Err(DiscError::PropagationTimeout { index, p_max });
    }
    let certificate = certify_components(e.base().incidence_matrix(), &mhat, schedule, true)?;
    Ok(TightenOutcome {
        mbar,
        mhat,
        weights,
        p_max,
        certificate,
    })
}
