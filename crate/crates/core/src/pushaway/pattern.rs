use std::collections::{BTreeMap, HashMap};

use num_traits::Signed;

use crate::rational::{self, Rational};

use super::{Forest, PushAwayError};

pub type CurveId = u32;
pub type ComponentId = u32;

/// One curve of `Δ ∩ S` with its place in both nesting forests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub id: CurveId,
    /// Smallest curve enclosing this one inside `Δ`.
    pub delta_parent: Option<CurveId>,
    pub component: ComponentId,
    /// Smallest curve enclosing this one inside its component of `S`.
    pub s_parent: Option<CurveId>,
    /// Weight of the subdisc of `Δ` bounded by the curve.
    pub w_delta: Rational,
    /// Weight of the subdisc of `S` bounded by the curve.
    pub w_s: Rational,
}

/// Validated intersection pattern. Curves are kept sorted by id; ancestor
/// chains of both forests are cached as positions into that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPattern {
    curves: Vec<Curve>,
    components: BTreeMap<ComponentId, Rational>,
    delta_ancestors: Vec<Vec<usize>>,
    s_ancestors: Vec<Vec<usize>>,
}

impl IntersectionPattern {
    pub fn new(
        mut curves: Vec<Curve>,
        components: BTreeMap<ComponentId, Rational>,
    ) -> Result<Self, PushAwayError> {
        curves.sort_by_key(|c| c.id);
        for pair in curves.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(PushAwayError::DuplicateCurve(pair[0].id));
            }
        }
        for (&id, w) in &components {
            if w.is_negative() {
                return Err(PushAwayError::NegativeWeight(format!("component {id}")));
            }
        }
        let position: HashMap<CurveId, usize> =
            curves.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
        let lookup = |curve: CurveId, parent: Option<CurveId>| -> Result<Option<usize>, PushAwayError> {
            parent
                .map(|p| {
                    position
                        .get(&p)
                        .copied()
                        .ok_or(PushAwayError::UnknownCurve { curve, parent: p })
                })
                .transpose()
        };
        let mut delta_parent = Vec::with_capacity(curves.len());
        let mut s_parent = Vec::with_capacity(curves.len());
        for c in &curves {
            if c.w_delta.is_negative() || c.w_s.is_negative() {
                return Err(PushAwayError::NegativeWeight(format!("curve {}", c.id)));
            }
            let w_comp = components
                .get(&c.component)
                .ok_or(PushAwayError::UnknownComponent(c.component))?;
            if rational::cmp(&c.w_s, w_comp).is_gt() {
                return Err(PushAwayError::ExceedsComponent(c.id));
            }
            delta_parent.push(lookup(c.id, c.delta_parent)?);
            s_parent.push(lookup(c.id, c.s_parent)?);
        }
        let delta_ancestors = ancestors(&delta_parent, &curves, Forest::Delta)?;
        let s_ancestors = ancestors(&s_parent, &curves, Forest::S)?;
        for (i, c) in curves.iter().enumerate() {
            if let Some(p) = delta_parent[i] {
                if rational::cmp(&c.w_delta, &curves[p].w_delta).is_gt() {
                    return Err(PushAwayError::WeightNotMonotone { forest: Forest::Delta, curve: c.id });
                }
            }
            if let Some(p) = s_parent[i] {
                if curves[p].component != c.component {
                    return Err(PushAwayError::ComponentMismatch { curve: c.id, parent: curves[p].id });
                }
                if rational::cmp(&c.w_s, &curves[p].w_s).is_gt() {
                    return Err(PushAwayError::WeightNotMonotone { forest: Forest::S, curve: c.id });
                }
            }
        }
        Ok(Self {
            curves,
            components,
            delta_ancestors,
            s_ancestors,
        })
    }

    pub fn empty(components: BTreeMap<ComponentId, Rational>) -> Result<Self, PushAwayError> {
        Self::new(Vec::new(), components)
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn components(&self) -> &BTreeMap<ComponentId, Rational> {
        &self.components
    }

    pub fn position(&self, id: CurveId) -> Option<usize> {
        self.curves.binary_search_by_key(&id, |c| c.id).ok()
    }

    /// Positions of the strict `Δ`-ancestors of the curve at `i`, innermost first.
    pub(crate) fn delta_ancestors(&self, i: usize) -> &[usize] {
        &self.delta_ancestors[i]
    }

    pub(crate) fn s_ancestors(&self, i: usize) -> &[usize] {
        &self.s_ancestors[i]
    }

    /// Curves of one component, with the `Δ`-forest induced on them.
    pub fn component_restrict(&self, component: ComponentId) -> Result<Self, PushAwayError> {
        let weight = self
            .components
            .get(&component)
            .ok_or(PushAwayError::UnknownComponent(component))?;
        let curves = self
            .curves
            .iter()
            .enumerate()
            .filter(|(_, c)| c.component == component)
            .map(|(i, c)| Curve {
                delta_parent: self.delta_ancestors[i]
                    .iter()
                    .find(|&&a| self.curves[a].component == component)
                    .map(|&a| self.curves[a].id),
                ..c.clone()
            })
            .collect();
        Self::new(curves, BTreeMap::from([(component, weight.clone())]))
    }

    /// True when no member of `set` lies strictly inside another in `S`.
    pub fn is_s_antichain(&self, set: &[CurveId]) -> bool {
        let positions: Vec<usize> = set.iter().filter_map(|&id| self.position(id)).collect();
        positions
            .iter()
            .all(|&i| !self.s_ancestors[i].iter().any(|a| positions.contains(a)))
    }
}

fn ancestors(
    parent: &[Option<usize>],
    curves: &[Curve],
    forest: Forest,
) -> Result<Vec<Vec<usize>>, PushAwayError> {
    let n = parent.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut chain = Vec::new();
        let mut at = parent[i];
        while let Some(p) = at {
            if p == i || chain.len() >= n {
                return Err(PushAwayError::Cycle { forest, curve: curves[i].id });
            }
            chain.push(p);
            at = parent[p];
        }
        out.push(chain);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    pub(crate) fn curve(id: CurveId, delta: Option<CurveId>, comp: ComponentId, s: Option<CurveId>) -> Curve {
        Curve {
            id,
            delta_parent: delta,
            component: comp,
            s_parent: s,
            w_delta: ratio(1, 4),
            w_s: ratio(1, 2),
        }
    }

    fn one_comp() -> BTreeMap<ComponentId, Rational> {
        BTreeMap::from([(0, int(1))])
    }

    #[test]
    fn accepts_forests() {
        let p = IntersectionPattern::new(
            vec![curve(1, Some(0), 0, None), curve(0, None, 0, None)],
            one_comp(),
        )
        .unwrap();
        assert_eq!(p.curves()[0].id, 0);
        assert_eq!(p.delta_ancestors(1), &[0]);
        assert!(p.s_ancestors(1).is_empty());
    }

    #[test]
    fn rejects_cycles() {
        let err = IntersectionPattern::new(
            vec![curve(0, None, 0, Some(1)), curve(1, None, 0, Some(0))],
            one_comp(),
        )
        .unwrap_err();
        assert!(matches!(err, PushAwayError::Cycle { forest: Forest::S, .. }));
        let err = IntersectionPattern::new(vec![curve(0, Some(0), 0, None)], one_comp()).unwrap_err();
        assert!(matches!(err, PushAwayError::Cycle { forest: Forest::Delta, curve: 0 }));
    }

    #[test]
    fn rejects_bad_references() {
        assert_eq!(
            IntersectionPattern::new(vec![curve(0, Some(7), 0, None)], one_comp()).unwrap_err(),
            PushAwayError::UnknownCurve { curve: 0, parent: 7 }
        );
        assert_eq!(
            IntersectionPattern::new(vec![curve(0, None, 3, None)], one_comp()).unwrap_err(),
            PushAwayError::UnknownComponent(3)
        );
        assert_eq!(
            IntersectionPattern::new(vec![curve(0, None, 0, None), curve(0, None, 0, None)], one_comp())
                .unwrap_err(),
            PushAwayError::DuplicateCurve(0)
        );
    }

    #[test]
    fn s_parent_stays_in_component() {
        let comps = BTreeMap::from([(0, int(1)), (1, int(1))]);
        assert_eq!(
            IntersectionPattern::new(vec![curve(0, None, 0, None), curve(1, None, 1, Some(0))], comps)
                .unwrap_err(),
            PushAwayError::ComponentMismatch { curve: 1, parent: 0 }
        );
    }

    #[test]
    fn weights_are_monotone() {
        let mut child = curve(1, None, 0, Some(0));
        child.w_s = int(1);
        assert_eq!(
            IntersectionPattern::new(vec![curve(0, None, 0, None), child], one_comp()).unwrap_err(),
            PushAwayError::WeightNotMonotone { forest: Forest::S, curve: 1 }
        );
        let mut big = curve(0, None, 0, None);
        big.w_s = int(2);
        assert_eq!(
            IntersectionPattern::new(vec![big], one_comp()).unwrap_err(),
            PushAwayError::ExceedsComponent(0)
        );
    }

    #[test]
    fn restriction_induces_delta_forest() {
        let comps = BTreeMap::from([(0, int(1)), (1, int(1))]);
        let p = IntersectionPattern::new(
            vec![
                curve(0, None, 0, None),
                curve(1, Some(0), 1, None),
                curve(2, Some(1), 0, None),
            ],
            comps,
        )
        .unwrap();
        let r = p.component_restrict(0).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.curves()[1].delta_parent, Some(0));
        let r1 = p.component_restrict(1).unwrap();
        assert_eq!(r1.curves()[0].delta_parent, None);
        assert_eq!(p.component_restrict(5).unwrap_err(), PushAwayError::UnknownComponent(5));
    }

    #[test]
    fn single_component_restriction_is_identity() {
        let p = IntersectionPattern::new(
            vec![curve(0, None, 0, None), curve(1, Some(0), 0, Some(0))],
            one_comp(),
        )
        .unwrap();
        assert_eq!(p.component_restrict(0).unwrap(), p);
    }
}
