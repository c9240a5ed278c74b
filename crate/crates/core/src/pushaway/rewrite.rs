use std::collections::{BTreeMap, BTreeSet};

use crate::rational::Rational;

use super::pattern::{ComponentId, CurveId, IntersectionPattern};
use super::PushAwayError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Alive,
    Glued,
    Removed,
    DiscardedGlued,
}

/// One surgery: `curve` was glued, swallowing the listed curves of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryEvent {
    pub curve: CurveId,
    pub removed: Vec<CurveId>,
    pub discarded: Vec<CurveId>,
}

/// Surgery state over a borrowed pattern. Transitions return new states.
#[derive(Clone, Debug)]
pub struct RewriteState<'a> {
    pattern: &'a IntersectionPattern,
    status: Vec<Status>,
    events: Vec<SurgeryEvent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy<'o> {
    LowestId,
    Supplied(&'o [CurveId]),
}

/// Order-independent part of a result: the surviving patches and the
/// component weights they produce. Which swallowed curves were removed and
/// which were discarded after gluing depends on the order, so it is left out.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    pub glued: Vec<CurveId>,
    pub final_weights: Vec<(ComponentId, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushAwayResult {
    pub glued: BTreeSet<CurveId>,
    pub removed: BTreeSet<CurveId>,
    pub discarded: BTreeSet<CurveId>,
    pub final_weights: BTreeMap<ComponentId, Rational>,
    pub events: Vec<SurgeryEvent>,
    pub normalized: NormalForm,
}

impl<'a> RewriteState<'a> {
    pub fn new(pattern: &'a IntersectionPattern) -> Self {
        Self {
            pattern,
            status: vec![Status::Alive; pattern.len()],
            events: Vec::new(),
        }
    }

    pub fn pattern(&self) -> &'a IntersectionPattern {
        self.pattern
    }

    pub fn status(&self, id: CurveId) -> Option<Status> {
        self.pattern.position(id).map(|i| self.status[i])
    }

    pub fn events(&self) -> &[SurgeryEvent] {
        &self.events
    }

    pub fn is_terminal(&self) -> bool {
        !self.status.contains(&Status::Alive)
    }

    fn id(&self, i: usize) -> CurveId {
        self.pattern.curves()[i].id
    }

    // An alive curve strictly inside curve `i` in Δ, if any.
    fn alive_delta_descendant(&self, i: usize) -> Option<usize> {
        (0..self.status.len())
            .find(|&k| self.status[k] == Status::Alive && self.pattern.delta_ancestors(k).contains(&i))
    }

    /// Alive curves that are innermost in `Δ` among alive curves, by id.
    pub fn candidates(&self) -> Vec<CurveId> {
        (0..self.status.len())
            .filter(|&i| self.status[i] == Status::Alive && self.alive_delta_descendant(i).is_none())
            .map(|i| self.id(i))
            .collect()
    }

    pub fn surger(&self, gamma: CurveId) -> Result<Self, PushAwayError> {
        let g = self
            .pattern
            .position(gamma)
            .ok_or(PushAwayError::NotAlive(gamma))?;
        if self.status[g] != Status::Alive {
            return Err(PushAwayError::NotAlive(gamma));
        }
        if let Some(k) = self.alive_delta_descendant(g) {
            return Err(PushAwayError::NotInnermost {
                curve: gamma,
                descendant: self.id(k),
            });
        }
        let mut next = self.clone();
        next.status[g] = Status::Glued;
        let mut event = SurgeryEvent {
            curve: gamma,
            removed: Vec::new(),
            discarded: Vec::new(),
        };
        for k in 0..next.status.len() {
            if !self.pattern.s_ancestors(k).contains(&g) {
                continue;
            }
            match next.status[k] {
                Status::Alive => {
                    next.status[k] = Status::Removed;
                    event.removed.push(self.id(k));
                }
                Status::Glued => {
                    next.status[k] = Status::DiscardedGlued;
                    event.discarded.push(self.id(k));
                }
                Status::Removed | Status::DiscardedGlued => {}
            }
        }
        next.events.push(event);
        Ok(next)
    }

    /// Summary of a terminal state.
    pub fn result(&self) -> PushAwayResult {
        let collect = |s: Status| -> BTreeSet<CurveId> {
            (0..self.status.len())
                .filter(|&i| self.status[i] == s)
                .map(|i| self.id(i))
                .collect()
        };
        let glued = collect(Status::Glued);
        let final_weights = closed_form_weights(self.pattern, &glued);
        PushAwayResult {
            normalized: NormalForm {
                glued: glued.iter().copied().collect(),
                final_weights: final_weights.iter().map(|(&c, w)| (c, w.clone())).collect(),
            },
            removed: collect(Status::Removed),
            discarded: collect(Status::DiscardedGlued),
            glued,
            final_weights,
            events: self.events.clone(),
        }
    }
}

/// `w_component(C) - Σ w_s(γ) + Σ w_delta(γ)` over glued `γ` in `C`.
pub fn closed_form_weights(
    pattern: &IntersectionPattern,
    glued: &BTreeSet<CurveId>,
) -> BTreeMap<ComponentId, Rational> {
    let mut weights = pattern.components().clone();
    for c in pattern.curves().iter().filter(|c| glued.contains(&c.id)) {
        let w = weights.get_mut(&c.component).expect("validated component");
        *w = &*w - &c.w_s + &c.w_delta;
    }
    weights
}

/// Replays the event log: each surgery trades `w_s` for `w_delta`, and
/// each discarded patch gives its trade back.
pub fn weights_from_events(
    pattern: &IntersectionPattern,
    events: &[SurgeryEvent],
) -> BTreeMap<ComponentId, Rational> {
    let mut weights = pattern.components().clone();
    let curve = |id: CurveId| &pattern.curves()[pattern.position(id).expect("logged curve")];
    for e in events {
        let c = curve(e.curve);
        let w = weights.get_mut(&c.component).expect("validated component");
        *w = &*w + &c.w_delta - &c.w_s;
        for &d in &e.discarded {
            let dc = curve(d);
            *w = &*w - &dc.w_delta + &dc.w_s;
        }
    }
    weights
}

/// Surgers until no curve is alive.
pub fn push_away(
    pattern: &IntersectionPattern,
    strategy: Strategy<'_>,
) -> Result<PushAwayResult, PushAwayError> {
    let mut state = RewriteState::new(pattern);
    match strategy {
        Strategy::LowestId => {
            while let Some(&gamma) = state.candidates().first() {
                state = state.surger(gamma)?;
            }
        }
        Strategy::Supplied(order) => {
            for &gamma in order {
                state = state.surger(gamma)?;
            }
            if !state.is_terminal() {
                let left = state.candidates().first().copied().expect("alive curves have a Δ-leaf");
                return Err(PushAwayError::IncompleteOrder(left));
            }
        }
    }
    Ok(state.result())
}

/// Every maximal surgery sequence, grouped by normal form. Each result keeps
/// the first order (in lexicographic order) that reached it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub results: BTreeMap<NormalForm, Vec<CurveId>>,
    pub sequences: usize,
}

impl Enumeration {
    pub fn is_confluent(&self) -> bool {
        self.results.len() == 1
    }
}

pub fn enumerate_all_orders(
    pattern: &IntersectionPattern,
    cap: usize,
) -> Result<Enumeration, PushAwayError> {
    let mut out = Enumeration {
        results: BTreeMap::new(),
        sequences: 0,
    };
    let mut order = Vec::new();
    explore(&RewriteState::new(pattern), &mut order, cap, &mut out)?;
    Ok(out)
}

fn explore(
    state: &RewriteState<'_>,
    order: &mut Vec<CurveId>,
    cap: usize,
    out: &mut Enumeration,
) -> Result<(), PushAwayError> {
    let candidates = state.candidates();
    if candidates.is_empty() {
        out.sequences += 1;
        if out.sequences > cap {
            return Err(PushAwayError::EnumerationCapExceeded { cap });
        }
        out.results
            .entry(state.result().normalized)
            .or_insert_with(|| order.clone());
        return Ok(());
    }
    for gamma in candidates {
        order.push(gamma);
        explore(&state.surger(gamma)?, order, cap, out)?;
        order.pop();
    }
    Ok(())
}

/// The part of a full run that concerns one component.
pub fn project(
    pattern: &IntersectionPattern,
    result: &PushAwayResult,
    component: ComponentId,
) -> Result<PushAwayResult, PushAwayError> {
    let weight = result
        .final_weights
        .get(&component)
        .ok_or(PushAwayError::UnknownComponent(component))?;
    let inside = |id: &CurveId| {
        pattern
            .position(*id)
            .is_some_and(|i| pattern.curves()[i].component == component)
    };
    let keep = |set: &BTreeSet<CurveId>| set.iter().copied().filter(inside).collect::<BTreeSet<_>>();
    let glued = keep(&result.glued);
    let final_weights = BTreeMap::from([(component, weight.clone())]);
    Ok(PushAwayResult {
        normalized: NormalForm {
            glued: glued.iter().copied().collect(),
            final_weights: vec![(component, weight.clone())],
        },
        removed: keep(&result.removed),
        discarded: keep(&result.discarded),
        glued,
        final_weights,
        events: result.events.iter().filter(|e| inside(&e.curve)).cloned().collect(),
    })
}

/// Per-component change `final - initial`. Reported, never asserted: a
/// decrease needs `w_delta <= w_s` on glued curves, which is the caller's
/// hypothesis.
pub fn weight_delta(
    pattern: &IntersectionPattern,
    result: &PushAwayResult,
) -> BTreeMap<ComponentId, Rational> {
    pattern
        .components()
        .iter()
        .map(|(&c, w)| {
            let after = result.final_weights.get(&c).unwrap_or(w);
            (c, after - w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pushaway::pattern::Curve;
    use crate::rational::{int, ratio};

    fn curve(id: CurveId, delta: Option<CurveId>, s: Option<CurveId>) -> Curve {
        Curve {
            id,
            delta_parent: delta,
            component: 0,
            s_parent: s,
            w_delta: ratio(1, 4),
            w_s: ratio(1, 2),
        }
    }

    fn pattern(curves: Vec<Curve>) -> IntersectionPattern {
        IntersectionPattern::new(curves, BTreeMap::from([(0, int(1))])).unwrap()
    }

    fn concentric() -> IntersectionPattern {
        pattern(vec![curve(0, None, None), curve(1, None, Some(0))])
    }

    #[test]
    fn single_curve() {
        let p = pattern(vec![curve(0, None, None)]);
        let s = RewriteState::new(&p).surger(0).unwrap();
        assert_eq!(s.status(0), Some(Status::Glued));
        assert!(s.is_terminal());
    }

    #[test]
    fn outer_first_removes_inner() {
        let p = concentric();
        let s = RewriteState::new(&p).surger(0).unwrap();
        assert_eq!(s.status(0), Some(Status::Glued));
        assert_eq!(s.status(1), Some(Status::Removed));
        assert_eq!(s.surger(1).unwrap_err(), PushAwayError::NotAlive(1));
    }

    #[test]
    fn inner_first_is_discarded() {
        let p = concentric();
        let s = RewriteState::new(&p).surger(1).unwrap().surger(0).unwrap();
        assert_eq!(s.status(1), Some(Status::DiscardedGlued));
        assert_eq!(s.status(0), Some(Status::Glued));
        assert_eq!(s.events()[1].discarded, vec![1]);
    }

    #[test]
    fn innermost_in_delta_only() {
        let p = pattern(vec![curve(0, None, None), curve(1, Some(0), None)]);
        assert_eq!(
            RewriteState::new(&p).surger(0).unwrap_err(),
            PushAwayError::NotInnermost { curve: 0, descendant: 1 }
        );
        assert_eq!(RewriteState::new(&p).candidates(), vec![1]);
    }

    #[test]
    fn empty_pattern() {
        let p = pattern(vec![]);
        let r = push_away(&p, Strategy::LowestId).unwrap();
        assert!(r.glued.is_empty());
        assert_eq!(r.final_weights, *p.components());
        assert_eq!(weight_delta(&p, &r), BTreeMap::from([(0, int(0))]));
    }

    #[test]
    fn concentric_pair_is_confluent() {
        let p = concentric();
        let all = enumerate_all_orders(&p, 10).unwrap();
        assert_eq!(all.sequences, 2);
        assert!(all.is_confluent());
        assert_eq!(all.results.keys().next().unwrap().glued, vec![0]);
        for order in [&[0][..], &[1, 0][..]] {
            let r = push_away(&p, Strategy::Supplied(order)).unwrap();
            assert_eq!(r.glued, BTreeSet::from([0]));
        }
    }

    #[test]
    fn disjoint_pair_glues_both() {
        let p = pattern(vec![curve(0, None, None), curve(1, None, None)]);
        let all = enumerate_all_orders(&p, 10).unwrap();
        assert_eq!(all.sequences, 2);
        assert_eq!(all.results.keys().next().unwrap().glued, vec![0, 1]);
        assert!(all.is_confluent());
    }

    #[test]
    fn enumeration_cap() {
        let p = pattern((0..4).map(|i| curve(i, None, None)).collect());
        assert_eq!(
            enumerate_all_orders(&p, 23).unwrap_err(),
            PushAwayError::EnumerationCapExceeded { cap: 23 }
        );
        assert_eq!(enumerate_all_orders(&p, 24).unwrap().sequences, 24);
    }

    #[test]
    fn supplied_order_must_finish() {
        let p = pattern(vec![curve(0, None, None), curve(1, None, None)]);
        assert_eq!(
            push_away(&p, Strategy::Supplied(&[1])).unwrap_err(),
            PushAwayError::IncompleteOrder(0)
        );
    }

    #[test]
    fn weight_delta_signs() {
        let mut c = curve(0, None, None);
        let p = pattern(vec![c.clone()]);
        let r = push_away(&p, Strategy::LowestId).unwrap();
        assert_eq!(weight_delta(&p, &r)[&0], ratio(-1, 4));
        c.w_delta = ratio(3, 4);
        let p = pattern(vec![c]);
        let r = push_away(&p, Strategy::LowestId).unwrap();
        assert_eq!(weight_delta(&p, &r)[&0], ratio(1, 4));
    }

    #[test]
    fn event_log_matches_closed_form() {
        let mut inner = curve(1, None, Some(0));
        inner.w_s = ratio(1, 3);
        inner.w_delta = ratio(1, 5);
        let p = pattern(vec![curve(0, None, None), inner]);
        let r = push_away(&p, Strategy::Supplied(&[1, 0])).unwrap();
        assert_eq!(weights_from_events(&p, &r.events), r.final_weights);
        assert_eq!(r.final_weights[&0], ratio(3, 4));
    }

    #[test]
    fn projection_matches_restriction() {
        let mut a = curve(0, None, None);
        a.component = 1;
        let b = curve(1, Some(0), None);
        let p = IntersectionPattern::new(vec![a, b], BTreeMap::from([(0, int(1)), (1, int(2))])).unwrap();
        let full = push_away(&p, Strategy::LowestId).unwrap();
        for comp in [0, 1] {
            let restricted = push_away(&p.component_restrict(comp).unwrap(), Strategy::LowestId).unwrap();
            assert_eq!(restricted.normalized, project(&p, &full, comp).unwrap().normalized);
        }
    }
}
