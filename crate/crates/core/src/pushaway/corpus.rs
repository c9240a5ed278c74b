//! Generators of intersection patterns.
//!
//! An `n`-curve pattern is a point of a mixed-radix space: curve `i` picks an
//! `S`-parent among `{none, 0, .., i-1}` (so every labelled `S`-forest occurs
//! once), a `Δ`-parent among `{none, 0, .., n-1}` (rejected if cyclic), and a
//! component bit that only roots of the `S`-forest may set.

use std::collections::BTreeMap;

use rand::Rng;

use crate::rational::{int, Rational};

use super::pattern::{ComponentId, Curve, CurveId, IntersectionPattern};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub s_parent: Vec<Option<usize>>,
    pub delta_parent: Vec<Option<usize>>,
    pub component: Vec<ComponentId>,
}

fn radices(n: usize) -> Vec<u64> {
    let mut r: Vec<u64> = (0..n).map(|i| i as u64 + 1).collect();
    r.extend(std::iter::repeat_n(n as u64 + 1, n));
    r.extend(std::iter::repeat_n(2, n));
    r
}

/// Size of the raw index space for `n` curves (valid and invalid points).
pub fn space_size(n: usize) -> u64 {
    radices(n).iter().product()
}

/// Decodes a point of the index space; `None` when it is not a canonical
/// shape (cyclic `Δ`-forest or a component bit on a non-root).
pub fn decode(n: usize, mut index: u64) -> Option<Shape> {
    let mut digits = Vec::with_capacity(3 * n);
    for r in radices(n) {
        digits.push((index % r) as usize);
        index /= r;
    }
    let parent = |d: usize| d.checked_sub(1);
    let s_parent: Vec<Option<usize>> = digits[..n].iter().map(|&d| parent(d)).collect();
    let delta_parent: Vec<Option<usize>> = digits[n..2 * n].iter().map(|&d| parent(d)).collect();
    for i in 0..n {
        let mut at = delta_parent[i];
        let mut steps = 0;
        while let Some(p) = at {
            if p == i || steps >= n {
                return None;
            }
            steps += 1;
            at = delta_parent[p];
        }
    }
    let mut component = vec![0; n];
    for i in 0..n {
        let bit = digits[2 * n + i] as ComponentId;
        match s_parent[i] {
            None => component[i] = bit,
            Some(_) if bit != 0 => return None,
            // parents come first, so the root's component is already known
            Some(p) => component[i] = component[p],
        }
    }
    Some(Shape {
        s_parent,
        delta_parent,
        component,
    })
}

fn depth(parent: &[Option<usize>], mut i: usize) -> i64 {
    let mut d = 0;
    while let Some(p) = parent[i] {
        d += 1;
        i = p;
    }
    d
}

/// Realizes a shape with weights that shrink with depth, which satisfies the
/// monotonicity invariants. Both components are always declared.
pub fn realize(shape: &Shape) -> IntersectionPattern {
    let n = shape.s_parent.len();
    let curves = (0..n)
        .map(|i| Curve {
            id: i as CurveId,
            delta_parent: shape.delta_parent[i].map(|p| p as CurveId),
            component: shape.component[i],
            s_parent: shape.s_parent[i].map(|p| p as CurveId),
            w_delta: Rational::new(1.into(), (depth(&shape.delta_parent, i) + 2).into()),
            w_s: Rational::new(1.into(), (depth(&shape.s_parent, i) + 2).into()),
        })
        .collect();
    IntersectionPattern::new(curves, BTreeMap::from([(0, int(1)), (1, int(1))]))
        .expect("corpus shapes are valid")
}

/// Every canonical shape with at most `exhaustive_up_to` curves, then evenly
/// strided samples for larger sizes up to `max_curves`, stopping at `cap`
/// patterns in total.
pub fn corpus(max_curves: usize, exhaustive_up_to: usize, cap: usize) -> Vec<IntersectionPattern> {
    let mut out = Vec::new();
    for n in 0..=max_curves.min(exhaustive_up_to) {
        for index in 0..space_size(n) {
            if out.len() >= cap {
                return out;
            }
            if let Some(shape) = decode(n, index) {
                out.push(realize(&shape));
            }
        }
    }
    let sampled: Vec<usize> = (exhaustive_up_to + 1..=max_curves).collect();
    let mut remaining = sampled.len();
    for n in sampled {
        let quota = (cap - out.len()) / remaining;
        remaining -= 1;
        let size = space_size(n);
        // An odd stride larger than one visits the space in a spread-out
        // order; invalid points are skipped, so walk until the quota is met.
        let stride = (size / (4 * quota.max(1) as u64)).max(1) | 1;
        let mut taken = 0;
        let mut index = 0;
        let mut visited = 0;
        while taken < quota && visited < size {
            if let Some(shape) = decode(n, index) {
                out.push(realize(&shape));
                taken += 1;
            }
            index = (index + stride) % size;
            visited += 1;
        }
    }
    out
}

/// Uniform point of the `n`-curve space, retried until canonical.
pub fn random_pattern<R: Rng + ?Sized>(rng: &mut R, n: usize) -> IntersectionPattern {
    loop {
        if let Some(shape) = decode(n, rng.gen_range(0..space_size(n))) {
            return realize(&shape);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spaces_are_counted() {
        let valid = |n| (0..space_size(n)).filter(|&i| decode(n, i).is_some()).count();
        assert_eq!(valid(0), 1);
        // one curve: no parents, two components
        assert_eq!(valid(1), 2);
        // two curves: S-forests {disjoint, nested}; 3 rooted Δ-forests;
        // components 4 when disjoint, 2 when nested
        assert_eq!(valid(2), 3 * 4 + 3 * 2);
    }

    #[test]
    fn corpus_respects_cap() {
        let c = corpus(6, 3, 5000);
        assert!(c.len() <= 5000);
        assert!(c.iter().any(|p| p.len() == 6));
        assert_eq!(c.iter().filter(|p| p.is_empty()).count(), 1);
    }
}
