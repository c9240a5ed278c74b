use std::collections::HashMap;

use crate::rational::{self, Rational};

/// One disc of a system in the nested sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDisc {
    pub id: String,
    /// Parallel (isotopy) class identifier.
    pub class: String,
    pub weight: Rational,
    /// Transverse to the base handle decomposition; such discs need no
    /// parallel predecessor.
    pub transverse: bool,
}

/// Finite prefix `D_0 ⊆ D_1 ⊆ ...` of the nested enlargement sequence.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StabilizationTrace {
    pub systems: Vec<Vec<TraceDisc>>,
    /// Claimed stabilization index; searched for when absent.
    pub claimed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationVerdict {
    pub holds: bool,
    pub stabilization_index: Option<usize>,
    /// First failure, when `holds` is false.
    pub diagnostic: Option<String>,
}

impl StabilizationVerdict {
    fn fail(diagnostic: String) -> Self {
        Self {
            holds: false,
            stabilization_index: None,
            diagnostic: Some(diagnostic),
        }
    }
}

/// Checks nesting, then checks that every disc of `D_{J+1}` is transverse or
/// parallel to a disc of `D_J` of weight no larger than its own. `J` is the
/// claimed index, or the least index that works.
pub fn validate_stabilization(trace: &StabilizationTrace) -> StabilizationVerdict {
    for (i, pair) in trace.systems.windows(2).enumerate() {
        let later: HashMap<&str, &TraceDisc> = pair[1].iter().map(|d| (d.id.as_str(), d)).collect();
        for disc in &pair[0] {
            match later.get(disc.id.as_str()) {
                None => {
                    return StabilizationVerdict::fail(format!(
                        "nesting fails: disc {:?} of system {i} is missing from system {}",
                        disc.id,
                        i + 1
                    ))
                }
                Some(&d) if d != disc => {
                    return StabilizationVerdict::fail(format!(
                        "nesting fails: disc {:?} changes between systems {i} and {}",
                        disc.id,
                        i + 1
                    ))
                }
                Some(_) => {}
            }
        }
    }
    let settled = |pair: &[Vec<TraceDisc>]| {
        pair[1].iter().all(|new| {
            new.transverse
                || pair[0]
                    .iter()
                    .any(|old| old.class == new.class && rational::cmp(&old.weight, &new.weight).is_le())
        })
    };
    if let Some(j) = trace.claimed {
        if j + 1 >= trace.systems.len() {
            return StabilizationVerdict::fail(format!(
                "claimed index {j} needs system {} but only {} are supplied",
                j + 1,
                trace.systems.len()
            ));
        }
        if !settled(&trace.systems[j..j + 2]) {
            return StabilizationVerdict::fail(format!(
                "at claimed index {j} some disc of system {} has no parallel predecessor of smaller or equal weight",
                j + 1
            ));
        }
        return StabilizationVerdict {
            holds: true,
            stabilization_index: Some(j),
            diagnostic: None,
        };
    }
    match trace.systems.windows(2).position(settled) {
        Some(j) => StabilizationVerdict {
            holds: true,
            stabilization_index: Some(j),
            diagnostic: None,
        },
        None => StabilizationVerdict::fail(format!(
            "no stabilization index within the {} supplied systems",
            trace.systems.len()
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn disc(id: &str, class: &str, weight: i64) -> TraceDisc {
        TraceDisc {
            id: id.into(),
            class: class.into(),
            weight: int(weight),
            transverse: false,
        }
    }

    #[test]
    fn constant_sequence() {
        let sys = vec![disc("d0", "a", 3)];
        let v = validate_stabilization(&StabilizationTrace {
            systems: vec![sys.clone(), sys.clone(), sys],
            claimed: None,
        });
        assert!(v.holds);
        assert_eq!(v.stabilization_index, Some(0));
    }

    #[test]
    fn ever_new_classes() {
        let v = validate_stabilization(&StabilizationTrace {
            systems: vec![
                vec![disc("d0", "a", 3)],
                vec![disc("d0", "a", 3), disc("d1", "b", 2)],
                vec![disc("d0", "a", 3), disc("d1", "b", 2), disc("d2", "c", 1)],
            ],
            claimed: None,
        });
        assert!(!v.holds);
        assert!(v.diagnostic.unwrap().contains("no stabilization index"));
    }

    #[test]
    fn repeats_at_equal_weight() {
        let d1 = vec![disc("d0", "a", 3), disc("d1", "b", 2)];
        let mut d2 = d1.clone();
        d2.push(disc("d2", "b", 2));
        let v = validate_stabilization(&StabilizationTrace {
            systems: vec![vec![disc("d0", "a", 3)], d1, d2],
            claimed: None,
        });
        assert!(v.holds);
        assert_eq!(v.stabilization_index, Some(1));
    }

    #[test]
    fn lighter_parallel_copy_is_not_stable() {
        let d1 = vec![disc("d0", "a", 3)];
        let d2 = vec![disc("d0", "a", 3), disc("d1", "a", 2)];
        let v = validate_stabilization(&StabilizationTrace {
            systems: vec![d1, d2],
            claimed: None,
        });
        assert!(!v.holds);
    }

    #[test]
    fn claimed_index_is_checked() {
        let d1 = vec![disc("d0", "a", 3), disc("d1", "b", 2)];
        let mut d2 = d1.clone();
        d2.push(disc("d2", "b", 2));
        let systems = vec![vec![disc("d0", "a", 3)], d1, d2];
        let at = |claimed| {
            validate_stabilization(&StabilizationTrace {
                systems: systems.clone(),
                claimed: Some(claimed),
            })
        };
        assert!(!at(0).holds);
        assert_eq!(at(1).stabilization_index, Some(1));
        assert!(!at(2).holds);
    }

    #[test]
    fn broken_nesting() {
        let v = validate_stabilization(&StabilizationTrace {
            systems: vec![vec![disc("d0", "a", 3)], vec![disc("d1", "a", 3)]],
            claimed: None,
        });
        assert!(!v.holds);
        assert!(v.diagnostic.unwrap().contains("nesting"));
    }

    #[test]
    fn transverse_discs_need_no_predecessor() {
        let mut fresh = disc("d1", "z", 1);
        fresh.transverse = true;
        let v = validate_stabilization(&StabilizationTrace {
            systems: vec![vec![disc("d0", "a", 3)], vec![disc("d0", "a", 3), fresh]],
            claimed: None,
        });
        assert_eq!(v.stabilization_index, Some(0));
    }
}
