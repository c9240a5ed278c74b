//! Surgery of a surface `S` along a fixed disc `Δ`.
//!
//! A curve of `Δ ∩ S` that is innermost in `Δ` among the remaining curves
//! is surgered: the subdisc of `S` it bounds is replaced by a pushed-off
//! copy of the subdisc of `Δ`. Curves of `S` inside that subdisc disappear,
//! and patches glued there earlier are discarded. `Δ` itself never changes.

pub mod corpus;
mod pattern;
mod rewrite;

pub use pattern::{ComponentId, Curve, CurveId, IntersectionPattern};
pub use rewrite::{
    closed_form_weights, enumerate_all_orders, project, push_away, weight_delta,
    weights_from_events, Enumeration, NormalForm, PushAwayResult, RewriteState, Status, Strategy,
    SurgeryEvent,
};

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forest {
    Delta,
    S,
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Forest::Delta => "delta",
            Forest::S => "s",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushAwayError {
    #[error("curve {0} is declared more than once")]
    DuplicateCurve(CurveId),
    #[error("curve {curve} names unknown parent {parent}")]
    UnknownCurve { curve: CurveId, parent: CurveId },
    #[error("unknown component {0}")]
    UnknownComponent(ComponentId),
    #[error("{forest} forest has a cycle through curve {curve}")]
    Cycle { forest: Forest, curve: CurveId },
    #[error("curve {curve} and its s-parent {parent} lie in different components")]
    ComponentMismatch { curve: CurveId, parent: CurveId },
    #[error("{forest} weight of curve {curve} exceeds that of its parent")]
    WeightNotMonotone { forest: Forest, curve: CurveId },
    #[error("s weight of curve {0} exceeds its component weight")]
    ExceedsComponent(CurveId),
    #[error("negative weight on {0}")]
    NegativeWeight(String),
    #[error("curve {0} is not alive")]
    NotAlive(CurveId),
    #[error("curve {curve} is not innermost in delta: {descendant} is alive inside it")]
    NotInnermost { curve: CurveId, descendant: CurveId },
    #[error("order ends with curve {0} still alive")]
    IncompleteOrder(CurveId),
    #[error("more than {cap} maximal surgery sequences")]
    EnumerationCapExceeded { cap: usize },
}
