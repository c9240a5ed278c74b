//! Disc systems, enlargements and layered surface families.
//!
//! Builds the incidence matrices `M`, `M̄`, `M̂` and the layered block matrix
//! `W`, runs the `T0 -> T1 -> T2 -> T3` tightening pipeline, and certifies
//! growth-rate decrease by interval separation of spectral radii.
//!
//! Conventions: the tightening disc `Δ` is the last new disc (last surface of
//! the bottom layer) and it is parallel to the first base disc.

mod certify;
mod layers;
mod stabilization;
mod system;

pub use certify::{
    certify_improvement, default_p_max, strict_schedule, tighten, ComponentBound,
    TighteningCertificate, TightenOutcome, SEPARATION_CAP,
};
pub use layers::{build_layer_matrix, pipeline, LayeredFamily, PipelineOutcome};
pub use stabilization::{validate_stabilization, StabilizationTrace, StabilizationVerdict, TraceDisc};
pub use system::{
    apply_tightening, build_bar_matrix, weighted_intersection, DiscSystem, Enlargement, Label,
};

use thiserror::Error;

use crate::pf::PfError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscError {
    #[error("unknown label {label:?} in {context}")]
    UnknownLabel { label: String, context: String },
    #[error("label {0:?} is declared more than once")]
    DuplicateLabel(String),
    #[error("disc {0:?} has an empty image")]
    EmptyImage(String),
    #[error("invariant violated at row {row}: {reason}")]
    InvariantViolation { row: usize, reason: String },
    #[error("surface {surface:?} is carried by {target:?}, which is neither a base disc nor in the next layer up")]
    LayerRuleViolation { surface: String, target: String },
    #[error("surrogate relation Wu <= λu fails at index {index}")]
    SurrogateViolation { index: usize },
    #[error("updated row {index} increases the weighted image (T1 u > T0 u)")]
    NonIncreaseViolation { index: usize },
    #[error("index {index} has no strict drop within p_max = {p_max}")]
    PropagationTimeout { index: usize, p_max: u32 },
    #[error("spectral intervals still overlap after {iterations} refinement steps")]
    NotSeparable { iterations: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Pf(#[from] PfError),
}
