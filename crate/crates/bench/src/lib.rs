//! Shared fixtures for the criterion benchmarks.

use holonomy_core::gauge::{Bpst, Orientation};
use holonomy_core::{builtins, Curve, DynConnection, FieldSpec, Point};

/// The unit instanton centred at the origin.
pub fn instanton() -> Bpst {
    Bpst::new(1.0, Point::zeros(), Orientation::Antidual).expect("unit instanton")
}

/// The perturbed instanton used where the Yang–Mills term must be nonzero.
pub fn perturbed(eps: f64) -> DynConnection<2> {
    FieldSpec::perturbed_instanton(eps).build().expect("perturbed instanton")
}

/// A pinned curve by name; panics on unknown names.
pub fn curve(name: &str) -> Curve {
    builtins::pinned_curve(name).expect("pinned curve")
}
