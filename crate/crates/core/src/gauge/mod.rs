//! Connections, curvature invariants, gauge transforms and the field zoo.

pub mod action;
pub mod connection;
pub mod curvature;
pub mod fields;
pub mod jet;
pub mod transform;

pub use action::{action_density_with, gauge_trace, ym_action, ActionDomain, ActionEstimate};
pub use connection::{
    algebra_defect, derivative_check, fd_jet1, fd_jet2, Connection, DerivativeSource,
    DynConnection, Jet1, Jet2, NumericConnection, Potential,
};
pub use curvature::{
    bianchi_defect, covariant_derivative_f, curvature, curvature_from_jet, one_form_norm,
    sd_split, sd_split_with, ym_residual, FieldSample,
};
pub use fields::{AbelianConstant, Bpst, Bump, Orientation, Perturbed, THooftVariant, ZeroField};
pub use jet::{MatJet, ScalarJet};
pub use transform::{gauge_transform, ExpFactor, ExpProductTransform, GaugeTransformed};
