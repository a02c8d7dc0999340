//! Riemannian chart data, curves and Levi-Civita frame transport.

pub mod chart;
pub mod curve;
pub mod direction;
pub mod frame;

pub use chart::{
    christoffel, default_frame, metric_hodge, metric_hodge_with, metric_norm, metric_pairing,
    Christoffel, FlatChart, MetricChart, MetricData, NumericChart, Point, S4Stereographic,
    ScaledChart,
};
pub use curve::{Curve, CurveFn, Warp};
pub use direction::{DirectionField, Profile};
pub use frame::{frame_derivative, levi_civita_transport, FramePath};
