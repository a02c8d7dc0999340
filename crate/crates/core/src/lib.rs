//! Holonomy, parallel transport and Lévy-type Laplacians of Wilson lines for
//! gauge fields on Riemannian 4-manifolds given in a single chart.

pub mod algebra;
pub mod builtins;
pub mod constants;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod levy;
pub mod ode;
pub mod quadrature;
pub mod transport;

pub use algebra::{GaugeMatrix, RotationPath, So4Element};
pub use builtins::{ChartSpec, CurveSpec, FieldSpec, RotationSpec};
pub use error::{Error, Result};
pub use gauge::{Connection, DynConnection};
pub use geometry::{Curve, MetricChart, Point};
pub use levy::{LaplacianReport, Route};
pub use transport::{TransportOptions, TransportResult};
