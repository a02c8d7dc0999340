//! Parallel transport along curves and its directional derivatives.

pub mod derivative;
pub mod solver;

pub use derivative::{
    fd_directional_derivative, first_derivative, reparametrize_check, second_derivative,
    volterra_products, FdEstimate, FdSchedule, ReparamReport,
};
pub use solver::{
    convergence_ratio, parallel_transport, solve_augmented, transport_with_frame, AugmentedResult,
    PathPoint, Scheme, TransportOptions, TransportResult,
};
