//! Levy kernels, traces and the three routes to `Δ^W_L U_{1,0}`.

pub mod example1;
pub mod fd_route;
pub mod kernels;
pub mod laplacian;
pub mod lemma;
pub mod trace;

pub use example1::{integral_functional_laplacian, laplace_beltrami, IntegralLaplacian, ScalarField};
pub use fd_route::{laplacian_fd_route, FdRouteOptions, FdRouteReport};
pub use kernels::{kernels_from_transport, second_derivative_kernels, KernelPair, KernelPiece};
pub use laplacian::{
    complex_rows, curve_scale, laplacian_closed_form, laplacian_closed_form_with_sign,
    laplacian_kernel_route, LaplacianReport, QuadratureInfo, Route, TermNorms,
};
pub use lemma::{diagnostic_j, pointwise_trace_recovery, JOptions, JReport, RecoveryReport};
pub use trace::{agv_levy_trace, modified_levy_trace, ModifiedTrace};
