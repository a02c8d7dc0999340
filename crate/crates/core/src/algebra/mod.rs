//! Finite-dimensional algebra: gauge values, so(4), index Hodge star and
//! rotation paths.

pub mod gauge_element;
pub mod rotation;
pub mod so4;
pub mod two_form;

pub use gauge_element::{
    anti_hermitian_defect, cartan_direction, commutator, conjugate, expm, im, project_algebra, re,
    reunitarize, su2_basis, unitarity_defect, Flavor, GaugeElement, GaugeMatrix,
};
pub use rotation::RotationPath;
pub use so4::{exp_so4, left_basis, right_basis, So4Element};
pub use two_form::{so4_pairing, SymmetricBlock, TwoFormBlock};
