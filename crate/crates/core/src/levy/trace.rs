//! The AGV Levy trace and its rotation-modified version.

use super::kernels::KernelPair;
use crate::algebra::{so4_pairing, GaugeMatrix, RotationPath};

/// `tr^{AGV}_L K = ∫₀¹ Σ_μ K^L_{μμ}(t) dt`.
pub fn agv_levy_trace<const N: usize>(k: &KernelPair<N>) -> GaugeMatrix<N> {
    k.integrate(|_, l, _| l.index_trace())
}

/// The three parts of the modified trace; `total = levy − left_pairing −
/// right_pairing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedTrace<const N: usize> {
    pub levy: GaugeMatrix<N>,
    /// `∫ tr(P_L(L_W) K^S₊) dt`.
    pub left_pairing: GaugeMatrix<N>,
    /// `∫ tr(P_R(L_W) K^S₋) dt`.
    pub right_pairing: GaugeMatrix<N>,
}

impl<const N: usize> ModifiedTrace<N> {
    pub fn total(&self) -> GaugeMatrix<N> {
        self.levy - self.left_pairing - self.right_pairing
    }
}

/// `tr^W_L K = ∫tr K^L − ∫tr(P_L(L_W)K^S₊) − ∫tr(P_R(L_W)K^S₋)` with
/// `K^S_± = ½(K^S ± *K^S)`.
pub fn modified_levy_trace<const N: usize>(k: &KernelPair<N>, w: &RotationPath) -> ModifiedTrace<N> {
    let left_pairing = k.integrate(|t, _, s| {
        so4_pairing(&w.log_derivative(t).project_left(), &s.self_dual_part())
    });
    let right_pairing = k.integrate(|t, _, s| {
        so4_pairing(&w.log_derivative(t).project_right(), &s.anti_self_dual_part())
    });
    ModifiedTrace {
        levy: agv_levy_trace(k),
        left_pairing,
        right_pairing,
    }
}
