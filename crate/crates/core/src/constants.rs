//! Global conventions shared by every module.
//!
//! Spatial indices are written 1..4 in documentation and stored 0..3 in
//! arrays: documented index `k` lives at array slot `k - 1`.

/// Number of spatial dimensions.
pub const DIM: usize = 4;

/// Array slot of documented index 1.
pub const IDX1: usize = 0;
/// Array slot of documented index 2.
pub const IDX2: usize = 1;
/// Array slot of documented index 3.
pub const IDX3: usize = 2;
/// Array slot of documented index 4.
pub const IDX4: usize = 3;

/// Orientation: the Levi-Civita symbol takes this value on (1,2,3,4).
pub const EPSILON_1234: f64 = 1.0;

/// Sign of the Yang-Mills term in the closed-form Levy Laplacian of the
/// parallel transport,
///
/// `Δ U = YANG_MILLS_TERM_SIGN · ∫ U_{1,t} (D*F)(γ̇) U_{t,0} dt − ∫ U_{1,t} tr(L_W F) U_{t,0} dt`.
///
/// The index trace of the Levy kernel equals `−∇^μ F_{μν} γ̇^ν = +(D*F)_ν γ̇^ν`,
/// so the kernel route fixes this sign to `+1`. The finite-difference route
/// confirms it independently on non-Yang-Mills fields.
pub const YANG_MILLS_TERM_SIGN: f64 = 1.0;

/// Central-difference step for metric derivatives, in chart units.
pub const METRIC_FD_STEP: f64 = 1e-5;

/// Central-difference step for first derivatives of numeric connections.
pub const FIELD_FD_STEP: f64 = 1e-5;

/// Central-difference step for second derivatives of numeric connections.
pub const FIELD_FD_STEP2: f64 = 1e-4;

/// Tolerance used by the gauge-element builders when validating input.
pub const BUILDER_TOLERANCE: f64 = 1e-8;

/// Maximum unitarity drift tolerated between two reprojections.
pub const UNITARITY_DRIFT_LIMIT: f64 = 1e-6;

/// Design-matrix condition number above which kernel fits are rejected.
pub const FIT_CONDITION_LIMIT: f64 = 1e8;

/// Levi-Civita symbol on 0-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = [i, j, k, l];
    for a in 0..4 {
        if p[a] >= DIM {
            return 0.0;
        }
        for b in (a + 1)..4 {
            if p[a] == p[b] {
                return 0.0;
            }
        }
    }
    let mut inversions = 0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if p[a] > p[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        EPSILON_1234
    } else {
        -EPSILON_1234
    }
}
