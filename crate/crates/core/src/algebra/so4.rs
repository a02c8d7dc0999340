//! so(4) as plain antisymmetric 4×4 matrices.
//!
//! `so(4) = Lie(S³_L) ⊕ Lie(S³_R)`. With `ε_{1234} = +1` the left summand is
//! the `+1` eigenspace of the index Hodge star and the right summand the `−1`
//! eigenspace, so `P_L(a) = ½(a + *a)` and `P_R(a) = ½(a − *a)`.

use nalgebra::Matrix4;

use crate::constants::levi_civita;
use crate::error::{Error, Result};

/// Real antisymmetric 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct So4Element(Matrix4<f64>);

impl So4Element {
    /// Antisymmetrizes `m`: stores `½(m − mᵀ)`.
    pub fn new(m: Matrix4<f64>) -> Self {
        Self((m - m.transpose()) * 0.5)
    }

    /// Accepts `m` only if it is already antisymmetric to `tol`.
    pub fn try_new(m: Matrix4<f64>, tol: f64) -> Result<Self> {
        let defect = (m + m.transpose()).abs().max();
        if defect > tol {
            return Err(Error::InvalidArgument(format!(
                "matrix is not antisymmetric (defect {defect:e})"
            )));
        }
        Ok(Self::new(m))
    }

    pub fn zero() -> Self {
        Self(Matrix4::zeros())
    }

    /// From the six upper-triangular entries `(a12, a13, a14, a23, a24, a34)`.
    pub fn from_upper(u: [f64; 6]) -> Self {
        let mut m = Matrix4::zeros();
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            m[(i, j)] = u[k];
            m[(j, i)] = -u[k];
        }
        Self(m)
    }

    /// `Σ l_i e_i + Σ r_i f_i` in the left/right bases.
    pub fn from_coefficients(left: [f64; 3], right: [f64; 3]) -> Self {
        let lb = left_basis();
        let rb = right_basis();
        let mut m = Matrix4::zeros();
        for i in 0..3 {
            m += lb[i].0 * left[i] + rb[i].0 * right[i];
        }
        Self(m)
    }

    /// Coefficients in the left and right bases.
    pub fn coefficients(&self) -> ([f64; 3], [f64; 3]) {
        let lb = left_basis();
        let rb = right_basis();
        let mut l = [0.0; 3];
        let mut r = [0.0; 3];
        for i in 0..3 {
            l[i] = self.pairing(&lb[i]) / lb[i].pairing(&lb[i]);
            r[i] = self.pairing(&rb[i]) / rb[i].pairing(&rb[i]);
        }
        (l, r)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Frobenius pairing `Σ a_ij b_ij`.
    pub fn pairing(&self, other: &So4Element) -> f64 {
        self.0.component_mul(&other.0).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * s)
    }

    pub fn add(&self, other: &So4Element) -> Self {
        Self(self.0 + other.0)
    }

    pub fn sub(&self, other: &So4Element) -> Self {
        Self(self.0 - other.0)
    }

    pub fn commutator(&self, other: &So4Element) -> Self {
        Self(self.0 * other.0 - other.0 * self.0)
    }

    /// `(*a)_{μν} = ½ Σ ε_{μνλκ} a_{λκ}`.
    pub fn index_hodge(&self) -> Self {
        let mut m = Matrix4::zeros();
        for mu in 0..4 {
            for nu in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    for k in 0..4 {
                        s += levi_civita(mu, nu, l, k) * self.0[(l, k)];
                    }
                }
                m[(mu, nu)] = 0.5 * s;
            }
        }
        Self(m)
    }

    /// Orthogonal projection onto `Lie(S³_L)` by basis expansion.
    pub fn project_left(&self) -> Self {
        project_onto(self, &left_basis())
    }

    /// Orthogonal projection onto `Lie(S³_R)` by basis expansion.
    pub fn project_right(&self) -> Self {
        project_onto(self, &right_basis())
    }

    /// `exp(t·a)`, orthogonal with determinant one.
    pub fn exp(&self, t: f64) -> Matrix4<f64> {
        exp_so4(self, t)
    }
}

fn project_onto(a: &So4Element, basis: &[So4Element; 3]) -> So4Element {
    let mut m = Matrix4::zeros();
    for b in basis {
        m += b.0 * (a.pairing(b) / b.pairing(b));
    }
    So4Element(m)
}

/// Basis `{e₁, e₂, e₃}` of `Lie(S³_L)`: the left matrix form with one of
/// `b, c, d` set to one.
pub fn left_basis() -> [So4Element; 3] {
    let form = |b: f64, c: f64, d: f64| {
        So4Element(Matrix4::new(
            0.0, -b, -c, -d, //
            b, 0.0, -d, c, //
            c, d, 0.0, -b, //
            d, -c, b, 0.0,
        ))
    };
    [form(1.0, 0.0, 0.0), form(0.0, 1.0, 0.0), form(0.0, 0.0, 1.0)]
}

/// Basis `{f₁, f₂, f₃}` of `Lie(S³_R)`.
pub fn right_basis() -> [So4Element; 3] {
    let form = |b: f64, c: f64, d: f64| {
        So4Element(Matrix4::new(
            0.0, -b, -c, -d, //
            b, 0.0, d, -c, //
            c, -d, 0.0, b, //
            d, c, -b, 0.0,
        ))
    };
    [form(1.0, 0.0, 0.0), form(0.0, 1.0, 0.0), form(0.0, 0.0, 1.0)]
}

/// `exp(t·a)` by scaling and squaring.
pub fn exp_so4(a: &So4Element, t: f64) -> Matrix4<f64> {
    (a.0 * t).exp()
}
