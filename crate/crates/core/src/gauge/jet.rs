//! Second-order jets (value, gradient, Hessian) of scalar and matrix valued
//! functions of the chart point, with the product rule built in.

use crate::algebra::{expm, re, GaugeMatrix};

/// `(f, ∂_λ f, ∂_κ∂_λ f)` of a real scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarJet {
    pub v: f64,
    pub d: [f64; 4],
    pub dd: [[f64; 4]; 4],
}

impl ScalarJet {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            d: [0.0; 4],
            dd: [[0.0; 4]; 4],
        }
    }
}

/// `(M, ∂_λ M, ∂_κ∂_λ M)` of a gauge-matrix valued function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatJet<const N: usize> {
    pub v: GaugeMatrix<N>,
    pub d: [GaugeMatrix<N>; 4],
    pub dd: [[GaugeMatrix<N>; 4]; 4],
}

impl<const N: usize> MatJet<N> {
    pub fn constant(v: GaugeMatrix<N>) -> Self {
        Self {
            v,
            d: [GaugeMatrix::zeros(); 4],
            dd: [[GaugeMatrix::zeros(); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        Self::constant(GaugeMatrix::identity())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::constant(self.v * o.v);
        for l in 0..4 {
            out.d[l] = self.d[l] * o.v + self.v * o.d[l];
        }
        for k in 0..4 {
            for l in k..4 {
                let v = self.dd[k][l] * o.v
                    + self.d[k] * o.d[l]
                    + self.d[l] * o.d[k]
                    + self.v * o.dd[k][l];
                out.dd[k][l] = v;
                out.dd[l][k] = v;
            }
        }
        out
    }

    /// Product with a scalar jet.
    pub fn scale(&self, s: &ScalarJet) -> Self {
        let mut out = Self::constant(self.v * re(s.v));
        for l in 0..4 {
            out.d[l] = self.d[l] * re(s.v) + self.v * re(s.d[l]);
        }
        for k in 0..4 {
            for l in 0..4 {
                out.dd[k][l] = self.dd[k][l] * re(s.v)
                    + self.d[k] * re(s.d[l])
                    + self.d[l] * re(s.d[k])
                    + self.v * re(s.dd[k][l]);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = *self;
        out.v += o.v;
        for l in 0..4 {
            out.d[l] += o.d[l];
            for k in 0..4 {
                out.dd[k][l] += o.dd[k][l];
            }
        }
        out
    }

    /// Entrywise conjugate transpose (derivatives commute with `†`).
    pub fn adjoint(&self) -> Self {
        let mut out = Self::constant(self.v.adjoint());
        for l in 0..4 {
            out.d[l] = self.d[l].adjoint();
            for k in 0..4 {
                out.dd[k][l] = self.dd[k][l].adjoint();
            }
        }
        out
    }

    /// Jet of `exp(θ(x)·X)` for a constant generator `X`.
    pub fn exp_of(theta: &ScalarJet, x: &GaugeMatrix<N>) -> Self {
        let e = expm(&(x * re(theta.v)));
        let xe = x * e;
        let xxe = x * xe;
        let mut out = Self::constant(e);
        for l in 0..4 {
            out.d[l] = xe * re(theta.d[l]);
            for k in 0..4 {
                out.dd[k][l] = xxe * re(theta.d[k] * theta.d[l]) + xe * re(theta.dd[k][l]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::su2_basis;

    fn theta_jet(x: [f64; 4]) -> ScalarJet {
        // θ = sin(x₀) + x₁x₂
        let mut j = ScalarJet::constant(x[0].sin() + x[1] * x[2]);
        j.d = [x[0].cos(), x[2], x[1], 0.0];
        j.dd[0][0] = -x[0].sin();
        j.dd[1][2] = 1.0;
        j.dd[2][1] = 1.0;
        j
    }

    fn exp_jet(x: [f64; 4]) -> MatJet<2> {
        MatJet::exp_of(&theta_jet(x), &su2_basis()[0])
    }

    #[test]
    fn exp_jet_matches_finite_differences() {
        let x = [0.3, -0.2, 0.7, 0.1];
        let j = exp_jet(x);
        let h = 1e-5;
        for l in 0..4 {
            let mut p = x;
            let mut m = x;
            p[l] += h;
            m[l] -= h;
            let fd = (exp_jet(p).v - exp_jet(m).v) / re(2.0 * h);
            assert!((fd - j.d[l]).norm() < 1e-9);
            let fd2 = (exp_jet(p).d[2] - exp_jet(m).d[2]) / re(2.0 * h);
            assert!((fd2 - j.dd[l][2]).norm() < 1e-9);
        }
    }

    #[test]
    fn product_rule_against_finite_differences() {
        let t = su2_basis();
        let f = |x: [f64; 4]| {
            exp_jet(x)
                .mul(&MatJet::exp_of(&theta_jet(x), &t[1]))
                .adjoint()
        };
        let x = [0.1, 0.4, -0.3, 0.9];
        let j = f(x);
        let h = 1e-5;
        for l in 0..4 {
            let mut p = x;
            let mut m = x;
            p[l] += h;
            m[l] -= h;
            let fd = (f(p).d[1] - f(m).d[1]) / re(2.0 * h);
            assert!((fd - j.dd[l][1]).norm() < 1e-8);
        }
    }
}
