//! Levy Laplacian of integral functionals `L_f(γ) = ∫₀¹ f(γ(t)) dt`.
//!
//! The Levy kernel of `L_f` is the frame Hessian `∇²f⟨Z_μ, Z_ν⟩`, so its
//! trace is `∫ Δ_{(M,g)} f(γ(t)) dt`. Both sides are computed here.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{default_frame, levi_civita_transport, Curve, MetricChart, MetricData, Point};
use crate::quadrature::simpson;

/// Built-in scalar fields with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Constant { value: f64 },
    /// `|x|²` in chart coordinates.
    NormSquared,
    /// The chart coordinate `x^i` (0-based `index`).
    Coordinate { index: usize },
}

impl ScalarField {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarField::Coordinate { index } if *index >= 4 => Err(Error::InvalidArgument(format!(
                "coordinate index must be 0..=3, got {index}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: &Point) -> f64 {
        match *self {
            ScalarField::Constant { value } => value,
            ScalarField::NormSquared => x.norm_squared(),
            ScalarField::Coordinate { index } => x[index],
        }
    }

    pub fn gradient(&self, x: &Point) -> Vector4<f64> {
        match *self {
            ScalarField::Constant { .. } => Vector4::zeros(),
            ScalarField::NormSquared => x * 2.0,
            ScalarField::Coordinate { index } => {
                let mut g = Vector4::zeros();
                g[index] = 1.0;
                g
            }
        }
    }

    pub fn hessian(&self, _x: &Point) -> Matrix4<f64> {
        match *self {
            ScalarField::NormSquared => Matrix4::identity() * 2.0,
            _ => Matrix4::zeros(),
        }
    }

    /// Covariant Hessian `∂_μ∂_νf − Γ^κ_{μν}∂_κf`.
    pub fn covariant_hessian(&self, md: &MetricData, x: &Point) -> Matrix4<f64> {
        let grad = self.gradient(x);
        let mut h = self.hessian(x);
        for mu in 0..4 {
            for nu in 0..4 {
                h[(mu, nu)] -= (0..4).map(|k| md.christoffel[k][mu][nu] * grad[k]).sum::<f64>();
            }
        }
        h
    }
}

/// `Δ_{(M,g)} f = g^{μν}(∂_μ∂_νf − Γ^κ_{μν}∂_κf)` at `x`.
pub fn laplace_beltrami(f: &ScalarField, chart: &dyn MetricChart, x: &Point) -> Result<f64> {
    let md = MetricData::at(chart, x)?;
    Ok(md.g_inv.component_mul(&f.covariant_hessian(&md, x)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralLaplacian {
    /// `∫ Δ_{(M,g)} f(γ(t)) dt`.
    pub direct: f64,
    /// `∫ Σ_μ ∇²f(Z_μ, Z_μ) dt` along the Levi-Civita frame.
    pub kernel: f64,
    pub discrepancy: f64,
}

/// Both evaluations of `Δ^{AGV}_L L_f(γ)`.
pub fn integral_functional_laplacian(
    f: &ScalarField,
    chart: &dyn MetricChart,
    curve: &Curve,
    steps: usize,
) -> Result<IntegralLaplacian> {
    f.validate()?;
    let frames = levi_civita_transport(chart, curve, &default_frame(chart, &curve.position(0.0))?, steps)?;
    let nodes = frames.grid.nodes();
    let (mut direct, mut kernel) = (0.0, 0.0);
    for &(s, e) in frames.grid.pieces() {
        let mut d = Vec::with_capacity(e - s + 1);
        let mut k = Vec::with_capacity(e - s + 1);
        for i in s..=e {
            let x = curve.position(nodes[i]);
            d.push(laplace_beltrami(f, chart, &x)?);
            let md = MetricData::at(chart, &x)?;
            let z = &frames.frames[i];
            k.push((z.transpose() * f.covariant_hessian(&md, &x) * z).trace());
        }
        let h = (nodes[e] - nodes[s]) / (e - s) as f64;
        direct += simpson(&d, h);
        kernel += simpson(&k, h);
    }
    Ok(IntegralLaplacian {
        direct,
        kernel,
        discrepancy: (direct - kernel).abs(),
    })
}
