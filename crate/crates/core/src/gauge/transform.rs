//! Gauge transforms `ψ(x) = Π_k exp(θ_k(x) X_k)` and transformed connections.

use std::sync::Arc;

use nalgebra::Vector4;

use super::connection::{Connection, DerivativeSource, DynConnection, Jet1, Jet2, Potential};
use super::jet::{MatJet, ScalarJet};
use crate::algebra::{anti_hermitian_defect, re, GaugeMatrix};
use crate::constants::BUILDER_TOLERANCE;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// One factor `exp(θ(x)·X)` with `θ(x) = amplitude·sin(k·x + phase)`.
#[derive(Debug, Clone)]
pub struct ExpFactor<const N: usize> {
    pub generator: GaugeMatrix<N>,
    pub wave: Vector4<f64>,
    pub phase: f64,
    pub amplitude: f64,
}

impl<const N: usize> ExpFactor<N> {
    fn arg(&self, x: &Point) -> f64 {
        self.wave.dot(x) + self.phase
    }

    pub fn theta(&self, x: &Point) -> ScalarJet {
        let (s, c) = self.arg(x).sin_cos();
        let a = self.amplitude;
        let k = &self.wave;
        let mut j = ScalarJet::constant(a * s);
        for l in 0..4 {
            j.d[l] = a * k[l] * c;
            for m in 0..4 {
                j.dd[l][m] = -a * k[l] * k[m] * s;
            }
        }
        j
    }

    /// Jet of `∂_μθ`.
    pub fn dtheta(&self, mu: usize, x: &Point) -> ScalarJet {
        let (s, c) = self.arg(x).sin_cos();
        let a = self.amplitude * self.wave[mu];
        let k = &self.wave;
        let mut j = ScalarJet::constant(a * c);
        for l in 0..4 {
            j.d[l] = -a * k[l] * s;
            for m in 0..4 {
                j.dd[l][m] = -a * k[l] * k[m] * c;
            }
        }
        j
    }
}

/// A smooth gauge transform given as an ordered product of exponentials.
#[derive(Debug, Clone)]
pub struct ExpProductTransform<const N: usize> {
    factors: Vec<ExpFactor<N>>,
}

impl<const N: usize> ExpProductTransform<N> {
    pub fn identity() -> Self {
        Self { factors: vec![] }
    }

    pub fn new(factors: Vec<ExpFactor<N>>) -> Result<Self> {
        for f in &factors {
            if anti_hermitian_defect(&f.generator) > BUILDER_TOLERANCE {
                return Err(Error::InvalidArgument(
                    "gauge transform generators must be anti-Hermitian".into(),
                ));
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[ExpFactor<N>] {
        &self.factors
    }

    /// `ψ(x)`.
    pub fn value(&self, x: &Point) -> GaugeMatrix<N> {
        self.factors.iter().fold(GaugeMatrix::identity(), |acc, f| {
            acc * crate::algebra::expm(&(f.generator * re(f.theta(x).v)))
        })
    }

    /// Second-order jet of `ψ`.
    pub fn jet(&self, x: &Point) -> MatJet<N> {
        self.factors.iter().fold(MatJet::identity(), |acc, f| {
            acc.mul(&MatJet::exp_of(&f.theta(x), &f.generator))
        })
    }

    /// Jets of `ψ` and of `ψ⁻¹∂_μψ = Σ_k R_k⁻¹ X_k R_k ∂_μθ_k`, where
    /// `R_k = ψ_{k+1}⋯ψ_K`.
    fn jets(&self, x: &Point) -> (MatJet<N>, [MatJet<N>; 4]) {
        let factor_jets: Vec<MatJet<N>> = self
            .factors
            .iter()
            .map(|f| MatJet::exp_of(&f.theta(x), &f.generator))
            .collect();
        let mut maurer_cartan = [MatJet::constant(GaugeMatrix::zeros()); 4];
        let mut suffix = MatJet::identity();
        for (k, f) in self.factors.iter().enumerate().rev() {
            let conj = suffix.adjoint().mul(&MatJet::constant(f.generator)).mul(&suffix);
            for (mu, mc) in maurer_cartan.iter_mut().enumerate() {
                *mc = mc.add(&conj.scale(&f.dtheta(mu, x)));
            }
            suffix = factor_jets[k].mul(&suffix);
        }
        (suffix, maurer_cartan)
    }
}

/// The connection `A' = ψ⁻¹Aψ + ψ⁻¹dψ`.
#[derive(Debug, Clone)]
pub struct GaugeTransformed<const N: usize> {
    base: DynConnection<N>,
    psi: ExpProductTransform<N>,
}

impl<const N: usize> GaugeTransformed<N> {
    pub fn psi(&self) -> &ExpProductTransform<N> {
        &self.psi
    }

    pub fn base(&self) -> &DynConnection<N> {
        &self.base
    }
}

/// Applies the gauge transform `ψ` to `base`.
pub fn gauge_transform<const N: usize>(
    base: DynConnection<N>,
    psi: ExpProductTransform<N>,
) -> Arc<GaugeTransformed<N>> {
    Arc::new(GaugeTransformed { base, psi })
}

impl<const N: usize> Connection<N> for GaugeTransformed<N> {
    fn name(&self) -> String {
        format!("gauge_transformed({})", self.base.name())
    }

    fn potential(&self, x: &Point) -> Potential<N> {
        let (psi, mc) = self.psi.jets(x);
        let a = self.base.potential(x);
        let inv = psi.v.adjoint();
        std::array::from_fn(|mu| inv * a[mu] * psi.v + mc[mu].v)
    }

    fn jet1(&self, x: &Point) -> Jet1<N> {
        self.jet2(x).first()
    }

    fn jet2(&self, x: &Point) -> Jet2<N> {
        let (psi, mc) = self.psi.jets(x);
        let inv = psi.adjoint();
        let b = self.base.jet2(x);
        let mut out = Jet2 {
            a: [GaugeMatrix::zeros(); 4],
            da: [[GaugeMatrix::zeros(); 4]; 4],
            dda: [[[GaugeMatrix::zeros(); 4]; 4]; 4],
        };
        for mu in 0..4 {
            let a_mu = MatJet {
                v: b.a[mu],
                d: std::array::from_fn(|l| b.da[l][mu]),
                dd: std::array::from_fn(|k| std::array::from_fn(|l| b.dda[k][l][mu])),
            };
            let t = inv.mul(&a_mu).mul(&psi).add(&mc[mu]);
            out.a[mu] = t.v;
            for l in 0..4 {
                out.da[l][mu] = t.d[l];
                for k in 0..4 {
                    out.dda[k][l][mu] = t.dd[k][l];
                }
            }
        }
        out
    }

    fn derivative_source(&self) -> DerivativeSource {
        self.base.derivative_source()
    }

    fn contains(&self, x: &Point) -> bool {
        self.base.contains(x)
    }
}
