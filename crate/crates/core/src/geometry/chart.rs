//! Metric charts, Christoffel symbols and the metric Hodge star.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};

use crate::algebra::gauge_element::re;
use crate::algebra::{GaugeMatrix, TwoFormBlock};
use crate::constants::{levi_civita, METRIC_FD_STEP};
use crate::error::{Error, Result};

/// A point in chart coordinates.
pub type Point = Vector4<f64>;

/// Smooth map from chart points to symmetric positive-definite metrics.
pub trait MetricChart: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn metric(&self, x: &Point) -> Matrix4<f64>;

    /// `[λ] → ∂_λ g`. Central differences with step [`METRIC_FD_STEP`] unless
    /// overridden; the truncation error is `O(h²)`.
    fn metric_derivatives(&self, x: &Point) -> [Matrix4<f64>; 4] {
        let h = METRIC_FD_STEP;
        std::array::from_fn(|l| {
            let mut xp = *x;
            let mut xm = *x;
            xp[l] += h;
            xm[l] -= h;
            (self.metric(&xp) - self.metric(&xm)) / (2.0 * h)
        })
    }

    /// Step used by finite-difference metric derivatives, if any.
    fn fd_step(&self) -> Option<f64> {
        Some(METRIC_FD_STEP)
    }

    /// True when `g ≡ δ`, so `Γ ≡ 0`.
    fn is_flat(&self) -> bool {
        false
    }

    fn contains(&self, _x: &Point) -> bool {
        true
    }
}

/// Euclidean `ℝ⁴`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatChart;

impl MetricChart for FlatChart {
    fn name(&self) -> String {
        "flat".into()
    }
    fn metric(&self, _x: &Point) -> Matrix4<f64> {
        Matrix4::identity()
    }
    fn metric_derivatives(&self, _x: &Point) -> [Matrix4<f64>; 4] {
        [Matrix4::zeros(); 4]
    }
    fn fd_step(&self) -> Option<f64> {
        None
    }
    fn is_flat(&self) -> bool {
        true
    }
}

/// Stereographic chart of the unit round 4-sphere,
/// `g = 4/(1+|x|²)² · δ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct S4Stereographic;

impl MetricChart for S4Stereographic {
    fn name(&self) -> String {
        "s4_stereographic".into()
    }
    fn metric(&self, x: &Point) -> Matrix4<f64> {
        let q = 1.0 + x.norm_squared();
        Matrix4::identity() * (4.0 / (q * q))
    }
    fn metric_derivatives(&self, x: &Point) -> [Matrix4<f64>; 4] {
        let q = 1.0 + x.norm_squared();
        let c = -16.0 / (q * q * q);
        std::array::from_fn(|l| Matrix4::identity() * (c * x[l]))
    }
    fn fd_step(&self) -> Option<f64> {
        None
    }
}

/// Constant conformal rescaling `λ²g` of another chart.
#[derive(Debug, Clone)]
pub struct ScaledChart {
    pub inner: Arc<dyn MetricChart>,
    pub lambda: f64,
}

impl MetricChart for ScaledChart {
    fn name(&self) -> String {
        format!("scaled({}, {})", self.inner.name(), self.lambda)
    }
    fn metric(&self, x: &Point) -> Matrix4<f64> {
        self.inner.metric(x) * (self.lambda * self.lambda)
    }
    fn metric_derivatives(&self, x: &Point) -> [Matrix4<f64>; 4] {
        let l2 = self.lambda * self.lambda;
        self.inner.metric_derivatives(x).map(|m| m * l2)
    }
    fn fd_step(&self) -> Option<f64> {
        self.inner.fd_step()
    }
    fn contains(&self, x: &Point) -> bool {
        self.inner.contains(x)
    }
}

type MetricFn = dyn Fn(&Point) -> Matrix4<f64> + Send + Sync;

/// A chart given only by a metric closure; derivatives by central differences.
#[derive(Clone)]
pub struct NumericChart {
    name: String,
    metric: Arc<MetricFn>,
    radius: Option<f64>,
}

impl NumericChart {
    pub fn new(
        name: impl Into<String>,
        metric: impl Fn(&Point) -> Matrix4<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            metric: Arc::new(metric),
            radius: None,
        }
    }

    /// Restricts the domain to the ball of the given radius about the origin.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }
}

impl fmt::Debug for NumericChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericChart").field("name", &self.name).finish()
    }
}

impl MetricChart for NumericChart {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn metric(&self, x: &Point) -> Matrix4<f64> {
        (self.metric)(x)
    }
    fn contains(&self, x: &Point) -> bool {
        self.radius.is_none_or(|r| x.norm() < r)
    }
}

/// Metric data at one point.
#[derive(Debug, Clone, Copy)]
pub struct MetricData {
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub sqrt_det: f64,
    /// `christoffel[κ][λ][ν] = Γ^κ_{λν}`.
    pub christoffel: Christoffel,
}

/// `Γ^κ_{λν}` stored as `[κ][λ][ν]`.
pub type Christoffel = [[[f64; 4]; 4]; 4];

impl MetricData {
    pub fn at(chart: &dyn MetricChart, x: &Point) -> Result<Self> {
        if !chart.contains(x) {
            return Err(Error::OutsideDomain {
                point: [x[0], x[1], x[2], x[3]],
            });
        }
        let g = chart.metric(x);
        let g_inv = checked_inverse(&g, x)?;
        let christoffel = if chart.is_flat() {
            [[[0.0; 4]; 4]; 4]
        } else {
            christoffel_from(&g_inv, &chart.metric_derivatives(x))
        };
        Ok(Self {
            g,
            g_inv,
            sqrt_det: g.determinant().abs().sqrt(),
            christoffel,
        })
    }

    pub fn flat() -> Self {
        Self {
            g: Matrix4::identity(),
            g_inv: Matrix4::identity(),
            sqrt_det: 1.0,
            christoffel: [[[0.0; 4]; 4]; 4],
        }
    }

    /// `Γ(X, Y)^κ = Γ^κ_{λν} X^λ Y^ν`.
    pub fn gamma_apply(&self, x: &Vector4<f64>, y: &Vector4<f64>) -> Vector4<f64> {
        let mut out = Vector4::zeros();
        for k in 0..4 {
            let mut s = 0.0;
            for l in 0..4 {
                if x[l] == 0.0 {
                    continue;
                }
                for n in 0..4 {
                    s += self.christoffel[k][l][n] * x[l] * y[n];
                }
            }
            out[k] = s;
        }
        out
    }
}

fn checked_inverse(g: &Matrix4<f64>, x: &Point) -> Result<Matrix4<f64>> {
    let sym = (g + g.transpose()) * 0.5;
    match sym.cholesky() {
        Some(ch) => Ok(ch.inverse()),
        None => {
            let min_eigenvalue = sym.symmetric_eigenvalues().min();
            Err(Error::SingularMetric {
                point: [x[0], x[1], x[2], x[3]],
                min_eigenvalue,
            })
        }
    }
}

fn christoffel_from(g_inv: &Matrix4<f64>, dg: &[Matrix4<f64>; 4]) -> Christoffel {
    let mut out = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            for n in l..4 {
                let mut s = 0.0;
                for r in 0..4 {
                    s += g_inv[(k, r)] * (dg[l][(r, n)] + dg[n][(r, l)] - dg[r][(l, n)]);
                }
                out[k][l][n] = 0.5 * s;
                out[k][n][l] = 0.5 * s;
            }
        }
    }
    out
}

/// `Γ^κ_{λν} = ½ g^{κρ}(∂_λ g_{ρν} + ∂_ν g_{ρλ} − ∂_ρ g_{λν})`.
pub fn christoffel(chart: &dyn MetricChart, x: &Point) -> Result<Christoffel> {
    Ok(MetricData::at(chart, x)?.christoffel)
}

/// Orthonormal, positively oriented frame at `x`: the columns of `L⁻ᵀ` where
/// `g = LLᵀ`.
pub fn default_frame(chart: &dyn MetricChart, x: &Point) -> Result<Matrix4<f64>> {
    let g = chart.metric(x);
    let sym = (g + g.transpose()) * 0.5;
    let ch = sym.cholesky().ok_or_else(|| Error::SingularMetric {
        point: [x[0], x[1], x[2], x[3]],
        min_eigenvalue: sym.symmetric_eigenvalues().min(),
    })?;
    let l_inv = ch.l().try_inverse().expect("cholesky factor is invertible");
    Ok(l_inv.transpose())
}

/// Raises both indices of a lower-index 2-form.
pub fn raise_indices<const N: usize>(
    g_inv: &Matrix4<f64>,
    f: &TwoFormBlock<N>,
) -> TwoFormBlock<N> {
    TwoFormBlock::from_upper(|l, k| {
        let mut s = GaugeMatrix::zeros();
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    let w = g_inv[(l, a)] * g_inv[(k, b)];
                    if w != 0.0 {
                        s += f.get(a, b) * re(w);
                    }
                }
            }
        }
        s
    })
}

/// `(*F)_{μν} = (√|det g|/2) ε_{μνλκ} F^{λκ}` at `x`.
pub fn metric_hodge<const N: usize>(
    chart: &dyn MetricChart,
    x: &Point,
    f: &TwoFormBlock<N>,
) -> Result<TwoFormBlock<N>> {
    let md = MetricData::at(chart, x)?;
    Ok(metric_hodge_with(&md, f))
}

/// Metric Hodge star from precomputed metric data.
pub fn metric_hodge_with<const N: usize>(md: &MetricData, f: &TwoFormBlock<N>) -> TwoFormBlock<N> {
    let up = raise_indices(&md.g_inv, f);
    let c = 0.5 * md.sqrt_det;
    TwoFormBlock::from_upper(|mu, nu| {
        let mut s = GaugeMatrix::zeros();
        for l in 0..4 {
            for k in 0..4 {
                let e = levi_civita(mu, nu, l, k);
                if e != 0.0 {
                    s += up.get(l, k) * re(c * e);
                }
            }
        }
        s
    })
}

/// Pointwise metric pairing `Σ g^{μα} g^{νβ} Re tr(F_{μν}† G_{αβ})`.
pub fn metric_pairing<const N: usize>(
    md: &MetricData,
    f: &TwoFormBlock<N>,
    g: &TwoFormBlock<N>,
) -> f64 {
    let up = raise_indices(&md.g_inv, g);
    let mut s = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                s += (f.get(mu, nu).adjoint() * up.get(mu, nu)).trace().re;
            }
        }
    }
    s
}

/// Metric norm `sqrt(⟨F, F⟩_g)`.
pub fn metric_norm<const N: usize>(md: &MetricData, f: &TwoFormBlock<N>) -> f64 {
    metric_pairing(md, f, f).max(0.0).sqrt()
}
