//! Built-in connections with closed-form derivatives.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::connection::{Connection, DerivativeSource, DynConnection, Jet1, Jet2, Potential};
use super::curvature::curvature_from_jet;
use crate::algebra::{cartan_direction, im, re, su2_basis, GaugeMatrix, So4Element};
use crate::error::{Error, Result};
use crate::geometry::Point;

fn zero_potential<const N: usize>() -> Potential<N> {
    [GaugeMatrix::zeros(); 4]
}

fn zero_jet2<const N: usize>() -> Jet2<N> {
    Jet2 {
        a: zero_potential(),
        da: [zero_potential(); 4],
        dda: [[zero_potential(); 4]; 4],
    }
}

/// `A ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl<const N: usize> Connection<N> for ZeroField {
    fn name(&self) -> String {
        "zero".into()
    }
    fn potential(&self, _x: &Point) -> Potential<N> {
        zero_potential()
    }
    fn jet1(&self, _x: &Point) -> Jet1<N> {
        zero_jet2().first()
    }
    fn jet2(&self, _x: &Point) -> Jet2<N> {
        zero_jet2()
    }
    fn derivative_source(&self) -> DerivativeSource {
        DerivativeSource::Analytic
    }
}

/// Abelian field `A_μ(x) = i c_{μν} x^ν H` with constant curvature
/// `F_{μν} = −2i c_{μν} H`, where `H` is the Cartan direction (`1` for `N = 1`).
#[derive(Debug, Clone)]
pub struct AbelianConstant {
    c: So4Element,
}

impl AbelianConstant {
    pub fn new(c: So4Element) -> Self {
        Self { c }
    }

    pub fn coefficients(&self) -> &So4Element {
        &self.c
    }
}

impl<const N: usize> Connection<N> for AbelianConstant {
    fn name(&self) -> String {
        "abelian_constant".into()
    }
    fn potential(&self, x: &Point) -> Potential<N> {
        let h = cartan_direction::<N>();
        let cx = self.c.matrix() * x;
        std::array::from_fn(|mu| h * im(cx[mu]))
    }
    fn jet1(&self, x: &Point) -> Jet1<N> {
        let h = cartan_direction::<N>();
        Jet1 {
            a: Connection::<N>::potential(self, x),
            da: std::array::from_fn(|l| std::array::from_fn(|mu| h * im(self.c.get(mu, l)))),
        }
    }
    fn jet2(&self, x: &Point) -> Jet2<N> {
        let j = Connection::<N>::jet1(self, x);
        Jet2 {
            a: j.a,
            da: j.da,
            dda: [[zero_potential(); 4]; 4],
        }
    }
    fn derivative_source(&self) -> DerivativeSource {
        DerivativeSource::Analytic
    }
}

/// Which sign variant of the 't Hooft symbols builds the BPST field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum THooftVariant {
    /// `η_{aμ4} = δ_{aμ}`, `η_{a4ν} = −δ_{aν}`.
    Eta,
    /// `η̄_{aμ4} = −δ_{aμ}`, `η̄_{a4ν} = δ_{aν}`.
    EtaBar,
}

/// Orientation label measured against the global ε convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Self-dual curvature (`F₋ = 0`).
    Dual,
    /// Anti-self-dual curvature (`F₊ = 0`): the instanton.
    Antidual,
}

impl THooftVariant {
    /// `η_{aμν}` (or `η̄`) with zero-based indices.
    pub fn symbol(self, a: usize, mu: usize, nu: usize) -> f64 {
        let s = match self {
            THooftVariant::Eta => 1.0,
            THooftVariant::EtaBar => -1.0,
        };
        match (mu, nu) {
            (3, 3) => 0.0,
            (m, 3) => s * (a == m) as u8 as f64,
            (3, n) => -s * (a == n) as u8 as f64,
            (m, n) => crate::constants::levi_civita(a, m, n, 3),
        }
    }

    /// `M_{μν} = Σ_a η_{aμν} T_a`.
    fn generators(self) -> [[GaugeMatrix<2>; 4]; 4] {
        let t = su2_basis();
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| {
                (0..3).fold(GaugeMatrix::<2>::zeros(), |acc, a| {
                    acc + t[a] * re(self.symbol(a, mu, nu))
                })
            })
        })
    }

    /// Measures which orientation this variant produces under the global
    /// ε convention, by evaluating `‖F₊‖/‖F‖` and `‖F₋‖/‖F‖` at a generic
    /// point on the flat chart.
    pub fn detect_orientation(self) -> Orientation {
        let probe = Bpst::with_variant(1.0, Point::zeros(), self);
        let f = curvature_from_jet(&probe.jet1(&Point::new(0.31, -0.17, 0.52, 0.11)));
        let plus = f.self_dual_part().norm();
        let minus = f.anti_self_dual_part().norm();
        if plus < minus {
            Orientation::Antidual
        } else {
            Orientation::Dual
        }
    }

    /// The variant whose measured orientation is `o`.
    pub fn for_orientation(o: Orientation) -> Self {
        if THooftVariant::Eta.detect_orientation() == o {
            THooftVariant::Eta
        } else {
            THooftVariant::EtaBar
        }
    }
}

/// BPST field in regular gauge:
/// `A_μ = 2 M_{μν}(x − c)^ν / (|x − c|² + ρ²)`.
#[derive(Clone)]
pub struct Bpst {
    rho: f64,
    center: Point,
    variant: THooftVariant,
    m: [[GaugeMatrix<2>; 4]; 4],
}

impl fmt::Debug for Bpst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bpst")
            .field("rho", &self.rho)
            .field("center", &self.center)
            .field("variant", &self.variant)
            .finish()
    }
}

impl Bpst {
    /// Builds the field whose curvature has orientation `o`; the sign variant
    /// is chosen by runtime detection.
    pub fn new(rho: f64, center: Point, o: Orientation) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("bpst scale must be positive, got {rho}")));
        }
        Ok(Self::with_variant(rho, center, THooftVariant::for_orientation(o)))
    }

    pub fn with_variant(rho: f64, center: Point, variant: THooftVariant) -> Self {
        Self {
            rho,
            center,
            variant,
            m: variant.generators(),
        }
    }

    pub fn variant(&self) -> THooftVariant {
        self.variant
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    fn my(&self, y: &Point) -> Potential<2> {
        std::array::from_fn(|mu| {
            (0..4).fold(GaugeMatrix::<2>::zeros(), |acc, nu| acc + self.m[mu][nu] * re(y[nu]))
        })
    }
}

impl Connection<2> for Bpst {
    fn name(&self) -> String {
        "bpst".into()
    }

    fn potential(&self, x: &Point) -> Potential<2> {
        let y = x - self.center;
        let f = 2.0 / (y.norm_squared() + self.rho * self.rho);
        self.my(&y).map(|v| v * re(f))
    }

    fn jet1(&self, x: &Point) -> Jet1<2> {
        self.jet2(x).first()
    }

    fn jet2(&self, x: &Point) -> Jet2<2> {
        let y = x - self.center;
        let d = y.norm_squared() + self.rho * self.rho;
        let f = 2.0 / d;
        let df: [f64; 4] = std::array::from_fn(|l| -4.0 * y[l] / (d * d));
        let ddf = |k: usize, l: usize| {
            -4.0 * ((k == l) as u8 as f64) / (d * d) + 16.0 * y[k] * y[l] / (d * d * d)
        };
        let my = self.my(&y);
        let a = my.map(|v| v * re(f));
        let da = std::array::from_fn(|l| {
            std::array::from_fn(|mu| my[mu] * re(df[l]) + self.m[mu][l] * re(f))
        });
        let dda = std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                std::array::from_fn(|mu| {
                    my[mu] * re(ddf(k, l)) + self.m[mu][k] * re(df[l]) + self.m[mu][l] * re(df[k])
                })
            })
        });
        Jet2 { a, da, dda }
    }

    fn derivative_source(&self) -> DerivativeSource {
        DerivativeSource::Analytic
    }
}

/// Smooth compactly supported bump `φ(s) = exp(−1/(1 − s))`, with
/// `s = |x − c|²/R²`, times a constant algebra-valued 1-form `M_μ`.
#[derive(Debug, Clone)]
pub struct Bump<const N: usize> {
    pub center: Point,
    pub radius: f64,
    pub components: [GaugeMatrix<N>; 4],
}

impl<const N: usize> Bump<N> {
    /// `(φ, ∂φ, ∂∂φ)` at `x`.
    pub fn profile(&self, x: &Point) -> super::jet::ScalarJet {
        let y = x - self.center;
        let r2 = self.radius * self.radius;
        let s = y.norm_squared() / r2;
        let mut j = super::jet::ScalarJet::constant(0.0);
        if s >= 1.0 {
            return j;
        }
        let u = 1.0 / (1.0 - s);
        let phi = (-u).exp();
        let d1 = -phi * u * u;
        let d2 = phi * u.powi(4) - 2.0 * phi * u.powi(3);
        let ds: [f64; 4] = std::array::from_fn(|l| 2.0 * y[l] / r2);
        j.v = phi;
        for k in 0..4 {
            j.d[k] = d1 * ds[k];
            for l in 0..4 {
                j.dd[k][l] = d2 * ds[k] * ds[l] + d1 * 2.0 * ((k == l) as u8 as f64) / r2;
            }
        }
        j
    }
}

/// `A + ε·φ(x)·M_μ dx^μ`: a base field plus a compactly supported bump.
#[derive(Debug, Clone)]
pub struct Perturbed<const N: usize> {
    base: DynConnection<N>,
    eps: f64,
    bump: Bump<N>,
}

impl<const N: usize> Perturbed<N> {
    pub fn new(base: DynConnection<N>, eps: f64, bump: Bump<N>) -> Result<Self> {
        if !(bump.radius > 0.0) {
            return Err(Error::InvalidArgument("bump radius must be positive".into()));
        }
        for m in &bump.components {
            if crate::algebra::anti_hermitian_defect(m) > crate::constants::BUILDER_TOLERANCE {
                return Err(Error::InvalidArgument(
                    "bump components must be anti-Hermitian".into(),
                ));
            }
        }
        Ok(Self { base, eps, bump })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn bump(&self) -> &Bump<N> {
        &self.bump
    }
}

impl<const N: usize> Connection<N> for Perturbed<N> {
    fn name(&self) -> String {
        format!("perturbed({})", self.base.name())
    }

    fn potential(&self, x: &Point) -> Potential<N> {
        let phi = self.bump.profile(x).v * self.eps;
        let mut a = self.base.potential(x);
        for mu in 0..4 {
            a[mu] += self.bump.components[mu] * re(phi);
        }
        a
    }

    fn jet1(&self, x: &Point) -> Jet1<N> {
        let p = self.bump.profile(x);
        let mut j = self.base.jet1(x);
        for mu in 0..4 {
            let m = self.bump.components[mu] * re(self.eps);
            j.a[mu] += m * re(p.v);
            for l in 0..4 {
                j.da[l][mu] += m * re(p.d[l]);
            }
        }
        j
    }

    fn jet2(&self, x: &Point) -> Jet2<N> {
        let p = self.bump.profile(x);
        let mut j = self.base.jet2(x);
        for mu in 0..4 {
            let m = self.bump.components[mu] * re(self.eps);
            j.a[mu] += m * re(p.v);
            for l in 0..4 {
                j.da[l][mu] += m * re(p.d[l]);
                for k in 0..4 {
                    j.dda[k][l][mu] += m * re(p.dd[k][l]);
                }
            }
        }
        j
    }

    fn derivative_source(&self) -> DerivativeSource {
        self.base.derivative_source()
    }

    fn contains(&self, x: &Point) -> bool {
        self.base.contains(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::connection::{algebra_defect, derivative_check, fd_jet2};
    use std::sync::Arc;

    fn pts() -> Vec<Point> {
        vec![
            Point::new(0.3, -0.4, 0.1, 0.8),
            Point::new(-1.2, 0.5, 0.9, -0.3),
            Point::new(0.05, 0.02, -0.07, 0.01),
        ]
    }

    #[test]
    fn variants_have_opposite_orientations() {
        let a = THooftVariant::Eta.detect_orientation();
        let b = THooftVariant::EtaBar.detect_orientation();
        assert_ne!(a, b);
        assert_eq!(THooftVariant::for_orientation(a), THooftVariant::Eta);
    }

    #[test]
    fn bpst_curvature_at_origin() {
        for v in [THooftVariant::Eta, THooftVariant::EtaBar] {
            let b = Bpst::with_variant(1.0, Point::zeros(), v);
            let f = curvature_from_jet(&b.jet1(&Point::zeros()));
            let total: f64 = (0..4)
                .flat_map(|m| (0..4).map(move |n| (m, n)))
                .map(|(m, n)| f.get(m, n).norm_squared())
                .sum();
            assert!((total - 96.0).abs() < 1e-12);
            let f12 = f.get(0, 1);
            assert!((f12[(0, 0)] - im(2.0)).norm() < 1e-14);
            assert!((f12[(1, 1)] - im(-2.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn analytic_derivatives_match_fd() {
        let b = Bpst::new(0.8, Point::new(0.1, 0.0, -0.2, 0.3), Orientation::Antidual).unwrap();
        assert!(derivative_check(&b, &pts()) < 1e-6);
        assert!(algebra_defect(&b, &pts()) < 1e-14);
        for x in pts() {
            let j = b.jet2(&x);
            let fd = fd_jet2(|p| b.jet1(p), &x, 1e-4);
            for k in 0..4 {
                for l in 0..4 {
                    for mu in 0..4 {
                        assert!((j.dda[k][l][mu] - fd.dda[k][l][mu]).norm() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn abelian_jet_is_exact() {
        let c = So4Element::from_coefficients([0.4, -0.1, 0.2], [0.3, 0.0, -0.5]);
        let a = AbelianConstant::new(c);
        assert!(derivative_check::<2>(&a, &pts()) < 1e-9);
        assert!(derivative_check::<1>(&a, &pts()) < 1e-9);
    }

    #[test]
    fn bump_profile_derivatives() {
        let b = Bump::<2> {
            center: Point::new(0.2, 0.0, 0.0, 0.1),
            radius: 1.5,
            components: [su2_basis()[0]; 4],
        };
        let x = Point::new(0.5, -0.3, 0.4, 0.2);
        let j = b.profile(&x);
        let h = 1e-5;
        for l in 0..4 {
            let mut p = x;
            let mut m = x;
            p[l] += h;
            m[l] -= h;
            assert!(((b.profile(&p).v - b.profile(&m).v) / (2.0 * h) - j.d[l]).abs() < 1e-9);
            assert!(((b.profile(&p).d[1] - b.profile(&m).d[1]) / (2.0 * h) - j.dd[l][1]).abs() < 1e-8);
        }
        assert_eq!(b.profile(&Point::new(5.0, 0.0, 0.0, 0.0)).v, 0.0);
    }

    #[test]
    fn perturbed_field_jets() {
        let base: DynConnection<2> =
            Arc::new(Bpst::new(1.0, Point::zeros(), Orientation::Antidual).unwrap());
        let t = su2_basis();
        let bump = Bump {
            center: Point::new(0.3, 0.0, 0.0, 0.0),
            radius: 1.2,
            components: [t[0], t[1], t[2], t[0] + t[1]],
        };
        let p = Perturbed::new(base, 0.1, bump).unwrap();
        assert!(derivative_check(&p, &pts()) < 1e-6);
        assert_eq!(p.derivative_source(), DerivativeSource::Analytic);
    }
}
