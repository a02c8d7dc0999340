//! The connection abstraction: `A_μ(x)` with first and second derivatives.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{anti_hermitian_defect, re, GaugeMatrix};
use crate::constants::{FIELD_FD_STEP, FIELD_FD_STEP2};
use crate::geometry::Point;

/// `A_μ` at a point, indexed by `μ`.
pub type Potential<const N: usize> = [GaugeMatrix<N>; 4];

/// Value and first derivatives: `da[λ][μ] = ∂_λ A_μ`.
#[derive(Debug, Clone, Copy)]
pub struct Jet1<const N: usize> {
    pub a: Potential<N>,
    pub da: [Potential<N>; 4],
}

/// Value, first and second derivatives: `dda[κ][λ][μ] = ∂_κ∂_λ A_μ`.
#[derive(Debug, Clone, Copy)]
pub struct Jet2<const N: usize> {
    pub a: Potential<N>,
    pub da: [Potential<N>; 4],
    pub dda: [[Potential<N>; 4]; 4],
}

impl<const N: usize> Jet2<N> {
    pub fn first(&self) -> Jet1<N> {
        Jet1 {
            a: self.a,
            da: self.da,
        }
    }
}

/// Where a field's derivatives come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeSource {
    Analytic,
    /// Central differences with the recorded steps for first and second
    /// derivatives.
    FiniteDifference { step: f64, step2: f64 },
}

/// A gauge potential on (a domain of) the chart.
///
/// Only `potential` is required; the jet methods default to central finite
/// differences and should be overridden when closed forms exist.
pub trait Connection<const N: usize>: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn potential(&self, x: &Point) -> Potential<N>;

    fn jet1(&self, x: &Point) -> Jet1<N> {
        fd_jet1(|p| self.potential(p), x, FIELD_FD_STEP)
    }

    fn jet2(&self, x: &Point) -> Jet2<N> {
        fd_jet2(|p| self.jet1(p), x, FIELD_FD_STEP2)
    }

    fn derivative_source(&self) -> DerivativeSource {
        DerivativeSource::FiniteDifference {
            step: FIELD_FD_STEP,
            step2: FIELD_FD_STEP2,
        }
    }

    fn contains(&self, _x: &Point) -> bool {
        true
    }
}

/// Shared handle to a connection.
pub type DynConnection<const N: usize> = Arc<dyn Connection<N>>;

fn shifted(x: &Point, l: usize, h: f64) -> Point {
    let mut p = *x;
    p[l] += h;
    p
}

/// First derivatives by central differences of the potential.
pub fn fd_jet1<const N: usize>(f: impl Fn(&Point) -> Potential<N>, x: &Point, h: f64) -> Jet1<N> {
    let a = f(x);
    let mut da = [[GaugeMatrix::zeros(); 4]; 4];
    for (l, row) in da.iter_mut().enumerate() {
        let p = f(&shifted(x, l, h));
        let m = f(&shifted(x, l, -h));
        for mu in 0..4 {
            row[mu] = (p[mu] - m[mu]) * re(0.5 / h);
        }
    }
    Jet1 { a, da }
}

/// Second derivatives by central differences of first derivatives,
/// symmetrized in the two derivative slots.
pub fn fd_jet2<const N: usize>(f: impl Fn(&Point) -> Jet1<N>, x: &Point, h: f64) -> Jet2<N> {
    let base = f(x);
    let mut raw = [[[GaugeMatrix::zeros(); 4]; 4]; 4];
    for (k, slot) in raw.iter_mut().enumerate() {
        let p = f(&shifted(x, k, h));
        let m = f(&shifted(x, k, -h));
        for l in 0..4 {
            for mu in 0..4 {
                slot[l][mu] = (p.da[l][mu] - m.da[l][mu]) * re(0.5 / h);
            }
        }
    }
    let mut dda = raw;
    for k in 0..4 {
        for l in 0..4 {
            for mu in 0..4 {
                dda[k][l][mu] = (raw[k][l][mu] + raw[l][k][mu]) * re(0.5);
            }
        }
    }
    Jet2 {
        a: base.a,
        da: base.da,
        dda,
    }
}

/// A field given only by a closure; all derivatives are finite differences.
pub struct NumericConnection<const N: usize> {
    name: String,
    potential: Box<dyn Fn(&Point) -> Potential<N> + Send + Sync>,
}

impl<const N: usize> NumericConnection<N> {
    pub fn new(
        name: impl Into<String>,
        potential: impl Fn(&Point) -> Potential<N> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            potential: Box::new(potential),
        }
    }
}

impl<const N: usize> fmt::Debug for NumericConnection<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericConnection").field("name", &self.name).finish()
    }
}

impl<const N: usize> Connection<N> for NumericConnection<N> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn potential(&self, x: &Point) -> Potential<N> {
        (self.potential)(x)
    }
}

/// Largest relative mismatch between `jet1` and central differences of the
/// potential over `points`; used to cross-check analytic derivatives.
pub fn derivative_check<const N: usize>(conn: &dyn Connection<N>, points: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in points {
        let j = conn.jet1(x);
        let fd = fd_jet1(|p| conn.potential(p), x, FIELD_FD_STEP);
        let scale = j
            .da
            .iter()
            .flatten()
            .map(|m| m.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        for l in 0..4 {
            for mu in 0..4 {
                worst = worst.max((j.da[l][mu] - fd.da[l][mu]).norm() / scale);
            }
        }
    }
    worst
}

/// Largest anti-Hermiticity defect (plus trace modulus for `N ≥ 2`) of the
/// potential over `points`.
pub fn algebra_defect<const N: usize>(conn: &dyn Connection<N>, points: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in points {
        for a in conn.potential(x) {
            worst = worst.max(anti_hermitian_defect(&a));
            if N > 1 {
                worst = worst.max(a.trace().norm());
            }
        }
    }
    worst
}
