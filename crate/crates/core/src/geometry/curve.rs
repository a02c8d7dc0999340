//! Parametric curves `[0, 1] → chart`, with the truncation and squeeze
//! surgeries and reparametrizations.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};

use super::chart::{MetricChart, Point};
use super::direction::DirectionField;
use crate::error::{Error, Result};
use crate::ode::Side;

/// A piecewise-C¹ parametrized curve.
///
/// `velocity` takes a side so that integrators can read the correct one-sided
/// derivative at a kink; away from kinks both sides agree.
pub trait CurveFn: Send + Sync + fmt::Debug {
    fn position(&self, t: f64) -> Point;
    fn velocity(&self, t: f64, side: Side) -> Vector4<f64>;
    /// Interior parameters where the velocity may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Shared handle to a curve.
#[derive(Clone, Debug)]
pub struct Curve(Arc<dyn CurveFn>);

impl Curve {
    pub fn new(f: impl CurveFn + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(point: Point) -> Self {
        Self::new(Constant { point })
    }

    /// `start + t·direction`.
    pub fn line(start: Point, direction: Vector4<f64>) -> Self {
        Self::new(Line { start, direction })
    }

    /// `center + radius·(cos 2πt·u + sin 2πt·v)`; `u, v` are orthonormalized.
    pub fn circle(center: Point, radius: f64, u: Vector4<f64>, v: Vector4<f64>) -> Result<Self> {
        let (u, v) = orthonormal_pair(u, v)?;
        Ok(Self::new(Circle {
            center,
            radius,
            u,
            v,
        }))
    }

    /// Lissajous figure-eight `center + radius·(sin 2πt·u + ½ sin 4πt·v)`.
    pub fn figure_eight(
        center: Point,
        radius: f64,
        u: Vector4<f64>,
        v: Vector4<f64>,
    ) -> Result<Self> {
        let (u, v) = orthonormal_pair(u, v)?;
        Ok(Self::new(FigureEight {
            center,
            radius,
            u,
            v,
        }))
    }

    /// Natural cubic spline through `points` at uniform parameters.
    pub fn spline(points: &[Point]) -> Result<Self> {
        Ok(Self::new(Spline::new(points)?))
    }

    pub fn position(&self, t: f64) -> Point {
        self.0.position(t)
    }

    /// Right-continuous velocity (left limit at `t = 1`).
    pub fn velocity(&self, t: f64) -> Vector4<f64> {
        let side = if t >= 1.0 { Side::Left } else { Side::Right };
        self.0.velocity(t, side)
    }

    pub fn velocity_at(&self, t: f64, side: Side) -> Vector4<f64> {
        self.0.velocity(t, side)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.0.breakpoints();
        b.retain(|&s| s > 0.0 && s < 1.0);
        b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        b.dedup();
        b
    }

    /// `γ^r`: follows `γ` up to `r`, then stays at `γ(r)`.
    pub fn truncate(&self, r: f64) -> Result<Self> {
        check_unit("r", r)?;
        if r >= 1.0 {
            return Ok(self.clone());
        }
        if r <= 0.0 {
            return Ok(Self::constant(self.position(0.0)));
        }
        Ok(Self::new(Truncated {
            inner: self.clone(),
            r,
        }))
    }

    /// `γ_{r,ε}`: traverses `γ|[0,r]` during `[0, ε]`, then stays at `γ(r)`.
    pub fn squeeze(&self, r: f64, eps: f64) -> Result<Self> {
        check_unit("r", r)?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("squeeze ε must lie in (0, 1], got {eps}")));
        }
        if r <= 0.0 {
            return Ok(Self::constant(self.position(0.0)));
        }
        Ok(Self::new(Squeezed {
            inner: self.clone(),
            r,
            eps,
        }))
    }

    /// `γ∘σ`.
    pub fn reparametrize(&self, warp: Warp) -> Result<Self> {
        warp.validate()?;
        Ok(Self::new(Reparametrized {
            inner: self.clone(),
            warp,
        }))
    }

    /// `γ + Σ_k s_k · frame·h_k`, a chart-level displacement (flat charts).
    pub fn displaced(&self, terms: Vec<(f64, DirectionField)>, frame: Matrix4<f64>) -> Self {
        Self::new(Displaced {
            inner: self.clone(),
            terms,
            frame,
        })
    }

    /// Riemannian length `∫ |γ̇|_g dt` by Simpson on a kink-aware grid.
    pub fn length(&self, chart: &dyn MetricChart, steps: usize) -> f64 {
        let grid = crate::ode::Grid::new(&self.breakpoints(), steps);
        let nodes = grid.nodes();
        let speed = |t: f64, side: Side| {
            let v = self.velocity_at(t, side);
            (v.transpose() * chart.metric(&self.position(t)) * v)[(0, 0)]
                .max(0.0)
                .sqrt()
        };
        let mut total = 0.0;
        for &(s, e) in grid.pieces() {
            let piece: Vec<f64> = (s..=e)
                .map(|i| speed(nodes[i], if i == e { Side::Left } else { Side::Right }))
                .collect();
            let h = (nodes[e] - nodes[s]) / (e - s) as f64;
            total += crate::quadrature::simpson(&piece, h);
        }
        total
    }

    /// Largest relative mismatch between `velocity` and a central difference of
    /// `position` over `samples` interior parameters away from kinks.
    pub fn velocity_consistency(&self, samples: &[f64]) -> f64 {
        let h = 1e-6;
        let bps = self.breakpoints();
        let mut worst: f64 = 0.0;
        for &t in samples {
            if t - h <= 0.0 || t + h >= 1.0 || bps.iter().any(|b| (b - t).abs() < 2.0 * h) {
                continue;
            }
            let fd = (self.position(t + h) - self.position(t - h)) / (2.0 * h);
            let v = self.velocity(t);
            let scale = v.norm().max(1e-12);
            worst = worst.max((fd - v).norm() / scale);
        }
        worst
    }

    /// Checks that sampled positions lie in the chart domain.
    pub fn check_in_domain(&self, chart: &dyn MetricChart, samples: usize) -> Result<()> {
        for i in 0..=samples {
            let x = self.position(i as f64 / samples as f64);
            if !chart.contains(&x) {
                return Err(Error::OutsideDomain {
                    point: [x[0], x[1], x[2], x[3]],
                });
            }
        }
        Ok(())
    }
}

fn check_unit(name: &str, r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {r}")))
    }
}

fn orthonormal_pair(u: Vector4<f64>, v: Vector4<f64>) -> Result<(Vector4<f64>, Vector4<f64>)> {
    let nu = u.norm();
    if nu < 1e-12 {
        return Err(Error::InvalidArgument("degenerate plane vector u".into()));
    }
    let u = u / nu;
    let w = v - u * u.dot(&v);
    let nw = w.norm();
    if nw < 1e-12 {
        return Err(Error::InvalidArgument("plane vectors are parallel".into()));
    }
    Ok((u, w / nw))
}

#[derive(Debug)]
struct Constant {
    point: Point,
}

impl CurveFn for Constant {
    fn position(&self, _t: f64) -> Point {
        self.point
    }
    fn velocity(&self, _t: f64, _side: Side) -> Vector4<f64> {
        Vector4::zeros()
    }
}

#[derive(Debug)]
struct Line {
    start: Point,
    direction: Vector4<f64>,
}

impl CurveFn for Line {
    fn position(&self, t: f64) -> Point {
        self.start + self.direction * t
    }
    fn velocity(&self, _t: f64, _side: Side) -> Vector4<f64> {
        self.direction
    }
}

#[derive(Debug)]
struct Circle {
    center: Point,
    radius: f64,
    u: Vector4<f64>,
    v: Vector4<f64>,
}

impl CurveFn for Circle {
    fn position(&self, t: f64) -> Point {
        let a = 2.0 * PI * t;
        self.center + (self.u * a.cos() + self.v * a.sin()) * self.radius
    }
    fn velocity(&self, t: f64, _side: Side) -> Vector4<f64> {
        let a = 2.0 * PI * t;
        (self.v * a.cos() - self.u * a.sin()) * (2.0 * PI * self.radius)
    }
}

#[derive(Debug)]
struct FigureEight {
    center: Point,
    radius: f64,
    u: Vector4<f64>,
    v: Vector4<f64>,
}

impl CurveFn for FigureEight {
    fn position(&self, t: f64) -> Point {
        let a = 2.0 * PI * t;
        self.center + (self.u * a.sin() + self.v * (0.5 * (2.0 * a).sin())) * self.radius
    }
    fn velocity(&self, t: f64, _side: Side) -> Vector4<f64> {
        let a = 2.0 * PI * t;
        (self.u * a.cos() + self.v * (2.0 * a).cos()) * (2.0 * PI * self.radius)
    }
}

/// Natural cubic spline with uniform knots `t_i = i/(m−1)`.
#[derive(Debug)]
struct Spline {
    points: Vec<Point>,
    second: Vec<Vector4<f64>>,
    h: f64,
}

impl Spline {
    fn new(points: &[Point]) -> Result<Self> {
        let m = points.len();
        if m < 2 {
            return Err(Error::InvalidArgument("a spline needs at least two control points".into()));
        }
        let h = 1.0 / (m - 1) as f64;
        let mut second = vec![Vector4::zeros(); m];
        if m > 2 {
            // tridiagonal system M_{i-1} + 4M_i + M_{i+1} = 6(y_{i+1} − 2y_i + y_{i−1})/h²
            let n = m - 2;
            let mut diag = vec![4.0; n];
            let mut rhs: Vec<Vector4<f64>> = (1..m - 1)
                .map(|i| (points[i + 1] - points[i] * 2.0 + points[i - 1]) * (6.0 / (h * h)))
                .collect();
            for i in 1..n {
                let w = 1.0 / diag[i - 1];
                diag[i] -= w;
                let prev = rhs[i - 1];
                rhs[i] -= prev * w;
            }
            let mut sol = vec![Vector4::zeros(); n];
            sol[n - 1] = rhs[n - 1] / diag[n - 1];
            for i in (0..n - 1).rev() {
                sol[i] = (rhs[i] - sol[i + 1]) / diag[i];
            }
            second[1..(n + 1)].copy_from_slice(&sol[..n]);
        }
        Ok(Self {
            points: points.to_vec(),
            second,
            h,
        })
    }

    fn segment(&self, t: f64, side: Side) -> (usize, f64) {
        let m = self.points.len();
        let s = (t.clamp(0.0, 1.0)) / self.h;
        let mut i = s.floor() as usize;
        if side == Side::Left && (s - s.round()).abs() < 1e-12 && s.round() as usize > 0 {
            i = s.round() as usize - 1;
        }
        i = i.min(m - 2);
        (i, t - i as f64 * self.h)
    }
}

impl CurveFn for Spline {
    fn position(&self, t: f64) -> Point {
        let (i, d) = self.segment(t, Side::Right);
        let h = self.h;
        let (a, b) = (h - d, d);
        let (mi, mj) = (self.second[i], self.second[i + 1]);
        let (yi, yj) = (self.points[i], self.points[i + 1]);
        mi * (a * a * a / (6.0 * h))
            + mj * (b * b * b / (6.0 * h))
            + (yi - mi * (h * h / 6.0)) * (a / h)
            + (yj - mj * (h * h / 6.0)) * (b / h)
    }
    fn velocity(&self, t: f64, side: Side) -> Vector4<f64> {
        let (i, d) = self.segment(t, side);
        let h = self.h;
        let (a, b) = (h - d, d);
        let (mi, mj) = (self.second[i], self.second[i + 1]);
        let (yi, yj) = (self.points[i], self.points[i + 1]);
        -mi * (a * a / (2.0 * h)) + mj * (b * b / (2.0 * h)) + (yj - yi) / h
            - (mj - mi) * (h / 6.0)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (1..self.points.len() - 1).map(|i| i as f64 * self.h).collect()
    }
}

#[derive(Debug)]
struct Truncated {
    inner: Curve,
    r: f64,
}

impl CurveFn for Truncated {
    fn position(&self, t: f64) -> Point {
        self.inner.position(t.min(self.r))
    }
    fn velocity(&self, t: f64, side: Side) -> Vector4<f64> {
        if t < self.r || (t == self.r && side == Side::Left) {
            self.inner.velocity_at(t, side)
        } else {
            Vector4::zeros()
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.inner.breakpoints().into_iter().filter(|&s| s < self.r).collect();
        b.push(self.r);
        b
    }
}

#[derive(Debug)]
struct Squeezed {
    inner: Curve,
    r: f64,
    eps: f64,
}

impl CurveFn for Squeezed {
    fn position(&self, t: f64) -> Point {
        if t <= self.eps {
            self.inner.position((self.r * t / self.eps).min(self.r))
        } else {
            self.inner.position(self.r)
        }
    }
    fn velocity(&self, t: f64, side: Side) -> Vector4<f64> {
        if t < self.eps || (t == self.eps && (side == Side::Left || self.eps >= 1.0)) {
            let s = (self.r * t / self.eps).min(self.r);
            let side = if t == self.eps { Side::Left } else { side };
            self.inner.velocity_at(s, side) * (self.r / self.eps)
        } else {
            Vector4::zeros()
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .inner
            .breakpoints()
            .into_iter()
            .filter(|&s| s < self.r)
            .map(|s| s * self.eps / self.r)
            .collect();
        b.push(self.eps);
        b
    }
}

/// Monotone reparametrization `σ: [0,1] → [0,1]` with `σ(0) = 0`, `σ(1) = 1`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    Identity,
    /// `σ(t) = t^p`, `p ≥ 1`.
    Power { p: f64 },
    /// Linear interpolation through `(t_i, σ_i)` knots.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl Warp {
    pub fn validate(&self) -> Result<()> {
        match self {
            Warp::Identity => Ok(()),
            Warp::Power { p } if *p >= 1.0 => Ok(()),
            Warp::Power { p } => Err(Error::InvalidArgument(format!(
                "power warp needs p ≥ 1 for a C¹ reparametrization, got {p}"
            ))),
            Warp::PiecewiseLinear { knots } => {
                let ok = knots.len() >= 2
                    && knots[0] == (0.0, 0.0)
                    && knots[knots.len() - 1] == (1.0, 1.0)
                    && knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1);
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(
                        "piecewise-linear warp must run monotonically from (0,0) to (1,1)".into(),
                    ))
                }
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Warp::Identity => t,
            Warp::Power { p } => t.max(0.0).powf(*p),
            Warp::PiecewiseLinear { knots } => {
                let i = Self::segment(knots, t, Side::Right);
                let (a, b) = (knots[i], knots[i + 1]);
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }

    pub fn derivative(&self, t: f64, side: Side) -> f64 {
        match self {
            Warp::Identity => 1.0,
            Warp::Power { p } => p * t.max(0.0).powf(p - 1.0),
            Warp::PiecewiseLinear { knots } => {
                let i = Self::segment(knots, t, side);
                let (a, b) = (knots[i], knots[i + 1]);
                (b.1 - a.1) / (b.0 - a.0)
            }
        }
    }

    fn segment(knots: &[(f64, f64)], t: f64, side: Side) -> usize {
        let last = knots.len() - 2;
        for i in 0..=last {
            let hi = knots[i + 1].0;
            if t < hi || (t == hi && side == Side::Left) {
                return i;
            }
        }
        last
    }

    /// Kinks of `σ` itself.
    fn kinks(&self) -> Vec<f64> {
        match self {
            Warp::PiecewiseLinear { knots } => {
                knots[1..knots.len() - 1].iter().map(|k| k.0).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Some `t` with `σ(t) = s`.
    fn preimage(&self, s: f64) -> f64 {
        match self {
            Warp::Identity => s,
            Warp::Power { p } => s.powf(1.0 / p),
            Warp::PiecewiseLinear { knots } => {
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if s >= a.1 && s <= b.1 && b.1 > a.1 {
                        return a.0 + (b.0 - a.0) * (s - a.1) / (b.1 - a.1);
                    }
                }
                s
            }
        }
    }
}

#[derive(Debug)]
struct Reparametrized {
    inner: Curve,
    warp: Warp,
}

impl CurveFn for Reparametrized {
    fn position(&self, t: f64) -> Point {
        self.inner.position(self.warp.value(t))
    }
    fn velocity(&self, t: f64, side: Side) -> Vector4<f64> {
        self.inner.velocity_at(self.warp.value(t), side) * self.warp.derivative(t, side)
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.warp.kinks();
        b.extend(self.inner.breakpoints().into_iter().map(|s| self.warp.preimage(s)));
        b
    }
}

#[derive(Debug)]
struct Displaced {
    inner: Curve,
    terms: Vec<(f64, DirectionField)>,
    frame: Matrix4<f64>,
}

impl CurveFn for Displaced {
    fn position(&self, t: f64) -> Point {
        let mut x = self.inner.position(t);
        for (s, h) in &self.terms {
            x += self.frame * h.value(t) * *s;
        }
        x
    }
    fn velocity(&self, t: f64, side: Side) -> Vector4<f64> {
        let mut v = self.inner.velocity_at(t, side);
        for (s, h) in &self.terms {
            v += self.frame * h.derivative(t) * *s;
        }
        v
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::FlatChart;

    fn e(i: usize) -> Vector4<f64> {
        let mut v = Vector4::zeros();
        v[i] = 1.0;
        v
    }

    fn samples() -> Vec<f64> {
        (1..40).map(|i| i as f64 / 40.0 + 0.003).collect()
    }

    #[test]
    fn analytic_families_have_consistent_velocity() {
        let c = Curve::circle(Point::zeros(), 1.3, e(0), e(1) + e(0) * 0.2).unwrap();
        assert!(c.velocity_consistency(&samples()) < 1e-6);
        let f = Curve::figure_eight(Point::new(0.1, 0.0, 0.0, 0.0), 0.8, e(2), e(3)).unwrap();
        assert!(f.velocity_consistency(&samples()) < 1e-6);
        let l = Curve::line(Point::new(1.0, 2.0, 3.0, 4.0), Vector4::new(-1.0, 0.5, 0.0, 2.0));
        assert!(l.velocity_consistency(&samples()) < 1e-6);
    }

    #[test]
    fn spline_interpolates_and_is_consistent() {
        let pts = vec![
            Point::new(0.0, 0.0, 0.0, 0.0),
            Point::new(0.5, 0.3, 0.0, -0.2),
            Point::new(0.8, 1.0, 0.4, 0.0),
            Point::new(0.2, 1.2, 0.9, 0.5),
        ];
        let s = Curve::spline(&pts).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert!((s.position(i as f64 / 3.0) - p).norm() < 1e-14);
        }
        assert!(s.velocity_consistency(&samples()) < 1e-6);
        // C¹ at knots
        let t = 1.0 / 3.0;
        assert!((s.velocity_at(t, Side::Left) - s.velocity_at(t, Side::Right)).norm() < 1e-12);
    }

    #[test]
    fn truncate_definitions() {
        let c = Curve::circle(Point::zeros(), 1.0, e(0), e(1)).unwrap();
        assert!((c.truncate(0.5).unwrap().position(0.75) - c.position(0.5)).norm() < 1e-15);
        let full = c.truncate(1.0).unwrap();
        assert_eq!(full.position(0.3), c.position(0.3));
        let none = c.truncate(0.0).unwrap();
        assert_eq!(none.position(0.6), c.position(0.0));
        assert_eq!(none.velocity(0.6), Vector4::zeros());
        let tr = c.truncate(0.4).unwrap();
        assert_eq!(tr.velocity_at(0.4, Side::Right), Vector4::zeros());
        assert_eq!(tr.velocity_at(0.4, Side::Left), c.velocity(0.4));
        assert_eq!(tr.breakpoints(), vec![0.4]);
        assert_eq!(tr.position(0.0), c.position(0.0));
        assert!(c.truncate(1.5).is_err());
    }

    #[test]
    fn squeeze_definitions() {
        let c = Curve::figure_eight(Point::zeros(), 1.0, e(0), e(1)).unwrap();
        let s = c.squeeze(0.6, 0.25).unwrap();
        assert!((s.position(0.25) - c.position(0.6)).norm() < 1e-15);
        assert!((s.position(0.9) - c.position(0.6)).norm() < 1e-15);
        let t = 0.1;
        let expected = c.velocity(0.6 * t / 0.25) * (0.6 / 0.25);
        assert!((s.velocity(t) - expected).norm() < 1e-12);
        assert_eq!(s.position(0.0), c.position(0.0));
        // ε = 1 is truncation
        let s1 = c.squeeze(0.6, 1.0).unwrap();
        assert!((s1.position(0.5) - c.position(0.3)).norm() < 1e-15);
        assert!(c.squeeze(0.5, 0.0).is_err());
    }

    #[test]
    fn reparametrized_curve_and_kinks() {
        let c = Curve::circle(Point::zeros(), 1.0, e(0), e(1)).unwrap();
        let w = Warp::PiecewiseLinear {
            knots: vec![(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)],
        };
        let r = c.reparametrize(w).unwrap();
        assert_eq!(r.breakpoints(), vec![0.5]);
        assert!((r.position(0.5) - c.position(0.2)).norm() < 1e-15);
        assert!((r.velocity_at(0.5, Side::Left) - c.velocity(0.2) * 0.4).norm() < 1e-12);
        assert!((r.velocity_at(0.5, Side::Right) - c.velocity(0.2) * 1.6).norm() < 1e-12);
        assert!(c.reparametrize(Warp::Power { p: 0.5 }).is_err());
    }

    #[test]
    fn length_of_circle() {
        let c = Curve::circle(Point::zeros(), 2.0, e(0), e(2)).unwrap();
        assert!((c.length(&FlatChart, 200) - 4.0 * PI).abs() < 1e-10);
        let tr = c.truncate(0.25).unwrap();
        assert!((tr.length(&FlatChart, 200) - PI).abs() < 1e-10);
    }
}
