//! Composite Simpson and Gauss-Legendre rules.

use std::ops::Add;

use nalgebra::SMatrix;
use num_complex::Complex64;

/// Values that quadrature rules can combine: sums and real multiples.
pub trait Linear: Copy + Add<Output = Self> {
    fn scaled(self, s: f64) -> Self;
}

impl Linear for f64 {
    fn scaled(self, s: f64) -> Self {
        self * s
    }
}

impl<const R: usize, const C: usize> Linear for SMatrix<f64, R, C> {
    fn scaled(self, s: f64) -> Self {
        self * s
    }
}

impl<const R: usize, const C: usize> Linear for SMatrix<Complex64, R, C> {
    fn scaled(self, s: f64) -> Self {
        self * Complex64::new(s, 0.0)
    }
}

/// Composite Simpson rule over samples on a uniform grid with an even number
/// of intervals. Falls back to the trapezoid rule on a single interval.
pub fn simpson<T: Linear>(values: &[T], h: f64) -> T {
    let n = values.len();
    assert!(n >= 2, "simpson needs at least two samples");
    if n == 2 {
        return (values[0] + values[1]).scaled(0.5 * h);
    }
    if (n - 1) % 2 == 1 {
        // odd interval count: Simpson on all but the last interval, trapezoid on it
        let head = simpson(&values[..n - 1], h);
        return head + (values[n - 2] + values[n - 1]).scaled(0.5 * h);
    }
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + v.scaled(w);
    }
    acc.scaled(h / 3.0)
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n {
        // Tricomi initial guess, refined by Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial shifted to `[0, 1]`.
pub fn shifted_legendre(n: usize, t: f64) -> f64 {
    let x = 2.0 * t - 1.0;
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}
