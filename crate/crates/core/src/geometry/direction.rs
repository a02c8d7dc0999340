//! Admissible directions `h ∈ H¹_{0,0}`: fields on `[0, 1]` vanishing at both
//! endpoints, written in transported-frame components.

use std::f64::consts::PI;

use nalgebra::Vector4;

/// Scalar profile on `[0, 1]` with `p(0) = p(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `sin(kπt)`, `k ≥ 1`.
    Sine { k: u32 },
    /// `t(1−t)·t^j`.
    Bubble { j: u32 },
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        match *self {
            Profile::Sine { k } => (k as f64 * PI * t).sin(),
            Profile::Bubble { j } => t * (1.0 - t) * t.powi(j as i32),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Profile::Sine { k } => {
                let w = k as f64 * PI;
                w * (w * t).cos()
            }
            Profile::Bubble { j } => {
                // d/dt (t^{j+1} − t^{j+2})
                let j = j as i32;
                (j + 1) as f64 * t.powi(j) - (j + 2) as f64 * t.powi(j + 1)
            }
        }
    }

    /// The standard direction family: `sin(kπt)` for `k = 1..=n_sine` followed by
    /// `t(1−t)t^j` for `j = 0..n_bubble`.
    pub fn family(n_sine: u32, n_bubble: u32) -> Vec<Profile> {
        (1..=n_sine)
            .map(|k| Profile::Sine { k })
            .chain((0..n_bubble).map(|j| Profile::Bubble { j }))
            .collect()
    }
}

/// `h(t) = Σ_k c_k · p_k(t)` with constant coefficient vectors `c_k ∈ ℝ⁴`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirectionField {
    terms: Vec<(Vector4<f64>, Profile)>,
}

impl DirectionField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(terms: Vec<(Vector4<f64>, Profile)>) -> Self {
        Self { terms }
    }

    /// `p(t)·e_μ`.
    pub fn unit(mu: usize, profile: Profile) -> Self {
        let mut c = Vector4::zeros();
        c[mu] = 1.0;
        Self::new(vec![(c, profile)])
    }

    pub fn terms(&self) -> &[(Vector4<f64>, Profile)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.iter().all(|v| *v == 0.0))
    }

    pub fn value(&self, t: f64) -> Vector4<f64> {
        self.terms
            .iter()
            .fold(Vector4::zeros(), |acc, (c, p)| acc + c * p.value(t))
    }

    pub fn derivative(&self, t: f64) -> Vector4<f64> {
        self.terms
            .iter()
            .fold(Vector4::zeros(), |acc, (c, p)| acc + c * p.derivative(t))
    }
}
