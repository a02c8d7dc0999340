use nalgebra::Matrix4;

use super::so4::{exp_so4, So4Element};

/// One-parameter rotation path `W(t) = exp(t·generator)` in SO(4).
///
/// `L_W(t) = W(t)⁻¹Ẇ(t)` equals the generator for every `t`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RotationPath {
    generator: So4Element,
}

impl RotationPath {
    pub fn new(generator: So4Element) -> Self {
        Self { generator }
    }

    pub fn identity() -> Self {
        Self::new(So4Element::zero())
    }

    pub fn generator(&self) -> &So4Element {
        &self.generator
    }

    pub fn at(&self, t: f64) -> Matrix4<f64> {
        exp_so4(&self.generator, t)
    }

    /// `L_W(t)`.
    pub fn log_derivative(&self, _t: f64) -> So4Element {
        self.generator
    }

    /// Samples `W` on `grid`.
    pub fn sample(&self, grid: &[f64]) -> Vec<Matrix4<f64>> {
        grid.iter().map(|&t| self.at(t)).collect()
    }

    /// Worst orthogonality / determinant defect of `W` over `grid`.
    pub fn check_on_grid(&self, grid: &[f64]) -> f64 {
        self.sample(grid)
            .iter()
            .map(|w| {
                let orth = (w.transpose() * w - Matrix4::identity()).norm();
                orth.max((w.determinant() - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// `W⁻¹Ẇ` by central differences; used to validate the generator identity.
    pub fn fd_log_derivative(&self, t: f64, h: f64) -> Matrix4<f64> {
        let w = self.at(t);
        let dw = (self.at(t + h) - self.at(t - h)) / (2.0 * h);
        w.transpose() * dw
    }
}
