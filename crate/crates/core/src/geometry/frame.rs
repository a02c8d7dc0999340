//! Levi-Civita transport of an orthonormal frame along a curve.

use nalgebra::{Matrix4, Vector4};

use super::chart::{MetricChart, MetricData};
use super::curve::Curve;
use crate::error::{Error, Result};
use crate::ode::{rk4_step, Grid, OdeState};

impl OdeState for Matrix4<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
}

/// Frames `Z_μ(γ, t)` on a grid; column `μ` of each matrix is `Z_μ`.
#[derive(Debug, Clone)]
pub struct FramePath {
    pub grid: Grid,
    pub frames: Vec<Matrix4<f64>>,
}

impl FramePath {
    /// Worst deviation of the Gram matrix `g(Z_μ, Z_ν)` from `δ_{μν}`.
    pub fn orthonormality_defect(&self, chart: &dyn MetricChart, curve: &Curve) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(&self.frames)
            .map(|(&t, z)| {
                let g = chart.metric(&curve.position(t));
                (z.transpose() * g * z - Matrix4::identity()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `dZ_μ/dt = −Γ(Z_μ, γ̇)`.
pub fn frame_derivative(md: &MetricData, z: &Matrix4<f64>, velocity: &Vector4<f64>) -> Matrix4<f64> {
    let mut dz = Matrix4::zeros();
    for mu in 0..4 {
        let col: Vector4<f64> = z.column(mu).into();
        dz.set_column(mu, &(-md.gamma_apply(&col, velocity)));
    }
    dz
}

/// Solves `∇Z = Ż + Γ(Z, γ̇) = 0` for each frame vector with RK4 on a
/// kink-aware grid of about `steps` intervals.
pub fn levi_civita_transport(
    chart: &dyn MetricChart,
    curve: &Curve,
    initial: &Matrix4<f64>,
    steps: usize,
) -> Result<FramePath> {
    let x0 = curve.position(0.0);
    let g0 = chart.metric(&x0);
    let gram = initial.transpose() * g0 * initial;
    if (gram - Matrix4::identity()).norm() > 1e-8 {
        return Err(Error::InvalidArgument(
            "initial frame is not orthonormal at γ(0)".into(),
        ));
    }
    let grid = Grid::new(&curve.breakpoints(), steps);
    let nodes = grid.nodes().to_vec();
    let mut frames = Vec::with_capacity(nodes.len());
    frames.push(*initial);
    if chart.is_flat() {
        frames.resize(nodes.len(), *initial);
        return Ok(FramePath { grid, frames });
    }
    let mut z = *initial;
    for w in nodes.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        z = rk4_step(t0, t1 - t0, &z, |t, side, z| {
            let x = curve.position(t);
            let md = MetricData::at(chart, &x)?;
            Ok(frame_derivative(&md, z, &curve.velocity_at(t, side)))
        })?;
        if !z.iter().all(|v| v.is_finite()) {
            return Err(Error::IntegrationFailure {
                t: t1,
                reason: "non-finite frame".into(),
            });
        }
        frames.push(z);
    }
    Ok(FramePath { grid, frames })
}
