//! Yang–Mills action `S = −½∫ tr(F_{μν}F^{μν}) dVol` over a ball.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::connection::Connection;
use super::curvature::curvature;
use crate::algebra::{GaugeMatrix, TwoFormBlock};
use crate::error::{Error, Result};
use crate::geometry::chart::raise_indices;
use crate::geometry::{MetricChart, MetricData, Point};
use crate::quadrature::gauss_legendre;

/// Sampling of the ball `|x − center| ≤ radius` used for the action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionDomain {
    pub center: [f64; 4],
    pub radius: f64,
    /// Equal-width radial panels, each with `radial_order` Gauss nodes.
    pub radial_panels: usize,
    pub radial_order: usize,
    /// Gauss nodes per polar angle; the azimuth uses twice as many
    /// trapezoid nodes.
    pub angular_order: usize,
    /// Relative size of the outer-shell tail above which a divergence
    /// warning is attached.
    pub tail_tolerance: f64,
}

impl Default for ActionDomain {
    fn default() -> Self {
        Self {
            center: [0.0; 4],
            radius: 20.0,
            radial_panels: 20,
            radial_order: 8,
            angular_order: 8,
            tail_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionEstimate {
    pub value: f64,
    /// Difference against the same rule with half the radial panels.
    pub error_estimate: f64,
    /// Action on the shell `radius ≤ |x − center| ≤ 2·radius`, when that
    /// shell lies in the chart domain.
    pub tail_estimate: Option<f64>,
    pub warning: Option<String>,
}

/// The matrix trace over gauge indices (as opposed to the 4-index trace).
pub fn gauge_trace<const N: usize>(m: &GaugeMatrix<N>) -> f64 {
    m.trace().re
}

/// `−½ tr(F_{μν}F^{μν})`, without the volume factor.
pub fn action_density_with<const N: usize>(md: &MetricData, f: &TwoFormBlock<N>) -> f64 {
    let up = raise_indices(&md.g_inv, f);
    let mut s = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                s += gauge_trace(&(f.get(mu, nu) * up.get(mu, nu)));
            }
        }
    }
    -0.5 * s
}

/// Unit vectors on S³ with weights summing to `2π²`.
fn sphere_rule(order: usize) -> Vec<(Point, f64)> {
    let chi = gauss_legendre(order, 0.0, std::f64::consts::PI);
    let theta = gauss_legendre(order, 0.0, std::f64::consts::PI);
    let n_phi = 2 * order;
    let w_phi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut out = Vec::with_capacity(order * order * n_phi);
    for &(c, wc) in &chi {
        for &(t, wt) in &theta {
            for k in 0..n_phi {
                let p = k as f64 * w_phi;
                let (sc, cc) = c.sin_cos();
                let (st, ct) = t.sin_cos();
                let (sp, cp) = p.sin_cos();
                out.push((
                    Point::new(cc, sc * ct, sc * st * cp, sc * st * sp),
                    wc * wt * w_phi * sc * sc * st,
                ));
            }
        }
    }
    out
}

fn shell<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    center: &Point,
    r0: f64,
    r1: f64,
    panels: usize,
    order: usize,
    sphere: &[(Point, f64)],
) -> Result<f64> {
    let width = (r1 - r0) / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| gauss_legendre(order, r0 + p as f64 * width, r0 + (p + 1) as f64 * width))
        .collect();
    let parts: Result<Vec<f64>> = nodes
        .par_iter()
        .map(|&(r, wr)| {
            let mut s = 0.0;
            for (omega, wo) in sphere {
                let x = center + omega * r;
                let md = MetricData::at(chart, &x)?;
                let f = curvature(conn, &x);
                s += wo * action_density_with(&md, &f) * md.sqrt_det;
            }
            Ok(s * wr * r.powi(3))
        })
        .collect();
    Ok(parts?.iter().sum())
}

/// Quadrature of the Yang–Mills action over the ball described by `domain`.
pub fn ym_action<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    domain: &ActionDomain,
) -> Result<ActionEstimate> {
    if domain.radius <= 0.0 || domain.radial_panels < 2 || domain.radial_order == 0 {
        return Err(Error::InvalidArgument("degenerate action domain".into()));
    }
    let c = Point::from(domain.center);
    let sphere = sphere_rule(domain.angular_order.max(1));
    let (p, o, r) = (domain.radial_panels, domain.radial_order, domain.radius);
    let value = shell(conn, chart, &c, 0.0, r, p, o, &sphere)?;
    let coarse = shell(conn, chart, &c, 0.0, r, p / 2, o, &sphere)?;
    let tail = shell(conn, chart, &c, r, 2.0 * r, p / 2, o, &sphere).ok();
    let warning = match tail {
        Some(t) if t.abs() > domain.tail_tolerance * value.abs().max(f64::MIN_POSITIVE) => Some(
            format!("action tail {t:.3e} exceeds {} of the value; the integral may not have converged", domain.tail_tolerance),
        ),
        None => Some("tail shell leaves the chart domain; no tail estimate".into()),
        _ => None,
    };
    Ok(ActionEstimate {
        value,
        error_estimate: (value - coarse).abs(),
        tail_estimate: tail,
        warning,
    })
}
