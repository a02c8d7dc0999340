//! The transport ODE `dU/dt = −A_μ(γ)γ̇^μ U`, co-integrated with the
//! Levi-Civita frame and with quadrature accumulators.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::algebra::{expm, re, reunitarize, unitarity_defect, GaugeMatrix};
use crate::constants::UNITARITY_DRIFT_LIMIT;
use crate::error::{Error, Result};
use crate::gauge::Connection;
use crate::geometry::{default_frame, frame_derivative, Curve, MetricChart, MetricData, Point};
use crate::ode::{rk4_step, Grid, OdeState, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk4,
    /// Exponential midpoint rule; unitary by construction.
    Magnus2,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Rk4 => "rk4",
            Scheme::Magnus2 => "magnus2",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportOptions {
    /// Approximate number of steps on `[0, 1]`; each smooth piece gets an
    /// even share.
    pub steps: usize,
    pub scheme: Scheme,
    /// Reproject `U` onto the unitary group every this many steps.
    pub reproject_every: usize,
    /// Largest unitarity drift accepted between reprojections.
    pub drift_limit: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            steps: 2000,
            scheme: Scheme::Rk4,
            reproject_every: 50,
            drift_limit: UNITARITY_DRIFT_LIMIT,
        }
    }
}

impl TransportOptions {
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 || self.reproject_every < 1 {
            return Err(Error::InvalidArgument(format!(
                "transport needs steps ≥ 2 and reproject_every ≥ 1 (got {} and {})",
                self.steps, self.reproject_every
            )));
        }
        Ok(())
    }
}

/// `U_{t,0}` on a grid; `U_{t,s}` is recovered as `U_{t,0}U_{s,0}⁻¹`.
#[derive(Debug, Clone)]
pub struct TransportResult<const N: usize> {
    grid: Grid,
    u: Vec<GaugeMatrix<N>>,
    frames: Vec<Matrix4<f64>>,
    scheme: Scheme,
}

impl<const N: usize> TransportResult<N> {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// `U_{t_i, 0}`.
    pub fn from_origin(&self, i: usize) -> &GaugeMatrix<N> {
        &self.u[i]
    }

    /// `U_{t_i, t_j}`; exactly the identity when `i == j`.
    pub fn between(&self, i: usize, j: usize) -> GaugeMatrix<N> {
        if i == j {
            GaugeMatrix::identity()
        } else {
            self.u[i] * self.u[j].adjoint()
        }
    }

    /// `U_{1,0}`.
    pub fn holonomy(&self) -> &GaugeMatrix<N> {
        self.u.last().expect("grid is non-empty")
    }

    /// Levi-Civita frames `Z_μ(γ, t_i)` (columns).
    pub fn frames(&self) -> &[Matrix4<f64>] {
        &self.frames
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.u.iter().map(unitarity_defect).fold(0.0, f64::max)
    }
}

/// Everything an integrand may depend on at one time.
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    pub t: f64,
    pub side: Side,
    pub x: Point,
    pub velocity: Vector4<f64>,
    pub frame: Matrix4<f64>,
}

/// State of the augmented system.
#[derive(Debug, Clone)]
struct AugState<const N: usize> {
    u: GaugeMatrix<N>,
    z: Matrix4<f64>,
    y: Vec<GaugeMatrix<N>>,
}

impl<const N: usize> OdeState for AugState<N> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.u += x.u * re(a);
        self.z += x.z * a;
        for (y, dy) in self.y.iter_mut().zip(&x.y) {
            *y += dy * re(a);
        }
    }
}

fn generator<const N: usize>(conn: &dyn Connection<N>, x: &Point, v: &Vector4<f64>) -> GaugeMatrix<N> {
    let a = conn.potential(x);
    (0..4).fold(GaugeMatrix::zeros(), |acc, mu| {
        if v[mu] == 0.0 {
            acc
        } else {
            acc + a[mu] * re(v[mu])
        }
    })
}

/// Output of an augmented solve: the transport plus `Y_i(1)` with
/// `Y_i' = U_{t,0}† G_i(t) U_{t,0}`, so that
/// `∫₀¹ U_{1,t} G_i U_{t,0} dt = U_{1,0} Y_i(1)`.
#[derive(Debug, Clone)]
pub struct AugmentedResult<const N: usize> {
    pub transport: TransportResult<N>,
    pub accumulators: Vec<GaugeMatrix<N>>,
}

impl<const N: usize> AugmentedResult<N> {
    /// `∫₀¹ U_{1,t} G_i(t) U_{t,0} dt`.
    pub fn sandwiched(&self, i: usize) -> GaugeMatrix<N> {
        self.transport.holonomy() * self.accumulators[i]
    }
}

/// Solves the transport ODE along `curve` together with the frame transport
/// (curved charts only) and `n_acc` accumulators fed by `integrand`.
///
/// With `Scheme::Rk4` the accumulators are co-integrated stage by stage; with
/// `Scheme::Magnus2` they are integrated by per-piece Simpson from node values.
pub fn solve_augmented<const N: usize, G>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    opts: &TransportOptions,
    n_acc: usize,
    integrand: G,
) -> Result<AugmentedResult<N>>
where
    G: Fn(&PathPoint) -> Result<Vec<GaugeMatrix<N>>>,
{
    opts.validate()?;
    let grid = Grid::new(&curve.breakpoints(), opts.steps);
    let nodes = grid.nodes().to_vec();
    let flat = chart.is_flat();
    let z0 = default_frame(chart, &curve.position(0.0))?;
    let frame_rhs = |t: f64, side: Side, z: &Matrix4<f64>| -> Result<Matrix4<f64>> {
        if flat {
            return Ok(Matrix4::zeros());
        }
        let x = curve.position(t);
        let md = MetricData::at(chart, &x)?;
        Ok(frame_derivative(&md, z, &curve.velocity_at(t, side)))
    };

    let mut state = AugState {
        u: GaugeMatrix::<N>::identity(),
        z: z0,
        y: vec![GaugeMatrix::zeros(); n_acc],
    };
    let mut us = Vec::with_capacity(nodes.len());
    let mut zs = Vec::with_capacity(nodes.len());
    us.push(state.u);
    zs.push(state.z);

    let reproject = |state: &mut AugState<N>, t: f64| -> Result<()> {
        let drift = unitarity_defect(&state.u);
        if !(drift <= opts.drift_limit) {
            return Err(Error::StepFailure {
                t,
                drift,
                limit: opts.drift_limit,
            });
        }
        state.u = reunitarize(&state.u);
        Ok(())
    };

    match opts.scheme {
        Scheme::Rk4 => {
            let rhs = |t: f64, side: Side, s: &AugState<N>| -> Result<AugState<N>> {
                let x = curve.position(t);
                if !conn.contains(&x) {
                    return Err(Error::OutsideDomain {
                        point: [x[0], x[1], x[2], x[3]],
                    });
                }
                let v = curve.velocity_at(t, side);
                let du = -(generator(conn, &x, &v) * s.u);
                let dz = frame_rhs(t, side, &s.z)?;
                let dy = if n_acc == 0 {
                    vec![]
                } else {
                    let g = integrand(&PathPoint {
                        t,
                        side,
                        x,
                        velocity: v,
                        frame: s.z,
                    })?;
                    let ud = s.u.adjoint();
                    g.iter().map(|gi| ud * gi * s.u).collect()
                };
                Ok(AugState { u: du, z: dz, y: dy })
            };
            for (i, w) in nodes.windows(2).enumerate() {
                state = rk4_step(w[0], w[1] - w[0], &state, &rhs)?;
                if (i + 1) % opts.reproject_every == 0 || i + 2 == nodes.len() {
                    reproject(&mut state, w[1])?;
                }
                us.push(state.u);
                zs.push(state.z);
            }
        }
        Scheme::Magnus2 => {
            for (i, w) in nodes.windows(2).enumerate() {
                let (t0, h) = (w[0], w[1] - w[0]);
                let tm = t0 + 0.5 * h;
                let xm = curve.position(tm);
                let om = generator(conn, &xm, &curve.velocity_at(tm, Side::Right));
                state.u = expm(&(om * re(-h))) * state.u;
                state.z = rk4_step(t0, h, &state.z, |t, side, z| frame_rhs(t, side, z))?;
                if (i + 1) % opts.reproject_every == 0 || i + 2 == nodes.len() {
                    reproject(&mut state, w[1])?;
                }
                us.push(state.u);
                zs.push(state.z);
            }
            if n_acc > 0 {
                let mut acc = vec![GaugeMatrix::<N>::zeros(); n_acc];
                for &(s, e) in grid.pieces() {
                    let mut vals: Vec<Vec<GaugeMatrix<N>>> = vec![Vec::with_capacity(e - s + 1); n_acc];
                    for i in s..=e {
                        let side = if i == e { Side::Left } else { Side::Right };
                        let t = nodes[i];
                        let g = integrand(&PathPoint {
                            t,
                            side,
                            x: curve.position(t),
                            velocity: curve.velocity_at(t, side),
                            frame: zs[i],
                        })?;
                        let ud = us[i].adjoint();
                        for (k, gi) in g.iter().enumerate() {
                            vals[k].push(ud * gi * us[i]);
                        }
                    }
                    let h = (nodes[e] - nodes[s]) / (e - s) as f64;
                    for k in 0..n_acc {
                        acc[k] += crate::quadrature::simpson(&vals[k], h);
                    }
                }
                state.y = acc;
            }
        }
    }
    Ok(AugmentedResult {
        transport: TransportResult {
            grid,
            u: us,
            frames: zs,
            scheme: opts.scheme,
        },
        accumulators: state.y,
    })
}

/// Parallel transport along `curve` (no frame, no accumulators).
pub fn parallel_transport<const N: usize>(
    conn: &dyn Connection<N>,
    curve: &Curve,
    opts: &TransportOptions,
) -> Result<TransportResult<N>> {
    Ok(solve_augmented(conn, &crate::geometry::FlatChart, curve, opts, 0, |_| Ok(vec![]))?.transport)
}

/// Parallel transport together with the Levi-Civita frame on `chart`.
pub fn transport_with_frame<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    opts: &TransportOptions,
) -> Result<TransportResult<N>> {
    Ok(solve_augmented(conn, chart, curve, opts, 0, |_| Ok(vec![]))?.transport)
}

/// Error ratio `‖U_n − U_ref‖ / ‖U_{2n} − U_ref‖` against a reference solve
/// with `10·2n` steps; about 16 for a fourth-order scheme.
pub fn convergence_ratio<const N: usize>(
    conn: &dyn Connection<N>,
    curve: &Curve,
    opts: &TransportOptions,
    n: usize,
) -> Result<f64> {
    let solve = |steps| parallel_transport(conn, curve, &opts.clone().with_steps(steps));
    let reference = *solve(20 * n)?.holonomy();
    let coarse = (solve(n)?.holonomy() - reference).norm();
    let fine = (solve(2 * n)?.holonomy() - reference).norm();
    Ok(coarse / fine)
}
