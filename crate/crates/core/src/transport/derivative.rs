//! Directional derivatives of `U_{1,0}(γ)` with respect to the curve:
//! analytic formulas and finite-difference oracles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{parallel_transport, solve_augmented, PathPoint, TransportOptions};
use crate::algebra::{re, GaugeMatrix};
use crate::error::{Error, Result};
use crate::gauge::{curvature, Connection, FieldSample};
use crate::geometry::{default_frame, Curve, DirectionField, MetricChart, Warp};
use crate::ode::{rk4_step, OdeState, Side};

/// `h̃(t) = Σ_μ Z_μ(γ,t) h^μ(t)` as a plain array.
fn lift(frame: &nalgebra::Matrix4<f64>, h: &nalgebra::Vector4<f64>) -> [f64; 4] {
    let v = frame * h;
    [v[0], v[1], v[2], v[3]]
}

fn arr(v: &nalgebra::Vector4<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

/// `d_h̃ U_{1,0} = −∫₀¹ U_{1,t} F(γ(t))⟨h̃(t), γ̇(t)⟩ U_{t,0} dt` for
/// `h(0) = h(1) = 0`.
pub fn first_derivative<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    h: &DirectionField,
    opts: &TransportOptions,
) -> Result<GaugeMatrix<N>> {
    if h.is_zero() {
        return Ok(GaugeMatrix::zeros());
    }
    let integrand = |p: &PathPoint| {
        let f = curvature(conn, &p.x);
        Ok(vec![f.contract(&lift(&p.frame, &h.value(p.t)), &arr(&p.velocity))])
    };
    let a = solve_augmented(conn, chart, curve, opts, 1, integrand)?;
    Ok(-a.sandwiched(0))
}

/// A finite-difference estimate with its Richardson residual.
#[derive(Debug, Clone)]
pub struct FdEstimate<const N: usize> {
    pub value: GaugeMatrix<N>,
    /// Raw differences, one per step in the schedule.
    pub raw: Vec<GaugeMatrix<N>>,
    /// `‖extrapolated − finest raw difference‖`.
    pub residual: f64,
    pub warning: Option<String>,
}

/// Schedule and tolerance for finite-difference oracles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdSchedule {
    /// Decreasing steps; consecutive pairs are combined by Richardson
    /// extrapolation assuming an `O(ε²)` leading error.
    pub steps: Vec<f64>,
    /// Residual above which a noise-floor warning is attached.
    pub tolerance: f64,
}

impl FdSchedule {
    pub fn first_order_default() -> Self {
        Self {
            steps: vec![1e-3, 5e-4],
            tolerance: 1e-6,
        }
    }

    pub fn second_order_default() -> Self {
        Self {
            steps: vec![1e-2, 5e-3],
            tolerance: 1e-4,
        }
    }
}

fn richardson<const N: usize>(eps: &[f64], raw: &[GaugeMatrix<N>]) -> GaugeMatrix<N> {
    let mut level: Vec<GaugeMatrix<N>> = raw.to_vec();
    let mut e: Vec<f64> = eps.to_vec();
    let mut power = 2;
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() - 1);
        for i in 0..level.len() - 1 {
            let r = (e[i] / e[i + 1]).powi(power);
            next.push((level[i + 1] * re(r) - level[i]) * re(1.0 / (r - 1.0)));
        }
        level = next;
        e.remove(0);
        power += 2;
    }
    level[0]
}

/// Finite-difference derivative of `U_{1,0}` under the chart-level
/// perturbation `γ + ε h̃` (flat charts only).
///
/// Order 1: `(U(γ+εh̃) − U(γ−εh̃))/(2ε)`. Order 2: the mixed central
/// difference in two parameters along `h̃₁`, `h̃₂` (defaulting to `h₂ = h₁`).
pub fn fd_directional_derivative<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    h1: &DirectionField,
    h2: Option<&DirectionField>,
    order: u8,
    schedule: &FdSchedule,
    opts: &TransportOptions,
) -> Result<FdEstimate<N>> {
    if !chart.is_flat() {
        return Err(Error::NotFlat {
            chart: chart.name(),
        });
    }
    if schedule.steps.is_empty() || schedule.steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "finite-difference steps must be non-empty and strictly decreasing".into(),
        ));
    }
    let frame = default_frame(chart, &curve.position(0.0))?;
    let h2 = h2.unwrap_or(h1);
    let stencil: Vec<(f64, f64, f64)> = match order {
        1 => vec![(1.0, 0.0, 0.5), (-1.0, 0.0, -0.5)],
        2 => vec![
            (1.0, 1.0, 0.25),
            (1.0, -1.0, -0.25),
            (-1.0, 1.0, -0.25),
            (-1.0, -1.0, 0.25),
        ],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "finite-difference order must be 1 or 2, got {order}"
            )))
        }
    };
    let jobs: Vec<(usize, f64, f64, f64)> = schedule
        .steps
        .iter()
        .enumerate()
        .flat_map(|(k, &e)| stencil.iter().map(move |&(a, b, w)| (k, a * e, b * e, w)))
        .collect();
    let values: Result<Vec<(usize, GaugeMatrix<N>)>> = jobs
        .par_iter()
        .map(|&(k, e1, e2, w)| {
            let mut terms = vec![(e1, h1.clone())];
            if order == 2 {
                terms.push((e2, h2.clone()));
            }
            let c = curve.displaced(terms, frame);
            let u = *parallel_transport(conn, &c, opts)?.holonomy();
            Ok((k, u * re(w)))
        })
        .collect();
    let mut raw = vec![GaugeMatrix::<N>::zeros(); schedule.steps.len()];
    for (k, v) in values? {
        raw[k] += v;
    }
    for (k, &e) in schedule.steps.iter().enumerate() {
        raw[k] /= re(if order == 1 { e } else { e * e });
    }
    let value = richardson(&schedule.steps, &raw);
    let residual = (value - raw[raw.len() - 1]).norm();
    let warning = (residual > schedule.tolerance).then(|| {
        format!(
            "Richardson residual {residual:.3e} exceeds tolerance {:.3e}",
            schedule.tolerance
        )
    });
    Ok(FdEstimate {
        value,
        raw,
        residual,
        warning,
    })
}

/// Flat list of matrices integrated together by RK4.
#[derive(Debug, Clone)]
struct Stack<const N: usize>(Vec<GaugeMatrix<N>>);

impl<const N: usize> OdeState for Stack<N> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, dy) in self.0.iter_mut().zip(&x.0) {
            *y += dy * re(a);
        }
    }
}

/// Volterra products on a flat chart for a family of directions `h_a`:
/// returns `U_{1,0}` and `P[a][b] = ∫₀¹ V_a(s) ∫₀ˢ V_b(r) dr ds` with
/// `V_h = U_{t,0}† F⟨h, γ̇⟩ U_{t,0}`, all co-integrated with the transport.
pub fn volterra_products<const N: usize>(
    conn: &dyn Connection<N>,
    curve: &Curve,
    directions: &[DirectionField],
    opts: &TransportOptions,
) -> Result<(GaugeMatrix<N>, Vec<Vec<GaugeMatrix<N>>>)> {
    opts.validate()?;
    let k = directions.len();
    let grid = crate::ode::Grid::new(&curve.breakpoints(), opts.steps);
    let nodes = grid.nodes().to_vec();
    let rhs = |t: f64, side: Side, s: &Stack<N>| -> Result<Stack<N>> {
        let x = curve.position(t);
        let v = curve.velocity_at(t, side);
        let a = conn.potential(&x);
        let gen = (0..4).fold(GaugeMatrix::<N>::zeros(), |acc, mu| acc + a[mu] * re(v[mu]));
        let u = s.0[0];
        let ud = u.adjoint();
        let f = curvature(conn, &x);
        let va: Vec<GaugeMatrix<N>> = directions
            .iter()
            .map(|h| ud * f.contract(&arr(&h.value(t)), &arr(&v)) * u)
            .collect();
        let mut out = Vec::with_capacity(1 + k + k * k);
        out.push(-(gen * u));
        out.extend(va.iter().copied());
        for i in 0..k {
            for j in 0..k {
                out.push(va[i] * s.0[1 + j]);
            }
        }
        Ok(Stack(out))
    };
    let mut state = Stack(vec![GaugeMatrix::<N>::zeros(); 1 + k + k * k]);
    state.0[0] = GaugeMatrix::identity();
    for (i, w) in nodes.windows(2).enumerate() {
        state = rk4_step(w[0], w[1] - w[0], &state, &rhs)?;
        if (i + 1) % opts.reproject_every == 0 {
            state.0[0] = crate::algebra::reunitarize(&state.0[0]);
        }
    }
    let p = (0..k)
        .map(|i| (0..k).map(|j| state.0[1 + k + i * k + j]).collect())
        .collect();
    Ok((state.0[0], p))
}

/// The flat-chart second derivative
/// `⟨D²U h₁, h₂⟩ = U_{1,0}[P(h₂,h₁) + P(h₁,h₂)]
///   − ∫₀¹ U_{1,t}[(∇_{h₂}F)⟨h₁,γ̇⟩ + F⟨h₁,ḣ₂⟩]U_{t,0} dt`.
pub fn second_derivative<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    h1: &DirectionField,
    h2: &DirectionField,
    opts: &TransportOptions,
) -> Result<GaugeMatrix<N>> {
    if !chart.is_flat() {
        return Err(Error::NotFlat {
            chart: chart.name(),
        });
    }
    let (u, p) = volterra_products(conn, curve, &[h1.clone(), h2.clone()], opts)?;
    let volterra = u * (p[1][0] + p[0][1]);
    let local = solve_augmented(conn, chart, curve, opts, 1, |pp: &PathPoint| {
        let s = FieldSample::at(conn, chart, &pp.x)?;
        let a = arr(&h1.value(pp.t));
        let b = h2.value(pp.t);
        let mut nabla = GaugeMatrix::<N>::zeros();
        for l in 0..4 {
            if b[l] != 0.0 {
                nabla += s.nabla_f[l].contract(&a, &arr(&pp.velocity)) * re(b[l]);
            }
        }
        Ok(vec![nabla + s.f.contract(&a, &arr(&h2.derivative(pp.t)))])
    })?;
    Ok(volterra - local.sandwiched(0))
}

/// Discrepancy between `U_{1,0}(γ∘σ)` and `U_{1,0}(γ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReparamReport {
    pub discrepancy: f64,
    pub steps: usize,
}

pub fn reparametrize_check<const N: usize>(
    conn: &dyn Connection<N>,
    curve: &Curve,
    warp: Warp,
    opts: &TransportOptions,
) -> Result<ReparamReport> {
    let base = parallel_transport(conn, curve, opts)?;
    let warped = parallel_transport(conn, &curve.reparametrize(warp)?, opts)?;
    Ok(ReparamReport {
        discrepancy: (base.holonomy() - warped.holonomy()).norm(),
        steps: opts.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::So4Element;
    use crate::gauge::{AbelianConstant, Bpst, Orientation, ZeroField};
    use crate::geometry::{FlatChart, Point, Profile, S4Stereographic};
    use nalgebra::Vector4;

    fn circle() -> Curve {
        Curve::circle(
            Point::new(0.1, 0.0, 0.2, 0.0),
            0.9,
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, 0.6, 0.0, 0.8),
        )
        .unwrap()
    }

    fn instanton() -> Bpst {
        Bpst::new(1.0, Point::zeros(), Orientation::Antidual).unwrap()
    }

    #[test]
    fn zero_direction_and_zero_field() {
        let h = DirectionField::unit(0, Profile::Sine { k: 1 });
        let opts = TransportOptions::default().with_steps(200);
        let d = first_derivative::<2>(&ZeroField, &FlatChart, &circle(), &h, &opts).unwrap();
        assert_eq!(d, GaugeMatrix::<2>::zeros());
        let z = DirectionField::zero();
        let d = first_derivative(&instanton(), &FlatChart, &circle(), &z, &opts).unwrap();
        assert_eq!(d, GaugeMatrix::<2>::zeros());
    }

    #[test]
    fn first_derivative_matches_fd() {
        let b = instanton();
        let h = DirectionField::unit(0, Profile::Sine { k: 1 });
        let opts = TransportOptions::default();
        let an = first_derivative(&b, &FlatChart, &circle(), &h, &opts).unwrap();
        let fd = fd_directional_derivative(
            &b, &FlatChart, &circle(), &h, None, 1, &FdSchedule::first_order_default(), &opts,
        )
        .unwrap();
        assert!((an - fd.value).norm() < 1e-5 * an.norm().max(1.0), "{an} vs {}", fd.value);
    }

    #[test]
    fn abelian_first_derivative_matches_closed_form() {
        // U = exp(−i∫γ̇ᵀcγ dt H); for γ + εh the exponent changes at first
        // order by −i∫(ḣᵀcγ + γ̇ᵀch) dt = −2i∫γ̇ᵀch dt (h vanishes at the ends).
        let c = So4Element::from_coefficients([0.5, 0.1, 0.0], [0.0, -0.3, 0.2]);
        let f = AbelianConstant::new(c.clone());
        let line = Curve::line(Point::new(0.2, 0.1, 0.0, -0.3), Vector4::new(0.5, -0.4, 0.3, 0.7));
        let h = DirectionField::new(vec![(Vector4::new(0.3, 1.0, -0.5, 0.2), Profile::Sine { k: 2 })]);
        let opts = TransportOptions::default();
        let u = *parallel_transport::<2>(&f, &line, &opts).unwrap().holonomy();
        let mut s = 0.0;
        let n = 4000;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 } / n as f64;
            s += w * (line.velocity(t).transpose() * c.matrix() * h.value(t))[(0, 0)];
        }
        let h_cartan = crate::algebra::cartan_direction::<2>();
        let expect = h_cartan * crate::algebra::im(-2.0 * s) * u;
        let an = first_derivative::<2>(&f, &FlatChart, &line, &h, &opts).unwrap();
        assert!((an - expect).norm() < 1e-7);
        let fd = fd_directional_derivative::<2>(
            &f, &FlatChart, &line, &h, None, 1, &FdSchedule::first_order_default(), &opts,
        )
        .unwrap();
        assert!((fd.value - expect).norm() < 1e-7);
    }

    #[test]
    fn second_derivative_matches_fd_and_is_symmetric() {
        let b = instanton();
        let h1 = DirectionField::unit(0, Profile::Sine { k: 1 });
        let h2 = DirectionField::new(vec![(Vector4::new(0.0, 1.0, 0.5, 0.0), Profile::Bubble { j: 1 })]);
        let opts = TransportOptions::default().with_steps(600);
        let an12 = second_derivative(&b, &FlatChart, &circle(), &h1, &h2, &opts).unwrap();
        let an21 = second_derivative(&b, &FlatChart, &circle(), &h2, &h1, &opts).unwrap();
        assert!((an12 - an21).norm() < 1e-8 * an12.norm().max(1.0));
        let fd = fd_directional_derivative(
            &b, &FlatChart, &circle(), &h1, Some(&h2), 2, &FdSchedule::second_order_default(), &opts,
        )
        .unwrap();
        assert!((an12 - fd.value).norm() < 1e-5 * an12.norm().max(1.0), "{an12} vs {}", fd.value);
    }

    #[test]
    fn fd_requires_flat_chart() {
        let h = DirectionField::unit(0, Profile::Sine { k: 1 });
        let err = fd_directional_derivative(
            &instanton(), &S4Stereographic, &circle(), &h, None, 1,
            &FdSchedule::first_order_default(), &TransportOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotFlat { .. }));
    }

    #[test]
    fn reparametrization_invariance() {
        let b = instanton();
        let opts = TransportOptions::default();
        let r = reparametrize_check(&b, &circle(), Warp::Identity, &opts).unwrap();
        assert_eq!(r.discrepancy, 0.0);
        let r = reparametrize_check(&b, &circle(), Warp::Power { p: 2.0 }, &opts).unwrap();
        assert!(r.discrepancy < 1e-8);
        let r = reparametrize_check(
            &b, &circle(), Warp::PiecewiseLinear { knots: vec![(0.0, 0.0), (0.5, 0.3), (1.0, 1.0)] }, &opts,
        )
        .unwrap();
        assert!(r.discrepancy < 1e-8);
    }
}
