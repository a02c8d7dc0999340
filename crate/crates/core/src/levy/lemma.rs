//! Diagnostics behind the vanishing lemmas: the function
//! `J(r) = U_{1,r}(γ)·Δ^W_L U_{1,0}(γ^r)` on truncated curves, and recovery of
//! `tr(a·F(γ(r)))` from Laplacians on squeezed curves `γ_{r,ε}`.

use serde::{Deserialize, Serialize};

use super::laplacian::{complex_rows, laplacian_closed_form};
use crate::algebra::{re, so4_pairing, GaugeMatrix, RotationPath, So4Element};
use crate::constants::YANG_MILLS_TERM_SIGN;
use crate::error::{Error, Result};
use crate::gauge::{curvature, Connection, FieldSample};
use crate::geometry::{Curve, MetricChart};
use crate::ode::Side;
use crate::transport::{transport_with_frame, TransportOptions};

/// Settings for [`diagnostic_j`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JOptions {
    /// Parameters `r ∈ (0, 1]` at which `J` is tabulated.
    pub r_grid: Vec<f64>,
    /// Base step of the one-sided difference for `J′(1)`.
    pub step: f64,
}

impl Default for JOptions {
    fn default() -> Self {
        Self {
            r_grid: (1..=10).map(|i| i as f64 / 10.0).collect(),
            step: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JReport {
    pub r: Vec<f64>,
    pub j_norms: Vec<f64>,
    /// `max_r ‖J(r)‖ / scale`.
    pub max_rel_j: f64,
    /// `L(γ)·max_t‖F(γ(t))‖`.
    pub scale: f64,
    /// Finite-difference `J′(1)` (one-sided, with one Richardson level).
    pub j_prime_1: Vec<Vec<[f64; 2]>>,
    /// `s·(D*F)(γ(1))γ̇(1)U_{1,0}(γ)` with `s` the Yang–Mills term sign.
    pub expected: Vec<Vec<[f64; 2]>>,
    /// `‖J′(1) − expected‖`.
    pub defect: f64,
    /// `defect / ‖(D*F)(γ(1))γ̇(1)‖`, or `defect / scale` when that norm is
    /// below `1e-8·scale` (Yang–Mills fields, where the expected value vanishes).
    pub rel_defect: f64,
}

/// `J(r) = U_{1,0}(γ) U_{1,0}(γ^r)⁻¹ Δ^W_L U_{1,0}(γ^r)`, using
/// `U_{r,0}(γ) = U_{1,0}(γ^r)`.
fn j_value<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    w: &RotationPath,
    opts: &TransportOptions,
    u10: &GaugeMatrix<N>,
    r: f64,
) -> Result<GaugeMatrix<N>> {
    let rep = laplacian_closed_form(conn, chart, &curve.truncate(r)?, w, opts)?;
    Ok(u10 * rep.holonomy.adjoint() * rep.value)
}

/// Tabulates `J` and checks `J′(1) = s·(D*F)(γ(1))γ̇(1)U_{1,0}(γ)`.
pub fn diagnostic_j<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    w: &RotationPath,
    jopts: &JOptions,
    opts: &TransportOptions,
) -> Result<JReport> {
    if jopts.r_grid.iter().any(|&r| !(r > 0.0 && r <= 1.0)) || !(jopts.step > 0.0 && jopts.step < 0.25) {
        return Err(Error::InvalidArgument(
            "J needs r in (0, 1] and a step in (0, 0.25)".into(),
        ));
    }
    let full = laplacian_closed_form(conn, chart, curve, w, opts)?;
    let u10 = full.holonomy;
    let scale = full.scale;
    let j_norms = jopts
        .r_grid
        .iter()
        .map(|&r| Ok(j_value(conn, chart, curve, w, opts, &u10, r)?.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let max_rel_j = j_norms.iter().fold(0.0f64, |m, &j| m.max(j)) / if scale > 0.0 { scale } else { 1.0 };

    // J(1) = Δ(γ); second-order one-sided differences at δ and δ/2.
    let j1 = full.value;
    let one_sided = |d: f64| -> Result<GaugeMatrix<N>> {
        let a = j_value(conn, chart, curve, w, opts, &u10, 1.0 - d)?;
        let b = j_value(conn, chart, curve, w, opts, &u10, 1.0 - 2.0 * d)?;
        Ok((j1 * re(3.0) - a * re(4.0) + b) * re(0.5 / d))
    };
    let coarse = one_sided(jopts.step)?;
    let fine = one_sided(0.5 * jopts.step)?;
    let j_prime = (fine * re(4.0) - coarse) * re(1.0 / 3.0);

    let x1 = curve.position(1.0);
    let v1 = curve.velocity_at(1.0, Side::Left);
    let res = FieldSample::at(conn, chart, &x1)?.ym_residual();
    let ym = (0..4).fold(GaugeMatrix::<N>::zeros(), |acc, nu| acc + res[nu] * re(v1[nu]));
    let expected = ym * u10 * re(YANG_MILLS_TERM_SIGN);
    let defect = (j_prime - expected).norm();
    let denom = if ym.norm() > 1e-8 * scale { ym.norm() } else { scale };
    Ok(JReport {
        r: jopts.r_grid.clone(),
        j_norms,
        max_rel_j,
        scale,
        j_prime_1: complex_rows(&j_prime),
        expected: complex_rows(&expected),
        defect,
        rel_defect: if denom > 0.0 { defect / denom } else { defect },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport<const N: usize> {
    pub r: f64,
    pub eps: Vec<f64>,
    /// `‖recovered(ε) − limit‖` per ε.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log ε`; absent when the
    /// errors are at round-off level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// `‖extrapolated − limit‖`.
    pub extrapolation_error: f64,
    #[serde(skip)]
    pub recovered: Vec<GaugeMatrix<N>>,
    /// Linear extrapolation to `ε = 0` from the last two samples.
    #[serde(skip)]
    pub extrapolated: GaugeMatrix<N>,
    /// `V⁻¹ T V` with `T = tr(a·F(γ(r)))` in the transported frame and
    /// `V = U_{r,0}(γ)`.
    #[serde(skip)]
    pub limit: GaugeMatrix<N>,
    /// `T` itself.
    #[serde(skip)]
    pub direct: GaugeMatrix<N>,
}

/// Recovers `tr(a·F(γ(r)))` from `recovered(ε) = −U_{r,0}(γ)⁻¹ Δ^{W_a}_L U_{1,0}(γ_{r,ε})`,
/// `W_a(t) = exp(ta)`, as `ε → 0`. For Yang–Mills fields the error is `O(ε)`;
/// otherwise the Yang–Mills term over `[0, r]` survives the limit.
pub fn pointwise_trace_recovery<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    a: &So4Element,
    r: f64,
    eps: &[f64],
    opts: &TransportOptions,
) -> Result<RecoveryReport<N>> {
    if eps.len() < 2 || eps.windows(2).any(|w| w[1] >= w[0]) || eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::InvalidArgument(
            "ε schedule needs at least two strictly decreasing values in (0, 1]".into(),
        ));
    }
    let head = transport_with_frame(conn, chart, &curve.truncate(r)?, opts)?;
    let v = *head.holonomy();
    let z = head.frames().last().expect("non-empty grid");
    let direct = so4_pairing(a, &curvature(conn, &curve.position(r)).in_frame(z));
    let limit = v.adjoint() * direct * v;
    let w = RotationPath::new(*a);
    let recovered = eps
        .iter()
        .map(|&e| {
            let rep = laplacian_closed_form(conn, chart, &curve.squeeze(r, e)?, &w, opts)?;
            Ok(-(v.adjoint() * rep.value))
        })
        .collect::<Result<Vec<GaugeMatrix<N>>>>()?;
    let errors: Vec<f64> = recovered.iter().map(|x| (x - limit).norm()).collect();
    let n = eps.len();
    let (e1, e2) = (eps[n - 2], eps[n - 1]);
    let extrapolated = (recovered[n - 1] * re(e1) - recovered[n - 2] * re(e2)) * re(1.0 / (e1 - e2));
    let floor = 1e-12 * limit.norm().max(1.0);
    let exponent = if errors.iter().all(|&x| x > floor) {
        let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / n as f64, ly.iter().sum::<f64>() / n as f64);
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(RecoveryReport {
        r,
        eps: eps.to_vec(),
        errors,
        exponent,
        extrapolation_error: (extrapolated - limit).norm(),
        recovered,
        extrapolated,
        limit,
        direct,
    })
}
