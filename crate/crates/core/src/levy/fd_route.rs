//! Finite-difference oracle for the Laplacian (flat charts).
//!
//! Second derivatives `⟨D²U h₁, h₂⟩` are measured by mixed central
//! differences for `h = p·e_α` over a profile family. After removing the
//! Volterra part, the remainder has the local form
//!
//! ```text
//! S(p e_α, q e_β) = ∫ K^L_{αβ} p q dt + ½ ∫ K^S_{αβ} (ṗ q − p q̇) dt,
//! ```
//!
//! from which `K^L` and `K^S` are fitted as shifted-Legendre expansions by
//! least squares and then traced exactly like the analytic kernels.
//!
//! Every admissible direction vanishes at both endpoints, so the kernels
//! there are extrapolated by the expansion; pointwise kernel residuals are
//! therefore much larger than the error of the integrated trace.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernels::{kernels_from_transport, KernelPair, KernelPiece};
use super::laplacian::{curve_scale, LaplacianReport, QuadratureInfo, Route};
use super::trace::modified_levy_trace;
use crate::algebra::{re, GaugeMatrix, RotationPath, SymmetricBlock, TwoFormBlock};
use crate::constants::FIT_CONDITION_LIMIT;
use crate::error::{Error, Result};
use crate::gauge::Connection;
use crate::geometry::{Curve, DirectionField, MetricChart, Profile};
use crate::quadrature::{gauss_legendre, shifted_legendre};
use crate::transport::{fd_directional_derivative, transport_with_frame, volterra_products, FdSchedule, TransportOptions};
use num_complex::Complex64;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdRouteOptions {
    /// Sine profiles `sin(kπt)`, `k = 1..=n_max`.
    pub n_max: u32,
    /// Polynomial profiles `t(1−t)t^j`, `j < n_bubble`.
    pub n_bubble: u32,
    /// Degree of the shifted-Legendre kernel expansion.
    pub degree: usize,
    pub schedule: FdSchedule,
}

impl Default for FdRouteOptions {
    fn default() -> Self {
        Self {
            n_max: 6,
            n_bubble: 6,
            degree: 14,
            schedule: FdSchedule::second_order_default(),
        }
    }
}

/// The FD-route Laplacian with fit diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct FdRouteReport<const N: usize> {
    pub report: LaplacianReport<N>,
    /// `max_t ‖K_fit − K_analytic‖ / max_t ‖K_analytic‖` for the Levy and
    /// singular kernels (absolute when the analytic kernel vanishes).
    pub levy_residual: f64,
    pub singular_residual: f64,
    /// Largest design-matrix condition number over the fitted blocks.
    pub condition: f64,
    /// Largest Richardson residual among the finite differences.
    pub noise_floor: f64,
    pub warnings: Vec<String>,
}

/// Moments `∫P_k p q`, `½∫P_k(ṗq − pq̇)` by composite Gauss–Legendre.
struct Moments {
    sym: Vec<Vec<Vec<f64>>>,
    anti: Vec<Vec<Vec<f64>>>,
}

fn moments(profiles: &[Profile], degree: usize) -> Moments {
    let nodes: Vec<(f64, f64)> = (0..32)
        .flat_map(|i| gauss_legendre(12, i as f64 / 32.0, (i + 1) as f64 / 32.0))
        .collect();
    let n = profiles.len();
    let mut sym = vec![vec![vec![0.0; degree + 1]; n]; n];
    let mut anti = vec![vec![vec![0.0; degree + 1]; n]; n];
    for &(t, w) in &nodes {
        let v: Vec<f64> = profiles.iter().map(|p| p.value(t)).collect();
        let d: Vec<f64> = profiles.iter().map(|p| p.derivative(t)).collect();
        let legendre: Vec<f64> = (0..=degree).map(|k| shifted_legendre(k, t)).collect();
        for i in 0..n {
            for j in 0..n {
                for k in 0..=degree {
                    sym[i][j][k] += w * legendre[k] * v[i] * v[j];
                    anti[i][j][k] += w * legendre[k] * 0.5 * (d[i] * v[j] - v[i] * d[j]);
                }
            }
        }
    }
    Moments { sym, anti }
}

/// Least-squares solve of `design · X = rhs` through the SVD; errors when
/// the condition number exceeds the limit.
fn solve_fit(mut design: DMatrix<f64>, mut rhs: DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    // Row equilibration: every datum gets unit weight relative to its moments.
    for r in 0..design.nrows() {
        let n = design.row(r).norm();
        if n > 0.0 {
            design.row_mut(r).unscale_mut(n);
            rhs.row_mut(r).unscale_mut(n);
        }
    }
    let svd = design.svd(true, true);
    let s = &svd.singular_values;
    let (max, min) = (s.max(), s.min());
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= FIT_CONDITION_LIMIT) {
        return Err(Error::IllConditionedFit {
            condition,
            limit: FIT_CONDITION_LIMIT,
        });
    }
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidArgument(format!("kernel fit failed: {e}")))?;
    Ok((x, condition))
}

fn to_columns<const N: usize>(m: &GaugeMatrix<N>) -> Vec<f64> {
    m.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn from_columns<const N: usize>(x: &DMatrix<f64>, row: usize) -> GaugeMatrix<N> {
    GaugeMatrix::<N>::from_iterator((0..N * N).map(|k| Complex64::new(x[(row, 2 * k)], x[(row, 2 * k + 1)])))
}

/// Laplacian from finite-difference second derivatives (flat charts only).
pub fn laplacian_fd_route<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    w: &RotationPath,
    fd: &FdRouteOptions,
    opts: &TransportOptions,
) -> Result<FdRouteReport<N>> {
    if !chart.is_flat() {
        return Err(Error::NotFlat {
            chart: chart.name(),
        });
    }
    let profiles = Profile::family(fd.n_max, fd.n_bubble);
    let np = profiles.len();
    if np == 0 {
        return Err(Error::InvalidArgument("the FD route needs at least one profile".into()));
    }
    let dir = |alpha: usize, i: usize| DirectionField::unit(alpha, profiles[i]);
    let index = |alpha: usize, i: usize| alpha * np + i;
    let directions: Vec<DirectionField> = (0..4)
        .flat_map(|a| (0..np).map(move |i| (a, i)))
        .map(|(a, i)| dir(a, i))
        .collect();

    // All unordered pairs of directions (the mixed difference is symmetric).
    let pairs: Vec<(usize, usize)> = (0..directions.len())
        .flat_map(|a| (a..directions.len()).map(move |b| (a, b)))
        .collect();
    let fd_values: Result<Vec<(GaugeMatrix<N>, f64)>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let e = fd_directional_derivative(
                conn,
                chart,
                curve,
                &directions[a],
                Some(&directions[b]),
                2,
                &fd.schedule,
                opts,
            )?;
            Ok((e.value, e.residual))
        })
        .collect();
    let fd_values = fd_values?;
    let nd = directions.len();
    let mut second = vec![vec![GaugeMatrix::<N>::zeros(); nd]; nd];
    let mut noise_floor: f64 = 0.0;
    for (&(a, b), &(v, r)) in pairs.iter().zip(&fd_values) {
        second[a][b] = v;
        second[b][a] = v;
        noise_floor = noise_floor.max(r);
    }

    // Remove the Volterra part U_{1,0}[P(h₂,h₁) + P(h₁,h₂)].
    let (u, p) = volterra_products(conn, curve, &directions, opts)?;
    for a in 0..nd {
        for b in 0..nd {
            second[a][b] -= u * (p[b][a] + p[a][b]);
        }
    }

    let m = moments(&profiles, fd.degree);
    let nc = fd.degree + 1;
    let cols = 2 * N * N;
    let mut levy_coef = vec![vec![DMatrix::<f64>::zeros(nc, cols); 4]; 4];
    let mut sing_coef = vec![vec![DMatrix::<f64>::zeros(nc, cols); 4]; 4];
    let mut condition: f64 = 0.0;
    for alpha in 0..4 {
        for beta in alpha..4 {
            if alpha == beta {
                let rows: Vec<(usize, usize)> = (0..np).flat_map(|i| (i..np).map(move |j| (i, j))).collect();
                let design = DMatrix::from_fn(rows.len(), nc, |r, k| m.sym[rows[r].0][rows[r].1][k]);
                let rhs = DMatrix::from_fn(rows.len(), cols, |r, c| {
                    to_columns(&second[index(alpha, rows[r].0)][index(alpha, rows[r].1)])[c]
                });
                let (x, cond) = solve_fit(design, rhs)?;
                condition = condition.max(cond);
                levy_coef[alpha][alpha] = x;
            } else {
                let rows: Vec<(usize, usize)> = (0..np).flat_map(|i| (0..np).map(move |j| (i, j))).collect();
                let design = DMatrix::from_fn(rows.len(), 2 * nc, |r, k| {
                    let (i, j) = rows[r];
                    if k < nc {
                        m.sym[i][j][k]
                    } else {
                        m.anti[i][j][k - nc]
                    }
                });
                let rhs = DMatrix::from_fn(rows.len(), cols, |r, c| {
                    to_columns(&second[index(alpha, rows[r].0)][index(beta, rows[r].1)])[c]
                });
                let (x, cond) = solve_fit(design, rhs)?;
                condition = condition.max(cond);
                levy_coef[alpha][beta] = x.rows(0, nc).into_owned();
                levy_coef[beta][alpha] = levy_coef[alpha][beta].clone();
                sing_coef[alpha][beta] = x.rows(nc, nc).into_owned();
                sing_coef[beta][alpha] = -sing_coef[alpha][beta].clone();
            }
        }
    }

    // Evaluate the fitted kernels on the analytic kernels' grid.
    let tr = transport_with_frame(conn, chart, curve, opts)?;
    let analytic = kernels_from_transport(conn, chart, curve, &tr)?;
    let eval = |coef: &DMatrix<f64>, t: f64| -> GaugeMatrix<N> {
        (0..nc).fold(GaugeMatrix::<N>::zeros(), |acc, k| acc + from_columns::<N>(coef, k) * re(shifted_legendre(k, t)))
    };
    let pieces: Vec<KernelPiece<N>> = analytic
        .pieces()
        .iter()
        .map(|piece| {
            let levy = piece
                .t
                .iter()
                .map(|&t| {
                    let raw: [[GaugeMatrix<N>; 4]; 4] =
                        std::array::from_fn(|a| std::array::from_fn(|b| eval(&levy_coef[a][b], t)));
                    SymmetricBlock::symmetrize(&raw)
                })
                .collect();
            let singular = piece
                .t
                .iter()
                .map(|&t| {
                    let raw: [[GaugeMatrix<N>; 4]; 4] =
                        std::array::from_fn(|a| std::array::from_fn(|b| eval(&sing_coef[a][b], t)));
                    TwoFormBlock::antisymmetrize(&raw)
                })
                .collect();
            KernelPiece {
                t: piece.t.clone(),
                levy,
                singular,
            }
        })
        .collect();
    let fitted = KernelPair::new(pieces, analytic.steps(), analytic.scheme());

    let (mut dl, mut ds) = (0.0f64, 0.0f64);
    for (pf, pa) in fitted.pieces().iter().zip(analytic.pieces()) {
        for i in 0..pf.t.len() {
            dl = dl.max(pf.levy[i].sub(&pa.levy[i]).norm());
            ds = ds.max(pf.singular[i].sub(&pa.singular[i]).norm());
        }
    }
    let (ml, ms) = analytic.max_norms();
    let rel = |d: f64, m: f64| if m > 0.0 { d / m } else { d };

    let mt = modified_levy_trace(&fitted, w);
    let scale = curve_scale(conn, chart, curve, &tr);
    let report = LaplacianReport::assemble(
        Route::FdOracle,
        [mt.levy, mt.left_pairing, mt.right_pairing],
        1.0,
        scale,
        QuadratureInfo {
            n: tr.grid().steps(),
            scheme: opts.scheme,
        },
        *tr.holonomy(),
    );
    let mut warnings = Vec::new();
    if noise_floor > fd.schedule.tolerance {
        warnings.push(format!(
            "largest Richardson residual {noise_floor:.3e} exceeds {:.3e}",
            fd.schedule.tolerance
        ));
    }
    Ok(FdRouteReport {
        report,
        levy_residual: rel(dl, ml),
        singular_residual: rel(ds, ms),
        condition,
        noise_floor,
        warnings,
    })
}
