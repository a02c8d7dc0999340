//! The five experiments. Each returns an [`Outcome`]; row order follows the
//! sorted curve and rotation names, so reports are deterministic.

use std::sync::Arc;

use anyhow::{Context, Result};
use holonomy_core::builtins::RotationSpec;
use holonomy_core::constants::YANG_MILLS_TERM_SIGN;
use holonomy_core::gauge::{bianchi_defect, one_form_norm, sd_split_with, FieldSample};
use holonomy_core::geometry::Point;
use holonomy_core::levy::{
    diagnostic_j, laplacian_closed_form, laplacian_closed_form_with_sign, laplacian_fd_route,
    laplacian_kernel_route, pointwise_trace_recovery, JOptions,
};
use holonomy_core::{Curve, DynConnection, LaplacianReport, MetricChart};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Expectation, ExperimentConfig};
use crate::report::{Check, CsvRow, Outcome};

pub const NAMES: &[&str] = holonomy_core::builtins::EXPERIMENTS;

struct Setup {
    chart: Arc<dyn MetricChart>,
    field: DynConnection<2>,
    curves: Vec<(String, Curve)>,
    rotations: Vec<(String, RotationSpec)>,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let curves = cfg
            .curves
            .iter()
            .map(|(n, c)| Ok((n.clone(), c.build().with_context(|| format!("curve `{n}`"))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            chart: cfg.chart.build()?,
            field: cfg.field.build()?,
            curves,
            rotations: cfg.rotations.iter().map(|(n, r)| (n.clone(), *r)).collect(),
        })
    }

    fn pairs(&self) -> Vec<(&str, &Curve, &str, &RotationSpec)> {
        self.curves
            .iter()
            .flat_map(|(cn, c)| self.rotations.iter().map(move |(wn, w)| (cn.as_str(), c, wn.as_str(), w)))
            .collect()
    }
}

fn laplacian_row<const N: usize>(curve: &str, w: &str, r: &LaplacianReport<N>) -> Value {
    let mut row = serde_json::to_value(r).expect("reports serialize");
    row["curve"] = json!(curve);
    row["W"] = json!(w);
    row["rel_norm"] = json!(r.rel_norm());
    row
}

pub fn run(name: &str, cfg: &ExperimentConfig) -> Result<Outcome> {
    let setup = Setup::new(cfg)?;
    match name {
        "selfdual-report" => selfdual_report(cfg, &setup),
        "laplacian" => laplacian(cfg, &setup),
        "oracle-check" => oracle_check(cfg, &setup),
        "scan" => scan(cfg, &setup),
        "lemma-diagnostics" => lemma_diagnostics(cfg, &setup),
        other => Err(holonomy_core::Error::UnknownName {
            kind: "experiment",
            name: other.into(),
            valid: NAMES.join(", "),
        }
        .into()),
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

fn selfdual_report(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let o = &cfg.selfdual;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Point> = (0..o.n_points)
        .map(|_| Point::from_fn(|_, _| rng.gen_range(-o.radius..=o.radius)))
        .collect();
    let samples = points
        .par_iter()
        .map(|x| FieldSample::at(s.field.as_ref(), s.chart.as_ref(), x))
        .collect::<holonomy_core::Result<Vec<_>>>()?;
    let max_f = samples.iter().map(|p| p.f.norm()).fold(0.0, f64::max);
    let mut out = Outcome::default();
    let (mut fp, mut fm, mut ym, mut bi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (x, p) in points.iter().zip(&samples) {
        let (plus, minus) = sd_split_with(&p.md, &p.f);
        let f = p.f.norm();
        let row = json!({
            "point": [x[0], x[1], x[2], x[3]],
            "norm_F": f,
            "rel_Fplus": ratio(plus.norm(), f),
            "rel_Fminus": ratio(minus.norm(), f),
            "ym_residual_rel": ratio(one_form_norm(&p.ym_residual()), max_f),
            "bianchi_rel": ratio(bianchi_defect(&p.nabla_f), max_f),
        });
        fp = fp.max(ratio(plus.norm(), f));
        fm = fm.max(ratio(minus.norm(), f));
        ym = ym.max(ratio(one_form_norm(&p.ym_residual()), max_f));
        bi = bi.max(ratio(bianchi_defect(&p.nabla_f), max_f));
        out.rows.push(row);
    }
    for (k, v) in [
        ("max_rel_Fplus", fp),
        ("max_rel_Fminus", fm),
        ("max_ym_residual_rel", ym),
        ("max_bianchi_rel", bi),
        ("max_norm_F", max_f),
    ] {
        out.summary.insert(k.into(), json!(v));
    }
    match o.expect {
        Expectation::AntiSelfDual => out.checks.push(Check::at_most("max_rel_Fplus", fp, cfg.tolerances.self_dual)),
        Expectation::SelfDual => out.checks.push(Check::at_most("max_rel_Fminus", fm, cfg.tolerances.self_dual)),
        Expectation::None => {}
    }
    if o.check_ym {
        out.checks.push(Check::at_most("max_ym_residual_rel", ym, cfg.tolerances.ym_residual));
    }
    Ok(out)
}

fn laplacian(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let routes = &cfg.laplacian.routes;
    let jobs: Vec<_> = s
        .pairs()
        .into_iter()
        .flat_map(|p| routes.iter().map(move |r| (p, r.as_str())))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&((_, curve, _, w), route)| {
            let (f, c, w) = (s.field.as_ref(), s.chart.as_ref(), w.build());
            Ok(match route {
                "closed_form" => laplacian_closed_form(f, c, curve, &w, &cfg.transport)?,
                "kernel" => laplacian_kernel_route(f, c, curve, &w, &cfg.transport)?,
                _ => laplacian_fd_route(f, c, curve, &w, &cfg.laplacian.fd, &cfg.transport)?.report,
            })
        })
        .collect::<holonomy_core::Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for (&((cn, _, wn, _), _), r) in jobs.iter().zip(&reports) {
        out.rows.push(laplacian_row(cn, wn, r));
        out.csv.push(CsvRow::from_report(cn, wn, r));
        worst = worst.max(r.rel_norm());
        if cfg.laplacian.expect_vanishing {
            out.checks.push(Check::at_most(format!("rel_norm[{cn}/{wn}/{}]", r.route.as_str()), r.rel_norm(), cfg.tolerances.vanishing));
        }
    }
    out.summary.insert("max_rel_norm".into(), json!(worst));
    out.summary.insert("max_norm".into(), json!(reports.iter().map(|r| r.norm).fold(0.0, f64::max)));
    Ok(out)
}

fn oracle_check(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let sign = if cfg.oracle.inject_sign_flip {
        -YANG_MILLS_TERM_SIGN
    } else {
        YANG_MILLS_TERM_SIGN
    };
    let use_fd = cfg.oracle.fd && s.chart.is_flat();
    let pairs = s.pairs();
    let results = pairs
        .par_iter()
        .map(|&(_, curve, _, w)| {
            let (f, c, w) = (s.field.as_ref(), s.chart.as_ref(), w.build());
            let closed = laplacian_closed_form_with_sign(f, c, curve, &w, &cfg.transport, sign)?;
            let kernel = laplacian_kernel_route(f, c, curve, &w, &cfg.transport)?;
            let fd = if use_fd {
                Some(laplacian_fd_route(f, c, curve, &w, &cfg.oracle.fd_options, &cfg.transport)?)
            } else {
                None
            };
            Ok((closed, kernel, fd))
        })
        .collect::<holonomy_core::Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    let (mut worst_route, mut worst_fd) = (0.0f64, 0.0f64);
    for (&(cn, _, wn, _), (closed, kernel, fd)) in pairs.iter().zip(&results) {
        let d = (closed.value - kernel.value).norm() / closed.norm.max(1.0);
        let flagged = d > cfg.tolerances.route;
        worst_route = worst_route.max(d);
        out.rows.push(laplacian_row(cn, wn, closed));
        let mut row = laplacian_row(cn, wn, kernel);
        row["discrepancy"] = json!(d);
        row["flagged"] = json!(flagged);
        out.rows.push(row);
        out.csv.push(CsvRow::from_report(cn, wn, closed));
        out.csv.push(CsvRow::from_report(cn, wn, kernel));
        out.checks.push(Check::at_most(format!("route_discrepancy[{cn}/{wn}]"), d, cfg.tolerances.route));
        if let Some(fd) = fd {
            let diff = (closed.value - fd.report.value).norm();
            let d = if closed.norm > 0.0 { diff / closed.norm } else { diff };
            worst_fd = worst_fd.max(d);
            let mut row = laplacian_row(cn, wn, &fd.report);
            row["discrepancy"] = json!(d);
            row["flagged"] = json!(d > cfg.tolerances.fd_route);
            row["fit"] = json!({
                "levy_residual": fd.levy_residual,
                "singular_residual": fd.singular_residual,
                "condition": fd.condition,
                "noise_floor": fd.noise_floor,
                "warnings": fd.warnings,
            });
            out.rows.push(row);
            out.csv.push(CsvRow::from_report(cn, wn, &fd.report));
            out.checks.push(Check::at_most(format!("fd_discrepancy[{cn}/{wn}]"), d, cfg.tolerances.fd_route));
        }
    }
    out.summary.insert("max_route_discrepancy".into(), json!(worst_route));
    if use_fd {
        out.summary.insert("max_fd_discrepancy".into(), json!(worst_fd));
    }
    out.summary.insert("flagged_rows".into(), json!(out.checks.iter().filter(|c| !c.passed).count()));
    Ok(out)
}

fn random_spline(rng: &mut ChaCha8Rng) -> Result<Curve> {
    let pts: Vec<Point> = (0..4)
        .map(|_| Point::from_fn(|_, _| rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(Curve::spline(&pts)?)
}

fn scan(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut curves = s.curves.clone();
    for k in 0..cfg.scan.n_random_curves {
        curves.push((format!("random_{k}"), random_spline(&mut rng)?));
    }
    let pairs: Vec<_> = curves
        .iter()
        .flat_map(|(cn, c)| s.rotations.iter().map(move |(wn, w)| (cn.as_str(), c, wn.as_str(), w)))
        .collect();
    let reports = pairs
        .par_iter()
        .map(|&(_, c, _, w)| laplacian_closed_form(s.field.as_ref(), s.chart.as_ref(), c, &w.build(), &cfg.transport))
        .collect::<holonomy_core::Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    let (mut left, mut other) = (0.0f64, 0.0f64);
    let mut best = Value::Null;
    for (&(cn, _, wn, w), r) in pairs.iter().zip(&reports) {
        out.rows.push(laplacian_row(cn, wn, r));
        out.csv.push(CsvRow::from_report(cn, wn, r));
        let pure_left = w.right == [0.0; 3];
        if pure_left {
            left = left.max(r.rel_norm());
        } else if r.rel_norm() > other {
            other = r.rel_norm();
            best = json!({ "curve": cn, "W": wn });
        }
    }
    out.summary.insert("max_rel_norm_left_rotations".into(), json!(left));
    out.summary.insert("max_rel_norm_other_rotations".into(), json!(other));
    if !best.is_null() {
        out.summary.insert("largest_other".into(), best);
    }
    if cfg.scan.expect_left_vanishing {
        out.checks.push(Check::at_most("max_rel_norm_left_rotations", left, cfg.tolerances.vanishing));
    }
    Ok(out)
}

fn lemma_diagnostics(cfg: &ExperimentConfig, s: &Setup) -> Result<Outcome> {
    let l = &cfg.lemma;
    let jopts = JOptions {
        r_grid: l.r_grid.clone(),
        step: l.step,
    };
    let pairs = s.pairs();
    let js = pairs
        .par_iter()
        .map(|&(_, c, _, w)| diagnostic_j(s.field.as_ref(), s.chart.as_ref(), c, &w.build(), &jopts, &cfg.transport))
        .collect::<holonomy_core::Result<Vec<_>>>()?;
    let a = l.recovery_generator.generator();
    let recoveries = s
        .curves
        .par_iter()
        .map(|(_, c)| pointwise_trace_recovery(s.field.as_ref(), s.chart.as_ref(), c, &a, l.recovery_r, &l.eps, &cfg.transport))
        .collect::<holonomy_core::Result<Vec<_>>>()?;

    let mut out = Outcome::default();
    let (mut worst_j, mut worst_jp) = (0.0f64, 0.0f64);
    for (&(cn, _, wn, _), j) in pairs.iter().zip(&js) {
        worst_j = worst_j.max(j.max_rel_j);
        worst_jp = worst_jp.max(j.rel_defect);
        out.rows.push(json!({ "kind": "j", "curve": cn, "W": wn, "report": j }));
        let max_j = j.j_norms.iter().copied().fold(0.0, f64::max);
        out.csv.push(CsvRow {
            curve: cn.into(),
            w: wn.into(),
            route: "j_diagnostic".into(),
            norm: max_j,
            term_norms: String::new(),
            scale: j.scale,
            rel_norm: j.max_rel_j,
        });
        if l.expect_j_vanishing {
            out.checks.push(Check::at_most(format!("max_rel_j[{cn}/{wn}]"), j.max_rel_j, cfg.tolerances.j_vanishing));
        }
        if l.check_j_prime {
            out.checks.push(Check::at_most(format!("j_prime_defect[{cn}/{wn}]"), j.rel_defect, cfg.tolerances.j_prime));
        }
    }
    for ((cn, _), r) in s.curves.iter().zip(&recoveries) {
        out.rows.push(json!({ "kind": "trace_recovery", "curve": cn, "report": r }));
        if let (true, Some(p)) = (l.check_rate, r.exponent) {
            let [lo, hi] = cfg.tolerances.rate_exponent;
            out.checks.push(Check::within(format!("rate_exponent[{cn}]"), p, lo, hi));
        }
    }
    out.summary.insert("max_rel_j".into(), json!(worst_j));
    out.summary.insert("max_j_prime_defect".into(), json!(worst_jp));
    Ok(out)
}
