//! Experiment configuration: TOML file, dotted `--set` overrides, and
//! resolution of the named specs.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use holonomy_core::builtins::{
    parse_spec, ChartSpec, CurveSpec, FieldSpec, RotationSpec, CHART_KINDS, CURVE_KINDS,
    FIELD_KINDS, PINNED_CURVES,
};
use holonomy_core::levy::FdRouteOptions;
use holonomy_core::TransportOptions;
use serde::{Deserialize, Serialize};

/// Tolerances checked in acceptance mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `‖F₊‖/‖F‖` (or `‖F₋‖/‖F‖`) for the expected orientation.
    pub self_dual: f64,
    /// `‖D*F‖ / max‖F‖`.
    pub ym_residual: f64,
    /// `‖Δ‖ / scale` where vanishing is expected.
    pub vanishing: f64,
    /// `‖closed − kernel‖ / max(1, ‖closed‖)`.
    pub route: f64,
    /// `‖closed − fd‖ / ‖closed‖`.
    pub fd_route: f64,
    /// `max_r ‖J(r)‖ / scale`.
    pub j_vanishing: f64,
    /// Relative defect of the `J′(1)` identity.
    pub j_prime: f64,
    /// Admissible range of the fitted trace-recovery rate.
    pub rate_exponent: [f64; 2],
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            self_dual: 1e-10,
            ym_residual: 1e-9,
            vanishing: 1e-6,
            route: 1e-6,
            fd_route: 1e-3,
            j_vanishing: 1e-6,
            j_prime: 5e-3,
            rate_exponent: [0.8, 1.2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    AntiSelfDual,
    SelfDual,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfDualOptions {
    pub n_points: usize,
    /// Points are drawn uniformly from the cube `[−radius, radius]⁴`.
    pub radius: f64,
    pub expect: Expectation,
    pub check_ym: bool,
}

impl Default for SelfDualOptions {
    fn default() -> Self {
        Self {
            n_points: 50,
            radius: 2.0,
            expect: Expectation::AntiSelfDual,
            check_ym: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaplacianOptions {
    /// Any of `closed_form`, `kernel`, `fd`.
    pub routes: Vec<String>,
    pub expect_vanishing: bool,
    pub fd: FdRouteOptions,
}

impl Default for LaplacianOptions {
    fn default() -> Self {
        Self {
            routes: vec!["closed_form".into()],
            expect_vanishing: false,
            fd: FdRouteOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleOptions {
    /// Also compare against the finite-difference route (flat charts only).
    pub fd: bool,
    pub fd_options: FdRouteOptions,
    /// Test fixture: flips the sign of the Yang–Mills term in the closed form.
    pub inject_sign_flip: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanOptions {
    /// Extra seeded random spline curves added to the configured ones.
    pub n_random_curves: usize,
    /// Check that purely left-basis rotations give vanishing Laplacians.
    pub expect_left_vanishing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaOptions {
    pub r_grid: Vec<f64>,
    pub step: f64,
    pub expect_j_vanishing: bool,
    pub check_j_prime: bool,
    /// Generator `a` of `W_a(t) = exp(ta)` for the trace recovery.
    pub recovery_generator: RotationSpec,
    pub recovery_r: f64,
    pub eps: Vec<f64>,
    pub check_rate: bool,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        let j = holonomy_core::levy::JOptions::default();
        Self {
            r_grid: j.r_grid,
            step: j.step,
            expect_j_vanishing: false,
            check_j_prime: false,
            recovery_generator: RotationSpec::right_unit(1),
            recovery_r: 0.7,
            eps: vec![0.2, 0.1, 0.05, 0.025],
            check_rate: true,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    /// Output directory; `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    pub no_csv: bool,
}

fn default_chart() -> ChartSpec {
    ChartSpec::Flat
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_chart")]
    pub chart: ChartSpec,
    pub field: FieldSpec,
    #[serde(default)]
    pub curves: BTreeMap<String, CurveSpec>,
    #[serde(default)]
    pub rotations: BTreeMap<String, RotationSpec>,
    #[serde(default)]
    pub transport: TransportOptions,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default)]
    pub selfdual: SelfDualOptions,
    #[serde(default)]
    pub laplacian: LaplacianOptions,
    #[serde(default)]
    pub oracle: OracleOptions,
    #[serde(default)]
    pub scan: ScanOptions,
    #[serde(default)]
    pub lemma: LemmaOptions,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text, overrides).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().context("config does not parse")?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let json = serde_json::to_value(&table)?;
        check_names(&json)?;
        let mut cfg: ExperimentConfig =
            serde_json::from_value(json).context("config does not match the schema")?;
        cfg.fill_defaults();
        cfg.validate()?;
        Ok(cfg)
    }

    fn fill_defaults(&mut self) {
        if self.curves.is_empty() {
            for name in PINNED_CURVES {
                self.curves.insert(name.to_string(), CurveSpec::Pinned { name: name.to_string() });
            }
        }
        if self.rotations.is_empty() {
            for i in 0..3 {
                self.rotations.insert(format!("e{}", i + 1), RotationSpec::left_unit(i));
                self.rotations.insert(format!("f{}", i + 1), RotationSpec::right_unit(i));
            }
        }
    }

    fn validate(&self) -> Result<()> {
        self.transport.validate()?;
        for r in &self.laplacian.routes {
            if !["closed_form", "kernel", "fd"].contains(&r.as_str()) {
                bail!("unknown route `{r}`; valid options: closed_form, kernel, fd");
            }
        }
        Ok(())
    }

    /// The config as TOML, suitable for re-running.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

/// Rejects unknown `kind` names with a listing of the valid ones.
fn check_names(json: &serde_json::Value) -> Result<()> {
    if let Some(c) = json.get("chart") {
        parse_spec::<ChartSpec>("chart", CHART_KINDS, c.clone())?;
    }
    let field = json.get("field").context("config needs a [field] section")?;
    parse_spec::<FieldSpec>("field", FIELD_KINDS, field.clone())?;
    if let Some(curves) = json.get("curves").and_then(|c| c.as_object()) {
        for (name, c) in curves {
            parse_spec::<CurveSpec>("curve", CURVE_KINDS, c.clone())
                .with_context(|| format!("curve `{name}`"))?;
        }
    }
    Ok(())
}

/// Applies `a.b.c=value`; the value is parsed as a TOML value, falling back
/// to a bare string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .with_context(|| format!("override `{spec}` is not of the form key=value"))?;
    let value = parse_value(raw.trim());
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("override key `{key}` has an empty component");
    }
    let mut cur = table;
    for part in &path[..path.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .with_context(|| format!("override `{key}`: `{part}` is not a table"))?;
    }
    cur.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        seed = 3
        [field]
        kind = "bpst"
    "#;

    #[test]
    fn defaults_fill_curves_and_rotations() {
        let c = ExperimentConfig::parse(BASE, &[]).unwrap();
        assert_eq!(c.curves.len(), 5);
        assert_eq!(c.rotations.len(), 6);
        assert_eq!(c.chart, ChartSpec::Flat);
        assert_eq!(c.transport.steps, 2000);
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = ExperimentConfig::parse(
            BASE,
            &[
                "transport.steps=400".into(),
                "chart.kind=s4_stereographic".into(),
                "field.rho=0.5".into(),
                "lemma.eps=[0.4, 0.2]".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.transport.steps, 400);
        assert_eq!(c.chart, ChartSpec::S4Stereographic);
        assert!(matches!(c.field, FieldSpec::Bpst { rho, .. } if rho == 0.5));
        assert_eq!(c.lemma.eps, vec![0.4, 0.2]);
    }

    #[test]
    fn unknown_names_are_listed() {
        let err = ExperimentConfig::parse(BASE, &["field.kind=monopole".into()]).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("monopole") && msg.contains("abelian_constant"), "{msg}");
        let err = ExperimentConfig::parse(BASE, &["laplacian.routes=[\"magic\"]".into()]).unwrap_err();
        assert!(format!("{err:#}").contains("closed_form"));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = ExperimentConfig::parse("seed = = 1", &[]).unwrap_err();
        assert!(format!("{err:#}").contains("line 1"), "{err:#}");
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = ExperimentConfig::parse(BASE, &["scan.n_random_curves=2".into()]).unwrap();
        let again = ExperimentConfig::parse(&c.to_toml().unwrap(), &[]).unwrap();
        assert_eq!(serde_json::to_value(&c).unwrap(), serde_json::to_value(&again).unwrap());
    }
}
