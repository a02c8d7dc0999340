//! Declarative specs for charts, fields, curves and rotation paths, plus the
//! pinned fixtures shared by the acceptance suite, the CLI and the benches.
//!
//! Every spec is a serde enum tagged by `kind`. Use [`parse_spec`] rather than
//! plain deserialization to get an [`Error::UnknownName`] that lists the valid
//! kinds.

use std::sync::Arc;

use nalgebra::Vector4;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{su2_basis, GaugeMatrix, RotationPath, So4Element};
use crate::error::{Error, Result};
use crate::gauge::{AbelianConstant, Bpst, Bump, DynConnection, Orientation, Perturbed, ZeroField};
use crate::geometry::{Curve, FlatChart, MetricChart, Point, S4Stereographic, ScaledChart};

pub const CHART_KINDS: &[&str] = &["flat", "s4_stereographic", "scaled"];
pub const FIELD_KINDS: &[&str] = &["zero", "abelian_constant", "bpst", "perturbed"];
pub const CURVE_KINDS: &[&str] = &["constant", "line", "circle", "figure_eight", "spline", "pinned"];
pub const EXPERIMENTS: &[&str] = &[
    "selfdual-report",
    "laplacian",
    "oracle-check",
    "scan",
    "lemma-diagnostics",
];
pub const PINNED_CURVES: &[&str] = &["arc", "circle", "tilted_circle", "figure_eight", "segment"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    Flat,
    S4Stereographic,
    /// Constant rescaling `λ²g` of another chart.
    Scaled { inner: Box<ChartSpec>, lambda: f64 },
}

impl ChartSpec {
    pub fn build(&self) -> Result<Arc<dyn MetricChart>> {
        Ok(match self {
            ChartSpec::Flat => Arc::new(FlatChart),
            ChartSpec::S4Stereographic => Arc::new(S4Stereographic),
            ChartSpec::Scaled { inner, lambda } => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::InvalidArgument(format!("scale λ must be positive, got {lambda}")));
                }
                Arc::new(ScaledChart {
                    inner: inner.build()?,
                    lambda: *lambda,
                })
            }
        })
    }
}

/// Compactly supported bump: `components[μ]` holds su(2) coefficients in the
/// basis [`su2_basis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 4],
    pub radius: f64,
    pub components: [[f64; 3]; 4],
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self {
            center: [0.5, 0.0, 0.1, 0.0],
            radius: 1.5,
            components: [
                [1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 1.0, 0.0],
                [1.0, 0.0, 0.0],
            ],
        }
    }
}

impl BumpSpec {
    fn build(&self) -> Bump<2> {
        let t = su2_basis();
        Bump {
            center: Point::from(self.center),
            radius: self.radius,
            components: self
                .components
                .map(|c| (0..3).fold(GaugeMatrix::<2>::zeros(), |acc, a| acc + t[a] * crate::algebra::re(c[a]))),
        }
    }
}

fn default_rho() -> f64 {
    1.0
}

fn default_orientation() -> Orientation {
    Orientation::Antidual
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    /// `A_μ = i c_{μν}x^ν H` with `c = Σ left_i e_i + Σ right_i f_i`.
    AbelianConstant { left: [f64; 3], right: [f64; 3] },
    Bpst {
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default)]
        center: [f64; 4],
        #[serde(default = "default_orientation")]
        orientation: Orientation,
    },
    Perturbed {
        base: Box<FieldSpec>,
        eps: f64,
        #[serde(default)]
        bump: BumpSpec,
    },
}

impl FieldSpec {
    /// The unit instanton at the origin.
    pub fn instanton() -> Self {
        FieldSpec::Bpst {
            rho: 1.0,
            center: [0.0; 4],
            orientation: Orientation::Antidual,
        }
    }

    /// The unit instanton plus `eps` times the default bump.
    pub fn perturbed_instanton(eps: f64) -> Self {
        FieldSpec::Perturbed {
            base: Box::new(Self::instanton()),
            eps,
            bump: BumpSpec::default(),
        }
    }

    pub fn build(&self) -> Result<DynConnection<2>> {
        Ok(match self {
            FieldSpec::Zero => Arc::new(ZeroField),
            FieldSpec::AbelianConstant { left, right } => {
                Arc::new(AbelianConstant::new(So4Element::from_coefficients(*left, *right)))
            }
            FieldSpec::Bpst {
                rho,
                center,
                orientation,
            } => Arc::new(Bpst::new(*rho, Point::from(*center), *orientation)?),
            FieldSpec::Perturbed { base, eps, bump } => {
                Arc::new(Perturbed::new(base.build()?, *eps, bump.build())?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Constant { point: [f64; 4] },
    Line { start: [f64; 4], direction: [f64; 4] },
    Circle { center: [f64; 4], radius: f64, u: [f64; 4], v: [f64; 4] },
    FigureEight { center: [f64; 4], radius: f64, u: [f64; 4], v: [f64; 4] },
    Spline { points: Vec<[f64; 4]> },
    /// One of [`PINNED_CURVES`].
    Pinned { name: String },
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve> {
        let p = |a: &[f64; 4]| Point::from(*a);
        let v = |a: &[f64; 4]| Vector4::from(*a);
        match self {
            CurveSpec::Constant { point } => Ok(Curve::constant(p(point))),
            CurveSpec::Line { start, direction } => Ok(Curve::line(p(start), v(direction))),
            CurveSpec::Circle { center, radius, u, v: w } => Curve::circle(p(center), *radius, v(u), v(w)),
            CurveSpec::FigureEight { center, radius, u, v: w } => {
                Curve::figure_eight(p(center), *radius, v(u), v(w))
            }
            CurveSpec::Spline { points } => Curve::spline(&points.iter().map(p).collect::<Vec<_>>()),
            CurveSpec::Pinned { name } => pinned_curve(name),
        }
    }
}

/// `W(t) = exp(t·a)` with `a = Σ left_i e_i + Σ right_i f_i`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    #[serde(default)]
    pub left: [f64; 3],
    #[serde(default)]
    pub right: [f64; 3],
}

impl RotationSpec {
    pub fn left_unit(i: usize) -> Self {
        let mut s = Self::default();
        s.left[i] = 1.0;
        s
    }

    pub fn right_unit(i: usize) -> Self {
        let mut s = Self::default();
        s.right[i] = 1.0;
        s
    }

    pub fn generator(&self) -> So4Element {
        So4Element::from_coefficients(self.left, self.right)
    }

    pub fn build(&self) -> RotationPath {
        RotationPath::new(self.generator())
    }
}

/// Deserializes a `kind`-tagged spec, reporting unknown kinds by name.
pub fn parse_spec<T: DeserializeOwned>(
    what: &'static str,
    valid: &[&str],
    value: serde_json::Value,
) -> Result<T> {
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::InvalidArgument(format!("{what} spec needs a string `kind`")))?;
    if !valid.contains(&kind) {
        return Err(Error::UnknownName {
            kind: what,
            name: kind.to_string(),
            valid: valid.join(", "),
        });
    }
    serde_json::from_value(value).map_err(|e| Error::InvalidArgument(format!("{what} spec: {e}")))
}

/// The fixed test curves used on every chart.
pub fn pinned_curve(name: &str) -> Result<Curve> {
    let e = |i: usize| {
        let mut v = Vector4::zeros();
        v[i] = 1.0;
        v
    };
    match name {
        "arc" => Curve::spline(&[
            Point::new(-0.4, 0.1, 0.0, 0.2),
            Point::new(0.1, 0.5, -0.2, 0.1),
            Point::new(0.6, 0.2, 0.3, -0.2),
            Point::new(0.9, -0.3, 0.1, 0.1),
        ]),
        "circle" => Curve::circle(Point::new(0.1, 0.0, 0.2, 0.0), 0.9, e(0), Vector4::new(0.0, 0.6, 0.0, 0.8)),
        "tilted_circle" => Curve::circle(
            Point::new(0.3, -0.2, 0.0, 0.4),
            0.6,
            Vector4::new(1.0, 1.0, 0.0, 0.0),
            Vector4::new(0.0, 0.0, 1.0, -1.0),
        ),
        "figure_eight" => Curve::figure_eight(Point::new(0.0, 0.2, -0.1, 0.0), 0.8, e(2), e(3)),
        "segment" => Ok(Curve::line(Point::new(-0.5, -0.3, 0.2, 0.1), Vector4::new(1.2, 0.7, -0.4, 0.3))),
        _ => Err(Error::UnknownName {
            kind: "pinned curve",
            name: name.to_string(),
            valid: PINNED_CURVES.join(", "),
        }),
    }
}

/// All pinned curves with their names, in [`PINNED_CURVES`] order.
pub fn pinned_curves() -> Vec<(&'static str, Curve)> {
    PINNED_CURVES
        .iter()
        .map(|&n| (n, pinned_curve(n).expect("pinned curve builds")))
        .collect()
}

/// The field zoo sampled by randomized checks.
pub fn field_zoo() -> Vec<(&'static str, FieldSpec)> {
    vec![
        ("zero", FieldSpec::Zero),
        (
            "abelian",
            FieldSpec::AbelianConstant {
                left: [0.4, -0.2, 0.1],
                right: [0.3, 0.0, -0.5],
            },
        ),
        ("instanton", FieldSpec::instanton()),
        (
            "anti_instanton",
            FieldSpec::Bpst {
                rho: 0.8,
                center: [0.2, -0.1, 0.0, 0.3],
                orientation: Orientation::Dual,
            },
        ),
        ("perturbed_instanton", FieldSpec::perturbed_instanton(0.3)),
    ]
}

/// Human-readable listing of every built-in name.
pub fn list_builtins() -> String {
    let mut out = String::new();
    let mut section = |title: &str, names: &[&str]| {
        out.push_str(title);
        out.push_str(":\n");
        for n in names {
            out.push_str("  ");
            out.push_str(n);
            out.push('\n');
        }
    };
    section("charts", CHART_KINDS);
    section("fields", FIELD_KINDS);
    section("curve families", CURVE_KINDS);
    section("pinned curves", PINNED_CURVES);
    section("experiments", EXPERIMENTS);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn unknown_kind_lists_valid_options() {
        let err = parse_spec::<FieldSpec>("field", FIELD_KINDS, json!({"kind": "monopole"})).unwrap_err();
        match err {
            Error::UnknownName { name, valid, .. } => {
                assert_eq!(name, "monopole");
                assert!(valid.contains("bpst"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn specs_build() {
        let f: FieldSpec = parse_spec("field", FIELD_KINDS, json!({"kind": "bpst"})).unwrap();
        assert_eq!(f, FieldSpec::instanton());
        f.build().unwrap();
        for (_, f) in field_zoo() {
            f.build().unwrap();
        }
        let c: ChartSpec = parse_spec(
            "chart",
            CHART_KINDS,
            json!({"kind": "scaled", "lambda": 2.0, "inner": {"kind": "s4_stereographic"}}),
        )
        .unwrap();
        assert!(c.build().unwrap().name().contains("scaled"));
        assert_eq!(pinned_curves().len(), 5);
        assert!(pinned_curve("spiral").is_err());
    }

    #[test]
    fn listing_names_the_key_builtins() {
        let s = list_builtins();
        for n in ["bpst", "s4_stereographic", "laplacian"] {
            assert!(s.contains(n));
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let f = FieldSpec::Bpst {
            rho: -1.0,
            center: [0.0; 4],
            orientation: Orientation::Antidual,
        };
        assert!(f.build().is_err());
        let c = ChartSpec::Scaled {
            inner: Box::new(ChartSpec::Flat),
            lambda: 0.0,
        };
        assert!(c.build().is_err());
    }
}
