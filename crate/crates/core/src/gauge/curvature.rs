//! Curvature and its covariant derivatives.

use super::connection::{Connection, Jet1, Jet2, Potential};
use crate::algebra::{commutator, GaugeMatrix, TwoFormBlock};
use crate::error::Result;
use crate::geometry::{metric_hodge_with, MetricChart, MetricData, Point};

/// `F_{μν} = ∂_μA_ν − ∂_νA_μ + [A_μ, A_ν]`.
pub fn curvature_from_jet<const N: usize>(j: &Jet1<N>) -> TwoFormBlock<N> {
    TwoFormBlock::from_upper(|mu, nu| {
        j.da[mu][nu] - j.da[nu][mu] + commutator(&j.a[mu], &j.a[nu])
    })
}

/// Curvature of `conn` at `x`.
pub fn curvature<const N: usize>(conn: &dyn Connection<N>, x: &Point) -> TwoFormBlock<N> {
    curvature_from_jet(&conn.jet1(x))
}

/// Partial derivatives `∂_λF_{μν}` from a second-order jet, indexed by `λ`.
pub fn curvature_partials<const N: usize>(j: &Jet2<N>) -> [TwoFormBlock<N>; 4] {
    std::array::from_fn(|l| {
        TwoFormBlock::from_upper(|mu, nu| {
            j.dda[l][mu][nu] - j.dda[l][nu][mu]
                + commutator(&j.da[l][mu], &j.a[nu])
                + commutator(&j.a[mu], &j.da[l][nu])
        })
    })
}

/// `∇_λF_{μν} = ∂_λF_{μν} + [A_λ, F_{μν}] − F_{μκ}Γ^κ_{λν} − F_{κν}Γ^κ_{λμ}`.
pub fn covariant_derivative_from<const N: usize>(
    a: &Potential<N>,
    f: &TwoFormBlock<N>,
    df: &[TwoFormBlock<N>; 4],
    md: &MetricData,
) -> [TwoFormBlock<N>; 4] {
    let g = &md.christoffel;
    std::array::from_fn(|l| {
        TwoFormBlock::from_upper(|mu, nu| {
            let mut v = *df[l].get(mu, nu) + commutator(&a[l], f.get(mu, nu));
            for k in 0..4 {
                let c1 = g[k][l][nu];
                if c1 != 0.0 {
                    v -= f.get(mu, k) * crate::algebra::re(c1);
                }
                let c2 = g[k][l][mu];
                if c2 != 0.0 {
                    v -= f.get(k, nu) * crate::algebra::re(c2);
                }
            }
            v
        })
    })
}

/// Everything the kernel integrands need at one point of the chart.
#[derive(Debug, Clone)]
pub struct FieldSample<const N: usize> {
    pub md: MetricData,
    pub a: Potential<N>,
    pub f: TwoFormBlock<N>,
    /// `nabla_f[λ] = ∇_λF`.
    pub nabla_f: [TwoFormBlock<N>; 4],
}

impl<const N: usize> FieldSample<N> {
    pub fn at(conn: &dyn Connection<N>, chart: &dyn MetricChart, x: &Point) -> Result<Self> {
        let md = MetricData::at(chart, x)?;
        let j = conn.jet2(x);
        let f = curvature_from_jet(&j.first());
        let df = curvature_partials(&j);
        let nabla_f = covariant_derivative_from(&j.a, &f, &df, &md);
        Ok(Self {
            md,
            a: j.a,
            f,
            nabla_f,
        })
    }

    /// `(D_A*F)_ν = −g^{μλ}∇_λF_{μν}`.
    pub fn ym_residual(&self) -> [GaugeMatrix<N>; 4] {
        let gi = &self.md.g_inv;
        std::array::from_fn(|nu| {
            let mut s = GaugeMatrix::zeros();
            for mu in 0..4 {
                for l in 0..4 {
                    let w = gi[(mu, l)];
                    if w != 0.0 {
                        s -= self.nabla_f[l].get(mu, nu) * crate::algebra::re(w);
                    }
                }
            }
            s
        })
    }
}

/// `∇_λF_{μν}` at `x`, indexed `[λ]`.
pub fn covariant_derivative_f<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    x: &Point,
) -> Result<[TwoFormBlock<N>; 4]> {
    Ok(FieldSample::at(conn, chart, x)?.nabla_f)
}

/// The Yang–Mills residual `(D_A*F)_ν = −∇^μF_{μν}` at `x`.
pub fn ym_residual<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    x: &Point,
) -> Result<[GaugeMatrix<N>; 4]> {
    Ok(FieldSample::at(conn, chart, x)?.ym_residual())
}

/// `(F₊, F₋) = ½(F ± *F)` with the metric Hodge star.
pub fn sd_split<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    x: &Point,
) -> Result<(TwoFormBlock<N>, TwoFormBlock<N>)> {
    let md = MetricData::at(chart, x)?;
    Ok(sd_split_with(&md, &curvature(conn, x)))
}

/// Self-dual split of a given 2-form.
pub fn sd_split_with<const N: usize>(
    md: &MetricData,
    f: &TwoFormBlock<N>,
) -> (TwoFormBlock<N>, TwoFormBlock<N>) {
    let star = metric_hodge_with(md, f);
    (f.add(&star).scale(0.5), f.sub(&star).scale(0.5))
}

/// Largest component norm of the cyclic sum
/// `∇_λF_{μν} + ∇_μF_{νλ} + ∇_νF_{λμ}`.
pub fn bianchi_defect<const N: usize>(nabla_f: &[TwoFormBlock<N>; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for l in 0..4 {
        for mu in 0..4 {
            for nu in 0..4 {
                let s = nabla_f[l].get(mu, nu) + nabla_f[mu].get(nu, l) + nabla_f[nu].get(l, mu);
                worst = worst.max(s.norm());
            }
        }
    }
    worst
}

/// Frobenius norm of a 1-form value `Σ_ν ‖R_ν‖²`.
pub fn one_form_norm<const N: usize>(r: &[GaugeMatrix<N>; 4]) -> f64 {
    r.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cartan_direction, im, So4Element};
    use crate::gauge::fields::{AbelianConstant, Bpst, Orientation, ZeroField};
    use crate::geometry::{metric_pairing, FlatChart, S4Stereographic};

    fn pts() -> Vec<Point> {
        vec![
            Point::new(0.3, -0.4, 0.1, 0.8),
            Point::new(-1.2, 0.5, 0.9, -0.3),
            Point::new(0.05, 0.02, -0.07, 0.01),
            Point::new(2.0, -1.0, 0.5, 1.5),
        ]
    }

    fn instanton() -> Bpst {
        Bpst::new(1.0, Point::zeros(), Orientation::Antidual).unwrap()
    }

    #[test]
    fn zero_field_has_no_curvature() {
        let f = curvature::<2>(&ZeroField, &Point::new(1.0, 2.0, 3.0, 4.0));
        assert_eq!(f.norm(), 0.0);
        let r = ym_residual::<2>(&ZeroField, &S4Stereographic, &Point::new(0.1, 0.2, 0.3, 0.4)).unwrap();
        assert_eq!(one_form_norm(&r), 0.0);
    }

    #[test]
    fn abelian_curvature_is_constant() {
        let c = So4Element::from_coefficients([0.3, 0.2, -0.1], [0.5, 0.0, 0.4]);
        let a = AbelianConstant::new(c.clone());
        let h = cartan_direction::<2>();
        for x in pts() {
            let f = curvature::<2>(&a, &x);
            for mu in 0..4 {
                for nu in 0..4 {
                    assert!((f.get(mu, nu) - h * im(-2.0 * c.get(mu, nu))).norm() < 1e-14);
                }
            }
            let nf = covariant_derivative_f::<2>(&a, &FlatChart, &x).unwrap();
            assert!(nf.iter().all(|b| b.norm() < 1e-14));
        }
    }

    #[test]
    fn self_dual_abelian_field_has_no_anti_self_dual_part() {
        let a = AbelianConstant::new(crate::algebra::left_basis()[0].clone());
        let (_, minus) = sd_split::<2>(&a, &FlatChart, &Point::new(0.2, 0.1, 0.0, 0.3)).unwrap();
        assert!(minus.norm() < 1e-14);
    }

    #[test]
    fn instanton_is_anti_self_dual_on_both_charts() {
        let b = instanton();
        for x in pts() {
            let f = curvature(&b, &x);
            let (p, m) = sd_split(&b, &FlatChart, &x).unwrap();
            assert!(p.norm() / f.norm() < 1e-12);
            assert!((m.sub(&f)).norm() / f.norm() < 1e-12);
            let (p, _) = sd_split(&b, &S4Stereographic, &x).unwrap();
            assert!(p.norm() / f.norm() < 1e-12);
        }
    }

    #[test]
    fn instanton_is_yang_mills_and_satisfies_bianchi() {
        let b = instanton();
        for x in pts() {
            for chart in [&FlatChart as &dyn MetricChart, &S4Stereographic] {
                let s = FieldSample::at(&b, chart, &x).unwrap();
                let scale = s.f.norm();
                assert!(one_form_norm(&s.ym_residual()) < 1e-12 * scale.max(1.0));
                assert!(bianchi_defect(&s.nabla_f) < 1e-12 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn split_is_metric_orthogonal() {
        let b = Bpst::new(1.0, Point::zeros(), Orientation::Dual).unwrap();
        let a = AbelianConstant::new(So4Element::from_coefficients([0.3, 0.2, -0.1], [0.5, 0.0, 0.4]));
        for x in pts() {
            let md = MetricData::at(&S4Stereographic, &x).unwrap();
            for f in [curvature(&b, &x), curvature::<2>(&a, &x)] {
                let (p, m) = sd_split_with(&md, &f);
                let scale = metric_pairing(&md, &f, &f);
                assert!(metric_pairing(&md, &p, &m).abs() < 1e-12 * scale);
            }
        }
    }
}
