//! Second-derivative kernels of the parallel transport along a curve.
//!
//! With `Z_μ` the Levi-Civita frame,
//!
//! ```text
//! K^L_{μν}(t) = ½ U_{1,t}(−∇_{Z_μ}F⟨Z_ν,γ̇⟩ − ∇_{Z_ν}F⟨Z_μ,γ̇⟩)U_{t,0}
//! K^S_{μν}(t) = U_{1,t} F⟨Z_μ,Z_ν⟩ U_{t,0}
//! ```

use rayon::prelude::*;

use crate::algebra::{re, GaugeMatrix, SymmetricBlock, TwoFormBlock};
use crate::error::Result;
use crate::gauge::{Connection, FieldSample};
use crate::geometry::{Curve, MetricChart};
use crate::ode::Side;
use crate::quadrature::simpson;
use crate::transport::{transport_with_frame, Scheme, TransportOptions, TransportResult};

/// Kernel samples on one smooth piece of the curve. The last sample of a
/// piece uses left limits of `γ̇`; every other sample uses right limits.
#[derive(Debug, Clone)]
pub struct KernelPiece<const N: usize> {
    pub t: Vec<f64>,
    pub levy: Vec<SymmetricBlock<N>>,
    pub singular: Vec<TwoFormBlock<N>>,
}

/// The Levy and singular kernels of `U_{1,0}` sampled on the transport grid.
#[derive(Debug, Clone)]
pub struct KernelPair<const N: usize> {
    pieces: Vec<KernelPiece<N>>,
    steps: usize,
    scheme: Scheme,
}

impl<const N: usize> KernelPair<N> {
    pub fn new(pieces: Vec<KernelPiece<N>>, steps: usize, scheme: Scheme) -> Self {
        Self {
            pieces,
            steps,
            scheme,
        }
    }

    pub fn pieces(&self) -> &[KernelPiece<N>] {
        &self.pieces
    }

    /// Number of grid intervals.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// `∫₀¹ g(t, K^L(t), K^S(t)) dt` by Simpson on each piece.
    pub fn integrate(
        &self,
        g: impl Fn(f64, &SymmetricBlock<N>, &TwoFormBlock<N>) -> GaugeMatrix<N>,
    ) -> GaugeMatrix<N> {
        let mut total = GaugeMatrix::zeros();
        for p in &self.pieces {
            if p.t.len() < 2 {
                continue;
            }
            let vals: Vec<GaugeMatrix<N>> = (0..p.t.len())
                .map(|i| g(p.t[i], &p.levy[i], &p.singular[i]))
                .collect();
            let h = (p.t[p.t.len() - 1] - p.t[0]) / (p.t.len() - 1) as f64;
            total += simpson(&vals, h);
        }
        total
    }

    /// Largest symmetry defect of `K^L` and antisymmetry defect of `K^S`.
    pub fn symmetry_defect(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| {
                p.levy
                    .iter()
                    .map(|k| k.symmetry_defect())
                    .chain(p.singular.iter().map(|k| k.antisymmetry_defect()))
            })
            .fold(0.0, f64::max)
    }

    /// Largest `‖K^L(t)‖` and `‖K^S(t)‖` over the samples.
    pub fn max_norms(&self) -> (f64, f64) {
        let mut out = (0.0f64, 0.0f64);
        for p in &self.pieces {
            for (l, s) in p.levy.iter().zip(&p.singular) {
                out.0 = out.0.max(l.norm());
                out.1 = out.1.max(s.norm());
            }
        }
        out
    }
}

/// Raw kernel values at one sample, before sandwiching with the transport.
fn local_kernels<const N: usize>(
    sample: &FieldSample<N>,
    frame: &nalgebra::Matrix4<f64>,
    velocity: &nalgebra::Vector4<f64>,
) -> (SymmetricBlock<N>, TwoFormBlock<N>) {
    let v = [velocity[0], velocity[1], velocity[2], velocity[3]];
    let z: [[f64; 4]; 4] = std::array::from_fn(|mu| std::array::from_fn(|a| frame[(a, mu)]));
    // raw[μ][ν] = ∇_{Z_μ}F⟨Z_ν, γ̇⟩
    let mut raw = [[GaugeMatrix::<N>::zeros(); 4]; 4];
    if v.iter().any(|&c| c != 0.0) {
        let contracted: [[GaugeMatrix<N>; 4]; 4] =
            std::array::from_fn(|l| std::array::from_fn(|nu| sample.nabla_f[l].contract(&z[nu], &v)));
        for mu in 0..4 {
            for nu in 0..4 {
                let mut s = GaugeMatrix::zeros();
                for l in 0..4 {
                    let w = z[mu][l];
                    if w != 0.0 {
                        s += contracted[l][nu] * re(w);
                    }
                }
                raw[mu][nu] = s * re(-1.0);
            }
        }
    }
    (SymmetricBlock::symmetrize(&raw), sample.f.in_frame(frame))
}

/// Kernels from an existing transport solve with frames.
pub fn kernels_from_transport<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    tr: &TransportResult<N>,
) -> Result<KernelPair<N>> {
    let nodes = tr.nodes();
    let last = nodes.len() - 1;
    let pieces: Result<Vec<KernelPiece<N>>> = tr
        .grid()
        .pieces()
        .iter()
        .map(|&(s, e)| {
            let samples: Result<Vec<(SymmetricBlock<N>, TwoFormBlock<N>)>> = (s..=e)
                .into_par_iter()
                .map(|i| {
                    let side = if i == e { Side::Left } else { Side::Right };
                    let t = nodes[i];
                    let x = curve.position(t);
                    let sample = FieldSample::at(conn, chart, &x)?;
                    let (l, k) = local_kernels(&sample, &tr.frames()[i], &curve.velocity_at(t, side));
                    let left = tr.between(last, i);
                    let right = tr.from_origin(i);
                    Ok((l.sandwich(&left, right), k.sandwich(&left, right)))
                })
                .collect();
            let (levy, singular) = samples?.into_iter().unzip();
            Ok(KernelPiece {
                t: nodes[s..=e].to_vec(),
                levy,
                singular,
            })
        })
        .collect();
    Ok(KernelPair::new(pieces?, tr.grid().steps(), tr.scheme()))
}

/// `K^L` and `K^S` of `U_{1,0}(γ)` on the transport grid.
pub fn second_derivative_kernels<const N: usize>(
    conn: &dyn Connection<N>,
    chart: &dyn MetricChart,
    curve: &Curve,
    opts: &TransportOptions,
) -> Result<KernelPair<N>> {
    let tr = transport_with_frame(conn, chart, curve, opts)?;
    kernels_from_transport(conn, chart, curve, &tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cartan_direction, im, left_basis, So4Element};
    use crate::gauge::{curvature, AbelianConstant, Bpst, Orientation, ZeroField};
    use crate::geometry::{FlatChart, Point, S4Stereographic};
    use nalgebra::Vector4;

    fn opts() -> TransportOptions {
        TransportOptions::default().with_steps(200)
    }

    #[test]
    fn zero_field_has_zero_kernels() {
        let c = Curve::line(Point::new(0.1, 0.2, 0.0, -0.3), Vector4::new(1.0, 0.5, -0.2, 0.1));
        let k = second_derivative_kernels::<2>(&ZeroField, &S4Stereographic, &c, &opts()).unwrap();
        assert_eq!(k.max_norms(), (0.0, 0.0));
    }

    #[test]
    fn constant_curve_freezes_the_singular_kernel() {
        let m = Point::new(0.3, -0.2, 0.5, 0.1);
        let b = Bpst::new(1.0, Point::zeros(), Orientation::Antidual).unwrap();
        let k = second_derivative_kernels(&b, &FlatChart, &Curve::constant(m), &opts()).unwrap();
        let f = curvature(&b, &m);
        for p in k.pieces() {
            for (l, s) in p.levy.iter().zip(&p.singular) {
                assert_eq!(l.norm(), 0.0);
                assert!(s.sub(&f).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn abelian_line_kernels() {
        let c0 = 0.7;
        let c = left_basis()[0].scale(c0);
        let a = AbelianConstant::new(c);
        let line = Curve::line(Point::zeros(), Vector4::new(0.4, -0.3, 0.2, 0.6));
        let k = second_derivative_kernels::<2>(&a, &FlatChart, &line, &opts()).unwrap();
        let h = cartan_direction::<2>();
        let expected = TwoFormBlock::from_so4(&So4Element::new(*c.matrix()), &h).scale(1.0);
        let expected = expected.map(|g| g * im(-2.0));
        for p in k.pieces() {
            for (l, s) in p.levy.iter().zip(&p.singular) {
                assert!(l.norm() < 1e-13);
                assert!(s.sub(&expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kernels_have_the_right_symmetry() {
        let b = Bpst::new(1.0, Point::zeros(), Orientation::Antidual).unwrap();
        let c = Curve::circle(
            Point::new(0.1, 0.0, 0.2, 0.0),
            0.9,
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, 0.6, 0.0, 0.8),
        )
        .unwrap();
        let k = second_derivative_kernels(&b, &S4Stereographic, &c, &opts()).unwrap();
        assert!(k.symmetry_defect() < 1e-14);
        assert!(k.max_norms().0 > 0.0);
    }
}
