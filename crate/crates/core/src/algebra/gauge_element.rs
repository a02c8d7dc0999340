//! Matrix values of connections, curvatures and transports.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::constants::BUILDER_TOLERANCE;
use crate::error::{Error, Result};

/// Raw `N×N` complex matrix used in every inner loop.
pub type GaugeMatrix<const N: usize> = SMatrix<Complex64, N, N>;

/// Whether a [`GaugeElement`] lives in the Lie algebra or in the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Algebra,
    Group,
}

/// A validated gauge value: anti-Hermitian (traceless for `N > 1`) when it is
/// an algebra element, unitary when it is a group element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeElement<const N: usize> {
    entries: GaugeMatrix<N>,
    flavor: Flavor,
}

impl<const N: usize> GaugeElement<N> {
    /// Builds an algebra element, re-projecting `m` onto the Lie algebra.
    pub fn algebra(m: GaugeMatrix<N>) -> Self {
        Self {
            entries: project_algebra(&m),
            flavor: Flavor::Algebra,
        }
    }

    /// Builds an algebra element, rejecting inputs that are not anti-Hermitian
    /// within the builder tolerance.
    pub fn try_algebra(m: GaugeMatrix<N>) -> Result<Self> {
        let dev = anti_hermitian_defect(&m);
        if dev > BUILDER_TOLERANCE * (1.0 + m.norm()) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not in the gauge algebra (defect {dev:e})"
            )));
        }
        Ok(Self::algebra(m))
    }

    /// Builds a group element, re-unitarizing `m` by polar decomposition.
    pub fn group(m: GaugeMatrix<N>) -> Self {
        Self {
            entries: reunitarize(&m),
            flavor: Flavor::Group,
        }
    }

    /// Builds a group element, rejecting inputs far from unitary.
    pub fn try_group(m: GaugeMatrix<N>) -> Result<Self> {
        let dev = unitarity_defect(&m);
        if dev > BUILDER_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (defect {dev:e})"
            )));
        }
        Ok(Self::group(m))
    }

    pub fn zero() -> Self {
        Self {
            entries: GaugeMatrix::zeros(),
            flavor: Flavor::Algebra,
        }
    }

    pub fn identity() -> Self {
        Self {
            entries: GaugeMatrix::identity(),
            flavor: Flavor::Group,
        }
    }

    pub fn matrix(&self) -> &GaugeMatrix<N> {
        &self.entries
    }

    pub fn into_matrix(self) -> GaugeMatrix<N> {
        self.entries
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }
}

/// `½(m − m†)`, with the trace removed when `N > 1`.
pub fn project_algebra<const N: usize>(m: &GaugeMatrix<N>) -> GaugeMatrix<N> {
    let mut a = (m - m.adjoint()) * Complex64::new(0.5, 0.0);
    if N > 1 {
        let tr = a.trace() / Complex64::new(N as f64, 0.0);
        for i in 0..N {
            a[(i, i)] -= tr;
        }
    }
    a
}

/// Frobenius norm of `m + m†`.
pub fn anti_hermitian_defect<const N: usize>(m: &GaugeMatrix<N>) -> f64 {
    (m + m.adjoint()).norm()
}

/// Frobenius norm of `m†m − I`.
pub fn unitarity_defect<const N: usize>(m: &GaugeMatrix<N>) -> f64 {
    (m.adjoint() * m - GaugeMatrix::<N>::identity()).norm()
}

/// Unitary polar factor of `m`.
///
/// Near-unitary inputs are refined by Newton-Schulz iterations; anything else
/// goes through an SVD.
pub fn reunitarize<const N: usize>(m: &GaugeMatrix<N>) -> GaugeMatrix<N> {
    let id = GaugeMatrix::<N>::identity();
    if unitarity_defect(m) < 0.1 {
        let mut x = *m;
        for _ in 0..8 {
            let e = x.adjoint() * x - id;
            if e.norm() < 1e-15 {
                break;
            }
            // X ← X (3I − X†X)/2
            x = x * (id * Complex64::new(1.5, 0.0) - (e + id) * Complex64::new(0.5, 0.0));
        }
        return x;
    }
    let dm = nalgebra::DMatrix::from_iterator(N, N, m.iter().copied());
    let svd = dm.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => GaugeMatrix::<N>::from_iterator((u * v_t).iter().copied()),
        _ => id,
    }
}

/// Matrix exponential for any `N` (routed through a dynamic matrix, since the
/// fixed-size `exp` needs typenum bounds that const generics cannot express).
pub fn expm<const N: usize>(m: &GaugeMatrix<N>) -> GaugeMatrix<N> {
    let dm = nalgebra::DMatrix::from_iterator(N, N, m.iter().copied());
    GaugeMatrix::<N>::from_iterator(dm.exp().iter().copied())
}

/// `u† g u`, the conjugation used to move integrands into the frame at the
/// curve origin.
#[inline]
pub fn conjugate<const N: usize>(u: &GaugeMatrix<N>, g: &GaugeMatrix<N>) -> GaugeMatrix<N> {
    u.adjoint() * g * u
}

/// Commutator `[a, b]`.
#[inline]
pub fn commutator<const N: usize>(a: &GaugeMatrix<N>, b: &GaugeMatrix<N>) -> GaugeMatrix<N> {
    a * b - b * a
}

/// The real scalar as a complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The imaginary unit times `x`.
#[inline]
pub fn im(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// Anti-Hermitian basis `T_a = −(i/2)σ_a` of su(2), with `[T_a, T_b] = ε_abc T_c`.
pub fn su2_basis() -> [GaugeMatrix<2>; 3] {
    let z = re(0.0);
    let h = 0.5;
    [
        GaugeMatrix::<2>::new(z, im(-h), im(-h), z),
        GaugeMatrix::<2>::new(z, re(-h), re(h), z),
        GaugeMatrix::<2>::new(im(-h), z, z, im(h)),
    ]
}

/// Diagonal Cartan direction used to embed abelian fields: `diag(1, −1, 0, …)`
/// for `N ≥ 2`, and `1` for `N = 1`.
pub fn cartan_direction<const N: usize>() -> GaugeMatrix<N> {
    let mut h = GaugeMatrix::<N>::zeros();
    h[(0, 0)] = re(1.0);
    if N > 1 {
        h[(1, 1)] = re(-1.0);
    }
    h
}
