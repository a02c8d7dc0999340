//! 4×4 index blocks whose entries are gauge matrices.

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::gauge_element::{conjugate, re, GaugeMatrix};
use super::so4::So4Element;
use crate::constants::levi_civita;

/// Antisymmetric block `B_{μν} = −B_{νμ}` of gauge matrices (a Lie-algebra
/// valued 2-form at a point, in some basis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFormBlock<const N: usize> {
    c: [[GaugeMatrix<N>; 4]; 4],
}

/// Symmetric block of gauge matrices (the Levy kernel at one time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricBlock<const N: usize> {
    c: [[GaugeMatrix<N>; 4]; 4],
}

impl<const N: usize> TwoFormBlock<N> {
    pub fn zero() -> Self {
        Self {
            c: [[GaugeMatrix::zeros(); 4]; 4],
        }
    }

    /// Builds the block from `upper(μ, ν)` for `μ < ν`; the lower half is
    /// filled by antisymmetry and the diagonal is zero.
    pub fn from_upper(mut upper: impl FnMut(usize, usize) -> GaugeMatrix<N>) -> Self {
        let mut c = [[GaugeMatrix::zeros(); 4]; 4];
        for mu in 0..4 {
            for nu in (mu + 1)..4 {
                let v = upper(mu, nu);
                c[mu][nu] = v;
                c[nu][mu] = -v;
            }
        }
        Self { c }
    }

    /// Antisymmetrizes an arbitrary block: `½(B_{μν} − B_{νμ})`.
    pub fn antisymmetrize(raw: &[[GaugeMatrix<N>; 4]; 4]) -> Self {
        Self::from_upper(|mu, nu| (raw[mu][nu] - raw[nu][mu]) * re(0.5))
    }

    /// `a_{μν}·g`.
    pub fn from_so4(a: &So4Element, g: &GaugeMatrix<N>) -> Self {
        Self::from_upper(|mu, nu| g * re(a.get(mu, nu)))
    }

    #[inline]
    pub fn get(&self, mu: usize, nu: usize) -> &GaugeMatrix<N> {
        &self.c[mu][nu]
    }

    pub fn components(&self) -> &[[GaugeMatrix<N>; 4]; 4] {
        &self.c
    }

    pub fn map(&self, f: impl Fn(&GaugeMatrix<N>) -> GaugeMatrix<N>) -> Self {
        Self::from_upper(|mu, nu| f(&self.c[mu][nu]))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_upper(|mu, nu| self.c[mu][nu] + other.c[mu][nu])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_upper(|mu, nu| self.c[mu][nu] - other.c[mu][nu])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|g| g * re(s))
    }

    /// `u† B u` componentwise.
    pub fn conjugate_by(&self, u: &GaugeMatrix<N>) -> Self {
        self.map(|g| conjugate(u, g))
    }

    /// `l · B · r` componentwise.
    pub fn sandwich(&self, l: &GaugeMatrix<N>, r: &GaugeMatrix<N>) -> Self {
        self.map(|g| l * g * r)
    }

    /// Component-level Hodge dual `½ Σ ε_{μνλκ} B_{λκ}`.
    pub fn index_hodge(&self) -> Self {
        Self::from_upper(|mu, nu| {
            let mut s = GaugeMatrix::zeros();
            for l in 0..4 {
                for k in 0..4 {
                    let e = levi_civita(mu, nu, l, k);
                    if e != 0.0 {
                        s += self.c[l][k] * re(0.5 * e);
                    }
                }
            }
            s
        })
    }

    /// `½(B + *B)`.
    pub fn self_dual_part(&self) -> Self {
        self.add(&self.index_hodge()).scale(0.5)
    }

    /// `½(B − *B)`.
    pub fn anti_self_dual_part(&self) -> Self {
        self.sub(&self.index_hodge()).scale(0.5)
    }

    /// Components in a new basis: `B'_{μν} = Σ Z^α_μ Z^β_ν B_{αβ}`, where column
    /// `μ` of `frame` holds the vector `Z_μ`.
    pub fn in_frame(&self, frame: &Matrix4<f64>) -> Self {
        Self::from_upper(|mu, nu| {
            let mut s = GaugeMatrix::zeros();
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    let w = frame[(a, mu)] * frame[(b, nu)];
                    if w != 0.0 {
                        s += self.c[a][b] * re(w);
                    }
                }
            }
            s
        })
    }

    /// Contraction with two vectors: `B⟨u, v⟩ = Σ B_{μν} u^μ v^ν`.
    pub fn contract(&self, u: &[f64; 4], v: &[f64; 4]) -> GaugeMatrix<N> {
        let mut s = GaugeMatrix::zeros();
        for mu in 0..4 {
            if u[mu] == 0.0 {
                continue;
            }
            for nu in 0..4 {
                if mu != nu && v[nu] != 0.0 {
                    s += self.c[mu][nu] * re(u[mu] * v[nu]);
                }
            }
        }
        s
    }

    /// `sqrt(Σ_{μν} ‖B_{μν}‖²_F)`.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                s += self.c[mu][nu].norm_squared();
            }
        }
        s.sqrt()
    }

    /// Largest antisymmetry defect (zero by construction, kept for checks).
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                d = d.max((self.c[mu][nu] + self.c[nu][mu]).norm());
            }
        }
        d
    }
}

impl<const N: usize> SymmetricBlock<N> {
    pub fn zero() -> Self {
        Self {
            c: [[GaugeMatrix::zeros(); 4]; 4],
        }
    }

    /// Symmetrizes an arbitrary block: `½(B_{μν} + B_{νμ})`.
    pub fn symmetrize(raw: &[[GaugeMatrix<N>; 4]; 4]) -> Self {
        let mut c = [[GaugeMatrix::zeros(); 4]; 4];
        for mu in 0..4 {
            for nu in mu..4 {
                let v = (raw[mu][nu] + raw[nu][mu]) * re(0.5);
                c[mu][nu] = v;
                c[nu][mu] = v;
            }
        }
        Self { c }
    }

    /// `δ_{μν}·g`.
    pub fn diagonal(g: &GaugeMatrix<N>) -> Self {
        let mut c = [[GaugeMatrix::zeros(); 4]; 4];
        for (mu, row) in c.iter_mut().enumerate() {
            row[mu] = *g;
        }
        Self { c }
    }

    #[inline]
    pub fn get(&self, mu: usize, nu: usize) -> &GaugeMatrix<N> {
        &self.c[mu][nu]
    }

    pub fn components(&self) -> &[[GaugeMatrix<N>; 4]; 4] {
        &self.c
    }

    /// Index trace `Σ_μ B_{μμ}`.
    pub fn index_trace(&self) -> GaugeMatrix<N> {
        self.c[0][0] + self.c[1][1] + self.c[2][2] + self.c[3][3]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.c.iter_mut() {
            for g in row.iter_mut() {
                *g *= re(s);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for mu in 0..4 {
            for nu in 0..4 {
                out.c[mu][nu] += other.c[mu][nu];
            }
        }
        out
    }

    /// `l · B · r` componentwise.
    pub fn sandwich(&self, l: &GaugeMatrix<N>, r: &GaugeMatrix<N>) -> Self {
        let mut out = *self;
        for row in out.c.iter_mut() {
            for g in row.iter_mut() {
                *g = l * *g * r;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = *self;
        for mu in 0..4 {
            for nu in 0..4 {
                out.c[mu][nu] -= other.c[mu][nu];
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for row in &self.c {
            for g in row {
                s += g.norm_squared();
            }
        }
        s.sqrt()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                d = d.max((self.c[mu][nu] - self.c[nu][mu]).norm());
            }
        }
        d
    }
}

/// `Σ_{μ,ν} a_{μν} B_{νμ}`: the 4-index matrix trace of `a·B`, entrywise in
/// gauge indices.
pub fn so4_pairing<const N: usize>(a: &So4Element, b: &TwoFormBlock<N>) -> GaugeMatrix<N> {
    let mut s = GaugeMatrix::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let w = a.get(mu, nu);
            if w != 0.0 {
                s += b.get(nu, mu) * Complex64::new(w, 0.0);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gauge_element::su2_basis;
    use crate::algebra::so4::{left_basis, right_basis};

    fn sample_block() -> TwoFormBlock<2> {
        let t = su2_basis();
        TwoFormBlock::from_upper(|mu, nu| {
            t[(mu + nu) % 3] * re(1.0 + mu as f64 - 0.5 * nu as f64)
                + t[(mu * nu) % 3] * re(0.25 * nu as f64)
        })
    }

    #[test]
    fn pairing_with_zero_and_e1() {
        let b = sample_block();
        assert_eq!(so4_pairing(&So4Element::zero(), &b), GaugeMatrix::<2>::zeros());
        let g = su2_basis()[1];
        let blk = TwoFormBlock::from_upper(|mu, nu| match (mu, nu) {
            (0, 1) | (2, 3) => g,
            _ => GaugeMatrix::zeros(),
        });
        let p = so4_pairing(&left_basis()[0], &blk);
        assert!((p - g * re(4.0)).norm() < 1e-15);
    }

    #[test]
    fn hodge_is_involution_and_split_is_additive() {
        let b = sample_block();
        assert!(b.index_hodge().index_hodge().sub(&b).norm() < 1e-15);
        let sum = b.self_dual_part().add(&b.anti_self_dual_part());
        assert!(sum.sub(&b).norm() < 1e-15);
    }

    #[test]
    fn left_pairs_trivially_with_anti_self_dual() {
        let asd = sample_block().anti_self_dual_part();
        for e in left_basis() {
            assert!(so4_pairing(&e, &asd).norm() < 1e-14);
        }
        let sd = sample_block().self_dual_part();
        for f in right_basis() {
            assert!(so4_pairing(&f, &sd).norm() < 1e-14);
        }
    }

    /// `Q₊` via the Hodge formula agrees with `P_L` applied to each real
    /// component of the block.
    #[test]
    fn self_dual_part_is_the_left_projection() {
        let b = sample_block();
        let sd = b.self_dual_part();
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for i in 0..2 {
            for j in 0..2 {
                for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
                    let a = So4Element::from_upper(pairs.map(|(mu, nu)| part(b.get(mu, nu)[(i, j)])));
                    let pl = a.project_left();
                    for &(mu, nu) in &pairs {
                        assert!((pl.get(mu, nu) - part(sd.get(mu, nu)[(i, j)])).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn identity_frame_is_noop() {
        let b = sample_block();
        assert_eq!(b.in_frame(&Matrix4::identity()), b);
    }
}
