//! Fixed-size dense complex linear algebra for one and two spins.
//!
//! Everything here is a stack value: 2- and 4-component vectors and the
//! matching square matrices, stored row-major. The two-spin basis is ordered
//! `|++⟩, |+−⟩, |−+⟩, |−−⟩` (z basis, spin 1 is the slow index), so the
//! Kronecker product places `a[i][j] * b[k][l]` at `(2i + k, 2j + l)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::geometry::UnitVec3;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Componentwise tolerance for analytic equality checks.
pub const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVector<const N: usize>(pub [C64; N]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize>(pub [[C64; N]; N]);

pub type CVector2 = CVector<2>;
pub type CVector4 = CVector<4>;
pub type CMatrix2 = CMatrix<2>;
pub type CMatrix4 = CMatrix<4>;

impl<const N: usize> CVector<N> {
    pub fn zeros() -> Self {
        CVector([ZERO; N])
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: C64) -> Self {
        CVector(self.0.map(|a| a * k))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    /// Projector-like dyad `|self⟩⟨self|`.
    pub fn outer(&self) -> CMatrix<N> {
        let mut m = CMatrix::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Add for CVector<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        out
    }
}

impl<const N: usize> Sub for CVector<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        out.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        out
    }
}

impl CVector2 {
    /// Two-spin product state `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &CVector2) -> CVector4 {
        let (a, b) = (&self.0, &other.0);
        CVector([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }
}

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        CMatrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        CMatrix(self.0.map(|row| row.map(|a| a * k)))
    }

    pub fn matvec(&self, v: &CVector<N>) -> CVector<N> {
        let mut out = CVector::zeros();
        for i in 0..N {
            out.0[i] = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..N {
            for j in 0..N {
                acc += self.0[i][j] * other.0[j][i];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|a| a.is_finite())
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-ONE)
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] = (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

impl<const N: usize> Mul<CVector<N>> for CMatrix<N> {
    type Output = CVector<N>;
    fn mul(self, rhs: CVector<N>) -> CVector<N> {
        self.matvec(&rhs)
    }
}

/// Kronecker product `a ⊗ b`: entry `(2i + k, 2j + l)` is `a_ij · b_kl`.
pub fn kron(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    let mut m = CMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

pub fn identity2() -> CMatrix2 {
    CMatrix2::identity()
}

pub fn pauli_x() -> CMatrix2 {
    CMatrix([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> CMatrix2 {
    CMatrix([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> CMatrix2 {
    CMatrix([[ONE, ZERO], [ZERO, -ONE]])
}

/// `[σ_x, σ_y, σ_z]`.
pub fn pauli_vector() -> [CMatrix2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Spin operator along `n`: `n · σ`.
pub fn pauli_along(n: &UnitVec3) -> CMatrix2 {
    let (x, y, z) = (n.x(), n.y(), n.z());
    CMatrix([
        [C64::new(z, 0.0), C64::new(x, -y)],
        [C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// `⟨ψ|m|ψ⟩`.
pub fn expectation(state: &CVector4, m: &CMatrix4) -> C64 {
    state.inner(&m.matvec(state))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix4) -> [f64; 4] {
    let nm = Matrix4::from_fn(|i, j| (m.0[i][j] + m.0[j][i].conj()) * 0.5);
    let mut ev: [f64; 4] = nm
        .symmetric_eigenvalues()
        .as_slice()
        .try_into()
        .expect("4 eigenvalues");
    ev.sort_by(f64::total_cmp);
    ev
}
