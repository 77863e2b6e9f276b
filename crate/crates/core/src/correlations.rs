//! Spin expectation vectors, the two-spin correlation tensor and the
//! correlation function `E(a, b)`.
//!
//! For a density operator ρ the tensor holds `t_ij = Tr(ρ σ_i ⊗ σ_j)` and the
//! single-spin vectors `s1_i = Tr(ρ σ_i ⊗ 1)`, `s2_j = Tr(ρ 1 ⊗ σ_j)`. The
//! correlation function subtracts the product of the single-spin terms:
//!
//! ```text
//! E(a, b) = a·t·b − (a·s1)(s2·b)
//! ```

use crate::geometry::{
    self, bilinear, dot, levi_civita, outer, DetectorSetting, Frame, Mat3, UnitVec3, Vec3,
};
use crate::linalg::{self, identity2, kron, pauli_vector, CMatrix4, EQ_TOL};
use crate::states::{DensityMatrix, QuantizationAxis};

/// `⟨σ¹σ²⟩` together with `⟨σ¹⟩` and `⟨σ²⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor {
    pub t: Mat3,
    pub s1: Vec3,
    pub s2: Vec3,
}

impl CorrelationTensor {
    /// Tensor with vanishing single-spin expectations.
    pub fn from_correlations(t: Mat3) -> Self {
        CorrelationTensor {
            t,
            s1: [0.0; 3],
            s2: [0.0; 3],
        }
    }

    /// The singlet tensor `−U`.
    pub fn singlet() -> Self {
        CorrelationTensor::from_correlations(geometry::mat3_scale(&geometry::identity3(), -1.0))
    }

    pub fn correlate(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
        correlate(self, a, b)
    }

    /// Outcome probability `P(r, s)` for ±1 outcomes along `a` and `b`.
    pub fn joint_probability(&self, a: &DetectorSetting, b: &DetectorSetting, r: f64, s: f64) -> f64 {
        let (a, b) = (a.as_array(), b.as_array());
        0.25 * (1.0 + r * s * bilinear(a, &self.t, b) + r * dot(a, &self.s1) + s * dot(b, &self.s2))
    }

    pub fn max_abs_diff(&self, other: &CorrelationTensor) -> f64 {
        let dv = |x: &Vec3, y: &Vec3| (0..3).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max);
        geometry::max_abs_diff3(&self.t, &other.t)
            .max(dv(&self.s1, &other.s1))
            .max(dv(&self.s2, &other.s2))
    }
}

/// Reads `t`, `s1` and `s2` off a density operator.
pub fn correlation_tensor(rho: &DensityMatrix) -> CorrelationTensor {
    let sigma = pauli_vector();
    let id = identity2();
    let real = |m: &CMatrix4| {
        let v = rho.expect(m);
        debug_assert!(v.im.abs() < EQ_TOL, "imaginary residue {}", v.im);
        v.re
    };
    let mut out = CorrelationTensor::from_correlations([[0.0; 3]; 3]);
    for i in 0..3 {
        out.s1[i] = real(&kron(&sigma[i], &id));
        out.s2[i] = real(&kron(&id, &sigma[i]));
        for j in 0..3 {
            out.t[i][j] = real(&kron(&sigma[i], &sigma[j]));
        }
    }
    out
}

/// Largest imaginary part among the traces that make up [`correlation_tensor`].
pub fn imaginary_residue(rho: &DensityMatrix) -> f64 {
    let sigma = pauli_vector();
    let id = identity2();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        worst = worst.max(rho.expect(&kron(&sigma[i], &id)).im.abs());
        worst = worst.max(rho.expect(&kron(&id, &sigma[i])).im.abs());
        for j in 0..3 {
            worst = worst.max(rho.expect(&kron(&sigma[i], &sigma[j])).im.abs());
        }
    }
    worst
}

/// `E(a, b) = a·t·b − (a·s1)(s2·b)`.
pub fn correlate(tensor: &CorrelationTensor, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
    let (a, b) = (a.as_array(), b.as_array());
    bilinear(a, &tensor.t, b) - dot(a, &tensor.s1) * dot(&tensor.s2, b)
}

/// Split of `E(a, b)` into the term fixed by the polar angles alone and the
/// term carrying the relative azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationDecomposition {
    pub total: f64,
    pub classical: f64,
    pub quantum: f64,
}

/// Expresses `a` and `b` in spherical coordinates about `axis` and returns
///
/// ```text
/// classical = −cos θa cos θb
/// quantum   = −sin θa sin θb cos(φb − φa + δ)
/// ```
///
/// Azimuths are measured from the meridian through the global x̂ (see [`Frame`]).
pub fn decompose(
    a: &DetectorSetting,
    b: &DetectorSetting,
    axis: QuantizationAxis,
    delta: f64,
) -> CorrelationDecomposition {
    let frame = Frame::about(&axis.direction());
    let (cos_a, sin_a, phi_a) = frame.polar_parts(a);
    let (cos_b, sin_b, phi_b) = frame.polar_parts(b);
    let classical = -cos_a * cos_b;
    let quantum = -sin_a * sin_b * (phi_b - phi_a + delta).cos();
    CorrelationDecomposition {
        total: classical + quantum,
        classical,
        quantum,
    }
}

/// Closed-form tensor of the z-axis phase-mismatched singlet:
/// `−ẑẑ − (U − ẑẑ) cos δ + ε·ẑ sin δ`, whose antisymmetric part is
/// `(x̂ŷ − ŷx̂) sin δ`.
pub fn tensor_closed_form(delta: f64) -> CorrelationTensor {
    let z = [0.0, 0.0, 1.0];
    let zz = outer(&z, &z);
    let (s, c) = delta.sin_cos();
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let u = if i == j { 1.0 } else { 0.0 };
            let eps_z: f64 = (0..3).map(|k| levi_civita(i, j, k) * z[k]).sum();
            t[i][j] = -zz[i][j] - (u - zz[i][j]) * c + eps_z * s;
        }
    }
    CorrelationTensor::from_correlations(t)
}

/// Closed-form tensor of the phase-mismatched singlet about an arbitrary axis:
/// minus the rotation by `delta` about that axis.
pub fn tensor_closed_form_about(axis: QuantizationAxis, delta: f64) -> CorrelationTensor {
    let r = geometry::rotation_about(&axis.direction(), delta);
    CorrelationTensor::from_correlations(geometry::mat3_scale(&r, -1.0))
}

/// Expected `P̂·σ` on one spin, for checks that do not go through the tensor.
pub fn spin_expectation(rho: &DensityMatrix, n: &UnitVec3, station: usize) -> f64 {
    let m = match station {
        1 => kron(&linalg::pauli_along(n), &identity2()),
        _ => kron(&identity2(), &linalg::pauli_along(n)),
    };
    rho.expect(&m).re
}
