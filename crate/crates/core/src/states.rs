//! Spin-½ states along arbitrary quantization axes, two-spin pair states,
//! density operators and the dephasing (disentangling) channel.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::geometry::UnitVec3;
use crate::linalg::{self, CMatrix2, CMatrix4, CVector, CVector2, CVector4, C64, EQ_TOL};

/// Eigenvalue floor used when checking a density matrix for positivity.
pub const POSITIVITY_FLOOR: f64 = -1e-10;

/// Polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)` of a quantization axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationAxis {
    theta: f64,
    phi: f64,
}

impl QuantizationAxis {
    /// Rejects a polar angle outside `[0, π]`; the azimuth is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("quantization axis"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::PolarAngle(theta));
        }
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(QuantizationAxis { theta, phi })
    }

    pub fn z() -> Self {
        QuantizationAxis { theta: 0.0, phi: 0.0 }
    }

    pub fn from_direction(n: &UnitVec3) -> Self {
        let theta = n.z().clamp(-1.0, 1.0).acos();
        let phi = n.y().atan2(n.x());
        QuantizationAxis::new(theta, phi).expect("angles from a unit vector are valid")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `P̂ = (sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn direction(&self) -> UnitVec3 {
        UnitVec3::from_spherical(self.theta, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Eigenstate of `P̂·σ` with eigenvalue `sign`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    amplitudes: CVector2,
    axis: QuantizationAxis,
    sign: Sign,
}

impl SpinState {
    pub fn amplitudes(&self) -> &CVector2 {
        &self.amplitudes
    }

    pub fn axis(&self) -> QuantizationAxis {
        self.axis
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }
}

/// `|+⟩ = (cos θ/2, sin θ/2 e^{iφ})`, `|−⟩ = (−sin θ/2 e^{−iφ}, cos θ/2)`.
pub fn make_spin_state(axis: QuantizationAxis, sign: Sign) -> SpinState {
    let (s, c) = (axis.theta / 2.0).sin_cos();
    let phase = C64::from_polar(1.0, axis.phi);
    let amplitudes = match sign {
        Sign::Plus => CVector([C64::new(c, 0.0), phase * s]),
        Sign::Minus => CVector([-phase.conj() * s, C64::new(c, 0.0)]),
    };
    SpinState {
        amplitudes,
        axis,
        sign,
    }
}

/// How a [`PairState`] was built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairOrigin {
    /// Antisymmetric combination with each spin quantized on its own axis.
    Axes {
        spin1: QuantizationAxis,
        spin2: QuantizationAxis,
    },
    /// Singlet on `axis` with the two spins rotated by `±delta/2` about it.
    MismatchedSinglet { axis: QuantizationAxis, delta: f64 },
    /// Shared polar angle, azimuths split as `phi ± delta/2`.
    SplitAzimuth { theta: f64, phi: f64, delta: f64 },
    Amplitudes,
}

/// Normalized two-spin state in the `|++⟩, |+−⟩, |−+⟩, |−−⟩` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState {
    amplitudes: CVector4,
    origin: PairOrigin,
}

impl PairState {
    /// Wraps raw amplitudes, rejecting non-finite or non-normalized input.
    pub fn from_amplitudes(amplitudes: CVector4) -> Result<Self> {
        if !amplitudes.is_finite() {
            return Err(Error::NonFinite("pair amplitudes"));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > EQ_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(PairState {
            amplitudes,
            origin: PairOrigin::Amplitudes,
        })
    }

    /// `(|+−⟩ − |−+⟩)/√2` in the z basis.
    pub fn singlet() -> Self {
        make_pair_state(QuantizationAxis::z(), QuantizationAxis::z())
    }

    pub fn amplitudes(&self) -> &CVector4 {
        &self.amplitudes
    }

    pub fn origin(&self) -> PairOrigin {
        self.origin
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &PairState) -> f64 {
        self.amplitudes.inner(&other.amplitudes).norm()
    }

    pub fn to_density(&self) -> DensityMatrix {
        to_density(self)
    }
}

/// `(|+⟩₁|−⟩₂ − |−⟩₁|+⟩₂)/√2` with each spin quantized along its own axis.
pub fn make_pair_state(axis1: QuantizationAxis, axis2: QuantizationAxis) -> PairState {
    let up1 = make_spin_state(axis1, Sign::Plus).amplitudes;
    let dn1 = make_spin_state(axis1, Sign::Minus).amplitudes;
    let up2 = make_spin_state(axis2, Sign::Plus).amplitudes;
    let dn2 = make_spin_state(axis2, Sign::Minus).amplitudes;
    let v = (up1.kron(&dn2) - dn1.kron(&up2)).scale(C64::new(FRAC_1_SQRT_2, 0.0));
    PairState {
        amplitudes: v,
        origin: PairOrigin::Axes {
            spin1: axis1,
            spin2: axis2,
        },
    }
}

/// `exp(−i angle n·σ / 2)`: rotation of a spin by `angle` about `n`.
fn spin_rotation(n: &UnitVec3, angle: f64) -> CMatrix2 {
    let (s, c) = (angle / 2.0).sin_cos();
    CMatrix2::identity().scale(C64::new(c, 0.0)) - linalg::pauli_along(n).scale(C64::new(0.0, s))
}

/// Singlet quantized along `axis` with spin 1 rotated by `+delta/2` and spin 2
/// by `−delta/2` about that axis. For the z axis this is
/// `(0, e^{−iδ/2}, −e^{iδ/2}, 0)/√2`.
pub fn make_mismatched_singlet(axis: QuantizationAxis, delta: f64) -> PairState {
    let n = axis.direction();
    let u = linalg::kron(&spin_rotation(&n, delta / 2.0), &spin_rotation(&n, -delta / 2.0));
    let singlet = make_pair_state(axis, axis);
    PairState {
        amplitudes: u.matvec(&singlet.amplitudes),
        origin: PairOrigin::MismatchedSinglet { axis, delta },
    }
}

/// Pair state with a shared polar angle and azimuths `phi + delta/2` (spin 1)
/// and `phi − delta/2` (spin 2), expanded literally in the product basis.
///
/// Differs from [`make_mismatched_singlet`] away from the pole at second order in `delta`.
pub fn make_split_azimuth_pair(theta: f64, phi: f64, delta: f64) -> PairState {
    let (s, c) = (theta / 2.0).sin_cos();
    let (phi1, phi2) = (phi + delta / 2.0, phi - delta / 2.0);
    let e = |x: f64| C64::from_polar(1.0, x);
    let k = C64::new(FRAC_1_SQRT_2, 0.0);
    let v = CVector([
        (e(-phi1) - e(-phi2)) * (c * s),
        e(-(phi1 - phi2)) * (s * s) + c * c,
        -(e(phi1 - phi2) * (s * s) + c * c),
        (e(phi1) - e(phi2)) * (c * s),
    ])
    .scale(k);
    PairState {
        amplitudes: v,
        origin: PairOrigin::SplitAzimuth { theta, phi, delta },
    }
}

/// Hermitian, unit-trace, positive 4×4 operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMatrix4);

impl DensityMatrix {
    /// Validates Hermiticity and unit trace (1e-12) and positivity (eigenvalues
    /// above [`POSITIVITY_FLOOR`]); stores the exactly Hermitian part.
    pub fn new(m: CMatrix4) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let defect = m.hermiticity_defect();
        if defect > EQ_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > EQ_TOL {
            return Err(Error::Trace(tr.re));
        }
        let min_ev = linalg::hermitian_eigenvalues(&m)[0];
        if min_ev < POSITIVITY_FLOOR {
            return Err(Error::NotPositive(min_ev));
        }
        Ok(DensityMatrix(hermitian_part(&m)))
    }

    /// Convex combination of already-valid density matrices.
    pub fn mixture<'a>(items: impl IntoIterator<Item = (f64, &'a DensityMatrix)>) -> Result<Self> {
        let mut acc = CMatrix4::zeros();
        for (w, rho) in items {
            if w.is_nan() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("mixture weight {w}")));
            }
            acc = acc + rho.0.scale(C64::new(w, 0.0));
        }
        DensityMatrix::new(acc)
    }

    pub(crate) fn from_trusted(m: CMatrix4) -> Self {
        DensityMatrix(hermitian_part(&m))
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.0
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian_eigenvalues(&self.0)
    }

    /// `Tr(ρ m)`.
    pub fn expect(&self, m: &CMatrix4) -> C64 {
        self.0.trace_product(m)
    }
}

fn hermitian_part(m: &CMatrix4) -> CMatrix4 {
    (*m + m.adjoint()).scale(C64::new(0.5, 0.0))
}

/// `|ψ⟩⟨ψ|`. Normalization is guaranteed by [`PairState`].
pub fn to_density(state: &PairState) -> DensityMatrix {
    DensityMatrix::from_trusted(state.amplitudes.outer())
}

/// Product eigenbasis of `(P̂·σ) ⊗ (P̂·σ)` ordered `|++⟩, |+−⟩, |−+⟩, |−−⟩`.
pub fn product_basis(axis: QuantizationAxis) -> [CVector4; 4] {
    let up = make_spin_state(axis, Sign::Plus).amplitudes;
    let dn = make_spin_state(axis, Sign::Minus).amplitudes;
    [up.kron(&up), up.kron(&dn), dn.kron(&up), dn.kron(&dn)]
}

/// Removes every coherence between the product eigenstates of the two spins
/// along `axis`, keeping only the populations.
pub fn dephase(rho: &DensityMatrix, axis: QuantizationAxis) -> DensityMatrix {
    let mut out = CMatrix4::zeros();
    for k in product_basis(axis) {
        let population = linalg::expectation(&k, &rho.0).re;
        out = out + k.outer().scale(C64::new(population, 0.0));
    }
    DensityMatrix::from_trusted(out)
}
