//! C ABI over `spincorr`.
//!
//! Every function returns a [`SpincorrStatus`]; results go through out
//! pointers. On failure the message is available from
//! [`spincorr_last_error_message`] on the same thread. Density matrices are
//! opaque handles released with [`spincorr_density_free`]. Angles are in
//! radians and vectors are `double[3]` of unit length.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spincorr::bell::{self, ChshSettings, Classification};
use spincorr::correlations::{self, CorrelationTensor};
use spincorr::ensembles::{self, AxisDistribution};
use spincorr::events::{self, SourceModel};
use spincorr::geometry::UnitVec3;
use spincorr::linalg::{CMatrix4, C64};
use spincorr::states::{self, DensityMatrix, QuantizationAxis};
use spincorr::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpincorrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotUnitVector = 3,
    NonFinite = 4,
    InvalidState = 5,
    ZeroSamples = 6,
    NoAnalyticAverage = 7,
    Consistency = 8,
    Panic = 9,
}

/// Opaque two-spin density matrix.
pub struct SpincorrDensity {
    inner: DensityMatrix,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpincorrDistributionKind {
    Sphere = 0,
    Plane = 1,
    Fixed = 2,
}

/// Axis distribution; `axis` is the plane normal or the fixed axis and is
/// ignored for the sphere.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpincorrDistribution {
    pub kind: SpincorrDistributionKind,
    pub axis: [f64; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpincorrModelKind {
    Entangled = 0,
    Mismatched = 1,
    Disentangled = 2,
}

/// Source of simulated events. `theta`, `phi` and `delta` apply to the
/// mismatched source, `distribution` to the disentangled one.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpincorrModel {
    pub kind: SpincorrModelKind,
    pub theta: f64,
    pub phi: f64,
    pub delta: f64,
    pub distribution: SpincorrDistribution,
}

/// Row-major `t[3*i + j]` plus single-spin vectors.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpincorrTensor {
    pub t: [f64; 9],
    pub s1: [f64; 3],
    pub s2: [f64; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpincorrDecomposition {
    pub total: f64,
    pub classical: f64,
    pub quantum: f64,
}

/// Tetrad `a, a', b, b'` and its CHSH value. `violating` is 1 when
/// `|s_value|` exceeds the classical bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpincorrChsh {
    pub a: [f64; 3],
    pub a_prime: [f64; 3],
    pub b: [f64; 3],
    pub b_prime: [f64; 3],
    pub s_value: f64,
    pub violating: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpincorrEstimate {
    pub e_hat: f64,
    pub std_error: f64,
    pub mean_r: f64,
    pub mean_s: f64,
    pub n: u64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpincorrEnsemble {
    pub correlation: [f64; 9],
    pub std_error: [f64; 9],
    pub mean_axis: [f64; 3],
    pub n: u64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SpincorrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotUnit(_) => SpincorrStatus::NotUnitVector,
            Error::NonFinite(_) => SpincorrStatus::NonFinite,
            Error::NotNormalized(_) | Error::NotHermitian(_) | Error::Trace(_) | Error::NotPositive(_) => {
                SpincorrStatus::InvalidState
            }
            Error::ZeroSamples => SpincorrStatus::ZeroSamples,
            Error::NoAnalyticAverage(_) => SpincorrStatus::NoAnalyticAverage,
            Error::Probability(_) => SpincorrStatus::Consistency,
            Error::PolarAngle(_) | Error::InvalidArgument(_) => SpincorrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SpincorrStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpincorrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SpincorrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&msg);
            SpincorrStatus::Panic
        }
    }
}

unsafe fn read_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_unit(p: *const f64, what: &str) -> Result<UnitVec3, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let v = [*p, *p.add(1), *p.add(2)];
    Ok(UnitVec3::new(v)?)
}

fn unit(v: [f64; 3]) -> Result<UnitVec3, Failure> {
    Ok(UnitVec3::new(v)?)
}

unsafe fn density<'a>(p: *const SpincorrDensity) -> Result<&'a DensityMatrix, Failure> {
    Ok(&read_ref(p, "density handle")?.inner)
}

unsafe fn emit_density(out: *mut *mut SpincorrDensity, rho: DensityMatrix) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(SpincorrDensity { inner: rho }));
    Ok(())
}

fn distribution(d: &SpincorrDistribution) -> Result<AxisDistribution, Failure> {
    Ok(match d.kind {
        SpincorrDistributionKind::Sphere => AxisDistribution::UniformSphere,
        SpincorrDistributionKind::Plane => AxisDistribution::UniformPlane {
            normal: unit(d.axis)?,
        },
        SpincorrDistributionKind::Fixed => AxisDistribution::Fixed(unit(d.axis)?),
    })
}

fn tensor_from_c(t: &SpincorrTensor) -> CorrelationTensor {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row.copy_from_slice(&t.t[3 * i..3 * i + 3]);
    }
    CorrelationTensor {
        t: m,
        s1: t.s1,
        s2: t.s2,
    }
}

fn flatten(m: &[[f64; 3]; 3]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for i in 0..3 {
        out[3 * i..3 * i + 3].copy_from_slice(&m[i]);
    }
    out
}

fn chsh_to_c(r: &bell::ChshResult) -> SpincorrChsh {
    SpincorrChsh {
        a: *r.settings.a.as_array(),
        a_prime: *r.settings.a_prime.as_array(),
        b: *r.settings.b.as_array(),
        b_prime: *r.settings.b_prime.as_array(),
        s_value: r.s_value,
        violating: (r.classification == Classification::QuantumViolating) as i32,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spincorr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn spincorr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn spincorr_density_singlet(out: *mut *mut SpincorrDensity) -> SpincorrStatus {
    guard(|| emit_density(out, states::PairState::singlet().to_density()))
}

/// `(|+⟩₁|−⟩₂ − |−⟩₁|+⟩₂)/√2` with spin 1 quantized along `(theta1, phi1)`
/// and spin 2 along `(theta2, phi2)`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_pair(
    theta1: f64,
    phi1: f64,
    theta2: f64,
    phi2: f64,
    out: *mut *mut SpincorrDensity,
) -> SpincorrStatus {
    guard(|| {
        let s = states::make_pair_state(QuantizationAxis::new(theta1, phi1)?, QuantizationAxis::new(theta2, phi2)?);
        emit_density(out, s.to_density())
    })
}

/// Singlet about `(theta, phi)` with relative phase `delta` between the spins.
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_mismatched(
    theta: f64,
    phi: f64,
    delta: f64,
    out: *mut *mut SpincorrDensity,
) -> SpincorrStatus {
    guard(|| {
        if !delta.is_finite() {
            return Err(Error::NonFinite("delta").into());
        }
        let s = states::make_mismatched_singlet(QuantizationAxis::new(theta, phi)?, delta);
        emit_density(out, s.to_density())
    })
}

/// Validated density matrix from row-major real and imaginary parts (16 each).
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_from_entries(
    re: *const f64,
    im: *const f64,
    out: *mut *mut SpincorrDensity,
) -> SpincorrStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("entries"));
        }
        let mut m = CMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = C64::new(*re.add(4 * i + j), *im.add(4 * i + j));
            }
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix").into());
        }
        emit_density(out, DensityMatrix::new(m)?)
    })
}

/// Removes coherences in the product basis quantized along `(theta, phi)`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_dephase(
    rho: *const SpincorrDensity,
    theta: f64,
    phi: f64,
    out: *mut *mut SpincorrDensity,
) -> SpincorrStatus {
    guard(|| {
        let r = states::dephase(density(rho)?, QuantizationAxis::new(theta, phi)?);
        emit_density(out, r)
    })
}

/// Monte Carlo mixture of dephased singlets over `n` sampled axes.
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_averaged(
    dist: *const SpincorrDistribution,
    n: u64,
    seed: u64,
    out: *mut *mut SpincorrDensity,
) -> SpincorrStatus {
    guard(|| {
        let d = distribution(read_ref(dist, "distribution")?)?;
        emit_density(out, ensembles::averaged_density(&d, n, seed)?)
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_free(rho: *mut SpincorrDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Copies the matrix into row-major `re[16]` and `im[16]`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_density_entries(
    rho: *const SpincorrDensity,
    re: *mut f64,
    im: *mut f64,
) -> SpincorrStatus {
    guard(|| {
        let m = density(rho)?.matrix();
        if re.is_null() || im.is_null() {
            return Err(null("output entries"));
        }
        for i in 0..4 {
            for j in 0..4 {
                *re.add(4 * i + j) = m.0[i][j].re;
                *im.add(4 * i + j) = m.0[i][j].im;
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn spincorr_density_tensor(
    rho: *const SpincorrDensity,
    out: *mut SpincorrTensor,
) -> SpincorrStatus {
    guard(|| {
        let ct = correlations::correlation_tensor(density(rho)?);
        write_out(
            out,
            SpincorrTensor {
                t: flatten(&ct.t),
                s1: ct.s1,
                s2: ct.s2,
            },
            "output tensor",
        )
    })
}

/// `E(a, b) = a·t·b − (a·s1)(s2·b)`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_correlate(
    tensor: *const SpincorrTensor,
    a: *const f64,
    b: *const f64,
    out: *mut f64,
) -> SpincorrStatus {
    guard(|| {
        let t = tensor_from_c(read_ref(tensor, "tensor")?);
        let (a, b) = (read_unit(a, "a")?, read_unit(b, "b")?);
        write_out(out, correlations::correlate(&t, &a, &b), "output")
    })
}

/// Classical and quantum parts of `E(a, b)` for the pair quantized along
/// `(theta, phi)` with phase mismatch `delta`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_decompose(
    a: *const f64,
    b: *const f64,
    theta: f64,
    phi: f64,
    delta: f64,
    out: *mut SpincorrDecomposition,
) -> SpincorrStatus {
    guard(|| {
        let (a, b) = (read_unit(a, "a")?, read_unit(b, "b")?);
        let d = correlations::decompose(&a, &b, QuantizationAxis::new(theta, phi)?, delta);
        write_out(
            out,
            SpincorrDecomposition {
                total: d.total,
                classical: d.classical,
                quantum: d.quantum,
            },
            "output",
        )
    })
}

/// CHSH value of `tensor` at `settings` = `a, a', b, b'` (12 doubles).
#[no_mangle]
pub unsafe extern "C" fn spincorr_chsh(
    tensor: *const SpincorrTensor,
    settings: *const f64,
    out: *mut SpincorrChsh,
) -> SpincorrStatus {
    guard(|| {
        let t = tensor_from_c(read_ref(tensor, "tensor")?);
        if settings.is_null() {
            return Err(null("settings"));
        }
        let s = ChshSettings {
            a: read_unit(settings, "a")?,
            a_prime: read_unit(settings.add(3), "a'")?,
            b: read_unit(settings.add(6), "b")?,
            b_prime: read_unit(settings.add(9), "b'")?,
        };
        write_out(out, chsh_to_c(&bell::chsh(&t, &s)), "output")
    })
}

/// Tetrad maximizing `|S|` for `tensor`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_maximize_chsh(
    tensor: *const SpincorrTensor,
    out: *mut SpincorrChsh,
) -> SpincorrStatus {
    guard(|| {
        let t = tensor_from_c(read_ref(tensor, "tensor")?);
        write_out(out, chsh_to_c(&bell::maximize_chsh(&t)), "output")
    })
}

/// Count-based estimate `mean(rs) − mean(r)·mean(s)` over `n` simulated events.
#[no_mangle]
pub unsafe extern "C" fn spincorr_estimate_correlation(
    model: *const SpincorrModel,
    a: *const f64,
    b: *const f64,
    n: u64,
    seed: u64,
    out: *mut SpincorrEstimate,
) -> SpincorrStatus {
    guard(|| {
        let m = read_ref(model, "model")?;
        let source = match m.kind {
            SpincorrModelKind::Entangled => SourceModel::Entangled,
            SpincorrModelKind::Mismatched => {
                if !m.delta.is_finite() {
                    return Err(Error::NonFinite("delta").into());
                }
                SourceModel::Mismatched {
                    axis: QuantizationAxis::new(m.theta, m.phi)?,
                    delta: m.delta,
                }
            }
            SpincorrModelKind::Disentangled => SourceModel::Disentangled(distribution(&m.distribution)?),
        };
        let (a, b) = (read_unit(a, "a")?, read_unit(b, "b")?);
        let e = events::estimate_correlation(&source, &a, &b, n, seed)?;
        write_out(
            out,
            SpincorrEstimate {
                e_hat: e.e_hat,
                std_error: e.std_error,
                mean_r: e.mean_r,
                mean_s: e.mean_s,
                n: e.n,
                seed: e.seed,
            },
            "output",
        )
    })
}

/// Monte Carlo average of `−P̂P̂` over `n` axes drawn from `dist`.
#[no_mangle]
pub unsafe extern "C" fn spincorr_ensemble_average(
    dist: *const SpincorrDistribution,
    n: u64,
    seed: u64,
    out: *mut SpincorrEnsemble,
) -> SpincorrStatus {
    guard(|| {
        let d = distribution(read_ref(dist, "distribution")?)?;
        let avg = ensembles::average_monte_carlo(&d, n, seed)?;
        write_out(
            out,
            SpincorrEnsemble {
                correlation: flatten(&avg.correlation),
                std_error: flatten(&avg.std_error),
                mean_axis: avg.mean_axis,
                n: avg.n_samples,
                seed: avg.seed,
            },
            "output",
        )
    })
}

/// Exact `−⟨P̂P̂⟩` for the sphere and plane distributions.
#[no_mangle]
pub unsafe extern "C" fn spincorr_ensemble_analytic(
    dist: *const SpincorrDistribution,
    out: *mut f64,
) -> SpincorrStatus {
    guard(|| {
        let d = distribution(read_ref(dist, "distribution")?)?;
        let m = ensembles::average_analytic(&d)?;
        if out.is_null() {
            return Err(null("output"));
        }
        for (k, x) in flatten(&m).iter().enumerate() {
            *out.add(k) = -x;
        }
        Ok(())
    })
}
