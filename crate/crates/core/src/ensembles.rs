//! Averages of disentangled-pair correlations over distributions of
//! quantization axes.
//!
//! A dephased singlet quantized along `P̂` has correlation tensor `−P̂P̂`, so the
//! ensemble correlation is `−a·⟨P̂P̂⟩·b`. The uniform sphere gives
//! `⟨P̂P̂⟩ = U/3`; a uniform circle in the plane normal to `n` gives
//! `(U − nn)/2`, which reduces to `½ cos θ_ab` only for in-plane detectors.
//!
//! # Random streams
//!
//! Monte Carlo work is cut into chunks of [`CHUNK_SIZE`] samples. Chunk `k` draws
//! from ChaCha8 seeded with the 64-bit master seed via `seed_from_u64` and
//! switched to stream `k` with `set_stream`. Chunk partial sums are combined in
//! chunk order, so results do not depend on how many threads run the chunks.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlations::CorrelationDecomposition;
use crate::error::{Error, Result};
use crate::geometry::{
    bilinear, identity3, mat3_add, mat3_scale, outer, DetectorSetting, Frame, Mat3, UnitVec3, Vec3,
};
use crate::linalg::{CMatrix4, C64};
use crate::states::{dephase, DensityMatrix, PairState, QuantizationAxis};

/// Samples per random stream.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// Name of the generator and stream layout, for recording alongside seeds.
pub const RNG_ALGORITHM: &str = "chacha8-stream-per-chunk";

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `work(rng, len)` once per chunk covering `n` samples and returns the
/// per-chunk results in chunk order.
pub(crate) fn run_chunks<T, F>(n: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK_SIZE.min(n - k * CHUNK_SIZE);
            work(&mut chunk_rng(seed, k), len)
        })
        .collect()
}

/// User-supplied axis sampler.
pub type AxisSampler = Arc<dyn Fn(&mut dyn RngCore) -> UnitVec3 + Send + Sync>;

/// Distribution of quantization axes over an ensemble of pairs.
#[derive(Clone)]
pub enum AxisDistribution {
    UniformSphere,
    UniformPlane { normal: UnitVec3 },
    Fixed(UnitVec3),
    Custom(AxisSampler),
}

impl fmt::Debug for AxisDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisDistribution::UniformSphere => f.write_str("UniformSphere"),
            AxisDistribution::UniformPlane { normal } => {
                f.debug_struct("UniformPlane").field("normal", normal).finish()
            }
            AxisDistribution::Fixed(p) => f.debug_tuple("Fixed").field(p).finish(),
            AxisDistribution::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl AxisDistribution {
    pub fn name(&self) -> &'static str {
        match self {
            AxisDistribution::UniformSphere => "sphere",
            AxisDistribution::UniformPlane { .. } => "plane",
            AxisDistribution::Fixed(_) => "fixed",
            AxisDistribution::Custom(_) => "custom",
        }
    }

    /// Draws one axis. The sphere uses `cos θ ~ U(−1, 1)`, `φ ~ U(0, 2π)`; the
    /// plane uses `φ ~ U(0, 2π)` in the frame about its normal.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> UnitVec3 {
        match self {
            AxisDistribution::UniformSphere => {
                let cos_theta = 2.0 * rng.random::<f64>() - 1.0;
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
                let (sp, cp) = phi.sin_cos();
                UnitVec3::normalize([sin_theta * cp, sin_theta * sp, cos_theta])
                    .expect("sphere sample is finite and nonzero")
            }
            AxisDistribution::UniformPlane { normal } => {
                let frame = Frame::about(normal);
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                frame.equatorial(phi)
            }
            AxisDistribution::Fixed(p) => *p,
            AxisDistribution::Custom(f) => f(rng),
        }
    }

    /// Exact `(⟨P̂⟩, ⟨P̂P̂⟩)` where known, including the degenerate fixed axis.
    pub(crate) fn moments(&self) -> Result<(Vec3, Mat3)> {
        match self {
            AxisDistribution::UniformSphere => Ok(([0.0; 3], mat3_scale(&identity3(), 1.0 / 3.0))),
            AxisDistribution::UniformPlane { normal } => {
                let n = normal.as_array();
                let m = mat3_add(&identity3(), &mat3_scale(&outer(n, n), -1.0));
                Ok(([0.0; 3], mat3_scale(&m, 0.5)))
            }
            AxisDistribution::Fixed(p) => Ok((*p.as_array(), outer(p.as_array(), p.as_array()))),
            AxisDistribution::Custom(_) => Err(Error::NoAnalyticAverage("custom")),
        }
    }
}

/// Exact second moment `⟨P̂P̂⟩` of the sphere or plane distribution.
pub fn average_analytic(dist: &AxisDistribution) -> Result<Mat3> {
    match dist {
        AxisDistribution::UniformSphere | AxisDistribution::UniformPlane { .. } => {
            dist.moments().map(|(_, m)| m)
        }
        other => Err(Error::NoAnalyticAverage(other.name())),
    }
}

/// Disentangled ensemble correlation `−a·⟨P̂P̂⟩·b`.
pub fn disentangled_correlation(moment: &Mat3, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
    -bilinear(a.as_array(), moment, b.as_array())
}

/// Splits the singlet correlation `−a·b` into the part that survives
/// disentanglement over `dist` (classical) and the remainder (quantum).
pub fn ensemble_split(dist: &AxisDistribution, a: &DetectorSetting, b: &DetectorSetting) -> Result<CorrelationDecomposition> {
    let classical = disentangled_correlation(&average_analytic(dist)?, a, b);
    let total = -a.dot(b);
    Ok(CorrelationDecomposition {
        total,
        classical,
        quantum: total - classical,
    })
}

/// Monte Carlo estimate of the ensemble correlation tensor `⟨−P̂P̂⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleAverage {
    /// Sample mean of `−P̂P̂`.
    pub correlation: Mat3,
    /// Per-entry sample standard deviation over `√n`.
    pub std_error: Mat3,
    /// Sample mean of `P̂`.
    pub mean_axis: Vec3,
    pub n_samples: u64,
    pub seed: u64,
}

impl EnsembleAverage {
    pub fn correlate(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
        bilinear(a.as_array(), &self.correlation, b.as_array())
    }
}

/// Running means and squared deviations (Welford), merged pairwise in chunk order.
#[derive(Clone, Copy)]
struct Moments {
    count: u64,
    mean: Mat3,
    m2: Mat3,
    axis: Vec3,
}

impl Moments {
    fn zero() -> Self {
        Moments {
            count: 0,
            mean: [[0.0; 3]; 3],
            m2: [[0.0; 3]; 3],
            axis: [0.0; 3],
        }
    }

    fn push(&mut self, p: &Vec3) {
        self.count += 1;
        let w = 1.0 / self.count as f64;
        for i in 0..3 {
            self.axis[i] += (p[i] - self.axis[i]) * w;
            for j in 0..3 {
                let x = -p[i] * p[j];
                let d = x - self.mean[i][j];
                self.mean[i][j] += d * w;
                self.m2[i][j] += d * (x - self.mean[i][j]);
            }
        }
    }

    fn merge(self, other: &Moments) -> Self {
        if self.count == 0 {
            return *other;
        }
        let n = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let w = nb / n as f64;
        let mut out = Moments { count: n, ..self };
        for i in 0..3 {
            out.axis[i] += (other.axis[i] - self.axis[i]) * w;
            for j in 0..3 {
                let d = other.mean[i][j] - self.mean[i][j];
                out.mean[i][j] += d * w;
                out.m2[i][j] += other.m2[i][j] + d * d * na * w;
            }
        }
        out
    }
}

pub fn average_monte_carlo(dist: &AxisDistribution, n: u64, seed: u64) -> Result<EnsembleAverage> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let partials = run_chunks(n, seed, |rng, len| {
        let mut acc = Moments::zero();
        for _ in 0..len {
            acc.push(dist.sample(rng).as_array());
        }
        acc
    });
    let total = partials.iter().fold(Moments::zero(), Moments::merge);

    let nf = n as f64;
    let mut std_error = [[0.0; 3]; 3];
    if n > 1 {
        for i in 0..3 {
            for j in 0..3 {
                std_error[i][j] = (total.m2[i][j].max(0.0) / (nf - 1.0) / nf).sqrt();
            }
        }
    }
    Ok(EnsembleAverage {
        correlation: total.mean,
        std_error,
        mean_axis: total.axis,
        n_samples: n,
        seed,
    })
}

/// Mean over sampled axes of the singlet dephased along each axis.
pub fn averaged_density(dist: &AxisDistribution, n: u64, seed: u64) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let singlet = PairState::singlet().to_density();
    let partials = run_chunks(n, seed, |rng, len| {
        let mut acc = CMatrix4::zeros();
        for _ in 0..len {
            let axis = QuantizationAxis::from_direction(&dist.sample(rng));
            acc = acc + *dephase(&singlet, axis).matrix();
        }
        acc
    });
    let sum = partials.into_iter().fold(CMatrix4::zeros(), |a, b| a + b);
    DensityMatrix::new(sum.scale(C64::new(1.0 / n as f64, 0.0)))
}
