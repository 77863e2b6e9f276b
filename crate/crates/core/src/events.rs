//! Coincidence-event generation and count-based estimates of `E(a, b)`.
//!
//! Three sources are modelled:
//!
//! * **entangled**: ±1 outcome pairs drawn from the singlet's joint
//!   probabilities `P(r, s) = ¼(1 + rs a·t·b + r a·s1 + s b·s2)`;
//! * **disentangled**: a local hidden-variable source. Each pair carries its
//!   own quantization axis `P̂`; station 1 answers +1 with probability
//!   `(1 + a·P̂)/2` and station 2 with probability `(1 − b·P̂)/2`, each from
//!   its own setting only;
//! * **mismatched**: joint probabilities of the phase-mismatched singlet.
//!
//! Each event consumes random numbers in a fixed order (hidden axis, station 1,
//! station 2) from the chunked ChaCha8 streams described in [`crate::ensembles`].

use std::io::{self, Write};

use rand::{Rng, RngCore};

use crate::correlations::{correlate, correlation_tensor, CorrelationTensor};
use crate::ensembles::{run_chunks, AxisDistribution};
use crate::error::{Error, Result};
use crate::format::fmt_g17;
use crate::geometry::{bilinear, dot, DetectorSetting, UnitVec3};
use crate::states::{make_mismatched_singlet, PairState, QuantizationAxis};

/// Slack allowed on computed probabilities before they count as inconsistent.
pub const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum SourceModel {
    Entangled,
    Disentangled(AxisDistribution),
    Mismatched { axis: QuantizationAxis, delta: f64 },
}

impl SourceModel {
    pub fn name(&self) -> &'static str {
        match self {
            SourceModel::Entangled => "entangled",
            SourceModel::Disentangled(_) => "disentangled",
            SourceModel::Mismatched { .. } => "mismatched",
        }
    }

    /// Correlation tensor of the quantum sources, read off their density matrices.
    pub fn tensor(&self) -> Option<CorrelationTensor> {
        match self {
            SourceModel::Entangled => Some(correlation_tensor(&PairState::singlet().to_density())),
            SourceModel::Mismatched { axis, delta } => {
                Some(correlation_tensor(&make_mismatched_singlet(*axis, *delta).to_density()))
            }
            SourceModel::Disentangled(_) => None,
        }
    }

    /// Exact value of the count estimator's target
    /// `⟨rs⟩ − ⟨r⟩⟨s⟩` for this source.
    pub fn analytic_correlation(&self, a: &DetectorSetting, b: &DetectorSetting) -> Result<f64> {
        match self {
            SourceModel::Disentangled(dist) => {
                let (mean, moment) = dist.moments()?;
                let (a, b) = (a.as_array(), b.as_array());
                // ⟨rs⟩ = −a·⟨P̂P̂⟩·b, ⟨r⟩ = a·⟨P̂⟩, ⟨s⟩ = −b·⟨P̂⟩
                Ok(-bilinear(a, &moment, b) + dot(a, &mean) * dot(b, &mean))
            }
            quantum => Ok(correlate(&quantum.tensor().expect("quantum source"), a, b)),
        }
    }

    fn prepare(&self) -> PreparedSource<'_> {
        match self {
            SourceModel::Disentangled(dist) => PreparedSource::Local(dist),
            quantum => PreparedSource::Quantum(quantum.tensor().expect("quantum source")),
        }
    }
}

enum PreparedSource<'a> {
    Quantum(CorrelationTensor),
    Local(&'a AxisDistribution),
}

/// One coincidence: the two settings and the ±1 outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub a: DetectorSetting,
    pub b: DetectorSetting,
    pub r: i8,
    pub s: i8,
}

/// Which side of the source a detector sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Station {
    First,
    Second,
}

/// Outcome of one station in the local model. It sees only its own setting
/// and the pair's hidden axis.
pub fn local_outcome<R: RngCore + ?Sized>(
    station: Station,
    setting: &DetectorSetting,
    hidden: &UnitVec3,
    rng: &mut R,
) -> i8 {
    let bias = setting.dot(hidden);
    let p_plus = match station {
        Station::First => 0.5 * (1.0 + bias),
        Station::Second => 0.5 * (1.0 - bias),
    };
    if rng.random::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

/// `[P(+,+), P(+,−), P(−,+), P(−,−)]` for a quantum source, validated.
fn joint_distribution(t: &CorrelationTensor, a: &DetectorSetting, b: &DetectorSetting) -> Result<[f64; 4]> {
    let probs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .map(|(r, s)| t.joint_probability(a, b, r, s));
    for p in probs {
        if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
            return Err(Error::Probability(p));
        }
    }
    Ok(probs)
}

const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn draw_joint<R: RngCore + ?Sized>(probs: &[f64; 4], rng: &mut R) -> (i8, i8) {
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    for (p, outcome) in probs.iter().zip(OUTCOMES) {
        acc += p;
        if u < acc {
            return outcome;
        }
    }
    // u landed in round-off beyond the last cumulative sum
    OUTCOMES
        .iter()
        .zip(probs)
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map(|(o, _)| *o)
        .unwrap_or(OUTCOMES[3])
}

fn local_pair<R: RngCore + ?Sized>(
    dist: &AxisDistribution,
    a: &DetectorSetting,
    b: &DetectorSetting,
    rng: &mut R,
) -> (i8, i8) {
    let mut rng = rng;
    let hidden = dist.sample(&mut rng);
    let r = local_outcome(Station::First, a, &hidden, rng);
    let s = local_outcome(Station::Second, b, &hidden, rng);
    (r, s)
}

/// Draws one coincidence event.
pub fn sample_event<R: RngCore>(
    model: &SourceModel,
    a: &DetectorSetting,
    b: &DetectorSetting,
    rng: &mut R,
) -> Result<EventRecord> {
    let (r, s) = match model.prepare() {
        PreparedSource::Quantum(t) => draw_joint(&joint_distribution(&t, a, b)?, rng),
        PreparedSource::Local(dist) => local_pair(dist, a, b, rng),
    };
    Ok(EventRecord { a: *a, b: *b, r, s })
}

/// Feeds `n` outcome pairs for fixed settings into per-chunk sinks.
fn sample_chunked<T, F, G>(
    model: &SourceModel,
    a: &DetectorSetting,
    b: &DetectorSetting,
    n: u64,
    seed: u64,
    init: F,
    sink: G,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn() -> T + Sync,
    G: Fn(&mut T, i8, i8) + Sync,
{
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let source = model.prepare();
    let quantum_probs = match &source {
        PreparedSource::Quantum(t) => Some(joint_distribution(t, a, b)?),
        PreparedSource::Local(_) => None,
    };
    Ok(run_chunks(n, seed, |rng, len| {
        let mut acc = init();
        for _ in 0..len {
            let (r, s) = match (&source, &quantum_probs) {
                (_, Some(p)) => draw_joint(p, rng),
                (PreparedSource::Local(dist), None) => local_pair(dist, a, b, rng),
                (PreparedSource::Quantum(_), None) => unreachable!(),
            };
            sink(&mut acc, r, s);
        }
        acc
    }))
}

/// Count-based estimate of `E(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub e_hat: f64,
    pub n: u64,
    /// `sqrt((1 − e_hat²)/n)`.
    pub std_error: f64,
    pub seed: u64,
    pub mean_r: f64,
    pub mean_s: f64,
}

/// `e_hat = mean(rs) − mean(r)·mean(s)` over `n` events.
pub fn estimate_correlation(
    model: &SourceModel,
    a: &DetectorSetting,
    b: &DetectorSetting,
    n: u64,
    seed: u64,
) -> Result<CorrelationEstimate> {
    // counts of r = +1, s = +1 and rs = +1
    let partials = sample_chunked(model, a, b, n, seed, || [0u64; 3], |c, r, s| {
        c[0] += (r > 0) as u64;
        c[1] += (s > 0) as u64;
        c[2] += (r == s) as u64;
    })?;
    let counts = partials.iter().fold([0u64; 3], |acc, c| {
        [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]
    });
    let nf = n as f64;
    let mean = |plus: u64| (2.0 * plus as f64 - nf) / nf;
    let (mean_r, mean_s, mean_rs) = (mean(counts[0]), mean(counts[1]), mean(counts[2]));
    let e_hat = mean_rs - mean_r * mean_s;
    Ok(CorrelationEstimate {
        e_hat,
        n,
        std_error: ((1.0 - e_hat * e_hat).max(0.0) / nf).sqrt(),
        seed,
        mean_r,
        mean_s,
    })
}

/// The individual events behind [`estimate_correlation`] with the same seed.
pub fn generate_events(
    model: &SourceModel,
    a: &DetectorSetting,
    b: &DetectorSetting,
    n: u64,
    seed: u64,
) -> Result<Vec<EventRecord>> {
    let chunks = sample_chunked(model, a, b, n, seed, Vec::new, |v: &mut Vec<(i8, i8)>, r, s| {
        v.push((r, s))
    })?;
    Ok(chunks
        .into_iter()
        .flatten()
        .map(|(r, s)| EventRecord { a: *a, b: *b, r, s })
        .collect())
}

pub const EVENT_LOG_HEADER: &str = "ax,ay,az,bx,by,bz,r,s";

/// Writes `ax,ay,az,bx,by,bz,r,s` rows with a header line.
pub fn write_event_log<W: Write>(mut w: W, events: &[EventRecord]) -> io::Result<()> {
    writeln!(w, "{EVENT_LOG_HEADER}")?;
    for e in events {
        let (a, b) = (e.a.as_array(), e.b.as_array());
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_g17(a[0]),
            fmt_g17(a[1]),
            fmt_g17(a[2]),
            fmt_g17(b[0]),
            fmt_g17(b[1]),
            fmt_g17(b[2]),
            e.r,
            e.s
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::chunk_rng;

    #[test]
    fn singlet_joint_probabilities() {
        let t = SourceModel::Entangled.tensor().unwrap();
        let a = UnitVec3::from_spherical(0.4, 1.0);
        let p = joint_distribution(&t, &a, &a).unwrap();
        let expect = [0.0, 0.5, 0.5, 0.0];
        assert!(p.iter().zip(expect).all(|(x, y)| (x - y).abs() < 1e-12));
        let p = joint_distribution(&t, &UnitVec3::X, &UnitVec3::Z).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
    }

    #[test]
    fn fixed_axis_local_model_is_deterministic() {
        let model = SourceModel::Disentangled(AxisDistribution::Fixed(UnitVec3::Z));
        let mut rng = chunk_rng(5, 0);
        for _ in 0..200 {
            let e = sample_event(&model, &UnitVec3::Z, &UnitVec3::Z, &mut rng).unwrap();
            assert_eq!((e.r, e.s), (1, -1));
        }
    }

    #[test]
    fn station_outcomes_ignore_the_other_setting() {
        // identical streams, different far-side settings: station 1 replies identically
        let model = SourceModel::Disentangled(AxisDistribution::UniformSphere);
        let a = UnitVec3::from_spherical(1.0, 0.5);
        let b1 = UnitVec3::X;
        let b2 = UnitVec3::from_spherical(2.5, -2.0);
        let e1 = generate_events(&model, &a, &b1, 5000, 17).unwrap();
        let e2 = generate_events(&model, &a, &b2, 5000, 17).unwrap();
        assert!(e1.iter().zip(&e2).all(|(x, y)| x.r == y.r));
        assert!(e1.iter().zip(&e2).any(|(x, y)| x.s != y.s));
    }

    #[test]
    fn zero_events_rejected() {
        let r = estimate_correlation(&SourceModel::Entangled, &UnitVec3::X, &UnitVec3::X, 0, 1);
        assert_eq!(r, Err(Error::ZeroSamples));
    }

    #[test]
    fn log_matches_estimate() {
        let model = SourceModel::Entangled;
        let (a, b) = (UnitVec3::X, UnitVec3::from_spherical(1.0, 0.2));
        let events = generate_events(&model, &a, &b, 70_000, 3).unwrap();
        let est = estimate_correlation(&model, &a, &b, 70_000, 3).unwrap();
        let n = events.len() as f64;
        let mr = events.iter().map(|e| e.r as f64).sum::<f64>() / n;
        let ms = events.iter().map(|e| e.s as f64).sum::<f64>() / n;
        let mrs = events.iter().map(|e| (e.r * e.s) as f64).sum::<f64>() / n;
        assert!((est.e_hat - (mrs - mr * ms)).abs() < 1e-12);
    }

    #[test]
    fn event_log_format() {
        let events = [EventRecord {
            a: UnitVec3::Z,
            b: UnitVec3::from_spherical_deg(90.0, 60.0),
            r: 1,
            s: -1,
        }];
        let mut buf = Vec::new();
        write_event_log(&mut buf, &events).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "ax,ay,az,bx,by,bz,r,s\n0,0,1,0.5,0.8660254037844386,0,1,-1\n"
        );
    }

    #[test]
    fn analytic_targets() {
        let a = UnitVec3::from_spherical(0.3, 0.3);
        let e = SourceModel::Entangled.analytic_correlation(&a, &a).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
        let fixed = SourceModel::Disentangled(AxisDistribution::Fixed(UnitVec3::Z));
        assert_eq!(fixed.analytic_correlation(&UnitVec3::Z, &UnitVec3::Z).unwrap(), 0.0);
        let sphere = SourceModel::Disentangled(AxisDistribution::UniformSphere);
        let v = sphere.analytic_correlation(&a, &a).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-15);
    }
}
