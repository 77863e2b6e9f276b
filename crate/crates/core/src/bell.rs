//! CHSH combinations of correlation functions and a deterministic maximizer.
//!
//! `S = E(a, b) − E(a, b′) + E(a′, b) + E(a′, b′)`. Local models satisfy
//! `|S| ≤ 2`; quantum states reach at most `2√2`.

use std::fmt;

use rayon::prelude::*;

use crate::correlations::{correlate, CorrelationTensor};
use crate::ensembles::EnsembleAverage;
use crate::geometry::{DetectorSetting, Frame, Plane, UnitVec3};

pub const CLASSICAL_BOUND: f64 = 2.0;

/// Margin above [`CLASSICAL_BOUND`] required to call a value a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Smallest step of the local refinement, in radians.
pub const REFINE_RESOLUTION: f64 = 1e-6;

/// A correlation function `E(a, b)` over detector directions.
pub trait Correlator: Sync {
    fn correlation(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64;
}

impl Correlator for CorrelationTensor {
    fn correlation(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
        correlate(self, a, b)
    }
}

impl Correlator for EnsembleAverage {
    fn correlation(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
        self.correlate(a, b)
    }
}

impl<F> Correlator for F
where
    F: Fn(&DetectorSetting, &DetectorSetting) -> f64 + Sync,
{
    fn correlation(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
        self(a, b)
    }
}

/// `E(a, b) = −k a·b`: the singlet for `k = 1`, the plane- and sphere-averaged
/// disentangled ensembles for `k = ½` and `k = ⅓`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledCosine(pub f64);

impl Correlator for ScaledCosine {
    fn correlation(&self, a: &DetectorSetting, b: &DetectorSetting) -> f64 {
        -self.0 * a.dot(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: DetectorSetting,
    pub a_prime: DetectorSetting,
    pub b: DetectorSetting,
    pub b_prime: DetectorSetting,
}

impl ChshSettings {
    /// Four directions in `plane` at the given angles (degrees).
    pub fn in_plane_deg(plane: Plane, a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        ChshSettings {
            a: plane.direction_deg(a),
            a_prime: plane.direction_deg(a_prime),
            b: plane.direction_deg(b),
            b_prime: plane.direction_deg(b_prime),
        }
    }

    /// `a = 0°, a′ = 90°, b = 45°, b′ = 135°` in the xy plane.
    pub fn canonical() -> Self {
        ChshSettings::in_plane_deg(Plane::Xy, 0.0, 90.0, 45.0, 135.0)
    }

    pub fn as_array(&self) -> [DetectorSetting; 4] {
        [self.a, self.a_prime, self.b, self.b_prime]
    }

    fn from_array(v: [DetectorSetting; 4]) -> Self {
        ChshSettings {
            a: v[0],
            a_prime: v[1],
            b: v[2],
            b_prime: v[3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    ClassicalCompatible,
    QuantumViolating,
}

impl Classification {
    pub fn of(s_value: f64) -> Self {
        if s_value.abs() > CLASSICAL_BOUND + VIOLATION_TOL {
            Classification::QuantumViolating
        } else {
            Classification::ClassicalCompatible
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::ClassicalCompatible => "classical-compatible",
            Classification::QuantumViolating => "quantum-violating",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub s_value: f64,
    pub settings: ChshSettings,
    pub classification: Classification,
}

fn chsh_value<C: Correlator + ?Sized>(e: &C, s: &[DetectorSetting; 4]) -> f64 {
    let [a, a2, b, b2] = s;
    e.correlation(a, b) - e.correlation(a, b2) + e.correlation(a2, b) + e.correlation(a2, b2)
}

pub fn chsh<C: Correlator + ?Sized>(correlator: &C, settings: &ChshSettings) -> ChshResult {
    let s_value = chsh_value(correlator, &settings.as_array());
    ChshResult {
        s_value,
        settings: *settings,
        classification: Classification::of(s_value),
    }
}

const GRID_STEPS: usize = 360;

/// Best tetrad on the 1° grid of one plane, as `(|S|, S, (a, a′, b, b′) indices)`.
type GridBest = (f64, f64, [usize; 4]);

fn better(candidate: &GridBest, best: &GridBest) -> bool {
    candidate.0 > best.0 || (candidate.0 == best.0 && candidate.2 < best.2)
}

fn grid_search_plane<C: Correlator + ?Sized>(e: &C, plane: Plane) -> GridBest {
    let dirs: Vec<UnitVec3> = (0..GRID_STEPS).map(|i| plane.direction_deg(i as f64)).collect();
    let table: Vec<Vec<f64>> = dirs
        .iter()
        .map(|a| dirs.iter().map(|b| e.correlation(a, b)).collect())
        .collect();

    // For fixed (b, b′) the a and a′ terms separate, so each is optimized alone.
    let per_b: Vec<GridBest> = (0..GRID_STEPS)
        .into_par_iter()
        .map(|j| {
            let mut best: GridBest = (f64::NEG_INFINITY, 0.0, [0; 4]);
            for j2 in 0..GRID_STEPS {
                let (mut dmax, mut dmin, mut pmax, mut pmin) = (
                    (f64::NEG_INFINITY, 0),
                    (f64::INFINITY, 0),
                    (f64::NEG_INFINITY, 0),
                    (f64::INFINITY, 0),
                );
                for (i, row) in table.iter().enumerate() {
                    let d = row[j] - row[j2];
                    let p = row[j] + row[j2];
                    if d > dmax.0 {
                        dmax = (d, i);
                    }
                    if d < dmin.0 {
                        dmin = (d, i);
                    }
                    if p > pmax.0 {
                        pmax = (p, i);
                    }
                    if p < pmin.0 {
                        pmin = (p, i);
                    }
                }
                let hi = dmax.0 + pmax.0;
                let lo = dmin.0 + pmin.0;
                let mut cands = [
                    (hi.abs(), hi, [dmax.1, pmax.1, j, j2]),
                    (lo.abs(), lo, [dmin.1, pmin.1, j, j2]),
                ];
                cands.sort_by_key(|x| x.2);
                for c in cands {
                    if better(&c, &best) {
                        best = c;
                    }
                }
            }
            best
        })
        .collect();

    per_b
        .into_iter()
        .fold((f64::NEG_INFINITY, 0.0, [0; 4]), |best, c| if better(&c, &best) { c } else { best })
}

/// Compass search on the four directions, each moved along its two tangent
/// directions, halving the step until it drops below [`REFINE_RESOLUTION`].
fn refine<C: Correlator + ?Sized>(e: &C, start: [DetectorSetting; 4]) -> [DetectorSetting; 4] {
    let mut current = start;
    let mut value = chsh_value(e, &current).abs();
    let mut step = 0.5f64.to_radians();
    while step >= REFINE_RESOLUTION {
        let mut improved = false;
        for k in 0..4 {
            let frame = Frame::about(&current[k]);
            for tangent in [frame.e1, frame.e2] {
                for sign in [1.0, -1.0] {
                    let (s, c) = (sign * step).sin_cos();
                    let v = current[k].as_array();
                    let moved = [0, 1, 2].map(|i| c * v[i] + s * tangent[i]);
                    let Ok(moved) = UnitVec3::normalize(moved) else {
                        continue;
                    };
                    let mut trial = current;
                    trial[k] = moved;
                    let t = chsh_value(e, &trial).abs();
                    if t > value {
                        value = t;
                        current = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    current
}

/// Grid search over coplanar tetrads at 1° in each coordinate plane, then
/// local refinement of the best tetrad in the full space of four directions.
///
/// Deterministic: ties on the grid go to the lexicographically smallest
/// `(plane, a, a′, b, b′)` index tuple, independent of thread count.
pub fn maximize_chsh<C: Correlator + ?Sized>(correlator: &C) -> ChshResult {
    let mut best: Option<(GridBest, Plane)> = None;
    for plane in Plane::ALL {
        let g = grid_search_plane(correlator, plane);
        if best.as_ref().is_none_or(|(b, _)| g.0 > b.0) {
            best = Some((g, plane));
        }
    }
    let (grid, plane) = best.expect("at least one plane");
    let start = grid.2.map(|i| plane.direction_deg(i as f64));
    let refined = refine(correlator, start);
    let settings = if chsh_value(correlator, &refined).abs() >= grid.0 {
        ChshSettings::from_array(refined)
    } else {
        ChshSettings::from_array(start)
    };
    chsh(correlator, &settings)
}
