//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::time::{Duration, Instant};

use common::{random_axis, random_unit, test_rng};
use rand::Rng;
use spincorr::bell::{chsh, maximize_chsh, ChshSettings, Classification, ScaledCosine};
use spincorr::correlations::{correlate, correlation_tensor, decompose, tensor_closed_form, CorrelationTensor};
use spincorr::ensembles::{average_analytic, average_monte_carlo, AxisDistribution};
use spincorr::events::{estimate_correlation, SourceModel};
use spincorr::format::fmt_g17;
use spincorr::geometry::{Mat3, Plane, UnitVec3};
use spincorr::states::{dephase, make_mismatched_singlet, make_pair_state, PairState, QuantizationAxis};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dot(a: &UnitVec3, b: &UnitVec3) -> f64 {
    let (a, b) = (a.as_array(), b.as_array());
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn quadratic(a: &UnitVec3, m: &Mat3, b: &UnitVec3) -> f64 {
    let (a, b) = (a.as_array(), b.as_array());
    (0..3).map(|i| (0..3).map(|j| a[i] * m[i][j] * b[j]).sum::<f64>()).sum()
}

fn singlet_correlation_law() -> Outcome {
    let start = Instant::now();
    let tensor = correlation_tensor(&PairState::singlet().to_density());
    let mut rng = test_rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
        worst = worst.max((correlate(&tensor, &a, &b) + dot(&a, &b)).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-12 && elapsed < Duration::from_secs(1),
        format!("max |E + a.b| = {worst:.2e} over 1e4 pairs in {elapsed:.2?}"),
    )
}

fn singlet_isotropy() -> Outcome {
    let mut rng = test_rng(102);
    let h = 0.5f64.sqrt();
    let reference = [0.0, h, -h, 0.0];
    let states: Vec<_> = (0..100)
        .map(|_| {
            let ax = random_axis(&mut rng);
            *make_pair_state(ax, ax).amplitudes()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for s in &states {
        let overlap: num_complex::Complex64 = s.0.iter().zip(reference).map(|(x, r)| x * r).sum();
        worst = worst.max((overlap.norm() - 1.0).abs());
    }
    for pair in states.windows(2) {
        worst = worst.max((pair[0].inner(&pair[1]).norm() - 1.0).abs());
    }
    outcome(worst < 1e-12, format!("max |1 - fidelity| = {worst:.2e} over 100 axes"))
}

fn disentangled_tensor() -> Outcome {
    let mut rng = test_rng(103);
    let singlet = PairState::singlet().to_density();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_unit(&mut rng);
        let t = correlation_tensor(&dephase(&singlet, QuantizationAxis::from_direction(&p))).t;
        let v = p.as_array();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((t[i][j] + v[i] * v[j]).abs());
            }
        }
    }
    outcome(worst < 1e-12, format!("max |t + PP| = {worst:.2e} over 100 axes"))
}

/// Monte Carlo ensemble check against `−k a·b` (k = 1/3 sphere, 1/2 plane).
/// Returns the outcome and the byte record used by the determinism check.
fn ensemble_average(dist: AxisDistribution, k: f64, in_plane: bool, seed: u64) -> (Outcome, String) {
    let start = Instant::now();
    let avg = average_monte_carlo(&dist, 1_000_000, seed).unwrap();
    let exact = average_analytic(&dist).unwrap();
    let mut rng = test_rng(seed);
    let (mut mc_worst, mut exact_worst): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let (a, b) = if in_plane {
            let (ta, tb) = (rng.random_range(0.0..360.0), rng.random_range(0.0..360.0));
            (Plane::Xy.direction_deg(ta), Plane::Xy.direction_deg(tb))
        } else {
            (random_unit(&mut rng), random_unit(&mut rng))
        };
        let target = -k * dot(&a, &b);
        mc_worst = mc_worst.max((quadratic(&a, &avg.correlation, &b) - target).abs());
        exact_worst = exact_worst.max((-quadratic(&a, &exact, &b) - target).abs());
    }
    let elapsed = start.elapsed();
    let record = avg
        .correlation
        .iter()
        .chain(avg.std_error.iter())
        .flatten()
        .map(|x| fmt_g17(*x))
        .collect::<Vec<_>>()
        .join(",");
    let pass = mc_worst < 0.003 && exact_worst <= 1e-15 && elapsed < Duration::from_secs(10);
    (
        outcome(
            pass,
            format!("Monte Carlo dev {mc_worst:.2e} (< 3e-3), analytic dev {exact_worst:.1e}, {elapsed:.2?}"),
        ),
        record,
    )
}

fn decomposition_identity() -> Outcome {
    let mut rng = test_rng(106);
    let (mut split, mut total): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let (a, b, ax) = (random_unit(&mut rng), random_unit(&mut rng), random_axis(&mut rng));
        let d = decompose(&a, &b, ax, 0.0);
        split = split.max((d.classical + d.quantum - d.total).abs());
        total = total.max((d.total + dot(&a, &b)).abs());
    }
    outcome(
        split < 1e-12 && total < 1e-12,
        format!("max |c + q - total| = {split:.2e}, max |total + cos| = {total:.2e}"),
    )
}

fn mismatch_tensor() -> Outcome {
    let mut worst: f64 = 0.0;
    for delta in [0.0, 0.01, -0.01, FRAC_PI_4, FRAC_PI_2, PI] {
        let t = correlation_tensor(&make_mismatched_singlet(QuantizationAxis::z(), delta).to_density());
        worst = worst.max(t.max_abs_diff(&tensor_closed_form(delta)));
    }
    let mut limit_ok = true;
    let mut limit_detail = Vec::new();
    for delta in [1e-2, 1e-3, 1e-4] {
        let t = correlation_tensor(&make_mismatched_singlet(QuantizationAxis::z(), delta).to_density());
        let dist = t.max_abs_diff(&CorrelationTensor::singlet());
        limit_ok &= dist <= 2.0 * delta;
        limit_detail.push(format!("{dist:.1e}@{delta:.0e}"));
    }
    outcome(
        worst < 1e-12 && limit_ok,
        format!("max |state - closed form| = {worst:.2e}; distance to -U {}", limit_detail.join(" ")),
    )
}

fn chsh_values() -> Outcome {
    let start = Instant::now();
    let singlet = maximize_chsh(&correlation_tensor(&PairState::singlet().to_density())).s_value.abs();
    let half = maximize_chsh(&ScaledCosine(0.5)).s_value.abs();
    let third = maximize_chsh(&ScaledCosine(1.0 / 3.0)).s_value.abs();
    let maxima_ok = (singlet - 2.0 * SQRT_2).abs() < 1e-9
        && (half - SQRT_2).abs() < 1e-9
        && (third - 2.0 * SQRT_2 / 3.0).abs() < 1e-9;

    let mut rng = test_rng(108);
    let neg = |m: Mat3| CorrelationTensor::from_correlations(m.map(|r| r.map(|x| -x)));
    let mut models = vec![
        neg(average_analytic(&AxisDistribution::UniformSphere).unwrap()),
        neg(average_analytic(&AxisDistribution::UniformPlane { normal: UnitVec3::Z }).unwrap()),
    ];
    for _ in 0..3 {
        let p = random_unit(&mut rng);
        let v = *p.as_array();
        models.push(neg(std::array::from_fn(|i| std::array::from_fn(|j| v[i] * v[j]))));
    }
    let mut sweep_worst: f64 = 0.0;
    let mut all_classical = true;
    for _ in 0..10_000 {
        let s = ChshSettings {
            a: random_unit(&mut rng),
            a_prime: random_unit(&mut rng),
            b: random_unit(&mut rng),
            b_prime: random_unit(&mut rng),
        };
        for m in &models {
            let r = chsh(m, &s);
            sweep_worst = sweep_worst.max(r.s_value.abs());
            all_classical &= r.classification == Classification::ClassicalCompatible;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        maxima_ok && all_classical && sweep_worst <= 2.0 + 1e-9 && elapsed < Duration::from_secs(60),
        format!(
            "max |S|: singlet {singlet:.12}, half {half:.12}, third {third:.12}; \
             disentangled sweep max {sweep_worst:.6} in {elapsed:.2?}"
        ),
    )
}

type Target = Box<dyn Fn(&UnitVec3, &UnitVec3) -> f64>;

/// The three sources with exact targets computed here from their tensors.
fn event_models() -> Vec<(SourceModel, Target)> {
    let delta = PI / 3.0;
    let (s, c) = delta.sin_cos();
    vec![
        (SourceModel::Entangled, Box::new(|a, b| -dot(a, b))),
        (
            SourceModel::Disentangled(AxisDistribution::UniformSphere),
            Box::new(|a, b| -dot(a, b) / 3.0),
        ),
        (
            SourceModel::Mismatched { axis: QuantizationAxis::z(), delta },
            Box::new(move |a, b| {
                let (a, b) = (a.as_array(), b.as_array());
                -c * (a[0] * b[0] + a[1] * b[1]) - a[2] * b[2] + s * (a[0] * b[1] - a[1] * b[0])
            }),
        ),
    ]
}

fn event_consistency() -> (Outcome, String) {
    let models = event_models();
    let mut rng = test_rng(109);
    let settings: Vec<(UnitVec3, UnitVec3)> = (0..5).map(|_| (random_unit(&mut rng), random_unit(&mut rng))).collect();
    let mut record = String::new();
    let mut worst_seed = 15;
    for seed in 1..=10u64 {
        let mut hits = 0;
        for (m, (model, target)) in models.iter().enumerate() {
            for (k, (a, b)) in settings.iter().enumerate() {
                let combo_seed = seed * 100 + (5 * m + k) as u64;
                let e = estimate_correlation(model, a, b, 1_000_000, combo_seed).unwrap();
                if (e.e_hat - target(a, b)).abs() < 3.0 * e.std_error {
                    hits += 1;
                }
                record.push_str(&format!("{},{},{}\n", fmt_g17(e.e_hat), fmt_g17(e.std_error), e.seed));
            }
        }
        worst_seed = worst_seed.min(hits);
    }
    (
        outcome(worst_seed >= 14, format!("fewest within 3 sigma in a seed: {worst_seed}/15 (need 14), 10 seeds")),
        record,
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "singlet correlation law", singlet_correlation_law()));
    results.push((2, "singlet isotropy", singlet_isotropy()));
    results.push((3, "disentangled tensor", disentangled_tensor()));
    let (sphere, sphere_bytes) = ensemble_average(AxisDistribution::UniformSphere, 1.0 / 3.0, false, 104);
    results.push((4, "sphere ensemble average", sphere));
    let plane = AxisDistribution::UniformPlane { normal: UnitVec3::Z };
    results.push((5, "planar ensemble average", ensemble_average(plane, 0.5, true, 105).0));
    results.push((6, "decomposition identity", decomposition_identity()));
    results.push((7, "phase-mismatch tensor", mismatch_tensor()));
    results.push((8, "CHSH values", chsh_values()));
    let (events, event_bytes) = event_consistency();
    results.push((9, "event-count consistency", events));

    let repeat = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| {
        let sphere = ensemble_average(AxisDistribution::UniformSphere, 1.0 / 3.0, false, 104).1;
        (sphere, event_consistency().1)
    });
    let same = repeat.0 == sphere_bytes && repeat.1 == event_bytes;
    results.push((
        10,
        "determinism",
        outcome(
            same,
            format!("criteria 4 and 9 rerun on 3 threads: {} bytes identical = {same}", sphere_bytes.len() + event_bytes.len()),
        ),
    ));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("{tag} criterion {n:>2} {name}: {}", o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
