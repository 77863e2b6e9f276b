mod common;

use common::{random_axis, random_unit, test_rng};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spincorr::bell::ChshSettings;
use spincorr::correlations::CorrelationTensor;
use spincorr::ensembles::AxisDistribution;
use spincorr::events::{
    estimate_correlation, generate_events, local_outcome, sample_event, write_event_log, SourceModel, Station,
    EVENT_LOG_HEADER,
};
use spincorr::geometry::{Plane, UnitVec3};
use spincorr::states::QuantizationAxis;
use spincorr::Error;

const N: u64 = 1_000_000;

fn sphere() -> SourceModel {
    SourceModel::Disentangled(AxisDistribution::UniformSphere)
}

fn plane_z() -> SourceModel {
    SourceModel::Disentangled(AxisDistribution::UniformPlane { normal: UnitVec3::Z })
}

#[test]
fn published_curves_from_counts() {
    let a = UnitVec3::X;
    let b60 = Plane::Xy.direction_deg(60.0);
    let e = estimate_correlation(&SourceModel::Entangled, &a, &b60, N, 51).unwrap();
    assert!((e.e_hat + 0.5).abs() < 0.003, "{}", e.e_hat);
    let e = estimate_correlation(&sphere(), &a, &a, N, 52).unwrap();
    assert!((e.e_hat + 1.0 / 3.0).abs() < 0.003, "{}", e.e_hat);
    let e = estimate_correlation(&plane_z(), &a, &a, N, 53).unwrap();
    assert!((e.e_hat + 0.5).abs() < 0.003, "{}", e.e_hat);
    let e = estimate_correlation(&SourceModel::Entangled, &UnitVec3::Z, &UnitVec3::Z, N, 54).unwrap();
    assert!((e.e_hat + 1.0).abs() < 0.003, "{}", e.e_hat);
}

#[test]
fn joint_probabilities_of_the_singlet() {
    let t = CorrelationTensor::singlet();
    let z = UnitVec3::Z;
    assert_eq!(t.joint_probability(&z, &z, 1.0, 1.0), 0.0);
    assert_eq!(t.joint_probability(&z, &z, -1.0, -1.0), 0.0);
    assert_eq!(t.joint_probability(&z, &z, 1.0, -1.0), 0.5);
    assert_eq!(t.joint_probability(&z, &z, -1.0, 1.0), 0.5);
    for (r, s) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        assert_eq!(t.joint_probability(&z, &UnitVec3::X, r, s), 0.25);
    }
}

#[test]
fn fixed_axis_local_model_is_deterministic() {
    let model = SourceModel::Disentangled(AxisDistribution::Fixed(UnitVec3::Z));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let ev = sample_event(&model, &UnitVec3::Z, &UnitVec3::Z, &mut rng).unwrap();
        assert_eq!((ev.r, ev.s), (1, -1));
    }
}

#[test]
fn marginals_are_fair() {
    let bound = 3.0 / (N as f64).sqrt();
    let a = UnitVec3::normalize([0.3, -0.2, 0.9]).unwrap();
    let b = UnitVec3::normalize([-0.5, 0.7, 0.1]).unwrap();
    for (k, model) in [SourceModel::Entangled, sphere(), plane_z()].iter().enumerate() {
        let e = estimate_correlation(model, &a, &b, N, 60 + k as u64).unwrap();
        assert!(e.mean_r.abs() < bound, "{} r {}", model.name(), e.mean_r);
        assert!(e.mean_s.abs() < bound, "{} s {}", model.name(), e.mean_s);
    }
}

#[test]
fn station_one_does_not_see_station_two_setting() {
    // Same seed, different far setting: the near outcomes are identical.
    let a = UnitVec3::normalize([0.2, 0.4, 0.8]).unwrap();
    let model = sphere();
    let first = generate_events(&model, &a, &UnitVec3::X, 10_000, 9).unwrap();
    let second = generate_events(&model, &a, &UnitVec3::Y.neg(), 10_000, 9).unwrap();
    assert!(first.iter().zip(&second).all(|(u, v)| u.r == v.r));
    assert!(first.iter().zip(&second).any(|(u, v)| u.s != v.s));

    // The station function takes only its own setting and the hidden axis.
    let station: fn(Station, &UnitVec3, &UnitVec3, &mut ChaCha8Rng) -> i8 = local_outcome;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(station(Station::First, &UnitVec3::Z, &UnitVec3::Z, &mut rng), 1);
    assert_eq!(station(Station::Second, &UnitVec3::Z, &UnitVec3::Z, &mut rng), -1);
}

#[test]
fn count_chsh_of_local_model_stays_classical() {
    let n = 100_000;
    let model = sphere();
    let mut rng = test_rng(61);
    let mut worst: f64 = f64::NEG_INFINITY;
    for k in 0..1000u64 {
        let s = ChshSettings {
            a: random_unit(&mut rng),
            a_prime: random_unit(&mut rng),
            b: random_unit(&mut rng),
            b_prime: random_unit(&mut rng),
        };
        let pairs = [(&s.a, &s.b, 1.0), (&s.a, &s.b_prime, -1.0), (&s.a_prime, &s.b, 1.0), (&s.a_prime, &s.b_prime, 1.0)];
        let mut value = 0.0;
        let mut var = 0.0;
        for (j, (x, y, sign)) in pairs.into_iter().enumerate() {
            let e = estimate_correlation(&model, x, y, n, 4 * k + j as u64).unwrap();
            value += sign * e.e_hat;
            var += e.std_error * e.std_error;
        }
        let margin = value.abs() - (2.0 + 5.0 * var.sqrt());
        worst = worst.max(margin);
    }
    assert!(worst <= 0.0, "excess {worst}");
}

#[test]
fn estimator_is_consistent_across_seeds() {
    let mut rng = test_rng(62);
    let settings: Vec<(UnitVec3, UnitVec3)> = (0..3).map(|_| (random_unit(&mut rng), random_unit(&mut rng))).collect();
    let models = [
        SourceModel::Entangled,
        sphere(),
        SourceModel::Mismatched { axis: random_axis(&mut rng), delta: 0.8 },
    ];
    for model in &models {
        for (a, b) in &settings {
            let target = model.analytic_correlation(a, b).unwrap();
            let hits = (0..100u64)
                .filter(|seed| {
                    let e = estimate_correlation(model, a, b, 10_000, *seed).unwrap();
                    (e.e_hat - target).abs() < 3.0 * e.std_error
                })
                .count();
            assert!(hits >= 99, "{} hits {hits}", model.name());
        }
    }
}

#[test]
fn event_log_matches_estimate() {
    let model = SourceModel::Mismatched { axis: QuantizationAxis::z(), delta: 0.5 };
    let (a, b) = (UnitVec3::X, Plane::Xy.direction_deg(30.0));
    let n = 70_000;
    let events = generate_events(&model, &a, &b, n, 3).unwrap();
    let est = estimate_correlation(&model, &a, &b, n, 3).unwrap();
    let nf = n as f64;
    let mean = |f: &dyn Fn(&spincorr::events::EventRecord) -> f64| events.iter().map(f).sum::<f64>() / nf;
    let (mr, ms, mrs) = (mean(&|e| e.r as f64), mean(&|e| e.s as f64), mean(&|e| (e.r * e.s) as f64));
    assert!((mrs - mr * ms - est.e_hat).abs() < 1e-12);

    let mut buf = Vec::new();
    write_event_log(&mut buf, &events[..2]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], EVENT_LOG_HEADER);
    assert_eq!(lines.len(), 3);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..6], &["1", "0", "0", "0.8660254037844386", "0.5", "0"]);
    assert!(matches!(fields[6], "1" | "-1") && matches!(fields[7], "1" | "-1"));
}

#[test]
fn zero_samples_rejected() {
    assert_eq!(
        estimate_correlation(&SourceModel::Entangled, &UnitVec3::Z, &UnitVec3::Z, 0, 1).unwrap_err(),
        Error::ZeroSamples
    );
}
