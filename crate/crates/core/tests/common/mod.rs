#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use spincorr::geometry::{Mat3, UnitVec3};
use spincorr::linalg::{CMatrix2, C64};
use spincorr::states::QuantizationAxis;

pub fn test_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform direction by rejection from the cube, independent of the library sampler.
pub fn random_unit<R: Rng>(rng: &mut R) -> UnitVec3 {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return UnitVec3::normalize(v).unwrap();
        }
    }
}

pub fn random_axis<R: Rng>(rng: &mut R) -> QuantizationAxis {
    QuantizationAxis::from_direction(&random_unit(rng))
}

/// Rotation matrix from a random unit quaternion.
pub fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    let q = loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            break q.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn unit_vec() -> impl Strategy<Value = UnitVec3> {
    (-1.0f64..=1.0, 0.0..std::f64::consts::TAU).prop_map(|(c, phi)| {
        let s = (1.0 - c * c).max(0.0).sqrt();
        UnitVec3::normalize([s * phi.cos(), s * phi.sin(), c]).unwrap()
    })
}

pub fn axis() -> impl Strategy<Value = QuantizationAxis> {
    unit_vec().prop_map(|v| QuantizationAxis::from_direction(&v))
}

pub fn cmatrix2() -> impl Strategy<Value = CMatrix2> {
    proptest::array::uniform8(-2.0f64..2.0).prop_map(|v| {
        let mut m = CMatrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let k = 2 * (2 * i + j);
                m.0[i][j] = C64::new(v[k], v[k + 1]);
            }
        }
        m
    })
}
