//! Real 3-vectors, unit directions and 3×3 tensors.
//!
//! Detector directions and quantization axes are both [`UnitVec3`]. Tensors are
//! plain row-major `[[f64; 3]; 3]` arrays so they print and compare trivially.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Tolerance on |n| - 1 for a vector to count as a unit direction.
pub const UNIT_TOL: f64 = 1e-12;

/// A direction in space, |n| = 1 within [`UNIT_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3(Vec3);

/// Detector (analyzer) direction `a` or `b`.
pub type DetectorSetting = UnitVec3;

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3([1.0, 0.0, 0.0]);
    pub const Y: UnitVec3 = UnitVec3([0.0, 1.0, 0.0]);
    pub const Z: UnitVec3 = UnitVec3([0.0, 0.0, 1.0]);

    /// Accepts `v` only if it is finite and already unit length.
    pub fn new(v: Vec3) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("direction vector"));
        }
        let n = norm(&v);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(UnitVec3(v))
    }

    /// Rescales any finite nonzero vector to unit length.
    pub fn normalize(v: Vec3) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("direction vector"));
        }
        let n = norm(&v);
        if n == 0.0 {
            return Err(Error::NotUnit(0.0));
        }
        Ok(UnitVec3([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        UnitVec3([st * cp, st * sp, ct])
    }

    /// Same as [`from_spherical`](Self::from_spherical) with angles in degrees,
    /// exact at multiples of 30° and 45°.
    pub fn from_spherical_deg(theta: f64, phi: f64) -> Self {
        let (st, ct) = sincos_deg(theta);
        let (sp, cp) = sincos_deg(phi);
        UnitVec3([st * cp, st * sp, ct])
    }

    pub fn as_array(&self) -> &Vec3 {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn neg(&self) -> UnitVec3 {
        UnitVec3([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Applies an orthogonal matrix; the result is renormalized to absorb round-off.
    pub fn rotate(&self, r: &Mat3) -> UnitVec3 {
        let v = mat_vec(r, &self.0);
        let n = norm(&v);
        UnitVec3([v[0] / n, v[1] / n, v[2] / n])
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(v: &Vec3) -> f64 {
    dot(v, v).sqrt()
}

/// Dyadic product `a b` with entries `a_i b_j`.
pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i] * b[j];
        }
    }
    m
}

pub fn identity3() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// `a · m · b`.
pub fn bilinear(a: &Vec3, m: &Mat3, b: &Vec3) -> f64 {
    dot(a, &mat_vec(m, b))
}

pub fn mat3_scale(m: &Mat3, k: f64) -> Mat3 {
    let mut r = *m;
    r.iter_mut().flatten().for_each(|x| *x *= k);
    r
}

pub fn mat3_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = *a;
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] += b[i][j];
        }
    }
    r
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

pub fn transpose3(m: &Mat3) -> Mat3 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = m[j][i];
        }
    }
    r
}

pub fn max_abs_diff3(a: &Mat3, b: &Mat3) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Levi-Civita symbol ε_ijk over indices 0..3.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Right-handed rotation by `angle` about `axis` (Rodrigues form).
pub fn rotation_about(axis: &UnitVec3, angle: f64) -> Mat3 {
    let n = axis.as_array();
    let (s, c) = angle.sin_cos();
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let cross_term: f64 = (0..3).map(|k| -levi_civita(i, j, k) * n[k]).sum();
            r[i][j] = c * if i == j { 1.0 } else { 0.0 } + (1.0 - c) * n[i] * n[j] + s * cross_term;
        }
    }
    r
}

/// Orthonormal right-handed frame `(e1, e2, e3)` with `e3` along a chosen axis.
///
/// `e1` lies in the meridian plane spanned by the axis and the global x̂, or ŷ
/// when the axis is parallel to x̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
}

impl Frame {
    pub fn about(axis: &UnitVec3) -> Frame {
        let e3 = *axis.as_array();
        let project_out = |r: Vec3| {
            let k = dot(&r, &e3);
            [r[0] - k * e3[0], r[1] - k * e3[1], r[2] - k * e3[2]]
        };
        let mut e1 = project_out([1.0, 0.0, 0.0]);
        if norm(&e1) < 1e-8 {
            e1 = project_out([0.0, 1.0, 0.0]);
        }
        let n1 = norm(&e1);
        let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
        let e2 = cross(&e3, &e1);
        Frame { e1, e2, e3 }
    }

    /// Polar and azimuthal angles `(θ, φ)` of `v` in this frame, `φ ∈ (-π, π]`.
    pub fn spherical(&self, v: &UnitVec3) -> (f64, f64) {
        let v = v.as_array();
        let cos_theta = dot(v, &self.e3).clamp(-1.0, 1.0);
        let phi = dot(v, &self.e2).atan2(dot(v, &self.e1));
        (cos_theta.acos(), phi)
    }

    /// `(cos θ, sin θ, φ)` of `v` computed from its frame components, without
    /// going through `acos`.
    pub fn polar_parts(&self, v: &UnitVec3) -> (f64, f64, f64) {
        let v = v.as_array();
        let (x, y, z) = (dot(v, &self.e1), dot(v, &self.e2), dot(v, &self.e3));
        (z, x.hypot(y), y.atan2(x))
    }

    /// Unit vector at azimuth `phi` in the plane orthogonal to `e3`.
    pub fn equatorial(&self, phi: f64) -> UnitVec3 {
        let (sp, cp) = phi.sin_cos();
        let v = [0, 1, 2].map(|i| cp * self.e1[i] + sp * self.e2[i]);
        UnitVec3::normalize(v).expect("frame vectors are finite")
    }

    /// Inverse of [`spherical`](Self::spherical).
    pub fn direction(&self, theta: f64, phi: f64) -> UnitVec3 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let v = [0, 1, 2].map(|i| st * cp * self.e1[i] + st * sp * self.e2[i] + ct * self.e3[i]);
        UnitVec3::normalize(v).expect("frame vectors are finite")
    }
}

/// A coordinate plane, with the angle measured from its first axis toward its second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    Xy,
    Yz,
    Zx,
}

impl Plane {
    pub const ALL: [Plane; 3] = [Plane::Xy, Plane::Yz, Plane::Zx];

    /// First axis, second axis, normal.
    pub fn axes(&self) -> (UnitVec3, UnitVec3, UnitVec3) {
        match self {
            Plane::Xy => (UnitVec3::X, UnitVec3::Y, UnitVec3::Z),
            Plane::Yz => (UnitVec3::Y, UnitVec3::Z, UnitVec3::X),
            Plane::Zx => (UnitVec3::Z, UnitVec3::X, UnitVec3::Y),
        }
    }

    pub fn normal(&self) -> UnitVec3 {
        self.axes().2
    }

    /// In-plane direction at `deg` degrees from the first axis.
    pub fn direction_deg(&self, deg: f64) -> UnitVec3 {
        let (u, v, _) = self.axes();
        let (s, c) = sincos_deg(deg);
        let (u, v) = (u.as_array(), v.as_array());
        UnitVec3([0, 1, 2].map(|i| c * u[i] + s * v[i]))
    }
}

impl std::str::FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xy" | "yx" => Ok(Plane::Xy),
            "yz" | "zy" => Ok(Plane::Yz),
            "zx" | "xz" => Ok(Plane::Zx),
            other => Err(Error::InvalidArgument(format!("unknown plane '{other}'"))),
        }
    }
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 30° and 45°.
pub fn sincos_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    let quadrant = (r / 90.0).floor();
    let rem = r - 90.0 * quadrant;
    let (s, c) = if rem == 0.0 {
        (0.0, 1.0)
    } else if rem == 30.0 {
        (0.5, 0.75f64.sqrt())
    } else if rem == 45.0 {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else if rem == 60.0 {
        (0.75f64.sqrt(), 0.5)
    } else {
        (rem * PI / 180.0).sin_cos()
    };
    match quadrant as u8 {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}
