//! Geometry primitives shared by the scene model and the runtime.
//!
//! All arithmetic is `f64`. Scene field values are stored in these types
//! directly; the binary codec decides per value list whether 32 bits are
//! enough to hold them exactly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("rotation axis has zero length")]
    ZeroAxis,
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("color component {0} outside [0, 1]")]
    ColorRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const ONE: Vec3 = Vec3::new(1.0, 1.0, 1.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).length()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Component-wise product.
    pub fn mul_elem(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        Vec3::new(
            self.x + (o.x - self.x) * t,
            self.y + (o.y - self.y) * t,
            self.z + (o.z - self.z) * t,
        )
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Axis-angle rotation with a unit axis. Serializes as `[x, y, z, angle]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rotation {
    axis: Vec3,
    angle: f64,
}

impl Default for Rotation {
    fn default() -> Self {
        Rotation::IDENTITY
    }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { axis: Vec3::Z, angle: 0.0 };

    /// Builds a rotation, normalizing the axis.
    ///
    /// An axis already within 1e-12 of unit length is kept bit-for-bit, so
    /// that re-normalizing a stored rotation is a no-op.
    pub fn new(axis: Vec3, angle: f64) -> Result<Self, GeometryError> {
        if !axis.is_finite() || !angle.is_finite() {
            return Err(GeometryError::NonFinite("rotation"));
        }
        let len = axis.length();
        if len == 0.0 {
            return Err(GeometryError::ZeroAxis);
        }
        let axis = if (len - 1.0).abs() <= 1e-12 { axis } else { axis.scale(1.0 / len) };
        Ok(Rotation { axis, angle })
    }

    /// Builds a rotation from an axis that must already be unit length
    /// (within 1e-9). The axis is stored unchanged.
    pub fn from_unit_axis(axis: Vec3, angle: f64) -> Result<Self, GeometryError> {
        if !axis.is_finite() || !angle.is_finite() {
            return Err(GeometryError::NonFinite("rotation"));
        }
        let len = axis.length();
        if len == 0.0 {
            return Err(GeometryError::ZeroAxis);
        }
        if (len - 1.0).abs() > 1e-9 {
            return Rotation::new(axis, angle);
        }
        Ok(Rotation { axis, angle })
    }

    pub fn about_y(angle: f64) -> Self {
        Rotation { axis: Vec3::Y, angle }
    }

    pub fn about_z(angle: f64) -> Self {
        Rotation { axis: Vec3::Z, angle }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn to_quat(self) -> Quat {
        Quat::from_axis_angle(self.axis, self.angle)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.axis.x, self.axis.y, self.axis.z, self.angle]
    }
}

impl TryFrom<[f64; 4]> for Rotation {
    type Error = GeometryError;

    fn try_from(a: [f64; 4]) -> Result<Self, Self::Error> {
        Rotation::new(Vec3::new(a[0], a[1], a[2]), a[3])
    }
}

impl From<Rotation> for [f64; 4] {
    fn from(r: Rotation) -> Self {
        r.to_array()
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} rad", self.axis, self.angle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ColorRGB {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl ColorRGB {
    pub const BLACK: ColorRGB = ColorRGB { r: 0.0, g: 0.0, b: 0.0 };
    pub const WHITE: ColorRGB = ColorRGB { r: 1.0, g: 1.0, b: 1.0 };

    pub fn new(r: f64, g: f64, b: f64) -> Result<Self, GeometryError> {
        let c = ColorRGB { r, g, b };
        for v in [r, g, b] {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite("color"));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(GeometryError::ColorRange(v));
            }
        }
        Ok(c)
    }

    /// Constructor for compile-time known colors.
    pub const fn rgb(r: f64, g: f64, b: f64) -> Self {
        ColorRGB { r, g, b }
    }

    pub fn in_range(&self) -> bool {
        [self.r, self.g, self.b].iter().all(|v| (0.0..=1.0).contains(v))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }
}

/// Unit quaternion `w + xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        let (s, c) = (angle * 0.5).sin_cos();
        Quat { w: c, x: axis.x * s, y: axis.y * s, z: axis.z * s }
    }

    pub fn dot(self, o: Quat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn conjugate(self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn normalize(self) -> Quat {
        let n = self.norm();
        Quat { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v).scale(2.0);
        v + t.scale(self.w) + u.cross(t)
    }

    /// Converts back to axis-angle with the angle in `[0, π]`.
    ///
    /// A rotation indistinguishable from identity keeps `fallback_axis` so
    /// that interpolating about a fixed axis stays on that axis.
    pub fn to_rotation(self, fallback_axis: Vec3) -> Rotation {
        let q = if self.w < 0.0 { -self } else { self };
        let v = Vec3::new(q.x, q.y, q.z);
        let s = v.length();
        if s < 1e-300 {
            return Rotation::new(fallback_axis, 0.0).unwrap_or(Rotation::IDENTITY);
        }
        let angle = 2.0 * s.atan2(q.w);
        Rotation::new(v.scale(1.0 / s), angle).unwrap_or(Rotation::IDENTITY)
    }

    /// Geodesic angle between two unit quaternions, in `[0, π]`, taking the
    /// shorter of the two arcs.
    pub fn angle_to(self, o: Quat) -> f64 {
        let o = if self.dot(o) < 0.0 { -o } else { o };
        let diff = Quat { w: self.w - o.w, x: self.x - o.x, y: self.y - o.y, z: self.z - o.z };
        let sum = Quat { w: self.w + o.w, x: self.x + o.x, y: self.y + o.y, z: self.z + o.z };
        4.0 * diff.norm().atan2(sum.norm())
    }

    /// Spherical linear interpolation along the shortest arc.
    pub fn slerp(self, o: Quat, t: f64) -> Quat {
        let o = if self.dot(o) < 0.0 { -o } else { o };
        let diff = Quat { w: self.w - o.w, x: self.x - o.x, y: self.y - o.y, z: self.z - o.z };
        let sum = Quat { w: self.w + o.w, x: self.x + o.x, y: self.y + o.y, z: self.z + o.z };
        // half-angle between the quaternions, stable for tiny and near-π arcs
        let theta = 2.0 * diff.norm().atan2(sum.norm());
        let sin_theta = theta.sin();
        let (a, b) = if sin_theta.abs() < 1e-15 {
            (1.0 - t, t)
        } else {
            (((1.0 - t) * theta).sin() / sin_theta, (t * theta).sin() / sin_theta)
        };
        Quat {
            w: a * self.w + b * o.w,
            x: a * self.x + b * o.x,
            y: a * self.y + b * o.y,
            z: a * self.z + b * o.z,
        }
        .normalize()
    }
}

impl Neg for Quat {
    type Output = Quat;

    fn neg(self) -> Quat {
        Quat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

/// Row-major 4×4 matrix acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Default for Mat4 {
    fn default() -> Self {
        Mat4::IDENTITY
    }
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);

    pub fn translation(t: Vec3) -> Mat4 {
        let mut m = Mat4::IDENTITY;
        m.0[0][3] = t.x;
        m.0[1][3] = t.y;
        m.0[2][3] = t.z;
        m
    }

    pub fn scaling(s: Vec3) -> Mat4 {
        let mut m = Mat4::IDENTITY;
        m.0[0][0] = s.x;
        m.0[1][1] = s.y;
        m.0[2][2] = s.z;
        m
    }

    pub fn rotation(r: Rotation) -> Mat4 {
        Mat4::from_quat(r.to_quat())
    }

    pub fn from_quat(q: Quat) -> Mat4 {
        let Quat { w, x, y, z } = q;
        Mat4([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y), 0.0],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x), 0.0],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y), 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3],
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3],
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3],
        )
    }

    pub fn transform_vector(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn translation_part(&self) -> Vec3 {
        Vec3::new(self.0[0][3], self.0[1][3], self.0[2][3])
    }

    /// Inverse of an affine matrix (bottom row `0 0 0 1`). Returns `None`
    /// for a singular linear part.
    pub fn inverse_affine(&self) -> Option<Mat4> {
        let m = &self.0;
        let (a, b, c) = (m[0][0], m[0][1], m[0][2]);
        let (d, e, f) = (m[1][0], m[1][1], m[1][2]);
        let (g, h, i) = (m[2][0], m[2][1], m[2][2]);
        let co00 = e * i - f * h;
        let co01 = f * g - d * i;
        let co02 = d * h - e * g;
        let det = a * co00 + b * co01 + c * co02;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let inv_det = 1.0 / det;
        let r = [
            [co00 * inv_det, (c * h - b * i) * inv_det, (b * f - c * e) * inv_det],
            [co01 * inv_det, (a * i - c * g) * inv_det, (c * d - a * f) * inv_det],
            [co02 * inv_det, (b * g - a * h) * inv_det, (a * e - b * d) * inv_det],
        ];
        let t = self.translation_part();
        let mut out = Mat4::IDENTITY;
        for (row, rr) in r.iter().enumerate() {
            out.0[row][..3].copy_from_slice(rr);
            out.0[row][3] = -(rr[0] * t.x + rr[1] * t.y + rr[2] * t.z);
        }
        Some(out)
    }

    pub fn max_abs_diff(&self, o: &Mat4) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.0[r][c] - o.0[r][c]).abs());
            }
        }
        worst
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, o: Mat4) -> Mat4 {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| self.0[r][k] * o.0[k][c]).sum();
            }
        }
        Mat4(out)
    }
}
