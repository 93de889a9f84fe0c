//! Keyframe interpolation with X3D interpolator semantics.

use thiserror::Error;

use super::hsv::{hsv_to_rgb, rgb_to_hsv};
use crate::math::{ColorRGB, Rotation, Vec3};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrackError {
    #[error("track has no keys")]
    Empty,
    #[error("{keys} keys but {values} values")]
    LengthMismatch { keys: usize, values: usize },
    #[error("keys are not non-decreasing")]
    Unsorted,
    #[error("non-finite key")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyframeTrack<T> {
    keys: Vec<f64>,
    values: Vec<T>,
}

impl<T: Clone> KeyframeTrack<T> {
    pub fn new(keys: Vec<f64>, values: Vec<T>) -> Result<Self, TrackError> {
        if keys.is_empty() {
            return Err(TrackError::Empty);
        }
        if keys.len() != values.len() {
            return Err(TrackError::LengthMismatch { keys: keys.len(), values: values.len() });
        }
        if keys.iter().any(|k| !k.is_finite()) {
            return Err(TrackError::NonFinite);
        }
        if keys.windows(2).any(|w| w[1] < w[0]) {
            return Err(TrackError::Unsorted);
        }
        Ok(KeyframeTrack { keys, values })
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Either an exact key value or the span `(i, t)` with `0 < t < 1`.
    fn locate(&self, f: f64) -> Result<&T, (usize, f64)> {
        let last = self.keys.len() - 1;
        if f.is_nan() || f <= self.keys[0] {
            return Ok(&self.values[0]);
        }
        if f >= self.keys[last] {
            return Ok(&self.values[last]);
        }
        let i = self.keys.partition_point(|k| *k <= f) - 1;
        let t = (f - self.keys[i]) / (self.keys[i + 1] - self.keys[i]);
        if t == 0.0 {
            return Ok(&self.values[i]);
        }
        Err((i, t))
    }

    fn sample(&self, f: f64, mix: impl Fn(&T, &T, f64) -> T) -> T {
        match self.locate(f) {
            Ok(v) => v.clone(),
            Err((i, t)) => mix(&self.values[i], &self.values[i + 1], t),
        }
    }
}

pub fn interpolate_position(track: &KeyframeTrack<Vec3>, f: f64) -> Vec3 {
    track.sample(f, |a, b, t| a.lerp(*b, t))
}

pub fn slerp_rotation(a: Rotation, b: Rotation, t: f64) -> Rotation {
    a.to_quat().slerp(b.to_quat(), t).to_rotation(a.axis())
}

pub fn interpolate_orientation(track: &KeyframeTrack<Rotation>, f: f64) -> Rotation {
    track.sample(f, |a, b, t| slerp_rotation(*a, *b, t))
}

/// HSV interpolation along the shorter hue arc. An achromatic endpoint
/// takes its peer's hue; two achromatic endpoints use hue 0.
pub fn lerp_color_hsv(a: ColorRGB, b: ColorRGB, t: f64) -> ColorRGB {
    let (mut h0, s0, v0) = rgb_to_hsv(a);
    let (mut h1, s1, v1) = rgb_to_hsv(b);
    match (s0 == 0.0, s1 == 0.0) {
        (true, true) => {
            h0 = 0.0;
            h1 = 0.0;
        }
        (true, false) => h0 = h1,
        (false, true) => h1 = h0,
        (false, false) => {}
    }
    let mut dh = h1 - h0;
    if dh > 180.0 {
        dh -= 360.0;
    } else if dh < -180.0 {
        dh += 360.0;
    }
    hsv_to_rgb(h0 + dh * t, s0 + (s1 - s0) * t, v0 + (v1 - v0) * t)
}

pub fn interpolate_color(track: &KeyframeTrack<ColorRGB>, f: f64) -> ColorRGB {
    track.sample(f, |a, b, t| lerp_color_hsv(*a, *b, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn position_midpoint_and_clamp() {
        let tr = KeyframeTrack::new(vec![0.0, 1.0], vec![Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0)]).unwrap();
        assert_eq!(interpolate_position(&tr, 0.5), Vec3::new(5.0, 0.0, 0.0));
        assert_eq!(interpolate_position(&tr, -0.2), Vec3::ZERO);
        assert_eq!(interpolate_position(&tr, 7.0), Vec3::new(10.0, 0.0, 0.0));
    }

    #[test]
    fn exact_at_keys_with_repeats() {
        let v = [Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0 / 3.0, 0.0, 0.0), Vec3::new(7.0, 7.0, 7.0), Vec3::Y];
        let tr = KeyframeTrack::new(vec![0.0, 0.3, 0.3, 1.0], v.to_vec()).unwrap();
        assert_eq!(interpolate_position(&tr, 0.0), v[0]);
        // a repeated key jumps: at the key itself the later value holds
        assert_eq!(interpolate_position(&tr, 0.3), v[2]);
        assert_eq!(interpolate_position(&tr, 1.0), v[3]);
    }

    #[test]
    fn slerp_bisection() {
        let tr = KeyframeTrack::new(vec![0.0, 1.0], vec![Rotation::IDENTITY, Rotation::about_z(FRAC_PI_2)]).unwrap();
        let r = interpolate_orientation(&tr, 0.5);
        assert!((r.angle() - FRAC_PI_2 / 2.0).abs() < 1e-9);
        assert!((r.axis() - Vec3::Z).length() < 1e-9);
        assert_eq!(interpolate_orientation(&tr, 1.0), Rotation::about_z(FRAC_PI_2));
    }

    #[test]
    fn colors() {
        let close = |a: ColorRGB, b: ColorRGB| (a.r - b.r).abs().max((a.g - b.g).abs()).max((a.b - b.b).abs()) < 1e-6;
        let yellow = ColorRGB::rgb(1.0, 1.0, 0.0);
        let tr = KeyframeTrack::new(vec![0.0, 0.5, 1.0], vec![yellow, ColorRGB::WHITE, yellow]).unwrap();
        assert!(close(interpolate_color(&tr, 0.25), ColorRGB::rgb(1.0, 1.0, 0.5)));
        assert_eq!(interpolate_color(&tr, 0.0), yellow);
        let rg = KeyframeTrack::new(vec![0.0, 1.0], vec![ColorRGB::rgb(1.0, 0.0, 0.0), ColorRGB::rgb(0.0, 1.0, 0.0)]).unwrap();
        assert!(close(interpolate_color(&rg, 0.5), yellow));
        // magenta to red goes through the short side of the hue circle
        let mr = KeyframeTrack::new(vec![0.0, 1.0], vec![ColorRGB::rgb(1.0, 0.0, 1.0), ColorRGB::rgb(1.0, 0.0, 0.0)]).unwrap();
        let (h, _, _) = rgb_to_hsv(interpolate_color(&mr, 0.5));
        assert!((h - 330.0).abs() < 1e-9);
    }

    #[test]
    fn bad_tracks() {
        assert_eq!(KeyframeTrack::<f64>::new(vec![], vec![]), Err(TrackError::Empty));
        assert!(KeyframeTrack::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert_eq!(KeyframeTrack::new(vec![1.0, 0.0], vec![1.0, 2.0]), Err(TrackError::Unsorted));
    }
}
