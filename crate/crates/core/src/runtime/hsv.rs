//! RGB/HSV conversion. Hue is in degrees, `[0, 360)`.

use crate::math::ColorRGB;

pub fn rgb_to_hsv(c: ColorRGB) -> (f64, f64, f64) {
    let max = c.r.max(c.g).max(c.b);
    let min = c.r.min(c.g).min(c.b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return (0.0, s, v);
    }
    let h = if max == c.r {
        60.0 * ((c.g - c.b) / delta)
    } else if max == c.g {
        60.0 * ((c.b - c.r) / delta + 2.0)
    } else {
        60.0 * ((c.r - c.g) / delta + 4.0)
    };
    (h.rem_euclid(360.0), s, v)
}

pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> ColorRGB {
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    ColorRGB::rgb(clamp(r + m), clamp(g + m), clamp(b + m))
}
