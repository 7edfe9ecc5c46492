//! Small fixed-size vector helpers.

pub type P2 = [f64; 2];
pub type P3 = [f64; 3];

#[inline]
pub fn sub2(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot2(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross2(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm2(a: P2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist2(a: P2, b: P2) -> f64 {
    norm2(sub2(a, b))
}

#[inline]
pub fn sub3(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add3(a: P3, b: P3) -> P3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale3(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot3(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm3(a: P3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn dist3(a: P3, b: P3) -> f64 {
    norm3(sub3(a, b))
}

#[inline]
pub fn normalize3(a: P3) -> P3 {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Distance from `x` to the segment `[a, b]`, in any dimension.
pub fn dist_point_segment(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut t = 0.0;
    for i in 0..x.len() {
        let d = b[i] - a[i];
        ab2 += d * d;
        t += (x[i] - a[i]) * d;
    }
    let t = if ab2 > 0.0 { (t / ab2).clamp(0.0, 1.0) } else { 0.0 };
    let mut s = 0.0;
    for i in 0..x.len() {
        let p = a[i] + t * (b[i] - a[i]);
        s += (x[i] - p) * (x[i] - p);
    }
    s.sqrt()
}

pub fn dist_nd(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Angle of `v` in `[0, 2pi)`.
pub fn polar_angle(v: P2) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Minimal distance between two segments in 3D (sampled refinement is not needed:
/// closed form via clamped parameters).
pub fn dist_segment_segment3(p0: P3, p1: P3, q0: P3, q1: P3) -> f64 {
    let d1 = sub3(p1, p0);
    let d2 = sub3(q1, q0);
    let r = sub3(p0, q0);
    let a = dot3(d1, d1);
    let e = dot3(d2, d2);
    let f = dot3(d2, r);
    let c = dot3(d1, r);
    let b = dot3(d1, d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-14 * a * e { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    let cp = add3(p0, scale3(d1, s));
    let cq = add3(q0, scale3(d2, t));
    dist3(cp, cq)
}
