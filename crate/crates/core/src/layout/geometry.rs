//! Small vector helpers and parametric curves with arc-length placement.

use std::f64::consts::PI;

pub type V3 = [f64; 3];

pub fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: V3, b: V3) -> f64 {
    norm(sub(a, b))
}

pub fn lerp(a: V3, b: V3, t: f64) -> V3 {
    add(a, scale(sub(b, a), t))
}

/// Unit vector along `a`, or `fallback` when `a` is (near) zero.
pub fn unit_or(a: V3, fallback: V3) -> V3 {
    let n = norm(a);
    if n < 1e-12 {
        fallback
    } else {
        scale(a, 1.0 / n)
    }
}

/// A unit vector perpendicular to unit `u`, lying in the xy-plane when `u`
/// does.
pub fn perpendicular(u: V3) -> V3 {
    let w = cross([0.0, 0.0, 1.0], u);
    if norm(w) > 1e-9 {
        return unit_or(w, [0.0, 1.0, 0.0]);
    }
    unit_or(cross(u, [1.0, 0.0, 0.0]), [0.0, 1.0, 0.0])
}

/// Closest point to `p` on segment `a`–`b`.
pub fn project_on_segment(p: V3, a: V3, b: V3) -> V3 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 < 1e-24 {
        return a;
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    lerp(a, b, t)
}

/// A curve parameterized over `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    Line {
        a: V3,
        b: V3,
    },
    /// Counter-clockwise arc in the xy-plane around `center`, the radius
    /// varying linearly from `r0` to `r1`.
    Arc {
        center: V3,
        r0: f64,
        r1: f64,
        a0: f64,
        sweep: f64,
    },
    /// Quadratic Bézier curve.
    Quad {
        a: V3,
        c: V3,
        b: V3,
    },
}

const GAUSS_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GAUSS_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

impl Curve {
    /// Arc from `a` to `b` around `center`, counter-clockwise.
    pub fn arc(a: V3, b: V3, center: V3) -> Curve {
        let r0 = dist(a, center);
        let r1 = dist(b, center);
        let a0 = (a[1] - center[1]).atan2(a[0] - center[0]);
        let a1 = (b[1] - center[1]).atan2(b[0] - center[0]);
        let mut sweep = a1 - a0;
        while sweep <= 0.0 {
            sweep += 2.0 * PI;
        }
        while sweep > 2.0 * PI {
            sweep -= 2.0 * PI;
        }
        Curve::Arc {
            center,
            r0,
            r1,
            a0,
            sweep,
        }
    }

    pub fn point(&self, t: f64) -> V3 {
        match *self {
            Curve::Line { a, b } => lerp(a, b, t),
            Curve::Arc {
                center,
                r0,
                r1,
                a0,
                sweep,
            } => {
                let r = r0 + (r1 - r0) * t;
                let ang = a0 + sweep * t;
                [
                    center[0] + r * ang.cos(),
                    center[1] + r * ang.sin(),
                    center[2],
                ]
            }
            Curve::Quad { a, c, b } => {
                let s = 1.0 - t;
                add(add(scale(a, s * s), scale(c, 2.0 * s * t)), scale(b, t * t))
            }
        }
    }

    /// Speed `|dC/dt|`.
    fn speed(&self, t: f64) -> f64 {
        match *self {
            Curve::Line { a, b } => dist(a, b),
            Curve::Arc { r0, r1, sweep, .. } => {
                let r = r0 + (r1 - r0) * t;
                ((r1 - r0) * (r1 - r0) + (r * sweep) * (r * sweep)).sqrt()
            }
            Curve::Quad { a, c, b } => {
                let d = add(scale(sub(c, a), 2.0 * (1.0 - t)), scale(sub(b, c), 2.0 * t));
                norm(d)
            }
        }
    }

    /// Arc length between parameters `t0 ≤ t1`.
    pub fn length_between(&self, t0: f64, t1: f64) -> f64 {
        if let Curve::Line { a, b } = *self {
            return dist(a, b) * (t1 - t0);
        }
        let panels = (((t1 - t0) * 64.0).ceil() as usize).max(1);
        let h = (t1 - t0) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let mid = t0 + (k as f64 + 0.5) * h;
            for (x, w) in GAUSS_X.iter().zip(GAUSS_W) {
                total += w * self.speed(mid + x * h / 2.0);
            }
        }
        total * h / 2.0
    }

    pub fn length(&self) -> f64 {
        self.length_between(0.0, 1.0)
    }

    /// Parameter at which the arc length from the start is `f` of the total.
    pub fn param_at_fraction(&self, f: f64) -> f64 {
        let f = f.clamp(0.0, 1.0);
        let total = self.length();
        if total < 1e-12 || f == 0.0 || f == 1.0 {
            return f;
        }
        let goal = f * total;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut t = f;
        for _ in 0..60 {
            let s = self.length_between(0.0, t) - goal;
            if s.abs() < 1e-13 * total.max(1.0) {
                break;
            }
            if s > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let v = self.speed(t);
            let next = if v > 1e-12 { t - s / v } else { f64::NAN };
            t = if next > lo && next < hi {
                next
            } else {
                (lo + hi) / 2.0
            };
        }
        t
    }

    pub fn point_at_fraction(&self, f: f64) -> V3 {
        self.point(self.param_at_fraction(f))
    }

    pub fn start(&self) -> V3 {
        self.point(0.0)
    }

    pub fn end(&self) -> V3 {
        self.point(1.0)
    }

    /// Points sampled at equal parameter steps, ends included.
    pub fn sample(&self, n: usize) -> Vec<V3> {
        (0..=n).map(|i| self.point(i as f64 / n as f64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_midpoint() {
        let c = Curve::Line {
            a: [0.0; 3],
            b: [10.0, 0.0, 0.0],
        };
        assert_eq!(c.point_at_fraction(0.5), [5.0, 0.0, 0.0]);
    }

    #[test]
    fn quarter_circle_length() {
        let c = Curve::arc([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0; 3]);
        assert!((c.length() - PI / 2.0).abs() < 1e-12);
        let p = c.point_at_fraction(0.5);
        assert!((p[0] - (PI / 4.0).cos()).abs() < 1e-9);
    }

    #[test]
    fn bezier_fraction_inverts_length() {
        let c = Curve::Quad {
            a: [0.0; 3],
            c: [2.0, 8.0, 0.0],
            b: [10.0, 0.0, 0.0],
        };
        let t = c.param_at_fraction(0.3);
        assert!((c.length_between(0.0, t) / c.length() - 0.3).abs() < 1e-10);
    }
}
