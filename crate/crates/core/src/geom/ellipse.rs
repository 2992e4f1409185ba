use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::primitives::Point2;

/// Ellipse given by its foci and the constant focal-distance sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseFoci {
    pub f1: Point2,
    pub f2: Point2,
    pub focal_sum: f64,
}

impl EllipseFoci {
    /// `None` unless `focal_sum > |f1 - f2|`.
    pub fn new(f1: Point2, f2: Point2, focal_sum: f64) -> Option<Self> {
        (focal_sum.is_finite() && focal_sum > f1.dist(f2)).then_some(Self { f1, f2, focal_sum })
    }

    /// Ellipse with foci `f1`, `f2` through `p`.
    pub fn through(f1: Point2, f2: Point2, p: Point2) -> Option<Self> {
        Self::new(f1, f2, p.dist(f1) + p.dist(f2))
    }

    pub fn circle(center: Point2, radius: f64) -> Self {
        Self {
            f1: center,
            f2: center,
            focal_sum: 2.0 * radius,
        }
    }

    pub fn center(&self) -> Point2 {
        self.f1.midpoint(self.f2)
    }

    /// Semi-major axis.
    pub fn a(&self) -> f64 {
        0.5 * self.focal_sum
    }

    /// Half the focal distance.
    pub fn c(&self) -> f64 {
        0.5 * self.f1.dist(self.f2)
    }

    /// Semi-minor axis.
    pub fn b(&self) -> f64 {
        let (a, c) = (self.a(), self.c());
        ((a - c) * (a + c)).sqrt()
    }

    pub fn eccentricity(&self) -> f64 {
        self.c() / self.a()
    }

    /// Unit vector along the major axis.
    pub fn major_axis(&self) -> Point2 {
        (self.f2 - self.f1).normalized().unwrap_or(Point2::new(1.0, 0.0))
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        let u = self.major_axis();
        let (s, c) = t.sin_cos();
        self.center() + u * (self.a() * c) + u.perp() * (self.b() * s)
    }

    pub fn focal_value(&self, p: Point2) -> f64 {
        p.dist(self.f1) + p.dist(self.f2)
    }

    /// Closed containment with an absolute slack on the focal sum.
    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        self.focal_value(p) <= self.focal_sum + slack
    }

    /// Minimum and maximum distance from the origin to points of the ellipse.
    pub fn radial_extremes(&self) -> (f64, f64) {
        let g = |t: f64| self.point_at(t).norm_sq();
        const K: usize = 256;
        let h = TAU / K as f64;
        let vals: Vec<f64> = (0..K).map(|k| g(k as f64 * h)).collect();
        let mut m = f64::INFINITY;
        let mut big = f64::NEG_INFINITY;
        for k in 0..K {
            let (prev, cur, next) = (vals[(k + K - 1) % K], vals[k], vals[(k + 1) % K]);
            let t = k as f64 * h;
            if cur <= prev && cur <= next {
                m = m.min(golden(&g, t - h, t + h, false));
            }
            if cur >= prev && cur >= next {
                big = big.max(golden(&g, t - h, t + h, true));
            }
        }
        (m.sqrt(), big.sqrt())
    }

    /// Euclidean distance from `q` to the curve.
    ///
    /// Closest-point parameter found by safeguarded Newton iterations with a
    /// bisection fallback on the standard secular equation (max 64 steps).
    pub fn distance_to(&self, q: Point2) -> f64 {
        let (a, b) = (self.a(), self.b());
        let u = self.major_axis();
        let rel = q - self.center();
        let y0 = rel.dot(u).abs();
        let y1 = rel.dot(u.perp()).abs();
        if a - b <= 1e-15 * a {
            return (rel.norm() - a).abs();
        }
        // a tiny minor-axis offset makes the secular root hug s = -1, so snap
        // it to the axis where the closed form is exact
        let y1 = if y1 <= 1e-12 * b { 0.0 } else { y1 };
        if y1 > 0.0 {
            if y0 > 0.0 {
                let z0 = y0 / a;
                let z1 = y1 / b;
                let r0 = (a / b) * (a / b);
                let g = |s: f64| {
                    let p0 = r0 * z0 / (s + r0);
                    let p1 = z1 / (s + 1.0);
                    p0 * p0 + p1 * p1 - 1.0
                };
                let dg = |s: f64| {
                    let p0 = r0 * z0 / (s + r0);
                    let p1 = z1 / (s + 1.0);
                    -2.0 * (p0 * p0 / (s + r0) + p1 * p1 / (s + 1.0))
                };
                // g is decreasing on s > -1 and changes sign on this bracket
                let mut lo = z1 - 1.0;
                let mut hi = if g(0.0) < 0.0 {
                    0.0
                } else {
                    (r0 * z0).hypot(z1) - 1.0
                };
                let mut s = 0.5 * (lo + hi);
                for _ in 0..64 {
                    let v = g(s);
                    if v == 0.0 {
                        break;
                    }
                    if v > 0.0 {
                        lo = s;
                    } else {
                        hi = s;
                    }
                    let newton = s - v / dg(s);
                    s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                    if hi - lo <= 1e-16 * (1.0 + s.abs()) {
                        break;
                    }
                }
                let x0 = r0 * y0 / (s + r0);
                let x1 = y1 / (s + 1.0);
                return (x0 - y0).hypot(x1 - y1);
            }
            return (y1 - b).abs();
        }
        let numer = a * y0;
        let denom = a * a - b * b;
        if numer < denom {
            let x0 = a * numer / denom;
            let x1 = b * (1.0 - (x0 / a) * (x0 / a)).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - a).abs()
        }
    }

    /// Symmetric Hausdorff distance estimated from `samples` boundary points
    /// of each curve with exact point-to-curve distances.
    pub fn hausdorff(&self, other: &Self, samples: usize) -> f64 {
        let samples = samples.max(4);
        let one_way = |e: &Self, f: &Self| {
            (0..samples)
                .map(|k| f.distance_to(e.point_at(TAU * k as f64 / samples as f64)))
                .fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }
}

/// Golden-section search for the extremum of `g` in `[lo, hi]`.
fn golden(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, maximize: bool) -> f64 {
    let f = |t: f64| if maximize { -g(t) } else { g(t) };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
        if hi - lo < 1e-15 * PI {
            break;
        }
    }
    let best = f(0.5 * (lo + hi)).min(fc).min(fd);
    if maximize {
        -best
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_extremes() {
        let e = EllipseFoci::circle(Point2::ORIGIN, 1.0);
        let (m, big) = e.radial_extremes();
        assert!((m - 1.0).abs() < 1e-14 && (big - 1.0).abs() < 1e-14);
    }

    #[test]
    fn centered_ellipse_extremes() {
        let e = EllipseFoci::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), 2.0 * 2f64.sqrt()).unwrap();
        let (m, big) = e.radial_extremes();
        assert!((m - 1.0).abs() < 1e-12);
        assert!((big - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn offset_ellipse_extremes_match_dense_sampling() {
        let e = EllipseFoci::new(Point2::new(3.0, 0.0), Point2::new(5.0, 0.0), 4.0).unwrap();
        let (m, big) = e.radial_extremes();
        // the nearest point is the left vertex (2, 0)
        assert!((m - 2.0).abs() < 1e-12);
        assert!((big - 6.0).abs() < 1e-12);
        let dense = (0..200_000).map(|k| e.point_at(TAU * k as f64 / 200_000.0).norm());
        let (dm, dmax) = dense.fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
        assert!(m <= dm + 1e-12 && big >= dmax - 1e-12);
    }

    #[test]
    fn distance_to_ellipse_matches_brute_force() {
        let e = EllipseFoci::new(Point2::new(-0.3, 0.2), Point2::new(1.1, -0.4), 3.0).unwrap();
        let pts = [
            Point2::new(3.0, 1.0),
            Point2::new(0.4, -0.1),
            Point2::new(-2.0, 2.5),
            e.center(),
            e.center() + e.major_axis() * 0.2,
            e.center() + e.major_axis().perp() * 5.0,
        ];
        for q in pts {
            let brute = (0..400_000)
                .map(|k| e.point_at(TAU * k as f64 / 400_000.0).dist(q))
                .fold(f64::INFINITY, f64::min);
            let d = e.distance_to(q);
            assert!(d <= brute + 1e-12, "{q}: {d} vs {brute}");
            assert!(brute - d < 1e-9, "{q}: {d} vs {brute}");
        }
    }

    #[test]
    fn hausdorff_examples() {
        let e = EllipseFoci::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.5), 4.0).unwrap();
        assert!(e.hausdorff(&e, 256) < 1e-12);
        let c1 = EllipseFoci::circle(Point2::ORIGIN, 1.0);
        let c2 = EllipseFoci::circle(Point2::ORIGIN, 2.0);
        assert!((c1.hausdorff(&c2, 256) - 1.0).abs() < 1e-6);
        let f = (Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0));
        let e1 = EllipseFoci::new(f.0, f.1, 4.0).unwrap();
        let e2 = EllipseFoci::new(f.0, f.1, 4.2).unwrap();
        let h = e1.hausdorff(&e2, 1024);
        assert!((0.1..=0.2).contains(&h), "{h}");
        // co-vertex separation is the largest gap for this pair
        assert!((h - (3.41f64.sqrt() - 3f64.sqrt())).abs() < 1e-9);
    }
}
