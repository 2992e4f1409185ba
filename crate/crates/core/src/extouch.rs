//! Extouch triangles: the direct construction, the inverse problem (which
//! triangle has a given extouch triangle) and the resulting 3-periodic orbit.

use serde::{Deserialize, Serialize};

use crate::billiard::step;
use crate::error::{Error, Result};
use crate::geom::{orient, ConvexPolygon, Point2};
use crate::roots::bracketed_root;

/// Constant in `κ |R|² = yz (x² − a²)` where `|R|` is the area of the parent.
///
/// Matches the excircle construction: for the (3, 4, 5) triangle the extouch
/// sides squared are `x² − κ·36 / (yz)` = 1.8, 6.4 and 13 only for κ = 4.
pub const KAPPA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub vertices: [Point2; 3],
}

/// Side lengths; `a` is opposite the first vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let ok = [a, b, c].iter().all(|s| s.is_finite() && *s > 0.0) && a + b > c && b + c > a && c + a > b;
        if ok {
            Ok(Self { a, b, c })
        } else {
            Err(Error::InvalidTriangle)
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Heron's product `S(S − a)(S − b)(S − c)`, the squared area.
    pub fn area_sq(&self) -> f64 {
        heron_sq(self.a, self.b, self.c)
    }
}

fn heron_sq(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    s * (s - a) * (s - b) * (s - c)
}

impl Triangle {
    pub fn new(a: Point2, b: Point2, c: Point2) -> Self {
        Self { vertices: [a, b, c] }
    }

    /// Triangle with the given sides, first vertex at the origin, second on
    /// the positive x-axis, counter-clockwise.
    pub fn from_sides(s: TriangleSides) -> Self {
        // vertex 0 at the origin, vertex 1 at distance c, vertex 2 at distance b
        let x = (s.b * s.b + s.c * s.c - s.a * s.a) / (2.0 * s.c);
        let y = (s.b * s.b - x * x).max(0.0).sqrt();
        Self::new(Point2::ORIGIN, Point2::new(s.c, 0.0), Point2::new(x, y))
    }

    pub fn sides(&self) -> [f64; 3] {
        let [p, q, r] = self.vertices;
        [q.dist(r), r.dist(p), p.dist(q)]
    }

    pub fn signed_area(&self) -> f64 {
        let [p, q, r] = self.vertices;
        0.5 * orient(p, q, r)
    }

    pub fn diameter(&self) -> f64 {
        self.sides().into_iter().fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Self {
        Self {
            vertices: self.vertices.map(f),
        }
    }

    fn is_degenerate(&self) -> bool {
        let d = self.diameter();
        !(d > 0.0) || self.signed_area().abs() <= 1e-12 * d * d || self.vertices.iter().any(|v| !v.is_finite())
    }

    pub fn to_polygon(&self) -> Result<ConvexPolygon> {
        let mut v = self.vertices.to_vec();
        if self.signed_area() < 0.0 {
            v.reverse();
        }
        ConvexPolygon::new(v)
    }
}

/// Tangency points of the three excircles with the sides.
///
/// Entry `i` lies on the side opposite vertex `i` and is the foot of the
/// excenter opposite vertex `i`.
pub fn extouch_of(r: &Triangle) -> Result<Triangle> {
    if r.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let [p, q, s] = r.vertices;
    let [a, b, c] = r.sides();
    let foot = |ex: Point2, u: Point2, v: Point2| {
        let d = v - u;
        u + d * ((ex - u).dot(d) / d.norm_sq())
    };
    let ex0 = (p * -a + q * b + s * c) / (-a + b + c);
    let ex1 = (p * a - q * b + s * c) / (a - b + c);
    let ex2 = (p * a + q * b - s * c) / (a + b - c);
    Ok(Triangle::new(foot(ex0, q, s), foot(ex1, s, p), foot(ex2, p, q)))
}

/// `κ` implied by a parent and its extouch triangle: `yz (x² − a²) / |R|²`
/// with `x` opposite the first vertex of the parent and `a` the extouch side
/// opposite the point on that side.
pub fn kappa_from_oracle(r: &Triangle) -> Result<f64> {
    let t = extouch_of(r)?;
    let [x, y, z] = r.sides();
    let [a, _, _] = t.sides();
    Ok(y * z * (x * x - a * a) / heron_sq(x, y, z))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParentSolution {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub root_bracket: (f64, f64),
    /// `|f(x)|`.
    pub residual: f64,
}

impl ParentSolution {
    pub fn sides(&self) -> TriangleSides {
        TriangleSides {
            a: self.x,
            b: self.y,
            c: self.z,
        }
    }
}

fn partner(x: f64, a: f64, b: f64) -> f64 {
    let (x2, a2, b2) = (x * x, a * a, b * b);
    (x2 - a2 + (x2 * x2 + 2.0 * (2.0 * b2 - a2) * x2 + a2 * a2).sqrt()) / (2.0 * x)
}

/// `y(x)` and `z(x)` for extouch sides `t`.
pub fn partners(t: &TriangleSides, x: f64) -> (f64, f64) {
    (partner(x, t.a, t.b), partner(x, t.a, t.c))
}

/// `f(x) = yz (x² − a²) − κ S(S − x)(S − y)(S − z)`.
pub fn parent_residual(t: &TriangleSides, x: f64) -> f64 {
    let (y, z) = partners(t, x);
    y * z * (x * x - t.a * t.a) - KAPPA * heron_sq(x, y, z)
}

/// Sides of the triangle whose extouch triangle has sides `t`.
pub fn solve_parent(t: &TriangleSides) -> Result<ParentSolution> {
    let t = TriangleSides::new(t.a, t.b, t.c)?;
    let f = |x: f64| parent_residual(&t, x);
    let lo = t.a * (1.0 + 1e-12);
    if !(f(lo) < 0.0) {
        return Err(Error::BracketFailure);
    }
    let mut hi = 2.0 * t.a;
    let mut grown = 0;
    while !(f(hi) > 0.0) {
        hi *= 2.0;
        grown += 1;
        if grown > 200 {
            return Err(Error::BracketFailure);
        }
    }
    let root = bracketed_root(f, lo, hi, 1e-13)?;
    let (y, z) = partners(&t, root.x);
    Ok(ParentSolution {
        x: root.x,
        y,
        z,
        root_bracket: root.bracket,
        residual: root.fx.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub parent: Triangle,
    pub solution: ParentSolution,
    /// RMS distance between the placed parent's extouch points and `Q`.
    pub registration_error: f64,
    /// `max ‖T³(V) − V‖` over the parent's vertices, around `Q`.
    pub orbit_defect: f64,
}

/// A rigid motion `p ↦ R p + t`, possibly orientation reversing.
#[derive(Debug, Clone, Copy)]
struct Rigid {
    cos: f64,
    sin: f64,
    reflect: bool,
    t: Point2,
}

impl Rigid {
    fn apply(&self, p: Point2) -> Point2 {
        let p = if self.reflect { Point2::new(p.x, -p.y) } else { p };
        Point2::new(self.cos * p.x - self.sin * p.y, self.sin * p.x + self.cos * p.y) + self.t
    }
}

/// Least-squares rigid motion taking `src` onto `dst`, reflection allowed.
fn procrustes(src: &[Point2; 3], dst: &[Point2; 3]) -> (Rigid, f64) {
    let best = [false, true]
        .into_iter()
        .map(|reflect| {
            let s: Vec<Point2> = src
                .iter()
                .map(|p| if reflect { Point2::new(p.x, -p.y) } else { *p })
                .collect();
            let cs = (s[0] + s[1] + s[2]) / 3.0;
            let cd = (dst[0] + dst[1] + dst[2]) / 3.0;
            let (mut dot, mut cross) = (0.0, 0.0);
            for (p, q) in s.iter().zip(dst) {
                let (u, v) = (*p - cs, *q - cd);
                dot += u.dot(v);
                cross += u.cross(v);
            }
            let angle = cross.atan2(dot);
            let (sin, cos) = angle.sin_cos();
            let rot = |p: Point2| Point2::new(cos * p.x - sin * p.y, sin * p.x + cos * p.y);
            let rigid = Rigid {
                cos,
                sin,
                reflect,
                t: cd - rot(cs),
            };
            let err = (src.iter().zip(dst).map(|(p, q)| rigid.apply(*p).dist_sq(*q)).sum::<f64>() / 3.0).sqrt();
            (rigid, err)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    best
}

/// Places the parent of `q` in the plane so that its extouch points are the
/// vertices of `q`, and measures how closely its vertices form a 3-periodic
/// orbit of the outer length billiard around `q`.
pub fn place_parent(q: &Triangle) -> Result<Placement> {
    if q.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let [a, b, c] = q.sides();
    let solution = solve_parent(&TriangleSides::new(a, b, c)?)?;
    let model = Triangle::from_sides(solution.sides());
    let touch = extouch_of(&model)?;
    let (rigid, registration_error) = procrustes(&touch.vertices, &q.vertices);
    let parent = model.map(|p| rigid.apply(p));
    let table = q.to_polygon()?;
    let mut orbit_defect: f64 = 0.0;
    for v in parent.vertices {
        let mut x = v;
        for _ in 0..3 {
            x = step(&table, x)?.y;
        }
        orbit_defect = orbit_defect.max(x.dist(v));
    }
    Ok(Placement {
        parent,
        solution,
        registration_error,
        orbit_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Tangent-length rule: the excircle opposite a vertex touches the
    /// opposite side at distance `s − (adjacent side)` from its endpoints.
    fn extouch_by_lengths(r: &Triangle) -> Triangle {
        let [p, q, s] = r.vertices;
        let [a, b, c] = r.sides();
        let semi = 0.5 * (a + b + c);
        let along = |u: Point2, v: Point2, len: f64, t: f64| u + (v - u) * (t / len);
        Triangle::new(along(q, s, a, semi - c), along(s, p, b, semi - a), along(p, q, c, semi - b))
    }

    fn random_triangle(rng: &mut ChaCha8Rng) -> Triangle {
        loop {
            let t = Triangle::new(
                Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let d = t.diameter();
            if t.signed_area().abs() > 0.05 * d * d {
                return t;
            }
        }
    }

    #[test]
    fn excircle_feet_match_tangent_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let r = random_triangle(&mut rng);
            let a = extouch_of(&r).unwrap();
            let b = extouch_by_lengths(&r);
            for i in 0..3 {
                assert!(a.vertices[i].dist(b.vertices[i]) < 1e-12, "{r:?}");
            }
        }
    }

    #[test]
    fn equilateral_gives_medial_triangle() {
        let r = Triangle::from_sides(TriangleSides::new(2.0, 2.0, 2.0).unwrap());
        let t = extouch_of(&r).unwrap();
        for s in t.sides() {
            assert!(close(s, 1.0, 1e-14));
        }
        for i in 0..3 {
            let mid = r.vertices[(i + 1) % 3].midpoint(r.vertices[(i + 2) % 3]);
            assert!(t.vertices[i].dist(mid) < 1e-14);
        }
    }

    #[test]
    fn three_four_five() {
        let r = Triangle::from_sides(TriangleSides::new(3.0, 4.0, 5.0).unwrap());
        let s = extouch_of(&r).unwrap().sides();
        assert!(close(s[0], 1.8f64.sqrt(), 1e-12));
        assert!(close(s[1], 6.4f64.sqrt(), 1e-12));
        assert!(close(s[2], 13f64.sqrt(), 1e-12));
    }

    #[test]
    fn collinear_is_degenerate() {
        let r = Triangle::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0));
        assert_eq!(extouch_of(&r), Err(Error::Degenerate));
    }

    #[test]
    fn kappa_agrees_with_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let r = random_triangle(&mut rng);
            let k = kappa_from_oracle(&r).unwrap();
            assert!(close(k, KAPPA, 1e-9), "{k}");
        }
    }

    #[test]
    fn closed_forms_at_a() {
        let t = TriangleSides::new(0.7, 1.1, 1.3).unwrap();
        let (y, z) = partners(&t, t.a);
        assert!(close(y, t.b, 1e-12) && close(z, t.c, 1e-12));
        assert!(parent_residual(&t, t.a) < 0.0);
        assert!(close(parent_residual(&t, t.a), -KAPPA * t.area_sq(), 1e-12));
    }

    #[test]
    fn solve_equilateral_and_right_triangle() {
        let s = solve_parent(&TriangleSides::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        for v in [s.x, s.y, s.z] {
            assert!(close(v, 2.0, 1e-10), "{s:?}");
        }
        let t = TriangleSides::new(1.8f64.sqrt(), 6.4f64.sqrt(), 13f64.sqrt()).unwrap();
        let s = solve_parent(&t).unwrap();
        assert!(close(s.x, 3.0, 1e-10) && close(s.y, 4.0, 1e-10) && close(s.z, 5.0, 1e-10), "{s:?}");
        assert!(s.residual <= 1e-12 * s.x.powi(4));
        let (lo, hi) = s.root_bracket;
        assert!(parent_residual(&t, lo) <= 0.0 && parent_residual(&t, hi) >= 0.0);
    }

    #[test]
    fn invalid_sides() {
        assert_eq!(TriangleSides::new(1.0, 1.0, 2.1), Err(Error::InvalidTriangle));
        let bad = TriangleSides {
            a: 1.0,
            b: 1.0,
            c: 2.1,
        };
        assert_eq!(solve_parent(&bad), Err(Error::InvalidTriangle));
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let t = random_triangle(&mut rng);
            let [a, b, c] = t.sides();
            let s = solve_parent(&TriangleSides::new(a, b, c).unwrap()).unwrap();
            assert!(s.x > a);
            let back = extouch_of(&Triangle::from_sides(s.sides())).unwrap().sides();
            for (u, v) in back.iter().zip([a, b, c]) {
                assert!(close(*u, v, 1e-8 * v), "{back:?} vs {:?}", [a, b, c]);
            }
        }
    }

    #[test]
    fn placement_is_three_periodic() {
        let eq = Triangle::from_sides(TriangleSides::new(1.0, 1.0, 1.0).unwrap()).map(|p| p - Point2::new(0.5, 0.5 / 3f64.sqrt()));
        let pl = place_parent(&eq).unwrap();
        assert!(pl.orbit_defect <= 1e-8, "{pl:?}");
        let centroid = |t: &Triangle| (t.vertices[0] + t.vertices[1] + t.vertices[2]) / 3.0;
        assert!(centroid(&pl.parent).dist(centroid(&eq)) < 1e-12);
        for s in pl.parent.sides() {
            assert!(close(s, 2.0, 1e-10));
        }
        let rt = Triangle::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 3.0));
        let pl = place_parent(&rt).unwrap();
        assert!(pl.orbit_defect <= 1e-7 * rt.diameter(), "{pl:?}");
        let mirrored = rt.map(|p| Point2::new(p.x, -p.y));
        let pm = place_parent(&mirrored).unwrap();
        assert!(close(pm.orbit_defect, pl.orbit_defect, 1e-9));
    }

    #[test]
    fn placement_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let q = random_triangle(&mut rng);
            let pl = place_parent(&q).unwrap();
            assert!(pl.registration_error < 1e-9 * q.diameter());
            assert!(pl.orbit_defect <= 1e-7 * q.diameter(), "{pl:?}");
        }
    }
}
