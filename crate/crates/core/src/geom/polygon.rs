use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::primitives::{orient, Point2};
use crate::error::{Error, Result};

/// Relative tolerance of every side-of-line predicate; multiplied by the
/// table diameter.
pub const REL_EPS: f64 = 1e-9;

/// A strictly convex polygon with counter-clockwise vertices, or a segment
/// (two vertices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    diameter: f64,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<PolygonRepr> for ConvexPolygon {
    type Error = Error;
    fn try_from(r: PolygonRepr) -> Result<Self> {
        Self::new(r.vertices.into_iter().map(|[x, y]| Point2::new(x, y)).collect())
    }
}

impl From<ConvexPolygon> for PolygonRepr {
    fn from(p: ConvexPolygon) -> Self {
        Self {
            vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonMetrics {
    pub diameter: f64,
    pub perimeter: f64,
    pub min_width: f64,
    /// `diameter / min_width`; infinite for a segment.
    pub aspect_ratio: f64,
    pub contains_origin: bool,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 2 {
            return Err(Error::InvalidPolygon(format!("{n} vertices")));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let mut diameter = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                diameter = diameter.max(vertices[i].dist(vertices[j]));
            }
        }
        if diameter <= 0.0 {
            return Err(Error::InvalidPolygon("repeated vertices".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i].dist(vertices[j]) <= REL_EPS * diameter {
                    return Err(Error::InvalidPolygon(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        if n >= 3 {
            let mut turning = 0.0;
            for i in 0..n {
                let a = vertices[(i + n - 1) % n];
                let b = vertices[i];
                let c = vertices[(i + 1) % n];
                // twice the triangle area relative to the squared diameter
                if orient(a, b, c) <= 1e-12 * diameter * diameter {
                    return Err(Error::InvalidPolygon(format!(
                        "vertex {i} is not a strictly convex counter-clockwise turn"
                    )));
                }
                turning += (b - a).angle_to(c - b);
            }
            if (turning - TAU).abs() > 1e-6 {
                return Err(Error::InvalidPolygon("boundary winds more than once".into()));
            }
        }
        Ok(Self { vertices, diameter })
    }

    /// Square with vertices `(±h, ±h)`, first vertex in the first quadrant.
    pub fn square(h: f64) -> Self {
        Self::new(vec![
            Point2::new(h, h),
            Point2::new(-h, h),
            Point2::new(-h, -h),
            Point2::new(h, -h),
        ])
        .expect("square is convex")
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about the
    /// origin, first vertex at angle `phase`.
    pub fn regular(n: usize, r: f64, phase: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("regular polygon needs n >= 3, got {n}")));
        }
        Self::new(
            (0..n)
                .map(|k| Point2::from_polar(r, phase + TAU * k as f64 / n as f64))
                .collect(),
        )
    }

    /// Regular `n`-gon of the given diameter centered at the origin.
    pub fn regular_with_diameter(n: usize, diameter: f64) -> Result<Self> {
        let unit = Self::regular(n, 1.0, PI / 2.0)?;
        Ok(unit.scaled(diameter / unit.diameter()))
    }

    pub fn segment(a: Point2, b: Point2) -> Result<Self> {
        Self::new(vec![a, b])
    }

    /// Kite with vertices `(0, ±1)`, `(-1, 0)` and `(a, 0)`.
    pub fn kite(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidPolygon(format!("kite parameter must be positive, got {a}")));
        }
        Self::new(vec![
            Point2::new(0.0, -1.0),
            Point2::new(a, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(-1.0, 0.0),
        ])
    }

    /// Convex polygon with `n` vertices at random angles on the unit circle,
    /// re-centered so the vertex average is the origin. Deterministic in `seed`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("random polygon needs n >= 3, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::random_with(n, &mut rng))
    }

    pub fn random_with<R: Rng>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 3);
        loop {
            let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
            angles.sort_by(f64::total_cmp);
            let gaps_ok = (0..n).all(|i| {
                let next = if i + 1 == n { angles[0] + TAU } else { angles[i + 1] };
                next - angles[i] > 0.05 && next - angles[i] < PI - 0.05
            });
            if !gaps_ok {
                continue;
            }
            let pts: Vec<Point2> = angles.iter().map(|&t| Point2::unit(t)).collect();
            let c = pts.iter().fold(Point2::ORIGIN, |acc, &p| acc + p) / n as f64;
            if let Ok(p) = Self::new(pts.into_iter().map(|p| p - c).collect()) {
                if p.contains_strict(Point2::ORIGIN) {
                    return p;
                }
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    #[inline]
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Vertex with cyclic indexing.
    #[inline]
    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    #[inline]
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Absolute tolerance of side-of-line predicates.
    #[inline]
    pub fn eps(&self) -> f64 {
        REL_EPS * self.diameter
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.len();
        (0..n).map(|i| self.vertex(i).dist(self.vertex(i + 1))).sum()
    }

    /// Average of the vertices; interior for `n >= 3`.
    pub fn centroid(&self) -> Point2 {
        self.vertices.iter().fold(Point2::ORIGIN, |a, &v| a + v) / self.len() as f64
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.vertices.iter().map(|&v| v * s).collect()).expect("scaling preserves convexity")
    }

    pub fn translated(&self, t: Point2) -> Self {
        Self::new(self.vertices.iter().map(|&v| v + t).collect())
            .expect("translation preserves convexity")
    }

    pub fn rotated(&self, theta: f64) -> Self {
        Self::new(self.vertices.iter().map(|&v| v.rotate(theta)).collect())
            .expect("rotation preserves convexity")
    }

    /// Mirror image in the x-axis, re-ordered counter-clockwise.
    pub fn reflected_x(&self) -> Self {
        let mut vs: Vec<Point2> = self.vertices.iter().map(|v| Point2::new(v.x, -v.y)).collect();
        vs.reverse();
        Self::new(vs).expect("reflection preserves convexity")
    }

    /// Interior membership; boundary points (within `eps`) are not interior.
    pub fn contains_strict(&self, p: Point2) -> bool {
        if self.is_segment() {
            return false;
        }
        let eps = self.eps();
        let n = self.len();
        (0..n).all(|i| {
            let a = self.vertex(i);
            let b = self.vertex(i + 1);
            orient(a, b, p) / a.dist(b) > eps
        })
    }

    /// Closed membership (boundary within `eps` counts).
    pub fn contains_closed(&self, p: Point2) -> bool {
        let eps = self.eps();
        if self.is_segment() {
            let (a, b) = (self.vertices[0], self.vertices[1]);
            let l = a.dist(b);
            let t = (p - a).dot(b - a) / (l * l);
            return (orient(a, b, p) / l).abs() <= eps && (-eps / l..=1.0 + eps / l).contains(&t);
        }
        let n = self.len();
        (0..n).all(|i| {
            let a = self.vertex(i);
            let b = self.vertex(i + 1);
            orient(a, b, p) / a.dist(b) >= -eps
        })
    }

    /// Support function `h(θ) = max_v <v, (cos θ, sin θ)>`.
    pub fn support(&self, theta: f64) -> f64 {
        let u = Point2::unit(theta);
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Width seen from direction `θ`: `h(θ + π/2) + h(θ - π/2)`.
    pub fn width(&self, theta: f64) -> f64 {
        self.support(theta + PI / 2.0) + self.support(theta - PI / 2.0)
    }

    /// Minimal width, attained perpendicular to some edge.
    pub fn min_width(&self) -> f64 {
        if self.is_segment() {
            return 0.0;
        }
        let n = self.len();
        (0..n)
            .map(|i| {
                let a = self.vertex(i);
                let b = self.vertex(i + 1);
                let l = a.dist(b);
                self.vertices
                    .iter()
                    .map(|&v| orient(a, b, v) / l)
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn metrics(&self) -> PolygonMetrics {
        let min_width = self.min_width();
        PolygonMetrics {
            diameter: self.diameter,
            perimeter: self.perimeter(),
            min_width,
            aspect_ratio: if min_width > 0.0 {
                self.diameter / min_width
            } else {
                f64::INFINITY
            },
            contains_origin: self.contains_strict(Point2::ORIGIN),
        }
    }

    /// The centrally symmetric body `½(P − P)`.
    pub fn symmetrized(&self) -> Self {
        let mut pts = Vec::with_capacity(self.len() * self.len());
        for &a in &self.vertices {
            for &b in &self.vertices {
                if a != b {
                    pts.push((a - b) * 0.5);
                }
            }
        }
        Self::new(convex_hull(pts)).expect("hull of a symmetric point set is convex")
    }
}

/// Convex hull (monotone chain), counter-clockwise, collinear points dropped.
pub fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale * scale;
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

trait AngleTo {
    fn angle_to(self, o: Self) -> f64;
}

impl AngleTo for Point2 {
    /// Signed turning angle from `self` to `o`.
    fn angle_to(self, o: Self) -> f64 {
        self.cross(o).atan2(self.dot(o))
    }
}
