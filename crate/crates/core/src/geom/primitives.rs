use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or free vector) of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn from_polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(r * c, r * s)
    }

    /// Unit vector at angle `theta`.
    #[inline]
    pub fn unit(theta: f64) -> Self {
        Self::from_polar(1.0, theta)
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn dist_sq(self, o: Self) -> f64 {
        (self - o).norm_sq()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    /// Polar angle in `[-π, π]` (atan2 convention).
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn midpoint(self, o: Self) -> Self {
        (self + o) * 0.5
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    #[inline]
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

impl Div<f64> for Point2 {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
#[inline]
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = (theta + PI).rem_euclid(TAU) - PI;
    if t >= PI {
        t -= TAU;
    }
    t
}

/// An oriented line. Throughout the crate the table sits on the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedLine {
    pub origin: Point2,
    pub direction: Point2,
}

impl DirectedLine {
    /// Normalizes `direction`; `None` for a zero or non-finite direction.
    pub fn new(origin: Point2, direction: Point2) -> Option<Self> {
        let direction = direction.normalized()?;
        origin.is_finite().then_some(Self { origin, direction })
    }

    /// Line through `a` directed towards `b`.
    pub fn through(a: Point2, b: Point2) -> Option<Self> {
        Self::new(a, b - a)
    }

    pub fn reversed(&self) -> Self {
        Self {
            origin: self.origin,
            direction: -self.direction,
        }
    }

    /// Positive on the left.
    #[inline]
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.direction.cross(p - self.origin)
    }

    #[inline]
    pub fn param(&self, p: Point2) -> f64 {
        self.direction.dot(p - self.origin)
    }

    #[inline]
    pub fn point_at(&self, t: f64) -> Point2 {
        self.origin + self.direction * t
    }

    #[inline]
    pub fn left_normal(&self) -> Point2 {
        self.direction.perp()
    }

    #[inline]
    pub fn right_normal(&self) -> Point2 {
        -self.direction.perp()
    }

    pub fn project(&self, p: Point2) -> Point2 {
        self.point_at(self.param(p))
    }

    /// Intersection point; `None` for (numerically) parallel lines.
    pub fn intersect(&self, other: &Self) -> Option<Point2> {
        let denom = self.direction.cross(other.direction);
        if denom.abs() < 1e-300 {
            return None;
        }
        let t = (other.origin - self.origin).cross(other.direction) / denom;
        let p = self.point_at(t);
        p.is_finite().then_some(p)
    }

    /// Same oriented line up to `tol` in direction (radians, small-angle) and
    /// `dist_tol` in offset.
    pub fn coincides(&self, other: &Self, tol: f64, dist_tol: f64) -> bool {
        self.direction.dot(other.direction) > 0.0
            && self.direction.cross(other.direction).abs() <= tol
            && self.signed_distance(other.origin).abs() <= dist_tol
    }

    pub fn rotated_about(&self, pivot: Point2, phi: f64) -> Self {
        Self {
            origin: pivot,
            direction: self.direction.rotate(phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Option<Self> {
        (radius > 0.0 && radius.is_finite() && center.is_finite()).then_some(Self { center, radius })
    }

    /// Distance from the circle to the line, signed by side (0 when tangent
    /// with the circle on the left).
    pub fn tangency_defect(&self, line: &DirectedLine) -> f64 {
        line.signed_distance(self.center) - self.radius
    }
}

/// A ray `{origin + t * direction : t > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point2,
    pub direction: Point2,
}

impl Ray {
    pub fn new(origin: Point2, direction: Point2) -> Option<Self> {
        Some(Self {
            origin,
            direction: direction.normalized()?,
        })
    }

    pub fn distance(&self, p: Point2) -> f64 {
        let v = p - self.origin;
        if v.dot(self.direction) <= 0.0 {
            v.norm()
        } else {
            self.direction.cross(v).abs()
        }
    }

    /// Whether the closed segment `ab` meets the ray.
    pub fn crosses_segment(&self, a: Point2, b: Point2) -> bool {
        let o = self.origin;
        let d = self.direction;
        let sa = d.cross(a - o);
        let sb = d.cross(b - o);
        if sa * sb > 0.0 {
            return false;
        }
        if sa == sb {
            // collinear with the ray's line
            return a.dot(d) > o.dot(d) || b.dot(d) > o.dot(d);
        }
        let t = sa / (sa - sb);
        let hit = a + (b - a) * t;
        (hit - o).dot(d) >= 0.0
    }
}
