//! Support contacts, the auxiliary circle and the third common support line.

use super::polygon::ConvexPolygon;
use super::primitives::{orient, Circle, DirectedLine, Point2};
use crate::error::{Error, Result};

/// How a support line through an exterior point touches the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Contact {
    Vertex(usize),
    /// The line contains a whole side; `near` is the endpoint closer to the
    /// viewing point.
    Edge { near: usize, far: usize },
}

/// The two support contacts seen from an exterior point.
///
/// `right` carries the line along which the table lies on the left when
/// travelling from the point towards the table; `left` is the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Contacts {
    pub left: Contact,
    pub right: Contact,
}

pub(crate) fn contacts(poly: &ConvexPolygon, x: Point2) -> Result<Contacts> {
    if !x.is_finite() {
        return Err(Error::NumericalDegeneracy("non-finite point"));
    }
    if poly.contains_closed(x) {
        return Err(Error::PointInside);
    }
    let eps = poly.eps();
    let n = poly.len();
    if n == 2 {
        let (a, b) = (poly.vertex(0), poly.vertex(1));
        let s = orient(x, a, b) / a.dist(x).max(b.dist(x));
        if s.abs() <= eps {
            let (near, far) = if x.dist_sq(a) <= x.dist_sq(b) { (0, 1) } else { (1, 0) };
            let e = Contact::Edge { near, far };
            return Ok(Contacts { left: e, right: e });
        }
        return Ok(if s > 0.0 {
            Contacts {
                left: Contact::Vertex(1),
                right: Contact::Vertex(0),
            }
        } else {
            Contacts {
                left: Contact::Vertex(0),
                right: Contact::Vertex(1),
            }
        });
    }

    let mut rights = Vec::with_capacity(2);
    let mut lefts = Vec::with_capacity(2);
    for i in 0..n {
        let v = poly.vertex(i);
        let len = v.dist(x);
        let prev = orient(x, v, poly.vertex(i + n - 1)) / len;
        let next = orient(x, v, poly.vertex(i + 1)) / len;
        if prev >= -eps && next >= -eps {
            rights.push(i);
        }
        if prev <= eps && next <= eps {
            lefts.push(i);
        }
    }
    Ok(Contacts {
        left: resolve(poly, x, &lefts)?,
        right: resolve(poly, x, &rights)?,
    })
}

fn resolve(poly: &ConvexPolygon, x: Point2, cands: &[usize]) -> Result<Contact> {
    let n = poly.len();
    match *cands {
        [i] => Ok(Contact::Vertex(i)),
        [i, j] if (i + 1) % n == j || (j + 1) % n == i => {
            let (near, far) = if x.dist_sq(poly.vertex(i)) <= x.dist_sq(poly.vertex(j)) {
                (i, j)
            } else {
                (j, i)
            };
            Ok(Contact::Edge { near, far })
        }
        _ => Err(Error::NumericalDegeneracy("support contacts not resolvable")),
    }
}

/// Indices `(left, right)` of the vertices through which the two support
/// lines from `x` pass.
///
/// Facing the table from `x`, the left vertex is on the left-hand side. A
/// point on the extension of a side that makes the right line touch a whole
/// edge is on a map-singular ray; the left-hand analogue is reported as
/// [`Error::EdgeAligned`].
pub fn support_contacts(poly: &ConvexPolygon, x: Point2) -> Result<(usize, usize)> {
    let c = contacts(poly, x)?;
    let right = match c.right {
        Contact::Vertex(i) => i,
        Contact::Edge { .. } => return Err(Error::OnSingularRay),
    };
    let left = match c.left {
        Contact::Vertex(i) => i,
        Contact::Edge { .. } => return Err(Error::EdgeAligned),
    };
    Ok((left, right))
}

/// Circle tangent to `tangent_line` at `p` and tangent to `other`.
///
/// Both lines carry the table on their left. The circle lies on the right of
/// `tangent_line` and on the left of `other`, so its center is
/// `p + t * n` with `n` the right normal of `tangent_line` and `t` the radius.
pub fn auxiliary_circle(other: &DirectedLine, tangent_line: &DirectedLine, p: Point2) -> Result<Circle> {
    anchored_circle(other, tangent_line, p).map(|a| a.circle())
}

/// A circle stored as a point on it, the unit normal from that point towards
/// the center, and the radius. Tangent lines of very large circles stay
/// accurate in this form while the center itself does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AnchoredCircle {
    pub point: Point2,
    pub normal: Point2,
    pub radius: f64,
}

impl AnchoredCircle {
    pub(crate) fn circle(&self) -> Circle {
        Circle {
            center: self.point + self.normal * self.radius,
            radius: self.radius,
        }
    }

    /// Anchored at the point of `circle` nearest to `toward`.
    pub(crate) fn from_circle(circle: &Circle, toward: Point2) -> Self {
        let normal = (circle.center - toward).normalized().unwrap_or(Point2::new(0.0, 1.0));
        Self {
            point: circle.center - normal * circle.radius,
            normal,
            radius: circle.radius,
        }
    }

    /// Signed distance of the center from `line`.
    fn center_offset(&self, line: &DirectedLine) -> f64 {
        line.signed_distance(self.point) + self.radius * line.direction.cross(self.normal)
    }

    /// Tangent lines through `v`, oriented with the circle on the left.
    ///
    /// A direction `u` works when `u x (normal + (point - v) / radius) = 1`.
    fn tangents_from(&self, v: Point2) -> Vec<DirectedLine> {
        let k = 1.0 / self.radius;
        let q = self.point - v;
        let m = self.normal + q * k;
        // power of v divided by radius squared
        let g = k * k * q.norm_sq() + 2.0 * k * q.dot(self.normal);
        if g < -2e-12 {
            return Vec::new();
        }
        let Some(mh) = m.normalized() else {
            return Vec::new();
        };
        let base = Point2::new(mh.y, -mh.x);
        if g <= 1e-30 {
            return DirectedLine::new(v, base).into_iter().collect();
        }
        let beta = g.sqrt().atan();
        [beta, -beta]
            .into_iter()
            .filter_map(|b| DirectedLine::new(v, base.rotate(b)))
            .collect()
    }

    fn touch_point(&self, line: &DirectedLine) -> Point2 {
        self.point + (self.normal - line.direction.perp()) * self.radius
    }
}

pub(crate) fn anchored_circle(other: &DirectedLine, tangent_line: &DirectedLine, p: Point2) -> Result<AnchoredCircle> {
    let scale = 1.0 + p.dist(tangent_line.origin);
    if tangent_line.signed_distance(p).abs() > 1e-9 * scale {
        return Err(Error::NoSolution);
    }
    let n = tangent_line.right_normal();
    // 1 - d1 x n = 1 + d1 . d2, written without cancellation
    let denom = 0.5 * (other.direction + tangent_line.direction).norm_sq();
    let t = other.signed_distance(p) / denom;
    if !(t > 0.0) || !t.is_finite() || !n.is_finite() {
        return Err(Error::NoSolution);
    }
    Ok(AnchoredCircle {
        point: p,
        normal: n,
        radius: t,
    })
}

/// A common support line of a circle and the table found by
/// [`third_support_line`]. `also` is set when the line contains a whole side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SupportHit {
    pub line: DirectedLine,
    pub vertex: usize,
    pub also: Option<usize>,
}

const SAME_DIRECTION: f64 = 1e-9;

fn same_direction(a: Point2, b: Point2) -> bool {
    a.dot(b) > 0.0 && a.cross(b).abs() <= SAME_DIRECTION
}

/// The common support line of `circle` and the table other than the two in
/// `exclude`. Each excluded line may name the vertex it passes through; the
/// tangent from that vertex closest to it is then dropped regardless of how
/// close the genuine third line comes.
pub(crate) fn third_support(
    poly: &ConvexPolygon,
    circle: &AnchoredCircle,
    exclude: [(&DirectedLine, Option<usize>); 2],
) -> Result<SupportHit> {
    let eps = poly.eps();
    let excluded: Vec<(Point2, Option<usize>)> = exclude
        .iter()
        .map(|(l, hint)| {
            let d = if circle.center_offset(l) < 0.0 { -l.direction } else { l.direction };
            (d, *hint)
        })
        .collect();
    let mut hits: Vec<SupportHit> = Vec::new();
    for (i, &v) in poly.vertices().iter().enumerate() {
        let mut cands = circle.tangents_from(v);
        for &(d, hint) in &excluded {
            if hint == Some(i) && !cands.is_empty() {
                // angular gap via the cross product; dot products round to 1
                let gap = |u: Point2| if u.dot(d) > 0.0 { u.cross(d).abs() } else { 2.0 + u.cross(d).abs() };
                let closest = (0..cands.len())
                    .min_by(|&a, &b| gap(cands[a].direction).total_cmp(&gap(cands[b].direction)))
                    .unwrap_or(0);
                cands.remove(closest);
            }
        }
        for line in cands {
            if excluded
                .iter()
                .any(|&(d, hint)| hint != Some(i) && same_direction(line.direction, d))
            {
                continue;
            }
            if poly.vertices().iter().any(|&w| line.signed_distance(w) < -eps) {
                continue;
            }
            if let Some(h) = hits.iter_mut().find(|h| same_direction(h.line.direction, line.direction)) {
                if h.vertex != i && h.also.is_none() {
                    h.also = Some(i);
                }
                continue;
            }
            hits.push(SupportHit {
                line,
                vertex: i,
                also: None,
            });
        }
    }
    match hits.len() {
        0 => Err(Error::NotFound),
        1 => {
            let mut h = hits[0];
            // prefer the endpoint closer to the tangency point
            if let Some(j) = h.also {
                let q = circle.touch_point(&h.line);
                if poly.vertex(j).dist_sq(q) < poly.vertex(h.vertex).dist_sq(q) {
                    h.also = Some(h.vertex);
                    h.vertex = j;
                }
                h.line.origin = poly.vertex(h.vertex);
            }
            Ok(h)
        }
        _ => Err(Error::Ambiguous),
    }
}

/// Every common support line of `circle` and the table with both on its
/// left, one per direction.
pub(crate) fn common_supports(poly: &ConvexPolygon, circle: &AnchoredCircle) -> Vec<SupportHit> {
    let eps = poly.eps();
    let mut hits: Vec<SupportHit> = Vec::new();
    for (i, &v) in poly.vertices().iter().enumerate() {
        for line in circle.tangents_from(v) {
            if poly.vertices().iter().any(|&w| line.signed_distance(w) < -eps) {
                continue;
            }
            if let Some(h) = hits.iter_mut().find(|h| same_direction(h.line.direction, line.direction)) {
                if h.vertex != i && h.also.is_none() {
                    h.also = Some(i);
                }
                continue;
            }
            hits.push(SupportHit {
                line,
                vertex: i,
                also: None,
            });
        }
    }
    hits
}

/// The remaining common support line of `circle` and the table (both on its
/// left), other than the two excluded lines, with the vertex it passes
/// through.
pub fn third_support_line(
    poly: &ConvexPolygon,
    circle: &Circle,
    exclude: [&DirectedLine; 2],
) -> Result<(DirectedLine, usize)> {
    let anchored = AnchoredCircle::from_circle(circle, poly.centroid());
    third_support(poly, &anchored, [(exclude[0], None), (exclude[1], None)]).map(|h| (h.line, h.vertex))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> ConvexPolygon {
        ConvexPolygon::square(1.0)
    }

    #[test]
    fn square_contacts_on_axes() {
        let p = sq();
        let (l, r) = support_contacts(&p, Point2::new(3.0, 0.0)).unwrap();
        assert_eq!(p.vertex(l), Point2::new(1.0, -1.0));
        assert_eq!(p.vertex(r), Point2::new(1.0, 1.0));
        let (l, r) = support_contacts(&p, Point2::new(0.0, 3.0)).unwrap();
        assert_eq!(p.vertex(l), Point2::new(1.0, 1.0));
        assert_eq!(p.vertex(r), Point2::new(-1.0, 1.0));
    }

    #[test]
    fn square_contact_errors() {
        let p = sq();
        assert_eq!(support_contacts(&p, Point2::new(3.0, 1.0)), Err(Error::OnSingularRay));
        assert_eq!(support_contacts(&p, Point2::new(-3.0, 1.0)), Err(Error::EdgeAligned));
        assert_eq!(support_contacts(&p, Point2::new(0.5, 0.2)), Err(Error::PointInside));
        assert_eq!(support_contacts(&p, Point2::new(1.0, 0.2)), Err(Error::PointInside));
    }

    #[test]
    fn contacts_are_support_lines() {
        let p = ConvexPolygon::random(7, 3).unwrap();
        let eps = p.eps();
        for k in 0..200 {
            let x = Point2::from_polar(1.5 + 0.1 * k as f64, 0.37 * k as f64);
            let (l, r) = support_contacts(&p, x).unwrap();
            let lr = DirectedLine::through(x, p.vertex(r)).unwrap();
            let ll = DirectedLine::through(p.vertex(l), x).unwrap();
            for &v in p.vertices() {
                assert!(lr.signed_distance(v) >= -eps);
                assert!(ll.signed_distance(v) >= -eps);
            }
        }
    }

    #[test]
    fn circle_against_vertical_line() {
        // table below the x-axis: directed westwards keeps it on the left
        let l2 = DirectedLine::new(Point2::new(0.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        let l1 = DirectedLine::new(Point2::new(-2.0, 0.0), Point2::new(0.0, -1.0)).unwrap();
        let c = auxiliary_circle(&l1, &l2, Point2::ORIGIN).unwrap();
        assert!((c.center - Point2::new(0.0, 2.0)).norm() < 1e-15);
        assert!((c.radius - 2.0).abs() < 1e-15);
    }

    #[test]
    fn circle_against_diagonal_line() {
        let l2 = DirectedLine::new(Point2::new(0.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        let l1 = DirectedLine::new(Point2::new(0.0, 2.0), Point2::new(-1.0, -1.0)).unwrap();
        let c = auxiliary_circle(&l1, &l2, Point2::ORIGIN).unwrap();
        let r = 2.0 * (2f64.sqrt() - 1.0);
        assert!((c.center - Point2::new(0.0, r)).norm() < 1e-15);
        assert!((c.radius - 0.828427124746190).abs() < 1e-12);
        assert!(c.tangency_defect(&l1).abs() < 1e-12);
    }

    #[test]
    fn circle_between_parallel_lines() {
        let l2 = DirectedLine::new(Point2::new(0.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        let l1 = DirectedLine::new(Point2::new(0.0, 4.0), Point2::new(-1.0, 0.0)).unwrap();
        let c = auxiliary_circle(&l1, &l2, Point2::ORIGIN).unwrap();
        assert!((c.center - Point2::new(0.0, 2.0)).norm() < 1e-15);
        assert!((c.radius - 2.0).abs() < 1e-15);
    }

    #[test]
    fn circle_impossible_configuration() {
        // p on the wrong side of l1 (l1 keeps the table above y = 1)
        let l2 = DirectedLine::new(Point2::new(0.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        let l1 = DirectedLine::new(Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)).unwrap();
        assert_eq!(auxiliary_circle(&l1, &l2, Point2::ORIGIN), Err(Error::NoSolution));
        // p not on l2
        assert_eq!(auxiliary_circle(&l1, &l2, Point2::new(0.0, 1.0)), Err(Error::NoSolution));
    }

    #[test]
    fn third_line_for_segment() {
        // x = (0, 2) around the segment; right contact is (-1, 0)
        let seg = ConvexPolygon::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        let x = Point2::new(0.0, 2.0);
        let (l, r) = support_contacts(&seg, x).unwrap();
        assert_eq!(seg.vertex(r), Point2::new(-1.0, 0.0));
        let l2 = DirectedLine::through(x, seg.vertex(r)).unwrap();
        let l1 = DirectedLine::through(seg.vertex(l), x).unwrap();
        let c = auxiliary_circle(&l1, &l2, seg.vertex(r)).unwrap();
        let (l3, v) = third_support_line(&seg, &c, [&l1, &l2]).unwrap();
        assert_eq!(seg.vertex(v), Point2::new(1.0, 0.0));
        assert!(c.tangency_defect(&l3).abs() < 1e-12);
        // travelling along l3 the tangency point comes before the contact vertex
        assert!(l3.param(c.center) < l3.param(seg.vertex(v)));
    }

    #[test]
    fn third_line_not_found_for_disjoint_circle() {
        let p = sq();
        let c = Circle::new(Point2::ORIGIN, 5.0).unwrap();
        let dummy = DirectedLine::new(Point2::new(10.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert!(matches!(
            third_support_line(&p, &c, [&dummy, &dummy.reversed()]),
            Err(Error::NotFound)
        ));
    }

    #[test]
    fn third_line_equilateral_vertex_circle() {
        let tri = ConvexPolygon::regular(3, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
        let x = Point2::new(0.4, 2.5);
        let (l, r) = support_contacts(&tri, x).unwrap();
        let l2 = DirectedLine::through(x, tri.vertex(r)).unwrap();
        let l1 = DirectedLine::through(tri.vertex(l), x).unwrap();
        let c = auxiliary_circle(&l1, &l2, tri.vertex(r)).unwrap();
        let (l3, v) = third_support_line(&tri, &c, [&l1, &l2]).unwrap();
        assert_ne!(v, r);
        assert!(c.tangency_defect(&l3).abs() < 1e-9 * c.radius);
    }
}
