//! The outer length billiard map, its inverse, and a few companions: the
//! closed-form step around a segment, the outer area map, and a check that
//! orbits are critical points of the circumscribed length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    anchored_circle, contacts, orient, third_support, Circle, Contact, ConvexPolygon, DirectedLine, Point2,
};

/// One application of `T` with everything the construction produced.
///
/// `l1` passes through the left contact `l` and is directed towards `x`,
/// `l2` runs from `x` through the tangency vertex `p = r`, and `l3` runs from
/// `y` through the contact vertex of the third support line. All three
/// lines keep the table on their left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub x: Point2,
    pub y: Point2,
    pub l1: DirectedLine,
    pub l2: DirectedLine,
    pub l3: DirectedLine,
    pub p: Point2,
    pub circle: Circle,
    /// Vertex indices carried by `l1`, `l2`, `l3`.
    pub piece_label: [usize; 3],
    pub steady: bool,
    pub virtual_table: (Point2, Point2),
    pub left_vertex: usize,
    pub right_vertex: usize,
}

impl StepRecord {
    /// Vertex through which the third support line passes.
    pub fn third_vertex(&self) -> usize {
        self.piece_label[2]
    }
}

fn vertex_of(c: Contact) -> usize {
    match c {
        Contact::Vertex(i) => i,
        Contact::Edge { near, .. } => near,
    }
}

fn min_radius(poly: &ConvexPolygon) -> f64 {
    1e-12 * poly.diameter()
}

/// Builds the record from the two lines through `x`, given with the table on
/// their left; `l2` passes through the tangency vertex `r`.
fn assemble(
    poly: &ConvexPolygon,
    x: Point2,
    l1: DirectedLine,
    l2: DirectedLine,
    l: usize,
    r: usize,
) -> Result<StepRecord> {
    let p = poly.vertex(r);
    let anchored = anchored_circle(&l1, &l2, p).map_err(|_| Error::NumericalDegeneracy("no auxiliary circle"))?;
    if anchored.radius < min_radius(poly) {
        return Err(Error::NumericalDegeneracy("auxiliary circle radius below tolerance"));
    }
    let circle = anchored.circle();
    let hit = third_support(poly, &anchored, [(&l1, Some(l)), (&l2, Some(r))]).map_err(|e| match e {
        Error::NotFound => Error::NumericalDegeneracy("third support line not found"),
        Error::Ambiguous => Error::NumericalDegeneracy("third support line ambiguous"),
        other => other,
    })?;
    let y = l2
        .intersect(&hit.line)
        .ok_or(Error::NumericalDegeneracy("second and third lines parallel"))?;
    if l2.param(y) <= l2.param(p) {
        return Err(Error::NumericalDegeneracy("image does not lie beyond the tangency vertex"));
    }
    let s = hit.vertex;
    let l3 = DirectedLine {
        origin: y,
        direction: hit.line.direction,
    };
    let steady = s == l || hit.also == Some(l);
    let virtual_table = if steady {
        (poly.vertex(l), p)
    } else {
        let corner = l1
            .intersect(&l3)
            .ok_or(Error::NumericalDegeneracy("first and third lines parallel"))?;
        (corner, p)
    };
    Ok(StepRecord {
        x,
        y,
        l1,
        l2,
        l3,
        p,
        circle,
        piece_label: [l, r, s],
        steady,
        virtual_table,
        left_vertex: l,
        right_vertex: r,
    })
}

/// One step `y = T(x)`.
pub fn step(poly: &ConvexPolygon, x: Point2) -> Result<StepRecord> {
    let c = contacts(poly, x)?;
    let r = match c.right {
        Contact::Vertex(r) => r,
        Contact::Edge { .. } => return Err(Error::Singular),
    };
    let l = vertex_of(c.left);
    let l1 = DirectedLine::through(poly.vertex(l), x).ok_or(Error::NumericalDegeneracy("degenerate first line"))?;
    let l2 = DirectedLine::through(x, poly.vertex(r)).ok_or(Error::NumericalDegeneracy("degenerate second line"))?;
    assemble(poly, x, l1, l2, l, r)
}

/// One step backwards: the record of the `x` with `T(x) = y`.
///
/// The mirrored construction: the circle touches the line through `L(y)` at
/// that vertex and is tangent to the line through `R(y)`; the remaining
/// common support line is the first line of the preimage.
pub fn step_inverse(poly: &ConvexPolygon, y: Point2) -> Result<StepRecord> {
    let c = contacts(poly, y)?;
    let p_idx = match c.left {
        Contact::Vertex(i) => i,
        Contact::Edge { .. } => return Err(Error::Singular),
    };
    let s = vertex_of(c.right);
    let p = poly.vertex(p_idx);
    let l2 = DirectedLine::through(p, y).ok_or(Error::NumericalDegeneracy("degenerate second line"))?;
    let l3 = DirectedLine::through(y, poly.vertex(s)).ok_or(Error::NumericalDegeneracy("degenerate third line"))?;
    let anchored = anchored_circle(&l3, &l2, p).map_err(|_| Error::NumericalDegeneracy("no auxiliary circle"))?;
    if anchored.radius < min_radius(poly) {
        return Err(Error::NumericalDegeneracy("auxiliary circle radius below tolerance"));
    }
    let circle = anchored.circle();
    let hit = third_support(poly, &anchored, [(&l2, Some(p_idx)), (&l3, Some(s))]).map_err(|e| match e {
        Error::NotFound => Error::NumericalDegeneracy("first support line not found"),
        Error::Ambiguous => Error::NumericalDegeneracy("first support line ambiguous"),
        other => other,
    })?;
    let x = l2
        .intersect(&hit.line)
        .ok_or(Error::NumericalDegeneracy("first and second lines parallel"))?;
    if l2.param(x) >= 0.0 {
        return Err(Error::NumericalDegeneracy("preimage does not lie before the tangency vertex"));
    }
    let l = hit.vertex;
    let l1 = DirectedLine {
        origin: poly.vertex(l),
        direction: hit.line.direction,
    };
    let l2 = DirectedLine { origin: x, ..l2 };
    let steady = s == l || hit.also == Some(s);
    let virtual_table = if steady {
        (poly.vertex(l), p)
    } else {
        let corner = l1
            .intersect(&l3)
            .ok_or(Error::NumericalDegeneracy("first and third lines parallel"))?;
        (corner, p)
    };
    Ok(StepRecord {
        x,
        y,
        l1,
        l2,
        l3,
        p,
        circle,
        piece_label: [l, p_idx, s],
        steady,
        virtual_table,
        left_vertex: l,
        right_vertex: p_idx,
    })
}

/// A point of an orbit together with the step taken from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub index: usize,
    pub point: Point2,
    pub record: StepRecord,
}

/// Why an orbit stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StopReason {
    /// `n_max` steps were taken.
    Completed,
    /// The next point lies farther than the stop radius.
    Escaped { index: usize, point: Point2 },
    /// The map failed at `point`.
    Failed {
        index: usize,
        point: Point2,
        #[serde(with = "error_text")]
        error: Error,
    },
}

mod error_text {
    use crate::error::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(e: &Error, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&e.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Error, D::Error> {
        Ok(Error::InvalidArgument(String::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub samples: Vec<OrbitSample>,
    pub stop: StopReason,
}

impl Orbit {
    /// Every visited point, including the final image when the orbit ran to
    /// completion.
    pub fn points(&self) -> Vec<Point2> {
        let mut pts: Vec<Point2> = self.samples.iter().map(|s| s.point).collect();
        if let Some(last) = self.samples.last() {
            if matches!(self.stop, StopReason::Completed | StopReason::Escaped { .. }) {
                pts.push(last.record.y);
            }
        }
        pts
    }
}

/// Iterates `T` from `x0` for at most `n_max` steps.
pub fn orbit(poly: &ConvexPolygon, x0: Point2, n_max: usize, stop_radius: f64) -> Orbit {
    let mut samples = Vec::with_capacity(n_max.min(1 << 20));
    let mut x = x0;
    for index in 0..n_max {
        if x.norm() > stop_radius {
            return Orbit {
                samples,
                stop: StopReason::Escaped { index, point: x },
            };
        }
        match step(poly, x) {
            Ok(record) => {
                samples.push(OrbitSample { index, point: x, record });
                x = record.y;
            }
            Err(error) => {
                return Orbit {
                    samples,
                    stop: StopReason::Failed { index, point: x, error },
                }
            }
        }
    }
    Orbit {
        samples,
        stop: StopReason::Completed,
    }
}

/// Closed-form step around the segment `f1 f2`.
///
/// The orbit stays on the ellipse through `x` with foci `f1`, `f2`; the image
/// is the second intersection of the forward support line with it.
pub fn segment_step(f1: Point2, f2: Point2, x: Point2) -> Result<Point2> {
    let scale = f1.dist(f2);
    if !(scale > 0.0) {
        return Err(Error::InvalidPolygon("segment endpoints coincide".into()));
    }
    let s = orient(x, f1, f2) / x.dist(f1).max(x.dist(f2));
    if s.abs() <= 1e-9 * scale {
        return Err(Error::Collinear);
    }
    // the forward line passes through the right-hand contact
    let p = if s > 0.0 { f1 } else { f2 };
    let sum = x.dist(f1) + x.dist(f2);
    let a = 0.5 * sum;
    let c = 0.5 * scale;
    let b2 = (a - c) * (a + c);
    let axis = (f2 - f1) / scale;
    let center = f1.midpoint(f2);
    let u = (p - x).normalized().ok_or(Error::Collinear)?;
    let (x1, x2) = ((x - center).dot(axis), (x - center).dot(axis.perp()));
    let (u1, u2) = (u.dot(axis), u.dot(axis.perp()));
    let t = -2.0 * (x1 * u1 / (a * a) + x2 * u2 / b2) / (u1 * u1 / (a * a) + u2 * u2 / b2);
    Ok(x + u * t)
}

/// The outer area map: reflection of `x` through the right-hand contact.
pub fn outer_area_step(poly: &ConvexPolygon, x: Point2) -> Result<Point2> {
    match contacts(poly, x)?.right {
        Contact::Vertex(i) => Ok(poly.vertex(i) * 2.0 - x),
        Contact::Edge { .. } => Err(Error::Singular),
    }
}

/// Inverse of [`outer_area_step`]: reflection through the left-hand contact.
pub fn outer_area_step_inverse(poly: &ConvexPolygon, y: Point2) -> Result<Point2> {
    match contacts(poly, y)?.left {
        Contact::Vertex(i) => Ok(poly.vertex(i) * 2.0 - y),
        Contact::Edge { .. } => Err(Error::Singular),
    }
}

/// `|dL/dφ|` at `φ = 0` for the broken line `x, T(x)` when the middle
/// support line is rotated by `φ` about its tangency vertex.
///
/// The neighbouring lines stay fixed, so both corners slide along them; the
/// outer ends of the broken line are pinned at the first contact vertex and
/// at `T²(x)`. Central differences with one Richardson refinement.
pub fn variational_residual(poly: &ConvexPolygon, x: Point2, h: f64) -> Result<f64> {
    variational_residual_at(poly, x, h, 0.0)
}

/// As [`variational_residual`], but evaluated at a rotated middle line `φ0`.
pub fn variational_residual_at(poly: &ConvexPolygon, x: Point2, h: f64, phi0: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let rec = step(poly, x)?;
    let next = step(poly, rec.y)?;
    let start = poly.vertex(rec.left_vertex);
    let end = next.y;
    let length = |phi: f64| -> Result<f64> {
        let m = rec.l2.rotated_about(rec.p, phi);
        let a = rec.l1.intersect(&m).ok_or(Error::NumericalDegeneracy("rotated line parallel"))?;
        let b = m.intersect(&rec.l3).ok_or(Error::NumericalDegeneracy("rotated line parallel"))?;
        Ok(start.dist(a) + a.dist(b) + b.dist(end))
    };
    let central = |h: f64| -> Result<f64> { Ok((length(phi0 + h)? - length(phi0 - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(((4.0 * fine - coarse) / 3.0).abs())
}
