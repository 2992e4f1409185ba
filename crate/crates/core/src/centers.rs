//! Centers of auxiliary circles: the map `χ`, the construction run
//! backwards from a center, the midpoint witness for forward and backward
//! circles, and the comparison of the center cloud with the dual curve.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{circle_radius_threshold, dual_radial, once_around};
use crate::billiard::{step, step_inverse, StepRecord};
use crate::error::{Error, Result};
use crate::geom::{common_supports, AnchoredCircle, ConvexPolygon, DirectedLine, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterSample {
    pub x: Point2,
    pub center: Point2,
    pub radius: f64,
    /// Opening angle at `x` between the two support lines.
    pub phi: f64,
    /// Tangency vertex and its index.
    pub p: Point2,
    pub p_index: usize,
}

impl CenterSample {
    fn from_record(rec: &StepRecord) -> Self {
        let a = rec.l1.origin - rec.x;
        let b = rec.p - rec.x;
        Self {
            x: rec.x,
            center: rec.circle.center,
            radius: rec.circle.radius,
            phi: a.cross(b).atan2(a.dot(b)).abs(),
            p: rec.p,
            p_index: rec.right_vertex,
        }
    }
}

/// Center and radius of the auxiliary circle built at `x`.
pub fn chi(poly: &ConvexPolygon, x: Point2) -> Result<CenterSample> {
    Ok(CenterSample::from_record(&step(poly, x)?))
}

/// Runs the construction backwards from a circle center `c`.
///
/// The circle centered at `c` through the nearest point of the table touches
/// it at a vertex `v`. Its tangent at `v` and the two outer common support
/// lines meet in two points on the tangent; the one before `v` is `x`, the
/// one after is `T(x)`.
pub fn chord_from_center(poly: &ConvexPolygon, c: Point2) -> Result<(Point2, Point2)> {
    if poly.contains_closed(c) {
        return Err(Error::PointInside);
    }
    let (v_idx, v) = poly
        .vertices()
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.dist_sq(c).total_cmp(&b.1.dist_sq(c)))
        .unwrap();
    let rho = v.dist(c);
    let n = poly.len();
    let edges = if poly.is_segment() { 1 } else { n };
    for i in 0..edges {
        let (a, b) = (poly.vertex(i), poly.vertex(i + 1));
        let t = (c - a).dot(b - a) / a.dist_sq(b);
        let tol = 1e-12;
        if t > tol && t < 1.0 - tol && (a + (b - a) * t).dist(c) < rho {
            return Err(Error::NearestPointOnEdge);
        }
    }
    let normal = (c - v) / rho;
    let circle = AnchoredCircle {
        point: v,
        normal,
        radius: rho,
    };
    // table on the left, circle on the right
    let l2 = DirectedLine {
        origin: v,
        direction: normal.perp(),
    };
    let hits: Vec<_> = common_supports(poly, &circle)
        .into_iter()
        .filter(|h| h.vertex != v_idx || h.also.is_some())
        .collect();
    let mut before = None;
    let mut after = None;
    for h in &hits {
        let Some(q) = l2.intersect(&h.line) else { continue };
        if l2.param(q) < 0.0 {
            before = before.or(Some(q));
        } else {
            after = after.or(Some(q));
        }
    }
    match (hits.len(), before, after) {
        (2, Some(x), Some(y)) => Ok((x, y)),
        (k, _, _) if k > 2 => Err(Error::Ambiguous),
        _ => Err(Error::NotFound),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointWitness {
    /// Midpoint of the forward and backward circle centers.
    pub m: Point2,
    pub v_plus: usize,
    pub v_minus: usize,
    /// `| |M − v+| − |M − v−| |`.
    pub defect: f64,
    /// Set when `v+ = v−` or a nearest vertex is not unique.
    pub degenerate: bool,
}

fn nearest_vertex(poly: &ConvexPolygon, c: Point2) -> (usize, bool) {
    let d: Vec<f64> = poly.vertices().iter().map(|v| v.dist_sq(c)).collect();
    let best = (0..d.len()).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
    let tie = (0..d.len()).any(|j| j != best && d[j] == d[best]);
    (best, tie)
}

/// The midpoint of the centers of the circles built for `T` and `T⁻¹` at
/// `x`, and how far it is from being equidistant to their tangency vertices.
pub fn midpoint_bisector_witness(poly: &ConvexPolygon, x: Point2) -> Result<MidpointWitness> {
    let c_plus = step(poly, x)?.circle.center;
    let c_minus = step_inverse(poly, x)?.circle.center;
    let m = c_plus.midpoint(c_minus);
    let (v_plus, tie_plus) = nearest_vertex(poly, c_plus);
    let (v_minus, tie_minus) = nearest_vertex(poly, c_minus);
    let (a, b) = (poly.vertex(v_plus), poly.vertex(v_minus));
    // difference of distances through the difference of squares
    let defect = ((m - a).norm_sq() - (m - b).norm_sq()).abs() / (m.dist(a) + m.dist(b));
    Ok(MidpointWitness {
        m,
        v_plus,
        v_minus,
        defect,
        degenerate: v_plus == v_minus || tie_plus || tie_minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualSample {
    pub theta: f64,
    pub sample: CenterSample,
    /// `Γ(θ) (−sin θ, cos θ)`.
    pub predicted: Point2,
    /// Width of the scaled table across `θ`.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualDeviation {
    pub d: f64,
    /// `sup |χ(x_i) − Γ(θ_i)(−sin θ_i, cos θ_i)|`.
    pub sup_dev: f64,
    /// `sup |φ − w(θ)|`.
    pub phi_defect: f64,
    /// `sup |ρ − 2 / w(θ)|`.
    pub radius_defect: f64,
    pub samples: Vec<DualSample>,
}

/// Follows the circle centers along a once-around orbit of `dK` started on
/// the unit circle and compares them with the rotated dual curve.
///
/// `K` is rescaled to diameter 1 first. Requires `d ≤ 1 / C2` with
/// `C2 = (4π + 11)`.
pub fn dual_deviation(k: &ConvexPolygon, d: f64, x0_angle: f64) -> Result<DualDeviation> {
    if !k.contains_strict(Point2::ORIGIN) {
        return Err(Error::OriginOutside);
    }
    let unit = k.scaled(1.0 / k.diameter());
    let bound = 1.0 / circle_radius_threshold(&unit);
    if !(d > 0.0) || d > bound {
        return Err(Error::DTooLarge { d, bound });
    }
    let table = unit.scaled(d);
    let o = once_around(&table, Point2::unit(x0_angle), usize::MAX)?;
    let n = o.wrap_index.ok_or(Error::IncompleteOrbit)?;
    let mut samples = Vec::with_capacity(2 * n + 1);
    for s in o.samples.iter().take(2 * n + 1) {
        let theta = s.point.angle();
        let gamma = dual_radial(&table, theta)?;
        samples.push(DualSample {
            theta,
            sample: CenterSample::from_record(&s.record),
            predicted: Point2::new(-theta.sin(), theta.cos()) * gamma,
            width: table.width(theta),
        });
    }
    let sup = |f: &dyn Fn(&DualSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    Ok(DualDeviation {
        d,
        sup_dev: sup(&|s| s.sample.center.dist(s.predicted)),
        phi_defect: sup(&|s| (s.sample.phi - s.width).abs()),
        radius_defect: sup(&|s| (s.sample.radius - 2.0 / s.width).abs()),
        samples,
    })
}

/// Invariance of a point cloud under rotation by `2π / order` about the
/// origin, measured on a `res × res` raster of its bounding square.
///
/// The score is the smallest, over the non-trivial rotations, fraction of
/// occupied cells whose rotated image lands within one cell of an occupied
/// cell.
pub fn rotational_symmetry_score(points: &[Point2], order: usize, res: usize) -> f64 {
    let half = points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(0.0, f64::max) * 1.05;
    if points.is_empty() || !(half > 0.0) || order < 2 || res < 4 {
        return 0.0;
    }
    let cell = |p: Point2| -> Option<(usize, usize)> {
        let i = ((p.x + half) / (2.0 * half) * res as f64).floor();
        let j = ((p.y + half) / (2.0 * half) * res as f64).floor();
        (i >= 0.0 && j >= 0.0 && i < res as f64 && j < res as f64).then_some((i as usize, j as usize))
    };
    let mut grid = vec![false; res * res];
    for p in points {
        if let Some((i, j)) = cell(*p) {
            grid[j * res + i] = true;
        }
    }
    let center_of = |i: usize, j: usize| {
        Point2::new(
            -half + (i as f64 + 0.5) * 2.0 * half / res as f64,
            -half + (j as f64 + 0.5) * 2.0 * half / res as f64,
        )
    };
    let near = |i: usize, j: usize| {
        let lo = |k: usize| k.saturating_sub(1);
        (lo(j)..=(j + 1).min(res - 1)).any(|b| (lo(i)..=(i + 1).min(res - 1)).any(|a| grid[b * res + a]))
    };
    let occupied: Vec<(usize, usize)> = (0..res * res).filter(|&k| grid[k]).map(|k| (k % res, k / res)).collect();
    (1..order)
        .map(|r| {
            let angle = TAU * r as f64 / order as f64;
            let hits = occupied
                .iter()
                .filter(|&&(i, j)| cell(center_of(i, j).rotate(angle)).is_some_and(|(a, b)| near(a, b)))
                .count();
            hits as f64 / occupied.len() as f64
        })
        .fold(1.0, f64::min)
}

/// Rotational symmetry of order six, the symmetry of the dual of a
/// symmetrized triangle.
pub fn hexagonal_symmetry_score(points: &[Point2], res: usize) -> f64 {
    rotational_symmetry_score(points, 6, res)
}

/// Centers along once-around orbits of `dK` from `starts` equally spaced
/// angles on the unit circle.
pub fn center_cloud(k: &ConvexPolygon, d: f64, starts: usize) -> Result<Vec<Point2>> {
    let mut cloud = Vec::new();
    for s in 0..starts {
        let dev = dual_deviation(k, d, 0.1 + PI * 2.0 * s as f64 / starts as f64)?;
        cloud.extend(dev.samples.iter().map(|s| s.sample.center));
    }
    Ok(cloud)
}
