//! Distant orbits: once-around orbits, the annulus bound, steadiness and
//! side-extension crossings, steady-phase ellipses, and the width, support
//! and polar-dual functions of a table.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::billiard::{outer_area_step, step, OrbitSample, StepRecord, StopReason};
use crate::error::{Error, Result};
use crate::geom::{wrap_angle, ConvexPolygon, EllipseFoci, Point2};
use crate::singularity::{clockwise_extensions, counter_clockwise_extensions};

/// Default number of uniform samples on `[0, 2π)` for width and dual curves.
pub const DEFAULT_GRID: usize = 4096;

/// Forward orbit of `T²` until its argument wraps past the start ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnceAroundOrbit {
    pub table: ConvexPolygon,
    /// `x_0, x_1, …` with the step taken from each. A wrapped orbit holds
    /// `x_0 … x_{2N}`; the record of `x_{2N}` is missing only if the map
    /// fails there.
    pub samples: Vec<OrbitSample>,
    pub wrap_index: Option<usize>,
    pub start_radius: f64,
    pub reference_angle: f64,
    /// `Completed` when the orbit wrapped or ran into the cap.
    pub stop: StopReason,
}

impl OnceAroundOrbit {
    /// The points of the once-around orbit, `x_0 … x_{2N}` (every visited
    /// point when the orbit did not wrap).
    pub fn points(&self) -> Vec<Point2> {
        let mut pts: Vec<Point2> = self.samples.iter().map(|s| s.point).collect();
        match self.wrap_index {
            Some(n) => {
                if pts.len() < 2 * n + 1 {
                    pts.push(self.samples[2 * n - 1].record.y);
                }
                pts.truncate(2 * n + 1);
            }
            None => {
                if let (Some(last), StopReason::Completed) = (self.samples.last(), &self.stop) {
                    pts.push(last.record.y);
                }
            }
        }
        pts
    }

    /// Number of completed `T²` iterations.
    pub fn squared_steps(&self) -> usize {
        match self.wrap_index {
            Some(n) => n,
            None => (self.points().len() - 1) / 2,
        }
    }

    fn records(&self) -> impl Iterator<Item = &StepRecord> {
        self.samples.iter().map(|s| &s.record)
    }

    fn require_complete(&self) -> Result<usize> {
        self.wrap_index.ok_or(Error::IncompleteOrbit)
    }
}

/// Polar argument of `p` in the frame where the reference ray has angle 0,
/// in `[-π, π)`.
fn argument(p: Point2, reference: f64) -> f64 {
    wrap_angle(p.angle() - reference)
}

/// Iterates `T²` from `x` for at most `cap` squared steps.
///
/// `N` is the first count with `T^{2(N-1)}(x)` at positive and `T^{2N}(x)`
/// at non-positive argument. A failure of the very first step is returned
/// as an error; later failures end the orbit without a wrap.
pub fn once_around(poly: &ConvexPolygon, x: Point2, cap: usize) -> Result<OnceAroundOrbit> {
    if !poly.contains_closed(Point2::ORIGIN) {
        return Err(Error::OriginOutside);
    }
    let reference = x.angle();
    let mut samples: Vec<OrbitSample> = Vec::new();
    let mut cur = x;
    let mut prev_arg = 0.0;
    let mut wrap_index = None;
    let mut stop = StopReason::Completed;
    'outer: for k in 1..=cap {
        for _ in 0..2 {
            let index = samples.len();
            match step(poly, cur) {
                Ok(record) => {
                    samples.push(OrbitSample { index, point: cur, record });
                    cur = record.y;
                }
                Err(error) if index == 0 => return Err(error),
                Err(error) => {
                    stop = StopReason::Failed { index, point: cur, error };
                    break 'outer;
                }
            }
        }
        let arg = argument(cur, reference);
        if prev_arg > 0.0 && arg <= 0.0 {
            wrap_index = Some(k);
            break;
        }
        prev_arg = arg;
    }
    if wrap_index.is_some() {
        // the record of x_{2N} is part of the once-around orbit
        if let Ok(record) = step(poly, cur) {
            samples.push(OrbitSample {
                index: samples.len(),
                point: cur,
                record,
            });
        }
    }
    Ok(OnceAroundOrbit {
        table: poly.clone(),
        samples,
        wrap_index,
        start_radius: x.norm(),
        reference_angle: reference,
        stop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusStats {
    pub max_dev: f64,
    /// `4p + 3d`.
    pub c1_bound: f64,
    pub satisfied: bool,
}

/// Largest radial deviation of the once-around orbit from the start radius.
pub fn annulus_stats(o: &OnceAroundOrbit) -> Result<AnnulusStats> {
    o.require_complete()?;
    let r = o.start_radius;
    let max_dev = o.points().iter().map(|p| (p.norm() - r).abs()).fold(0.0, f64::max);
    let c1_bound = 4.0 * o.table.perimeter() + 3.0 * o.table.diameter();
    Ok(AnnulusStats {
        max_dev,
        c1_bound,
        satisfied: max_dev <= c1_bound,
    })
}

/// `C2 = (4π + 11) d`, the radius beyond which the annulus bound holds.
pub fn circle_radius_threshold(poly: &ConvexPolygon) -> f64 {
    (4.0 * PI + 11.0) * poly.diameter()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadinessCensus {
    pub unsteady_count: usize,
    /// Unsteady iff the segment `x_i x_{i+2}` meets one of the `2n` side
    /// extensions, at every checked index.
    pub crossing_consistent: bool,
    /// Indices violating that equivalence.
    pub mismatches: Vec<usize>,
    /// Unsteady iff `x_i x_{i+2}` meets a counter-clockwise extension, and
    /// `x_{i+1}` unsteady iff it meets a clockwise one.
    pub split_consistent: bool,
    pub split_mismatches: Vec<usize>,
    pub checked: usize,
}

/// Counts unsteady points of the once-around orbit and checks them against
/// crossings of side extensions.
pub fn steadiness_census(o: &OnceAroundOrbit) -> Result<SteadinessCensus> {
    let n = o.require_complete()?;
    let d = o.table.diameter();
    let pts = o.points();
    let min_r = pts.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    if min_r < 8.0 * d {
        return Err(Error::RadiusTooSmall {
            required: 8.0 * d,
            actual: min_r,
        });
    }
    let recs: Vec<&StepRecord> = o.records().take(2 * n + 1).collect();
    let unsteady_count = recs.iter().filter(|r| !r.steady).count();
    let cw = clockwise_extensions(&o.table);
    let ccw = counter_clockwise_extensions(&o.table);
    let mut mismatches = Vec::new();
    let mut split_mismatches = Vec::new();
    let mut checked = 0;
    for i in 0..recs.len().saturating_sub(1) {
        let next = recs[i + 1];
        let (a, b) = (recs[i].x, next.y);
        let hit_cw = cw.iter().any(|r| r.crosses_segment(a, b));
        let hit_ccw = ccw.iter().any(|r| r.crosses_segment(a, b));
        checked += 1;
        if !recs[i].steady != (hit_cw || hit_ccw) {
            mismatches.push(i);
        }
        if !recs[i].steady != hit_ccw || !next.steady != hit_cw {
            split_mismatches.push(i);
        }
    }
    Ok(SteadinessCensus {
        unsteady_count,
        crossing_consistent: mismatches.is_empty(),
        mismatches,
        split_consistent: split_mismatches.is_empty(),
        split_mismatches,
        checked,
    })
}

/// One jump between consecutive steady-phase ellipses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub index: usize,
    pub radius: f64,
    /// Angle `x_i f_i x_{i+1}` at the off-table end `f_i` of the virtual table.
    pub angle: f64,
    /// Hausdorff distance from the ellipse of `x_i` to the ellipse through
    /// `x_{i+1}` with foci `l_{i+1}`, `r_{i+1}`.
    pub hausdorff: f64,
    /// `2 |l_i r_{i+1}|`.
    pub bound: f64,
    /// Whether the second ellipse lies inside the first.
    pub nested: bool,
}

/// Every unsteady point of the once-around orbit that has a successor record.
pub fn unsteady_jumps(o: &OnceAroundOrbit, hausdorff_samples: usize) -> Result<Vec<Jump>> {
    let n = o.require_complete()?;
    let recs: Vec<&StepRecord> = o.records().take(2 * n + 1).collect();
    let mut out = Vec::new();
    for i in 0..recs.len().saturating_sub(1) {
        let (cur, next) = (recs[i], recs[i + 1]);
        if cur.steady {
            continue;
        }
        let f = cur.virtual_table.0;
        let angle = (cur.x - f).angle_to(cur.y - f);
        let e0 = ellipse_of(cur)?;
        // the next ellipse has the contact vertices of x_{i+1} as foci,
        // whether or not x_{i+1} is itself steady
        let e1 = EllipseFoci::through(o.table.vertex(next.left_vertex), next.p, next.x)
            .ok_or(Error::NumericalDegeneracy("point on its virtual table"))?;
        let slack = 1e-9 * e0.focal_sum;
        let nested = (0..256).all(|k| e0.contains(e1.point_at(TAU * k as f64 / 256.0), slack));
        out.push(Jump {
            index: i,
            radius: cur.x.norm(),
            angle,
            hausdorff: e0.hausdorff(&e1, hausdorff_samples),
            bound: 2.0 * o.table.vertex(cur.left_vertex).dist(o.table.vertex(next.right_vertex)),
            nested,
        });
    }
    Ok(out)
}

trait AngleTo {
    fn angle_to(self, other: Self) -> f64;
}

impl AngleTo for Point2 {
    fn angle_to(self, other: Self) -> f64 {
        self.cross(other).atan2(self.dot(other)).abs()
    }
}

fn ellipse_of(rec: &StepRecord) -> Result<EllipseFoci> {
    let (f1, f2) = rec.virtual_table;
    EllipseFoci::through(f1, f2, rec.x).ok_or(Error::NumericalDegeneracy("point on its virtual table"))
}

/// Ellipse whose foci are the virtual-table endpoints of `x`, through `x`.
pub fn steady_ellipse(poly: &ConvexPolygon, x: Point2) -> Result<EllipseFoci> {
    ellipse_of(&step(poly, x)?)
}

/// `h(θ) = max_v <v, (cos θ, sin θ)>`.
pub fn support(poly: &ConvexPolygon, theta: f64) -> Result<f64> {
    if !poly.contains_closed(Point2::ORIGIN) {
        return Err(Error::OriginOutside);
    }
    Ok(poly.support(theta))
}

/// `w(θ) = h(θ + π/2) + h(θ − π/2)`, the extent across the direction `θ`.
pub fn width(poly: &ConvexPolygon, theta: f64) -> f64 {
    poly.width(theta)
}

/// The centrally symmetric body `½(P − P)`.
pub fn symmetrize(poly: &ConvexPolygon) -> ConvexPolygon {
    poly.symmetrized()
}

/// Radial function `Γ(θ) = 2 / w(θ)` of the polar dual of the symmetrized
/// table.
pub fn dual_radial(poly: &ConvexPolygon, theta: f64) -> Result<f64> {
    if !poly.contains_strict(Point2::ORIGIN) {
        return Err(Error::OriginOutside);
    }
    Ok(2.0 / poly.width(theta))
}

/// Support and width of a table on a uniform grid of `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthProfile {
    pub table: ConvexPolygon,
    pub theta: Vec<f64>,
    pub support: Vec<f64>,
    pub width: Vec<f64>,
}

impl WidthProfile {
    pub fn new(poly: &ConvexPolygon, samples: usize) -> Self {
        let theta: Vec<f64> = (0..samples).map(|k| TAU * k as f64 / samples as f64).collect();
        Self {
            table: poly.clone(),
            support: theta.iter().map(|&t| poly.support(t)).collect(),
            width: theta.iter().map(|&t| poly.width(t)).collect(),
            theta,
        }
    }

    /// The dual radial function `2 / w` on the grid.
    pub fn dual(&self) -> Vec<f64> {
        self.width.iter().map(|w| 2.0 / w).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecklaceFit {
    /// `max |r_i − s Γ(θ_i)| / max(s Γ)` at the conventional rotation.
    pub deviation: f64,
    pub scale: f64,
    /// Rotation of the dual curve minimizing the sup deviation (diagnostic).
    pub best_rotation: f64,
    pub best_rotation_deviation: f64,
    pub points: Vec<Point2>,
}

/// Compares a distant orbit of the outer area map with the polar dual of the
/// symmetrized table.
///
/// The orbit starts at `(R, 0)` and runs until its even iterates wrap once
/// around the origin (at most `samples` squared steps). The dual curve
/// `Γ(θ) = 1 / h_s(θ + π/2)` is evaluated at each orbit point's own angle
/// and fitted by a single scale factor.
pub fn area_necklace_compare(poly: &ConvexPolygon, radius: f64, samples: usize) -> Result<NecklaceFit> {
    if !poly.contains_strict(Point2::ORIGIN) {
        return Err(Error::OriginOutside);
    }
    let sym = symmetrize(poly);
    let gamma = |t: f64| 1.0 / sym.support(t + PI / 2.0);
    let mut points = vec![Point2::new(radius, 0.0)];
    let mut prev_arg = 0.0;
    for _ in 0..samples {
        let x = *points.last().unwrap();
        let y = outer_area_step(poly, x)?;
        let z = outer_area_step(poly, y)?;
        points.push(y);
        points.push(z);
        let arg = argument(z, 0.0);
        if prev_arg > 0.0 && arg <= 0.0 {
            break;
        }
        prev_arg = arg;
    }
    let fit = |rot: f64| {
        let g: Vec<f64> = points.iter().map(|p| gamma(p.angle() + rot)).collect();
        let r: Vec<f64> = points.iter().map(|p| p.norm()).collect();
        let s = r.iter().zip(&g).map(|(r, g)| r * g).sum::<f64>() / g.iter().map(|g| g * g).sum::<f64>();
        let top = g.iter().fold(0.0f64, |m, g| m.max(s * g));
        let dev = r.iter().zip(&g).map(|(r, g)| (r - s * g).abs()).fold(0.0, f64::max) / top;
        (dev, s)
    };
    let (deviation, scale) = fit(0.0);
    let (best_rotation, best_rotation_deviation) = (0..360)
        .map(|k| {
            let rot = PI * k as f64 / 360.0;
            (rot, fit(rot).0)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    Ok(NecklaceFit {
        deviation,
        scale,
        best_rotation,
        best_rotation_deviation,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pentagon() -> ConvexPolygon {
        ConvexPolygon::regular_with_diameter(5, 1.0).unwrap()
    }

    #[test]
    fn square_once_around_wraps() {
        let sq = ConvexPolygon::square(1.0);
        let o = once_around(&sq, Point2::new(100.0, 0.0), 100_000).unwrap();
        let n = o.wrap_index.expect("wrap");
        assert_eq!(o.stop, StopReason::Completed);
        let pts = o.points();
        assert_eq!(pts.len(), 2 * n + 1);
        assert!(argument(pts[2 * n - 2], 0.0) > 0.0);
        assert!(argument(pts[2 * n], 0.0) <= 0.0);
        for k in 1..n - 1 {
            let (a, b) = (argument(pts[2 * k], 0.0), argument(pts[2 * k + 2], 0.0));
            assert!(!(a > 0.0 && b <= 0.0), "earlier wrap at {k}");
        }
    }

    #[test]
    fn cap_one_does_not_wrap() {
        let o = once_around(&pentagon(), Point2::new(50.0, 0.0), 1).unwrap();
        assert_eq!(o.wrap_index, None);
        assert_eq!(o.squared_steps(), 1);
        assert_eq!(o.points().len(), 3);
        assert_eq!(annulus_stats(&o), Err(Error::IncompleteOrbit));
    }

    #[test]
    fn once_around_needs_origin_inside() {
        let sq = ConvexPolygon::square(1.0).translated(Point2::new(5.0, 0.0));
        assert_eq!(once_around(&sq, Point2::new(50.0, 0.0), 10), Err(Error::OriginOutside));
    }

    #[test]
    fn annulus_bound_square_at_threshold() {
        let sq = ConvexPolygon::square(1.0);
        let r = circle_radius_threshold(&sq);
        for k in 0..8 {
            let x = Point2::from_polar(r, 0.3 + TAU * k as f64 / 8.0);
            let o = once_around(&sq, x, 1_000_000).unwrap();
            let s = annulus_stats(&o).unwrap();
            assert!(s.satisfied, "{s:?}");
            assert!((s.c1_bound - (32.0 + 6.0 * 2f64.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn annulus_bound_pentagon_is_loose() {
        let o = once_around(&pentagon(), Point2::new(50.0, 0.0), 1_000_000).unwrap();
        let s = annulus_stats(&o).unwrap();
        assert!(s.satisfied && s.max_dev < 0.25 * s.c1_bound, "{s:?}");
    }

    #[test]
    fn census_square_and_triangle() {
        let sq = ConvexPolygon::square(1.0);
        let tri = ConvexPolygon::regular_with_diameter(3, 1.0).unwrap();
        for (poly, bound) in [(&sq, 9), (&tri, 7)] {
            for k in 0..6 {
                let x = Point2::from_polar(60.0 * poly.diameter(), 0.1 + k as f64);
                let o = once_around(poly, x, 1_000_000).unwrap();
                let c = steadiness_census(&o).unwrap();
                assert!(c.unsteady_count <= bound, "{c:?}");
                assert!(c.split_consistent, "{c:?}");
            }
        }
    }

    #[test]
    fn census_refuses_close_orbits() {
        let sq = ConvexPolygon::square(1.0);
        let o = once_around(&sq, Point2::new(12.0, 0.3), 100_000).unwrap();
        assert!(matches!(steadiness_census(&o), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn steady_ellipse_of_two_gon() {
        let seg = ConvexPolygon::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        let e = steady_ellipse(&seg, Point2::new(0.0, 2.0)).unwrap();
        assert!((e.focal_sum - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        let foci = [e.f1, e.f2];
        assert!(foci.contains(&Point2::new(-1.0, 0.0)) && foci.contains(&Point2::new(1.0, 0.0)));
    }

    #[test]
    fn steady_runs_share_an_ellipse() {
        let sq = ConvexPolygon::square(1.0);
        let o = once_around(&sq, Point2::new(40.0, 1.3), 100_000).unwrap();
        let d = sq.diameter();
        let recs: Vec<_> = o.records().collect();
        let mut runs = 0;
        for w in recs.windows(2) {
            if w[0].steady && w[1].steady {
                let (e0, e1) = (ellipse_of(w[0]).unwrap(), ellipse_of(w[1]).unwrap());
                assert!((e0.focal_sum - e1.focal_sum).abs() < 1e-8 * d);
                let same = (e0.f1.dist(e1.f1) < 1e-8 * d && e0.f2.dist(e1.f2) < 1e-8 * d)
                    || (e0.f1.dist(e1.f2) < 1e-8 * d && e0.f2.dist(e1.f1) < 1e-8 * d);
                assert!(same);
                runs += 1;
            }
        }
        assert!(runs > 10);
    }

    #[test]
    fn jumps_are_nested_and_bounded() {
        for poly in [ConvexPolygon::square(1.0), pentagon()] {
            let d = poly.diameter();
            let o = once_around(&poly, Point2::new(30.0 * d, 0.4 * d), 1_000_000).unwrap();
            let jumps = unsteady_jumps(&o, 512).unwrap();
            assert!(!jumps.is_empty());
            let mut total = 0.0;
            for j in &jumps {
                assert!(j.angle >= 2.0 * PI / 3.0 - 1e-9, "{j:?}");
                assert!(j.nested, "{j:?}");
                assert!(j.hausdorff <= j.bound + 1e-6 * d, "{j:?}");
                total += j.hausdorff;
            }
            assert!(total <= 4.0 * poly.perimeter());
        }
    }

    #[test]
    fn support_width_dual_on_square() {
        let sq = ConvexPolygon::square(1.0);
        assert!((support(&sq, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((width(&sq, 0.0) - 2.0).abs() < 1e-15);
        assert!((dual_radial(&sq, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((dual_radial(&sq, PI / 4.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        for k in 0..100 {
            let t = 0.0631 * k as f64;
            assert!((width(&sq, t) - 2.0 * (t.sin().abs() + t.cos().abs())).abs() < 1e-12);
        }
        let off = sq.translated(Point2::new(3.0, 0.0));
        assert_eq!(dual_radial(&off, 0.0), Err(Error::OriginOutside));
        assert_eq!(support(&off, 0.0), Err(Error::OriginOutside));
    }

    #[test]
    fn triangle_symmetrizes_to_hexagon() {
        let tri = ConvexPolygon::regular(3, 1.0, 0.2).unwrap();
        let hex = symmetrize(&tri);
        assert_eq!(hex.len(), 6);
        let e: Vec<f64> = (0..6).map(|i| hex.vertex(i).dist(hex.vertex(i + 1))).collect();
        assert!(e.iter().all(|l| (l - e[0]).abs() < 1e-12));
    }

    #[test]
    fn width_profile_identities() {
        let poly = ConvexPolygon::random(7, 11).unwrap();
        let prof = WidthProfile::new(&poly, DEFAULT_GRID);
        let sym = symmetrize(&poly);
        let m = DEFAULT_GRID / 2;
        let wmin = poly.min_width();
        for k in 0..DEFAULT_GRID {
            let t = prof.theta[k];
            let w = prof.width[k];
            assert!((w - (poly.support(t + PI / 2.0) + poly.support(t - PI / 2.0))).abs() < 1e-12);
            assert!((w - prof.width[(k + m) % DEFAULT_GRID]).abs() < 1e-12);
            assert!(w >= wmin - 1e-12);
            assert!((sym.support(t) - poly.width(t - PI / 2.0) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn area_necklaces_follow_the_dual() {
        let tri = ConvexPolygon::regular_with_diameter(3, 1.0).unwrap();
        let sq = ConvexPolygon::square(0.5);
        let twenty = ConvexPolygon::regular_with_diameter(20, 1.0).unwrap();
        for poly in [tri, sq, twenty] {
            let fit = area_necklace_compare(&poly, 100.0 * poly.diameter(), 1_000_000).unwrap();
            assert!(fit.deviation <= 0.05, "{:?}", (fit.deviation, fit.best_rotation));
        }
    }
}
