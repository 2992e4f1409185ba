use std::f64::consts::PI;

use olb::asymptotics::{symmetrize, width};
use olb::billiard::{orbit, step};
use olb::centers::{chi, chord_from_center, midpoint_bisector_witness};
use olb::extouch::{extouch_of, parent_residual, partners, solve_parent, Triangle, TriangleSides};
use olb::geom::{auxiliary_circle, support_contacts, DirectedLine};
use olb::singularity::{raster, RasterParams};
use olb::*;
use proptest::prelude::*;

fn polygon(n: usize, seed: u64) -> ConvexPolygon {
    ConvexPolygon::random(n, seed).unwrap()
}

/// Exterior point at radius `r` times the diameter, or `None` when the map
/// is undefined there.
fn exterior(poly: &ConvexPolygon, r: f64, theta: f64) -> Option<Point2> {
    let x = Point2::from_polar(r * poly.diameter(), theta);
    (!poly.contains_closed(x) && step(poly, x).is_ok()).then_some(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn eccentric_ellipses_have_thin_annuli(
        d in 0.1f64..10.0,
        c in 0.0f64..1.0,
        phi in -PI..PI,
        off in 0.0f64..1.0,
        psi in -PI..PI,
        a in 3.0f64..1000.0,
    ) {
        // Foci at most 2d apart, center within 2d, large enough to contain
        // the origin.
        let center = Point2::from_polar(2.0 * d * off, psi);
        let half = Point2::from_polar(d * c, phi);
        let e = EllipseFoci::new(center - half, center + half, 2.0 * a * d).unwrap();
        let (m, big_m) = e.radial_extremes();
        prop_assert!(big_m - m <= 5.0 * d * (1.0 + 1e-12), "{} > 5d", big_m - m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn foci_nesting(
        ax in -5.0f64..5.0, ay in -5.0f64..5.0,
        bx in -5.0f64..5.0, by in -5.0f64..5.0,
        phi in -PI..PI,
        s in 0.05f64..3.0, t in 0.05f64..3.0,
    ) {
        let (a, b) = (Point2::new(ax, ay), Point2::new(bx, by));
        let u = Point2::unit(phi);
        let c = b + u * s;
        let d = c + u * t;
        prop_assume!(a.dist(b) > 1e-3);
        let e1 = EllipseFoci::through(a, b, d).unwrap();
        let e2 = EllipseFoci::through(a, c, d).unwrap();
        for k in 0..256 {
            let p = e2.point_at(k as f64 * 2.0 * PI / 256.0);
            prop_assert!(e1.contains(p, 1e-9 * e1.focal_sum));
        }
    }

    #[test]
    fn confocal_hausdorff(
        cx in -3.0f64..3.0, cy in -3.0f64..3.0,
        c in 0.0f64..2.0, phi in -PI..PI,
        a1 in 4.0f64..10.0, a2 in 4.0f64..10.0,
    ) {
        let center = Point2::new(cx, cy);
        let h = Point2::from_polar(c, phi);
        let e1 = EllipseFoci::new(center - h, center + h, 2.0 * a1).unwrap();
        let e2 = EllipseFoci::new(center - h, center + h, 2.0 * a2).unwrap();
        prop_assert!(e1.eccentricity() <= 0.5 && e2.eccentricity() <= 0.5);
        let dh = e1.hausdorff(&e2, 512);
        prop_assert!(dh <= 2.0 * (a2 - a1).abs() + 1e-6, "{dh}");
    }

    #[test]
    fn auxiliary_circle_is_tangent(
        cx in -10.0f64..10.0, cy in -10.0f64..10.0,
        rho in 0.01f64..50.0,
        alpha in -PI..PI,
        gap in 0.2f64..(2.0 * PI - 0.2),
    ) {
        let center = Point2::new(cx, cy);
        let p = center + Point2::unit(alpha) * rho;
        let q = center + Point2::unit(alpha + gap) * rho;
        // Tangent lines with the circle on the right of the first and on
        // the left of the second.
        let mut tangent = DirectedLine::new(p, Point2::unit(alpha).perp()).unwrap();
        if tangent.signed_distance(center) > 0.0 {
            tangent = tangent.reversed();
        }
        let mut other = DirectedLine::new(q, Point2::unit(alpha + gap).perp()).unwrap();
        if other.signed_distance(center) < 0.0 {
            other = other.reversed();
        }
        prop_assume!(tangent.intersect(&other).is_some());
        let circ = auxiliary_circle(&other, &tangent, p).unwrap();
        prop_assert!(circ.tangency_defect(&tangent.reversed()).abs() <= 1e-10 * circ.radius);
        prop_assert!(circ.tangency_defect(&other).abs() <= 1e-10 * circ.radius);
        let foot = tangent.project(circ.center);
        prop_assert!(foot.dist(p) <= 1e-10 * p.norm().max(1.0));
    }

    #[test]
    fn support_lines_keep_the_table_on_one_side(
        n in 3usize..10, seed in 0u64..1000,
        r in 0.6f64..30.0, theta in -PI..PI,
    ) {
        let poly = polygon(n, seed);
        let d = poly.diameter();
        let x = Point2::from_polar(r * d, theta);
        prop_assume!(!poly.contains_closed(x));
        if let Ok((l, rv)) = support_contacts(&poly, x) {
            for v in [l, rv] {
                let line = DirectedLine::through(x, poly.vertex(v)).unwrap();
                let sd: Vec<f64> = poly.vertices().iter().map(|&q| line.signed_distance(q)).collect();
                let all_left = sd.iter().all(|&s| s >= -1e-9 * d);
                let all_right = sd.iter().all(|&s| s <= 1e-9 * d);
                prop_assert!(all_left || all_right);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_gon_conserves_focal_sum(
        c in 0.2f64..3.0, phi in -PI..PI,
        r in 1.5f64..20.0, theta in -PI..PI,
    ) {
        let h = Point2::from_polar(c, phi);
        let seg = ConvexPolygon::segment(-h, h).unwrap();
        let x0 = Point2::from_polar(r * c, theta);
        let o = orbit(&seg, x0, 1000, f64::INFINITY);
        let s0 = x0.dist(-h) + x0.dist(h);
        // The orbit is drawn onto the segment's line, where the construction
        // loses about eps * d / dist; only well-conditioned points count.
        let axis = h / h.norm();
        for p in o.points() {
            if p.cross(axis).abs() < 1e-4 * 2.0 * c {
                break;
            }
            let s = p.dist(-h) + p.dist(h);
            prop_assert!((s - s0).abs() <= 1e-9 * s0);
        }
    }

    #[test]
    fn orbit_labels_chain(
        n in 3usize..9, seed in 0u64..500,
        r in 1.0f64..15.0, theta in -PI..PI,
    ) {
        let poly = polygon(n, seed);
        let Some(x0) = exterior(&poly, r, theta) else { return Ok(()) };
        let o = orbit(&poly, x0, 200, f64::INFINITY);
        for w in o.samples.windows(2) {
            let (a, b) = (&w[0].record, &w[1].record);
            prop_assert_eq!(a.right_vertex, b.left_vertex);
            prop_assert_eq!(a.steady, a.left_vertex == b.right_vertex);
        }
    }

    #[test]
    fn uniform_reflection_bound(
        n in 3usize..9, seed in 0u64..500,
        r in 2.0f64..40.0, theta in -PI..PI,
    ) {
        let poly = polygon(n, seed);
        let d = poly.diameter();
        let Some(x) = exterior(&poly, r, theta) else { return Ok(()) };
        let rec = step(&poly, x).unwrap();
        prop_assert!((x.dist(rec.p) - rec.p.dist(rec.y)).abs() <= 1.5 * d);
    }

    #[test]
    fn virtual_table_gives_the_same_step(
        n in 3usize..9, seed in 0u64..500,
        r in 2.0f64..20.0, theta in -PI..PI,
    ) {
        let poly = polygon(n, seed);
        let d = poly.diameter();
        let Some(x) = exterior(&poly, r, theta) else { return Ok(()) };
        let rec = step(&poly, x).unwrap();
        let vt = ConvexPolygon::segment(rec.virtual_table.0, rec.virtual_table.1).unwrap();
        let v = step(&vt, x).unwrap();
        let tol = 1e-9 * d * 10.0f64.max(x.norm() / d);
        prop_assert!(v.circle.center.dist(rec.circle.center) < tol);
        prop_assert!((v.circle.radius - rec.circle.radius).abs() < tol);
        prop_assert!(v.y.dist(rec.y) < tol);
    }

    #[test]
    fn width_identities(n in 3usize..12, seed in 0u64..1000, theta in -PI..PI) {
        let poly = polygon(n, seed);
        prop_assert!((width(&poly, theta) - width(&poly, theta + PI)).abs() < 1e-12);
        let sym = symmetrize(&poly);
        prop_assert!((sym.support(theta) - width(&poly, theta - PI / 2.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn chord_inverts_chi(
        n in 3usize..9, seed in 0u64..500,
        r in 0.8f64..20.0, theta in -PI..PI,
    ) {
        let poly = polygon(n, seed);
        let d = poly.diameter();
        let Some(x) = exterior(&poly, r, theta) else { return Ok(()) };
        let s = chi(&poly, x).unwrap();
        let y = step(&poly, x).unwrap().y;
        if let Ok((x2, y2)) = chord_from_center(&poly, s.center) {
            let tol = 1e-8 * d * 1.0f64.max(x.norm() / d);
            prop_assert!(x2.dist(x) <= tol, "{} vs {}", x2, x);
            prop_assert!(y2.dist(y) <= tol);
        }
    }

    #[test]
    fn midpoint_is_equidistant(
        n in 3usize..9, seed in 0u64..500,
        r in 0.8f64..20.0, theta in -PI..PI,
    ) {
        let poly = polygon(n, seed);
        let d = poly.diameter();
        let Some(x) = exterior(&poly, r, theta) else { return Ok(()) };
        if let Ok(w) = midpoint_bisector_witness(&poly, x) {
            if !w.degenerate {
                prop_assert!(w.defect <= 1e-9 * d, "{}", w.defect);
            }
        }
    }

    #[test]
    fn extouch_round_trip(a in 0.5f64..3.0, b in 0.5f64..3.0, c in 0.5f64..3.0) {
        let Ok(t) = TriangleSides::new(a, b, c) else { return Ok(()) };
        prop_assume!(t.area_sq() > 1e-6);
        let sol = solve_parent(&t).unwrap();
        let parent = Triangle::from_sides(sol.sides());
        let back = extouch_of(&parent).unwrap().sides();
        for (got, want) in back.iter().zip([a, b, c]) {
            prop_assert!((got - want).abs() <= 1e-8 * want, "{:?} vs {:?}", back, (a, b, c));
        }
        prop_assert!(parent_residual(&t, sol.root_bracket.0) <= 0.0);
        prop_assert!(parent_residual(&t, sol.root_bracket.1) >= 0.0);
        prop_assert!(parent_residual(&t, t.a * (1.0 + 1e-9)) < 0.0);
        let (y, z) = partners(&t, t.a);
        prop_assert!((y - b).abs() <= 1e-12 * b.max(1.0));
        prop_assert!((z - c).abs() <= 1e-12 * c.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn raster_depth_is_monotone(n in 3usize..7, seed in 0u64..100) {
        let poly = polygon(n, seed);
        let half = 4.0 * poly.diameter();
        let shallow = raster(&poly, RasterParams::square(half, 48, 2)).unwrap();
        let deep = raster(&poly, RasterParams::square(half, 48, 5)).unwrap();
        for j in 0..48 {
            for i in 0..48 {
                prop_assert!(!shallow.is_marked(i, j) || deep.is_marked(i, j));
            }
        }
    }
}
