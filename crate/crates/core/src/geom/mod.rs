//! Planar primitives shared by every other module: points and directed
//! lines, convex tables, support contacts, the auxiliary circle, and ellipse
//! utilities.
//!
//! Orientation convention: tables are stored counter-clockwise and every
//! [`DirectedLine`] produced by this crate keeps the table on its left.

mod ellipse;
mod polygon;
mod primitives;
mod tangency;

pub use ellipse::EllipseFoci;
pub use polygon::{convex_hull, ConvexPolygon, PolygonMetrics, REL_EPS};
pub use primitives::{orient, wrap_angle, Circle, DirectedLine, Point2, Ray};
pub use tangency::{auxiliary_circle, support_contacts, third_support_line};

pub(crate) use tangency::{anchored_circle, common_supports, contacts, third_support, AnchoredCircle, Contact};

/// Diameter, perimeter, minimal width and aspect ratio of a table.
pub fn polygon_metrics(poly: &ConvexPolygon) -> PolygonMetrics {
    poly.metrics()
}
