//! Outer length billiards around convex polygons.
//!
//! The map `T` sends an exterior point `x` to `y = T(x)` by drawing the two
//! support lines through `x`, the circle tangent to both that touches the
//! table at the contact vertex of the second line, and the third common
//! support line of that circle and the table. The modules cover the map and
//! its inverse ([`billiard`]), once-around asymptotics ([`asymptotics`]), the
//! circle-center dynamics ([`centers`]), the extouch inverse problem
//! ([`extouch`]), singularity rasters ([`singularity`]) and the square escape
//! experiment ([`escape`]).

pub mod error;
pub mod geom;
pub mod billiard;
pub mod roots;
pub mod asymptotics;
pub mod centers;
pub mod extouch;
pub mod singularity;
pub mod escape;

pub use error::{Error, Result};
pub use geom::{Circle, ConvexPolygon, DirectedLine, EllipseFoci, Point2};
