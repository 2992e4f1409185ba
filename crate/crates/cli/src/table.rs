//! Table arguments: builtin names or a vertex file.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use olb::{ConvexPolygon, Point2};

use crate::Failure;

/// Resolves `square`, `regular:n`, `segment`, `kite:a`, `random:n:seed`, or
/// a path to a JSON or TOML document with a `vertices` array of `[x, y]`.
pub fn resolve(spec: &str) -> Result<ConvexPolygon, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |msg: String| Failure::Table(format!("table `{spec}`: {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
    let count = |s: &str| s.trim().parse::<usize>().map_err(|e| bad(format!("{s}: {e}")));
    let poly = match parts.as_slice() {
        ["square"] => Ok(ConvexPolygon::square(1.0)),
        ["segment"] => ConvexPolygon::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)),
        ["regular", n] => ConvexPolygon::regular(count(n)?, 1.0, FRAC_PI_2),
        ["kite", a] => ConvexPolygon::kite(num(a)?),
        ["random", n, seed] => {
            let seed = seed.trim().parse::<u64>().map_err(|e| bad(format!("{seed}: {e}")))?;
            ConvexPolygon::random(count(n)?, seed)
        }
        _ => return from_file(Path::new(spec)),
    };
    poly.map_err(|e| bad(e.to_string()))
}

fn from_file(path: &Path) -> Result<ConvexPolygon, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Table(format!("table `{}`: not a builtin and unreadable ({e})", path.display())))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str::<ConvexPolygon>(&text).map_err(|e| e.to_string()),
        _ => serde_json::from_str::<ConvexPolygon>(&text).map_err(|e| e.to_string()),
    };
    parsed.map_err(|e| Failure::Table(format!("table `{}`: {e}", path.display())))
}
