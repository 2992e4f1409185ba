//! Plain-text SVG drawing and output file helpers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use olb::{ConvexPolygon, Point2};

use crate::Failure;

/// Minimal SVG canvas in world coordinates (`y` up).
pub struct Svg {
    min: Point2,
    max: Point2,
    body: String,
}

impl Svg {
    /// Canvas covering `points` with a 5% margin.
    pub fn fitting<'a>(points: impl IntoIterator<Item = &'a Point2>) -> Self {
        let (mut min, mut max) = (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN));
        for p in points {
            if p.is_finite() {
                min = Point2::new(min.x.min(p.x), min.y.min(p.y));
                max = Point2::new(max.x.max(p.x), max.y.max(p.y));
            }
        }
        if min.x > max.x {
            (min, max) = (Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0));
        }
        let pad = 0.05 * (max.x - min.x).max(max.y - min.y).max(1e-9);
        Svg {
            min: Point2::new(min.x - pad, min.y - pad),
            max: Point2::new(max.x + pad, max.y + pad),
            body: String::new(),
        }
    }

    fn span(&self) -> f64 {
        (self.max.x - self.min.x).max(self.max.y - self.min.y)
    }

    /// Stroke width or dot radius as a fraction of the canvas.
    fn unit(&self, frac: f64) -> f64 {
        self.span() * frac
    }

    fn pt(p: Point2) -> String {
        format!("{},{}", p.x, -p.y)
    }

    pub fn polygon(&mut self, poly: &ConvexPolygon, fill: &str) {
        let pts: Vec<String> = poly.vertices().iter().map(|&v| Self::pt(v)).collect();
        let w = self.unit(0.002);
        if poly.len() == 2 {
            let _ = writeln!(
                self.body,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="{w}"/>"#,
                pts.join(" ")
            );
        } else {
            let _ = writeln!(
                self.body,
                r#"<polygon points="{}" fill="{fill}" stroke="black" stroke-width="{w}"/>"#,
                pts.join(" ")
            );
        }
    }

    pub fn polyline(&mut self, points: &[Point2], stroke: &str, frac: f64) {
        if points.len() < 2 {
            return;
        }
        let pts: Vec<String> = points.iter().map(|&p| Self::pt(p)).collect();
        let w = self.unit(frac);
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{w}"/>"#,
            pts.join(" ")
        );
    }

    pub fn dots(&mut self, points: &[Point2], fill: &str, frac: f64) {
        let r = self.unit(frac);
        for p in points {
            let _ = writeln!(self.body, r#"<circle cx="{}" cy="{}" r="{r}" fill="{fill}"/>"#, p.x, -p.y);
        }
    }

    pub fn finish(self) -> String {
        let (w, h) = (self.max.x - self.min.x, self.max.y - self.min.y);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {w} {h}\" width=\"800\" height=\"{}\">\n\
             <rect x=\"{}\" y=\"{}\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.min.x,
            -self.max.y,
            (800.0 * h / w).round(),
            self.min.x,
            -self.max.y,
            self.body
        )
    }
}

/// Output file kinds recognised by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Csv,
    Svg,
    Pgm,
    Ppm,
    Json,
}

pub fn kind_of(path: &Path) -> Result<Kind, Failure> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => Ok(Kind::Csv),
        Some("svg") => Ok(Kind::Svg),
        Some("pgm") => Ok(Kind::Pgm),
        Some("ppm") => Ok(Kind::Ppm),
        Some("json") => Ok(Kind::Json),
        _ => Err(Failure::Usage(format!("unsupported output format: {}", path.display()))),
    }
}

/// Checks that every output has a kind from `allowed`.
pub fn check_outputs(outs: &[PathBuf], allowed: &[Kind]) -> Result<(), Failure> {
    for p in outs {
        let k = kind_of(p)?;
        if !allowed.contains(&k) {
            return Err(Failure::Usage(format!(
                "{} cannot be written by this command (allowed: {:?})",
                p.display(),
                allowed
            )));
        }
    }
    Ok(())
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// `{}` formatting of an optional float; empty when absent.
pub fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}
