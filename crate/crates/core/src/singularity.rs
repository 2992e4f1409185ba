//! Side extensions, singularity rasters and box counting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::step;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Point2, Ray};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayMode {
    /// The clockwise extension of each side, where `T` is undefined.
    MapSingular,
    /// Both extensions of each side.
    AllExtensions,
}

/// Side extensions of the table.
///
/// The clockwise extension of side `v_i v_{i+1}` leaves `v_i` away from
/// `v_{i+1}`; the counter-clockwise one leaves `v_{i+1}` away from `v_i`. A
/// segment has one side, and both modes return the two rays that make up the
/// rest of its line.
pub fn singular_rays(poly: &ConvexPolygon, mode: RayMode) -> Vec<Ray> {
    let n = poly.len();
    if poly.is_segment() {
        let (a, b) = (poly.vertex(0), poly.vertex(1));
        return vec![Ray::new(a, a - b).unwrap(), Ray::new(b, b - a).unwrap()];
    }
    let mut rays = Vec::with_capacity(2 * n);
    rays.extend(clockwise_extensions(poly));
    if mode == RayMode::AllExtensions {
        rays.extend(counter_clockwise_extensions(poly));
    }
    rays
}

/// Ray `i` extends side `v_i v_{i+1}` past `v_i`.
pub fn clockwise_extensions(poly: &ConvexPolygon) -> Vec<Ray> {
    (0..poly.len())
        .map(|i| {
            let (a, b) = (poly.vertex(i), poly.vertex(i + 1));
            Ray::new(a, a - b).unwrap()
        })
        .collect()
}

/// Ray `i` extends side `v_i v_{i+1}` past `v_{i+1}`.
pub fn counter_clockwise_extensions(poly: &ConvexPolygon) -> Vec<Ray> {
    (0..poly.len())
        .map(|i| {
            let (a, b) = (poly.vertex(i), poly.vertex(i + 1));
            Ray::new(b, b - a).unwrap()
        })
        .collect()
}

/// Rectangle of the plane sampled at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterParams {
    pub min: Point2,
    pub max: Point2,
    pub nx: usize,
    pub ny: usize,
    pub depth: usize,
    /// Thickening of the singular rays; `None` means half a cell diagonal.
    pub eps: Option<f64>,
}

impl RasterParams {
    /// Square window `[-half, half]²` with `res × res` cells.
    pub fn square(half: f64, res: usize, depth: usize) -> Self {
        Self {
            min: Point2::new(-half, -half),
            max: Point2::new(half, half),
            nx: res,
            ny: res,
            depth,
            eps: None,
        }
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.max.x - self.min.x) / self.nx as f64,
            (self.max.y - self.min.y) / self.ny as f64,
        )
    }

    pub fn eps(&self) -> f64 {
        let (w, h) = self.cell_size();
        self.eps.unwrap_or(0.5 * w.hypot(h))
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point2 {
        let (w, h) = self.cell_size();
        Point2::new(self.min.x + (i as f64 + 0.5) * w, self.min.y + (j as f64 + 0.5) * h)
    }

    /// Cell containing `p`, if inside the window.
    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let (w, h) = self.cell_size();
        let i = ((p.x - self.min.x) / w).floor();
        let j = ((p.y - self.min.y) / h).floor();
        (i >= 0.0 && j >= 0.0 && i < self.nx as f64 && j < self.ny as f64).then_some((i as usize, j as usize))
    }

    fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn validate(&self) -> Result<()> {
        let finite = self.min.is_finite() && self.max.is_finite();
        if !finite || !(self.max.x > self.min.x) || !(self.max.y > self.min.y) {
            return Err(Error::InvalidArgument("empty raster window".into()));
        }
        if self.nx < 16 || self.ny < 16 {
            return Err(Error::InvalidArgument("raster resolution below 16".into()));
        }
        if !(self.eps() > 0.0) {
            return Err(Error::InvalidArgument("thickening must be positive".into()));
        }
        Ok(())
    }
}

/// Depth-stamped raster: `0` is unmarked, `k + 1` marks a cell whose orbit
/// first came within `eps` of a singular ray after `k` steps. Row `j = 0` is
/// the bottom of the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterGrid {
    pub params: RasterParams,
    pub cells: Vec<u16>,
}

impl RasterGrid {
    pub fn empty(params: RasterParams) -> Self {
        Self {
            cells: vec![0; params.nx * params.ny],
            params,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.cells[j * self.params.nx + i]
    }

    pub fn is_marked(&self, i: usize, j: usize) -> bool {
        self.get(i, j) != 0
    }

    pub fn marked_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    pub fn marked_fraction(&self) -> f64 {
        self.marked_count() as f64 / self.cells.len() as f64
    }

    /// `(i, j, depth)` for every marked cell, row by row.
    pub fn marked(&self) -> impl Iterator<Item = (usize, usize, u16)> + '_ {
        let nx = self.params.nx;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(k, &c)| (k % nx, k / nx, c - 1))
    }

    /// Binary PGM; unmarked cells are white, deeper stamps are lighter.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (nx, ny) = (self.params.nx, self.params.ny);
        let top = self.cells.iter().copied().max().unwrap_or(0).max(1) as u32;
        let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
        for j in (0..ny).rev() {
            for i in 0..nx {
                let c = self.get(i, j) as u32;
                out.push(if c == 0 { 255 } else { (200 * (c - 1) / top) as u8 });
            }
        }
        out
    }

    /// Binary PPM with one hue per depth.
    pub fn to_ppm(&self) -> Vec<u8> {
        let (nx, ny) = (self.params.nx, self.params.ny);
        let mut out = format!("P6\n{nx} {ny}\n255\n").into_bytes();
        for j in (0..ny).rev() {
            for i in 0..nx {
                let c = self.get(i, j);
                out.extend_from_slice(&if c == 0 { [255, 255, 255] } else { palette(c - 1) });
            }
        }
        out
    }

    /// `i,j,depth` lines for the marked cells.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,depth\n");
        for (i, j, d) in self.marked() {
            s.push_str(&format!("{i},{j},{d}\n"));
        }
        s
    }
}

fn palette(depth: u16) -> [u8; 3] {
    const COLORS: [[u8; 3]; 8] = [
        [20, 20, 20],
        [31, 119, 180],
        [214, 39, 40],
        [44, 160, 44],
        [148, 103, 189],
        [255, 127, 14],
        [23, 190, 207],
        [140, 86, 75],
    ];
    COLORS[depth as usize % COLORS.len()]
}

/// First step at which the forward orbit of `x` comes within `eps` of a
/// map-singular ray, if it does so within `depth` steps without leaving the
/// window.
fn first_hit(poly: &ConvexPolygon, rays: &[Ray], params: &RasterParams, eps: f64, x: Point2) -> Option<u16> {
    if poly.contains_closed(x) {
        return None;
    }
    let mut x = x;
    for k in 0..=params.depth {
        if !params.contains(x) {
            return None;
        }
        if rays.iter().any(|r| r.distance(x) <= eps) {
            return Some(k as u16);
        }
        if k == params.depth {
            break;
        }
        x = step(poly, x).ok()?.y;
    }
    None
}

/// Marks each cell with the first step at which the orbit of its center
/// comes within `eps` of a map-singular ray.
///
/// Rows are computed in parallel; the grid does not depend on the number of
/// threads.
pub fn raster(poly: &ConvexPolygon, params: RasterParams) -> Result<RasterGrid> {
    raster_with_rays(poly, params, RayMode::MapSingular)
}

/// [`raster`] against the rays selected by `mode`.
pub fn raster_with_rays(poly: &ConvexPolygon, params: RasterParams, mode: RayMode) -> Result<RasterGrid> {
    params.validate()?;
    if params.depth >= u16::MAX as usize {
        return Err(Error::InvalidArgument("depth too large".into()));
    }
    let rays = singular_rays(poly, mode);
    let eps = params.eps();
    let cells: Vec<u16> = (0..params.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let rays = &rays;
            (0..params.nx).map(move |i| {
                first_hit(poly, rays, &params, eps, params.cell_center(i, j)).map_or(0, |k| k + 1)
            })
        })
        .collect();
    Ok(RasterGrid { params, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub slope: f64,
    /// Coefficient of determination of the log-log fit.
    pub r2: f64,
    /// `(δ, N(δ))` with `δ` relative to the window's longer side.
    pub counts: Vec<(f64, usize)>,
}

/// Box-counting slope of the marked cells over dyadic box sizes `2^k`
/// cells, keeping scales with at least four boxes along the shorter side.
pub fn box_dimension(grid: &RasterGrid) -> Result<BoxDimension> {
    let marked = grid.marked_count();
    if marked < 1000 {
        return Err(Error::TooSparse(marked));
    }
    let (nx, ny) = (grid.params.nx, grid.params.ny);
    let side = nx.max(ny) as f64;
    let mut counts = Vec::new();
    let mut size = 1usize;
    while nx.min(ny) / size >= 4 {
        let bx = nx.div_ceil(size);
        let mut boxes = vec![false; bx * ny.div_ceil(size)];
        for (i, j, _) in grid.marked() {
            boxes[(j / size) * bx + i / size] = true;
        }
        counts.push((size as f64 / side, boxes.iter().filter(|&&b| b).count()));
        size *= 2;
    }
    if counts.len() < 5 {
        return Err(Error::InvalidArgument("fewer than five dyadic scales".into()));
    }
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(d, n)| ((1.0 / d).ln(), (n as f64).ln())).collect();
    let (slope, r2) = least_squares(&pts);
    Ok(BoxDimension { slope, r2, counts })
}

/// Box-counting slope of a point set rasterized at `res × res` over
/// `[min, max]`.
pub fn box_dimension_of_points(points: &[Point2], min: Point2, max: Point2, res: usize) -> Result<BoxDimension> {
    box_dimension(&mark_points(points, min, max, res)?)
}

fn mark_points(points: &[Point2], min: Point2, max: Point2, res: usize) -> Result<RasterGrid> {
    let params = RasterParams {
        min,
        max,
        nx: res,
        ny: res,
        depth: 0,
        eps: None,
    };
    params.validate()?;
    let mut grid = RasterGrid::empty(params);
    for p in points {
        if let Some((i, j)) = params.cell_of(*p) {
            grid.cells[j * res + i] = 1;
        }
    }
    Ok(grid)
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureOverlap {
    /// Fraction of orbit cells that are singularity cells.
    pub orbit_in_singular: f64,
    /// Fraction of singularity cells visited by the orbit.
    pub singular_in_orbit: f64,
    /// The smaller of the two.
    pub overlap: f64,
    pub orbit_cells: usize,
    pub singular_cells: usize,
}

/// Rasterizes the forward orbit of `x0` next to the singularity raster and
/// measures how much the two marked sets agree.
pub fn orbit_closure_compare(
    poly: &ConvexPolygon,
    x0: Point2,
    iterations: usize,
    params: RasterParams,
) -> Result<ClosureOverlap> {
    let sing = raster(poly, params)?;
    let mut visited = vec![false; params.nx * params.ny];
    let mut x = x0;
    for k in 0..iterations {
        if let Some((i, j)) = params.cell_of(x) {
            visited[j * params.nx + i] = true;
        }
        if k + 1 == iterations {
            break;
        }
        match step(poly, x) {
            Ok(rec) => x = rec.y,
            Err(e) if k == 0 => return Err(e),
            Err(_) => break,
        }
    }
    let orbit_cells = visited.iter().filter(|&&v| v).count();
    let singular_cells = sing.marked_count();
    let both = visited.iter().zip(&sing.cells).filter(|(&v, &c)| v && c != 0).count();
    let frac = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let orbit_in_singular = frac(both, orbit_cells);
    let singular_in_orbit = frac(both, singular_cells);
    Ok(ClosureOverlap {
        orbit_in_singular,
        singular_in_orbit,
        overlap: orbit_in_singular.min(singular_in_orbit),
        orbit_cells,
        singular_cells,
    })
}
