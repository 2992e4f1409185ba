//! One function per subcommand. Each returns a JSON report and writes the
//! requested files.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::PathBuf;

use olb::asymptotics::{annulus_stats, circle_radius_threshold, once_around, steadiness_census, WidthProfile};
use olb::billiard::{orbit, StopReason};
use olb::centers::{center_cloud, dual_deviation, hexagonal_symmetry_score};
use olb::escape::{apply_word_traced, census, fit_constants, word_for, EscapeFrame, FitParams};
use olb::extouch::{place_parent, solve_parent, Triangle, TriangleSides};
use olb::singularity::{
    box_dimension, box_dimension_of_points, raster_with_rays, RasterGrid, RasterParams, RayMode,
};
use olb::{ConvexPolygon, Error, Point2};
use serde_json::{json, Value};

use crate::render::{check_outputs, kind_of, opt, write, Kind, Svg};
use crate::{
    CentersArgs, Command, DimensionArgs, DualCurveArgs, EscapeArgs, ExtouchArgs, Failure, FrameChoice,
    OnceAroundArgs, OrbitArgs, RayChoice, RunConfig, SingularityArgs, TableArg,
};

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Value, Failure> {
    match cmd {
        Command::Orbit(a) => orbit_cmd(a, cfg),
        Command::Singularity(a) => singularity_cmd(a, cfg),
        Command::OnceAround(a) => once_around_cmd(a, cfg),
        Command::Centers(a) => centers_cmd(a, cfg),
        Command::Extouch(a) => extouch_cmd(a),
        Command::Escape(a) => escape_cmd(a, cfg),
        Command::DualCurve(a) => dual_curve_cmd(a, cfg),
        Command::Dimension(a) => dimension_cmd(a, cfg),
    }
}

/// `key: value` lines, nested keys joined by dots.
pub fn plain(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::Array(a) => {
                let items: Vec<String> = a.iter().map(scalar).collect();
                let _ = writeln!(out, "{prefix}: {}", items.join(", "));
            }
            _ => {
                let _ = writeln!(out, "{prefix}: {}", scalar(v));
            }
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn lib(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(m) => Failure::Usage(m),
        Error::InvalidPolygon(m) => Failure::Table(m),
        other => Failure::Numeric(other.to_string()),
    }
}

fn table(arg: &TableArg, cfg: &RunConfig, default: &str) -> Result<ConvexPolygon, Failure> {
    let spec = arg.table.as_deref().or(cfg.table.as_deref()).unwrap_or(default);
    crate::table::resolve(spec)
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize, Failure> {
    if v >= min {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("--{name} must be at least {min}, got {v}")))
    }
}

/// Exactly `N` comma-separated values for `--name`.
fn fixed<T: Copy, const N: usize>(name: &str, v: &[T]) -> Result<[T; N], Failure> {
    v.try_into()
        .map_err(|_| Failure::Usage(format!("--{name} takes {N} comma-separated values, got {}", v.len())))
}

fn window(v: Option<&[f64]>, cfg: Option<[f64; 4]>, default: [f64; 4]) -> Result<[f64; 4], Failure> {
    let w = match v {
        Some(v) => fixed("window", v)?,
        None => cfg.unwrap_or(default),
    };
    if !(w[2] > w[0] && w[3] > w[1]) || w.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage(format!("window {w:?} must satisfy min < max")));
    }
    Ok(w)
}

fn polygon_json(poly: &ConvexPolygon) -> Value {
    json!({
        "vertices": poly.vertices().iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
        "diameter": poly.diameter(),
    })
}

fn pt(p: Point2) -> [f64; 2] {
    [p.x, p.y]
}

/// Writes `report` to each `.json` output.
fn write_json_outputs(outs: &[PathBuf], report: &Value) -> Result<(), Failure> {
    for p in outs {
        if kind_of(p)? == Kind::Json {
            write(p, serde_json::to_string_pretty(report).expect("reports serialize") + "\n")?;
        }
    }
    Ok(())
}

fn stop_text(stop: &StopReason) -> String {
    match stop {
        StopReason::Completed => "completed".into(),
        StopReason::Escaped { index, .. } => format!("left the stop radius at step {index}"),
        StopReason::Failed { index, error, .. } => format!("stopped at step {index}: {error}"),
    }
}

fn orbit_cmd(a: &OrbitArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let poly = table(&a.table, cfg, "square")?;
    let seed = match &a.seed {
        Some(v) => fixed("seed", v)?,
        None => cfg.seed.ok_or_else(|| Failure::Usage("--seed x,y is required".into()))?,
    };
    let iters = at_least("iters", a.iters.or(cfg.iters).unwrap_or(1000), 1)?;
    let stop_radius = a.stop_radius.or(cfg.stop_radius).unwrap_or(f64::INFINITY);
    if !(stop_radius > 0.0) {
        return Err(Failure::Usage(format!("--stop-radius must be positive, got {stop_radius}")));
    }
    check_outputs(&a.out, &[Kind::Csv, Kind::Svg, Kind::Json])?;

    let x0 = Point2::new(seed[0], seed[1]);
    let o = orbit(&poly, x0, iters, stop_radius);
    if o.samples.is_empty() {
        if let StopReason::Failed { error, .. } = &o.stop {
            return Err(Failure::Numeric(format!("map undefined at the seed: {error}")));
        }
    }
    let pts = o.points();
    let steady = o.samples.iter().filter(|s| s.record.steady).count();
    let radii = pts.iter().chain([&x0]).map(|p| p.norm());
    let report = json!({
        "command": "orbit",
        "table": polygon_json(&poly),
        "seed": seed,
        "steps": o.samples.len(),
        "stop": stop_text(&o.stop),
        "final_point": pt(*pts.last().unwrap_or(&x0)),
        "steady_fraction": if o.samples.is_empty() { 0.0 } else { steady as f64 / o.samples.len() as f64 },
        "min_radius": radii.clone().fold(f64::INFINITY, f64::min),
        "max_radius": radii.fold(0.0, f64::max),
    });
    for p in &a.out {
        match kind_of(p)? {
            Kind::Csv => {
                let mut csv = String::from("i,x,y,l,r,s,steady\n");
                for (i, q) in pts.iter().enumerate() {
                    match o.samples.get(i) {
                        Some(s) => {
                            let [l, r, t] = s.record.piece_label;
                            let _ = writeln!(csv, "{i},{},{},{l},{r},{t},{}", q.x, q.y, s.record.steady);
                        }
                        None => {
                            let _ = writeln!(csv, "{i},{},{},,,,", q.x, q.y);
                        }
                    }
                }
                write(p, csv)?;
            }
            Kind::Svg => {
                let mut all = pts.clone();
                all.extend_from_slice(poly.vertices());
                let mut svg = Svg::fitting(&all);
                svg.polygon(&poly, "#dddddd");
                let even: Vec<Point2> = pts.iter().step_by(2).copied().collect();
                let odd: Vec<Point2> = pts.iter().skip(1).step_by(2).copied().collect();
                svg.polyline(&even, "#1f4e9c", 0.001);
                svg.dots(&odd, "#c0392b", 0.002);
                write(p, svg.finish())?;
            }
            _ => {}
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

fn singularity_cmd(a: &SingularityArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let poly = table(&a.table, cfg, "regular:5")?;
    let depth = a.depth.or(cfg.depth).unwrap_or(10);
    let res = at_least("res", a.res.or(cfg.res).unwrap_or(512), 16)?;
    let half = 8.0 * poly.diameter();
    let w = window(a.window.as_deref(), cfg.window, [-half, -half, half, half])?;
    let eps = a.epsilon.or(cfg.epsilon).map(|e| positive("epsilon", e)).transpose()?;
    let rays = a.rays.or(cfg.rays).unwrap_or(RayChoice::Map);
    check_outputs(&a.out, &[Kind::Pgm, Kind::Ppm, Kind::Csv, Kind::Json])?;

    let params = RasterParams {
        min: Point2::new(w[0], w[1]),
        max: Point2::new(w[2], w[3]),
        nx: res,
        ny: res,
        depth,
        eps,
    };
    let mode = match rays {
        RayChoice::Map => RayMode::MapSingular,
        RayChoice::All => RayMode::AllExtensions,
    };
    let grid = raster_with_rays(&poly, params, mode).map_err(lib)?;
    let report = raster_report(&poly, &grid, "singularity");
    for p in &a.out {
        match kind_of(p)? {
            Kind::Pgm => write(p, grid.to_pgm())?,
            Kind::Ppm => write(p, grid.to_ppm())?,
            Kind::Csv => write(p, grid.to_csv())?,
            _ => {}
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

fn raster_report(poly: &ConvexPolygon, grid: &RasterGrid, command: &str) -> Value {
    let p = grid.params;
    let mut per_depth = vec![0usize; p.depth + 1];
    for (_, _, k) in grid.marked() {
        per_depth[k as usize] += 1;
    }
    json!({
        "command": command,
        "table": polygon_json(poly),
        "window": [p.min.x, p.min.y, p.max.x, p.max.y],
        "res": p.nx,
        "depth": p.depth,
        "epsilon": p.eps(),
        "marked_cells": grid.marked_count(),
        "marked_fraction": grid.marked_fraction(),
        "first_hits_per_step": per_depth,
    })
}

fn once_around_cmd(a: &OnceAroundArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let poly = table(&a.table, cfg, "square")?;
    let radius = positive("radius", a.radius.or(cfg.radius).unwrap_or_else(|| circle_radius_threshold(&poly)))?;
    let starts = at_least("starts", a.starts.or(cfg.starts).unwrap_or(8), 1)?;
    let cap = at_least("iters", a.iters.or(cfg.iters).unwrap_or(100_000), 1)?;
    check_outputs(&a.out, &[Kind::Csv, Kind::Json])?;

    let mut rows = Vec::new();
    let mut csv = String::from(
        "start,angle,squared_steps,max_dev,c1_bound,satisfied,unsteady,crossing_consistent,split_consistent,error\n",
    );
    for k in 0..starts {
        let angle = 0.1 + TAU * k as f64 / starts as f64;
        let o = once_around(&poly, Point2::from_polar(radius, angle), cap).map_err(lib)?;
        let stats = annulus_stats(&o);
        let cen = steadiness_census(&o);
        let err = [stats.as_ref().err(), cen.as_ref().err()]
            .into_iter()
            .flatten()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        let row = json!({
            "angle": angle,
            "squared_steps": o.squared_steps(),
            "max_dev": stats.as_ref().ok().map(|s| s.max_dev),
            "c1_bound": stats.as_ref().ok().map(|s| s.c1_bound),
            "satisfied": stats.as_ref().ok().map(|s| s.satisfied),
            "unsteady": cen.as_ref().ok().map(|c| c.unsteady_count),
            "crossing_consistent": cen.as_ref().ok().map(|c| c.crossing_consistent),
            "split_consistent": cen.as_ref().ok().map(|c| c.split_consistent),
            "error": if err.is_empty() { Value::Null } else { Value::String(err.clone()) },
        });
        let _ = writeln!(
            csv,
            "{k},{angle},{},{},{},{},{},{},{},{}",
            o.squared_steps(),
            opt(stats.as_ref().ok().map(|s| s.max_dev)),
            opt(stats.as_ref().ok().map(|s| s.c1_bound)),
            stats.as_ref().map(|s| s.satisfied.to_string()).unwrap_or_default(),
            cen.as_ref().map(|c| c.unsteady_count.to_string()).unwrap_or_default(),
            cen.as_ref().map(|c| c.crossing_consistent.to_string()).unwrap_or_default(),
            cen.as_ref().map(|c| c.split_consistent.to_string()).unwrap_or_default(),
            err.replace(',', ";"),
        );
        rows.push(row);
    }
    let report = json!({
        "command": "once-around",
        "table": polygon_json(&poly),
        "radius": radius,
        "starts": rows,
    });
    for p in &a.out {
        if kind_of(p)? == Kind::Csv {
            write(p, &csv)?;
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

fn centers_cmd(a: &CentersArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let poly = table(&a.table, cfg, "regular:5")?;
    let scales = a.d_scale.clone().or_else(|| cfg.d_scale.clone()).unwrap_or_else(|| vec![0.01]);
    if scales.is_empty() {
        return Err(Failure::Usage("--d-scale needs at least one value".into()));
    }
    for &d in &scales {
        positive("d-scale", d)?;
    }
    let starts = at_least("starts", a.starts.or(cfg.starts).unwrap_or(8), 1)?;
    check_outputs(&a.out, &[Kind::Svg, Kind::Csv, Kind::Json])?;

    let mut devs = Vec::new();
    let mut first = None;
    for &d in &scales {
        let dev = dual_deviation(&poly, d, 0.1).map_err(lib)?;
        devs.push(json!({
            "d": d,
            "sup_dev": dev.sup_dev,
            "phi_defect": dev.phi_defect,
            "radius_defect": dev.radius_defect,
            "samples": dev.samples.len(),
        }));
        if first.is_none() {
            first = Some(dev);
        }
    }
    let cloud = center_cloud(&poly, scales[0], starts).map_err(lib)?;
    let report = json!({
        "command": "centers",
        "table": polygon_json(&poly),
        "scales": devs,
        "cloud_points": cloud.len(),
        "hexagonal_score": hexagonal_symmetry_score(&cloud, 128),
    });
    let unit = poly.scaled(1.0 / poly.diameter());
    let prof = WidthProfile::new(&unit, 1024);
    let curve: Vec<Point2> = prof
        .theta
        .iter()
        .zip(prof.dual())
        .map(|(&t, g)| Point2::new(-t.sin(), t.cos()) * g)
        .collect();
    for p in &a.out {
        match kind_of(p)? {
            Kind::Svg => {
                let mut all = cloud.clone();
                all.extend_from_slice(&curve);
                let mut svg = Svg::fitting(&all);
                let mut closed = curve.clone();
                closed.push(curve[0]);
                svg.polyline(&closed, "#1f4e9c", 0.002);
                svg.dots(&cloud, "#c0392b", 0.002);
                write(p, svg.finish())?;
            }
            Kind::Csv => {
                let dev = first.as_ref().expect("at least one scale");
                let mut csv = String::from("theta,cx,cy,px,py,radius,phi,width\n");
                for s in &dev.samples {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{}",
                        s.theta,
                        s.sample.center.x,
                        s.sample.center.y,
                        s.predicted.x,
                        s.predicted.y,
                        s.sample.radius,
                        s.sample.phi,
                        s.width
                    );
                }
                write(p, csv)?;
            }
            _ => {}
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

fn extouch_cmd(a: &ExtouchArgs) -> Result<Value, Failure> {
    let sides: [f64; 3] = fixed("sides", &a.sides)?;
    check_outputs(&a.out, &[Kind::Svg, Kind::Json])?;
    let t = TriangleSides::new(sides[0], sides[1], sides[2])
        .map_err(|e| Failure::Table(format!("sides {sides:?}: {e}")))?;
    let sol = solve_parent(&t).map_err(lib)?;
    let q = Triangle::from_sides(t);
    let placed = place_parent(&q).map_err(lib)?;
    let report = json!({
        "command": "extouch",
        "extouch_sides": [t.a, t.b, t.c],
        "parent_sides": [sol.x, sol.y, sol.z],
        "residual": sol.residual,
        "root_bracket": [sol.root_bracket.0, sol.root_bracket.1],
        "registration_error": placed.registration_error,
        "orbit_defect": placed.orbit_defect,
        "parent_vertices": placed.parent.vertices.iter().map(|&v| pt(v)).collect::<Vec<_>>(),
    });
    for p in &a.out {
        if kind_of(p)? == Kind::Svg {
            let mut all = placed.parent.vertices.to_vec();
            all.extend_from_slice(&q.vertices);
            let mut svg = Svg::fitting(&all);
            if let Ok(parent) = placed.parent.to_polygon() {
                svg.polygon(&parent, "#eeeeee");
            }
            if let Ok(inner) = q.to_polygon() {
                svg.polygon(&inner, "#9cc3e6");
            }
            write(p, svg.finish())?;
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

fn escape_cmd(a: &EscapeArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let defaults = FitParams::default();
    let w = window(
        a.window.as_deref(),
        cfg.window,
        [defaults.window_min.0, defaults.window_min.1, defaults.window_max.0, defaults.window_max.1],
    )?;
    let range = match &a.n_range {
        Some(v) => fixed("n-range", v)?,
        None => cfg.n_range.unwrap_or([defaults.n_min, defaults.n_max]),
    };
    let frame = match a.frame.or(cfg.frame).unwrap_or(FrameChoice::Strip) {
        FrameChoice::Strip => EscapeFrame::STRIP,
        FrameChoice::Standard => EscapeFrame::STANDARD,
    };
    let params = FitParams {
        window_min: (w[0], w[1]),
        window_max: (w[2], w[3]),
        grid_step: positive("grid-step", a.grid_step.or(cfg.grid_step).unwrap_or(defaults.grid_step))?,
        n_min: range[0],
        n_max: range[1],
        frame,
        ..defaults
    };
    let samples = a.census.or(cfg.census).unwrap_or(100_000);
    check_outputs(&a.out, &[Kind::Csv, Kind::Svg, Kind::Json])?;

    let census_json = if samples > 0 {
        let c = census(samples, 30.0, 1);
        json!({
            "samples": c.samples,
            "singular": c.singular,
            "labels": c.pieces.iter().map(|(l, e)| json!({
                "label": l.to_string(), "count": e.count, "max_radius": e.max_radius,
            })).collect::<Vec<_>>(),
            "distinct": c.pieces.len(),
            "beyond_radius_25": c.reaching(25.0).len(),
        })
    } else {
        Value::Null
    };
    let fit = fit_constants(&params).map_err(lib)?;
    let b = fit.boundedness();
    let report = json!({
        "command": "escape",
        "census": census_json,
        "frame": if frame == EscapeFrame::STRIP { "strip" } else { "standard" },
        "n_range": range,
        "c_m": fit.c_m,
        "c_x": fit.c_x,
        "c_y": fit.c_y,
        "seed_cells": fit.seed_cells,
        "mismatches": fit.mismatches(),
        "max_n_r": b.max_scaled,
        "median_n_r": b.median_scaled,
        "bounded": b.bounded,
    });
    for p in &a.out {
        match kind_of(p)? {
            Kind::Csv => write(p, fit.to_csv())?,
            Kind::Svg => {
                let sq = olb::escape::square();
                let n0 = range[0];
                let mut segments = Vec::new();
                for n in n0..(n0 + 3).min(range[1] + 1) {
                    if let Ok(tr) = apply_word_traced(fit.point(n), &word_for("Tn", n).map_err(lib)?) {
                        segments.push(tr);
                    }
                }
                let marchers: Vec<Point2> = (range[0]..=range[1]).map(|n| fit.point(n)).collect();
                let mut all: Vec<Point2> = segments.iter().flatten().copied().collect();
                all.extend_from_slice(&marchers[..marchers.len().min(8)]);
                let mut svg = Svg::fitting(&all);
                svg.polygon(&sq, "#dddddd");
                for tr in &segments {
                    // every point joined to its second image
                    for w2 in tr.windows(3) {
                        svg.polyline(&[w2[0], w2[2]], "#1f4e9c", 0.0008);
                    }
                }
                svg.dots(&marchers, "#c0392b", 0.003);
                write(p, svg.finish())?;
            }
            _ => {}
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

fn dual_curve_cmd(a: &DualCurveArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let poly = table(&a.table, cfg, "regular:5")?;
    let samples = at_least("samples", a.samples.or(cfg.samples).unwrap_or(4096), 8)?;
    check_outputs(&a.out, &[Kind::Csv, Kind::Json])?;
    if !poly.contains_strict(Point2::ORIGIN) {
        return Err(Failure::Table("the dual curve needs the origin inside the table".into()));
    }
    let prof = WidthProfile::new(&poly, samples);
    let gamma = prof.dual();
    let report = json!({
        "command": "dual-curve",
        "table": polygon_json(&poly),
        "samples": samples,
        "min_width": prof.width.iter().copied().fold(f64::INFINITY, f64::min),
        "max_width": prof.width.iter().copied().fold(0.0, f64::max),
        "min_gamma": gamma.iter().copied().fold(f64::INFINITY, f64::min),
        "max_gamma": gamma.iter().copied().fold(0.0, f64::max),
    });
    for p in &a.out {
        if kind_of(p)? == Kind::Csv {
            let mut csv = String::from("theta,width,support,gamma,x,y\n");
            for k in 0..samples {
                let (t, g) = (prof.theta[k], gamma[k]);
                let _ = writeln!(
                    csv,
                    "{t},{},{},{g},{},{}",
                    prof.width[k],
                    prof.support[k],
                    -g * t.sin(),
                    g * t.cos()
                );
            }
            write(p, csv)?;
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

/// Reads `x,y` rows. A header naming `x` and `y` columns selects them;
/// otherwise the first two columns are used.
fn read_points(path: &PathBuf) -> Result<Vec<Point2>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cols = (0, 1);
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if i == 0 && f.iter().any(|c| c.parse::<f64>().is_err()) {
            let find = |name: &str| f.iter().position(|c| c.eq_ignore_ascii_case(name));
            if let (Some(x), Some(y)) = (find("x"), find("y")) {
                cols = (x, y);
            }
            continue;
        }
        let get = |k: usize| f.get(k).and_then(|c| c.parse::<f64>().ok());
        match (get(cols.0), get(cols.1)) {
            (Some(x), Some(y)) => pts.push(Point2::new(x, y)),
            _ => return Err(Failure::Usage(format!("{}:{}: expected numeric x and y", path.display(), i + 1))),
        }
    }
    Ok(pts)
}

fn dimension_cmd(a: &DimensionArgs, cfg: &RunConfig) -> Result<Value, Failure> {
    let res = at_least("res", a.res.or(cfg.res).unwrap_or(1024), 16)?;
    check_outputs(&a.out, &[Kind::Json, Kind::Pgm])?;
    let (dim, source, grid) = match &a.points {
        Some(path) => {
            let pts = read_points(path)?;
            if pts.is_empty() {
                return Err(Failure::Usage(format!("{}: no points", path.display())));
            }
            let (mut lo, mut hi) = (pts[0], pts[0]);
            for p in &pts {
                lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            let side = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12) * (1.0 + 1e-9);
            let w = window(a.window.as_deref(), cfg.window, [lo.x, lo.y, lo.x + side, lo.y + side])?;
            let d = box_dimension_of_points(&pts, Point2::new(w[0], w[1]), Point2::new(w[2], w[3]), res).map_err(lib)?;
            (d, json!({ "points": pts.len(), "window": w }), None)
        }
        None => {
            let poly = table(&a.table, cfg, "regular:5")?;
            let depth = a.depth.or(cfg.depth).unwrap_or(14);
            let half = 8.0 * poly.diameter();
            let w = window(a.window.as_deref(), cfg.window, [-half, -half, half, half])?;
            let params = RasterParams {
                min: Point2::new(w[0], w[1]),
                max: Point2::new(w[2], w[3]),
                nx: res,
                ny: res,
                depth,
                eps: None,
            };
            let grid = raster_with_rays(&poly, params, RayMode::MapSingular).map_err(lib)?;
            let d = box_dimension(&grid).map_err(lib)?;
            (d, raster_report(&poly, &grid, "dimension"), Some(grid))
        }
    };
    let report = json!({
        "command": "dimension",
        "source": source,
        "slope": dim.slope,
        "r2": dim.r2,
        "scales": dim.counts.iter().map(|&(d, n)| json!({ "delta": d, "boxes": n })).collect::<Vec<_>>(),
    });
    for p in &a.out {
        if kind_of(p)? == Kind::Pgm {
            match &grid {
                Some(g) => write(p, g.to_pgm())?,
                None => return Err(Failure::Usage("PGM output needs a raster (--table)".into())),
            }
        }
    }
    write_json_outputs(&a.out, &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_flattens_nested_values() {
        let v = json!({"a": 1.5, "b": {"c": [1, 2]}, "d": [{"e": "x"}]});
        assert_eq!(plain(&v), "a: 1.5\nb.c: 1, 2\nd[0].e: x\n");
    }

    #[test]
    fn error_categories() {
        assert!(matches!(lib(Error::InvalidArgument("x".into())), Failure::Usage(_)));
        assert!(matches!(lib(Error::InvalidPolygon("x".into())), Failure::Table(_)));
        assert!(matches!(lib(Error::NoCandidate), Failure::Numeric(_)));
    }
}
