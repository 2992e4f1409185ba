//! The square `(±1, ±1)`: its sixteen map pieces, the composite words built
//! from them, and the numerical search for a slowly escaping orbit.
//!
//! Vertex `v_i` is the corner in quadrant `i`. A piece label `ijk` records the
//! vertices met by the three lines of the construction at `x`, in order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::billiard::step;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Point2};

/// Quadrant index (1..=4) of a square vertex.
fn quadrant(v: Point2) -> u8 {
    match (v.x > 0.0, v.y > 0.0) {
        (true, true) => 1,
        (false, true) => 2,
        (false, false) => 3,
        (true, false) => 4,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PieceLabel {
    pub i: u8,
    pub j: u8,
    pub k: u8,
}

impl PieceLabel {
    /// Label from digits, e.g. `PieceLabel::from_digits(124)`. Panics on
    /// digits outside 1..=4; use [`str::parse`] for checked input.
    pub const fn from_digits(d: u16) -> Self {
        let (i, j, k) = ((d / 100) as u8, (d / 10 % 10) as u8, (d % 10) as u8);
        assert!(i >= 1 && i <= 4 && j >= 1 && j <= 4 && k >= 1 && k <= 4);
        PieceLabel { i, j, k }
    }

    /// Every index shifted by `m` quadrants (mod 4).
    pub fn shifted(self, m: u8) -> Self {
        let s = |a: u8| (a - 1 + m) % 4 + 1;
        PieceLabel {
            i: s(self.i),
            j: s(self.j),
            k: s(self.k),
        }
    }

    pub fn is_admissible(self) -> bool {
        admissible_labels().contains(&self)
    }

    /// Whether `next` may follow `self` along an orbit: the second and third
    /// lines at `x` become the first and second lines at `T(x)`.
    pub fn chains_into(self, next: PieceLabel) -> bool {
        self.j == next.i && self.k == next.j
    }
}

impl fmt::Display for PieceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.i, self.j, self.k)
    }
}

impl FromStr for PieceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('T').trim_start_matches('_');
        let d: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        if d.len() != 3 || d.iter().any(|&a| !(1..=4).contains(&a)) {
            return Err(Error::UnknownSymbol(s.to_string()));
        }
        Ok(PieceLabel {
            i: d[0],
            j: d[1],
            k: d[2],
        })
    }
}

/// The sixteen labels that occur: 123, 124, 131, 134 and their cyclic
/// shifts, sorted.
pub fn admissible_labels() -> Vec<PieceLabel> {
    let mut out: Vec<PieceLabel> = [123, 124, 131, 134]
        .iter()
        .flat_map(|&d| (0..4).map(move |m| PieceLabel::from_digits(d).shifted(m)))
        .collect();
    out.sort();
    out
}

/// The square with vertices `(±1, ±1)`.
pub fn square() -> ConvexPolygon {
    ConvexPolygon::square(1.0)
}

/// Piece of the map containing `x`.
pub fn classify(x: Point2) -> Result<PieceLabel> {
    let sq = square();
    let rec = step(&sq, x)?;
    let q = |i: usize| quadrant(sq.vertex(i));
    Ok(PieceLabel {
        i: q(rec.piece_label[0]),
        j: q(rec.piece_label[1]),
        k: q(rec.piece_label[2]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub count: usize,
    pub max_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub samples: usize,
    pub singular: usize,
    pub pieces: BTreeMap<PieceLabel, CensusEntry>,
}

impl Census {
    pub fn labels(&self) -> Vec<PieceLabel> {
        self.pieces.keys().copied().collect()
    }

    /// Labels seen at least once beyond `radius`.
    pub fn reaching(&self, radius: f64) -> Vec<PieceLabel> {
        self.pieces
            .iter()
            .filter(|(_, e)| e.max_radius > radius)
            .map(|(l, _)| *l)
            .collect()
    }
}

/// Classifies `samples` uniform points of `[-half, half]²` outside the square.
/// Points inside the square are redrawn; singular points are counted apart.
pub fn census(samples: usize, half: f64, seed: u64) -> Census {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces: BTreeMap<PieceLabel, CensusEntry> = BTreeMap::new();
    let mut singular = 0;
    let mut drawn = 0;
    while drawn < samples {
        let x = Point2::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
        if x.x.abs() <= 1.0 && x.y.abs() <= 1.0 {
            continue;
        }
        drawn += 1;
        match classify(x) {
            Ok(l) => {
                let e = pieces.entry(l).or_insert(CensusEntry {
                    count: 0,
                    max_radius: 0.0,
                });
                e.count += 1;
                e.max_radius = e.max_radius.max(x.norm());
            }
            Err(_) => singular += 1,
        }
    }
    Census {
        samples,
        singular,
        pieces,
    }
}

/// Labels listed as in a composition: the last one is applied first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceWord(Vec<PieceLabel>);

impl PieceWord {
    pub fn new(labels: Vec<PieceLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("empty piece word".into()));
        }
        Ok(PieceWord(labels))
    }

    pub fn labels(&self) -> &[PieceLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Labels in the order the pieces are applied.
    pub fn application_order(&self) -> impl Iterator<Item = PieceLabel> + '_ {
        self.0.iter().rev().copied()
    }

    /// First position (in application order) where consecutive labels cannot
    /// follow each other, if any.
    pub fn chain_break(&self) -> Option<usize> {
        let order: Vec<PieceLabel> = self.application_order().collect();
        order.windows(2).position(|w| !w[0].chains_into(w[1])).map(|i| i + 1)
    }

    /// Whether the word also chains back into its own first letter, so that
    /// it can be iterated.
    pub fn is_cyclic(&self) -> bool {
        self.chain_break().is_none() && self.0[0].chains_into(self.0[self.0.len() - 1])
    }
}

impl fmt::Display for PieceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, l) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn lab(d: u16) -> PieceLabel {
    PieceLabel::from_digits(d)
}

/// `outer ∘ (a ∘ b)^reps ∘ tail`, flattened in composition order.
fn expand(outer: &[u16], a: u16, b: u16, reps: usize, tail: &[u16]) -> Vec<PieceLabel> {
    let mut w: Vec<PieceLabel> = outer.iter().map(|&d| lab(d)).collect();
    for _ in 0..reps {
        w.push(lab(a));
        w.push(lab(b));
    }
    w.extend(tail.iter().map(|&d| lab(d)));
    w
}

const E1: u16 = 313;
const E2: u16 = 424;
const E3: u16 = 131;
const E4: u16 = 242;

/// Expands `E1`..`E4`, `A1`, `A2`, `A4`, `B1`, `B2`, `B3` or `Tn` at `n`.
///
/// `A4` is built as `T_423 ∘ (E4 ∘ E2)^n ∘ E4 ∘ T_124`: after `T_124` the
/// orbit must enter a piece whose first two lines meet `v2` and `v4`, which
/// `E4` does and `E3` does not. [`word_literal_a4`] keeps the other reading.
pub fn word_for(symbol: &str, n: usize) -> Result<PieceWord> {
    let w = match symbol {
        "E1" => vec![lab(E1)],
        "E2" => vec![lab(E2)],
        "E3" => vec![lab(E3)],
        "E4" => vec![lab(E4)],
        "A1" => expand(&[134], E1, E3, n, &[E1, 231]),
        "A2" => expand(&[241], E2, E4, n, &[E2, 342]),
        "A4" => expand(&[423], E4, E2, n, &[E4, 124]),
        "B1" => expand(&[312], E3, E1, n + 1, &[231]),
        "B2" => expand(&[423], E4, E2, n + 1, &[342]),
        "B3" => expand(&[134], E1, E3, n + 1, &[413]),
        "Tn" | "T" => {
            let mut w = Vec::new();
            for s in ["B1", "B2", "B3", "A2", "A1", "A4"] {
                w.extend(word_for(s, n)?.0);
            }
            w
        }
        other => return Err(Error::UnknownSymbol(other.to_string())),
    };
    PieceWord::new(w)
}

/// `T_423 ∘ (E3 ∘ E1)^n ∘ E3 ∘ T_124`, the other reading of `A4`. It is not
/// realisable by any orbit (see [`PieceWord::chain_break`]).
pub fn word_literal_a4(n: usize) -> PieceWord {
    PieceWord(expand(&[423], E3, E1, n, &[E3, 124]))
}

/// Applies the pieces of `w` to `x`, checking before each sub-step that `x`
/// lies in the expected piece. Sub-step indices count in application order.
pub fn apply_word(x: Point2, w: &PieceWord) -> Result<Point2> {
    apply_word_traced(x, w).map(|t| *t.last().unwrap_or(&x))
}

/// Like [`apply_word`] but returns every intermediate point, starting at `x`.
pub fn apply_word_traced(x: Point2, w: &PieceWord) -> Result<Vec<Point2>> {
    let sq = square();
    let q = |i: usize| quadrant(sq.vertex(i));
    let mut pts = Vec::with_capacity(w.len() + 1);
    pts.push(x);
    let mut cur = x;
    for (index, expected) in w.application_order().enumerate() {
        let rec = match step(&sq, cur) {
            Ok(r) => r,
            Err(Error::Singular) => return Err(Error::Singular),
            Err(_) => {
                return Err(Error::LabelMismatch {
                    index,
                    expected,
                    observed: None,
                })
            }
        };
        let observed = PieceLabel {
            i: q(rec.piece_label[0]),
            j: q(rec.piece_label[1]),
            k: q(rec.piece_label[2]),
        };
        if observed != expected {
            return Err(Error::LabelMismatch {
                index,
                expected,
                observed: Some(observed),
            });
        }
        cur = rec.y;
        pts.push(cur);
    }
    Ok(pts)
}

/// Orthonormal frame in which the escape ansatz is written: the point with
/// frame coordinates `(a, b)` is `a * axis + b * normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeFrame {
    pub axis: Point2,
    pub normal: Point2,
}

impl EscapeFrame {
    /// Standard coordinates: the ansatz marches along `+x`.
    pub const STANDARD: EscapeFrame = EscapeFrame {
        axis: Point2 { x: 1.0, y: 0.0 },
        normal: Point2 { x: 0.0, y: 1.0 },
    };

    /// Standard coordinates turned a quarter turn counterclockwise, so the
    /// ansatz marches along `+y`, the unbounded direction of `T_124`.
    pub const STRIP: EscapeFrame = EscapeFrame {
        axis: Point2 { x: 0.0, y: 1.0 },
        normal: Point2 { x: -1.0, y: 0.0 },
    };

    pub fn to_world(&self, a: f64, b: f64) -> Point2 {
        self.axis * a + self.normal * b
    }

    pub fn to_frame(&self, p: Point2) -> (f64, f64) {
        (p.dot(self.axis), p.dot(self.normal))
    }
}

impl Default for EscapeFrame {
    fn default() -> Self {
        EscapeFrame::STRIP
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    /// Search window for the seed at `n_min`, in frame coordinates.
    pub window_min: (f64, f64),
    pub window_max: (f64, f64),
    pub grid_step: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub frame: EscapeFrame,
    /// Every `stride`-th `n` enters the refinement objective.
    pub stride: usize,
    /// Nelder–Mead iterations per refinement round.
    pub max_iters: u64,
    /// Seed clusters refined, largest first.
    pub max_candidates: usize,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            window_min: (-50.0, -50.0),
            window_max: (50.0, 50.0),
            grid_step: 0.04,
            n_min: 10,
            n_max: 200,
            frame: EscapeFrame::STRIP,
            stride: 10,
            max_iters: 300,
            max_candidates: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub n: usize,
    pub start: Point2,
    pub image: Option<Point2>,
    /// `‖T_n(p_n) − p_{n+1}‖`, absent when the word does not apply.
    pub r: Option<f64>,
    pub failure: Option<String>,
}

impl ResidualRow {
    pub fn scaled(&self) -> Option<f64> {
        self.r.map(|r| r * self.n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundedness {
    pub max_scaled: f64,
    pub median_scaled: f64,
    /// `max_scaled ≤ 10 · median_scaled` with every row admissible.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeFit {
    pub c_m: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub frame: EscapeFrame,
    pub seed_cells: usize,
    pub rows: Vec<ResidualRow>,
}

impl EscapeFit {
    /// `p_n`: frame point `(c_x + n c_m, c_y)` in world coordinates.
    pub fn point(&self, n: usize) -> Point2 {
        ansatz_point(&self.frame, [self.c_m, self.c_x, self.c_y], n)
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| r.r.is_none()).count()
    }

    pub fn boundedness(&self) -> Boundedness {
        let mut s: Vec<f64> = self.rows.iter().filter_map(|r| r.scaled()).collect();
        s.sort_by(f64::total_cmp);
        let (max_scaled, median_scaled) = if s.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let m = s.len() / 2;
            let median = if s.len() % 2 == 1 { s[m] } else { 0.5 * (s[m - 1] + s[m]) };
            (s[s.len() - 1], median)
        };
        Boundedness {
            max_scaled,
            median_scaled,
            bounded: self.mismatches() == 0
                && !s.is_empty()
                && max_scaled <= 10.0 * median_scaled,
        }
    }

    /// Residual table: `n,c_m,c_x,c_y,r,n_r,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_m,c_x,c_y,r,n_r,status\n");
        for row in &self.rows {
            let (r, nr) = match row.r {
                Some(r) => (format!("{r}"), format!("{}", r * row.n as f64)),
                None => (String::new(), String::new()),
            };
            let status = row.failure.as_deref().unwrap_or("ok");
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.n, self.c_m, self.c_x, self.c_y, r, nr, status
            ));
        }
        out
    }
}

fn ansatz_point(frame: &EscapeFrame, c: [f64; 3], n: usize) -> Point2 {
    frame.to_world(c[1] + n as f64 * c[0], c[2])
}

fn residual_row(frame: &EscapeFrame, c: [f64; 3], n: usize) -> ResidualRow {
    let start = ansatz_point(frame, c, n);
    let target = ansatz_point(frame, c, n + 1);
    let word = word_for("Tn", n).expect("Tn is a known symbol");
    match apply_word(start, &word) {
        Ok(y) => ResidualRow {
            n,
            start,
            image: Some(y),
            r: Some(y.dist(target)),
            failure: None,
        },
        Err(e) => ResidualRow {
            n,
            start,
            image: None,
            r: None,
            failure: Some(e.to_string().replace(',', ";")),
        },
    }
}

/// Refinement cost of one `n`: the squared residual, or for a point outside
/// the word's domain a penalty above any residual that shrinks the further
/// the word got before breaking.
fn penalised_cost(frame: &EscapeFrame, c: [f64; 3], n: usize) -> f64 {
    let start = ansatz_point(frame, c, n);
    let word = word_for("Tn", n).expect("Tn is a known symbol");
    match apply_word(start, &word) {
        Ok(y) => y.dist_sq(ansatz_point(frame, c, n + 1)).min(1.0),
        Err(Error::LabelMismatch { index, .. }) => 2.0 - index as f64 / word.len() as f64,
        Err(_) => 2.0,
    }
}

struct Objective<'a> {
    frame: &'a EscapeFrame,
    ns: &'a [usize],
}

impl argmin::core::CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, c: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        use rayon::prelude::*;
        let c = [c[0], c[1], c[2]];
        let parts: Vec<f64> = self
            .ns
            .par_iter()
            .map(|&n| penalised_cost(self.frame, c, n))
            .collect();
        Ok(parts.iter().sum())
    }
}

fn nelder_mead(frame: &EscapeFrame, ns: &[usize], c0: [f64; 3], iters: u64) -> [f64; 3] {
    use argmin::core::{Executor, State};
    use argmin::solver::neldermead::NelderMead;
    let simplex = vec![
        c0.to_vec(),
        vec![c0[0] + 1e-3, c0[1], c0[2]],
        vec![c0[0], c0[1] + 0.02, c0[2]],
        vec![c0[0], c0[1], c0[2] + 0.02],
    ];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-14)
        .expect("positive tolerance");
    let res = Executor::new(Objective { frame, ns }, solver)
        .configure(|s| s.max_iters(iters))
        .run();
    match res {
        Ok(r) => match r.state().get_best_param() {
            Some(p) => [p[0], p[1], p[2]],
            None => c0,
        },
        Err(_) => c0,
    }
}

/// A connected group of seed cells where `T_{n_min}` applies.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SeedCluster {
    cells: usize,
    a: f64,
    b: f64,
    shift: f64,
}

fn seed_clusters(p: &FitParams) -> Vec<SeedCluster> {
    use rayon::prelude::*;
    let step = p.grid_step;
    let na = ((p.window_max.0 - p.window_min.0) / step).floor().max(0.0) as usize;
    let nb = ((p.window_max.1 - p.window_min.1) / step).floor().max(0.0) as usize;
    if na == 0 || nb == 0 {
        return Vec::new();
    }
    let word = word_for("Tn", p.n_min).expect("Tn is a known symbol");
    let frame = p.frame;
    let hits: Vec<(usize, usize, f64)> = (0..nb)
        .into_par_iter()
        .flat_map_iter(|ib| {
            let word = &word;
            (0..na).filter_map(move |ia| {
                let a = p.window_min.0 + (ia as f64 + 0.5) * step;
                let b = p.window_min.1 + (ib as f64 + 0.5) * step;
                let x = frame.to_world(a, b);
                apply_word(x, word)
                    .ok()
                    .map(|y| (ia, ib, frame.to_frame(y).0 - a))
            })
        })
        .collect();

    // Union of 8-connected hit cells.
    let index: BTreeMap<(usize, usize), usize> =
        hits.iter().enumerate().map(|(k, h)| ((h.0, h.1), k)).collect();
    let mut comp = vec![usize::MAX; hits.len()];
    let mut clusters = Vec::new();
    for start in 0..hits.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        comp[start] = id;
        let mut stack = vec![start];
        let (mut cells, mut sa, mut sb, mut ss) = (0usize, 0.0, 0.0, 0.0);
        while let Some(k) = stack.pop() {
            let (ia, ib, shift) = hits[k];
            cells += 1;
            sa += p.window_min.0 + (ia as f64 + 0.5) * step;
            sb += p.window_min.1 + (ib as f64 + 0.5) * step;
            ss += shift;
            for da in -1i64..=1 {
                for db in -1i64..=1 {
                    let key = ((ia as i64 + da) as usize, (ib as i64 + db) as usize);
                    if let Some(&j) = index.get(&key) {
                        if comp[j] == usize::MAX {
                            comp[j] = id;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        let c = cells as f64;
        clusters.push(SeedCluster {
            cells,
            a: sa / c,
            b: sb / c,
            shift: ss / c,
        });
    }
    clusters.retain(|c| c.shift > 0.0);
    clusters.sort_by(|x, y| y.cells.cmp(&x.cells).then(x.a.total_cmp(&y.a)).then(x.b.total_cmp(&y.b)));
    clusters
}

/// Fits `C_m > 0, C_x, C_y` so that `T_n` carries the frame point
/// `(C_x + n C_m, C_y)` close to `(C_x + (n+1) C_m, C_y)` for every `n` in
/// `[n_min, n_max]`.
///
/// Seeds come from a grid scan of the window at `n_min`; each connected
/// group of admissible cells gives a starting guess, refined by Nelder–Mead
/// on every `stride`-th `n`. Values of `n` still outside their word's domain
/// after refinement join the objective for another round. The fit with the
/// fewest inadmissible `n`, then the smallest residual sum, wins.
pub fn fit_constants(p: &FitParams) -> Result<EscapeFit> {
    if p.n_min < 5 || p.n_max < p.n_min {
        return Err(Error::InvalidArgument(format!(
            "n range [{}, {}] must satisfy 5 <= n_min <= n_max",
            p.n_min, p.n_max
        )));
    }
    if !(p.grid_step > 0.0) || p.stride == 0 {
        return Err(Error::InvalidArgument("grid step and stride must be positive".into()));
    }
    let clusters = seed_clusters(p);
    if clusters.is_empty() {
        return Err(Error::NoCandidate);
    }
    let mut best: Option<(usize, f64, EscapeFit)> = None;
    for cl in clusters.iter().take(p.max_candidates.max(1)) {
        let c_m = cl.shift;
        let mut c = [c_m, cl.a - p.n_min as f64 * c_m, cl.b];
        let mut ns: Vec<usize> = (p.n_min..=p.n_max).step_by(p.stride).collect();
        if ns.last() != Some(&p.n_max) {
            ns.push(p.n_max);
        }
        let mut rows = Vec::new();
        for _round in 0..4 {
            c = nelder_mead(&p.frame, &ns, c, p.max_iters);
            rows = full_rows(&p.frame, c, p.n_min, p.n_max);
            let bad: Vec<usize> = rows.iter().filter(|r| r.r.is_none()).map(|r| r.n).collect();
            if bad.is_empty() {
                break;
            }
            ns.extend(bad);
            ns.sort_unstable();
            ns.dedup();
        }
        let fit = EscapeFit {
            c_m: c[0],
            c_x: c[1],
            c_y: c[2],
            frame: p.frame,
            seed_cells: cl.cells,
            rows,
        };
        let miss = fit.mismatches();
        let sum: f64 = fit.rows.iter().filter_map(|r| r.r).map(|r| r * r).sum();
        let better = match &best {
            None => true,
            Some((m, s, _)) => miss < *m || (miss == *m && sum < *s),
        };
        if better {
            best = Some((miss, sum, fit));
        }
    }
    let (_, _, fit) = best.expect("at least one cluster");
    if fit.mismatches() == fit.rows.len() {
        return Err(Error::NoCandidate);
    }
    Ok(fit)
}

/// Residual rows for every `n` in `[n_min, n_max]` at constants `c`.
fn full_rows(frame: &EscapeFrame, c: [f64; 3], n_min: usize, n_max: usize) -> Vec<ResidualRow> {
    use rayon::prelude::*;
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| residual_row(frame, c, n))
        .collect()
}

/// Residual rows of the ansatz at given constants, e.g. to re-check a
/// stored fit.
pub fn residual_table(frame: &EscapeFrame, c_m: f64, c_x: f64, c_y: f64, n_min: usize, n_max: usize) -> Vec<ResidualRow> {
    full_rows(frame, [c_m, c_x, c_y], n_min, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(ds: &[u16]) -> Vec<PieceLabel> {
        ds.iter().map(|&d| lab(d)).collect()
    }

    #[test]
    fn sixteen_admissible_labels() {
        let all = admissible_labels();
        assert_eq!(all.len(), 16);
        for d in [123, 124, 131, 134, 234, 231, 242, 241, 341, 342, 313, 312, 412, 413, 424, 423] {
            assert!(lab(d).is_admissible(), "{d}");
        }
        assert!(!lab(142).is_admissible());
    }

    #[test]
    fn label_text_round_trip() {
        for l in admissible_labels() {
            assert_eq!(l.to_string().parse::<PieceLabel>().unwrap(), l);
        }
        assert_eq!("T_124".parse::<PieceLabel>().unwrap(), lab(124));
        assert!("125".parse::<PieceLabel>().is_err());
        assert!("12".parse::<PieceLabel>().is_err());
    }

    #[test]
    fn single_letters() {
        assert_eq!(word_for("E1", 0).unwrap().labels(), &w(&[313])[..]);
        assert_eq!(word_for("E2", 3).unwrap().labels(), &w(&[424])[..]);
        assert_eq!(word_for("E3", 0).unwrap().labels(), &w(&[131])[..]);
        assert_eq!(word_for("E4", 0).unwrap().labels(), &w(&[242])[..]);
        assert_eq!(word_for("A3", 1), Err(Error::UnknownSymbol("A3".into())));
        assert_eq!(word_for("B4", 1), Err(Error::UnknownSymbol("B4".into())));
    }

    #[test]
    fn hand_encoded_expansions() {
        let cases: [(&str, usize, &[u16]); 12] = [
            ("A1", 0, &[134, 313, 231]),
            ("A1", 1, &[134, 313, 131, 313, 231]),
            ("A1", 2, &[134, 313, 131, 313, 131, 313, 231]),
            ("A2", 0, &[241, 424, 342]),
            ("A2", 2, &[241, 424, 242, 424, 242, 424, 342]),
            ("A4", 0, &[423, 242, 124]),
            ("A4", 1, &[423, 242, 424, 242, 124]),
            ("B1", 0, &[312, 131, 313, 231]),
            ("B1", 1, &[312, 131, 313, 131, 313, 231]),
            ("B2", 0, &[423, 242, 424, 342]),
            ("B3", 0, &[134, 313, 131, 413]),
            ("B3", 2, &[134, 313, 131, 313, 131, 313, 131, 413]),
        ];
        for (s, n, expect) in cases {
            assert_eq!(word_for(s, n).unwrap().labels(), &w(expect)[..], "{s} {n}");
        }
        assert_eq!(word_literal_a4(1).labels(), &w(&[423, 131, 313, 131, 124])[..]);
    }

    #[test]
    fn composite_lengths() {
        for n in 0..6 {
            assert_eq!(word_for("B1", n).unwrap().len(), 2 * (n + 1) + 2);
            let parts: usize = ["B1", "B2", "B3", "A2", "A1", "A4"]
                .iter()
                .map(|s| word_for(s, n).unwrap().len())
                .sum();
            assert_eq!(word_for("Tn", n).unwrap().len(), parts);
            assert_eq!(parts, 12 * n + 21);
        }
    }

    #[test]
    fn words_chain_and_tn_closes_up() {
        for n in 0..5 {
            for s in ["A1", "A2", "A4", "B1", "B2", "B3", "Tn"] {
                assert_eq!(word_for(s, n).unwrap().chain_break(), None, "{s} {n}");
            }
            assert!(word_for("Tn", n).unwrap().is_cyclic());
            // T_124 must be followed by a piece starting 24.
            assert_eq!(word_literal_a4(n).chain_break(), Some(1));
        }
    }

    #[test]
    fn classify_pieces() {
        assert_eq!(classify(Point2::new(0.0, 50.0)).unwrap(), lab(124));
        assert_eq!(classify(Point2::new(50.0, -20.0)).unwrap(), lab(313));
        assert_eq!(classify(Point2::new(-3.0, 50.0)).unwrap(), lab(134));
        assert_eq!(classify(Point2::new(5.0, 1.0)), Err(Error::Singular));
    }

    #[test]
    fn census_finds_the_sixteen_pieces() {
        let c = census(100_000, 30.0, 7);
        assert_eq!(c.labels(), admissible_labels());
        assert_eq!(c.reaching(25.0).len(), 12);
    }

    #[test]
    fn apply_word_guards_labels() {
        let sq = square();
        let x = Point2::new(3.0, 40.0);
        let l = classify(x).unwrap();
        let y = apply_word(x, &PieceWord::new(vec![l]).unwrap()).unwrap();
        assert_eq!(y, step(&sq, x).unwrap().y);
        let wrong = PieceWord::new(vec![lab(313)]).unwrap();
        match apply_word(Point2::new(0.0, 50.0), &wrong) {
            Err(Error::LabelMismatch { index, expected, observed }) => {
                assert_eq!(index, 0);
                assert_eq!(expected, lab(313));
                assert_eq!(observed, Some(lab(124)));
            }
            other => panic!("{other:?}"),
        }
        assert!(PieceWord::new(vec![]).is_err());
    }

    #[test]
    fn fitted_seed_applies_at_n_20() {
        // Constants from a full run of `fit_constants` with default settings.
        let (c_m, c_x, c_y) = (3.2091264, 4.5086809, 0.2228606);
        let p = EscapeFrame::STRIP.to_world(c_x + 20.0 * c_m, c_y);
        let y = apply_word(p, &word_for("Tn", 20).unwrap()).unwrap();
        let target = EscapeFrame::STRIP.to_world(c_x + 21.0 * c_m, c_y);
        assert!(y.dist(target) < 0.01);
    }

    #[test]
    fn fit_rejects_bad_windows() {
        let empty = FitParams {
            window_min: (0.0, 0.0),
            window_max: (0.0, 0.0),
            ..FitParams::default()
        };
        assert_eq!(fit_constants(&empty).unwrap_err(), Error::NoCandidate);
        let far = FitParams {
            window_min: (20.0, 20.0),
            window_max: (22.0, 22.0),
            grid_step: 0.1,
            ..FitParams::default()
        };
        assert_eq!(fit_constants(&far).unwrap_err(), Error::NoCandidate);
        let low = FitParams {
            n_min: 3,
            ..FitParams::default()
        };
        assert!(matches!(fit_constants(&low), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn frames_are_orthonormal() {
        for f in [EscapeFrame::STANDARD, EscapeFrame::STRIP] {
            assert_eq!(f.axis.dot(f.normal), 0.0);
            assert_eq!(f.axis.cross(f.normal), 1.0);
            let p = Point2::new(0.3, -2.0);
            let (a, b) = f.to_frame(p);
            assert_eq!(f.to_world(a, b), p);
        }
    }
}
