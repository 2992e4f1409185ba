//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::escape::PieceLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("point is not strictly outside the table")]
    PointInside,
    #[error("point lies on a map-singular side extension")]
    OnSingularRay,
    #[error("point is collinear with a side; the support line touches a whole edge")]
    EdgeAligned,
    #[error("no circle satisfies the tangency constraints")]
    NoSolution,
    #[error("no third common support line found")]
    NotFound,
    #[error("several distinct third support lines within tolerance")]
    Ambiguous,
    #[error("map is undefined at this point (side extension)")]
    Singular,
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(&'static str),
    #[error("point is collinear with the segment")]
    Collinear,
    #[error("once-around orbit did not wrap")]
    IncompleteOrbit,
    #[error("orbit comes closer than {required} to the origin (min radius {actual})")]
    RadiusTooSmall { required: f64, actual: f64 },
    #[error("origin is not interior to the table")]
    OriginOutside,
    #[error("the nearest boundary point is not a vertex")]
    NearestPointOnEdge,
    #[error("scale d = {d} exceeds the admissible bound {bound}")]
    DTooLarge { d: f64, bound: f64 },
    #[error("degenerate triangle")]
    Degenerate,
    #[error("side lengths violate the strict triangle inequality")]
    InvalidTriangle,
    #[error("root bracketing failed")]
    BracketFailure,
    #[error("too few marked cells for box counting ({0})")]
    TooSparse(usize),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("label mismatch at sub-step {index}: expected {expected}, observed {observed:?}")]
    LabelMismatch {
        index: usize,
        expected: PieceLabel,
        observed: Option<PieceLabel>,
    },
    #[error("search window produced no admissible candidate")]
    NoCandidate,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
