use alloc::string::String;

use crate::rational::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Which vertex-list invariant a rejected map violates.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapDefect {
    #[error("at least three vertices are required, got {0}")]
    TooFewVertices(usize),
    #[error("first vertex must be (0, 0)")]
    FirstVertexNotOrigin,
    #[error("last vertex must be (1, 0)")]
    LastVertexNotOneZero,
    #[error("abscissas must be strictly increasing (vertex {0})")]
    AbscissaNotIncreasing(usize),
    #[error("ordinate of vertex {0} lies outside [0, 1]")]
    OrdinateOutOfRange(usize),
    #[error("no vertex reaches ordinate 1")]
    NoUnitMaximum,
    #[error("more than one vertex reaches ordinate 1")]
    MultipleUnitMaxima,
    #[error("segment starting at vertex {0} has zero slope")]
    ZeroSlope(usize),
    #[error("ordinates must increase up to the turning point (vertex {0})")]
    NotIncreasingBeforeTurn(usize),
    #[error("ordinates must decrease after the turning point (vertex {0})")]
    NotDecreasingAfterTurn(usize),
}

/// Role of a map inside a conjugacy pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapRole {
    Source,
    Target,
}

impl core::fmt::Display for MapRole {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            MapRole::Source => "source map g1",
            MapRole::Target => "target map g2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("malformed map: {0}")]
    MalformedMap(MapDefect),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("interval [{lo}, {hi}] contains the turning point in its interior")]
    NotMonotone { lo: Rational, hi: Rational },
    #[error("value {y} is outside the image of [{lo}, {hi}]")]
    OutOfRange { lo: Rational, hi: Rational, y: Rational },
    #[error("requested depth {requested} exceeds the cap {cap}")]
    DepthCapExceeded { requested: u64, cap: u64 },
    #[error("tolerance not reached within depth {depth}; achieved width {width}")]
    ToleranceNotReached { depth: u64, width: Rational },
    #[error("index {index} out of range (must be below {bound})")]
    IndexOutOfRange { index: String, bound: String },
    #[error("not a carcass map within level {0}")]
    NotCarcassWithin(u32),
    #[error("{role} is not a carcass map within level {n_max}")]
    NotCarcass { role: MapRole, n_max: u32 },
    #[error("{x} is not a lattice point at level {level} or below")]
    NotLatticePoint { x: Rational, level: u64 },
    #[error("sequence has {have} entries, classification needs {need}")]
    InsufficientDepth { have: usize, need: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariant(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<MapDefect> for Error {
    fn from(defect: MapDefect) -> Self {
        Error::MalformedMap(defect)
    }
}

pub(crate) fn out_of_range(index: impl core::fmt::Display, bound: impl core::fmt::Display) -> Error {
    Error::IndexOutOfRange {
        index: alloc::format!("{index}"),
        bound: alloc::format!("{bound}"),
    }
}
