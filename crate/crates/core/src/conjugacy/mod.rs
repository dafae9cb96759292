//! The conjugacy `h` from a carcass map `g1` to a carcass map `g2`.
//!
//! `h` is never represented directly. It is pinned down by the fact that it
//! sends the `g1` lattice onto the `g2` lattice index by index, and that the
//! `g2` expansion of `h(x)` equals the `g1` expansion of `x`. Enclosures and
//! slopes therefore follow a path for `x` under `g1` and replay its bits on a
//! `g2` cell, which never looks at `x`.

mod limits;
mod ulam;

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

pub use limits::{classify_limits, classify_tail, LimitClass, LimitParams, LimitTag, SlopeEntry, SlopeSequence, TailEvidence};
pub use ulam::{pl_detector, ulam_map, PLFunction, PlVerdict};

use crate::error::{Error, MapRole, Result};
use crate::lattice::{delta_stats_at, DeltaStats};
use crate::map::{CarcassInfo, PLUnimodalMap, DEFAULT_CARCASS_LEVEL};
use crate::path::{Cell, PathState};
use crate::rational::{is_unit_interval, Rational};
use crate::DepthCaps;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyPair {
    g1: PLUnimodalMap,
    g2: PLUnimodalMap,
    info1: CarcassInfo,
    info2: CarcassInfo,
    stats1: DeltaStats,
    stats2: DeltaStats,
    caps: DepthCaps,
}

impl ConjugacyPair {
    pub fn new(g1: PLUnimodalMap, g2: PLUnimodalMap) -> Result<Self> {
        let survey = |map: &PLUnimodalMap, role| {
            let info = map.carcass_info(DEFAULT_CARCASS_LEVEL).map_err(|err| match err {
                Error::NotCarcassWithin(n_max) => Error::NotCarcass { role, n_max },
                other => other,
            })?;
            let stats = delta_stats_at(map, info.n0)?;
            Ok::<_, Error>((info, stats))
        };
        let (info1, stats1) = survey(&g1, MapRole::Source)?;
        let (info2, stats2) = survey(&g2, MapRole::Target)?;
        Ok(ConjugacyPair { g1, g2, info1, info2, stats1, stats2, caps: DepthCaps::default() })
    }

    pub fn with_caps(mut self, caps: DepthCaps) -> Self {
        self.caps = caps;
        self
    }

    pub fn g1(&self) -> &PLUnimodalMap {
        &self.g1
    }

    pub fn g2(&self) -> &PLUnimodalMap {
        &self.g2
    }

    pub fn info1(&self) -> &CarcassInfo {
        &self.info1
    }

    pub fn info2(&self) -> &CarcassInfo {
        &self.info2
    }

    pub fn stats1(&self) -> &DeltaStats {
        &self.stats1
    }

    pub fn stats2(&self) -> &DeltaStats {
        &self.stats2
    }

    pub fn caps(&self) -> DepthCaps {
        self.caps
    }

    /// Common carcass level: the larger of the two `n0`.
    pub fn n0(&self) -> u32 {
        self.info1.n0.max(self.info2.n0)
    }
}

/// A `g1` path for `x` with a `g2` cell replaying its bits, plus the left
/// flanks of `x` and `h(x)` once `x` has become a lattice point.
#[derive(Debug, Clone)]
pub struct Lockstep<'p> {
    source: PathState<'p>,
    target: Cell<'p>,
    flanks: Option<(Cell<'p>, Cell<'p>)>,
}

impl<'p> Lockstep<'p> {
    pub fn new(pair: &'p ConjugacyPair, x: Rational) -> Result<Self> {
        Ok(Lockstep { source: PathState::new(&pair.g1, x)?, target: Cell::root(&pair.g2), flanks: None })
    }

    pub fn depth(&self) -> usize {
        self.source.depth()
    }

    pub fn source(&self) -> &PathState<'p> {
        &self.source
    }

    pub fn target(&self) -> &Cell<'p> {
        &self.target
    }

    /// Left flanks `(g1, g2)`, present once `x > 0` is a left endpoint.
    pub fn flanks(&self) -> Option<&(Cell<'p>, Cell<'p>)> {
        self.flanks.as_ref()
    }

    pub fn advance(&mut self) -> Result<u8> {
        let (bit, fresh_flank) = self.source.advance_noting_split()?;
        let orbit = self.target.split_orbit()?;
        self.flanks = match (self.flanks.take(), fresh_flank) {
            (Some((f1, f2)), _) => Some((f1.child(1)?, f2.child(1)?)),
            (None, Some(f1)) => Some((f1, self.target.descend(orbit.clone(), 0))),
            (None, None) => None,
        };
        self.target = self.target.descend(orbit, bit);
        Ok(bit)
    }

    /// `h_{depth+1}'(x+)`: the ratio of the two current interval lengths.
    pub fn right_slope(&self) -> Rational {
        self.target.length() / self.source.length()
    }

    /// `h_{depth+1}'(x-)`, equal to the right slope unless `x` is a lattice
    /// point.
    pub fn left_slope(&self) -> Rational {
        match &self.flanks {
            Some((f1, f2)) => f2.length() / f1.length(),
            None => self.right_slope(),
        }
    }

    /// Exact `h(x)` once `x` is an endpoint of its `g1` interval.
    pub fn exact_image(&self) -> Option<Rational> {
        if self.source.x() == self.source.lo() {
            Some(self.target.lo().clone())
        } else if self.source.x() == self.source.hi() {
            Some(self.target.hi().clone())
        } else {
            None
        }
    }

    pub fn enclosure(&self) -> Enclosure {
        let depth = self.depth();
        match self.exact_image() {
            Some(y) => Enclosure { lo: y.clone(), hi: y, depth, exact: true },
            None => Enclosure { lo: self.target.lo().clone(), hi: self.target.hi().clone(), depth, exact: false },
        }
    }
}

/// Slopes of `h_1 .. h_levels` at `x`.
pub fn slope_sequence(pair: &ConjugacyPair, x: &Rational, levels: usize) -> Result<SlopeSequence> {
    if levels > pair.caps.path {
        return Err(Error::DepthCapExceeded { requested: levels as u64, cap: pair.caps.path as u64 });
    }
    let mut walk = Lockstep::new(pair, x.clone())?;
    let mut entries = Vec::with_capacity(levels);
    for n in 1..=levels {
        if n > 1 {
            walk.advance()?;
        }
        entries.push(SlopeEntry { n: n as u32, left: walk.left_slope(), right: walk.right_slope() });
    }
    Ok(SlopeSequence { x: x.clone(), entries })
}

/// Certified rational interval containing `h(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
    /// Path depth at which the enclosure was read off.
    pub depth: usize,
    /// `lo == hi == h(x)` because `x` is a `g1` lattice point.
    pub exact: bool,
}

impl Enclosure {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, y: &Rational) -> bool {
        &self.lo <= y && y <= &self.hi
    }
}

/// Enclosure of `h(x)` with width at most `tol`.
pub fn conj_eval(pair: &ConjugacyPair, x: &Rational, tol: &Rational) -> Result<Enclosure> {
    let mut last = None;
    enclosure_walk(pair, x, tol, |e| last = Some(e.clone()))?;
    Ok(last.expect("walk visits depth 0"))
}

/// Every enclosure visited by [`conj_eval`], shallowest first.
pub fn enclosure_trace(pair: &ConjugacyPair, x: &Rational, tol: &Rational) -> Result<Vec<Enclosure>> {
    let mut trace = Vec::new();
    enclosure_walk(pair, x, tol, |e| trace.push(e.clone()))?;
    Ok(trace)
}

fn enclosure_walk(
    pair: &ConjugacyPair,
    x: &Rational,
    tol: &Rational,
    mut visit: impl FnMut(&Enclosure),
) -> Result<()> {
    if !tol.is_positive() {
        return Err(Error::Domain(alloc::format!("tolerance {tol} must be positive")));
    }
    let mut walk = Lockstep::new(pair, x.clone())?;
    loop {
        let enclosure = walk.enclosure();
        visit(&enclosure);
        if enclosure.exact || enclosure.width() <= *tol {
            return Ok(());
        }
        if walk.depth() >= pair.caps.path {
            return Err(Error::ToleranceNotReached { depth: walk.depth() as u64, width: enclosure.width() });
        }
        walk.advance()?;
    }
}

/// Outcome of checking `h(g1(x))` against `g2(h(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualReport {
    pub x: Rational,
    pub h_x: Enclosure,
    /// Image of `h_x` under the claimed target map.
    pub image: (Rational, Rational),
    pub h_gx: Enclosure,
    pub holds: bool,
}

pub fn residual_check(pair: &ConjugacyPair, x: &Rational, tol: &Rational) -> Result<ResidualReport> {
    residual_check_against(pair, pair.g2(), x, tol)
}

/// Residual check where the functional equation is tested against
/// `claimed_target` instead of the pair's own `g2`. With any map other than
/// `g2` this is a negative control.
pub fn residual_check_against(
    pair: &ConjugacyPair,
    claimed_target: &PLUnimodalMap,
    x: &Rational,
    tol: &Rational,
) -> Result<ResidualReport> {
    let h_x = conj_eval(pair, x, tol)?;
    let gx = pair.g1.eval(x)?;
    let h_gx = conj_eval(pair, &gx, tol)?;
    let image = claimed_target.interval_image(&h_x.lo, &h_x.hi)?;
    let holds = image.0 <= h_gx.hi && h_gx.lo <= image.1;
    Ok(ResidualReport { x: x.clone(), h_x, image, h_gx, holds })
}

/// Certified bounds on `(h(x) - h(s)) / (x - s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientBound {
    pub s: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

pub fn difference_quotients(
    pair: &ConjugacyPair,
    x: &Rational,
    samples: &[Rational],
    tol: &Rational,
) -> Result<Vec<QuotientBound>> {
    let h_x = conj_eval(pair, x, tol)?;
    samples
        .iter()
        .map(|s| {
            if s == x {
                return Err(Error::Domain(alloc::format!("sample {s} coincides with x")));
            }
            let h_s = conj_eval(pair, s, tol)?;
            let (lo, hi) = quotient_bounds(x, &h_x, s, &h_s);
            Ok(QuotientBound { s: s.clone(), lo, hi })
        })
        .collect()
}

fn quotient_bounds(x: &Rational, h_x: &Enclosure, s: &Rational, h_s: &Enclosure) -> (Rational, Rational) {
    let (left, h_left, right, h_right) = if s < x { (s, h_s, x, h_x) } else { (x, h_x, s, h_s) };
    let run = right - left;
    let lo = (&h_right.lo - &h_left.hi) / &run;
    let hi = (&h_right.hi - &h_left.lo) / &run;
    // h is increasing, so a negative lower bound carries no information
    (if lo.is_negative() { Rational::zero() } else { lo }, hi)
}

/// Bounds on the slopes of the pinned approximation (kinked at `x` as well
/// as at the level-`n` lattice) relative to `h_n`'s slope, on each side of
/// `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinnedRatios {
    pub n: u32,
    pub source_interval: (Rational, Rational),
    pub target_interval: (Rational, Rational),
    pub h_x: Enclosure,
    pub left: (Rational, Rational),
    pub right: (Rational, Rational),
}

impl PinnedRatios {
    /// Both ratios, when the enclosure of `h(x)` is exact.
    pub fn exact(&self) -> Option<(Rational, Rational)> {
        (self.left.0 == self.left.1 && self.right.0 == self.right.1)
            .then(|| (self.left.0.clone(), self.right.0.clone()))
    }
}

pub fn pinned_ratios(pair: &ConjugacyPair, n: u32, x: &Rational, tol: &Rational) -> Result<PinnedRatios> {
    if n == 0 {
        return Err(Error::Domain("levels start at 1".into()));
    }
    if !is_unit_interval(x) {
        return Err(Error::Domain(alloc::format!("{x} outside [0, 1]")));
    }
    let mut walk = Lockstep::new(pair, x.clone())?;
    for _ in 1..n {
        if walk.exact_image().is_some() {
            break;
        }
        walk.advance()?;
    }
    if walk.exact_image().is_some() {
        return Err(Error::Domain(alloc::format!("{x} lies in the level-{n} lattice of g1")));
    }
    let (a1, b1) = (walk.source.lo().clone(), walk.source.hi().clone());
    let (a2, b2) = (walk.target.lo().clone(), walk.target.hi().clone());
    let slope = walk.right_slope();
    let h_x = conj_eval(pair, x, tol)?;

    let left_run = (x - &a1) * &slope;
    let right_run = (&b1 - x) * &slope;
    let left = ((&h_x.lo - &a2) / &left_run, (&h_x.hi - &a2) / &left_run);
    let right = ((&b2 - &h_x.hi) / &right_run, (&b2 - &h_x.lo) / &right_run);
    Ok(PinnedRatios { n, source_interval: (a1, b1), target_interval: (a2, b2), h_x, left, right })
}
