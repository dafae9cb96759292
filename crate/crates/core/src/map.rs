//! Piecewise-linear unimodal maps of the unit interval.
//!
//! A map is stored as its vertex list after merging collinear neighbours, so
//! two maps with the same graph compare equal and every interior vertex is a
//! genuine kink.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, MapDefect, Result};
use crate::rational::{is_unit_interval, Rational};

/// Level bound used by [`PLUnimodalMap::carcass_info`] callers that have no
/// better choice; keeps lattices at `2^11 + 1` points.
pub const DEFAULT_CARCASS_LEVEL: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLUnimodalMap {
    vertices: Vec<(Rational, Rational)>,
    slopes: Vec<Rational>,
    turn: usize,
}

/// The kinks of a carcass map and the first lattice level holding all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarcassInfo {
    pub n0: u32,
    pub kinks: Vec<Rational>,
}

/// Monotone branch of a unimodal map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Increasing,
    Decreasing,
}

impl PLUnimodalMap {
    /// Validate a vertex list and build the map.
    pub fn new(vertices: Vec<(Rational, Rational)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(MapDefect::TooFewVertices(vertices.len()).into());
        }
        let zero = Rational::zero();
        let one = Rational::one();
        if vertices[0] != (zero.clone(), zero.clone()) {
            return Err(MapDefect::FirstVertexNotOrigin.into());
        }
        if vertices[vertices.len() - 1] != (one.clone(), zero.clone()) {
            return Err(MapDefect::LastVertexNotOneZero.into());
        }
        for (i, pair) in vertices.windows(2).enumerate() {
            if pair[1].0 <= pair[0].0 {
                return Err(MapDefect::AbscissaNotIncreasing(i + 1).into());
            }
        }
        if let Some(i) = vertices.iter().position(|(_, y)| !is_unit_interval(y)) {
            return Err(MapDefect::OrdinateOutOfRange(i).into());
        }

        let vertices = merge_collinear(vertices);

        let mut peaks = vertices.iter().enumerate().filter(|(_, (_, y))| y.is_one());
        let turn = match (peaks.next(), peaks.next()) {
            (None, _) => return Err(MapDefect::NoUnitMaximum.into()),
            (Some(_), Some(_)) => return Err(MapDefect::MultipleUnitMaxima.into()),
            (Some((i, _)), None) => i,
        };

        let mut slopes = Vec::with_capacity(vertices.len() - 1);
        for (i, pair) in vertices.windows(2).enumerate() {
            let (x0, y0) = &pair[0];
            let (x1, y1) = &pair[1];
            if y0 == y1 {
                return Err(MapDefect::ZeroSlope(i).into());
            }
            if i < turn && y1 < y0 {
                return Err(MapDefect::NotIncreasingBeforeTurn(i + 1).into());
            }
            if i >= turn && y1 > y0 {
                return Err(MapDefect::NotDecreasingAfterTurn(i + 1).into());
            }
            slopes.push((y1 - y0) / (x1 - x0));
        }

        Ok(PLUnimodalMap { vertices, slopes, turn })
    }

    /// The skew tent map with turning point `v`.
    pub fn skew_tent(v: Rational) -> Result<Self> {
        if !v.is_positive() || v >= Rational::one() {
            return Err(Error::Domain(alloc::format!("skew tent parameter {v} must lie in (0, 1)")));
        }
        Self::new(alloc::vec![
            (Rational::zero(), Rational::zero()),
            (v, Rational::one()),
            (Rational::one(), Rational::zero()),
        ])
    }

    pub fn tent() -> Self {
        Self::skew_tent(Rational::new(1.into(), 2.into())).expect("1/2 is a valid parameter")
    }

    /// The map whose level-`m` preimage lattice is exactly `points`
    /// (`2^(m-1) + 1` increasing values from 0 to 1): each point is sent
    /// affinely onto the point of the coarser level with the same
    /// (reflected) index. Every such map is a carcass map.
    pub fn from_level_points(points: &[Rational]) -> Result<Self> {
        let count = points.len();
        if count < 3 || !(count - 1).is_power_of_two() {
            return Err(Error::Domain(alloc::format!(
                "level lattices have 2^(m-1) + 1 >= 3 points, got {count}"
            )));
        }
        let half = (count - 1) / 2;
        let vertices = points
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let coarse = if k <= half { k } else { count - 1 - k };
                (x.clone(), points[2 * coarse].clone())
            })
            .collect();
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[(Rational, Rational)] {
        &self.vertices
    }

    /// Turning point `v`, where the map reaches 1.
    pub fn turning_point(&self) -> &Rational {
        &self.vertices[self.turn].0
    }

    /// Interior vertex abscissas, in increasing order. Includes `v`.
    pub fn kinks(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.vertices[1..self.vertices.len() - 1].iter().map(|(x, _)| x)
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if !is_unit_interval(x) {
            return Err(Error::Domain(alloc::format!("eval at {x} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Rational) -> Rational {
        let seg = self
            .vertices
            .partition_point(|(vx, _)| vx <= x)
            .saturating_sub(1)
            .min(self.slopes.len() - 1);
        let (x0, y0) = &self.vertices[seg];
        y0 + (x - x0) * &self.slopes[seg]
    }

    /// `g^n(x)`.
    pub fn iterate(&self, x: &Rational, n: u32) -> Result<Rational> {
        let mut y = self.eval(x)?;
        if n == 0 {
            return Ok(x.clone());
        }
        for _ in 1..n {
            y = self.eval_unchecked(&y);
        }
        Ok(y)
    }

    /// Smallest `m >= 1` with `g^m(x) = 0`, searching up to `limit`.
    pub fn zero_hitting_time(&self, x: &Rational, limit: u32) -> Result<Option<u32>> {
        let mut y = self.eval(x)?;
        for m in 1..=limit {
            if y.is_zero() {
                return Ok(Some(m));
            }
            y = self.eval_unchecked(&y);
        }
        Ok(None)
    }

    pub fn branch_of(&self, x: &Rational) -> Branch {
        if x <= self.turning_point() {
            Branch::Increasing
        } else {
            Branch::Decreasing
        }
    }

    /// Unique preimage of `y` on one branch. `y` must lie in `[0, 1]`.
    pub(crate) fn branch_inverse(&self, branch: Branch, y: &Rational) -> Rational {
        let seg = match branch {
            Branch::Increasing => {
                let ys = &self.vertices[..=self.turn];
                ys.partition_point(|(_, vy)| vy <= y).saturating_sub(1).min(self.turn - 1)
            }
            Branch::Decreasing => {
                let ys = &self.vertices[self.turn..];
                self.turn + ys.partition_point(|(_, vy)| vy > y).saturating_sub(1).min(ys.len() - 2)
            }
        };
        let (x0, y0) = &self.vertices[seg];
        x0 + (y - y0) / &self.slopes[seg]
    }

    /// Exact inverse of the map restricted to `[lo, hi]`, which must not
    /// contain the turning point in its interior.
    pub fn monotone_inverse(&self, lo: &Rational, hi: &Rational, y: &Rational) -> Result<Rational> {
        self.check_interval(lo, hi)?;
        let v = self.turning_point();
        if lo < v && v < hi {
            return Err(Error::NotMonotone { lo: lo.clone(), hi: hi.clone() });
        }
        let branch = if hi <= v { Branch::Increasing } else { Branch::Decreasing };
        let (ga, gb) = (self.eval_unchecked(lo), self.eval_unchecked(hi));
        let (ylo, yhi) = if ga <= gb { (&ga, &gb) } else { (&gb, &ga) };
        if y < ylo || y > yhi {
            return Err(Error::OutOfRange { lo: lo.clone(), hi: hi.clone(), y: y.clone() });
        }
        Ok(self.branch_inverse(branch, y))
    }

    /// Sorted solutions of `g(x) = y`.
    pub fn preimage_points(&self, y: &Rational) -> Result<Vec<Rational>> {
        if !is_unit_interval(y) {
            return Err(Error::Domain(alloc::format!("preimage of {y} outside [0, 1]")));
        }
        if y.is_one() {
            return Ok(alloc::vec![self.turning_point().clone()]);
        }
        Ok(alloc::vec![
            self.branch_inverse(Branch::Increasing, y),
            self.branch_inverse(Branch::Decreasing, y),
        ])
    }

    /// Exact image `[min, max]` of `[lo, hi]`.
    pub fn interval_image(&self, lo: &Rational, hi: &Rational) -> Result<(Rational, Rational)> {
        self.check_interval(lo, hi)?;
        let ga = self.eval_unchecked(lo);
        let gb = self.eval_unchecked(hi);
        let v = self.turning_point();
        if lo < v && v < hi {
            let min = if ga <= gb { ga } else { gb };
            return Ok((min, Rational::one()));
        }
        Ok(if ga <= gb { (ga, gb) } else { (gb, ga) })
    }

    /// Smallest level `n0 <= n_max` whose preimage lattice contains every
    /// kink.
    pub fn carcass_info(&self, n_max: u32) -> Result<CarcassInfo> {
        if n_max == 0 {
            return Err(Error::Domain("carcass search needs n_max >= 1".into()));
        }
        let mut n0 = 1;
        for kink in self.kinks() {
            match self.zero_hitting_time(kink, n_max)? {
                Some(m) => n0 = n0.max(m),
                None => return Err(Error::NotCarcassWithin(n_max)),
            }
        }
        Ok(CarcassInfo { n0, kinks: self.kinks().cloned().collect() })
    }

    fn check_interval(&self, lo: &Rational, hi: &Rational) -> Result<()> {
        if !is_unit_interval(lo) || !is_unit_interval(hi) || lo > hi {
            return Err(Error::Domain(alloc::format!("[{lo}, {hi}] is not a subinterval of [0, 1]")));
        }
        Ok(())
    }
}

fn merge_collinear(vertices: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(vertices.len());
    for vertex in vertices {
        while out.len() >= 2 {
            let (x0, y0) = &out[out.len() - 2];
            let (x1, y1) = &out[out.len() - 1];
            let (x2, y2) = &vertex;
            if (x1 - x0) * (y2 - y1) == (y1 - y0) * (x2 - x1) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(vertex);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;

    fn thm5() -> PLUnimodalMap {
        PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 5), rat(1, 2)),
            (rat(1, 2), int(1)),
            (int(1), int(0)),
        ])
        .unwrap()
    }

    #[test]
    fn tent_from_vertices() {
        let m = PLUnimodalMap::new(vec![(int(0), int(0)), (rat(1, 2), int(1)), (int(1), int(0))]).unwrap();
        assert_eq!(m.turning_point(), &rat(1, 2));
        assert_eq!(m, PLUnimodalMap::tent());
    }

    #[test]
    fn counterexample_map_is_valid() {
        assert_eq!(thm5().turning_point(), &rat(1, 2));
        assert_eq!(thm5().kinks().count(), 2);
    }

    #[test]
    fn rejects_missing_maximum() {
        let err = PLUnimodalMap::new(vec![(int(0), int(0)), (rat(1, 2), rat(1, 2)), (int(1), int(0))]);
        assert_eq!(err, Err(Error::MalformedMap(MapDefect::NoUnitMaximum)));
    }

    #[test]
    fn rejects_endpoint_and_order_violations() {
        let bad_start = PLUnimodalMap::new(vec![(int(0), rat(1, 3)), (rat(1, 2), int(1)), (int(1), int(0))]);
        assert_eq!(bad_start, Err(MapDefect::FirstVertexNotOrigin.into()));
        let bad_end = PLUnimodalMap::new(vec![(int(0), int(0)), (rat(1, 2), int(1)), (int(1), rat(1, 4))]);
        assert_eq!(bad_end, Err(MapDefect::LastVertexNotOneZero.into()));
        let unordered = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 2), int(1)),
            (rat(1, 2), rat(1, 2)),
            (int(1), int(0)),
        ]);
        assert_eq!(unordered, Err(MapDefect::AbscissaNotIncreasing(2).into()));
        let two_peaks = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 4), int(1)),
            (rat(1, 2), rat(1, 2)),
            (rat(3, 4), int(1)),
            (int(1), int(0)),
        ]);
        assert_eq!(two_peaks, Err(MapDefect::MultipleUnitMaxima.into()));
        let flat = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 4), rat(1, 2)),
            (rat(1, 3), rat(1, 2)),
            (rat(1, 2), int(1)),
            (int(1), int(0)),
        ]);
        assert_eq!(flat, Err(MapDefect::ZeroSlope(1).into()));
        let dip = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 4), rat(1, 2)),
            (rat(1, 3), rat(1, 3)),
            (rat(1, 2), int(1)),
            (int(1), int(0)),
        ]);
        assert_eq!(dip, Err(MapDefect::NotIncreasingBeforeTurn(2).into()));
        let bump = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 2), int(1)),
            (rat(2, 3), rat(1, 4)),
            (rat(3, 4), rat(1, 2)),
            (int(1), int(0)),
        ]);
        assert_eq!(bump, Err(MapDefect::NotDecreasingAfterTurn(3).into()));
    }

    #[test]
    fn collinear_vertices_are_merged() {
        let m = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 4), rat(1, 2)),
            (rat(1, 2), int(1)),
            (rat(3, 4), rat(1, 2)),
            (int(1), int(0)),
        ])
        .unwrap();
        assert_eq!(m, PLUnimodalMap::tent());
        assert_eq!(m.vertices().len(), 3);
    }

    #[test]
    fn skew_tent_slopes_and_domain() {
        let m = PLUnimodalMap::skew_tent(rat(1, 5)).unwrap();
        assert_eq!(m.slopes(), &[int(5), rat(-5, 4)]);
        assert!(matches!(PLUnimodalMap::skew_tent(int(0)), Err(Error::Domain(_))));
        assert!(matches!(PLUnimodalMap::skew_tent(int(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn evaluation() {
        assert_eq!(thm5().eval(&rat(1, 5)).unwrap(), rat(1, 2));
        assert_eq!(PLUnimodalMap::tent().eval(&rat(1, 4)).unwrap(), rat(1, 2));
        assert_eq!(thm5().eval(&rat(3, 4)).unwrap(), rat(1, 2));
        assert_eq!(thm5().eval(&int(1)).unwrap(), int(0));
        assert!(matches!(thm5().eval(&rat(5, 4)), Err(Error::Domain(_))));
    }

    #[test]
    fn monotone_inverse_examples() {
        let tent = PLUnimodalMap::tent();
        assert_eq!(tent.monotone_inverse(&rat(1, 2), &int(1), &int(0)).unwrap(), int(1));
        let g = thm5();
        assert_eq!(g.monotone_inverse(&int(0), &rat(1, 2), &rat(1, 2)).unwrap(), rat(1, 5));
        assert_eq!(g.monotone_inverse(&rat(1, 2), &int(1), &rat(3, 4)).unwrap(), rat(5, 8));
        assert!(matches!(g.monotone_inverse(&rat(1, 4), &rat(3, 4), &rat(1, 2)), Err(Error::NotMonotone { .. })));
        assert!(matches!(g.monotone_inverse(&int(0), &rat(1, 5), &rat(3, 4)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn preimages() {
        assert_eq!(PLUnimodalMap::tent().preimage_points(&rat(1, 2)).unwrap(), vec![rat(1, 4), rat(3, 4)]);
        assert_eq!(thm5().preimage_points(&rat(1, 2)).unwrap(), vec![rat(1, 5), rat(3, 4)]);
        assert_eq!(thm5().preimage_points(&int(0)).unwrap(), vec![int(0), int(1)]);
        assert_eq!(thm5().preimage_points(&int(1)).unwrap(), vec![rat(1, 2)]);
        assert!(thm5().preimage_points(&int(2)).is_err());
    }

    #[test]
    fn interval_images() {
        let tent = PLUnimodalMap::tent();
        assert_eq!(tent.interval_image(&int(0), &int(1)).unwrap(), (int(0), int(1)));
        assert_eq!(tent.interval_image(&rat(1, 4), &rat(3, 8)).unwrap(), (rat(1, 2), rat(3, 4)));
        assert_eq!(thm5().interval_image(&rat(2, 5), &rat(3, 5)).unwrap(), (rat(4, 5), int(1)));
        assert!(tent.interval_image(&rat(1, 2), &rat(1, 4)).is_err());
    }

    #[test]
    fn carcass_levels() {
        assert_eq!(PLUnimodalMap::tent().carcass_info(12).unwrap().n0, 2);
        assert_eq!(thm5().carcass_info(12).unwrap().n0, 3);
        assert_eq!(PLUnimodalMap::skew_tent(rat(1, 5)).unwrap().carcass_info(12).unwrap().n0, 2);
        // slope 1 through the origin: 1/3 is a fixed point, never reaches 0
        let stuck = PLUnimodalMap::new(vec![
            (int(0), int(0)),
            (rat(1, 3), rat(1, 3)),
            (rat(1, 2), int(1)),
            (int(1), int(0)),
        ])
        .unwrap();
        assert_eq!(stuck.carcass_info(12), Err(Error::NotCarcassWithin(12)));
    }

    #[test]
    fn level_points_constructor() {
        let points = [int(0), rat(1, 10), rat(1, 3), rat(1, 2), int(1)];
        let m = PLUnimodalMap::from_level_points(&points).unwrap();
        assert_eq!(m.turning_point(), &rat(1, 3));
        assert_eq!(m.eval(&rat(1, 10)).unwrap(), rat(1, 3));
        assert_eq!(m.eval(&rat(1, 2)).unwrap(), rat(1, 3));
        assert!(m.carcass_info(12).unwrap().n0 <= 3);
    }
}
