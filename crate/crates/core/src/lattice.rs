//! Preimage lattices `g^-n(0)`, their intervals and refinement ratios.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{out_of_range, Error, Result};
use crate::map::{Branch, PLUnimodalMap, DEFAULT_CARCASS_LEVEL};
use crate::rational::Rational;

/// Default bound on full-lattice levels (level 22 has `2^21 + 1` points).
pub const DEFAULT_LATTICE_DEPTH_CAP: u32 = 22;

/// The sorted zero-preimage set of one map at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice<'m> {
    map: &'m PLUnimodalMap,
    n: u32,
    cap: u32,
    points: Vec<Rational>,
}

/// The open interval between two consecutive lattice points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalRef {
    pub n: u32,
    pub k: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub length: Rational,
}

impl<'m> Lattice<'m> {
    /// Level-1 lattice `{0, 1}`.
    pub fn base(map: &'m PLUnimodalMap) -> Self {
        Self::base_with_cap(map, DEFAULT_LATTICE_DEPTH_CAP)
    }

    pub fn base_with_cap(map: &'m PLUnimodalMap, cap: u32) -> Self {
        Lattice { map, n: 1, cap, points: alloc::vec![Rational::zero(), Rational::one()] }
    }

    /// `g^-n(0)`, built by refining upward from level 1.
    pub fn level(map: &'m PLUnimodalMap, n: u32) -> Result<Self> {
        Self::level_with_cap(map, n, DEFAULT_LATTICE_DEPTH_CAP)
    }

    pub fn level_with_cap(map: &'m PLUnimodalMap, n: u32, cap: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("lattice levels start at 1".into()));
        }
        if n > cap {
            return Err(Error::DepthCapExceeded { requested: n.into(), cap: cap.into() });
        }
        let mut lattice = Self::base_with_cap(map, cap);
        while lattice.n < n {
            lattice = lattice.refine()?;
        }
        Ok(lattice)
    }

    /// The next level: left-branch preimages of every point followed by the
    /// right-branch preimages in reverse, with the shared preimage `v` of 1
    /// kept once.
    pub fn refine(&self) -> Result<Lattice<'m>> {
        if self.n >= self.cap {
            return Err(Error::DepthCapExceeded { requested: u64::from(self.n) + 1, cap: self.cap.into() });
        }
        let mut points = Vec::with_capacity(2 * self.points.len() - 1);
        points.extend(self.points.iter().map(|y| self.map.branch_inverse(Branch::Increasing, y)));
        points.extend(self.points.iter().rev().skip(1).map(|y| self.map.branch_inverse(Branch::Decreasing, y)));
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Ok(Lattice { map: self.map, n: self.n + 1, cap: self.cap, points })
    }

    pub fn map(&self) -> &'m PLUnimodalMap {
        self.map
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Rational> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn interval_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn point(&self, k: usize) -> Result<&Rational> {
        self.points.get(k).ok_or_else(|| out_of_range(k, self.points.len()))
    }

    pub fn interval(&self, k: usize) -> Result<IntervalRef> {
        if k >= self.interval_count() {
            return Err(out_of_range(k, self.interval_count()));
        }
        let (lo, hi) = (self.points[k].clone(), self.points[k + 1].clone());
        Ok(IntervalRef { n: self.n, k, length: &hi - &lo, lo, hi })
    }

    pub fn intervals(&self) -> impl Iterator<Item = IntervalRef> + '_ {
        self.points.windows(2).enumerate().map(move |(k, w)| IntervalRef {
            n: self.n,
            k,
            lo: w[0].clone(),
            hi: w[1].clone(),
            length: &w[1] - &w[0],
        })
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.points.binary_search(x).is_ok()
    }

    /// Maximal `k` with `x` in the closed interval `[mu_k, mu_{k+1}]`.
    pub fn locate(&self, x: &Rational) -> Result<usize> {
        if x < &self.points[0] || x > &self.points[self.points.len() - 1] {
            return Err(Error::Domain(alloc::format!("{x} outside [0, 1]")));
        }
        let k = self.points.partition_point(|p| p <= x) - 1;
        Ok(k.min(self.interval_count() - 1))
    }

    /// Refinement ratio of interval `k`, given the next level.
    pub fn delta_with(&self, finer: &Lattice<'_>, k: usize) -> Result<Rational> {
        if finer.n != self.n + 1 {
            return Err(Error::Domain("delta needs consecutive levels".into()));
        }
        let iv = self.interval(k)?;
        Ok((&finer.points[2 * k + 1] - &iv.lo) / iv.length)
    }

    /// `delta_{n,k}` for every interval of this level.
    pub fn delta_table(&self) -> Result<Vec<Rational>> {
        let finer = self.refine()?;
        Ok(self
            .points
            .windows(2)
            .enumerate()
            .map(|(k, w)| (&finer.points[2 * k + 1] - &w[0]) / (&w[1] - &w[0]))
            .collect())
    }
}

/// `delta_{n,k} = (mu_{n+1,2k+1} - mu_{n,k}) / (mu_{n,k+1} - mu_{n,k})`.
pub fn delta(map: &PLUnimodalMap, n: u32, k: usize) -> Result<Rational> {
    let coarse = Lattice::level(map, n)?;
    if k >= coarse.interval_count() {
        return Err(out_of_range(k, coarse.interval_count()));
    }
    let finer = coarse.refine()?;
    coarse.delta_with(&finer, k)
}

/// Refinement ratios at the base level `n0 - 1` of a carcass map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaStats {
    /// `delta_{k*}` for `0 <= k* < 2^(n0-2)`, in index order.
    pub by_index: Vec<Rational>,
    pub delta_minus: Rational,
    pub delta_plus: Rational,
    pub delta_0: Rational,
    pub n0: u32,
}

impl DeltaStats {
    /// The set `D`.
    pub fn set(&self) -> BTreeSet<Rational> {
        self.by_index.iter().cloned().collect()
    }

    /// `delta_k`, the base ratio in the residue class of `k`.
    pub fn delta_k(&self, k: &BigUint) -> &Rational {
        let modulus = BigUint::from(self.by_index.len());
        let idx: usize = (k % modulus).try_into().expect("residue below table length");
        &self.by_index[idx]
    }
}

pub fn delta_stats(map: &PLUnimodalMap) -> Result<DeltaStats> {
    let info = map.carcass_info(DEFAULT_CARCASS_LEVEL)?;
    delta_stats_at(map, info.n0)
}

pub(crate) fn delta_stats_at(map: &PLUnimodalMap, n0: u32) -> Result<DeltaStats> {
    let base = Lattice::level(map, n0 - 1)?;
    let classes = 1usize << (n0 - 2);
    let mut by_index = base.delta_table()?;
    by_index.truncate(classes);

    let one = Rational::one();
    let mut delta_minus = one.clone();
    let mut delta_plus = Rational::zero();
    for d in &by_index {
        let r = &one - d;
        let (lo, hi) = if *d <= r { (d, &r) } else { (&r, d) };
        if *lo < delta_minus {
            delta_minus = lo.clone();
        }
        if *hi > delta_plus {
            delta_plus = hi.clone();
        }
    }
    Ok(DeltaStats { delta_0: by_index[0].clone(), by_index, delta_minus, delta_plus, n0 })
}

/// Reflection `t -> 1 - t`.
pub fn rot(t: &Rational) -> Rational {
    Rational::one() - t
}

/// `rot` applied `times` times.
pub fn rot_pow(t: &Rational, times: u64) -> Rational {
    if times % 2 == 1 {
        rot(t)
    } else {
        t.clone()
    }
}

/// Digit reversal of an `n`-digit index: `2^n - t - 1`.
pub fn rot_n(n: u32, t: u64) -> Result<u64> {
    if n > 63 {
        return Err(out_of_range(n, 64));
    }
    let size = 1u64 << n;
    if t >= size {
        return Err(out_of_range(t, size));
    }
    Ok(size - t - 1)
}

/// `k_{i,j} = sum_{t=i..=j} x_t 2^(j-t)` over 1-indexed bits.
pub fn bits_to_index(bits: &[u8], i: usize, j: usize) -> Result<BigUint> {
    if i == 0 || i > j || j > bits.len() {
        return Err(out_of_range(alloc::format!("({i}, {j})"), bits.len() + 1));
    }
    let mut k = BigUint::zero();
    for &b in &bits[i - 1..j] {
        k <<= 1usize;
        if b != 0 {
            k += 1u32;
        }
    }
    Ok(k)
}

/// [`bits_to_index`] for indices known to fit a machine word.
pub fn bits_to_index_u64(bits: &[u8], i: usize, j: usize) -> Result<u64> {
    let k = bits_to_index(bits, i, j)?;
    u64::try_from(&k).map_err(|_| out_of_range(k, u64::MAX))
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
    fn level_examples() {
        let tent = PLUnimodalMap::tent();
        assert_eq!(Lattice::level(&tent, 3).unwrap().points(), &[int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)]);
        assert_eq!(Lattice::level(&thm5(), 1).unwrap().points(), &[int(0), int(1)]);
        let skew = PLUnimodalMap::skew_tent(rat(1, 5)).unwrap();
        assert_eq!(
            Lattice::level(&skew, 3).unwrap().points(),
            &[int(0), rat(1, 25), rat(1, 5), rat(21, 25), int(1)]
        );
        assert_eq!(
            Lattice::level(&thm5(), 4).unwrap().points(),
            &[int(0), rat(2, 25), rat(1, 5), rat(7, 20), rat(1, 2), rat(5, 8), rat(3, 4), rat(9, 10), int(1)]
        );
    }

    #[test]
    fn refine_from_level_one_adds_turning_point() {
        let g = thm5();
        let l2 = Lattice::base(&g).refine().unwrap();
        assert_eq!(l2.points(), &[int(0), rat(1, 2), int(1)]);
    }

    #[test]
    fn depth_cap() {
        let tent = PLUnimodalMap::tent();
        assert_eq!(
            Lattice::level(&tent, 40),
            Err(Error::DepthCapExceeded { requested: 40, cap: 22 })
        );
        let capped = Lattice::level_with_cap(&tent, 3, 3).unwrap();
        assert!(matches!(capped.refine(), Err(Error::DepthCapExceeded { .. })));
        assert!(Lattice::level(&tent, 0).is_err());
    }

    #[test]
    fn delta_examples() {
        let tent = PLUnimodalMap::tent();
        for n in 1..6 {
            for k in 0..(1usize << (n - 1)) {
                assert_eq!(delta(&tent, n, k).unwrap(), rat(1, 2));
            }
        }
        assert_eq!(delta(&thm5(), 2, 0).unwrap(), rat(2, 5));
        assert_eq!(delta(&thm5(), 2, 1).unwrap(), rat(1, 2));
        assert_eq!(delta(&thm5(), 3, 3).unwrap(), rat(3, 5));
        let skew = PLUnimodalMap::skew_tent(rat(1, 5)).unwrap();
        assert_eq!(delta(&skew, 1, 0).unwrap(), rat(1, 5));
        assert!(matches!(delta(&tent, 2, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn stats_examples() {
        let tent = delta_stats(&PLUnimodalMap::tent()).unwrap();
        assert_eq!(tent.by_index, vec![rat(1, 2)]);
        assert_eq!((tent.delta_minus, tent.delta_plus, tent.delta_0), (rat(1, 2), rat(1, 2), rat(1, 2)));

        let g = delta_stats(&thm5()).unwrap();
        assert_eq!(g.n0, 3);
        assert_eq!(g.set(), [rat(2, 5), rat(1, 2)].into_iter().collect());
        assert_eq!((g.delta_minus, g.delta_plus, g.delta_0), (rat(2, 5), rat(3, 5), rat(2, 5)));

        let skew = delta_stats(&PLUnimodalMap::skew_tent(rat(1, 5)).unwrap()).unwrap();
        assert_eq!(skew.by_index, vec![rat(1, 5)]);
        assert_eq!((skew.delta_minus, skew.delta_plus, skew.delta_0), (rat(1, 5), rat(4, 5), rat(1, 5)));
    }

    #[test]
    fn rot_examples() {
        assert_eq!(rot(&rat(2, 5)), rat(3, 5));
        assert_eq!(rot_n(3, 5).unwrap(), 2);
        assert_eq!(rot_n(1, 0).unwrap(), 1);
        assert!(rot_n(3, 8).is_err());
    }

    #[test]
    fn index_examples() {
        assert_eq!(bits_to_index_u64(&[1, 0, 1], 1, 3).unwrap(), 5);
        assert_eq!(bits_to_index_u64(&[1, 0, 1], 2, 3).unwrap(), 1);
        assert_eq!(bits_to_index_u64(&[0, 0, 0, 0], 1, 4).unwrap(), 0);
        assert!(bits_to_index(&[1, 0], 2, 3).is_err());
        assert!(bits_to_index(&[1, 0], 0, 1).is_err());
    }

    #[test]
    fn locate_uses_maximal_index() {
        let tent = PLUnimodalMap::tent();
        let l = Lattice::level(&tent, 3).unwrap();
        assert_eq!(l.locate(&rat(1, 2)).unwrap(), 2);
        assert_eq!(l.locate(&rat(1, 3)).unwrap(), 1);
        assert_eq!(l.locate(&int(0)).unwrap(), 0);
        assert_eq!(l.locate(&int(1)).unwrap(), 3);
    }
}
