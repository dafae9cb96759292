//! Path following for a single point: the nested lattice intervals that
//! contain it, without building whole lattices.
//!
//! A [`Cell`] is one interval of level `depth + 1` together with the forward
//! orbits of its endpoints. `g^depth` maps the cell monotonically onto
//! `[0, 1]`, so its unique new point at the next level (the split point) is
//! found by pulling the turning point back along those orbits.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::map::{Branch, PLUnimodalMap};
use crate::rational::{is_unit_interval, sorted_pair, Rational};

/// Default bound on path depth.
pub const DEFAULT_PATH_DEPTH_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell<'m> {
    map: &'m PLUnimodalMap,
    /// `g^i(lo)` for `i = 0..=depth`.
    lo_orbit: Vec<Rational>,
    /// `g^i(hi)` for `i = 0..=depth`.
    hi_orbit: Vec<Rational>,
}

impl<'m> Cell<'m> {
    /// `[0, 1]`, the single level-1 interval.
    pub fn root(map: &'m PLUnimodalMap) -> Self {
        Cell { map, lo_orbit: alloc::vec![Rational::zero()], hi_orbit: alloc::vec![Rational::one()] }
    }

    pub fn map(&self) -> &'m PLUnimodalMap {
        self.map
    }

    pub fn depth(&self) -> usize {
        self.lo_orbit.len() - 1
    }

    pub fn lo(&self) -> &Rational {
        &self.lo_orbit[0]
    }

    pub fn hi(&self) -> &Rational {
        &self.hi_orbit[0]
    }

    pub fn length(&self) -> Rational {
        self.hi() - self.lo()
    }

    /// Image intervals `g^i(cell)` for `i = 0..=depth + 1`; the last two are
    /// both `[0, 1]`.
    pub fn forward_images(&self) -> Vec<(Rational, Rational)> {
        let mut images: Vec<_> = self
            .lo_orbit
            .iter()
            .zip(&self.hi_orbit)
            .map(|(a, b)| sorted_pair(a.clone(), b.clone()))
            .collect();
        images.push((Rational::zero(), Rational::one()));
        images
    }

    /// `g^i(z)` for `i = 0..=depth`, where `z` is the split point.
    pub(crate) fn split_orbit(&self) -> Result<Vec<Rational>> {
        let depth = self.depth();
        let mut orbit = alloc::vec![Rational::zero(); depth + 1];
        orbit[depth] = self.map.turning_point().clone();
        for i in (0..depth).rev() {
            let (a, b) = (&self.lo_orbit[i], &self.hi_orbit[i]);
            let upper = if a <= b { b } else { a };
            let branch = self.map.branch_of(upper);
            orbit[i] = self.map.branch_inverse(branch, &orbit[i + 1]);
        }
        if !(self.lo() < &orbit[0] && &orbit[0] < self.hi()) {
            return Err(Error::InternalInvariant("split point outside its cell"));
        }
        Ok(orbit)
    }

    /// The unique point of the next lattice level inside the cell.
    pub fn split_point(&self) -> Result<Rational> {
        Ok(self.split_orbit()?.swap_remove(0))
    }

    /// Left (`bit = 0`) or right (`bit = 1`) half at the next level.
    pub fn child(&self, bit: u8) -> Result<Cell<'m>> {
        Ok(self.descend(self.split_orbit()?, bit))
    }

    pub(crate) fn descend(&self, mut split: Vec<Rational>, bit: u8) -> Cell<'m> {
        split.push(Rational::one());
        let zero_tail = |orbit: &Vec<Rational>| {
            let mut next = orbit.clone();
            next.push(Rational::zero());
            next
        };
        if bit == 0 {
            Cell { map: self.map, lo_orbit: zero_tail(&self.lo_orbit), hi_orbit: split }
        } else {
            Cell { map: self.map, lo_orbit: split, hi_orbit: zero_tail(&self.hi_orbit) }
        }
    }

    /// Whether `g` is increasing on the cell.
    pub fn branch(&self) -> Branch {
        self.map.branch_of(self.hi())
    }
}

/// Refinement state of one point `x` at depth `n`: `x` lies in the cell,
/// which is the level-`(n+1)` interval with maximal index `k_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathState<'m> {
    x: Rational,
    cell: Cell<'m>,
    bits: Vec<u8>,
    k: BigUint,
}

impl<'m> PathState<'m> {
    pub fn new(map: &'m PLUnimodalMap, x: Rational) -> Result<Self> {
        if !is_unit_interval(&x) {
            return Err(Error::Domain(alloc::format!("path point {x} outside [0, 1]")));
        }
        Ok(PathState { x, cell: Cell::root(map), bits: Vec::new(), k: BigUint::zero() })
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    /// `x_1 .. x_n`.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn k(&self) -> &BigUint {
        &self.k
    }

    pub fn cell(&self) -> &Cell<'m> {
        &self.cell
    }

    /// Left endpoint of the current interval.
    pub fn lo(&self) -> &Rational {
        self.cell.lo()
    }

    /// Right endpoint of the current interval.
    pub fn hi(&self) -> &Rational {
        self.cell.hi()
    }

    pub fn length(&self) -> Rational {
        self.cell.length()
    }

    pub fn forward_images(&self) -> Vec<(Rational, Rational)> {
        self.cell.forward_images()
    }

    pub fn split_point(&self) -> Result<Rational> {
        self.cell.split_point()
    }

    /// `x` is an endpoint of the current interval, hence a zero preimage.
    pub fn at_lattice_point(&self) -> bool {
        &self.x == self.lo() || &self.x == self.hi()
    }

    /// Descend one level. Ties at the split point go right.
    pub fn advance(&mut self) -> Result<u8> {
        Ok(self.advance_noting_split()?.0)
    }

    /// [`advance`](Self::advance), also returning the left half when `x`
    /// was exactly the split point (that half is the left flank of `x`).
    pub(crate) fn advance_noting_split(&mut self) -> Result<(u8, Option<Cell<'m>>)> {
        let orbit = self.cell.split_orbit()?;
        let bit = u8::from(self.x >= orbit[0]);
        let flank = (self.x == orbit[0]).then(|| self.cell.descend(orbit.clone(), 0));
        self.cell = self.cell.descend(orbit, bit);
        self.bits.push(bit);
        self.k <<= 1usize;
        if bit == 1 {
            self.k += 1u32;
        }
        Ok((bit, flank))
    }

    pub fn step(&self) -> Result<(u8, PathState<'m>)> {
        let mut next = self.clone();
        let bit = next.advance()?;
        Ok((bit, next))
    }
}

/// Leading bits of the expansion of `x`, and whether `x` was seen to be a
/// zero preimage within that depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionBits {
    pub bits: Vec<u8>,
    pub finite: bool,
}

pub fn expansion(map: &PLUnimodalMap, x: Rational, depth: usize) -> Result<ExpansionBits> {
    expansion_with_cap(map, x, depth, DEFAULT_PATH_DEPTH_CAP)
}

pub fn expansion_with_cap(map: &PLUnimodalMap, x: Rational, depth: usize, cap: usize) -> Result<ExpansionBits> {
    if depth > cap {
        return Err(Error::DepthCapExceeded { requested: depth as u64, cap: cap as u64 });
    }
    let mut path = PathState::new(map, x)?;
    let mut finite = path.at_lattice_point();
    while path.depth() < depth {
        path.advance()?;
        finite |= path.at_lattice_point();
    }
    Ok(ExpansionBits { bits: path.bits, finite })
}

/// The level-`(n+1)` interval immediately left of the lattice point `x`.
pub fn left_flank_cell<'m>(map: &'m PLUnimodalMap, x: &Rational, n: usize) -> Result<Cell<'m>> {
    if x.is_zero() {
        return Err(Error::Domain("0 has no left flank".into()));
    }
    let mut path = PathState::new(map, x.clone())?;
    if x.is_one() {
        while path.depth() < n {
            path.advance()?;
        }
        return Ok(path.cell);
    }
    let mut flank: Option<Cell<'m>> = None;
    for _ in 0..n {
        flank = match flank {
            Some(cell) => Some(cell.child(1)?),
            None => path.advance_noting_split()?.1,
        };
    }
    flank.ok_or_else(|| Error::NotLatticePoint { x: x.clone(), level: n as u64 + 1 })
}

/// Endpoints `(mu_{n+1,k_n-1}, x)` of the left flank.
pub fn left_flank(map: &PLUnimodalMap, x: &Rational, n: usize) -> Result<(Rational, Rational)> {
    let cell = left_flank_cell(map, x, n)?;
    Ok((cell.lo().clone(), cell.hi().clone()))
}

/// The level-`(n+1)` interval immediately right of the lattice point `x`.
///
/// Ties send a lattice point to the interval on its right, so this is the
/// path cell of `x` itself once `x` has become its left endpoint.
pub fn right_flank_cell<'m>(map: &'m PLUnimodalMap, x: &Rational, n: usize) -> Result<Cell<'m>> {
    if x.is_one() {
        return Err(Error::Domain("1 has no right flank".into()));
    }
    let mut path = PathState::new(map, x.clone())?;
    while path.depth() < n {
        path.advance()?;
    }
    if path.lo() != x {
        return Err(Error::NotLatticePoint { x: x.clone(), level: n as u64 + 1 });
    }
    Ok(path.cell)
}

/// Endpoints `(x, mu_{n+1,j+1})` of the right flank.
pub fn right_flank(map: &PLUnimodalMap, x: &Rational, n: usize) -> Result<(Rational, Rational)> {
    let cell = right_flank_cell(map, x, n)?;
    Ok((cell.lo().clone(), cell.hi().clone()))
}
