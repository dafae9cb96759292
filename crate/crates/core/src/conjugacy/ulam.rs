//! Ulam approximations `h_n` and the piecewise-linearity detector.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::ConjugacyPair;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::rational::{is_unit_interval, Rational};

/// Increasing piecewise-linear homeomorphism of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    breakpoints: Vec<(Rational, Rational)>,
}

impl PLFunction {
    pub fn new(breakpoints: Vec<(Rational, Rational)>) -> Result<Self> {
        let ok_ends = breakpoints.len() >= 2
            && breakpoints[0] == (Rational::zero(), Rational::zero())
            && breakpoints[breakpoints.len() - 1] == (Rational::one(), Rational::one());
        let increasing = breakpoints.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        if !ok_ends || !increasing {
            return Err(Error::Domain("breakpoints must increase from (0, 0) to (1, 1)".into()));
        }
        Ok(PLFunction { breakpoints })
    }

    pub fn identity() -> Self {
        PLFunction {
            breakpoints: alloc::vec![(Rational::zero(), Rational::zero()), (Rational::one(), Rational::one())],
        }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    fn segment_slope(&self, seg: usize) -> Rational {
        let (x0, y0) = &self.breakpoints[seg];
        let (x1, y1) = &self.breakpoints[seg + 1];
        (y1 - y0) / (x1 - x0)
    }

    fn segments(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Index of the segment to the right of `x` (the last one at `x = 1`).
    fn right_segment(&self, x: &Rational) -> usize {
        (self.breakpoints.partition_point(|(bx, _)| bx <= x) - 1).min(self.segments() - 1)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if !is_unit_interval(x) {
            return Err(Error::Domain(alloc::format!("{x} outside [0, 1]")));
        }
        let seg = self.right_segment(x);
        let (x0, y0) = &self.breakpoints[seg];
        Ok(y0 + (x - x0) * self.segment_slope(seg))
    }

    /// One-sided slopes `(f'(x-), f'(x+))`; at the endpoints of `[0, 1]` both
    /// sides report the one existing slope.
    pub fn slopes_at(&self, x: &Rational) -> Result<(Rational, Rational)> {
        if !is_unit_interval(x) {
            return Err(Error::Domain(alloc::format!("{x} outside [0, 1]")));
        }
        let right = self.right_segment(x);
        let at_break = self.breakpoints[right].0 == *x;
        let left = if at_break && right > 0 { right - 1 } else { right };
        Ok((self.segment_slope(left), self.segment_slope(right)))
    }

    /// Same graph with collinear breakpoints removed.
    pub fn normalized(&self) -> PLFunction {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(self.breakpoints.len());
        for p in &self.breakpoints {
            while out.len() >= 2 {
                let (x0, y0) = &out[out.len() - 2];
                let (x1, y1) = &out[out.len() - 1];
                if (x1 - x0) * (&p.1 - y1) == (y1 - y0) * (&p.0 - x1) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p.clone());
        }
        PLFunction { breakpoints: out }
    }

    /// Interior breakpoint abscissas.
    pub fn kinks(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.breakpoints[1..self.segments()].iter().map(|(x, _)| x)
    }
}

/// `h_n`: sends `mu_{n,k}(g1)` to `mu_{n,k}(g2)` and is affine in between.
pub fn ulam_map(pair: &ConjugacyPair, n: u32) -> Result<PLFunction> {
    let cap = pair.caps().lattice;
    let source = Lattice::level_with_cap(pair.g1(), n, cap)?;
    let target = Lattice::level_with_cap(pair.g2(), n, cap)?;
    Ok(PLFunction {
        breakpoints: source.into_points().into_iter().zip(target.into_points()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlVerdict {
    /// `h_m` is unchanged, kinks included, for every `m` from this level on.
    StabilizedAt(u32),
    /// `(m, count)`: kinks of `h_{m+1}` that `h_m` lacks.
    NotStabilized { new_kinks: Vec<(u32, usize)> },
}

/// Compares normalised `h_m` and `h_{m+1}` for `m` in `n_start..=n_end`.
pub fn pl_detector(pair: &ConjugacyPair, n_start: u32, n_end: u32) -> Result<PlVerdict> {
    if n_start == 0 || n_start >= n_end {
        return Err(Error::Domain(alloc::format!("need 1 <= n_start < n_end, got {n_start}, {n_end}")));
    }
    let cap = pair.caps().lattice;
    if n_end + 1 > cap {
        return Err(Error::DepthCapExceeded { requested: u64::from(n_end) + 1, cap: cap.into() });
    }
    let mut source = Lattice::level_with_cap(pair.g1(), n_start, cap)?;
    let mut target = Lattice::level_with_cap(pair.g2(), n_start, cap)?;
    let assemble = |s: &Lattice<'_>, t: &Lattice<'_>| {
        PLFunction { breakpoints: s.points().iter().cloned().zip(t.points().iter().cloned()).collect() }
            .normalized()
    };
    let mut current = assemble(&source, &target);
    let mut new_kinks = Vec::new();
    let mut stable_from = Some(n_start);
    for m in n_start..=n_end {
        source = source.refine()?;
        target = target.refine()?;
        let next = assemble(&source, &target);
        let known: Vec<&Rational> = current.kinks().collect();
        let added = next.kinks().filter(|x| known.binary_search(x).is_err()).count();
        if next != current {
            stable_from = None;
        } else if stable_from.is_none() {
            stable_from = Some(m);
        }
        new_kinks.push((m, added));
        current = next;
    }
    Ok(match stable_from {
        Some(n) => PlVerdict::StabilizedAt(n),
        None => PlVerdict::NotStabilized { new_kinks },
    })
}
