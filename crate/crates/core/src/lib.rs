//! Exact analysis of topological conjugacies between piecewise-linear
//! unimodal maps of `[0, 1]` whose kinks are all preimages of 0.
//!
//! Everything is computed over [`Rational`]; no floating point is used.
//!
//! * [`map`]: the maps themselves, evaluation, branch inverses and the
//!   carcass level `n0`.
//! * [`lattice`]: the sorted preimage sets `g^-n(0)`, refinement ratios and
//!   their base-level statistics.
//! * [`path`]: following one point down the nested lattice intervals.
//! * [`conjugacy`]: Ulam approximations, slope sequences, enclosures of the
//!   conjugacy and the diagnostics built on them.

#![cfg_attr(not(test), no_std)]
// Errors carry the exact rationals involved; they are rare and cheap next
// to the bignum work, so their size is accepted.
#![allow(clippy::result_large_err)]

extern crate alloc;

pub mod conjugacy;
pub mod error;
pub mod lattice;
pub mod map;
pub mod path;
pub mod rational;

pub use conjugacy::ConjugacyPair;
pub use error::{Error, MapDefect, MapRole, Result};
pub use lattice::{DeltaStats, IntervalRef, Lattice};
pub use map::{CarcassInfo, PLUnimodalMap};
pub use path::{Cell, ExpansionBits, PathState};
pub use rational::Rational;

/// Depth bounds for full lattices and for single paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthCaps {
    pub lattice: u32,
    pub path: usize,
}

impl Default for DepthCaps {
    fn default() -> Self {
        DepthCaps { lattice: lattice::DEFAULT_LATTICE_DEPTH_CAP, path: path::DEFAULT_PATH_DEPTH_CAP }
    }
}
