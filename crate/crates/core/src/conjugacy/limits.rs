//! Evidence-based classification of one-sided slope limits.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{min_max, Rational};

/// Slopes `h_n'(x-)`, `h_n'(x+)` at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeEntry {
    pub n: u32,
    pub left: Rational,
    pub right: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeSequence {
    pub x: Rational,
    pub entries: Vec<SlopeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitTag {
    ConvergesTo(Rational),
    Zero,
    Infinity,
    Oscillates,
    Inconclusive,
}

/// Summary of the tail window a tag was decided on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailEvidence {
    pub min: Rational,
    pub max: Rational,
    pub last: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitClass {
    pub tag: LimitTag,
    pub evidence: TailEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitParams {
    pub window: usize,
    pub rel_tol: Rational,
    pub big: Rational,
    pub small: Rational,
}

impl Default for LimitParams {
    fn default() -> Self {
        let million = Rational::from_integer(BigInt::from(1_000_000));
        LimitParams {
            window: 20,
            rel_tol: million.recip(),
            big: million.clone(),
            small: million.recip(),
        }
    }
}

/// Classify `(left, right)` limits from the last `window` entries.
///
/// Per side, first match wins:
/// * `ConvergesTo(last)` when `max - min <= rel_tol * max`;
/// * `Zero` when `max <= small` and the tail ends below where it starts;
/// * `Infinity` when `min >= big` and the tail ends above where it starts;
/// * `Oscillates` when both halves of the tail rise and fall somewhere and
///   have `max / min >= 1 + 100 rel_tol`;
/// * `Inconclusive` otherwise.
pub fn classify_limits(seq: &SlopeSequence, params: &LimitParams) -> Result<(LimitClass, LimitClass)> {
    let need = params.window.max(2);
    if seq.entries.len() < need {
        return Err(Error::InsufficientDepth { have: seq.entries.len(), need });
    }
    let tail = &seq.entries[seq.entries.len() - need..];
    let left: Vec<Rational> = tail.iter().map(|e| e.left.clone()).collect();
    let right: Vec<Rational> = tail.iter().map(|e| e.right.clone()).collect();
    Ok((classify_tail(&left, params), classify_tail(&right, params)))
}

pub fn classify_tail(tail: &[Rational], params: &LimitParams) -> LimitClass {
    let (min, max) = min_max(tail).expect("non-empty tail");
    let first = &tail[0];
    let last = tail[tail.len() - 1].clone();

    let tag = if !max.is_zero() && &max - &min <= &params.rel_tol * &max {
        LimitTag::ConvergesTo(last.clone())
    } else if max <= params.small && last < *first {
        LimitTag::Zero
    } else if min >= params.big && last > *first {
        LimitTag::Infinity
    } else if oscillates(tail, params) {
        LimitTag::Oscillates
    } else {
        LimitTag::Inconclusive
    };
    LimitClass { tag, evidence: TailEvidence { min, max, last } }
}

fn oscillates(tail: &[Rational], params: &LimitParams) -> bool {
    let threshold = Rational::one() + Rational::from_integer(100.into()) * &params.rel_tol;
    let (a, b) = tail.split_at(tail.len() / 2);
    [a, b].iter().all(|half| match min_max(half) {
        Some((lo, hi)) if !lo.is_zero() => {
            let rises = half.windows(2).any(|w| w[1] > w[0]);
            let falls = half.windows(2).any(|w| w[1] < w[0]);
            rises && falls && hi / lo >= threshold
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pow, rat};

    fn sequence(values: impl Fn(u32) -> Rational, count: u32) -> SlopeSequence {
        SlopeSequence {
            x: int(0),
            entries: (1..=count).map(|n| SlopeEntry { n, left: values(n), right: values(n) }).collect(),
        }
    }

    #[test]
    fn geometric_decay_is_zero() {
        let seq = sequence(|n| pow(&rat(2, 5), n - 1), 60);
        let (l, r) = classify_limits(&seq, &LimitParams::default()).unwrap();
        assert_eq!((l.tag, r.tag), (LimitTag::Zero, LimitTag::Zero));
    }

    #[test]
    fn constant_converges() {
        let seq = sequence(|_| int(1), 20);
        let (l, _) = classify_limits(&seq, &LimitParams::default()).unwrap();
        assert_eq!(l.tag, LimitTag::ConvergesTo(int(1)));
    }

    #[test]
    fn growth_is_infinity() {
        let seq = sequence(|n| pow(&int(3), n), 60);
        assert_eq!(classify_limits(&seq, &LimitParams::default()).unwrap().1.tag, LimitTag::Infinity);
    }

    #[test]
    fn alternation_oscillates() {
        let seq = sequence(|n| if n % 2 == 0 { int(1) } else { rat(28, 25) }, 30);
        assert_eq!(classify_limits(&seq, &LimitParams::default()).unwrap().0.tag, LimitTag::Oscillates);
    }

    #[test]
    fn slow_decay_is_inconclusive() {
        let seq = sequence(|n| pow(&rat(2, 5), n - 1), 30);
        assert_eq!(classify_limits(&seq, &LimitParams::default()).unwrap().0.tag, LimitTag::Inconclusive);
    }

    #[test]
    fn short_sequences_are_rejected() {
        let seq = sequence(|_| int(1), 5);
        assert_eq!(
            classify_limits(&seq, &LimitParams::default()),
            Err(Error::InsufficientDepth { have: 5, need: 20 })
        );
    }
}
