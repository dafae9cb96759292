mod common;

use std::collections::BTreeSet;

use common::{carcass_map, skew, thm5, unit_rational};
use conjlab_core::conjugacy::{conj_eval, pinned_ratios, residual_check, slope_sequence, ulam_map, Lockstep};
use conjlab_core::path::{expansion, left_flank};
use conjlab_core::rational::{int, inv_pow2, pow, rat};
use conjlab_core::{Cell, ConjugacyPair, Lattice, PLUnimodalMap, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn named_pairs() -> Vec<ConjugacyPair> {
    let tent = PLUnimodalMap::tent;
    [(tent(), skew(1, 5)), (tent(), thm5()), (skew(1, 3), thm5()), (thm5(), skew(1, 5))]
        .into_iter()
        .map(|(a, b)| ConjugacyPair::new(a, b).unwrap())
        .collect()
}

fn pair() -> impl Strategy<Value = ConjugacyPair> {
    (carcass_map(), carcass_map()).prop_map(|(a, b)| ConjugacyPair::new(a, b).unwrap())
}

fn exact_h(pair: &ConjugacyPair, x: &Rational) -> Rational {
    // the walk stops as soon as x becomes an endpoint, long before this width
    let e = conj_eval(pair, x, &inv_pow2(4000)).unwrap();
    assert!(e.exact, "{x} is not a lattice point of g1");
    e.lo
}

fn is_lattice_point(map: &PLUnimodalMap, x: &Rational, level: u32) -> bool {
    map.zero_hitting_time(x, level).unwrap().is_some()
}

fn check_lattice_correspondence(pair: &ConjugacyPair, top: u32) {
    for n in 1..=top {
        let l1 = Lattice::level(pair.g1(), n).unwrap();
        let l2 = Lattice::level(pair.g2(), n).unwrap();
        for (p, q) in l1.points().iter().zip(l2.points()) {
            let e = conj_eval(pair, p, &inv_pow2(60)).unwrap();
            assert!(e.exact && e.lo == *q && e.hi == *q, "h({p}) at level {n}");
        }
    }
}

fn check_slope_consistency(pair: &ConjugacyPair, x: &Rational) {
    let seq = slope_sequence(pair, x, 8).unwrap();
    for entry in &seq.entries {
        let h_n = ulam_map(pair, entry.n).unwrap();
        let (left, right) = h_n.slopes_at(x).unwrap();
        assert!(entry.left.is_positive_slope() && entry.right.is_positive_slope());
        if x.is_zero() {
            assert_eq!(entry.right, right);
        } else if x.is_one() {
            assert_eq!(entry.left, left);
        } else {
            assert_eq!((&entry.left, &entry.right), (&left, &right), "level {} at {x}", entry.n);
        }
        if !is_lattice_point(pair.g1(), x, entry.n) {
            assert_eq!(entry.left, entry.right);
            // the slope across the enclosing interval, from exact images of
            // its endpoints
            let lattice = Lattice::level(pair.g1(), entry.n).unwrap();
            let interval = lattice.interval(lattice.locate(x).unwrap()).unwrap();
            let rise = exact_h(pair, &interval.hi) - exact_h(pair, &interval.lo);
            assert_eq!(entry.right, rise / interval.length);
        }
    }
}

trait PositiveSlope {
    fn is_positive_slope(&self) -> bool;
}

impl PositiveSlope for Rational {
    fn is_positive_slope(&self) -> bool {
        *self > Rational::zero()
    }
}

fn check_slope_sandwich(pair: &ConjugacyPair, x: &Rational, depth: usize) {
    let seq = slope_sequence(pair, x, depth).unwrap();
    let (s1, s2) = (pair.stats1(), pair.stats2());
    let shrink = &s2.delta_minus / &s1.delta_plus;
    let grow = &s2.delta_plus / &s1.delta_minus;
    let slope = |m: usize| &seq.entries[m - 1].right;
    for n in 1..depth {
        for i in 1..=depth - n {
            if is_lattice_point(pair.g1(), x, (n + i) as u32) {
                continue;
            }
            let e = i as u32;
            let (lo, hi) = (pow(&shrink, e) * slope(n + 1), pow(&grow, e) * slope(n + 1));
            assert!(lo <= *slope(n + i) && *slope(n + i) <= hi, "slope sandwich n={n} i={i} at {x}");
        }
    }
}

fn point_with_bits(map: &PLUnimodalMap, bits: &[u8]) -> Rational {
    let mut cell = Cell::root(map);
    for bit in bits {
        cell = cell.child(*bit).unwrap();
    }
    (cell.lo() + cell.hi()) / int(2)
}

fn check_zero_run_slopes(pair: &ConjugacyPair, prefix: &[u8], t: usize) {
    let n0 = pair.n0() as usize;
    let n = prefix.len();
    assert!(n > n0);
    let bits = [prefix, &[1], &vec![0; t], &[1, 0]].concat();
    let x = point_with_bits(pair.g1(), &bits);
    assert_eq!(expansion(pair.g1(), x.clone(), bits.len()).unwrap().bits, bits);
    let seq = slope_sequence(pair, &x, bits.len()).unwrap();
    let slope = |m: usize| &seq.entries[m - 1].right;
    let ratio = &pair.stats2().delta_0 / &pair.stats1().delta_0;
    if t + 1 >= n0 {
        for i in n0..=t + 1 - n0 {
            // lengths at level n+i+1 scale by delta_0 through the run, so
            // the slopes do too from level n+n0+1 on
            assert_eq!(*slope(n + i + 1), slope(n + n0 + 1) * pow(&ratio, (i - n0) as u32), "zero run i={i} t={t}");
        }
    }
}

/// Difference quotients against `x` from lattice points in the left half of
/// its left flank.
fn check_flank_quotients(pair: &ConjugacyPair, n: usize) {
    let level = n as u32 + 1;
    let lattice = Lattice::level(pair.g1(), level).unwrap();
    let fine = Lattice::level(pair.g1(), level + 4).unwrap();
    let dm1 = &pair.stats1().delta_minus;
    let dm2 = &pair.stats2().delta_minus;
    for x in lattice.points().iter().skip(1) {
        let seq = slope_sequence(pair, x, n + 1).unwrap();
        let slope = &seq.entries[n].left;
        let (flank_lo, flank_hi) = left_flank(pair.g1(), x, n).unwrap();
        assert_eq!(&flank_hi, x);
        // the flank's split point is the one finer-level point inside it
        let finer = Lattice::level(pair.g1(), level + 1).unwrap();
        let inside: Vec<_> = finer.points().iter().filter(|p| flank_lo < **p && **p < *x).collect();
        assert_eq!(inside.len(), 1);
        let mid = inside[0].clone();
        let h_x = exact_h(pair, x);
        for s in fine.points().iter().filter(|s| flank_lo <= **s && **s < mid) {
            let q = (&h_x - exact_h(pair, s)) / (x - s);
            assert!(dm2 * slope <= q, "lower flank quotient at x={x}, s={s}, n={n}");
            assert!(q <= slope / dm1, "upper flank quotient at x={x}, s={s}, n={n}");
        }
    }
}

fn check_pinned_identities(pair: &ConjugacyPair, n: u32, depth: u32) {
    let n0 = pair.n0();
    let lattice = Lattice::level(pair.g1(), depth).unwrap();
    let h_n = ulam_map(pair, n).unwrap();
    let tol = inv_pow2(4000);
    for t in lattice.points() {
        if is_lattice_point(pair.g1(), t, n) {
            continue;
        }
        let here = pinned_ratios(pair, n, t, &tol).unwrap();
        let (dl, dr) = here.exact().expect("lattice points give exact ratios");
        let on_graph = exact_h(pair, t) == h_n.eval(t).unwrap();
        assert_eq!(dl.is_one(), dr.is_one(), "one-sided ratios at {t}");
        assert_eq!(dl.is_one(), on_graph, "graph membership at {t}");

        if n >= n0 {
            let j = n - n0 + 1;
            let image = pair.g1().iterate(t, j).unwrap();
            let there = pinned_ratios(pair, n0 - 1, &image, &tol).unwrap();
            let (il, ir) = there.exact().unwrap();
            let a: BTreeSet<_> = [dl, dr].into_iter().collect();
            let b: BTreeSet<_> = [il, ir].into_iter().collect();
            assert_eq!(a, b, "pinned ratios carried by g1^{j} at {t}, n={n}");
        }
    }
}

fn check_monotone(pair: &ConjugacyPair, x: &Rational, y: &Rational) {
    let tol = inv_pow2(24);
    let (ex, ey) = (conj_eval(pair, x, &tol).unwrap(), conj_eval(pair, y, &tol).unwrap());
    if x < y {
        assert!(ex.lo <= ey.hi);
        if ex.hi < ey.lo || ey.hi < ex.lo {
            assert!(ex.hi <= ey.lo);
        }
    }
    assert!(Rational::zero() <= ex.lo && ex.lo <= ex.hi && ex.hi <= Rational::one());
}

#[test]
fn named_pairs_map_lattices_onto_lattices() {
    for pair in named_pairs() {
        check_lattice_correspondence(&pair, 8);
    }
}

#[test]
fn named_pairs_slopes() {
    let xs = [int(0), int(1), rat(1, 2), rat(2, 3), rat(3, 7), rat(5, 16), rat(9, 10)];
    for pair in named_pairs() {
        for x in &xs {
            check_slope_consistency(&pair, x);
            check_slope_sandwich(&pair, x, 14);
        }
        let n0 = pair.n0() as usize;
        for t in 0..=2 * n0 + 3 {
            check_zero_run_slopes(&pair, &vec![1; n0 + 1], t);
            check_zero_run_slopes(&pair, &[vec![0; n0], vec![1, 1]].concat(), t);
        }
        for n in n0 + 1..=n0 + 3 {
            check_flank_quotients(&pair, n);
        }
        for n in 1..=5 {
            check_pinned_identities(&pair, n, 8);
        }
    }
}

#[test]
fn zero_run_slopes_start_one_level_after_the_run_begins() {
    // tent -> f_{1/5}, bits 1 1 1 | 1 | 0 0 0 0 | 1 0: the level-6 slope is not
    // the level-5 slope times delta_0(g2)/delta_0(g1)
    let pair = &named_pairs()[0];
    let x = point_with_bits(pair.g1(), &[1, 1, 1, 1, 0, 0, 0, 0, 1, 0]);
    let seq = slope_sequence(pair, &x, 7).unwrap();
    let slope = |m: usize| seq.entries[m - 1].right.clone();
    assert_eq!(slope(6), rat(512, 3125));
    assert_eq!(slope(5) * rat(2, 5), rat(128, 3125));
    assert_eq!(slope(7), slope(6) * rat(2, 5));
}

#[test]
fn flank_tracking_matches_left_slopes() {
    let pair = &named_pairs()[1];
    let x = rat(1, 2);
    let mut walk = Lockstep::new(pair, x.clone()).unwrap();
    for depth in 1..10 {
        walk.advance().unwrap();
        let (f1, f2) = walk.flanks().unwrap();
        assert_eq!((f1.lo().clone(), f1.hi().clone()), left_flank(pair.g1(), &x, depth).unwrap());
        assert_eq!((f2.lo().clone(), f2.hi().clone()), left_flank(pair.g2(), &exact_h(pair, &x), depth).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn lattices_map_onto_lattices(pair in pair()) {
        check_lattice_correspondence(&pair, 6);
    }

    #[test]
    fn slopes_agree_with_ulam_maps(pair in pair(), x in unit_rational()) {
        check_slope_consistency(&pair, &x);
    }

    #[test]
    fn slopes_stay_in_sandwich(pair in pair(), x in unit_rational()) {
        check_slope_sandwich(&pair, &x, 14);
    }

    #[test]
    fn zero_run_slopes(pair in pair(), seed in prop::collection::vec(0u8..=1, 6), t in 0usize..10) {
        let n0 = pair.n0() as usize;
        let prefix: Vec<u8> = seed.iter().cycle().take(n0 + 1).cloned().collect();
        check_zero_run_slopes(&pair, &prefix, t);
    }

    #[test]
    fn flank_quotients(pair in pair()) {
        check_flank_quotients(&pair, pair.n0() as usize + 1);
    }

    #[test]
    fn pinned_identities(pair in pair(), n in 1u32..5) {
        check_pinned_identities(&pair, n, n + 3);
    }

    #[test]
    fn enclosures_are_monotone(pair in pair(), x in unit_rational(), y in unit_rational()) {
        check_monotone(&pair, &x, &y);
        check_monotone(&pair, &y, &x);
    }

    #[test]
    fn functional_equation_holds(pair in pair(), x in unit_rational()) {
        prop_assert!(residual_check(&pair, &x, &inv_pow2(40)).unwrap().holds);
    }
}
