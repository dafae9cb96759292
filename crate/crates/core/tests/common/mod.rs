#![allow(dead_code)]

use conjlab_core::rational::{int, rat};
use conjlab_core::{PLUnimodalMap, Rational};
use proptest::prelude::*;

pub fn thm5() -> PLUnimodalMap {
    PLUnimodalMap::new(vec![
        (int(0), int(0)),
        (rat(1, 5), rat(1, 2)),
        (rat(1, 2), int(1)),
        (int(1), int(0)),
    ])
    .unwrap()
}

pub fn skew(p: i64, q: i64) -> PLUnimodalMap {
    PLUnimodalMap::skew_tent(rat(p, q)).unwrap()
}

pub fn named_maps() -> Vec<(&'static str, PLUnimodalMap)> {
    vec![("tent", PLUnimodalMap::tent()), ("skew 1/5", skew(1, 5)), ("skew 1/3", skew(1, 3)), ("thm5", thm5())]
}

/// Carcass map whose level-`m` lattice has the given positive gaps.
pub fn map_from_gaps(gaps: &[i64]) -> PLUnimodalMap {
    let total: i64 = gaps.iter().sum();
    let mut acc = 0;
    let mut points = vec![int(0)];
    for g in gaps {
        acc += g;
        points.push(rat(acc, total));
    }
    PLUnimodalMap::from_level_points(&points).unwrap()
}

/// Random carcass maps with at most 8 base intervals and small denominators.
pub fn carcass_map() -> impl Strategy<Value = PLUnimodalMap> {
    (2u32..=4)
        .prop_flat_map(|m| prop::collection::vec(1i64..=6, 1usize << (m - 1)))
        .prop_map(|gaps| map_from_gaps(&gaps))
}

/// Rationals in `[0, 1]`, including both endpoints now and then.
pub fn unit_rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(int(0)),
        1 => Just(int(1)),
        12 => (1i64..2000).prop_flat_map(|q| (0..=q, Just(q))).prop_map(|(p, q)| rat(p, q)),
    ]
}
