//! Seeded generators for carcass maps and sample points.
//!
//! A random carcass map is drawn as a random level-`m` lattice (positive
//! integer gaps, normalised); the map is the unique one sending that lattice
//! onto its own even-indexed points. Same seed, same maps, on every platform.

use conjlab_core::rational::rat;
use conjlab_core::{PLUnimodalMap, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Carcass map with `n0 <= 4` and small denominators.
pub fn random_carcass_map<R: Rng>(rng: &mut R) -> PLUnimodalMap {
    let m = rng.gen_range(2..=4u32);
    let gaps: Vec<i64> = (0..1usize << (m - 1)).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = gaps.iter().sum();
    let mut acc = 0;
    let mut points = vec![rat(0, 1)];
    for gap in gaps {
        acc += gap;
        points.push(rat(acc, total));
    }
    PLUnimodalMap::from_level_points(&points).expect("normalised gaps give a level lattice")
}

pub fn seeded_maps(seed: u64, count: usize) -> Vec<PLUnimodalMap> {
    let mut rng = seeded_rng(seed);
    (0..count).map(|_| random_carcass_map(&mut rng)).collect()
}

/// A rational in `[0, 1]` with denominator at most `max_den`.
pub fn random_unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(0..=q);
    rat(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_maps() {
        assert_eq!(seeded_maps(7, 5), seeded_maps(7, 5));
        assert_ne!(seeded_maps(7, 5), seeded_maps(8, 5));
    }

    #[test]
    fn generated_maps_are_carcass() {
        for map in seeded_maps(1, 20) {
            let info = map.carcass_info(12).unwrap();
            assert!((2..=4).contains(&info.n0));
        }
    }
}
