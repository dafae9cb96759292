//! Property suite behind `conjlab verify`: every structural identity of the
//! lattices, paths and conjugacy approximations, checked in exact arithmetic
//! on a given map (or pair) at a configurable depth.

use std::collections::BTreeSet;

use conjlab_core::conjugacy::{conj_eval, pinned_ratios, residual_check, slope_sequence, ulam_map};
use conjlab_core::lattice::{bits_to_index_u64, delta_stats, rot, rot_n, rot_pow};
use conjlab_core::path::{expansion, left_flank};
use conjlab_core::rational::{int, inv_pow2, pow};
use conjlab_core::{ConjugacyPair, Lattice, PLUnimodalMap, PathState, Rational};
use num_traits::{One, Zero};
use rand::Rng;

use crate::random::{random_unit_rational, seeded_rng};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn core<T>(r: conjlab_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub subject: String,
    pub property: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn record(out: &mut Vec<Outcome>, subject: &str, property: &'static str, result: Check) {
    let (passed, detail) = match result {
        Ok(()) => (true, String::new()),
        Err(detail) => (false, detail),
    };
    out.push(Outcome { subject: subject.to_owned(), property, passed, detail });
}

fn levels(map: &PLUnimodalMap, top: u32) -> Result<Vec<Lattice<'_>>, String> {
    let mut all = vec![Lattice::base(map)];
    while all.len() < top as usize {
        let next = core(all.last().unwrap().refine())?;
        all.push(next);
    }
    Ok(all)
}

fn sample_points(seed: u64, count: usize) -> Vec<Rational> {
    let mut rng = seeded_rng(seed);
    let mut xs = vec![int(0), int(1)];
    xs.extend((0..count).map(|_| random_unit_rational(&mut rng, 1000)));
    xs
}

// ── single map ──────────────────────────────────────────────────────────

pub fn lattice_cardinality(map: &PLUnimodalMap, depth: u32) -> Check {
    for (idx, lattice) in levels(map, depth)?.iter().enumerate() {
        let expected = (1usize << idx) + 1;
        ensure!(lattice.len() == expected, "level {} has {} points, expected {expected}", idx + 1, lattice.len());
    }
    Ok(())
}

/// Sorted, bounded by 0 and 1, zeros of `g^n`, and nested.
pub fn lattice_structure(map: &PLUnimodalMap, depth: u32) -> Check {
    let all = levels(map, depth)?;
    for (idx, lattice) in all.iter().enumerate() {
        let n = idx as u32 + 1;
        let pts = lattice.points();
        ensure!(pts[0].is_zero() && pts[pts.len() - 1].is_one(), "level {n} endpoints");
        ensure!(pts.windows(2).all(|w| w[0] < w[1]), "level {n} not strictly increasing");
        for p in pts {
            ensure!(core(map.iterate(p, n))?.is_zero(), "g^{n}({p}) != 0");
        }
        if idx > 0 {
            let coarse = all[idx - 1].points();
            ensure!(coarse.iter().enumerate().all(|(k, p)| pts[2 * k] == *p), "level {} not nested in level {n}", n - 1);
        }
    }
    Ok(())
}

/// `g(mu_{n,k}) = mu_{n-1,k} = g(mu_{n,2^(n-1)-k})` for `k <= 2^(n-2)`.
pub fn lattice_images(map: &PLUnimodalMap, depth: u32) -> Check {
    let all = levels(map, depth)?;
    for n in 2..=depth as usize {
        let (here, below) = (all[n - 1].points(), all[n - 2].points());
        let top = 1usize << (n - 1);
        for k in 0..=top / 2 {
            let image = core(map.eval(&here[k]))?;
            ensure!(image == below[k], "g(mu_({n},{k})) = {image}, expected {}", below[k]);
            ensure!(image == core(map.eval(&here[top - k]))?, "reflected image differs at ({n},{k})");
        }
    }
    Ok(())
}

/// `g^i(I_{n+1,k}) = I_{n+1-i, Rot_{n-i}^{x_i}(k_{i+1,n})}`.
pub fn interval_image_indexing(map: &PLUnimodalMap, depth: u32) -> Check {
    let all = levels(map, depth)?;
    for n in 1..depth as usize {
        let fine = &all[n];
        for k in 0..fine.interval_count() {
            let bits: Vec<u8> = (0..n).rev().map(|s| ((k >> s) & 1) as u8).collect();
            let interval = core(fine.interval(k))?;
            let (mut lo, mut hi) = (interval.lo, interval.hi);
            for i in 1..=n {
                (lo, hi) = core(map.interval_image(&lo, &hi))?;
                let tail = if i < n { core(bits_to_index_u64(&bits, i + 1, n))? } else { 0 };
                let index = if bits[i - 1] == 1 { core(rot_n((n - i) as u32, tail))? } else { tail };
                let target = core(all[n - i].interval(index as usize))?;
                ensure!(lo == target.lo && hi == target.hi, "g^{i}(I_({},{k})) is not I_({},{index})", n + 1, n + 1 - i);
            }
        }
    }
    Ok(())
}

/// Child length = parent length times the parent's ratio, reflected for
/// right children.
pub fn length_recursion(map: &PLUnimodalMap, depth: u32) -> Check {
    let all = levels(map, depth)?;
    for n in 1..depth as usize - 1 {
        let ratios = core(all[n - 1].delta_table())?;
        for k in 0..all[n].interval_count() {
            let parent = core(all[n - 1].interval(k >> 1))?;
            let expected = parent.length * rot_pow(&ratios[k >> 1], (k & 1) as u64);
            ensure!(core(all[n].interval(k))?.length == expected, "length of I_({},{k})", n + 1);
        }
    }
    Ok(())
}

/// Base statistics are consistent, the first `2^(n0-2)` ratios repeat at
/// every finer level, and each ratio is its image's ratio, reflected where
/// the map reverses orientation.
pub fn ratio_structure(map: &PLUnimodalMap, depth: u32) -> Check {
    let stats = core(delta_stats(map))?;
    let n0 = stats.n0;
    let classes = stats.by_index.len();
    ensure!(classes == 1 << (n0 - 2), "{classes} base ratios for n0 = {n0}");
    let one = Rational::one();
    ensure!(
        Rational::zero() < stats.delta_minus && stats.delta_minus <= stats.delta_plus && stats.delta_plus < one,
        "delta_- = {}, delta_+ = {}",
        stats.delta_minus,
        stats.delta_plus
    );
    let mut extremes = BTreeSet::new();
    for d in &stats.by_index {
        extremes.insert(d.clone());
        extremes.insert(rot(d));
    }
    ensure!(extremes.first() == Some(&stats.delta_minus), "delta_- is not the smallest base ratio");
    ensure!(extremes.last() == Some(&stats.delta_plus), "delta_+ is not the largest base ratio");
    ensure!(stats.delta_0 == stats.by_index[0], "delta_0 is not the first base ratio");

    let all = levels(map, depth + 1)?;
    for n in (n0 - 1).max(1)..=depth {
        let table = core(all[n as usize - 1].delta_table())?;
        ensure!(table.iter().all(|d| Rational::zero() < *d && *d < one), "ratio outside (0,1) at level {n}");
        for (k, d) in table.iter().enumerate().take(classes) {
            ensure!(*d == stats.by_index[k], "delta({n},{k}) = {d}, base ratio {}", stats.by_index[k]);
        }
        if n >= n0 && n >= 2 {
            let coarse = &all[n as usize - 2];
            let coarse_table = core(coarse.delta_table())?;
            for (k, d) in table.iter().enumerate() {
                let interval = core(all[n as usize - 1].interval(k))?;
                let (a, _) = core(map.interval_image(&interval.lo, &interval.hi))?;
                let image = core(coarse.locate(&a))?;
                let reversed = (k >= table.len() / 2) as u64;
                ensure!(*d == rot_pow(&coarse_table[image], reversed), "delta({n},{k}) disagrees with its image");
            }
        }
    }
    Ok(())
}

/// Lengths inside a base interval lie between `delta_-^j` and `delta_+^j`
/// times the base length, `j = n - n0 + 1`; in particular the mesh of level
/// `n` is at most `delta_+^j`.
pub fn length_bounds(map: &PLUnimodalMap, depth: u32) -> Check {
    let stats = core(delta_stats(map))?;
    let n0 = stats.n0;
    let all = levels(map, depth)?;
    for n in n0..=depth {
        let steps = n - n0 + 1;
        let (lower, upper) = (pow(&stats.delta_minus, steps), pow(&stats.delta_plus, steps));
        let mut mesh = Rational::zero();
        for interval in all[n as usize - 1].intervals() {
            let base = core(all[n0 as usize - 2].interval(interval.k >> steps))?;
            ensure!(base.lo <= interval.lo && interval.hi <= base.hi, "I_({n},{}) escapes its base interval", interval.k);
            ensure!(&base.length * &lower <= interval.length, "I_({n},{}) too short", interval.k);
            ensure!(interval.length <= &base.length * &upper, "I_({n},{}) too long", interval.k);
            mesh = mesh.max(interval.length);
        }
        ensure!(mesh <= upper, "mesh {mesh} at level {n} exceeds {upper}");
    }
    Ok(())
}

/// Path cells, indices and forward images agree with full lattices.
pub fn path_matches_lattices(map: &PLUnimodalMap, depth: u32, xs: &[Rational]) -> Check {
    let all = levels(map, depth + 1)?;
    for x in xs {
        let mut path = core(PathState::new(map, x.clone()))?;
        for d in 0..=depth as usize {
            if d > 0 {
                let previous = path.k().clone();
                let bit = core(path.advance())?;
                ensure!(*path.k() == (previous << 1usize) + u32::from(bit), "k recursion fails for {x} at depth {d}");
            }
            let lattice = &all[d];
            let k = core(lattice.locate(x))?;
            let interval = core(lattice.interval(k))?;
            ensure!(*path.k() == k.into(), "index of {x} at depth {d}: path {} vs lattice {k}", path.k());
            ensure!(path.lo() == &interval.lo && path.hi() == &interval.hi, "cell of {x} at depth {d}");
            let images = path.forward_images();
            ensure!(images[d] == (int(0), int(1)), "g^{d} does not map the cell of {x} onto [0,1]");
        }
    }
    Ok(())
}

/// An expansion is flagged finite exactly when `x` reaches 0.
pub fn finiteness(map: &PLUnimodalMap, depth: u32, xs: &[Rational]) -> Check {
    let all = levels(map, depth)?;
    let mut points: Vec<Rational> = xs.to_vec();
    points.extend(all.last().unwrap().points().iter().step_by(3).cloned());
    for x in &points {
        let bits = core(expansion(map, x.clone(), depth as usize))?;
        let hits = core(map.zero_hitting_time(x, depth + 1))?.is_some();
        ensure!(bits.finite == hits, "finiteness of {x}: flagged {}, iteration {hits}", bits.finite);
    }
    Ok(())
}

pub fn left_flanks(map: &PLUnimodalMap, depth: u32) -> Check {
    let top = depth.min(7);
    let all = levels(map, top)?;
    for (m, coarse) in all.iter().enumerate() {
        for x in coarse.points().iter().skip(1) {
            for (n, level) in all.iter().enumerate().skip(m) {
                let pts = level.points();
                let j = pts.iter().position(|p| p == x).expect("nested lattices");
                let flank = core(left_flank(map, x, n))?;
                ensure!(flank == (pts[j - 1].clone(), x.clone()), "left flank of {x} at level {}", n + 1);
            }
        }
    }
    Ok(())
}

pub fn verify_map(name: &str, map: &PLUnimodalMap, depth: u32, seed: u64) -> Vec<Outcome> {
    let xs = sample_points(seed, 12);
    let mut out = Vec::new();
    record(&mut out, name, "lattice_cardinality", lattice_cardinality(map, depth));
    record(&mut out, name, "lattice_structure", lattice_structure(map, depth));
    record(&mut out, name, "lattice_images", lattice_images(map, depth));
    record(&mut out, name, "interval_image_indexing", interval_image_indexing(map, depth));
    record(&mut out, name, "length_recursion", length_recursion(map, depth));
    record(&mut out, name, "ratio_structure", ratio_structure(map, depth));
    record(&mut out, name, "length_bounds", length_bounds(map, depth));
    record(&mut out, name, "path_matches_lattices", path_matches_lattices(map, depth, &xs));
    record(&mut out, name, "finiteness", finiteness(map, depth, &xs));
    record(&mut out, name, "left_flanks", left_flanks(map, depth));
    out
}

// ── pairs ───────────────────────────────────────────────────────────────

/// Exact `h(x)` for a `g1` lattice point.
fn exact_image(pair: &ConjugacyPair, x: &Rational) -> Result<Rational, String> {
    let e = core(conj_eval(pair, x, &inv_pow2(4096)))?;
    ensure!(e.exact, "{x} is not a lattice point of g1");
    Ok(e.lo)
}

/// `h` sends each `g1` lattice point to the `g2` point with the same index.
pub fn lattice_correspondence(pair: &ConjugacyPair, depth: u32) -> Check {
    for n in 1..=depth {
        let l1 = core(Lattice::level(pair.g1(), n))?;
        let l2 = core(Lattice::level(pair.g2(), n))?;
        for (k, (p, q)) in l1.points().iter().zip(l2.points()).enumerate() {
            let e = core(conj_eval(pair, p, &inv_pow2(64)))?;
            ensure!(e.exact && e.lo == *q && e.hi == *q, "h(mu_({n},{k})) = [{}, {}], expected {q}", e.lo, e.hi);
        }
    }
    Ok(())
}

/// Path-based slopes equal the slopes of the full Ulam maps.
pub fn slope_consistency(pair: &ConjugacyPair, depth: u32, xs: &[Rational]) -> Check {
    let maps: Vec<_> = (1..=depth).map(|n| core(ulam_map(pair, n))).collect::<Result<_, _>>()?;
    for x in xs {
        let seq = core(slope_sequence(pair, x, depth as usize))?;
        for (entry, h_n) in seq.entries.iter().zip(&maps) {
            let (left, right) = core(h_n.slopes_at(x))?;
            ensure!(entry.left > Rational::zero() && entry.right > Rational::zero(), "non-positive slope at {x}");
            let ok = if x.is_zero() {
                entry.right == right
            } else if x.is_one() {
                entry.left == left
            } else {
                entry.left == left && entry.right == right
            };
            ensure!(ok, "slopes of h_{} at {x}: path ({}, {}), Ulam map ({left}, {right})", entry.n, entry.left, entry.right);
            if core(pair.g1().zero_hitting_time(x, entry.n))?.is_none() {
                ensure!(entry.left == entry.right, "one-sided slopes differ off the lattice at {x}");
            }
        }
    }
    Ok(())
}

/// Slopes `i` levels deeper stay within `(delta_-(g2)/delta_+(g1))^i` and
/// `(delta_+(g2)/delta_-(g1))^i` times the level-`n+1` slope.
pub fn slope_sandwich(pair: &ConjugacyPair, depth: u32, xs: &[Rational]) -> Check {
    let (s1, s2) = (pair.stats1(), pair.stats2());
    let shrink = &s2.delta_minus / &s1.delta_plus;
    let grow = &s2.delta_plus / &s1.delta_minus;
    let depth = depth as usize;
    for x in xs {
        let seq = core(slope_sequence(pair, x, depth))?;
        let slope = |m: usize| &seq.entries[m - 1].right;
        for n in 1..depth {
            for i in 1..=depth - n {
                if core(pair.g1().zero_hitting_time(x, (n + i) as u32))?.is_some() {
                    continue;
                }
                let e = i as u32;
                let (lo, hi) = (pow(&shrink, e) * slope(n + 1), pow(&grow, e) * slope(n + 1));
                ensure!(lo <= *slope(n + i) && *slope(n + i) <= hi, "slope sandwich fails at {x}, n={n}, i={i}");
            }
        }
    }
    Ok(())
}

pub fn residuals(pair: &ConjugacyPair, xs: &[Rational], tol: &Rational) -> Check {
    for x in xs {
        let report = core(residual_check(pair, x, tol))?;
        ensure!(report.holds, "h(g1(x)) misses g2(h(x)) at {x}");
    }
    Ok(())
}

pub fn monotone_enclosures(pair: &ConjugacyPair, xs: &[Rational]) -> Check {
    let tol = inv_pow2(24);
    let mut sorted = xs.to_vec();
    sorted.sort();
    sorted.dedup();
    let encs: Vec<_> = sorted.iter().map(|x| core(conj_eval(pair, x, &tol))).collect::<Result<_, _>>()?;
    for (i, e) in encs.iter().enumerate() {
        ensure!(Rational::zero() <= e.lo && e.lo <= e.hi && e.hi <= Rational::one(), "enclosure of {} out of order", sorted[i]);
    }
    for w in encs.windows(2) {
        ensure!(w[0].lo <= w[1].hi, "enclosures reverse the order of {} and {}", w[0].lo, w[1].lo);
    }
    Ok(())
}

/// At lattice points `t` interior to level-`n` intervals: `Delta_L = 1` iff
/// `Delta_R = 1` iff `(t, h(t))` is on the graph of `h_n`; and the pair of
/// ratios is unchanged by applying `g1^(n-n0+1)`.
pub fn pinned_ratio_identities(pair: &ConjugacyPair, depth: u32) -> Check {
    let n0 = pair.n0();
    let tol = inv_pow2(4096);
    for n in 1..depth.saturating_sub(2).max(2) {
        let h_n = core(ulam_map(pair, n))?;
        let lattice = core(Lattice::level(pair.g1(), n + 3))?;
        for t in lattice.points() {
            if core(pair.g1().zero_hitting_time(t, n))?.is_some() {
                continue;
            }
            let here = core(pinned_ratios(pair, n, t, &tol))?;
            let (dl, dr) = here.exact().ok_or_else(|| format!("inexact ratios at lattice point {t}"))?;
            let on_graph = exact_image(pair, t)? == core(h_n.eval(t))?;
            ensure!(dl.is_one() == dr.is_one() && dl.is_one() == on_graph, "ratio/graph equivalence fails at {t}, n={n}");
            if n >= n0 {
                let j = n - n0 + 1;
                let image = core(pair.g1().iterate(t, j))?;
                let (il, ir) = core(pinned_ratios(pair, n0 - 1, &image, &tol))?
                    .exact()
                    .ok_or_else(|| format!("inexact ratios at {image}"))?;
                let a: BTreeSet<_> = [dl, dr].into_iter().collect();
                let b: BTreeSet<_> = [il, ir].into_iter().collect();
                ensure!(a == b, "ratios at {t} (level {n}) differ from those at g1^{j}(t) = {image}");
            }
        }
    }
    Ok(())
}

/// For a lattice point `x` of level `n+1` (`n > n0`) and lattice points `s`
/// in the left half of its left flank, the difference quotient lies between
/// `delta_-(g2)` times and `1/delta_-(g1)` times the left slope of `h_{n+1}`.
pub fn flank_quotients(pair: &ConjugacyPair, depth: u32) -> Check {
    let n0 = pair.n0() as usize;
    let (dm1, dm2) = (&pair.stats1().delta_minus, &pair.stats2().delta_minus);
    for n in n0 + 1..=(depth as usize).max(n0 + 1).min(n0 + 3) {
        let level = n as u32 + 1;
        let lattice = core(Lattice::level(pair.g1(), level))?;
        let finer = core(Lattice::level(pair.g1(), level + 1))?;
        let fine = core(Lattice::level(pair.g1(), level + 3))?;
        for x in lattice.points().iter().skip(1) {
            let seq = core(slope_sequence(pair, x, n + 1))?;
            let slope = &seq.entries[n].left;
            let (flank_lo, _) = core(left_flank(pair.g1(), x, n))?;
            let mid = finer.points().iter().find(|p| flank_lo < **p && *p < x).ok_or("flank without split point")?;
            let h_x = exact_image(pair, x)?;
            for s in fine.points().iter().filter(|s| flank_lo <= **s && *s < mid) {
                let q = (&h_x - exact_image(pair, s)?) / (x - s);
                ensure!(dm2 * slope <= q && q <= slope / dm1, "flank quotient at x={x}, s={s}, n={n}");
            }
        }
    }
    Ok(())
}

pub fn verify_pair(name: &str, pair: &ConjugacyPair, depth: u32, seed: u64) -> Vec<Outcome> {
    let xs = sample_points(seed, 12);
    let mut rng = seeded_rng(seed ^ 0x5eed);
    let residual_xs: Vec<Rational> = (0..20)
        .map(|_| {
            let den = rng.gen_range(2..=1000);
            random_unit_rational(&mut rng, den)
        })
        .collect();
    let mut out = Vec::new();
    record(&mut out, name, "lattice_correspondence", lattice_correspondence(pair, depth));
    record(&mut out, name, "slope_consistency", slope_consistency(pair, depth, &xs));
    record(&mut out, name, "slope_sandwich", slope_sandwich(pair, depth + 6, &xs));
    record(&mut out, name, "residuals", residuals(pair, &residual_xs, &inv_pow2(40)));
    record(&mut out, name, "monotone_enclosures", monotone_enclosures(pair, &residual_xs));
    record(&mut out, name, "pinned_ratio_identities", pinned_ratio_identities(pair, depth));
    record(&mut out, name, "flank_quotients", flank_quotients(pair, depth));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::thm5_map;
    use conjlab_core::rational::rat;

    #[test]
    fn named_maps_pass() {
        for map in [PLUnimodalMap::tent(), thm5_map()] {
            let outcomes = verify_map("m", &map, 7, 3);
            assert!(outcomes.iter().all(|o| o.passed), "{outcomes:?}");
        }
    }

    #[test]
    fn named_pair_passes() {
        let pair = ConjugacyPair::new(PLUnimodalMap::tent(), PLUnimodalMap::skew_tent(rat(1, 5)).unwrap()).unwrap();
        let outcomes = verify_pair("p", &pair, 6, 3);
        assert!(outcomes.iter().all(|o| o.passed), "{outcomes:?}");
    }

    #[test]
    fn broken_expectation_is_reported() {
        let outcome = residuals(
            &ConjugacyPair::new(PLUnimodalMap::tent(), thm5_map()).unwrap(),
            &[rat(1, 3)],
            &Rational::zero(),
        );
        assert!(outcome.is_err());
    }
}
