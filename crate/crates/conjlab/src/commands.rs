//! One function per subcommand, each producing a [`Report`] and an exit
//! status. Nothing here touches stdout or the filesystem except map loading.

use conjlab_core::conjugacy::{
    classify_limits, difference_quotients, enclosure_trace, pl_detector, slope_sequence, LimitClass,
    LimitParams, LimitTag, PlVerdict,
};
use conjlab_core::path::{left_flank, right_flank};
use conjlab_core::rational::{format_ratio, inv_pow2};
use conjlab_core::{ConjugacyPair, DepthCaps, Error, Lattice, PLUnimodalMap, PathState, Rational};
use num_traits::{One, Zero};

use crate::error::{CliError, ExitStatus};
use crate::maps::{map_to_json, positive_fixed_point, thm5_map};
use crate::report::{Field, Report, Table};
use crate::verify::{verify_map, verify_pair, Outcome};

pub type CommandResult = Result<(Report, ExitStatus), CliError>;

/// Depth caps in force for this run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub caps: DepthCaps,
}

impl Limits {
    /// `CONJLAB_DEPTH_CAP` replaces the full-lattice depth cap.
    pub fn from_env_value(value: Option<&str>) -> Result<Self, CliError> {
        let mut caps = DepthCaps::default();
        if let Some(text) = value {
            caps.lattice = text
                .trim()
                .parse::<u32>()
                .ok()
                .filter(|cap| (1..=30).contains(cap))
                .ok_or_else(|| CliError::Flag { flag: "CONJLAB_DEPTH_CAP", reason: format!("{text:?} is not an integer in 1..=30") })?;
        }
        Ok(Limits { caps })
    }

    fn check_lattice_depth(&self, depth: u32) -> Result<(), CliError> {
        if depth > self.caps.lattice {
            return Err(Error::DepthCapExceeded { requested: depth.into(), cap: self.caps.lattice.into() }.into());
        }
        Ok(())
    }

    fn check_path_depth(&self, depth: usize) -> Result<(), CliError> {
        if depth > self.caps.path {
            return Err(Error::DepthCapExceeded { requested: depth as u64, cap: self.caps.path as u64 }.into());
        }
        Ok(())
    }

    pub fn pair(&self, g1: PLUnimodalMap, g2: PLUnimodalMap) -> Result<ConjugacyPair, CliError> {
        Ok(ConjugacyPair::new(g1, g2)?.with_caps(self.caps))
    }
}

pub fn lattice(map: &PLUnimodalMap, n: u32, limits: &Limits) -> CommandResult {
    if n == 0 {
        return Err(CliError::Flag { flag: "--depth", reason: "levels start at 1".into() });
    }
    let lattice = Lattice::level_with_cap(map, n, limits.caps.lattice)?;
    let mut table = Table::new("lattice", &["n", "k", "mu"]);
    for (k, mu) in lattice.points().iter().enumerate() {
        table.push(vec![n.into(), k.into(), mu.into()]);
    }
    let mut report = Report::new("lattice");
    report.table(table);
    Ok((report, ExitStatus::Success))
}

pub fn carcass(map: &PLUnimodalMap, n_max: u32, limits: &Limits) -> CommandResult {
    limits.check_lattice_depth(n_max)?;
    let info = map.carcass_info(n_max)?;
    let mut report = Report::new("carcass");
    report.note("map", map_to_json(map)).note("n0", info.n0);
    let mut table = Table::new("kinks", &["kink"]);
    for kink in &info.kinks {
        table.push(vec![kink.into()]);
    }
    report.table(table);
    Ok((report, ExitStatus::Success))
}

pub fn expand(map: &PLUnimodalMap, x: &Rational, depth: usize, limits: &Limits) -> CommandResult {
    limits.check_path_depth(depth)?;
    let mut path = PathState::new(map, x.clone())?;
    let mut finite = path.at_lattice_point();
    let mut table = Table::new("path", &["n", "bit", "k", "a", "b", "len"]);
    while path.depth() < depth {
        let bit = path.advance()?;
        finite |= path.at_lattice_point();
        table.push(vec![
            path.depth().into(),
            bit.into(),
            Field::Text(path.k().to_string()),
            path.lo().into(),
            path.hi().into(),
            path.length().into(),
        ]);
    }
    let bits: String = path.bits().iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
    let mut report = Report::new("expand");
    report.note("x", x).note("bits", bits).note("finite", finite);
    report.table(table);
    Ok((report, ExitStatus::Success))
}

pub fn limit_label(class: &LimitClass) -> String {
    match &class.tag {
        LimitTag::ConvergesTo(c) => format!("ConvergesTo({})", format_ratio(c)),
        LimitTag::Zero => "Zero".into(),
        LimitTag::Infinity => "Infinity".into(),
        LimitTag::Oscillates => "Oscillates".into(),
        LimitTag::Inconclusive => "Inconclusive".into(),
    }
}

fn note_limits(report: &mut Report, side: &str, class: &LimitClass) {
    report.note(&format!("{side}_limit"), limit_label(class));
    report.note(&format!("{side}_tail_min"), &class.evidence.min);
    report.note(&format!("{side}_tail_max"), &class.evidence.max);
    report.note(&format!("{side}_tail_last"), &class.evidence.last);
}

pub fn slopes(pair: &ConjugacyPair, x: &Rational, depth: usize, limits: &Limits) -> CommandResult {
    limits.check_path_depth(depth)?;
    let seq = slope_sequence(pair, x, depth)?;
    let mut table = Table::new("slopes", &["n", "left", "right"]);
    for e in &seq.entries {
        table.push(vec![e.n.into(), (&e.left).into(), (&e.right).into()]);
    }
    let mut report = Report::new("slopes");
    report.note("x", x);
    let params = LimitParams::default();
    match classify_limits(&seq, &params) {
        Ok((left, right)) => {
            note_limits(&mut report, "left", &left);
            note_limits(&mut report, "right", &right);
        }
        Err(Error::InsufficientDepth { have, need }) => {
            report.note("classification", format!("skipped: {have} levels, window needs {need}"));
        }
        Err(other) => return Err(other.into()),
    }
    report.table(table);
    Ok((report, ExitStatus::Success))
}

pub fn conj_eval_report(pair: &ConjugacyPair, x: &Rational, tol: &Rational) -> CommandResult {
    let trace = enclosure_trace(pair, x, tol)?;
    let last = trace.last().expect("trace starts at depth 0");
    let mut report = Report::new("conj-eval");
    report
        .note("x", x)
        .note("lo", &last.lo)
        .note("hi", &last.hi)
        .note("width", last.width())
        .note("depth", last.depth)
        .note("exact", last.exact);
    let mut table = Table::new("trace", &["depth", "lo", "hi", "width"]);
    for e in &trace {
        table.push(vec![e.depth.into(), (&e.lo).into(), (&e.hi).into(), e.width().into()]);
    }
    report.table(table);
    Ok((report, ExitStatus::Success))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Lattice points closing in on `x`: at each depth `d`, the level-`(d+1)`
/// points just outside the path cell of `x` on either side (the neighbours
/// of the cell's endpoints). Points equal to `x` or missing at the ends of
/// `[0, 1]` are skipped.
pub fn approach_samples(
    map: &PLUnimodalMap,
    x: &Rational,
    depths: std::ops::RangeInclusive<usize>,
) -> Result<Vec<(usize, Side, Rational)>, CliError> {
    let mut path = PathState::new(map, x.clone())?;
    let mut samples = Vec::new();
    for d in depths {
        while path.depth() < d {
            path.advance()?;
        }
        if !path.lo().is_zero() {
            let (s, _) = left_flank(map, path.lo(), d)?;
            if s != *x {
                samples.push((d, Side::Left, s));
            }
        }
        if !path.hi().is_one() {
            let (_, s) = right_flank(map, path.hi(), d)?;
            if s != *x {
                samples.push((d, Side::Right, s));
            }
        }
    }
    Ok(samples)
}

/// Certified lower bound on the spread of quotients: the largest lower
/// bound minus the smallest upper bound.
pub fn certified_spread(bounds: &[(Rational, Rational)]) -> Option<Rational> {
    let max_lo = bounds.iter().map(|b| &b.0).max()?;
    let min_hi = bounds.iter().map(|b| &b.1).min()?;
    Some(max_lo - min_hi)
}

fn quotient_table(
    pair: &ConjugacyPair,
    x: &Rational,
    samples: &[(usize, Side, Rational)],
    tol: &Rational,
    report: &mut Report,
) -> Result<(), CliError> {
    let points: Vec<Rational> = samples.iter().map(|s| s.2.clone()).collect();
    let bounds = difference_quotients(pair, x, &points, tol)?;
    let mut table = Table::new("quotients", &["depth", "side", "s", "q_lo", "q_hi"]);
    for ((depth, side, _), q) in samples.iter().zip(&bounds) {
        table.push(vec![(*depth).into(), side.label().into(), (&q.s).into(), (&q.lo).into(), (&q.hi).into()]);
    }
    for side in [Side::Left, Side::Right] {
        let per_side: Vec<_> = samples
            .iter()
            .zip(&bounds)
            .filter(|(s, _)| s.1 == side)
            .map(|(_, q)| (q.lo.clone(), q.hi.clone()))
            .collect();
        if let Some(spread) = certified_spread(&per_side) {
            report.note(&format!("{}_certified_spread", side.label()), spread);
        }
    }
    report.table(table);
    Ok(())
}

pub fn quotients(
    pair: &ConjugacyPair,
    x: &Rational,
    explicit: Option<&[Rational]>,
    depth: usize,
    tol: &Rational,
    limits: &Limits,
) -> CommandResult {
    limits.check_path_depth(depth)?;
    let samples = match explicit {
        Some(points) => points.iter().map(|s| (0, if s < x { Side::Left } else { Side::Right }, s.clone())).collect(),
        None => approach_samples(pair.g1(), x, 1..=depth)?,
    };
    let mut report = Report::new("quotients");
    report.note("x", x).note("tol", tol);
    quotient_table(pair, x, &samples, tol, &mut report)?;
    Ok((report, ExitStatus::Success))
}

fn outcome_table(outcomes: &[Outcome]) -> Table {
    let mut table = Table::new("properties", &["subject", "property", "status", "detail"]);
    for o in outcomes {
        let status = if o.passed { "pass" } else { "fail" };
        table.push(vec![o.subject.clone().into(), o.property.into(), status.into(), o.detail.replace(',', ";").into()]);
    }
    table
}

pub fn verify(g1: &PLUnimodalMap, g2: Option<&PLUnimodalMap>, depth: u32, seed: u64, limits: &Limits) -> CommandResult {
    limits.check_lattice_depth(depth + 3)?;
    if depth < 3 {
        return Err(CliError::Flag { flag: "--depth", reason: "verify needs depth >= 3".into() });
    }
    let mut outcomes = verify_map("g1", g1, depth, seed);
    if let Some(g2) = g2 {
        outcomes.extend(verify_map("g2", g2, depth, seed));
        let pair = limits.pair(g1.clone(), g2.clone())?;
        outcomes.extend(verify_pair("pair", &pair, depth, seed));
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let mut report = Report::new("verify");
    report.note("depth", depth).note("seed", seed).note("checked", outcomes.len()).note("failed", failed);
    report.table(outcome_table(&outcomes));
    let status = if failed == 0 { ExitStatus::Success } else { ExitStatus::Negative };
    Ok((report, status))
}

/// Levels over which the demo reads off the slopes of `h_n` at `x*`.
pub const DEMO_SLOPE_LEVELS: usize = 20;
/// Depths of the lattice points approaching `x*` in the quotient table.
pub const DEMO_QUOTIENT_DEPTHS: std::ops::RangeInclusive<usize> = 10..=20;
/// Levels compared by the piecewise-linearity detector.
pub const DEMO_PL_LEVELS: (u32, u32) = (1, 10);

pub fn demo_tolerance() -> Rational {
    inv_pow2(40)
}

/// The tent map against the counterexample map: `h_n'(x*) = 1` at every
/// level, yet the difference quotients at `x*` keep a positive spread.
pub fn thm5_demo(limits: &Limits) -> CommandResult {
    let g = thm5_map();
    let pair = limits.pair(PLUnimodalMap::tent(), g.clone())?;
    let x_star = positive_fixed_point(&g);
    let g_x = g.eval(&x_star)?;

    let mut report = Report::new("thm5-demo");
    report
        .note("map", map_to_json(&g))
        .note("n0", pair.info2().n0)
        .note("x_star", &x_star)
        .note("g_x_star", &g_x)
        .note("fixed_point_verified", g_x == x_star);

    let seq = slope_sequence(&pair, &x_star, DEMO_SLOPE_LEVELS)?;
    let all_one = seq.entries.iter().all(|e| e.left.is_one() && e.right.is_one());
    report.note("slopes_all_one", all_one);
    let (left, right) = classify_limits(&seq, &LimitParams::default())?;
    report.note("left_limit", limit_label(&left)).note("right_limit", limit_label(&right));

    let verdict = pl_detector(&pair, DEMO_PL_LEVELS.0, DEMO_PL_LEVELS.1)?;
    let mut kinks = Table::new("new_kinks", &["level", "count"]);
    match &verdict {
        PlVerdict::StabilizedAt(n) => {
            report.note("pl_verdict", format!("StabilizedAt({n})"));
        }
        PlVerdict::NotStabilized { new_kinks } => {
            report.note("pl_verdict", "NotStabilized");
            for (level, count) in new_kinks {
                kinks.push(vec![(*level).into(), (*count).into()]);
            }
        }
    }

    let mut slope_table = Table::new("slopes", &["n", "left", "right"]);
    for e in &seq.entries {
        slope_table.push(vec![e.n.into(), (&e.left).into(), (&e.right).into()]);
    }
    report.table(slope_table);

    let samples = approach_samples(pair.g1(), &x_star, DEMO_QUOTIENT_DEPTHS)?;
    quotient_table(&pair, &x_star, &samples, &demo_tolerance(), &mut report)?;
    report.table(kinks);
    let ok = report_is_consistent(&report, all_one, g_x == x_star, &verdict);
    Ok((report, if ok { ExitStatus::Success } else { ExitStatus::Negative }))
}

fn report_is_consistent(report: &Report, all_one: bool, fixed: bool, verdict: &PlVerdict) -> bool {
    let spreads_positive = report
        .summary
        .iter()
        .filter(|(k, _)| k.ends_with("_certified_spread"))
        .all(|(_, v)| matches!(v, Field::Rat(r) if *r > Rational::zero()));
    all_one && fixed && spreads_positive && matches!(verdict, PlVerdict::NotStabilized { .. })
}
