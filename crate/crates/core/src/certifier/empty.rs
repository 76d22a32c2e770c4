//! Emptiness of `⋂_i (P_k - [t_i, t_i + e_i])` for the depth-`k` projection
//! `P_k` of a digit set.
//!
//! The search fixes a reference translate `t_r` (the first one with the
//! smallest pad) and walks the cell `M` containing `y = x + t_r + s_r` down
//! the levels. For every other translate it tracks the cells `N` of `P_j`
//! that the window `[y + δ_i - e_r, y + δ_i + e_i]` (`δ_i = t_i - t_r`) can
//! meet, stored as offsets `N - M` relative to a per-level lower bound.
//! States that agree on every offset and automaton state evolve identically,
//! so the frontier keeps one representative per signature.
//!
//! A positive pad `e` stands for the half-open range `[t, t + e)` covering
//! every tail shorter than `e`; a zero pad is the exact translate. Since all
//! endpoints at depth `k` lie on the grid `Z / L` for `L` the common
//! denominator of the cells, translates and pads, the half-open problem is
//! empty exactly when the closed one with each positive pad shortened by
//! `1 / 2L` is, and both the search and the refinement work on the latter.
//!
//! With `e_r = 0` the search decides the projected intersection exactly;
//! otherwise it decides a superset of it, which keeps emptiness sound.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{descriptor, Certificate, CheckReport, Claim, ClaimKind, Status};
use crate::digits::{DigitSetExpr, NodeState, Run};
use crate::error::{Error, Result};
use crate::interval::{max_intervals, Interval, IntervalUnion};
use crate::numeric::{ceil_int, floor_int, Rational};

/// Residual intervals reported for an inconclusive search.
const RESIDUAL_SAMPLE: usize = 32;

/// Interval budget of the refinement check before it defers to a replay.
const REFINE_BUDGET: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Signature {
    y: NodeState,
    /// Per non-reference translate: sorted `(normalized offset, state)`.
    rel: Vec<Vec<(i64, NodeState)>>,
}

/// Offset window of one translate at one depth.
struct Window {
    lo: BigInt,
    width: i64,
    /// `u` range of an entry with normalized offset `o` is `[o + left, o + right]`.
    left: Rational,
    right: Rational,
}

struct Problem<'a> {
    set: &'a DigitSetExpr,
    deltas: Vec<Rational>,
    pads: Vec<Rational>,
    ref_pad: Rational,
    ref_translate: Rational,
}

pub(super) struct Outcome {
    pub empty: bool,
    pub residual: Vec<Interval>,
}

impl<'a> Problem<'a> {
    fn new(set: &'a DigitSetExpr, translates: &[Rational], pads: &[Rational], q: &BigInt) -> Result<Self> {
        let pads = closed_pads(q, translates, &normalize_pads(translates, pads)?);
        let reference = (0..pads.len()).min_by(|&a, &b| pads[a].cmp(&pads[b]).then(a.cmp(&b))).unwrap();
        let others = (0..translates.len()).filter(|&i| i != reference);
        Ok(Problem {
            set,
            deltas: others.clone().map(|i| &translates[i] - &translates[reference]).collect(),
            pads: others.map(|i| pads[i].clone()).collect(),
            ref_pad: pads[reference].clone(),
            ref_translate: translates[reference].clone(),
        })
    }

    fn windows(&self, q: &BigInt) -> Result<Vec<Window>> {
        let q = Rational::from_integer(q.clone());
        self.deltas
            .iter()
            .zip(&self.pads)
            .map(|(delta, pad)| {
                let a = &q * (delta - &self.ref_pad);
                let b = &q * (delta + pad);
                let one = Rational::from_integer(1.into());
                let lo = ceil_int(&(&a - &one));
                let hi = floor_int(&(&b + &one));
                let width = (&hi - &lo)
                    .to_i64()
                    .filter(|w| *w >= 0 && (*w as u64) < u64::MAX / 4)
                    .ok_or(Error::CapacityExceeded { count: usize::MAX, cap: max_intervals() })?;
                let lo_r = Rational::from_integer(lo.clone());
                Ok(Window { left: &lo_r - &b, right: &lo_r + one - &a, lo, width })
            })
            .collect()
    }
}

/// Feasible `u in [0, 1]` of `sig`, with entries that cannot contribute removed.
fn prune(sig: &mut Signature, windows: &[Window]) -> Option<IntervalUnion> {
    let zero = Rational::zero();
    let one = Rational::from_integer(1.into());
    let entry_range = |w: &Window, o: i64| -> Option<Interval> {
        let o = Rational::from_integer(o.into());
        let lo = (&o + &w.left).max(zero.clone());
        let hi = (&o + &w.right).min(one.clone());
        (lo <= hi).then_some(Interval { lo, hi })
    };
    let mut feasible = IntervalUnion::single(zero.clone(), one.clone()).unwrap();
    for (entries, w) in sig.rel.iter().zip(windows) {
        let ranges = entries.iter().filter_map(|(o, _)| entry_range(w, *o)).collect();
        feasible = feasible.intersect(&IntervalUnion::from_intervals(ranges));
        if feasible.is_empty() {
            return None;
        }
    }
    for (entries, w) in sig.rel.iter_mut().zip(windows) {
        entries.retain(|(o, _)| {
            entry_range(w, *o).is_some_and(|r| !feasible.intersect(&IntervalUnion::from_intervals(vec![r])).is_empty())
        });
    }
    Some(feasible)
}

type Frontier = BTreeMap<Signature, BigInt>;

fn entry_count(frontier: &Frontier) -> usize {
    frontier.keys().map(|s| s.rel.iter().map(Vec::len).sum::<usize>().max(1)).sum()
}

fn check_capacity(frontier: &Frontier) -> Result<()> {
    let count = entry_count(frontier);
    let cap = max_intervals();
    if count > cap {
        return Err(Error::CapacityExceeded { count, cap });
    }
    Ok(())
}

fn seed(problem: &Problem, windows: &[Window]) -> Frontier {
    let roots = problem.set.roots();
    let mut frontier = Frontier::new();
    for (m, y) in &roots {
        let m = BigInt::from(*m);
        let rel = windows
            .iter()
            .map(|w| {
                let mut entries: Vec<(i64, NodeState)> = roots
                    .iter()
                    .filter_map(|(n, s)| {
                        let o = (BigInt::from(*n) - &m - &w.lo).to_i64()?;
                        (0..=w.width).contains(&o).then(|| (o, s.clone()))
                    })
                    .collect();
                entries.sort();
                entries.dedup();
                entries
            })
            .collect();
        let mut sig = Signature { y: y.clone(), rel };
        if prune(&mut sig, windows).is_some() {
            frontier.entry(sig).or_insert(m);
        }
    }
    frontier
}

struct RunCache<'a> {
    set: &'a DigitSetExpr,
    level: usize,
    runs: HashMap<NodeState, Vec<Run>>,
}

impl RunCache<'_> {
    fn get(&mut self, state: &NodeState) -> Result<&Vec<Run>> {
        if !self.runs.contains_key(state) {
            let runs = self.set.runs(state, self.level)?;
            self.runs.insert(state.clone(), runs);
        }
        Ok(&self.runs[state])
    }
}

/// Children of `sig` at level `level` keyed by their signature.
#[allow(clippy::too_many_arguments)]
fn expand(
    problem: &Problem,
    sig: &Signature,
    rep: &BigInt,
    level: usize,
    shifts: &[i64],
    next: &[Window],
    cache: &mut RunCache,
    out: &mut Frontier,
) -> Result<()> {
    let radix = problem.set.system().checked_radix(level)?;
    let r = radix as i64;
    let y_runs = cache.get(&sig.y)?.clone();
    let mut bases: Vec<Vec<(i64, Vec<Run>)>> = Vec::with_capacity(sig.rel.len());
    for (entries, shift) in sig.rel.iter().zip(shifts) {
        let mut list = Vec::with_capacity(entries.len());
        for (o, state) in entries {
            let base = o
                .checked_mul(r)
                .and_then(|v| v.checked_add(*shift))
                .ok_or(Error::CapacityExceeded { count: usize::MAX, cap: max_intervals() })?;
            list.push((base, cache.get(state)?.clone()));
        }
        bases.push(list);
    }
    let cap = max_intervals();
    for (a, b, y_next) in y_runs {
        'digit: for d_y in a..=b {
            let mut rel = Vec::with_capacity(bases.len());
            for (list, w) in bases.iter().zip(next) {
                let mut entries: Vec<(i64, NodeState)> = Vec::new();
                for (base, runs) in list {
                    // offset' = base + d - d_y must land in [0, width]
                    let lo = d_y as i64 - base;
                    let hi = lo + w.width;
                    if hi < 0 || lo >= r {
                        continue;
                    }
                    let (lo, hi) = (lo.max(0) as u64, hi.min(r - 1) as u64);
                    let start = runs.partition_point(|run| run.1 < lo);
                    for run in &runs[start..] {
                        if run.0 > hi {
                            break;
                        }
                        for d in run.0.max(lo)..=run.1.min(hi) {
                            entries.push((base + d as i64 - d_y as i64, run.2.clone()));
                        }
                    }
                    if entries.len() > cap {
                        return Err(Error::CapacityExceeded { count: entries.len(), cap });
                    }
                }
                if entries.is_empty() {
                    continue 'digit;
                }
                entries.sort();
                entries.dedup();
                rel.push(entries);
            }
            let mut child = Signature { y: y_next.clone(), rel };
            if prune(&mut child, next).is_some() {
                out.entry(child).or_insert_with(|| rep * radix + d_y);
            }
        }
    }
    Ok(())
}

fn normalize_pads(translates: &[Rational], pads: &[Rational]) -> Result<Vec<Rational>> {
    if translates.is_empty() {
        return Err(Error::Precondition("at least one translate is required".into()));
    }
    let pads: Vec<Rational> = if pads.is_empty() {
        vec![Rational::zero(); translates.len()]
    } else if pads.len() == translates.len() {
        pads.to_vec()
    } else {
        return Err(Error::Precondition(format!("{} pads for {} translates", pads.len(), translates.len())));
    };
    if pads.iter().any(|p| p.is_negative()) {
        return Err(Error::Precondition("pads must be non-negative".into()));
    }
    Ok(pads)
}

/// Closed pads equivalent to the half-open ones at `depth`.
fn closed_pads(q: &BigInt, translates: &[Rational], pads: &[Rational]) -> Vec<Rational> {
    let mut grid = q.clone();
    for r in translates.iter().chain(pads) {
        grid = grid.lcm(r.denom());
    }
    let shrink = Rational::new(BigInt::one(), grid * 2);
    pads.iter().map(|e| if e.is_positive() { e - &shrink } else { e.clone() }).collect()
}

/// Runs the signature search to `depth`.
pub(super) fn search(set: &DigitSetExpr, translates: &[Rational], pads: &[Rational], depth: usize) -> Result<Outcome> {
    let system = set.system();
    system.check_depth(depth)?;
    let counts: Vec<BigInt> = system.cell_counts(depth).into_iter().map(BigInt::from).collect();
    let problem = Problem::new(set, translates, pads, &counts[depth])?;
    let mut windows = problem.windows(&counts[0])?;
    let mut frontier = seed(&problem, &windows);
    for level in 0..depth {
        if frontier.is_empty() {
            break;
        }
        let next = problem.windows(&counts[level + 1])?;
        let radix = BigInt::from(system.checked_radix(level)?);
        let shifts: Vec<i64> = windows
            .iter()
            .zip(&next)
            .map(|(w, n)| (&w.lo * &radix - &n.lo).to_i64().expect("window shift fits"))
            .collect();
        let mut cache = RunCache { set, level, runs: HashMap::new() };
        let mut out = Frontier::new();
        for (sig, rep) in &frontier {
            expand(&problem, sig, rep, level, &shifts, &next, &mut cache, &mut out)?;
            check_capacity(&out)?;
        }
        frontier = out;
        windows = next;
    }
    if frontier.is_empty() {
        return Ok(Outcome { empty: true, residual: vec![] });
    }
    let q = Rational::from_integer(counts[depth].clone());
    let mut raw = Vec::new();
    for (sig, rep) in frontier.iter().take(RESIDUAL_SAMPLE) {
        let mut sig = sig.clone();
        let feasible = prune(&mut sig, &windows).expect("frontier signatures are feasible");
        for iv in feasible.intervals() {
            let m = Rational::from_integer(rep.clone());
            let lo = (&m + &iv.lo) / &q - &problem.ref_translate - &problem.ref_pad;
            let hi = (&m + &iv.hi) / &q - &problem.ref_translate;
            raw.push(Interval { lo, hi });
        }
    }
    Ok(Outcome { empty: false, residual: IntervalUnion::from_intervals(raw).into_intervals() })
}

/// Certifies `⋂_i (set - [t_i, t_i + pad_i]) = ∅` from the depth-`depth`
/// projection, or reports a sample of the residual.
///
/// Empty `pads` means all pads are zero.
pub fn certify_empty_intersection(
    set: &DigitSetExpr,
    translates: &[Rational],
    pads: &[Rational],
    depth: usize,
) -> Result<Certificate> {
    let start = Instant::now();
    let outcome = search(set, translates, pads, depth)?;
    let mut claim = Claim::new(ClaimKind::EmptyIntersection, vec![descriptor(set)]);
    claim.translates = translates.to_vec();
    claim.pads = if pads.is_empty() { vec![Rational::zero(); translates.len()] } else { pads.to_vec() };
    claim.tuple_size = Some(translates.len());
    let cert = if outcome.empty {
        let mut c = Certificate::new(claim, Status::CertifiedEmpty, depth);
        c.residual = Some(vec![]);
        c
    } else {
        let mut c = Certificate::new(claim, Status::InconclusiveAtDepth, depth);
        c.residual = Some(outcome.residual);
        c
    };
    Ok(cert.timed(start))
}

/// Sorted closed integer intervals with touching ones merged.
fn merged(mut raw: Vec<(BigInt, BigInt)>) -> Vec<(BigInt, BigInt)> {
    raw.sort();
    let mut out: Vec<(BigInt, BigInt)> = Vec::with_capacity(raw.len());
    for (lo, hi) in raw {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn intersected(a: &[(BigInt, BigInt)], b: &[(BigInt, BigInt)]) -> Vec<(BigInt, BigInt)> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        let lo = (&a[i].0).max(&b[j].0);
        let hi = (&a[i].1).min(&b[j].1);
        if lo <= hi {
            out.push((lo.clone(), hi.clone()));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Exact projected intersection at `depth`, refined level by level and only
/// inside the surviving intervals. Endpoints are integers over one common
/// denominator, and each translate keeps the frontier of admissible cells
/// that can still meet the residual. `None` when the budget runs out.
pub(super) fn refine(
    set: &DigitSetExpr,
    translates: &[Rational],
    pads: &[Rational],
    depth: usize,
    budget: usize,
) -> Result<Option<IntervalUnion>> {
    let system = set.system();
    system.check_depth(depth)?;
    let counts: Vec<BigInt> = system.cell_counts(depth).into_iter().map(BigInt::from).collect();
    let pads = closed_pads(&counts[depth], translates, &normalize_pads(translates, pads)?);
    let den = translates.iter().chain(&pads).fold(counts[depth].clone(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &Rational| r.numer() * (&den / r.denom());
    // cell [c w, (c + 1) w] pulled back by [t, t + e] is [c w - t - e, (c + 1) w - t]
    let shifts: Vec<(BigInt, BigInt)> =
        translates.iter().zip(&pads).map(|(t, e)| (scale(t), scale(t) + scale(e))).collect();
    let roots: Vec<(BigInt, NodeState)> = set.roots().into_iter().map(|(c, s)| (BigInt::from(c), s)).collect();
    let mut frontiers: Vec<Vec<(BigInt, NodeState)>> = vec![roots; translates.len()];
    let mut residual: Option<Vec<(BigInt, BigInt)>> = None;
    let widths: Vec<BigInt> = counts.iter().map(|q| &den / q).collect();
    for (level, width) in widths.iter().enumerate() {
        let mut next: Option<Vec<(BigInt, BigInt)>> = None;
        for (frontier, (t, te)) in frontiers.iter_mut().zip(&shifts) {
            if level > 0 {
                let parent_width = &widths[level - 1];
                let radix = system.radix(level - 1);
                let r = residual.as_deref().unwrap_or_default();
                let mut children = Vec::new();
                for (cell, state) in frontier.iter() {
                    let lo = cell * parent_width - te;
                    let hi = (cell + 1) * parent_width - t;
                    let first = r.partition_point(|iv| iv.1 < lo);
                    let base = cell * radix;
                    for (a, b, next_state) in set.runs(state, level - 1)? {
                        let mut floor = &base + a;
                        for iv in r[first..].iter().take_while(|iv| iv.0 <= hi) {
                            // children k with k w - te <= iv.1 and (k + 1) w - t >= iv.0
                            let k_lo: BigInt = Integer::div_ceil(&(&iv.0 + t), width) - 1;
                            let k_hi = (&iv.1 + te).div_floor(width);
                            let mut k = k_lo.max(floor.clone());
                            let last = k_hi.min(&base + b);
                            while k <= last {
                                children.push((k.clone(), next_state.clone()));
                                if children.len() > budget {
                                    return Ok(None);
                                }
                                k += 1;
                            }
                            floor = floor.max(k);
                        }
                    }
                }
                *frontier = children;
            }
            let pulled = merged(frontier.iter().map(|(c, _)| (c * width - te, (c + 1) * width - t)).collect());
            let joined = match next {
                None => pulled,
                Some(n) => intersected(&n, &pulled),
            };
            if joined.len() > budget {
                return Ok(None);
            }
            next = Some(joined);
        }
        let next = next.unwrap_or_default();
        if next.is_empty() {
            return Ok(Some(IntervalUnion::default()));
        }
        residual = Some(next);
    }
    Ok(Some(IntervalUnion::from_intervals(
        residual
            .unwrap_or_default()
            .into_iter()
            .map(|(lo, hi)| Interval { lo: Rational::new(lo, den.clone()), hi: Rational::new(hi, den.clone()) })
            .collect(),
    )))
}

/// Re-derives emptiness without the signature search when the refinement
/// fits its budget, and by replaying the search otherwise.
pub(super) fn independent_check(
    set: &DigitSetExpr,
    translates: &[Rational],
    pads: &[Rational],
    depth: usize,
) -> Result<CheckReport> {
    match refine(set, translates, pads, depth, REFINE_BUDGET.min(max_intervals()))? {
        Some(r) if r.is_empty() => Ok(CheckReport::pass("refinement")),
        Some(r) => Ok(CheckReport::fail("refinement", format!("{} residual intervals remain", r.len()))),
        None => {
            let outcome = search(set, translates, pads, depth)?;
            if outcome.empty {
                Ok(CheckReport::pass("replay"))
            } else {
                Ok(CheckReport::fail("replay", "replayed search leaves a residual".into()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_from_id;
    use crate::numeric::rat;

    /// `U - [t, t + e]`.
    fn pull_back(u: &IntervalUnion, t: &Rational, e: &Rational) -> IntervalUnion {
        IntervalUnion::from_intervals(
            u.intervals().iter().map(|iv| Interval { lo: &iv.lo - t - e, hi: &iv.hi - t }).collect(),
        )
    }

    fn cantor() -> DigitSetExpr {
        make_from_id("ternary").unwrap().expr
    }

    #[test]
    fn ternary_triple_is_empty() {
        let c = cantor();
        let t = [rat(0, 1), rat(4, 9), rat(2, 9)];
        let pads = [rat(0, 1), rat(1, 9), rat(1, 9)];
        let cert = certify_empty_intersection(&c, &t, &pads, 4).unwrap();
        assert_eq!(cert.status, Status::CertifiedEmpty);
        assert!(independent_check(&c, &t, &pads, 4).unwrap().ok);
    }

    #[test]
    fn single_translate_is_inconclusive() {
        let c = cantor();
        let cert = certify_empty_intersection(&c, &[rat(0, 1)], &[rat(0, 1)], 40).unwrap();
        assert_eq!(cert.status, Status::InconclusiveAtDepth);
        let residual = cert.residual.unwrap();
        assert!(!residual.is_empty() && residual.len() <= RESIDUAL_SAMPLE);
        assert_eq!(residual[0].lo, rat(0, 1));
    }

    #[test]
    fn matches_refinement_on_small_cases() {
        let c = cantor();
        for (a, b) in [(1, 3), (2, 9), (1, 9), (4, 27), (1, 2)] {
            let t = [rat(0, 1), rat(a, b)];
            for depth in 0..=4 {
                let fast = search(&c, &t, &[], depth).unwrap();
                let slow = refine(&c, &t, &[], depth, 1 << 20).unwrap().unwrap();
                assert_eq!(fast.empty, slow.is_empty(), "{a}/{b} at depth {depth}");
                if !fast.empty {
                    let found = IntervalUnion::from_intervals(fast.residual);
                    assert!(slow.contains(&found), "{a}/{b} at depth {depth}");
                }
            }
        }
    }

    #[test]
    fn refinement_equals_interval_algebra() {
        let sets = [cantor(), make_from_id("reflect(gap(5))").unwrap().expr, make_from_id("cl(0)").unwrap().expr];
        let cases = [
            (vec![rat(0, 1), rat(2, 9)], vec![]),
            (vec![rat(1, 7), rat(3, 10), rat(-1, 4)], vec![]),
            (vec![rat(0, 1), rat(4, 9), rat(2, 9)], vec![rat(0, 1), rat(1, 27), rat(1, 81)]),
        ];
        for set in &sets {
            for (t, e) in &cases {
                for depth in 0..=2 {
                    let q = BigInt::from(set.system().cell_counts(depth).pop().unwrap());
                    let closed = closed_pads(&q, t, &normalize_pads(t, e).unwrap());
                    let proj = set.project(depth).unwrap();
                    let oracle =
                        t.iter().zip(&closed).map(|(t, e)| pull_back(&proj, t, e)).reduce(|a, b| a.intersect(&b));
                    let got = refine(set, t, e, depth, 1 << 20).unwrap().unwrap();
                    assert_eq!(got, oracle.unwrap(), "{t:?} at depth {depth}");
                }
            }
        }
    }

    #[test]
    fn pads_must_match_translates() {
        let c = cantor();
        assert!(certify_empty_intersection(&c, &[rat(0, 1)], &[rat(0, 1), rat(0, 1)], 2).is_err());
        assert!(certify_empty_intersection(&c, &[], &[], 2).is_err());
    }
}
