//! Haar-n witness checks, gap sequences, difference-set fixed points and
//! the separation and counting facts behind the common-point constructions.

use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::{descriptor, Certificate, CheckReport, Claim, ClaimKind, Status, Verdict};
use crate::digits::{m_l, pow3, DigitSetExpr, FamilyKind, LevelConstraint, TailRule};
use crate::error::{Error, Result};
use crate::interval::{max_intervals, IntervalUnion};
use crate::numeric::{rat, recip, RadixRule, Rational};
use crate::witness::{binomial, combination_unrank, CantorWitness};

use super::empty::certify_empty_intersection;

fn aggregate(claim: Claim, children: Vec<Certificate>, depth: usize, start: Instant) -> Certificate {
    let all = children.iter().all(|c| c.status == Status::CertifiedEmpty);
    let (status, verdict) = if all {
        (Status::CertifiedEmpty, Verdict::AllCertified)
    } else {
        (Status::InconclusiveAtDepth, Verdict::Inconclusive)
    };
    let mut cert = Certificate::new(claim, status, depth).with_verdict(verdict);
    cert.children = children;
    cert.timed(start)
}

/// Checks every `(n+1)`-subset of generation-`g` branch points, each
/// translate padded by the tail width of generation `g`.
///
/// With fewer than `n + 1` branches the result is vacuously certified.
pub fn verify_haar_n(
    set: &DigitSetExpr,
    witness: &CantorWitness,
    n: usize,
    generation: usize,
    depth: usize,
) -> Result<Certificate> {
    let start = Instant::now();
    let claim = Claim::new(ClaimKind::HaarN, vec![descriptor(set)]).param("arity", n).param("generation", generation);
    let mut claim = Claim { tuple_size: Some(n + 1), ..claim };
    let branches = 1u64
        .checked_shl(generation as u32)
        .filter(|_| generation < 32)
        .ok_or_else(|| Error::InvalidParams(format!("generation {generation} has too many branches")))?;
    if branches < n as u64 + 1 {
        let cert = Certificate::new(claim, Status::CertifiedEmpty, depth).with_verdict(Verdict::Vacuous);
        return Ok(cert.timed(start));
    }
    let tuples = binomial(branches, n as u64 + 1)
        .filter(|&t| t <= max_intervals() as u128)
        .ok_or_else(|| Error::CapacityExceeded { count: usize::MAX, cap: max_intervals() })?;
    let points = witness.generation_points(generation)?;
    let pad = witness.tail_width(generation)?;
    claim.pads = vec![pad.clone()];
    let children = (0..tuples)
        .into_par_iter()
        .map(|rank| {
            let members = combination_unrank(rank, branches, n as u64 + 1)?;
            let translates: Vec<Rational> = members.iter().map(|&b| points[b as usize].1.clone()).collect();
            let pads = vec![pad.clone(); translates.len()];
            certify_empty_intersection(set, &translates, &pads, depth)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(claim, children, depth, start))
}

/// Checks the single tuple served by slot `slot` (default: the scheme's
/// default slot) of generation `generation`, with branch values truncated
/// after the slot and padded by one cell of its last level.
pub fn verify_sampled_tuple(
    set: &DigitSetExpr,
    witness: &CantorWitness,
    generation: usize,
    slot: Option<u128>,
    depth: usize,
) -> Result<Certificate> {
    let start = Instant::now();
    let scheme =
        witness.block_scheme().ok_or_else(|| Error::Precondition("sampled tuples need a block witness".into()))?;
    let slot = match slot {
        Some(p) => p,
        None => scheme.default_slot(generation)?,
    };
    let tuple = witness.sampled_tuple(generation, slot)?;
    let pads = vec![tuple.pad.clone(); tuple.translates.len()];
    let child = certify_empty_intersection(set, &tuple.translates, &pads, depth)?;
    let claim =
        Claim { tuple_size: Some(tuple.translates.len()), ..Claim::new(ClaimKind::HaarN, vec![descriptor(set)]) }
            .param("generation", generation)
            .param("slot", slot)
            .param("members", format!("{:?}", tuple.members));
    Ok(aggregate(claim, vec![child], depth, start))
}

/// Certifies `(set - d) ∩ set = ∅` for every gap `d`.
pub fn certify_haar1_gap_sequence(set: &DigitSetExpr, gaps: &[Rational], depth: usize) -> Result<Certificate> {
    let start = Instant::now();
    if gaps.is_empty() {
        return Err(Error::Precondition("gap list is empty".into()));
    }
    if gaps.iter().any(|g| *g <= rat(0, 1)) || gaps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("gaps must be positive and strictly decreasing".into()));
    }
    let children = gaps
        .par_iter()
        .map(|d| certify_empty_intersection(set, &[rat(0, 1), d.clone()], &[], depth))
        .collect::<Result<Vec<_>>>()?;
    let mut claim = Claim::new(ClaimKind::GapSequence, vec![descriptor(set)]);
    claim.translates = gaps.to_vec();
    let certified = children.iter().take_while(|c| c.status == Status::CertifiedEmpty).count();
    claim = claim.param("largest_certified_index", certified as i64 - 1);
    let mut cert = aggregate(claim, children, depth, start);
    if cert.status == Status::CertifiedEmpty {
        cert.verdict = Some(Verdict::Haar1Evidence);
    }
    Ok(cert)
}

/// Radix and allowed digits of a constant-radix product whose levels all
/// follow one repeating constraint.
fn self_similar_digits(set: &DigitSetExpr) -> Result<(u64, Vec<u64>)> {
    let reject = || Error::Precondition("set must be a constant-radix product with one repeating digit set".into());
    let DigitSetExpr::Product { system, levels, tail } = set else {
        return Err(reject());
    };
    let RadixRule::Constant { radix } = system.rule else {
        return Err(reject());
    };
    let constraint: &LevelConstraint = match tail {
        TailRule::Periodic(p) if p.iter().all(|c| *c == p[0]) && levels.iter().all(|c| *c == p[0]) => &p[0],
        TailRule::Free if levels.is_empty() => &LevelConstraint::Any,
        _ => return Err(reject()),
    };
    let digits = constraint.runs(radix).into_iter().flat_map(|(lo, hi)| lo..=hi).collect();
    Ok((radix, digits))
}

fn fixed_point_verdict(candidate: &IntervalUnion) -> Verdict {
    let zero = rat(0, 1);
    if candidate.intervals().iter().any(|iv| iv.lo < zero && zero < iv.hi) {
        Verdict::NotHaar1
    } else if !candidate.has_interior() {
        Verdict::Haar1
    } else {
        Verdict::FixedPoint
    }
}

/// Certifies `A - A = candidate` through the fixed-point identity of the
/// difference IFS, whose unique nonempty compact fixed point is `A - A`.
pub fn refute_haar1_difference_interval(set: &DigitSetExpr, candidate: &IntervalUnion) -> Result<Certificate> {
    let start = Instant::now();
    let (radix, digits) = self_similar_digits(set)?;
    if candidate.is_empty() {
        return Err(Error::NotAFixedPoint);
    }
    let mut offsets: Vec<i64> = digits.iter().flat_map(|&a| digits.iter().map(move |&b| a as i64 - b as i64)).collect();
    offsets.sort_unstable();
    offsets.dedup();
    let offsets: Vec<Rational> = offsets.into_iter().map(|o| rat(o, 1)).collect();
    let ratio = rat(radix as i64, 1);
    if candidate.ifs_step(&ratio, &offsets)? != *candidate {
        return Err(Error::NotAFixedPoint);
    }
    let mut claim = Claim::new(ClaimKind::IfsFixedPoint, vec![descriptor(set)]);
    claim.candidate = Some(candidate.clone());
    claim = claim.param("ratio", radix).param("offsets", format!("{offsets:?}").replace(' ', ""));
    let mut cert = Certificate::new(claim, Status::CertifiedEmpty, 0).with_verdict(fixed_point_verdict(candidate));
    cert.residual = Some(vec![]);
    Ok(cert.timed(start))
}

pub(super) fn check_fixed_point(cert: &Certificate) -> Result<CheckReport> {
    let set = cert.claim.sets.first().ok_or_else(|| Error::Parse("claim has no set".into()))?.build()?;
    let candidate = cert.claim.candidate.as_ref().ok_or_else(|| Error::Parse("claim has no candidate".into()))?;
    match refute_haar1_difference_interval(&set, candidate) {
        Ok(fresh) if fresh.verdict == cert.verdict => Ok(CheckReport::pass("fixed-point")),
        Ok(_) => Ok(CheckReport::fail("fixed-point", "verdict does not match the candidate".into())),
        Err(Error::NotAFixedPoint) => Ok(CheckReport::fail("fixed-point", "candidate is not a fixed point".into())),
        Err(e) => Err(e),
    }
}

/// `(3^(n-l) + 1) (m_l - 1) < 25 3^n - 3^(n-l)`, in big integers.
pub fn pigeonhole_holds(l: usize, n: usize) -> bool {
    if l > n {
        return false;
    }
    let w = BigInt::from(pow3(n - l));
    let lhs = (&w + 1) * BigInt::from(m_l(l) - 1);
    let rhs = BigInt::from(25) * BigInt::from(pow3(n)) - w;
    lhs < rhs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub k: usize,
    pub depth: usize,
    #[serde(with = "crate::numeric::rational_str")]
    pub distance: Rational,
    #[serde(with = "crate::numeric::rational_str")]
    pub bound: Rational,
    pub holds: bool,
}

/// Distance between the projections of `(A ∩ ⋃_{l>k} X_l) - ⌊m_k/2⌋ / q(k)`
/// and `A`, against the bound `1 / q(k)`.
pub fn step4_separation(k: usize, depth: usize) -> Result<SeparationReport> {
    if depth <= k {
        return Err(Error::InsufficientDepth(format!("separation at {k} needs depth > {k}")));
    }
    let late = DigitSetExpr::family(FamilyKind::A, k + 1);
    let all = DigitSetExpr::family(FamilyKind::A, 0);
    let q = late.system().q(k);
    let shift = Rational::new(BigInt::from(m_l(k) / 2), BigInt::from(q.clone()));
    let moved = late.project(depth)?.translate(&-shift);
    let distance =
        moved.distance(&all.project(depth)?).ok_or_else(|| Error::Precondition("projection is empty".into()))?;
    let bound = recip(&q);
    Ok(SeparationReport { k, depth, holds: distance >= bound, distance, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gap_set, ternary};

    #[test]
    fn pigeonhole_small_cases() {
        assert!(pigeonhole_holds(0, 0));
        assert!(pigeonhole_holds(2, 5));
        assert!(!pigeonhole_holds(3, 2));
    }

    #[test]
    fn cantor_difference_is_the_unit_square() {
        let cert = refute_haar1_difference_interval(&ternary(), &IntervalUnion::single(rat(-1, 1), rat(1, 1)).unwrap())
            .unwrap();
        assert_eq!(cert.verdict, Some(Verdict::NotHaar1));
        assert!(check_fixed_point(&cert).unwrap().ok);
    }

    #[test]
    fn wide_gap_set_is_not_a_fixed_point() {
        let full = IntervalUnion::single(rat(-1, 1), rat(1, 1)).unwrap();
        assert_eq!(refute_haar1_difference_interval(&gap_set(5).unwrap(), &full).unwrap_err(), Error::NotAFixedPoint);
        assert_eq!(
            refute_haar1_difference_interval(&ternary(), &IntervalUnion::empty()).unwrap_err(),
            Error::NotAFixedPoint
        );
    }

    #[test]
    fn gap_list_preconditions() {
        assert!(certify_haar1_gap_sequence(&ternary(), &[], 4).is_err());
        assert!(certify_haar1_gap_sequence(&ternary(), &[rat(1, 9), rat(1, 3)], 4).is_err());
    }
}
