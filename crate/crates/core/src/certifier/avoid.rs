//! Cantor sets meeting every translate of a finite point set at most once.

use std::time::Instant;

use super::{Certificate, CheckReport, Claim, ClaimKind, Status, Verdict};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};
use crate::witness::{avoiding_tail, BlockScheme, CantorWitness};

/// Nonzero differences `p - p'` of distinct points, sorted.
fn differences(points: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> =
        points.iter().flat_map(|a| points.iter().filter(move |b| *b != a).map(move |b| a - b)).collect();
    out.sort();
    out.dedup();
    out
}

/// First pair of generation-`g` branches whose padded difference meets
/// `diffs`, or `None` when every pair, equal branches included, avoids it.
fn bad_pair(witness: &CantorWitness, g: usize, pad: &Rational, diffs: &[Rational]) -> Result<Option<(u64, u64)>> {
    let points = witness.generation_points(g)?;
    for (a, va) in &points {
        for (b, vb) in &points {
            let d = va - vb;
            let lo = &d - pad;
            let hi = &d + pad;
            let start = diffs.partition_point(|x| *x < lo);
            if diffs.get(start).is_some_and(|x| *x <= hi) {
                return Ok(Some((*a, *b)));
            }
        }
    }
    Ok(None)
}

/// Grows the block length of a base-3 blockwise witness until its
/// generation-`generations` branch differences, padded by the tail bound,
/// avoid every nonzero difference of `points`.
///
/// Two points of the witness differing by `p - p'` would then sit in
/// branches whose padded difference contains `p - p'`, so no translate
/// `D - x` holds two of the points. Block lengths stop at
/// `depth / generations`; beyond that the result is inconclusive.
pub fn cantor_avoiding_pairs(
    points: &[Rational],
    generations: usize,
    depth: usize,
) -> Result<(CantorWitness, Certificate)> {
    let start = Instant::now();
    if has_duplicates(points) {
        return Err(Error::Precondition("points must be distinct".into()));
    }
    if generations == 0 {
        return Err(Error::InvalidParams("need at least one generation".into()));
    }
    let diffs = differences(points);
    let mut claim = Claim::new(ClaimKind::AvoidingPairs, vec![]).param("generation", generations);
    claim.translates = points.to_vec();
    let cap = depth / generations;
    for block_len in 1..=cap {
        let witness = CantorWitness::from_scheme(BlockScheme::Avoiding { block_len });
        let pad = avoiding_tail(block_len, generations);
        if bad_pair(&witness, generations, &pad, &diffs)?.is_none() {
            claim.pads = vec![pad];
            let claim = claim.param("block_len", block_len);
            let mut cert = Certificate::new(claim, Status::CertifiedEmpty, generations * block_len)
                .with_verdict(Verdict::AtMostOneHit);
            cert.residual = Some(vec![]);
            return Ok((witness, cert.timed(start)));
        }
    }
    let block_len = cap.max(1);
    let witness = CantorWitness::from_scheme(BlockScheme::Avoiding { block_len });
    let claim = claim.param("block_len", block_len);
    let cert = Certificate::new(claim, Status::InconclusiveAtDepth, depth).with_verdict(Verdict::Inconclusive);
    Ok((witness, cert.timed(start)))
}

fn has_duplicates(points: &[Rational]) -> bool {
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Re-runs the exhaustive pair check for the recorded block length.
pub(super) fn check_pairs(cert: &Certificate) -> Result<CheckReport> {
    let get = |key: &str| -> Result<usize> {
        cert.claim
            .params
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("avoiding claim has no {key}")))
    };
    let (g, block_len) = (get("generation")?, get("block_len")?);
    if has_duplicates(&cert.claim.translates) {
        return Ok(CheckReport::fail("pairs", "points are not distinct".into()));
    }
    let witness = CantorWitness::from_scheme(BlockScheme::Avoiding { block_len });
    let pad = avoiding_tail(block_len, g);
    if cert.claim.pads.first() != Some(&pad) {
        return Ok(CheckReport::fail("pairs", format!("recorded pad is not {}", format_rational(&pad))));
    }
    match bad_pair(&witness, g, &pad, &differences(&cert.claim.translates))? {
        None => Ok(CheckReport::pass("pairs")),
        Some((a, b)) => Ok(CheckReport::fail("pairs", format!("branches {a} and {b} meet a point difference"))),
    }
}
