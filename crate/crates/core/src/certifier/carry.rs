//! Common point of `A_0 - x_0, ..., A_n - x_n` built digit by digit in base
//! 5 and repaired by carrying.

use std::time::Instant;

use super::{descriptor, Certificate, CheckReport, Claim, ClaimKind, Membership, PointEvidence, Status, Verdict};
use crate::constructions::haar_member;
use crate::digits::DigitSetExpr;
use crate::error::{Error, Result};
use crate::numeric::{add_with_carry, expand, rat, DigitWord, MixedRadixSystem, Rational};

fn digits_param(digits: &[u64]) -> String {
    digits.iter().map(u64::to_string).collect::<Vec<_>>().join("")
}

/// Base-5 digits of `a_0`: 0 at multiples of `n + 1`, `4 - d_{m,i}` at
/// positions `i ≡ m`.
fn anchor_digits(n: usize, offsets: &[DigitWord], depth: usize) -> Vec<u64> {
    (0..depth)
        .map(|i| match i % (n + 1) {
            0 => 0,
            m => 4 - offsets[m - 1].digits[i],
        })
        .collect()
}

struct CarryRun {
    a0: DigitWord,
    /// `a_m` and its carry flags, for `m = 1..=n`.
    sums: Vec<(DigitWord, Vec<u8>)>,
}

fn run(n: usize, anchors: &[Rational], depth: usize) -> Result<CarryRun> {
    if n == 0 || anchors.len() != n + 1 {
        return Err(Error::InvalidParams(format!("need n > 0 and n + 1 anchors, got n = {n} with {}", anchors.len())));
    }
    if anchors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("anchors must be strictly increasing".into()));
    }
    if &anchors[n] - &anchors[0] >= rat(1, 5) {
        return Err(Error::Precondition("anchors must span less than 1/5".into()));
    }
    let system = MixedRadixSystem::constant(5);
    let offsets: Vec<DigitWord> =
        anchors[1..].iter().map(|x| expand(&(x - &anchors[0]), &system, depth)).collect::<Result<_>>()?;
    let a0 = DigitWord::new(system, anchor_digits(n, &offsets, depth))?;
    let sums = offsets.iter().map(|d| add_with_carry(&a0, d).map(|t| (t.result, t.beta))).collect::<Result<_>>()?;
    Ok(CarryRun { a0, sums })
}

/// A point `a_0 - x_0` lying in `A_m - x_m` for every `m`, so that
/// `a_0 + (x_m - x_0)` lies in `A_m`.
///
/// The carried words `a_m = a_0 + trunc(x_m - x_0)` are recorded in the
/// claim parameters together with their carry flags.
pub fn carry_intersection_point(n: usize, anchors: &[Rational], depth: usize) -> Result<Certificate> {
    let start = Instant::now();
    let sets: Vec<DigitSetExpr> = (0..=n as u64).map(|m| haar_member(n as u64, m)).collect::<Result<_>>()?;
    let CarryRun { a0, sums } = run(n, anchors, depth)?;
    let mut claim = Claim::new(ClaimKind::CarryPoint, sets.iter().map(descriptor).collect()).param("n", n);
    for (m, (word, beta)) in sums.iter().enumerate() {
        claim = claim
            .param(&format!("a{}", m + 1), digits_param(&word.digits))
            .param(&format!("beta{}", m + 1), digits_param(&beta.iter().map(|&b| b as u64).collect::<Vec<_>>()));
    }
    claim.translates = anchors.to_vec();
    let point = a0.value() - &anchors[0];
    let memberships = anchors
        .iter()
        .enumerate()
        .map(|(m, x)| {
            let value = Membership::shifted(&point, x, false);
            let holds = sets[m].contains_point(depth, &value)?;
            Ok(Membership { set: m, translate: x.clone(), negate_point: false, value, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    let exact = sums.iter().zip(&anchors[1..]).all(|((word, _), x)| {
        let d = expand(&(x - &anchors[0]), &a0.system, depth).map(|w| w.value());
        d.is_ok_and(|d| a0.value() + d == word.value())
    });
    let (status, verdict) = if exact && memberships.iter().all(|m| m.holds) {
        (Status::PointFound, Verdict::CommonPoint)
    } else {
        (Status::InconclusiveAtDepth, Verdict::Inconclusive)
    };
    let mut cert = Certificate::new(claim, status, depth).with_verdict(verdict);
    cert.point = Some(PointEvidence { digits: a0.digits, value: point, memberships });
    Ok(cert.timed(start))
}

/// Recomputes the carried words and checks `a_0 + d_m = a_m` exactly.
pub(super) fn check_carry(cert: &Certificate) -> Result<CheckReport> {
    let n: usize = cert
        .claim
        .params
        .get("n")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse("carry claim has no n".into()))?;
    let point = cert.point.as_ref().ok_or_else(|| Error::Parse("POINT_FOUND without a point".into()))?;
    let fresh = run(n, &cert.claim.translates, cert.depth)?;
    let mut report = CheckReport::pass("carry");
    if fresh.a0.digits != point.digits {
        report = report.merge(CheckReport::fail("carry", "a_0 digits differ from the digit rule".into()));
    }
    for (m, (word, _)) in fresh.sums.iter().enumerate() {
        let recorded = cert.claim.params.get(&format!("a{}", m + 1));
        let d = expand(&(&cert.claim.translates[m + 1] - &cert.claim.translates[0]), &word.system, cert.depth)?;
        if recorded != Some(&digits_param(&word.digits)) || fresh.a0.value() + d.value() != word.value() {
            report = report.merge(CheckReport::fail("carry", format!("a_{} does not equal a_0 + d_{}", m + 1, m + 1)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::check;

    #[test]
    fn two_anchors_follow_the_digit_rule() {
        let cert = carry_intersection_point(1, &[rat(0, 1), rat(1, 25)], 8).unwrap();
        assert_eq!(cert.status, Status::PointFound);
        assert_eq!(cert.point.as_ref().unwrap().digits, vec![0, 3, 0, 4, 0, 4, 0, 4]);
        assert!(check(&cert).unwrap().ok);
    }

    #[test]
    fn equal_anchors_are_rejected() {
        assert!(carry_intersection_point(1, &[rat(1, 7), rat(1, 7)], 8).is_err());
        assert!(carry_intersection_point(1, &[rat(0, 1), rat(1, 5)], 8).is_err());
    }

    #[test]
    fn tampered_carry_fails_check() {
        let mut cert = carry_intersection_point(2, &[rat(1, 10), rat(1, 9), rat(1, 8)], 20).unwrap();
        assert_eq!(cert.status, Status::PointFound);
        cert.claim.params.insert("a1".into(), "0".repeat(20));
        assert!(!check(&cert).unwrap().ok);
    }
}
