//! Certificates for translate intersections.
//!
//! Every certificate carries enough of its claim to be re-verified by
//! [`check`] without trusting the search that produced it.

mod avoid;
mod carry;
mod empty;
mod greedy;
mod haar;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::descriptor::SetDescriptor;
use crate::digits::DigitSetExpr;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::numeric::{rational_str, rational_vec_str, Rational};

pub use avoid::cantor_avoiding_pairs;
pub use carry::carry_intersection_point;
pub use empty::certify_empty_intersection;
pub use greedy::{
    cl_common_point, greedy_common_point, refute_haar_countable, refute_haar_finite_x, refute_null_finite, GreedyRule,
};
pub use haar::{
    certify_haar1_gap_sequence, pigeonhole_holds, refute_haar1_difference_interval, step4_separation, verify_haar_n,
    verify_sampled_tuple, SeparationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    CertifiedEmpty,
    PointFound,
    InconclusiveAtDepth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Every checked tuple has an empty joint intersection.
    AllCertified,
    /// No tuple exists at the requested generation.
    Vacuous,
    /// `A - A` misses every listed gap.
    Haar1Evidence,
    /// `A - A` is a certified fixed point containing a neighborhood of 0.
    NotHaar1,
    /// `A - A` is a certified fixed point with empty interior.
    Haar1,
    /// `A - A` is a certified fixed point, neither of the above.
    FixedPoint,
    /// A common point of all translates was found.
    CommonPoint,
    /// No translate of the witness meets the point set twice.
    AtMostOneHit,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    EmptyIntersection,
    HaarN,
    GapSequence,
    IfsFixedPoint,
    CommonPoint,
    CarryPoint,
    AvoidingPairs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub kind: ClaimKind,
    pub sets: Vec<SetDescriptor>,
    #[serde(with = "rational_vec_str")]
    pub translates: Vec<Rational>,
    #[serde(with = "rational_vec_str")]
    pub pads: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<IntervalUnion>,
    /// Closed interval every membership point must also lie in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Interval>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl Claim {
    pub fn new(kind: ClaimKind, sets: Vec<SetDescriptor>) -> Self {
        Claim {
            kind,
            sets,
            translates: vec![],
            pads: vec![],
            tuple_size: None,
            candidate: None,
            window: None,
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// `point + translate` (or `translate - point` when `negate_point`) lies in
/// `claim.sets[set]` at the certificate depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub set: usize,
    #[serde(with = "rational_str")]
    pub translate: Rational,
    #[serde(default)]
    pub negate_point: bool,
    #[serde(with = "rational_str")]
    pub value: Rational,
    pub holds: bool,
}

impl Membership {
    pub fn shifted(point: &Rational, translate: &Rational, negate_point: bool) -> Rational {
        if negate_point {
            translate - point
        } else {
            point + translate
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEvidence {
    pub digits: Vec<u64>,
    #[serde(with = "rational_str")]
    pub value: Rational,
    pub memberships: Vec<Membership>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: Claim,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub depth: usize,
    pub point: Option<PointEvidence>,
    pub residual: Option<Vec<Interval>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Certificate>,
    pub elapsed_ms: u64,
}

impl Certificate {
    fn new(claim: Claim, status: Status, depth: usize) -> Self {
        Certificate {
            claim,
            status,
            verdict: None,
            depth,
            point: None,
            residual: None,
            children: vec![],
            elapsed_ms: 0,
        }
    }

    fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = Some(verdict);
        self
    }

    fn timed(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Statuses of this certificate and all descendants.
    pub fn count_status(&self, status: Status) -> usize {
        usize::from(self.status == status) + self.children.iter().map(|c| c.count_status(status)).sum::<usize>()
    }
}

fn descriptor(expr: &DigitSetExpr) -> SetDescriptor {
    SetDescriptor::from_expr(expr)
}

/// How a certificate was re-verified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub method: String,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn pass(method: &str) -> Self {
        CheckReport { ok: true, method: method.into(), failures: vec![] }
    }

    fn fail(method: &str, why: String) -> Self {
        CheckReport { ok: false, method: method.into(), failures: vec![why] }
    }

    fn merge(mut self, other: CheckReport) -> Self {
        self.ok &= other.ok;
        if !self.method.contains(&other.method) {
            self.method = format!("{}+{}", self.method, other.method);
        }
        self.failures.extend(other.failures);
        self
    }
}

/// Re-verifies a certificate from its claim and evidence.
///
/// Empty intersections are recomputed by exact interval refinement when the
/// interval counts allow it, and otherwise replayed by the frontier search.
/// Points are re-checked membership by membership.
pub fn check(cert: &Certificate) -> Result<CheckReport> {
    let mut report = match (cert.claim.kind, cert.status) {
        (_, Status::InconclusiveAtDepth) => CheckReport::pass("inconclusive"),
        (ClaimKind::EmptyIntersection, Status::CertifiedEmpty) => {
            let set = cert.claim.sets.first().ok_or_else(|| Error::Parse("claim has no set".into()))?.build()?;
            empty::independent_check(&set, &cert.claim.translates, &cert.claim.pads, cert.depth)?
        }
        (ClaimKind::AvoidingPairs, Status::CertifiedEmpty) => avoid::check_pairs(cert)?,
        (ClaimKind::IfsFixedPoint, _) => haar::check_fixed_point(cert)?,
        (ClaimKind::CarryPoint, Status::PointFound) => check_point(cert)?.merge(carry::check_carry(cert)?),
        (_, Status::PointFound) => check_point(cert)?,
        (ClaimKind::HaarN | ClaimKind::GapSequence, Status::CertifiedEmpty) => CheckReport::pass("children"),
        (kind, status) => CheckReport::fail("shape", format!("{kind:?} cannot carry {status:?}")),
    };
    for child in &cert.children {
        report = report.merge(check(child)?);
    }
    Ok(report)
}

fn check_point(cert: &Certificate) -> Result<CheckReport> {
    let point = cert.point.as_ref().ok_or_else(|| Error::Parse("POINT_FOUND without a point".into()))?;
    let sets: Vec<DigitSetExpr> = cert.claim.sets.iter().map(|d| d.build()).collect::<Result<_>>()?;
    let mut report = CheckReport::pass("membership");
    if point.memberships.is_empty() && !cert.claim.translates.is_empty() {
        report = report.merge(CheckReport::fail("membership", "no memberships recorded".into()));
    }
    for m in &point.memberships {
        let v = Membership::shifted(&point.value, &m.translate, m.negate_point);
        let set = sets.get(m.set).ok_or_else(|| Error::Parse(format!("membership names set {}", m.set)))?;
        let inside = set.contains_point(cert.depth, &v)?;
        let in_window = cert.claim.window.as_ref().is_none_or(|w| w.contains(&v));
        if v != m.value || !m.holds || !inside || !in_window {
            report = report.merge(CheckReport::fail(
                "membership",
                format!(
                    "{} + {} fails",
                    crate::numeric::format_rational(&point.value),
                    crate::numeric::format_rational(&m.translate)
                ),
            ));
        }
    }
    Ok(report)
}
