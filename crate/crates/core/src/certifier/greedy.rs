//! Greedy common points: digits chosen level by level so that, for every
//! translate, both cells the shifted point can fall into avoid the excluded
//! family of that level.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{descriptor, Certificate, Claim, ClaimKind, Membership, PointEvidence, Status, Verdict};
use crate::constructions::cl_set;
use crate::digits::{decode_cell, l_set, m_l, pow3, DigitSetExpr, FamilyKind, FAMILY_MAX_LEVEL};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::{floor_int, format_rational, rat, recip, DigitWord, MixedRadixSystem, RadixRule, Rational};

/// Excluded cells and digit pools of one greedy construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyRule {
    /// `Z^n_l` for `n >= l`: level-`n` digit in the block `m_l` of width
    /// `3^(n-l)`. Pools are the digits of `C_l`.
    ClBlock { l: usize },
    /// Translate `i` avoids `T^k_i` for `k >= i`. Pools are `L_k`.
    NotIdealT,
    /// Middle digit `m+1` of a radix-`2m+3` level. Pools are `m+2..=2m+2`.
    NullMeager,
}

impl GreedyRule {
    fn check_system(&self, system: &MixedRadixSystem, depth: usize) -> Result<()> {
        let fits = match self {
            GreedyRule::ClBlock { .. } => system.same_radices(&MixedRadixSystem::cl()),
            GreedyRule::NotIdealT => {
                if depth > FAMILY_MAX_LEVEL + 1 {
                    return Err(Error::InvalidParams(format!("depth {depth} exceeds the family tables")));
                }
                system.same_radices(&MixedRadixSystem::cl())
            }
            GreedyRule::NullMeager => matches!(system.rule, RadixRule::NullMeager { .. }),
        };
        if !fits {
            return Err(Error::SystemMismatch);
        }
        system.check_depth(depth)
    }

    fn pool(&self, radix: u64, level: usize) -> Vec<u64> {
        match *self {
            GreedyRule::ClBlock { l } => (0..radix).filter(|&d| level < l || d / pow3(level - l) != m_l(l)).collect(),
            GreedyRule::NotIdealT => l_set(level).to_vec(),
            GreedyRule::NullMeager => (radix.div_ceil(2)..radix).collect(),
        }
    }

    /// Whether the cell with these digits (one per level up to `level`)
    /// lies in the family translate `index` must avoid at `level`.
    fn excludes(&self, index: usize, level: usize, digits: &[u64], radix: u64) -> bool {
        let d = digits[level];
        match *self {
            GreedyRule::ClBlock { l } => level >= l && d / pow3(level - l) == m_l(l),
            GreedyRule::NotIdealT => {
                level >= index
                    && d / pow3(level - index) == m_l(index)
                    && (0..index).all(|m| l_set(m).binary_search(&digits[m]).is_ok())
            }
            GreedyRule::NullMeager => d == (radix - 1) / 2,
        }
    }
}

fn check_translates(translates: &[Rational]) -> Result<()> {
    match translates.iter().find(|t| t.is_negative() || **t >= rat(1, 1)) {
        Some(t) => Err(Error::Precondition(format!("translate {} is outside [0,1)", format_rational(t)))),
        None => Ok(()),
    }
}

/// Digits `0..depth`: `forced` first, then the smallest pool digit whose
/// shifted cells `p` and `p + 1` avoid every excluded family.
fn greedy_digits(
    rule: GreedyRule,
    system: &MixedRadixSystem,
    translates: &[Rational],
    forced: &[u64],
    depth: usize,
) -> Result<Vec<u64>> {
    rule.check_system(system, depth)?;
    check_translates(translates)?;
    if forced.len() > depth {
        return Err(Error::InsufficientDepth(format!("prefix of length {} exceeds depth {depth}", forced.len())));
    }
    let counts: Vec<BigInt> = system.cell_counts(depth).into_iter().map(BigInt::from).collect();
    let mut digits = Vec::with_capacity(depth);
    let mut cell = BigInt::zero();
    for level in 0..depth {
        let radix = system.radix(level);
        if let Some(&d) = forced.get(level) {
            if d >= radix {
                return Err(Error::InvalidDigit { level, digit: d, radix });
            }
            digits.push(d);
            cell = cell * radix + d;
            continue;
        }
        let q = &counts[level + 1];
        let qr = Rational::from_integer(q.clone());
        let shifts: Vec<BigInt> = translates.iter().map(|t| floor_int(&(t * &qr))).collect();
        let blocked = |p: &BigInt, index: usize| {
            if p.is_negative() || p >= q {
                return true;
            }
            rule.excludes(index, level, &decode_cell(system, level + 1, p), radix)
        };
        let base = &cell * radix;
        let pick = rule.pool(radix, level).into_iter().find(|&d| {
            let own = &base + d;
            shifts.iter().enumerate().all(|(index, s)| {
                let p = &own + s;
                !blocked(&p, index) && !blocked(&(&p + 1), index)
            })
        });
        let d = pick.ok_or(Error::NoAdmissibleDigit { level })?;
        digits.push(d);
        cell = base + d;
    }
    Ok(digits)
}

/// One membership to certify: `point + translate` (or `translate - point`)
/// lies in `sets[set]`.
struct Target {
    set: usize,
    translate: Rational,
    negate_point: bool,
}

impl Target {
    fn plus(translate: &Rational) -> Self {
        Target { set: 0, translate: translate.clone(), negate_point: false }
    }
}

fn point_certificate(
    claim: Claim,
    sets: &[DigitSetExpr],
    digits: Vec<u64>,
    value: Rational,
    targets: &[Target],
    depth: usize,
    start: Instant,
) -> Result<Certificate> {
    let memberships = targets
        .iter()
        .map(|t| {
            let v = Membership::shifted(&value, &t.translate, t.negate_point);
            let inside = sets[t.set].contains_point(depth, &v)?;
            let in_window = claim.window.as_ref().is_none_or(|w| w.contains(&v));
            Ok(Membership {
                set: t.set,
                translate: t.translate.clone(),
                negate_point: t.negate_point,
                value: v,
                holds: inside && in_window,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all = memberships.iter().all(|m| m.holds);
    let mut cert = if all {
        Certificate::new(claim, Status::PointFound, depth).with_verdict(Verdict::CommonPoint)
    } else {
        Certificate::new(claim, Status::InconclusiveAtDepth, depth).with_verdict(Verdict::Inconclusive)
    };
    cert.point = Some(PointEvidence { digits, value, memberships });
    Ok(cert.timed(start))
}

fn word_value(system: &MixedRadixSystem, digits: &[u64]) -> Result<Rational> {
    Ok(DigitWord::new(system.clone(), digits.to_vec())?.value())
}

/// Closed cell `[S, S + width / q(lh(s) - 1)]` of a nonempty prefix `s`.
fn prefix_window(system: &MixedRadixSystem, prefix: &[u64], width: i64) -> Result<Option<Interval>> {
    if prefix.is_empty() {
        return Ok(None);
    }
    let lo = word_value(system, prefix)?;
    let hi = &lo + recip(&system.q(prefix.len() - 1)) * rat(width, 1);
    Ok(Some(Interval::new(lo, hi)?))
}

/// Greedy point of `⋂_j (set - translates[j])`, starting from the digits
/// in `prefix`.
pub fn greedy_common_point(
    rule: GreedyRule,
    set: &DigitSetExpr,
    translates: &[Rational],
    prefix: &[u64],
    depth: usize,
) -> Result<Certificate> {
    let start = Instant::now();
    let system = set.system();
    let digits = greedy_digits(rule, system, translates, prefix, depth)?;
    let value = word_value(system, &digits)?;
    let mut claim = Claim::new(ClaimKind::CommonPoint, vec![descriptor(set)]).param("rule", format!("{rule:?}"));
    claim.translates = translates.to_vec();
    let targets: Vec<Target> = translates.iter().map(Target::plus).collect();
    point_certificate(claim, std::slice::from_ref(set), digits, value, &targets, depth, start)
}

/// A point `c` of `C_l` inside the cell of `prefix` with `c + d` in `C_l`
/// for every `d` in `translates`.
pub fn cl_common_point(l: usize, prefix: &[u64], translates: &[Rational], depth: usize) -> Result<Certificate> {
    let start = Instant::now();
    let set = cl_set(l)?;
    let system = set.system();
    let digits = greedy_digits(GreedyRule::ClBlock { l }, system, translates, prefix, depth)?;
    let value = word_value(system, &digits)?;
    let mut claim = Claim::new(ClaimKind::CommonPoint, vec![descriptor(&set)])
        .param("rule", format!("{:?}", GreedyRule::ClBlock { l }))
        .param("prefix", format!("{prefix:?}"));
    claim.translates = translates.to_vec();
    claim.window = prefix_window(system, prefix, 2)?;
    let zero = rat(0, 1);
    let targets: Vec<Target> = std::iter::once(&zero).chain(translates).map(Target::plus).collect();
    point_certificate(claim, std::slice::from_ref(&set), digits, value, &targets, depth, start)
}

/// A point `r` with `r + c_i` in `X` for every `c_i`, for decreasing
/// `c_0 < 12/25`, `c_i < 1/q(i-1)`.
pub fn refute_haar_finite_x(translates: &[Rational], depth: usize) -> Result<Certificate> {
    greedy_common_point(GreedyRule::NotIdealT, &DigitSetExpr::family(FamilyKind::X, 0), translates, &[], depth)
}

/// A point `x` with `s_i - x ∈ X ∪ -X` for the first `count` terms `s_i`
/// of a strictly monotone sequence converging to `limit`.
///
/// A decreasing sequence is handled in `X`, an increasing one in `-X`.
pub fn refute_null_finite(sequence: &[Rational], limit: &Rational, count: usize, depth: usize) -> Result<Certificate> {
    let start = Instant::now();
    let x = DigitSetExpr::family(FamilyKind::X, 0);
    let y = DigitSetExpr::union_of(vec![x.clone(), x.clone().reflect()])?;
    let terms =
        sequence.get(..count).ok_or_else(|| Error::Precondition(format!("sequence has fewer than {count} terms")))?;
    let decreasing = terms.windows(2).all(|w| w[0] > w[1]) && terms.iter().all(|s| s > limit);
    let increasing = terms.windows(2).all(|w| w[0] < w[1]) && terms.iter().all(|s| s < limit);
    if !decreasing && !increasing {
        return Err(Error::Precondition("terms must be strictly monotone on one side of the limit".into()));
    }
    let offsets: Vec<Rational> = terms.iter().map(|s| (s - limit).abs()).collect();
    let digits = greedy_digits(GreedyRule::NotIdealT, x.system(), &offsets, &[], depth)?;
    let r = word_value(x.system(), &digits)?;
    let point = if decreasing { limit - &r } else { limit + &r };
    let mut claim = Claim::new(ClaimKind::CommonPoint, vec![descriptor(&y)])
        .param("rule", format!("{:?}", GreedyRule::NotIdealT))
        .param("direction", if decreasing { "decreasing" } else { "increasing" })
        .param("limit", format_rational(limit));
    claim.translates = terms.to_vec();
    let targets: Vec<Target> =
        terms.iter().map(|s| Target { set: 0, translate: s.clone(), negate_point: true }).collect();
    point_certificate(claim, std::slice::from_ref(&y), digits, point, &targets, depth, start)
}

/// A point `x` with `x + e` in the null-meager `set` for every `e` in
/// `points`, built from `prefix` followed by a 0 digit.
///
/// Points are shifted so their minimum is 0 before the greedy run. With a
/// nonempty prefix every `x + e` must also lie in the prefix cell.
pub fn refute_haar_countable(
    set: &DigitSetExpr,
    points: &[Rational],
    prefix: &[u64],
    depth: usize,
) -> Result<Certificate> {
    let start = Instant::now();
    let system = set.system();
    let low = points.iter().min().cloned().unwrap_or_else(|| rat(0, 1));
    let shifted: Vec<Rational> = points.iter().map(|e| e - &low).collect();
    let mut forced = prefix.to_vec();
    forced.push(0);
    let digits = greedy_digits(GreedyRule::NullMeager, system, &shifted, &forced, depth)?;
    let value = word_value(system, &digits)? - &low;
    let mut claim = Claim::new(ClaimKind::CommonPoint, vec![descriptor(set)])
        .param("rule", format!("{:?}", GreedyRule::NullMeager))
        .param("prefix", format!("{prefix:?}"));
    claim.translates = points.to_vec();
    claim.window = prefix_window(system, prefix, 1)?;
    let targets: Vec<Target> = points.iter().map(Target::plus).collect();
    point_certificate(claim, std::slice::from_ref(set), digits, value, &targets, depth, start)
}
