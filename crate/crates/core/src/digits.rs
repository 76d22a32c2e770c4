//! Digit-constrained compact sets as level-indexed automata.
//!
//! A set is described by the digits it allows at each level of a
//! [`MixedRadixSystem`]. At depth `k` the set is covered by the closed cells
//! `[N/Q_k, (N+1)/Q_k]` (`Q_k = q(k-1)`) of its admissible `k`-digit
//! prefixes. Each expression is walked as an automaton: a cell carries one or
//! more [`NodeState`]s, and [`DigitSetExpr::runs`] lists the child digits it
//! allows, grouped into contiguous runs sharing a successor state.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{max_intervals, Interval, IntervalUnion};
use crate::numeric::{ceil_int, floor_int, DigitWord, MixedRadixSystem, RadixRule, Rational};

/// Inclusive digit range with the state reached by its digits.
pub type Run = (u64, u64, NodeState);

/// Allowed digits at a single level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelConstraint {
    Any,
    Only(Vec<u64>),
    Except(Vec<u64>),
    /// Excludes every digit `d` with `d / width == block`.
    ForbiddenBlock {
        block: u64,
        width: u64,
    },
    /// Keeps only the digits `d` with `d / width == block`.
    InBlock {
        block: u64,
        width: u64,
    },
}

fn singleton_runs(mut digits: Vec<u64>, radix: u64) -> Vec<(u64, u64)> {
    digits.retain(|&d| d < radix);
    digits.sort_unstable();
    digits.dedup();
    let mut out: Vec<(u64, u64)> = Vec::new();
    for d in digits {
        match out.last_mut() {
            Some(last) if last.1 + 1 == d => last.1 = d,
            _ => out.push((d, d)),
        }
    }
    out
}

/// Complement of sorted disjoint runs within `0..radix`.
fn complement_runs(runs: &[(u64, u64)], radix: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut next = 0u64;
    for &(lo, hi) in runs {
        if lo > next {
            out.push((next, lo - 1));
        }
        next = next.max(hi + 1);
    }
    if next < radix {
        out.push((next, radix - 1));
    }
    out
}

fn subtract_runs(a: &[(u64, u64)], b: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut j = 0;
    for &(lo, hi) in a {
        let mut cur = lo;
        while j < b.len() && b[j].1 < cur {
            j += 1;
        }
        let mut k = j;
        while cur <= hi {
            match b.get(k) {
                Some(&(blo, bhi)) if blo <= hi => {
                    if blo > cur {
                        out.push((cur, blo - 1));
                    }
                    cur = cur.max(bhi.saturating_add(1));
                    k += 1;
                }
                _ => {
                    out.push((cur, hi));
                    break;
                }
            }
        }
    }
    out
}

fn intersect_runs(a: &[(u64, u64)], b: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

impl LevelConstraint {
    /// Allowed digits as sorted disjoint inclusive runs.
    pub fn runs(&self, radix: u64) -> Vec<(u64, u64)> {
        match self {
            LevelConstraint::Any => vec![(0, radix - 1)],
            LevelConstraint::Only(set) => singleton_runs(set.clone(), radix),
            LevelConstraint::Except(set) => complement_runs(&singleton_runs(set.clone(), radix), radix),
            LevelConstraint::ForbiddenBlock { block, width } => {
                let start = block.saturating_mul(*width);
                if start >= radix {
                    return vec![(0, radix - 1)];
                }
                let end = start.saturating_add(*width).min(radix) - 1;
                complement_runs(&[(start, end)], radix)
            }
            LevelConstraint::InBlock { block, width } => {
                let start = block.saturating_mul(*width);
                if start >= radix {
                    return Vec::new();
                }
                vec![(start, start.saturating_add(*width).min(radix) - 1)]
            }
        }
    }

    pub fn allows(&self, digit: u64, radix: u64) -> bool {
        digit < radix
            && match self {
                LevelConstraint::Any => true,
                LevelConstraint::Only(set) => set.contains(&digit),
                LevelConstraint::Except(set) => !set.contains(&digit),
                LevelConstraint::ForbiddenBlock { block, width } => digit / width != *block,
                LevelConstraint::InBlock { block, width } => digit / width == *block,
            }
    }
}

/// Constraint applied past the explicitly listed levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    Free,
    /// Level `i` uses `pattern[i % pattern.len()]`.
    Periodic(Vec<LevelConstraint>),
    /// Levels `i >= l` forbid the block `m_l` of width `3^(i-l)`.
    ClBlock {
        l: usize,
    },
    /// In the null-meager system, level `i` of block `n` excludes digit `n+1`.
    NullMeagerExcludeMiddle,
}

impl TailRule {
    pub fn at(&self, level: usize, system: &MixedRadixSystem) -> Result<LevelConstraint> {
        Ok(match self {
            TailRule::Free => LevelConstraint::Any,
            TailRule::Periodic(p) => p[level % p.len()].clone(),
            TailRule::ClBlock { l } if level < *l => LevelConstraint::Any,
            TailRule::ClBlock { l } => LevelConstraint::ForbiddenBlock { block: m_l(*l), width: pow3(level - l) },
            TailRule::NullMeagerExcludeMiddle => match &system.rule {
                RadixRule::NullMeager { schedule } => {
                    LevelConstraint::Except(vec![schedule.block_of(level) as u64 + 1])
                }
                _ => return Err(Error::InvalidParams("null-meager tail needs a null-meager system".into())),
            },
        })
    }
}

pub fn pow3(e: usize) -> u64 {
    3u64.checked_pow(e as u32).expect("3^e overflows u64")
}

/// `m_l = (25 * 3^l - 1) / 2`.
pub fn m_l(l: usize) -> u64 {
    (25 * pow3(l) - 1) / 2
}

/// Deepest level the not-ideal family tables are built for.
pub const FAMILY_MAX_LEVEL: usize = 24;

/// Per-level tables of the not-ideal family.
#[derive(Debug)]
pub struct FamilyLevel {
    /// `L_n`, sorted.
    pub l: Vec<u64>,
    /// Digits allowed as the first digit outside `L`: not in `L_n`, not `m_n`.
    pub escape_x: Vec<(u64, u64)>,
    /// Digits `x` with `dist(x - h, L_n) <= 1` or `dist(x + h, L_n) <= 1`,
    /// `h = floor(m_n / 2)`.
    pub b_set: Vec<(u64, u64)>,
    pub escape_a: Vec<(u64, u64)>,
    pub escape_b: Vec<(u64, u64)>,
}

fn build_family_level(n: usize) -> FamilyLevel {
    let l = if n == 0 {
        vec![8, 10]
    } else {
        let prev = &family_level(n - 1).l;
        let mut v: Vec<u64> = prev.iter().flat_map(|&x| [3 * x, 3 * x + 2]).collect();
        v.sort_unstable();
        v
    };
    let radix = 25 * pow3(n);
    let m = m_l(n);
    let h = m / 2;
    let mut forbid = l.clone();
    forbid.push(m);
    let escape_x = complement_runs(&singleton_runs(forbid, radix), radix);
    let mut near = Vec::with_capacity(l.len() * 6);
    for &x in &l {
        for c in [x + h, x.wrapping_sub(h)] {
            for d in [c.wrapping_sub(1), c, c + 1] {
                if d < radix {
                    near.push(d);
                }
            }
        }
    }
    let b_set = singleton_runs(near, radix);
    let escape_a = subtract_runs(&escape_x, &b_set);
    let escape_b = intersect_runs(&escape_x, &b_set);
    FamilyLevel { l, escape_x, b_set, escape_a, escape_b }
}

/// Cached tables for level `n`, built on first use.
pub fn family_level(n: usize) -> &'static FamilyLevel {
    static LEVELS: [OnceLock<FamilyLevel>; FAMILY_MAX_LEVEL + 1] = [const { OnceLock::new() }; FAMILY_MAX_LEVEL + 1];
    assert!(n <= FAMILY_MAX_LEVEL, "family tables stop at level {FAMILY_MAX_LEVEL}");
    LEVELS[n].get_or_init(|| build_family_level(n))
}

/// `L_n`.
pub fn l_set(n: usize) -> &'static [u64] {
    &family_level(n).l
}

/// Which member of the not-ideal family a [`DigitSetExpr::Family`] denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// All-`L` sequences together with every `X_n`.
    X,
    /// `X` with the `B` escape digits removed.
    A,
    /// Escapes restricted to the `B` digits.
    B,
}

impl FamilyKind {
    fn escape(self, level: &FamilyLevel) -> &[(u64, u64)] {
        match self {
            FamilyKind::X => &level.escape_x,
            FamilyKind::A => &level.escape_a,
            FamilyKind::B => &level.escape_b,
        }
    }
}

/// Automaton state attached to a cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeState {
    Plain,
    /// Every digit so far lies in its `L` set.
    AllL,
    /// First non-`L` digit was at this level.
    Escaped(usize),
    /// State of the given member of a union.
    Member(usize, Box<NodeState>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DigitSetExpr {
    Product {
        system: MixedRadixSystem,
        levels: Vec<LevelConstraint>,
        tail: TailRule,
    },
    Union {
        system: MixedRadixSystem,
        members: Vec<DigitSetExpr>,
    },
    Reflect(Box<DigitSetExpr>),
    /// Countable union `X_0 ∪ X_1 ∪ ... ∪ {all digits in L}` (or its `A`/`B`
    /// parts). Members that escape at a level `>= k` project at depth `k`
    /// onto exactly the all-`L` cells, since every later escape set is
    /// nonempty; [`DigitSetExpr::project`] re-checks that nonemptiness.
    /// Escapes before `min_escape` are disallowed.
    Family {
        system: MixedRadixSystem,
        kind: FamilyKind,
        min_escape: usize,
    },
}

impl DigitSetExpr {
    pub fn product(system: MixedRadixSystem, levels: Vec<LevelConstraint>, tail: TailRule) -> Result<Self> {
        if let TailRule::Periodic(p) = &tail {
            if p.is_empty() {
                return Err(Error::InvalidParams("periodic tail needs a pattern".into()));
            }
        }
        let expr = DigitSetExpr::Product { system, levels, tail };
        let horizon = match &expr {
            DigitSetExpr::Product { levels, tail: TailRule::Periodic(p), .. } => levels.len() + p.len(),
            DigitSetExpr::Product { levels, .. } => levels.len() + 1,
            _ => unreachable!(),
        };
        for level in 0..horizon {
            if expr.system().checked_radix(level).is_err() {
                break;
            }
            if expr.level_runs(level)?.is_empty() {
                return Err(Error::InvalidParams(format!("level {level} allows no digit")));
            }
        }
        Ok(expr)
    }

    pub fn family(kind: FamilyKind, min_escape: usize) -> Self {
        DigitSetExpr::Family { system: MixedRadixSystem::not_ideal(), kind, min_escape }
    }

    pub fn system(&self) -> &MixedRadixSystem {
        match self {
            DigitSetExpr::Product { system, .. }
            | DigitSetExpr::Union { system, .. }
            | DigitSetExpr::Family { system, .. } => system,
            DigitSetExpr::Reflect(inner) => inner.system(),
        }
    }

    pub fn reflect(self) -> Self {
        match self {
            DigitSetExpr::Reflect(inner) => *inner,
            other => DigitSetExpr::Reflect(Box::new(other)),
        }
    }

    pub fn union_of(members: Vec<DigitSetExpr>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::Precondition("union needs at least one member".into()))?;
        let system = first.system().clone();
        if members.iter().any(|m| !m.system().same_radices(&system)) {
            return Err(Error::SystemMismatch);
        }
        Ok(DigitSetExpr::Union { system, members })
    }

    /// Constraint of a product node at `level`.
    pub fn constraint_at(&self, level: usize) -> Result<LevelConstraint> {
        match self {
            DigitSetExpr::Product { system, levels, tail } => match levels.get(level) {
                Some(c) => Ok(c.clone()),
                None => tail.at(level, system),
            },
            _ => Err(Error::Precondition("only product sets have per-level constraints".into())),
        }
    }

    fn level_runs(&self, level: usize) -> Result<Vec<(u64, u64)>> {
        let radix = self.system().checked_radix(level)?;
        Ok(self.constraint_at(level)?.runs(radix))
    }

    /// Root cells at depth 0 with their initial states.
    pub fn roots(&self) -> Vec<(i64, NodeState)> {
        match self {
            DigitSetExpr::Product { .. } => vec![(0, NodeState::Plain)],
            DigitSetExpr::Family { .. } => vec![(0, NodeState::AllL)],
            DigitSetExpr::Reflect(inner) => inner.roots().into_iter().map(|(c, s)| (-c - 1, s)).collect(),
            DigitSetExpr::Union { members, .. } => members
                .iter()
                .enumerate()
                .flat_map(|(i, m)| m.roots().into_iter().map(move |(c, s)| (c, NodeState::Member(i, Box::new(s)))))
                .collect(),
        }
    }

    /// Digits allowed at `level` from `state`, as runs sorted by lower end.
    pub fn runs(&self, state: &NodeState, level: usize) -> Result<Vec<Run>> {
        match (self, state) {
            (DigitSetExpr::Product { .. }, NodeState::Plain) => {
                Ok(self.level_runs(level)?.into_iter().map(|(lo, hi)| (lo, hi, NodeState::Plain)).collect())
            }
            (DigitSetExpr::Reflect(inner), s) => {
                let top = self.system().checked_radix(level)? - 1;
                let mut out: Vec<Run> =
                    inner.runs(s, level)?.into_iter().map(|(lo, hi, next)| (top - hi, top - lo, next)).collect();
                out.reverse();
                Ok(out)
            }
            (DigitSetExpr::Union { members, .. }, NodeState::Member(i, s)) => Ok(members[*i]
                .runs(s, level)?
                .into_iter()
                .map(|(lo, hi, next)| (lo, hi, NodeState::Member(*i, Box::new(next))))
                .collect()),
            (DigitSetExpr::Family { kind, min_escape, .. }, NodeState::AllL) => {
                if level > FAMILY_MAX_LEVEL {
                    return Err(Error::UnprojectableFamily);
                }
                let table = family_level(level);
                let mut out: Vec<Run> = table.l.iter().map(|&d| (d, d, NodeState::AllL)).collect();
                if level >= *min_escape {
                    out.extend(kind.escape(table).iter().map(|&(lo, hi)| (lo, hi, NodeState::Escaped(level))));
                    out.sort_unstable_by_key(|r| r.0);
                }
                Ok(out)
            }
            (DigitSetExpr::Family { .. }, NodeState::Escaped(p)) => {
                let radix = self.system().checked_radix(level)?;
                let block = LevelConstraint::ForbiddenBlock { block: m_l(*p), width: pow3(level - p) };
                Ok(block.runs(radix).into_iter().map(|(lo, hi)| (lo, hi, NodeState::Escaped(*p))).collect())
            }
            _ => Err(Error::Precondition(format!("state {state:?} does not belong to this set"))),
        }
    }

    /// Successor states of `state` under `digit`.
    pub fn step(&self, state: &NodeState, level: usize, digit: u64) -> Result<Option<NodeState>> {
        let runs = self.runs(state, level)?;
        let idx = runs.partition_point(|r| r.1 < digit);
        Ok(runs.get(idx).filter(|r| r.0 <= digit).map(|r| r.2.clone()))
    }

    /// Fails with [`Error::UnprojectableFamily`] when a family member that
    /// should stand in for all later members is empty at some level.
    fn check_collapse(&self, depth: usize) -> Result<()> {
        match self {
            DigitSetExpr::Family { kind, .. } => {
                if depth > FAMILY_MAX_LEVEL + 1 {
                    return Err(Error::UnprojectableFamily);
                }
                for level in 0..depth {
                    let table = family_level(level);
                    if table.l.is_empty() || kind.escape(table).is_empty() {
                        return Err(Error::UnprojectableFamily);
                    }
                }
                Ok(())
            }
            DigitSetExpr::Reflect(inner) => inner.check_collapse(depth),
            DigitSetExpr::Union { members, .. } => members.iter().try_for_each(|m| m.check_collapse(depth)),
            DigitSetExpr::Product { .. } => Ok(()),
        }
    }

    /// States alive on the depth-`depth` cell with index `cell`.
    pub fn cell_states(&self, depth: usize, cell: &BigInt) -> Result<Vec<NodeState>> {
        let system = self.system();
        system.check_depth(depth)?;
        let counts = system.cell_counts(depth);
        let q = BigInt::from(counts[depth].clone());
        let mut out = Vec::new();
        for (root, state) in self.roots() {
            let rel = cell - BigInt::from(root) * &q;
            if rel.is_negative() || rel >= q {
                continue;
            }
            let digits = decode_cell(system, depth, &rel);
            let mut states = vec![state];
            for (level, &d) in digits.iter().enumerate() {
                let mut next = Vec::new();
                for s in &states {
                    if let Some(n) = self.step(s, level, d)? {
                        next.push(n);
                    }
                }
                states = next;
                if states.is_empty() {
                    break;
                }
            }
            out.extend(states);
        }
        Ok(out)
    }

    pub fn is_admissible_cell(&self, depth: usize, cell: &BigInt) -> Result<bool> {
        Ok(!self.cell_states(depth, cell)?.is_empty())
    }

    /// Whether `word` is a prefix of the digit sequence of some member.
    pub fn is_admissible_prefix(&self, word: &DigitWord) -> Result<bool> {
        if !word.system.same_radices(self.system()) {
            return Err(Error::SystemMismatch);
        }
        self.is_admissible_cell(word.len(), &BigInt::from(word.cell_index()))
    }

    /// Whether `v` lies in the depth-`depth` projection.
    pub fn contains_point(&self, depth: usize, v: &Rational) -> Result<bool> {
        self.system().check_depth(depth)?;
        let q = self.system().cell_counts(depth).pop().unwrap();
        let scaled = v * Rational::from_integer(BigInt::from(q));
        let cell = floor_int(&scaled);
        if self.is_admissible_cell(depth, &cell)? {
            return Ok(true);
        }
        Ok(scaled.is_integer() && self.is_admissible_cell(depth, &(cell - 1))?)
    }

    /// Union of the closed cells of all admissible `depth`-digit prefixes.
    pub fn project(&self, depth: usize) -> Result<IntervalUnion> {
        self.project_window(depth, None)
    }

    /// Like [`Self::project`], restricted to the cells meeting `window`.
    pub fn project_window(&self, depth: usize, window: Option<&Interval>) -> Result<IntervalUnion> {
        let system = self.system();
        system.check_depth(depth)?;
        self.check_collapse(depth)?;
        let counts: Vec<BigInt> = system.cell_counts(depth).into_iter().map(BigInt::from).collect();
        let bounds: Option<Vec<(BigInt, BigInt)>> = window.map(|w| {
            counts
                .iter()
                .map(|q| {
                    let lo = -(-(w.lo.numer() * q)).div_floor(w.lo.denom()) - 1;
                    (lo, (w.hi.numer() * q).div_floor(w.hi.denom()))
                })
                .collect()
        });
        let clip = |j: usize, lo: BigInt, hi: BigInt| -> Option<(BigInt, BigInt)> {
            let (lo, hi) = match &bounds {
                Some(b) => (lo.max(b[j].0.clone()), hi.min(b[j].1.clone())),
                None => (lo, hi),
            };
            (lo <= hi).then_some((lo, hi))
        };

        let cap = max_intervals();
        let mut raw: Vec<(BigInt, BigInt)> = Vec::new();
        let mut emit = |lo: BigInt, hi: BigInt| -> Result<()> {
            if let Some(last) = raw.last_mut() {
                if last.1.clone() + 1 >= lo && lo >= last.0 {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    return Ok(());
                }
            }
            raw.push((lo, hi));
            if raw.len() > cap {
                return Err(Error::CapacityExceeded { count: raw.len(), cap });
            }
            Ok(())
        };

        let mut stack: Vec<(usize, BigInt, NodeState)> = Vec::new();
        for (root, state) in self.roots().into_iter().rev() {
            let root = BigInt::from(root);
            if clip(0, root.clone(), root.clone()).is_some() {
                stack.push((0, root, state));
            }
        }
        while let Some((j, cell, state)) = stack.pop() {
            if j == depth {
                emit(cell.clone(), cell)?;
                continue;
            }
            let radix = system.radix(j);
            let base = &cell * radix;
            let mut children = Vec::new();
            for (lo, hi, next) in self.runs(&state, j)? {
                let Some((a, b)) = clip(j + 1, &base + lo, &base + hi) else {
                    continue;
                };
                if j + 1 == depth {
                    emit(a, b)?;
                    continue;
                }
                let mut c = a;
                while c <= b {
                    children.push((j + 1, c.clone(), next.clone()));
                    c += 1;
                    if children.len() > cap {
                        return Err(Error::CapacityExceeded { count: children.len(), cap });
                    }
                }
            }
            stack.extend(children.into_iter().rev());
        }
        let q = &counts[depth];
        Ok(IntervalUnion::from_intervals(
            raw.into_iter()
                .map(|(lo, hi)| Interval { lo: Rational::new(lo, q.clone()), hi: Rational::new(hi + 1, q.clone()) })
                .collect(),
        ))
    }
}

/// Digits of the cell `rel` (`0 <= rel < Q_depth`) at depth `depth`.
pub fn decode_cell(system: &MixedRadixSystem, depth: usize, rel: &BigInt) -> Vec<u64> {
    let mut digits = vec![0u64; depth];
    let mut rest = rel.clone();
    for level in (0..depth).rev() {
        let (q, r) = rest.div_rem(&BigInt::from(system.radix(level)));
        digits[level] = r.to_u64().expect("digit fits");
        rest = q;
    }
    debug_assert!(rest.is_zero());
    digits
}

/// `[lo, hi]` cell indices at depth `depth` of `[N/Q, (N+1)/Q]` cells meeting `[a, b]`.
pub fn cell_range(q: &BigInt, a: &Rational, b: &Rational) -> (BigInt, BigInt) {
    let qr = Rational::from_integer(q.clone());
    (ceil_int(&(a * &qr)) - BigInt::one(), floor_int(&(b * &qr)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn cantor() -> DigitSetExpr {
        DigitSetExpr::product(
            MixedRadixSystem::constant(3),
            vec![],
            TailRule::Periodic(vec![LevelConstraint::Only(vec![0, 2])]),
        )
        .unwrap()
    }

    fn c0() -> DigitSetExpr {
        DigitSetExpr::product(MixedRadixSystem::cl(), vec![], TailRule::ClBlock { l: 0 }).unwrap()
    }

    fn iu(v: &[(i64, i64, i64, i64)]) -> IntervalUnion {
        IntervalUnion::normalize(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(cantor().project(1).unwrap(), iu(&[(0, 1, 1, 3), (2, 3, 1, 1)]));
        let expected = iu(&[(0, 1, 12, 25), (13, 25, 1, 1)]);
        assert_eq!(c0().project(1).unwrap(), expected);
        assert_eq!(DigitSetExpr::family(FamilyKind::X, 0).project(1).unwrap(), expected);
        assert_eq!(cantor().project(0).unwrap(), iu(&[(0, 1, 1, 1)]));
    }

    #[test]
    fn prefix_examples() {
        let c3 = MixedRadixSystem::constant(3);
        let w = |d: &[u64]| DigitWord::new(c3.clone(), d.to_vec()).unwrap();
        assert!(cantor().is_admissible_prefix(&w(&[0, 2])).unwrap());
        assert!(!cantor().is_admissible_prefix(&w(&[1])).unwrap());
        let word = DigitWord::new(MixedRadixSystem::cl(), vec![12]).unwrap();
        assert!(!c0().is_admissible_prefix(&word).unwrap());
    }

    #[test]
    fn reflect_and_union() {
        let r = cantor().reflect();
        assert_eq!(r.project(1).unwrap(), iu(&[(-1, 1, -2, 3), (-1, 3, 0, 1)]));
        assert_eq!(r.project(3).unwrap(), cantor().project(3).unwrap().negate());
        assert_eq!(r.clone().reflect(), cantor());
        let u = DigitSetExpr::union_of(vec![cantor()]).unwrap();
        assert_eq!(u.project(3).unwrap(), cantor().project(3).unwrap());
        assert!(matches!(DigitSetExpr::union_of(vec![cantor(), c0()]), Err(Error::SystemMismatch)));
        let both = DigitSetExpr::union_of(vec![cantor(), cantor().reflect()]).unwrap();
        assert_eq!(both.project(2).unwrap(), cantor().project(2).unwrap().union(&r.project(2).unwrap()));
    }

    #[test]
    fn l_sets_and_b_digits() {
        assert_eq!(l_set(0), &[8, 10]);
        assert_eq!(l_set(1), &[24, 26, 30, 32]);
        let t0 = family_level(0);
        // h_0 = 6: L_0 + 6 ± 1 = 13..17 and L_0 - 6 ± 1 = 1..5
        assert_eq!(t0.b_set, vec![(1, 5), (13, 17)]);
        assert_eq!(t0.escape_x, vec![(0, 7), (9, 9), (11, 11), (13, 24)]);
        assert_eq!(t0.escape_b, vec![(1, 5), (13, 17)]);
    }

    #[test]
    fn contains_point_checks_both_adjacent_cells() {
        // 1/3 is the right end of the cell [0, 1/3] and the left end of the
        // forbidden cell [1/3, 2/3]
        assert!(cantor().contains_point(1, &rat(1, 3)).unwrap());
        assert!(!cantor().contains_point(1, &rat(1, 2)).unwrap());
        assert!(cantor().contains_point(4, &rat(1, 4)).unwrap());
    }

    #[test]
    fn window_projection_is_a_restriction() {
        let w = Interval::new(rat(1, 5), rat(4, 5)).unwrap();
        let full = c0().project(2).unwrap();
        let part = c0().project_window(2, Some(&w)).unwrap();
        assert!(full.contains(&part));
        let wu = IntervalUnion::single(rat(1, 5), rat(4, 5)).unwrap();
        assert_eq!(part.intersect(&wu), full.intersect(&wu));
    }

    #[test]
    fn run_set_operations() {
        assert_eq!(subtract_runs(&[(0, 10)], &[(2, 3), (5, 5)]), vec![(0, 1), (4, 4), (6, 10)]);
        assert_eq!(intersect_runs(&[(0, 4), (8, 9)], &[(3, 8)]), vec![(3, 4), (8, 8)]);
        assert_eq!(complement_runs(&[(0, 0), (4, 5)], 6), vec![(1, 3)]);
    }
}
