//! Blockwise witness Cantor sets.
//!
//! A witness assigns to every binary branch `s` of length `n` (generation `n`)
//! a digit block occupying levels `k_(n-1) .. k_n`. Branch `s` is encoded as a
//! `u64` with `s_0` as the most significant of its `n` bits, so integer order
//! is lexicographic order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::digits::{m_l, pow3};
use crate::error::{Error, Result};
use crate::numeric::{recip, DigitWord, MixedRadixSystem, Rational, CL_MAX_LEVEL};

/// Longest block the witness will materialize.
pub const MAX_BLOCK_LEN: u128 = 1 << 22;

const X_BAR: [u64; 11] = [1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1];
const Y_BAR: [u64; 11] = [0, 2, 0, 0, 2, 1, 0, 2, 0, 0, 2];

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Lexicographic rank of a sorted `k`-subset of `0..universe`.
pub fn combination_rank(subset: &[u64], universe: u64) -> Result<u128> {
    let k = subset.len() as u64;
    let mut rank: u128 = 0;
    let mut prev: Option<u64> = None;
    for (i, &c) in subset.iter().enumerate() {
        if c >= universe || prev.is_some_and(|p| p >= c) {
            return Err(Error::InvalidParams(format!("{subset:?} is not a sorted subset of 0..{universe}")));
        }
        let start = prev.map_or(0, |p| p + 1);
        for skipped in start..c {
            rank += binomial(universe - skipped - 1, k - i as u64 - 1).ok_or_else(too_many)?;
        }
        prev = Some(c);
    }
    Ok(rank)
}

/// Inverse of [`combination_rank`].
pub fn combination_unrank(mut rank: u128, universe: u64, k: u64) -> Result<Vec<u64>> {
    let total = binomial(universe, k).ok_or_else(too_many)?;
    if rank >= total {
        return Err(Error::InvalidParams(format!("rank {rank} is beyond C({universe},{k}) = {total}")));
    }
    let mut out = Vec::with_capacity(k as usize);
    let mut c = 0;
    for i in 0..k {
        loop {
            let below = binomial(universe - c - 1, k - i - 1).ok_or_else(too_many)?;
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        c += 1;
    }
    Ok(out)
}

fn too_many() -> Error {
    Error::InvalidParams("combination count exceeds 128 bits".into())
}

/// Advances a sorted subset of `0..universe` to its lexicographic successor.
fn next_combination(c: &mut [u64], universe: u64) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < universe - (k - i) as u64 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Which `m_l` each generation serves: generation `start + i` uses
/// `l = cycle[i % cycle.len()]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WSchedule {
    pub start: usize,
    pub cycle: Vec<usize>,
}

impl WSchedule {
    pub fn new(start: usize, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidSchedule("empty cycle".into()));
        }
        for (i, &l) in cycle.iter().enumerate() {
            let n = start + i;
            let needed = 2 * m_l(l) + 2;
            if n >= 64 || (1u64 << n) < needed {
                return Err(Error::InvalidSchedule(format!(
                    "generation {n} serves m_{l} but 2^{n} < 2*{} + 2",
                    m_l(l)
                )));
            }
        }
        Ok(WSchedule { start, cycle })
    }

    /// `w_n = m_0` from generation 5 on.
    pub fn constant_m0() -> Self {
        WSchedule { start: 5, cycle: vec![0] }
    }

    pub fn l_at(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.start).map(|i| self.cycle[i % self.cycle.len()])
    }
}

/// Per-generation block recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum BlockScheme {
    /// Triples with `(0^12, x̄1, ȳ1)` in base 3.
    Ternary,
    /// `(2 m_l + 2)`-tuples of length-2 slots on the `C_l` system.
    Cl { l: usize },
    /// Marker digit `s_(n-1) * floor(m_(k_(n-1)) / 2)`, then `Cl`-style slots.
    NotIdealD { schedule: WSchedule },
    /// Marker `(s_(n-1), 0)`, then `Cl`-style slots.
    NotIdealE { schedule: WSchedule },
    /// Base 3, every block is `block_len - 1` zeros and then `2 s_(n-1)`.
    Avoiding { block_len: usize },
}

impl BlockScheme {
    pub fn system(&self) -> MixedRadixSystem {
        match self {
            BlockScheme::Ternary | BlockScheme::Avoiding { .. } => MixedRadixSystem::constant(3),
            BlockScheme::Cl { .. } => MixedRadixSystem::cl(),
            BlockScheme::NotIdealD { .. } | BlockScheme::NotIdealE { .. } => MixedRadixSystem::not_ideal(),
        }
    }

    pub fn first_generation(&self) -> usize {
        match self {
            BlockScheme::Ternary | BlockScheme::Avoiding { .. } => 1,
            BlockScheme::Cl { l } => {
                let needed = 2 * m_l(*l) + 2;
                (0..64).find(|&n| (1u64 << n) >= needed).expect("m_l fits in u64")
            }
            BlockScheme::NotIdealD { schedule } | BlockScheme::NotIdealE { schedule } => schedule.start,
        }
    }

    /// The `l` whose `m_l` generation `n` serves, if the scheme has slots.
    fn served_l(&self, n: usize) -> Option<usize> {
        match self {
            BlockScheme::Cl { l } => Some(*l),
            BlockScheme::NotIdealD { schedule } | BlockScheme::NotIdealE { schedule } => schedule.l_at(n),
            _ => None,
        }
    }

    pub fn tuple_size(&self, n: usize) -> u64 {
        match self {
            BlockScheme::Ternary if n >= 2 => 3,
            BlockScheme::Ternary | BlockScheme::Avoiding { .. } => 0,
            _ => self.served_l(n).map_or(0, |l| 2 * m_l(l) + 2),
        }
    }

    pub fn slot_length(&self, n: usize) -> usize {
        match self {
            BlockScheme::Ternary if n >= 2 => 12,
            BlockScheme::Ternary | BlockScheme::Avoiding { .. } => 0,
            _ => 2,
        }
    }

    /// Digits that precede the slots of a generation-`n` block.
    pub fn prefix_length(&self, n: usize) -> usize {
        match self {
            BlockScheme::Ternary if n == 1 => 1,
            BlockScheme::Ternary => 0,
            BlockScheme::Avoiding { block_len } => *block_len,
            BlockScheme::Cl { .. } => 0,
            BlockScheme::NotIdealD { .. } => 1,
            BlockScheme::NotIdealE { .. } => 2,
        }
    }

    pub fn slot_count(&self, n: usize) -> Result<u128> {
        if self.slot_length(n) == 0 {
            return Ok(0);
        }
        if n >= 64 {
            return Err(too_many());
        }
        binomial(1u64 << n, self.tuple_size(n)).ok_or_else(too_many)
    }

    pub fn generation_length(&self, n: usize) -> Result<u128> {
        let slots = self.slot_count(n)?;
        slots
            .checked_mul(self.slot_length(n) as u128)
            .and_then(|s| s.checked_add(self.prefix_length(n) as u128))
            .ok_or_else(too_many)
    }

    /// `k_n`, the first level after generation `n`.
    pub fn offset(&self, n: usize) -> Result<u128> {
        let first = self.first_generation();
        let mut k: u128 = 0;
        for g in first..=n {
            k = k.checked_add(self.generation_length(g)?).ok_or_else(too_many)?;
        }
        Ok(k)
    }

    fn check_generation(&self, n: usize) -> Result<()> {
        if n < self.first_generation() {
            return Err(Error::InvalidParams(format!(
                "generation {n} precedes the first generation {}",
                self.first_generation()
            )));
        }
        if let BlockScheme::NotIdealD { schedule } | BlockScheme::NotIdealE { schedule } = self {
            let l = schedule.l_at(n).expect("n >= start");
            if n >= 64 || (1u64 << n) < 2 * m_l(l) + 2 {
                return Err(Error::InvalidSchedule(format!("generation {n} cannot serve m_{l}")));
            }
        }
        Ok(())
    }

    fn prefix(&self, n: usize, branch: u64) -> Result<Vec<u64>> {
        let last = branch & 1;
        Ok(match self {
            BlockScheme::Ternary if n == 1 => vec![last],
            BlockScheme::Avoiding { block_len } => {
                let mut v = vec![0; *block_len];
                v[block_len - 1] = 2 * last;
                v
            }
            BlockScheme::NotIdealD { .. } => {
                let level = level_of(self.offset(n - 1)?)?;
                vec![last * (m_l(level) / 2)]
            }
            BlockScheme::NotIdealE { .. } => vec![last, 0],
            _ => vec![],
        })
    }

    /// First level of slot `p` in generation `n`.
    pub fn slot_level(&self, n: usize, p: u128) -> Result<u128> {
        let base = if n > self.first_generation() { self.offset(n - 1)? } else { 0 };
        (self.slot_length(n) as u128)
            .checked_mul(p)
            .and_then(|s| s.checked_add(base + self.prefix_length(n) as u128))
            .ok_or_else(too_many)
    }

    /// Digit blocks handed to the tuple members of slot `p`, in member order.
    pub fn slot_patterns(&self, n: usize, p: u128) -> Result<Vec<Vec<u64>>> {
        match self {
            BlockScheme::Ternary => {
                let mut x: Vec<u64> = X_BAR.to_vec();
                x.push(1);
                let mut y: Vec<u64> = Y_BAR.to_vec();
                y.push(1);
                Ok(vec![vec![0; 12], x, y])
            }
            _ => {
                let l = self.served_l(n).ok_or_else(|| Error::InvalidParams("scheme has no slots".into()))?;
                let a = level_of(self.slot_level(n, p)?)?;
                if a < l {
                    return Err(Error::InvalidParams(format!("slot level {a} is below l = {l}")));
                }
                if a + 1 >= CL_MAX_LEVEL {
                    return Err(Error::RadixOverflow { level: a + 1 });
                }
                let mut out = vec![vec![0, 0]];
                out.extend((0..=2 * m_l(l)).map(|j| vec![j * pow3(a - l), 25 * pow3(a + 1) - 1 - j]));
                Ok(out)
            }
        }
    }

    /// Smallest slot starting strictly above level `l` plus the generation
    /// prefix, so the slot clears the marker digits too.
    pub fn default_slot(&self, n: usize) -> Result<u128> {
        let Some(l) = self.served_l(n) else {
            return Ok(0);
        };
        let start = self.slot_level(n, 0)?;
        let floor = (l + self.prefix_length(n)) as u128 + 1;
        Ok(floor.saturating_sub(start).div_ceil(self.slot_length(n) as u128))
    }
}

fn level_of(v: u128) -> Result<usize> {
    usize::try_from(v).map_err(|_| too_many())
}

/// Labeled binary tree of increments `d_t`; `D = { Σ_n d_(α|n) }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tree", rename_all = "snake_case")]
pub enum IncrementTree {
    /// `d_t = 4 / 3^(lh(t)+1)` for `t` ending in 1, so `D = (2/3) C`.
    ScaledTernary { max_len: usize },
}

impl IncrementTree {
    pub fn scaled_ternary() -> Self {
        IncrementTree::ScaledTernary { max_len: 4096 }
    }

    pub fn max_len(&self) -> usize {
        match self {
            IncrementTree::ScaledTernary { max_len } => *max_len,
        }
    }

    pub fn increment(&self, t: &[bool]) -> Rational {
        match self {
            IncrementTree::ScaledTernary { .. } => match t.last() {
                Some(true) => Rational::new(BigInt::from(4), num_traits::pow(BigInt::from(3), t.len() + 1)),
                _ => Rational::zero(),
            },
        }
    }

    /// `Σ_n d_(path|n)` over the prefixes of `path`.
    pub fn point(&self, path: &[bool]) -> Rational {
        (1..=path.len()).map(|n| self.increment(&path[..n])).sum()
    }

    /// Upper bound on `Σ_(n > lh(path)) d_(α|n)` over all extensions.
    pub fn tail_bound(&self, path: &[bool]) -> Rational {
        match self {
            IncrementTree::ScaledTernary { .. } => {
                Rational::new(BigInt::from(2), num_traits::pow(BigInt::from(3), path.len() + 1))
            }
        }
    }
}

/// Sub-Cantor set `E ⊆ D` selected by the paths `t_s`, `s` ending in 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSubCantor {
    pub tree: IncrementTree,
    pub generations: usize,
    /// `t_s` keyed by `(lh(s), s)`.
    pub paths: HashMap<(usize, u64), Vec<bool>>,
}

impl SparseSubCantor {
    /// Path `α'` in the input tree realizing the branch `α` of length `n`.
    pub fn realizing_path(&self, n: usize, branch: u64) -> Vec<bool> {
        (1..=n)
            .rev()
            .find_map(|len| {
                let prefix = branch >> (n - len);
                (prefix & 1 == 1).then(|| self.paths[&(len, prefix)].clone())
            })
            .unwrap_or_default()
    }

    pub fn point(&self, n: usize, branch: u64) -> Rational {
        (1..=n)
            .filter_map(|len| {
                let prefix = branch >> (n - len);
                (prefix & 1 == 1).then(|| self.tree.increment(&self.paths[&(len, prefix)]))
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessScheme {
    Blocks(BlockScheme),
    Sparse(SparseSubCantor),
}

type BlockCache = RwLock<HashMap<(usize, u64), Arc<Vec<u64>>>>;

pub struct CantorWitness {
    pub system: MixedRadixSystem,
    pub scheme: WitnessScheme,
    cache: BlockCache,
}

impl fmt::Debug for CantorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CantorWitness").field("system", &self.system).field("scheme", &self.scheme).finish()
    }
}

impl Clone for CantorWitness {
    fn clone(&self) -> Self {
        CantorWitness::new(self.system.clone(), self.scheme.clone())
    }
}

/// Members of one slot, with their branch values truncated after the slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledTuple {
    pub generation: usize,
    pub slot: u128,
    pub members: Vec<u64>,
    pub translates: Vec<Rational>,
    /// Every tail beyond `last_level` adds less than this.
    pub pad: Rational,
    pub last_level: usize,
}

impl CantorWitness {
    fn new(system: MixedRadixSystem, scheme: WitnessScheme) -> Self {
        CantorWitness { system, scheme, cache: RwLock::new(HashMap::new()) }
    }

    pub fn from_scheme(scheme: BlockScheme) -> Self {
        CantorWitness::new(scheme.system(), WitnessScheme::Blocks(scheme))
    }

    pub fn block_scheme(&self) -> Option<&BlockScheme> {
        match &self.scheme {
            WitnessScheme::Blocks(s) => Some(s),
            WitnessScheme::Sparse(_) => None,
        }
    }

    fn blocks(&self) -> Result<&BlockScheme> {
        self.block_scheme().ok_or_else(|| Error::InvalidParams("witness has no digit blocks".into()))
    }

    pub fn first_generation(&self) -> usize {
        match &self.scheme {
            WitnessScheme::Blocks(s) => s.first_generation(),
            WitnessScheme::Sparse(_) => 0,
        }
    }

    pub fn offset(&self, n: usize) -> Result<u128> {
        self.blocks()?.offset(n)
    }

    /// Generation-`n` digit block of `branch` (its last `n` bits).
    pub fn block(&self, n: usize, branch: u64) -> Result<Arc<Vec<u64>>> {
        let scheme = self.blocks()?;
        scheme.check_generation(n)?;
        if n < 64 && branch >> n != 0 {
            return Err(Error::InvalidParams(format!("branch {branch} has more than {n} bits")));
        }
        if let Some(b) = self.cache.read().expect("cache lock").get(&(n, branch)) {
            return Ok(b.clone());
        }
        let len = scheme.generation_length(n)?;
        if len > MAX_BLOCK_LEN {
            return Err(Error::CapacityExceeded {
                count: usize::try_from(len).unwrap_or(usize::MAX),
                cap: MAX_BLOCK_LEN as usize,
            });
        }
        let mut digits = scheme.prefix(n, branch)?;
        let t = scheme.tuple_size(n);
        if scheme.slot_length(n) > 0 {
            let universe = 1u64 << n;
            let mut combo: Vec<u64> = (0..t).collect();
            let mut p: u128 = 0;
            loop {
                match combo.iter().position(|&c| c == branch) {
                    Some(r) => digits.extend_from_slice(&scheme.slot_patterns(n, p)?[r]),
                    None => digits.extend(std::iter::repeat_n(0, scheme.slot_length(n))),
                }
                p += 1;
                if !next_combination(&mut combo, universe) {
                    break;
                }
            }
        }
        let block = Arc::new(digits);
        // concurrent fills compute identical blocks, so the first insert wins
        let mut cache = self.cache.write().expect("cache lock");
        Ok(cache.entry((n, branch)).or_insert(block).clone())
    }

    /// Digits of `branch` on every level below `k_n`.
    pub fn branch_digits(&self, n: usize, branch: u64) -> Result<Vec<u64>> {
        let first = self.blocks()?.first_generation();
        let mut out = Vec::new();
        for g in first..=n {
            out.extend_from_slice(&self.block(g, branch >> (n - g))?);
        }
        Ok(out)
    }

    /// Branch values at generation `n` with zero tails, in branch order.
    pub fn generation_points(&self, n: usize) -> Result<Vec<(u64, Rational)>> {
        if n >= 32 {
            return Err(Error::InvalidParams(format!("generation {n} has too many branches")));
        }
        match &self.scheme {
            WitnessScheme::Blocks(_) => (0..1u64 << n)
                .map(|b| {
                    let digits = self.branch_digits(n, b)?;
                    Ok((b, DigitWord::new(self.system.clone(), digits)?.value()))
                })
                .collect(),
            WitnessScheme::Sparse(sparse) => {
                if n > sparse.generations {
                    return Err(Error::InsufficientDepth(format!(
                        "extracted {} generations, asked for {n}",
                        sparse.generations
                    )));
                }
                Ok((0..1u64 << n).map(|b| (b, sparse.point(n, b))).collect())
            }
        }
    }

    /// `v_j - v_i` for every pair `i < j` of generation-`n` branches.
    pub fn branch_translate_pairs(&self, n: usize) -> Result<Vec<Rational>> {
        let points = self.generation_points(n)?;
        let mut out = Vec::new();
        for (i, (_, a)) in points.iter().enumerate() {
            for (_, b) in &points[i + 1..] {
                out.push(b - a);
            }
        }
        Ok(out)
    }

    /// Strict bound on what levels from `k_n` on add to any branch value.
    pub fn tail_width(&self, n: usize) -> Result<Rational> {
        let k = level_of(self.offset(n)?)?;
        Ok(recip(&self.system.q(k - 1)))
    }

    /// The tuple served by slot `p` of generation `n`, with branch values
    /// truncated after the slot.
    pub fn sampled_tuple(&self, n: usize, p: u128) -> Result<SampledTuple> {
        let scheme = self.blocks()?;
        scheme.check_generation(n)?;
        let t = scheme.tuple_size(n);
        if t == 0 {
            return Err(Error::InvalidParams(format!("generation {n} has no slots")));
        }
        let members = combination_unrank(p, 1u64 << n, t)?;
        let start = level_of(scheme.slot_level(n, 0)?)?;
        let last_level = level_of(scheme.slot_level(n, p)?)? + scheme.slot_length(n) - 1;
        self.system.check_depth(last_level + 1)?;
        let earlier: Vec<Vec<u64>> = if n > scheme.first_generation() {
            members.iter().map(|&b| self.branch_digits(n - 1, b >> 1)).collect::<Result<_>>()?
        } else {
            vec![vec![]; members.len()]
        };
        let mut words: Vec<Vec<u64>> = earlier;
        for (w, &b) in words.iter_mut().zip(&members) {
            w.extend(scheme.prefix(n, b)?);
        }
        let mut combo: Vec<u64> = (0..t).collect();
        let mut q: u128 = 0;
        while q <= p {
            let patterns = scheme.slot_patterns(n, q)?;
            for (w, &b) in words.iter_mut().zip(&members) {
                match combo.iter().position(|&c| c == b) {
                    Some(r) => w.extend_from_slice(&patterns[r]),
                    None => w.extend(std::iter::repeat_n(0, scheme.slot_length(n))),
                }
            }
            q += 1;
            next_combination(&mut combo, 1u64 << n);
        }
        debug_assert!(words.iter().all(|w| w.len() == last_level + 1 && start <= last_level));
        let translates =
            words.into_iter().map(|w| Ok(DigitWord::new(self.system.clone(), w)?.value())).collect::<Result<_>>()?;
        Ok(SampledTuple {
            generation: n,
            slot: p,
            members,
            translates,
            pad: recip(&self.system.q(last_level)),
            last_level,
        })
    }
}

pub fn build_ternary_haar2_witness() -> CantorWitness {
    CantorWitness::from_scheme(BlockScheme::Ternary)
}

pub fn build_cl_witness(l: usize) -> Result<CantorWitness> {
    if l >= CL_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("l = {l} is beyond the representable levels")));
    }
    Ok(CantorWitness::from_scheme(BlockScheme::Cl { l }))
}

pub fn build_notideal_d(schedule: WSchedule) -> Result<CantorWitness> {
    let schedule = WSchedule::new(schedule.start, schedule.cycle)?;
    Ok(CantorWitness::from_scheme(BlockScheme::NotIdealD { schedule }))
}

pub fn build_notideal_e(schedule: WSchedule) -> Result<CantorWitness> {
    let schedule = WSchedule::new(schedule.start, schedule.cycle)?;
    Ok(CantorWitness::from_scheme(BlockScheme::NotIdealE { schedule }))
}

/// Picks `t_s` for every `s` ending in 1 with `lh(s) <= generations`: the
/// shortest path of the required form whose increment is below the threshold
/// of its generation.
pub fn extract_sparse_subcantor(
    tree: IncrementTree,
    system: MixedRadixSystem,
    generations: usize,
) -> Result<CantorWitness> {
    if generations >= 32 {
        return Err(Error::InvalidParams(format!("{generations} generations is too many")));
    }
    let mut paths: HashMap<(usize, u64), Vec<bool>> = HashMap::new();
    for n in 1..=generations {
        let level = if n == 1 { system_level_k(&system, 3) } else { system_level_k(&system, (1 << (n + 1)) + 1) };
        let threshold = Rational::new(BigInt::from(1), 2 * BigInt::from(system.q(level)));
        for s in 0..1u64 << (n - 1) {
            let base = (1..n)
                .rev()
                .find_map(|len| {
                    let prefix = s >> (n - 1 - len);
                    (prefix & 1 == 1).then(|| paths[&(len, prefix)].clone())
                })
                .unwrap_or_default();
            let mut path = base;
            loop {
                if path.len() >= tree.max_len() {
                    return Err(Error::InsufficientDepth(format!(
                        "no path of length <= {} meets the generation-{n} threshold",
                        tree.max_len()
                    )));
                }
                path.push(true);
                if tree.increment(&path) < threshold {
                    break;
                }
                path.pop();
                path.push(false);
            }
            paths.insert((n, (s << 1) | 1), path);
        }
    }
    let sparse = SparseSubCantor { tree, generations, paths };
    Ok(CantorWitness::new(system, WitnessScheme::Sparse(sparse)))
}

/// `k_n` of the system's schedule; constant-radix systems use `k_n = n`.
fn system_level_k(system: &MixedRadixSystem, n: usize) -> usize {
    match &system.rule {
        crate::numeric::RadixRule::NullMeager { schedule } => schedule.k(n),
        _ => n,
    }
}

/// `2 s / 3^L` style branch values of the avoiding scheme have this exact
/// tail bound beyond generation `g`: `2 / (3^(gL) (3^L - 1))`.
pub fn avoiding_tail(block_len: usize, g: usize) -> Rational {
    let three = BigInt::from(3);
    let big = num_traits::pow(three.clone(), block_len);
    Rational::new(BigInt::from(2), num_traits::pow(three, g * block_len) * (big - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn rank_and_unrank_agree() {
        let mut combo = vec![0, 1, 2];
        let mut r = 0u128;
        loop {
            assert_eq!(combination_rank(&combo, 8).unwrap(), r);
            assert_eq!(combination_unrank(r, 8, 3).unwrap(), combo);
            r += 1;
            if !next_combination(&mut combo, 8) {
                break;
            }
        }
        assert_eq!(r, 56);
        assert_eq!(combination_unrank(0, 32, 26).unwrap(), (0..26).collect::<Vec<_>>());
    }

    #[test]
    fn ternary_generation_one_points() {
        let w = build_ternary_haar2_witness();
        assert_eq!(w.generation_points(1).unwrap(), vec![(0, rat(0, 1)), (1, rat(1, 3))]);
        assert_eq!(w.branch_translate_pairs(1).unwrap(), vec![rat(1, 3)]);
        assert_eq!(w.offset(1).unwrap(), 1);
        assert_eq!(w.offset(2).unwrap(), 49);
        assert_eq!(w.offset(3).unwrap(), 721);
        assert_eq!(w.block(2, 3).unwrap().len(), 48);
    }

    #[test]
    fn ternary_slots_follow_lex_triples() {
        let w = build_ternary_haar2_witness();
        let scheme = w.block_scheme().unwrap();
        for p in 0..4u128 {
            let triple = combination_unrank(p, 4, 3).unwrap();
            let patterns = scheme.slot_patterns(2, p).unwrap();
            for (r, &b) in triple.iter().enumerate() {
                let block = w.block(2, b).unwrap();
                assert_eq!(&block[12 * p as usize..12 * p as usize + 12], &patterns[r][..]);
            }
        }
    }

    #[test]
    fn cl_scheme_shape() {
        let w = build_cl_witness(0).unwrap();
        let s = w.block_scheme().unwrap();
        assert_eq!(s.first_generation(), 5);
        assert_eq!(s.tuple_size(5), 26);
        assert_eq!(s.slot_count(5).unwrap(), 906_192);
        let patterns = s.slot_patterns(5, 0).unwrap();
        assert_eq!(patterns[0], vec![0, 0]);
        assert_eq!(patterns[1], vec![0, 74]);
        assert_eq!(patterns[2], vec![1, 73]);
        assert_eq!(s.default_slot(5).unwrap(), 1);
        assert_eq!(build_cl_witness(1).unwrap().block_scheme().unwrap().default_slot(7).unwrap(), 1);
    }

    #[test]
    fn sampled_cl_tuple_matches_closed_form_translates() {
        let w = build_cl_witness(0).unwrap();
        let t = w.sampled_tuple(5, 0).unwrap();
        assert_eq!(t.members, (0..26).collect::<Vec<_>>());
        assert_eq!(t.last_level, 1);
        assert_eq!(t.pad, rat(1, 1875));
        assert_eq!(t.translates[0], rat(0, 1));
        assert_eq!(t.translates[1], rat(74, 1875));
    }

    #[test]
    fn notideal_block_lengths() {
        let d = build_notideal_d(WSchedule::constant_m0()).unwrap();
        let e = build_notideal_e(WSchedule::constant_m0()).unwrap();
        let (ds, es) = (d.block_scheme().unwrap(), e.block_scheme().unwrap());
        assert_eq!(ds.generation_length(5).unwrap(), 2 * 906_192 + 1);
        assert_eq!(es.generation_length(5).unwrap(), 2 * 906_192 + 2);
        let t = d.sampled_tuple(5, 0).unwrap();
        // member 1 is branch 1, which ends in 1: marker 6 at level 0
        assert_eq!(t.translates[1], rat(6, 25) + rat(224, 421_875));
        assert_eq!(t.last_level, 2);
    }

    #[test]
    fn schedule_validation() {
        assert!(WSchedule::new(5, vec![0]).is_ok());
        assert!(matches!(WSchedule::new(4, vec![0]), Err(Error::InvalidSchedule(_))));
        assert!(matches!(WSchedule::new(5, vec![0, 1]), Err(Error::InvalidSchedule(_))));
        assert!(WSchedule::new(7, vec![1, 0]).is_ok());
    }

    #[test]
    fn sparse_extraction_first_generation() {
        let sys = MixedRadixSystem::null_meager(crate::numeric::Schedule::linear());
        let w = extract_sparse_subcantor(IncrementTree::scaled_ternary(), sys.clone(), 1).unwrap();
        let WitnessScheme::Sparse(s) = &w.scheme else { panic!() };
        let t1 = &s.paths[&(1, 1)];
        assert!(t1[..t1.len() - 1].iter().all(|b| !b) && *t1.last().unwrap());
        let bound = Rational::new(BigInt::from(1), 2 * BigInt::from(sys.q(3)));
        assert!(s.tree.increment(t1) < bound);
        let zero = extract_sparse_subcantor(IncrementTree::scaled_ternary(), sys.clone(), 0).unwrap();
        assert_eq!(zero.generation_points(0).unwrap(), vec![(0, rat(0, 1))]);
        let shallow = IncrementTree::ScaledTernary { max_len: 4 };
        assert!(matches!(extract_sparse_subcantor(shallow, sys, 1), Err(Error::InsufficientDepth(_))));
    }
}
