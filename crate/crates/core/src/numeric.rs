//! Exact rationals, mixed-radix systems, digit words and base-`r` carry
//! addition.
//!
//! Every level `i` of a [`MixedRadixSystem`] has a radix `r_i >= 2` and a
//! cumulative denominator `q(i) = r_0 * r_1 * ... * r_i`; a digit `x_i` at
//! level `i` carries weight `1 / q(i)`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_big(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// `1 / q` for a positive big integer.
pub fn recip(q: &BigUint) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(q.clone()))
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not an exact rational p/q"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Canonical `"p/q"` rendering (denominator always present).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
pub mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`rational_str`] for `Vec<Rational>`.
pub mod rational_vec_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Floor of a rational as a big integer.
pub fn floor_int(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Ceiling of a rational as a big integer.
pub fn ceil_int(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Breakpoints `k_0 = 0 < k_1 < ...` of the null-meager radix schedule.
/// Level `i` belongs to block `n` when `k_n <= i < k_{n+1}` and then has
/// radix `2n + 3`. Past the last listed breakpoint the schedule continues
/// with the last step size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub breaks: Vec<usize>,
}

impl Schedule {
    /// `k_n = n`.
    pub fn linear() -> Self {
        Schedule { breaks: vec![0, 1] }
    }

    pub fn new(breaks: Vec<usize>) -> Result<Self> {
        if breaks.first() != Some(&0) {
            return Err(Error::InvalidSchedule("schedule must start with k_0 = 0".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule("schedule must be strictly increasing".into()));
        }
        Ok(Schedule { breaks })
    }

    fn step(&self) -> usize {
        match self.breaks.len() {
            0 | 1 => 1,
            n => self.breaks[n - 1] - self.breaks[n - 2],
        }
    }

    /// `k_n`.
    pub fn k(&self, n: usize) -> usize {
        if n < self.breaks.len() {
            self.breaks[n]
        } else {
            let last = self.breaks.len() - 1;
            self.breaks[last] + (n - last) * self.step()
        }
    }

    /// The block index `n` with `k_n <= level < k_{n+1}`.
    pub fn block_of(&self, level: usize) -> usize {
        let last = self.breaks.len() - 1;
        if level >= self.breaks[last] {
            last + (level - self.breaks[last]) / self.step()
        } else {
            self.breaks.partition_point(|&k| k <= level) - 1
        }
    }
}

/// How the radix of each level is chosen.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", content = "params", rename_all = "kebab-case")]
pub enum RadixRule {
    /// Every level has the same radix.
    Constant { radix: u64 },
    /// `radix(i) = 25 * 3^i`, so `q(0) = 25` and `q(n) = q(n-1) * 25 * 3^n`.
    Cl {},
    /// Same radices as `Cl`; kept separate so descriptors name their origin.
    NotIdeal {},
    /// `radix(i) = 2n + 3` for `k_n <= i < k_{n+1}`.
    NullMeager { schedule: Schedule },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedRadixSystem {
    pub rule: RadixRule,
}

/// Largest level whose `25 * 3^i` radix fits in a `u64`.
pub const CL_MAX_LEVEL: usize = 36;

impl MixedRadixSystem {
    pub fn constant(radix: u64) -> Self {
        assert!(radix >= 2, "radix must be at least 2");
        MixedRadixSystem { rule: RadixRule::Constant { radix } }
    }

    pub fn cl() -> Self {
        MixedRadixSystem { rule: RadixRule::Cl {} }
    }

    pub fn not_ideal() -> Self {
        MixedRadixSystem { rule: RadixRule::NotIdeal {} }
    }

    pub fn null_meager(schedule: Schedule) -> Self {
        MixedRadixSystem { rule: RadixRule::NullMeager { schedule } }
    }

    /// Radix of `level`, or an error if it does not fit in 64 bits.
    pub fn checked_radix(&self, level: usize) -> Result<u64> {
        match &self.rule {
            RadixRule::Constant { radix } => Ok(*radix),
            RadixRule::Cl {} | RadixRule::NotIdeal {} => u32::try_from(level)
                .ok()
                .and_then(|l| 3u64.checked_pow(l))
                .and_then(|p| p.checked_mul(25))
                .ok_or(Error::RadixOverflow { level }),
            RadixRule::NullMeager { schedule } => Ok(2 * schedule.block_of(level) as u64 + 3),
        }
    }

    /// Radix of `level`. Panics past [`CL_MAX_LEVEL`] for the 25·3^i systems;
    /// callers validate depth with [`Self::check_depth`] first.
    pub fn radix(&self, level: usize) -> u64 {
        self.checked_radix(level).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Ensures every level below `depth` has a representable radix.
    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > 0 {
            self.checked_radix(depth - 1)?;
        }
        Ok(())
    }

    /// Whether both systems assign the same radices.
    pub fn same_radices(&self, other: &MixedRadixSystem) -> bool {
        use RadixRule::*;
        match (&self.rule, &other.rule) {
            (Cl {} | NotIdeal {}, Cl {} | NotIdeal {}) => true,
            (a, b) => a == b,
        }
    }

    /// `q(i)`, the cumulative denominator of level `i`.
    pub fn q(&self, level: usize) -> BigUint {
        match &self.rule {
            RadixRule::Constant { radix } => num_traits::pow(BigUint::from(*radix), level + 1),
            RadixRule::Cl {} | RadixRule::NotIdeal {} => {
                let tri = level * (level + 1) / 2;
                num_traits::pow(BigUint::from(25u32), level + 1) * num_traits::pow(BigUint::from(3u32), tri)
            }
            RadixRule::NullMeager { .. } => (0..=level).fold(BigUint::one(), |acc, i| acc * self.radix(i)),
        }
    }

    /// `[q(-1), q(0), ..., q(depth-1)]` where `q(-1) = 1`; entry `j` is the
    /// number of cells per unit at depth `j`.
    pub fn cell_counts(&self, depth: usize) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(depth + 1);
        let mut q = BigUint::one();
        out.push(q.clone());
        for i in 0..depth {
            q *= self.radix(i);
            out.push(q.clone());
        }
        out
    }
}

/// `q(i)` for the system; `i` is a level index (`i >= 0`).
pub fn q_denominator(system: &MixedRadixSystem, level: usize) -> BigUint {
    system.q(level)
}

/// A finite digit sequence `(x_0, ..., x_{k-1})` valid for its system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitWord {
    pub system: MixedRadixSystem,
    pub digits: Vec<u64>,
}

impl DigitWord {
    pub fn new(system: MixedRadixSystem, digits: Vec<u64>) -> Result<Self> {
        for (level, &digit) in digits.iter().enumerate() {
            let radix = system.checked_radix(level)?;
            if digit >= radix {
                return Err(Error::InvalidDigit { level, digit, radix });
            }
        }
        Ok(DigitWord { system, digits })
    }

    pub fn zeros(system: MixedRadixSystem, len: usize) -> Self {
        DigitWord { system, digits: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Cell index of the word at depth `len`: the integer `N` with
    /// `eval = N / q(len - 1)`.
    pub fn cell_index(&self) -> BigUint {
        self.digits.iter().enumerate().fold(BigUint::zero(), |acc, (i, &d)| acc * self.system.radix(i) + d)
    }

    pub fn value(&self) -> Rational {
        let q = self.system.cell_counts(self.len()).pop().unwrap();
        Rational::new(BigInt::from(self.cell_index()), BigInt::from(q))
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// `sum_i x_i / q(i)` for a word, checked for digit validity.
pub fn eval_word(word: &DigitWord) -> Result<Rational> {
    for (level, &digit) in word.digits.iter().enumerate() {
        let radix = word.system.checked_radix(level)?;
        if digit >= radix {
            return Err(Error::InvalidDigit { level, digit, radix });
        }
    }
    Ok(word.value())
}

/// The first `len` digits of the floor expansion of `value` in `[0, 1)`.
///
/// The floor expansion never ends in an infinite run of maximal digits, so
/// it is the representative required by the greedy constructions.
pub fn expand(value: &Rational, system: &MixedRadixSystem, len: usize) -> Result<DigitWord> {
    if value.is_negative() || *value >= Rational::one() {
        return Err(Error::Precondition(format!("expansion needs a value in [0,1), got {}", format_rational(value))));
    }
    system.check_depth(len)?;
    let mut digits = Vec::with_capacity(len);
    let den = value.denom();
    let mut rest = value.numer().clone();
    for level in 0..len {
        rest *= system.radix(level);
        let (d, r) = rest.div_rem(den);
        rest = r;
        digits.push(d.to_u64().expect("digit below radix"));
    }
    Ok(DigitWord { system: system.clone(), digits })
}

/// Result of [`add_with_carry`]: the sum word and one carry flag per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarryTrace {
    pub result: DigitWord,
    /// `beta[i] = 1` when a carry from level `i + 1` enters level `i`.
    pub beta: Vec<u8>,
}

/// Adds two words of one system digit by digit, right to left.
///
/// The shorter operand is right-padded with zeros. A carry out of level 0
/// means the sum reached 1 and is rejected.
pub fn add_with_carry(a: &DigitWord, d: &DigitWord) -> Result<CarryTrace> {
    if !a.system.same_radices(&d.system) {
        return Err(Error::SystemMismatch);
    }
    let len = a.len().max(d.len());
    let digit = |w: &DigitWord, i: usize| w.digits.get(i).copied().unwrap_or(0);
    let mut out = vec![0u64; len];
    let mut beta = vec![0u8; len];
    let mut carry = 0u64;
    for i in (0..len).rev() {
        beta[i] = carry as u8;
        let radix = a.system.checked_radix(i)?;
        let s = digit(a, i) + digit(d, i) + carry;
        out[i] = s % radix;
        carry = s / radix;
    }
    if carry > 0 {
        return Err(Error::OverflowBeyondUnit);
    }
    Ok(CarryTrace { result: DigitWord { system: a.system.clone(), digits: out }, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(sys: &MixedRadixSystem, d: &[u64]) -> DigitWord {
        DigitWord::new(sys.clone(), d.to_vec()).unwrap()
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_denominator(&MixedRadixSystem::constant(3), 1), BigUint::from(9u32));
        assert_eq!(q_denominator(&MixedRadixSystem::cl(), 0), BigUint::from(25u32));
        assert_eq!(q_denominator(&MixedRadixSystem::cl(), 1), BigUint::from(1875u32));
        let nm = MixedRadixSystem::null_meager(Schedule::linear());
        assert_eq!(q_denominator(&nm, 0), BigUint::from(3u32));
        assert_eq!(q_denominator(&nm, 1), BigUint::from(15u32));
    }

    #[test]
    fn cl_closed_form_matches_recurrence() {
        let sys = MixedRadixSystem::cl();
        let mut q = BigUint::one();
        for n in 0..12 {
            q *= 25u64 * 3u64.pow(n as u32);
            assert_eq!(sys.q(n), q);
        }
    }

    #[test]
    fn schedule_blocks() {
        let s = Schedule::new(vec![0, 2, 5]).unwrap();
        let blocks: Vec<_> = (0..10).map(|i| s.block_of(i)).collect();
        assert_eq!(blocks, vec![0, 0, 1, 1, 1, 2, 2, 2, 3, 3]);
        assert_eq!(s.k(3), 8);
        assert!(Schedule::new(vec![1, 2]).is_err());
        assert!(Schedule::new(vec![0, 2, 2]).is_err());
    }

    #[test]
    fn eval_examples() {
        let c3 = MixedRadixSystem::constant(3);
        assert_eq!(eval_word(&word(&c3, &[0, 2])).unwrap(), rat(2, 9));
        assert_eq!(eval_word(&word(&MixedRadixSystem::cl(), &[8])).unwrap(), rat(8, 25));
        assert_eq!(eval_word(&DigitWord::zeros(c3.clone(), 0)).unwrap(), rat(0, 1));
        let bad = DigitWord { system: c3, digits: vec![3] };
        assert!(matches!(eval_word(&bad), Err(Error::InvalidDigit { level: 0, digit: 3, radix: 3 })));
    }

    #[test]
    fn carry_examples() {
        let c5 = MixedRadixSystem::constant(5);
        let t = add_with_carry(&word(&c5, &[0, 4]), &word(&c5, &[0, 1])).unwrap();
        assert_eq!(t.result.digits, vec![1, 0]);
        assert_eq!(t.beta, vec![1, 0]);
        let t = add_with_carry(&word(&c5, &[0, 0]), &word(&c5, &[0, 0])).unwrap();
        assert_eq!(t.result.digits, vec![0, 0]);
        assert_eq!(t.beta, vec![0, 0]);
        assert_eq!(add_with_carry(&word(&c5, &[4, 4]), &word(&c5, &[0, 1])), Err(Error::OverflowBeyondUnit));
        // shorter operand padded on the right
        let t = add_with_carry(&word(&c5, &[1]), &word(&c5, &[0, 3, 2])).unwrap();
        assert_eq!(t.result.digits, vec![1, 3, 2]);
    }

    #[test]
    fn carry_rejects_mixed_systems() {
        let a = word(&MixedRadixSystem::constant(5), &[1]);
        let b = word(&MixedRadixSystem::constant(3), &[1]);
        assert_eq!(add_with_carry(&a, &b), Err(Error::SystemMismatch));
    }

    #[test]
    fn expand_round_trips_finite_words() {
        let sys = MixedRadixSystem::cl();
        let w = word(&sys, &[8, 74, 3]);
        assert_eq!(expand(&w.value(), &sys, 3).unwrap(), w);
        assert!(expand(&rat(1, 1), &sys, 2).is_err());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational(" 4/8 ").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), rat(-3, 1));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(3, 1)), "3/1");
        assert_eq!(ceil_int(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(floor_int(&rat(-3, 2)), BigInt::from(-2));
    }
}
