//! Named digit sets and the parameters that travel with them.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::digits::{l_set, m_l, pow3, DigitSetExpr, FamilyKind, LevelConstraint, TailRule, FAMILY_MAX_LEVEL};
use crate::error::{Error, Result};
use crate::numeric::{rat_big, MixedRadixSystem, Rational, Schedule, CL_MAX_LEVEL};

/// Number of gap-sequence terms generated by default.
pub const DEFAULT_GAP_TERMS: usize = 12;

/// Objects computed alongside a construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Companions {
    pub m: Option<u64>,
    /// A decreasing sequence `d_k -> 0` with `(set - d_k) ∩ set = ∅`.
    pub gaps: Vec<Rational>,
    /// Translates whose joint intersection with the set is empty.
    pub translates: Vec<Rational>,
    pub l_sets: Vec<Vec<u64>>,
    /// Members of a finite union.
    pub members: Vec<DigitSetExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedConstruction {
    pub name: String,
    pub params: Vec<u64>,
    pub system: MixedRadixSystem,
    pub expr: DigitSetExpr,
    pub companions: Companions,
    /// Depths up to this value project without error.
    pub horizon: usize,
}

impl NamedConstruction {
    /// Identifier in `name(p, ...)` form, as accepted by [`make_from_id`].
    pub fn id(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let p: Vec<String> = self.params.iter().map(u64::to_string).collect();
            format!("{}({})", self.name, p.join(","))
        }
    }
}

fn pow_big(base: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), e)
}

/// `d_k = (m - 1) / (2 m^(k+1))` for `k < count`.
pub fn gap_sequence(m: u64, count: usize) -> Vec<Rational> {
    (0..count).map(|k| rat_big(BigInt::from(m - 1), 2 * pow_big(m, k + 1))).collect()
}

/// `d_{m,k} = 5 / (2 * 5^((n+1)k + m + 1))` for `k < count`.
pub fn haar_family_gaps(n: u64, m: u64, count: usize) -> Vec<Rational> {
    (0..count as u64).map(|k| rat_big(BigInt::from(5), 2 * pow_big(5, ((n + 1) * k + m + 1) as usize))).collect()
}

/// `x_j = j 3^(k-l) / q_k + (25 3^(k+1) - 1 - j) / q_(k+1)` for `j <= 2 m_l`,
/// followed by `x_(2 m_l + 1) = 0`.
pub fn cl_tuple_translates(k: usize, l: usize) -> Result<Vec<Rational>> {
    if k <= l {
        return Err(Error::InvalidParams(format!("translates need k > l, got k={k}, l={l}")));
    }
    if k + 1 > CL_MAX_LEVEL {
        return Err(Error::RadixOverflow { level: k + 1 });
    }
    let sys = MixedRadixSystem::cl();
    let (qk, qk1) = (BigInt::from(sys.q(k)), BigInt::from(sys.q(k + 1)));
    let mut out: Vec<Rational> = (0..=2 * m_l(l))
        .map(|j| {
            let first = rat_big(BigInt::from(j) * pow3(k - l), qk.clone());
            let second = rat_big(BigInt::from(25 * pow3(k + 1) - 1 - j), qk1.clone());
            first + second
        })
        .collect();
    out.push(Rational::from_integer(0.into()));
    Ok(out)
}

pub fn ternary() -> DigitSetExpr {
    DigitSetExpr::product(
        MixedRadixSystem::constant(3),
        vec![],
        TailRule::Periodic(vec![LevelConstraint::Only(vec![0, 2])]),
    )
    .expect("valid product")
}

pub fn gap_set(m: u64) -> Result<DigitSetExpr> {
    if m < 4 {
        return Err(Error::InvalidParams(format!("gap set needs m >= 4, got {m}")));
    }
    DigitSetExpr::product(
        MixedRadixSystem::constant(m),
        vec![],
        TailRule::Periodic(vec![LevelConstraint::Only(vec![0, m - 1])]),
    )
}

/// `A_m` of the family with parameter `n`: base 5, digits at positions
/// `≡ m (mod n+1)` restricted to `{0, 4}`.
pub fn haar_member(n: u64, m: u64) -> Result<DigitSetExpr> {
    if n == 0 || m > n {
        return Err(Error::InvalidParams(format!("need n > 0 and m <= n, got n={n}, m={m}")));
    }
    let pattern =
        (0..=n).map(|i| if i == m { LevelConstraint::Only(vec![0, 4]) } else { LevelConstraint::Any }).collect();
    DigitSetExpr::product(MixedRadixSystem::constant(5), vec![], TailRule::Periodic(pattern))
}

pub fn cl_set(l: usize) -> Result<DigitSetExpr> {
    if l >= CL_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("l = {l} is beyond the representable levels")));
    }
    DigitSetExpr::product(MixedRadixSystem::cl(), vec![], TailRule::ClBlock { l })
}

fn levels_with(k: usize, at_k: LevelConstraint) -> Vec<LevelConstraint> {
    let mut levels = vec![LevelConstraint::Any; k];
    levels.push(at_k);
    levels
}

/// `W^k_l`: only level `k` forbids the block `m_l` of width `3^(k-l)`.
pub fn w_set(k: usize, l: usize) -> Result<DigitSetExpr> {
    if k < l || k >= CL_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("w set needs l <= k < {CL_MAX_LEVEL}")));
    }
    let block = LevelConstraint::ForbiddenBlock { block: m_l(l), width: pow3(k - l) };
    DigitSetExpr::product(MixedRadixSystem::cl(), levels_with(k, block), TailRule::Free)
}

/// `Z^k_l`: the digit at level `k` lies in the block `m_l` of width `3^(k-l)`.
pub fn z_set(k: usize, l: usize) -> Result<DigitSetExpr> {
    if k < l || k >= CL_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("z set needs l <= k < {CL_MAX_LEVEL}")));
    }
    let block = LevelConstraint::InBlock { block: m_l(l), width: pow3(k - l) };
    DigitSetExpr::product(MixedRadixSystem::cl(), levels_with(k, block), TailRule::Free)
}

/// `T^k_n`: `Z^k_n` with digits below level `n` in their `L` sets.
pub fn t_set(k: usize, n: usize) -> Result<DigitSetExpr> {
    if k < n || k > FAMILY_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("t set needs n <= k <= {FAMILY_MAX_LEVEL}")));
    }
    let mut levels: Vec<LevelConstraint> = (0..n).map(|i| LevelConstraint::Only(l_set(i).to_vec())).collect();
    levels.extend(std::iter::repeat_n(LevelConstraint::Any, k - n));
    levels.push(LevelConstraint::InBlock { block: m_l(n), width: pow3(k - n) });
    DigitSetExpr::product(MixedRadixSystem::not_ideal(), levels, TailRule::Free)
}

/// `X_n`: digits below `n` in `L`, digit `n` outside `L_n`, `C_n` constraints.
pub fn x_member(n: usize) -> Result<DigitSetExpr> {
    if n > FAMILY_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("x member needs n <= {FAMILY_MAX_LEVEL}")));
    }
    let mut levels: Vec<LevelConstraint> = (0..n).map(|i| LevelConstraint::Only(l_set(i).to_vec())).collect();
    let mut excluded = l_set(n).to_vec();
    excluded.push(m_l(n));
    levels.push(LevelConstraint::Except(excluded));
    DigitSetExpr::product(MixedRadixSystem::not_ideal(), levels, TailRule::ClBlock { l: n })
}

pub fn nullmeager(schedule: Schedule) -> DigitSetExpr {
    DigitSetExpr::product(MixedRadixSystem::null_meager(schedule), vec![], TailRule::NullMeagerExcludeMiddle)
        .expect("valid product")
}

fn want(params: &[u64], n: usize, name: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidParams(format!("{name} takes {n} parameter(s), got {}", params.len())));
    }
    Ok(())
}

fn small(v: u64) -> Result<usize> {
    usize::try_from(v)
        .ok()
        .filter(|&v| v < 1 << 20)
        .ok_or_else(|| Error::InvalidParams(format!("parameter {v} is out of range")))
}

/// Builds the construction `name` with numeric parameters.
pub fn make(name: &str, params: &[u64]) -> Result<NamedConstruction> {
    let mut companions = Companions::default();
    let (expr, horizon) = match name {
        "ternary" => {
            want(params, 0, name)?;
            companions.gaps = gap_sequence(3, DEFAULT_GAP_TERMS);
            (ternary(), 64)
        }
        "gap" => {
            want(params, 1, name)?;
            companions.gaps = gap_sequence(params[0].max(2), DEFAULT_GAP_TERMS);
            (gap_set(params[0])?, 64)
        }
        "haar_family" => match params {
            [n, m] => {
                companions.gaps = haar_family_gaps(*n, *m, DEFAULT_GAP_TERMS);
                (haar_member(*n, *m)?, 64)
            }
            [n] => {
                let members = (0..=*n).map(|m| haar_member(*n, m)).collect::<Result<Vec<_>>>()?;
                companions.members = members.clone();
                (DigitSetExpr::union_of(members)?, 64)
            }
            _ => return Err(Error::InvalidParams("haar_family takes (n) or (n,m)".into())),
        },
        "cl" => {
            want(params, 1, name)?;
            let l = small(params[0])?;
            companions.m = Some(m_l(l.min(CL_MAX_LEVEL)));
            (cl_set(l)?, CL_MAX_LEVEL)
        }
        "w" => {
            want(params, 2, name)?;
            let (k, l) = (small(params[0])?, small(params[1])?);
            companions.m = Some(m_l(l.min(CL_MAX_LEVEL)));
            if k > l && k + 1 < CL_MAX_LEVEL {
                companions.translates = cl_tuple_translates(k, l)?;
            }
            (w_set(k, l)?, CL_MAX_LEVEL)
        }
        "z" => {
            want(params, 2, name)?;
            let (k, l) = (small(params[0])?, small(params[1])?);
            companions.m = Some(m_l(l.min(CL_MAX_LEVEL)));
            (z_set(k, l)?, CL_MAX_LEVEL)
        }
        "t" => {
            want(params, 2, name)?;
            let (k, n) = (small(params[0])?, small(params[1])?);
            companions.m = Some(m_l(n.min(FAMILY_MAX_LEVEL)));
            (t_set(k, n)?, CL_MAX_LEVEL)
        }
        "x_member" => {
            want(params, 1, name)?;
            let n = small(params[0])?;
            companions.m = Some(m_l(n.min(FAMILY_MAX_LEVEL)));
            (x_member(n)?, CL_MAX_LEVEL)
        }
        "notideal_X" | "notideal_A" | "notideal_B" => {
            let kind = match name {
                "notideal_X" => FamilyKind::X,
                "notideal_A" => FamilyKind::A,
                _ => FamilyKind::B,
            };
            let min_escape = match params {
                [] => 0,
                [p] => small(*p)?,
                _ => return Err(Error::InvalidParams(format!("{name} takes at most one parameter"))),
            };
            companions.l_sets = (0..=8).map(|n| l_set(n).to_vec()).collect();
            (DigitSetExpr::family(kind, min_escape), FAMILY_MAX_LEVEL + 1)
        }
        "nullmeager" => {
            let schedule = if params.is_empty() {
                Schedule::linear()
            } else {
                Schedule::new(params.iter().map(|&p| small(p)).collect::<Result<_>>()?)?
            };
            (nullmeager(schedule), 64)
        }
        _ => return Err(Error::UnknownConstruction(name.to_string())),
    };
    Ok(NamedConstruction {
        name: name.to_string(),
        params: params.to_vec(),
        system: expr.system().clone(),
        expr,
        companions,
        horizon,
    })
}

/// Parses `name`, `name(a,b,...)` or `reflect(<id>)`.
pub fn make_from_id(id: &str) -> Result<NamedConstruction> {
    let id = id.trim();
    if let Some(inner) = id.strip_prefix("reflect(").and_then(|s| s.strip_suffix(')')) {
        let mut c = make_from_id(inner)?;
        c.name = format!("reflect({})", c.id());
        c.params.clear();
        c.expr = c.expr.reflect();
        c.companions.gaps.iter_mut().for_each(|g| *g = -g.clone());
        c.companions.translates.iter_mut().for_each(|t| *t = -t.clone());
        c.companions.members = c.companions.members.into_iter().map(DigitSetExpr::reflect).collect();
        return Ok(c);
    }
    let (name, params) = match id.split_once('(') {
        Some((name, rest)) => {
            let body =
                rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unbalanced parentheses in `{id}`")))?;
            let params = body
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad parameter `{s}` in `{id}`"))))
                .collect::<Result<Vec<_>>>()?;
            (name.trim(), params)
        }
        None => (id, Vec::new()),
    };
    make(name, &params)
}

/// One row of [`check_l_bounds`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LBoundsRow {
    pub n: usize,
    pub size: usize,
    pub min: u64,
    pub max: u64,
    pub m: u64,
    /// `max L_n < m_n - 1`.
    pub max_ok: bool,
    /// `min L_n > (m_n + 1) / 2`.
    pub min_ok: bool,
    pub no_consecutive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LBoundsReport {
    pub rows: Vec<LBoundsRow>,
    pub all_ok: bool,
}

/// Exact check of the `L_n` bounds for every `n <= n_max`.
pub fn check_l_bounds(n_max: usize) -> Result<LBoundsReport> {
    if n_max > FAMILY_MAX_LEVEL {
        return Err(Error::InvalidParams(format!("n_max must be at most {FAMILY_MAX_LEVEL}")));
    }
    let rows: Vec<LBoundsRow> = (0..=n_max)
        .map(|n| {
            let l = l_set(n);
            let (min, max, m) = (l[0], *l.last().unwrap(), m_l(n));
            LBoundsRow {
                n,
                size: l.len(),
                min,
                max,
                m,
                max_ok: max + 1 < m,
                min_ok: 2 * min > m + 1,
                no_consecutive: l.windows(2).all(|w| w[1] > w[0] + 1),
            }
        })
        .collect();
    let all_ok = rows.iter().all(|r| r.max_ok && r.min_ok && r.no_consecutive);
    Ok(LBoundsReport { rows, all_ok })
}
