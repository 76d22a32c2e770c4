//! Exact point lists: `--points` files and the default samples used when no
//! file is given.

use std::path::Path;

use anyhow::{bail, Context, Result};
use haarlab_core::numeric::{parse_rational, rat, MixedRadixSystem, Rational, Schedule};
use haarlab_core::witness::{extract_sparse_subcantor, IncrementTree};
use num_bigint::BigInt;

/// Reads whitespace-separated `p/q` values; `#` starts a comment.
pub fn read_points(path: &Path) -> Result<Vec<Rational>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            let v = parse_rational(token).with_context(|| format!("{}:{}", path.display(), n + 1))?;
            out.push(v);
        }
    }
    Ok(out)
}

pub fn points_or(path: Option<&Path>, default: impl FnOnce() -> Result<Vec<Rational>>) -> Result<Vec<Rational>> {
    match path {
        Some(p) => read_points(p),
        None => default(),
    }
}

/// `2 / 3^(7i + 2)`: points of the ternary set, decreasing to 0 fast enough
/// for the `X` translate bounds.
pub fn ternary_decreasing(count: usize) -> Vec<Rational> {
    (0..count)
        .map(|i| {
            let e = u32::try_from(7 * i + 2).expect("small exponent");
            Rational::new(2.into(), pow3(e))
        })
        .collect()
}

fn pow3(e: u32) -> BigInt {
    BigInt::from(3u8).pow(e)
}

/// The `n + 1` smallest left endpoints of a generation of the ternary set,
/// at the first generation where they span less than 1/5.
pub fn ternary_anchors(n: usize) -> Result<Vec<Rational>> {
    for g in 1..40u32 {
        if (1u64 << g) < n as u64 + 1 {
            continue;
        }
        let points: Vec<Rational> = (0..=n as u64)
            .map(|b| (0..g).filter(|i| b >> (g - 1 - i) & 1 == 1).map(|i| Rational::new(2.into(), pow3(i + 1))).sum())
            .collect();
        if points[n] < rat(1, 5) {
            return Ok(points);
        }
    }
    bail!("no ternary generation gives {} anchors within 1/5", n + 1)
}

/// Branch values of a sparse sub-Cantor set extracted from the scaled
/// ternary tree on the null-meager system.
pub fn sparse_branch_points(schedule: Schedule, generations: usize) -> Result<Vec<Rational>> {
    let system = MixedRadixSystem::null_meager(schedule);
    let witness = extract_sparse_subcantor(IncrementTree::scaled_ternary(), system, generations)?;
    Ok(witness.generation_points(generations)?.into_iter().map(|(_, v)| v).collect())
}
