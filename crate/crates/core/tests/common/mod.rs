//! Random small digit sets and an exhaustive cell-enumeration oracle.

#![allow(dead_code)]

use haarlab_core::digits::{DigitSetExpr, LevelConstraint, TailRule};
use haarlab_core::interval::IntervalUnion;
use haarlab_core::numeric::{rat, MixedRadixSystem};
use proptest::prelude::*;

/// Small random set: a product over at most three levels, possibly reflected
/// or joined with a second product.
#[derive(Clone, Debug)]
pub enum Shape {
    Product(Vec<LevelConstraint>),
    Reflect(Box<Shape>),
    Union(Box<Shape>, Box<Shape>),
}

pub fn constraint(radix: u64) -> impl Strategy<Value = LevelConstraint> {
    prop_oneof![
        Just(LevelConstraint::Any),
        proptest::collection::btree_set(0..radix, 1..=radix as usize)
            .prop_map(|s| LevelConstraint::Only(s.into_iter().collect())),
        proptest::collection::btree_set(0..radix, 0..radix as usize)
            .prop_map(|s| LevelConstraint::Except(s.into_iter().collect())),
        (1..radix)
            .prop_flat_map(move |w| (0..radix.div_ceil(w), Just(w)))
            .prop_filter("keeps a digit", move |(b, w)| !(b * w == 0 && *w >= radix))
            .prop_map(|(block, width)| LevelConstraint::ForbiddenBlock { block, width }),
        (1..=radix)
            .prop_flat_map(move |w| (0..radix.div_ceil(w), Just(w)))
            .prop_map(|(block, width)| LevelConstraint::InBlock { block, width }),
    ]
}

pub fn product(radix: u64) -> impl Strategy<Value = Shape> {
    proptest::collection::vec(constraint(radix), 0..=3).prop_map(Shape::Product)
}

pub fn shape(radix: u64) -> impl Strategy<Value = Shape> {
    product(radix).prop_recursive(2, 4, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| Shape::Reflect(Box::new(s))),
            (inner.clone(), inner).prop_map(|(a, b)| Shape::Union(Box::new(a), Box::new(b))),
        ]
    })
}

pub fn build(shape: &Shape, sys: &MixedRadixSystem) -> DigitSetExpr {
    match shape {
        Shape::Product(levels) => {
            DigitSetExpr::Product { system: sys.clone(), levels: levels.clone(), tail: TailRule::Free }
        }
        Shape::Reflect(s) => DigitSetExpr::Reflect(Box::new(build(s, sys))),
        Shape::Union(a, b) => DigitSetExpr::union_of(vec![build(a, sys), build(b, sys)]).unwrap(),
    }
}

pub fn nonempty(shape: &Shape, radix: u64) -> bool {
    match shape {
        Shape::Product(levels) => levels.iter().all(|c| (0..radix).any(|d| c.allows(d, radix))),
        Shape::Reflect(s) => nonempty(s, radix),
        Shape::Union(a, b) => nonempty(a, radix) && nonempty(b, radix),
    }
}

/// All depth-`depth` cells `[N/r^depth, (N+1)/r^depth]` of the shape, by
/// exhaustive enumeration of digit tuples.
pub fn cells(shape: &Shape, radix: u64, depth: usize) -> Vec<i64> {
    match shape {
        Shape::Product(levels) => {
            let total = radix.pow(depth as u32);
            (0..total)
                .filter(|&n| {
                    let mut digits = vec![0; depth];
                    let mut rest = n;
                    for i in (0..depth).rev() {
                        digits[i] = rest % radix;
                        rest /= radix;
                    }
                    digits.iter().enumerate().all(|(i, &d)| levels.get(i).is_none_or(|c| c.allows(d, radix)))
                })
                .map(|n| n as i64)
                .collect()
        }
        Shape::Reflect(s) => cells(s, radix, depth).into_iter().map(|n| -n - 1).collect(),
        Shape::Union(a, b) => {
            let mut v = cells(a, radix, depth);
            v.extend(cells(b, radix, depth));
            v
        }
    }
}

pub fn union_of_cells(cells: &[i64], q: i64) -> IntervalUnion {
    IntervalUnion::normalize(cells.iter().map(|&n| (rat(n, q), rat(n + 1, q)))).unwrap()
}
