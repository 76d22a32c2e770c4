use haarlab_core::numeric::{expand, rat, MixedRadixSystem, Rational, Schedule};
use haarlab_core::witness::{
    binomial, build_cl_witness, build_notideal_d, build_notideal_e, build_ternary_haar2_witness, combination_rank,
    combination_unrank, extract_sparse_subcantor, BlockScheme, IncrementTree, WSchedule, WitnessScheme,
};
use proptest::prelude::*;

const X_BAR: [u64; 11] = [1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1];
const Y_BAR: [u64; 11] = [0, 2, 0, 0, 2, 1, 0, 2, 0, 0, 2];

proptest! {
    #[test]
    fn rank_is_a_bijection(universe in 1u64..40, k_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let k = ((universe as f64) * k_frac) as u64;
        let total = binomial(universe, k).unwrap();
        let r = (seed as u128) % total;
        let subset = combination_unrank(r, universe, k).unwrap();
        prop_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(combination_rank(&subset, universe).unwrap(), r);
        if r + 1 < total {
            prop_assert!(combination_unrank(r + 1, universe, k).unwrap() > subset);
        }
    }
}

#[test]
fn lex_enumeration_visits_every_subset_once() {
    for (universe, k) in [(8u64, 3u64), (6, 2), (7, 7), (5, 0)] {
        let total = binomial(universe, k).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u64..1 << universe {
            if mask.count_ones() as u64 != k {
                continue;
            }
            let subset: Vec<u64> = (0..universe).filter(|i| mask >> i & 1 == 1).collect();
            let r = combination_rank(&subset, universe).unwrap();
            assert!(r < total);
            assert!(seen.insert(r));
        }
        assert_eq!(seen.len() as u128, total);
    }
}

#[test]
fn block_lengths_match_closed_forms() {
    let t = build_ternary_haar2_witness();
    let mut k = 1u128;
    for n in 2..=5usize {
        k += 12 * binomial(1 << n, 3).unwrap();
        assert_eq!(t.offset(n).unwrap(), k);
        assert_eq!(t.block(n, (1 << n) - 1).unwrap().len() as u128, 12 * binomial(1 << n, 3).unwrap());
    }
    let d = build_notideal_d(WSchedule::constant_m0()).unwrap();
    let e = build_notideal_e(WSchedule::constant_m0()).unwrap();
    for n in 5..=6usize {
        let slots = binomial(1 << n, 26).unwrap();
        assert_eq!(d.block_scheme().unwrap().generation_length(n).unwrap(), 2 * slots + 1);
        assert_eq!(e.block_scheme().unwrap().generation_length(n).unwrap(), 2 * slots + 2);
    }
    let cl = build_cl_witness(0).unwrap();
    let s = cl.block_scheme().unwrap();
    assert_eq!((s.first_generation(), s.tuple_size(5)), (5, 26));
}

/// Base-3 digits of `v` in `[0, 1)` on levels `0..len`.
fn ternary_digits(v: &Rational, len: usize) -> Vec<u64> {
    expand(v, &MixedRadixSystem::constant(3), len).unwrap().digits
}

fn frac(v: Rational) -> Rational {
    let f = v.floor();
    v - f
}

#[test]
fn triples_expose_patterns_in_differences() {
    let w = build_ternary_haar2_witness();
    for n in 2..=3usize {
        let points = w.generation_points(n).unwrap();
        let len = w.offset(n).unwrap() as usize;
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                for c in b + 1..points.len() {
                    // patterns follow branch order, and borrows only move
                    // leftward, so the fractional parts carry them
                    let (d0, d1, d2) = (&points[a].1, &points[b].1, &points[c].1);
                    let x = ternary_digits(&frac(d1 - d0), len);
                    let y = ternary_digits(&frac(d2 - d0), len);
                    let exposed = (0..len - 10).any(|q| x[q..q + 11] == X_BAR && y[q..q + 11] == Y_BAR);
                    assert!(exposed, "generation {n}, triple ({a},{b},{c})");
                }
            }
        }
    }
}

#[test]
fn generation_points_are_distinct() {
    let w = build_ternary_haar2_witness();
    for n in 1..=3 {
        let mut values: Vec<Rational> = w.generation_points(n).unwrap().into_iter().map(|p| p.1).collect();
        values.sort();
        values.dedup();
        assert_eq!(values.len(), 1 << n);
    }
    let diffs = w.branch_translate_pairs(2).unwrap();
    assert_eq!(diffs.len(), 6);
    assert!(diffs.iter().all(|d| *d != rat(0, 1)));
}

#[test]
fn sampled_tuples_match_slot_formula() {
    let w = build_cl_witness(0).unwrap();
    let q0 = 25i64;
    let q1 = 25 * 75i64;
    let t = w.sampled_tuple(5, 0).unwrap();
    assert_eq!(t.translates[0], rat(0, 1));
    for j in 0..25i64 {
        assert_eq!(t.translates[j as usize + 1], rat(j, q0) + rat(74 - j, q1), "j = {j}");
    }
    let later = w.sampled_tuple(5, 3).unwrap();
    assert_eq!(later.last_level, 7);
    assert_eq!(later.members, combination_unrank(3, 32, 26).unwrap());
}

#[test]
fn sparse_points_lie_in_the_input_set() {
    let sys = MixedRadixSystem::null_meager(Schedule::linear());
    let tree = IncrementTree::scaled_ternary();
    let w = extract_sparse_subcantor(tree.clone(), sys.clone(), 3).unwrap();
    let WitnessScheme::Sparse(sparse) = &w.scheme else { panic!("sparse witness") };
    for n in 1..=3 {
        for (branch, value) in w.generation_points(n).unwrap() {
            let path = sparse.realizing_path(n, branch);
            assert_eq!(tree.point(&path), value);
            // (2/3) C at the path's depth: the value sits at the left end of its cell
            let scaled = &value * rat(3, 2);
            let digits = ternary_digits(&scaled, path.len());
            assert!(digits.iter().all(|&d| d != 1));
        }
        for s in 0..1u64 << (n - 1) {
            let t = &sparse.paths[&(n, (s << 1) | 1)];
            let level = if n == 1 { 3 } else { (1 << (n + 1)) + 1 };
            let bound = rat(1, 2) / Rational::from_integer(sys.q(level).into());
            assert!(tree.increment(t) < bound);
            if s == 0 {
                assert!(t[..t.len() - 1].iter().all(|b| !b));
            }
        }
    }
}

#[test]
fn avoiding_scheme_blocks() {
    let w = haarlab_core::witness::CantorWitness::from_scheme(BlockScheme::Avoiding { block_len: 3 });
    assert_eq!(w.generation_points(1).unwrap(), vec![(0, rat(0, 1)), (1, rat(2, 27))]);
    assert_eq!(*w.block(2, 1).unwrap(), vec![0, 0, 2]);
}
