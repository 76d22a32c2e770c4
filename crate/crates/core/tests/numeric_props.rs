use haarlab_core::numeric::*;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn base5_word(len: usize) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0u64..5, len)
}

fn pair_below_one() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (1usize..=20).prop_flat_map(|len| {
        (base5_word(len), base5_word(len)).prop_map(|(mut a, mut d)| {
            // a < 4/5 and d < 1/5 keep the sum below 1
            a[0] = a[0].min(3);
            d[0] = 0;
            (a, d)
        })
    })
}

fn w(sys: &MixedRadixSystem, d: &[u64]) -> DigitWord {
    DigitWord::new(sys.clone(), d.to_vec()).unwrap()
}

fn pow5(e: usize) -> Rational {
    Rational::from_integer(BigInt::from(5u32).pow(e as u32))
}

/// Carry flags defined from the left: `beta_i = 1` when the next position
/// overflows on its own, or receives a carry and reaches 5.
fn beta_by_induction(abar: &[u64]) -> Vec<u8> {
    let n = abar.len();
    let mut beta = vec![0u8; n];
    for i in (0..n.saturating_sub(1)).rev() {
        let next = abar[i + 1];
        beta[i] = (next > 4 || (beta[i + 1] == 1 && next + 1 > 4)) as u8;
    }
    beta
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn carry_sum_is_exact((a, d) in pair_below_one()) {
        let sys = MixedRadixSystem::constant(5);
        let (wa, wd) = (w(&sys, &a), w(&sys, &d));
        let expected = eval_word(&wa).unwrap() + eval_word(&wd).unwrap();
        let trace = add_with_carry(&wa, &wd).unwrap();
        prop_assert_eq!(eval_word(&trace.result).unwrap(), expected);
    }

    #[test]
    fn carry_flags_match_inductive_rule((a, d) in pair_below_one()) {
        let sys = MixedRadixSystem::constant(5);
        let abar: Vec<u64> = a.iter().zip(&d).map(|(x, y)| x + y).collect();
        let trace = add_with_carry(&w(&sys, &a), &w(&sys, &d)).unwrap();
        prop_assert_eq!(&trace.beta, &beta_by_induction(&abar));
        for (i, s) in abar.iter().enumerate() {
            prop_assert_eq!(trace.result.digits[i], (s + trace.beta[i] as u64) % 5);
        }
    }

    #[test]
    fn segment_identity_between_overflow_positions((a, d) in pair_below_one()) {
        let sys = MixedRadixSystem::constant(5);
        let abar: Vec<u64> = a.iter().zip(&d).map(|(x, y)| x + y).collect();
        let trace = add_with_carry(&w(&sys, &a), &w(&sys, &d)).unwrap();
        let over: Vec<usize> = (0..abar.len()).filter(|&i| abar[i] > 4).collect();
        let term = |digit: u64, i: usize| Rational::from_integer(BigInt::from(digit)) / pow5(i + 1);
        for pair in over.windows(2) {
            let (b, b2) = (pair[0], pair[1]);
            let lhs: Rational = (b + 1..=b2).map(|i| term(abar[i], i)).sum();
            let mid: Rational = (b + 1..b2).map(|i| term(trace.result.digits[i], i)).sum();
            let rhs = term(trace.beta[b] as u64, b) + mid + term(abar[b2] % 5, b2);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn equal_length_words_have_distinct_values(
        radix in 2u64..8,
        a in proptest::collection::vec(0u64..8, 1..12),
        b in proptest::collection::vec(0u64..8, 1..12),
    ) {
        let len = a.len().min(b.len());
        let sys = MixedRadixSystem::constant(radix);
        let a: Vec<u64> = a[..len].iter().map(|x| x % radix).collect();
        let b: Vec<u64> = b[..len].iter().map(|x| x % radix).collect();
        let (va, vb) = (eval_word(&w(&sys, &a)).unwrap(), eval_word(&w(&sys, &b)).unwrap());
        prop_assert_eq!(a == b, va == vb);
    }
}

#[test]
fn q_is_strictly_increasing_and_at_least_powers_of_two() {
    let systems = [
        MixedRadixSystem::constant(2),
        MixedRadixSystem::constant(3),
        MixedRadixSystem::cl(),
        MixedRadixSystem::null_meager(Schedule::linear()),
        MixedRadixSystem::null_meager(Schedule::new(vec![0, 3, 7]).unwrap()),
    ];
    for sys in &systems {
        let mut prev = BigUint::one();
        for i in 0..30 {
            let q = q_denominator(sys, i);
            assert!(q > prev);
            assert!(q >= BigUint::one() << (i + 1));
            prev = q;
        }
    }
}

#[test]
fn expansion_never_ends_in_maximal_digits() {
    let sys = MixedRadixSystem::constant(3);
    // 1/3 = 0.1000... (not 0.0222...)
    let word = expand(&rat(1, 3), &sys, 6).unwrap();
    assert_eq!(word.digits, vec![1, 0, 0, 0, 0, 0]);
    assert!(expand(&Rational::zero(), &sys, 3).unwrap().digits.iter().all(|&d| d == 0));
}
