use haarlab_core::certifier::{
    carry_intersection_point, certify_empty_intersection, check, cl_common_point, refute_haar_finite_x, Certificate,
    Status,
};
use haarlab_core::constructions::{gap_set, ternary};
use haarlab_core::digits::{l_set, DigitSetExpr, FamilyKind};
use haarlab_core::interval::IntervalUnion;
use haarlab_core::numeric::{expand, rat, Rational};
use proptest::prelude::*;

fn translate_strategy() -> impl Strategy<Value = Rational> {
    prop_oneof![(0i64..27).prop_map(|n| rat(n, 27)), (0i64..60, 1i64..60).prop_map(|(n, d)| rat(n % d, d)),]
}

fn set_strategy() -> impl Strategy<Value = DigitSetExpr> {
    prop_oneof![Just(ternary()), Just(gap_set(5).unwrap())]
}

/// `⋂_i (proj - t_i)` by plain interval algebra.
fn projected_intersection(set: &DigitSetExpr, translates: &[Rational], depth: usize) -> IntervalUnion {
    let proj = set.project(depth).unwrap();
    translates
        .iter()
        .fold(proj.translate(&-translates[0].clone()), |acc, t| acc.intersect(&proj.translate(&-t.clone())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zero_pad_result_matches_interval_algebra(
        set in set_strategy(),
        translates in prop::collection::vec(translate_strategy(), 2..4),
        depth in 1usize..5,
    ) {
        let cert = certify_empty_intersection(&set, &translates, &[], depth).unwrap();
        let oracle = projected_intersection(&set, &translates, depth);
        prop_assert_eq!(cert.status == Status::CertifiedEmpty, oracle.is_empty());
    }

    #[test]
    fn certified_empty_persists_at_the_next_depth(
        set in set_strategy(),
        translates in prop::collection::vec(translate_strategy(), 2..4),
        depth in 1usize..5,
    ) {
        let here = certify_empty_intersection(&set, &translates, &[], depth).unwrap();
        if here.status == Status::CertifiedEmpty {
            let next = certify_empty_intersection(&set, &translates, &[], depth + 1).unwrap();
            prop_assert_eq!(next.status, Status::CertifiedEmpty);
        }
    }

    #[test]
    fn padded_certificate_covers_every_inner_translate(
        translates in prop::collection::vec(translate_strategy(), 2..4),
        pad_den in 9i64..200,
        num in 0i64..100,
        depth in 2usize..6,
    ) {
        let set = ternary();
        let pad = rat(1, pad_den);
        let pads = vec![pad.clone(); translates.len()];
        let cert = certify_empty_intersection(&set, &translates, &pads, depth).unwrap();
        if cert.status == Status::CertifiedEmpty {
            let frac = rat(num, 100);
            let inner: Vec<Rational> = translates.iter().map(|t| t + &pad * &frac).collect();
            let sub = certify_empty_intersection(&set, &inner, &[], depth).unwrap();
            prop_assert_eq!(sub.status, Status::CertifiedEmpty);
            prop_assert!(check(&cert).unwrap().ok);
        }
    }

    #[test]
    fn greedy_cl_points_reverify(nums in prop::collection::vec(1i64..1000, 11), dens in prop::collection::vec(1i64..40, 11)) {
        let translates: Vec<Rational> = nums.iter().zip(&dens).map(|(&n, &d)| rat(n % (1000 * d), 25 * 1000 * d)).collect();
        let cert = cl_common_point(0, &[0], &translates, 3).unwrap();
        prop_assert_eq!(cert.status, Status::PointFound);
        prop_assert!(check(&cert).unwrap().ok);
    }

    #[test]
    fn x_points_reverify(a in 1i64..1199, b in 1i64..999, c in 1i64..999) {
        let cs = [rat(a, 2500), rat(b, 25_000), rat(c, 1875 * 1000)];
        prop_assume!(cs[0] > cs[1] && cs[1] > cs[2]);
        let cert = refute_haar_finite_x(&cs, 4).unwrap();
        if cert.status == Status::PointFound {
            prop_assert!(check(&cert).unwrap().ok);
        } else {
            prop_assert!(leaves_l_prefix(&cert), "no escaping translate: {:?}", cs);
        }
    }

    #[test]
    fn carry_points_reverify(n in 1usize..3, base in 0i64..500, steps in prop::collection::vec(1i64..50, 2)) {
        let mut anchors = vec![rat(base, 1000)];
        for s in steps.iter().take(n) {
            let next = anchors.last().unwrap() + rat(*s, 1000);
            anchors.push(next);
        }
        let cert = carry_intersection_point(n, &anchors, 30).unwrap();
        prop_assert_eq!(cert.status, Status::PointFound);
        prop_assert!(check(&cert).unwrap().ok);
    }
}

/// Whether some `r + c_i` with `i ≥ 1` has a digit outside `L_m` at a level
/// `m < i`. The greedy choice only screens points that keep that prefix.
fn leaves_l_prefix(cert: &Certificate) -> bool {
    let x = DigitSetExpr::family(FamilyKind::X, 0);
    let point = cert.point.as_ref().unwrap();
    point.memberships.iter().enumerate().skip(1).any(|(i, m)| {
        let word = expand(&m.value, x.system(), i).unwrap();
        word.digits.iter().enumerate().any(|(level, d)| !l_set(level).contains(d))
    })
}

#[test]
fn x_point_fails_when_a_translate_leaves_the_l_prefix() {
    let cs = [rat(87, 2500), rat(869, 25_000), rat(1, 1_875_000)];
    for depth in 3..=6 {
        let cert = refute_haar_finite_x(&cs, depth).unwrap();
        assert_ne!(cert.status, Status::PointFound);
        assert!(leaves_l_prefix(&cert));
    }
}

#[test]
fn certificates_round_trip_through_json() {
    let certs = [
        certify_empty_intersection(&ternary(), &[rat(0, 1), rat(1, 9), rat(2, 9)], &vec![rat(1, 81); 3], 4).unwrap(),
        carry_intersection_point(1, &[rat(0, 1), rat(1, 25)], 12).unwrap(),
    ];
    for cert in certs {
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(check(&back).unwrap().ok);
    }
}

#[test]
fn tampered_point_fails_check() {
    let mut cert = cl_common_point(0, &[0], &[rat(1, 100)], 3).unwrap();
    let point = cert.point.as_mut().unwrap();
    point.value += rat(12, 25);
    assert!(!check(&cert).unwrap().ok);
}

#[test]
fn null_meager_point_for_extracted_branches() {
    use haarlab_core::certifier::refute_haar_countable;
    use haarlab_core::constructions::nullmeager;
    use haarlab_core::numeric::{MixedRadixSystem, Schedule};
    use haarlab_core::witness::{extract_sparse_subcantor, IncrementTree};

    let system = MixedRadixSystem::null_meager(Schedule::linear());
    let witness = extract_sparse_subcantor(IncrementTree::scaled_ternary(), system, 2).unwrap();
    let points: Vec<Rational> = witness.generation_points(2).unwrap().into_iter().map(|(_, v)| v).collect();
    assert_eq!(points.len(), 4);
    let set = nullmeager(Schedule::linear());
    for prefix in [&[][..], &[2][..]] {
        let cert = refute_haar_countable(&set, &points, prefix, 8).unwrap();
        assert_eq!(cert.status, Status::PointFound, "prefix {prefix:?}");
        assert!(check(&cert).unwrap().ok);
    }
}
