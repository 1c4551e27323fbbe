use graded_posets::exchange::{parse_poset, write_poset};
use graded_posets::structure::{
    avoids_via_word, compose_quarks, decompose_ordinal, is_legal, is_sum_indecomposable, ordinal_sum, quark_decompose,
    trim, word_of,
};
use graded_posets::{Bounds, Join, LegalityMode, Poset, Quark, RankedPoset, TruncatedSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const B: Bounds = Bounds { x: 3, z: 3, t: 2 };

fn series() -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(-3i64..=3, (B.x + 1) * (B.z + 1) * (B.t + 1)).prop_map(|cs| {
        let mut s = TruncatedSeries::zero(B);
        let mut it = cs.into_iter();
        for i in 0..=B.x {
            for j in 0..=B.z {
                for k in 0..=B.t {
                    s.set_coeff(i, j, k, BigRational::from_integer(BigInt::from(it.next().unwrap()))).unwrap();
                }
            }
        }
        s
    })
}

fn quark(max: usize) -> impl Strategy<Value = Quark> {
    (1..=max, 1..=max)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), prop::collection::vec(0u64..(1 << n), m)))
        .prop_map(|(m, n, rows)| Quark::from_rows(m, n, rows))
        .prop_filter_map("valid quark", Result::ok)
}

fn join() -> impl Strategy<Value = Join> {
    prop_oneof![Just(Join::S), Just(Join::G)]
}

/// A random order on `n ≤ 8` points from pairs `i < j`.
fn poset() -> impl Strategy<Value = Poset> {
    (0usize..=8).prop_flat_map(|n| {
        prop::collection::vec((0..n.max(1), 0..n.max(1)), 0..=2 * n).prop_map(move |pairs| {
            let pairs: Vec<_> = pairs.into_iter().filter(|(a, b)| a < b).collect();
            Poset::from_relations(n, &pairs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, max_global_rejects: 1 << 20, max_local_rejects: 1 << 20, ..ProptestConfig::default() })]

    #[test]
    fn series_ring_laws(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn series_inverse(a in series()) {
        let c = a.coeff(0, 0, 0);
        let a = if c == BigRational::from_integer(0.into()) { &a + &TruncatedSeries::one(B) } else { a };
        let inv = a.invert().unwrap();
        prop_assert_eq!(&a * &inv, TruncatedSeries::one(B));
    }

    #[test]
    fn z_substitution_is_a_ring_map(a in series(), b in series(), r in series()) {
        // The substituted series must be in x alone with no constant term.
        let r = &r - &TruncatedSeries::constant(B, r.coeff(0, 0, 0));
        let r = r.z_layer(0).t_layer(0);
        let lhs = (&a * &b).subst_z(&r).unwrap();
        let rhs = &a.subst_z(&r).unwrap() * &b.subst_z(&r).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!((&a + &b).subst_z(&r).unwrap(), &a.subst_z(&r).unwrap() + &b.subst_z(&r).unwrap());
    }

    #[test]
    fn avoidance_criteria_agree(p in poset()) {
        prop_assert_eq!(parse_poset(&write_poset(&p)).unwrap(), p.clone());
        if let Some(r) = RankedPoset::from_poset(p.clone()) {
            let avoids = !p.contains_3plus1();
            prop_assert_eq!(r.local_avoidance_check(), avoids);
            prop_assert_eq!(r.distant_avoidance_check(), avoids);
            prop_assert!(r.is_valid_rank_function());
            prop_assert!(p.longest_chain() <= r.height());
            if r.is_strongly_graded() {
                prop_assert_eq!(r.height(), p.longest_chain());
            }
            if r.is_vigilant() {
                let t = trim(&r).unwrap();
                prop_assert!(t.is_trimmed());
                prop_assert_eq!(!t.poset().contains_3plus1(), avoids);
                let parts = decompose_ordinal(&t);
                prop_assert!(parts.iter().all(is_sum_indecomposable));
                let rebuilt = parts.iter().fold(graded_posets::TrimmedPoset::empty(), |acc, s| ordinal_sum(&acc, s));
                prop_assert_eq!(rebuilt.len(), t.len());
                prop_assert_eq!(rebuilt.height(), t.height());
            }
        }
    }

    #[test]
    fn quark_composition_round_trips(
        q0 in quark(3),
        middle in prop::collection::vec(quark(3), 0..3),
        last in quark(3),
        joins in prop::collection::vec(join(), 3),
    ) {
        prop_assume!(q0.is_bottom() && last.is_top() && middle.iter().all(Quark::is_middle));
        let mut qs = middle;
        qs.push(last);
        let joins = &joins[..qs.len()];
        let t = compose_quarks(&q0, joins, &qs).unwrap();
        prop_assert!(t.is_trimmed());
        prop_assert!(is_sum_indecomposable(&t));
        prop_assert!(t.ranked().is_strongly_graded());
        let d = quark_decompose(&t).unwrap();
        prop_assert_eq!(d.recompose().unwrap(), t.clone());
        let word = word_of(&t).unwrap();
        prop_assert_eq!(word.quark_count(), qs.len() + 1);
        prop_assert_eq!(&word.joins()[1..=qs.len()], joins);
        let avoids = !t.poset().contains_3plus1();
        prop_assert_eq!(is_legal(&word, LegalityMode::Strong), avoids);
        prop_assert_eq!(avoids_via_word(&t, LegalityMode::Strong).unwrap(), avoids);
    }

    #[test]
    fn ordinal_sums_decompose_back(
        a in (quark(2), quark(2), join()),
        b in (quark(2), quark(2), join()),
    ) {
        prop_assume!(a.0.is_bottom() && a.1.is_top() && b.0.is_bottom() && b.1.is_top());
        let lower = compose_quarks(&a.0, &[a.2], std::slice::from_ref(&a.1)).unwrap();
        let upper = compose_quarks(&b.0, &[b.2], std::slice::from_ref(&b.1)).unwrap();
        let sum = ordinal_sum(&lower, &upper);
        prop_assert_eq!(decompose_ordinal(&sum), vec![lower.clone(), upper.clone()]);
        prop_assert_eq!(
            sum.poset().contains_3plus1(),
            lower.poset().contains_3plus1() || upper.poset().contains_3plus1()
        );
    }
}
