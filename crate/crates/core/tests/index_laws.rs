use acalc::a_spaces::{double_space, Tower};
use acalc::index_algebra::{laws, normalize, IndexFamily, IndexSet, IndexTerm};
use acalc::rational::{int, Rational};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = IndexTerm> {
    (-30i64..=30, 1i64..=3, prop_oneof![4 => Just(0i64), 1 => -1i64..=1], 0u32..=3)
        .prop_map(|(n, d, im, p)| IndexTerm::complex(Rational::new(n.into(), d.into()), int(im), p))
}

fn set() -> impl Strategy<Value = IndexSet> {
    prop::collection::vec(term(), 0..4).prop_map(normalize)
}

fn q() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalize_is_idempotent(terms in prop::collection::vec(term(), 0..6), probes in prop::collection::vec(term(), 0..6)) {
        prop_assert!(laws::normalize_idempotent(&terms, &probes));
    }

    #[test]
    fn addition(a in set(), b in set(), c in set()) {
        prop_assert!(laws::add_laws(&a, &b, &c, &int(10), 6));
    }

    #[test]
    fn ext_union_commutes(a in set(), b in set()) {
        prop_assert!(laws::ext_union_commutative(&a, &b));
    }

    #[test]
    fn ext_union_associates(a in set(), b in set(), c in set()) {
        prop_assert!(laws::ext_union_associative(&a, &b, &c, &int(10), 6));
    }

    #[test]
    fn inf_is_additive(a in set(), b in set()) {
        prop_assert!(laws::inf_additive(&a, &b));
    }

    #[test]
    fn shifts_add(a in set(), v in q(), w in q()) {
        prop_assert!(laws::shift_additive(&a, &v, &w));
    }

    #[test]
    fn permutation_pullback_pushforward(sets in prop::collection::vec(set(), 5), sigma in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
        let d = double_space(&Tower::depth2(1, 2, 1, 1, 1)).unwrap();
        let mut e = IndexFamily::new();
        for (name, s) in d.space.face_names().iter().zip(sets) {
            e.set(name, s);
        }
        prop_assert!(laws::permutation_round_trip(&d.space, &sigma, &e));
    }
}
