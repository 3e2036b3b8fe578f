use acalc::a_spaces::Tower;
use acalc::op_calculus::{adjoint, compose, order_bookkeeping, random_class, small, CalcError, Order, Weight};
use acalc::rational::Rational;
use proptest::prelude::*;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_reverses_composition(seed in any::<u64>(), a1 in 1u32..=3, a2 in 1u32..=3) {
        let t = Tower::depth2(a1, a2, 1, 1, 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (random_class(&t, &mut rng, 5, 3), random_class(&t, &mut rng, 5, 3));
        match compose(&p, &q) {
            Ok(pq) => {
                let qp = compose(&adjoint(&q), &adjoint(&p)).unwrap();
                prop_assert_eq!(adjoint(&pq), qp);
            }
            Err(CalcError::NonIntegrable { .. }) => {
                prop_assert!(compose(&adjoint(&q), &adjoint(&p)).is_err());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
        prop_assert_eq!(adjoint(&adjoint(&p)), p);
    }

    #[test]
    fn small_classes_close(m in -3i64..=3, m2 in -3i64..=3, c in 0i64..=4, c2 in 0i64..=4) {
        let t = Tower::depth2(1, 2, 1, 1, 1);
        let got = compose(&small(&t, Order::int(m), Weight::int(c)), &small(&t, Order::int(m2), Weight::int(c2))).unwrap();
        prop_assert_eq!(got, small(&t, Order::int(m + m2), Weight::int(c + c2)));
    }

    #[test]
    fn order_arithmetic(mn in -12i64..=12, md in 1i64..=4, m2n in -12i64..=12, m2d in 1i64..=4, n in 1usize..=12) {
        let m = Rational::new(mn.into(), md.into());
        let m2 = Rational::new(m2n.into(), m2d.into());
        let steps = order_bookkeeping(&m, &m2, n);
        prop_assert_eq!(steps[4].clone(), &m + &m2);
    }
}
