use num_bigint::BigInt;
use proptest::prelude::*;
use virtmod::arith::{euclidean_divide, extended_gcd, factor, normalize_unit, Element, RingTag};

fn ring() -> impl Strategy<Value = RingTag> {
    prop_oneof![
        Just(RingTag::Integers),
        Just(RingTag::poly_fp(2).unwrap()),
        Just(RingTag::poly_fp(7).unwrap()),
        Just(RingTag::PolyOverRationals),
    ]
}

fn element_in(ring: RingTag) -> BoxedStrategy<Element> {
    match ring.x() {
        None => (-10_000i64..10_000).prop_map(move |v| ring.from_i64(v)).boxed(),
        Some(x) => prop::collection::vec(-6i64..6, 0..6)
            .prop_map(move |cs| {
                cs.iter()
                    .enumerate()
                    .fold(ring.zero(), |acc, (k, &c)| &acc + &(&ring.from_i64(c) * &x.pow(k as u32)))
            })
            .boxed(),
    }
}

fn triple() -> impl Strategy<Value = (Element, Element, Element)> {
    ring().prop_flat_map(|r| (element_in(r), element_in(r), element_in(r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &a.ring().one(), a.clone());
    }

    #[test]
    fn division_with_remainder((a, b, _) in triple()) {
        prop_assume!(!b.is_zero());
        let (q, r) = euclidean_divide(&a, &b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.is_zero() || r.euclidean_size() < b.euclidean_size());
    }

    #[test]
    fn bezout_identity((a, b, _) in triple()) {
        if a.is_zero() && b.is_zero() {
            prop_assert!(extended_gcd(&a, &b).is_err());
            return Ok(());
        }
        let (g, x, y) = extended_gcd(&a, &b).unwrap();
        prop_assert_eq!(&(&x * &a) + &(&y * &b), g.clone());
        prop_assert_eq!(g.canonical(), g.clone());
        prop_assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn canonical_associates((a, _, _) in triple()) {
        prop_assume!(!a.is_zero());
        let (unit, canon) = normalize_unit(&a).unwrap();
        prop_assert!(unit.is_unit());
        prop_assert_eq!(&unit * &canon, a.clone());
        prop_assert_eq!(canon.canonical(), canon);
    }

    #[test]
    fn integer_factorization_expands(n in 2i64..1_000_000_000) {
        let z = RingTag::Integers;
        let f = factor(&z.from_i64(n)).unwrap();
        prop_assert_eq!(f.expand(), z.from_i64(n));
        for (p, e) in &f.factors {
            prop_assert!(*e >= 1);
            let p = p.as_int().unwrap().clone();
            prop_assert!(p > BigInt::from(1));
        }
    }

    #[test]
    fn polynomial_factorization_expands(cs in prop::collection::vec(0i64..5, 2..7)) {
        let r = RingTag::poly_fp(5).unwrap();
        let x = r.x().unwrap();
        let f = cs.iter().enumerate().fold(r.zero(), |acc, (k, &c)| &acc + &(&r.from_i64(c) * &x.pow(k as u32)));
        if f.is_zero() || f.is_unit() {
            prop_assert!(factor(&f).is_err());
            return Ok(());
        }
        let fac = factor(&f).unwrap();
        prop_assert_eq!(fac.expand(), f);
    }
}
