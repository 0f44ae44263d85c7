use std::sync::Arc;

use asep::poly::{gcd, BigInt, Monomial, MultiPoly, Ring};
use proptest::prelude::*;

fn ring() -> Arc<Ring> {
    Ring::new(["a", "b", "c"]).unwrap()
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u16..4, 0u16..4, 0u16..3), -9i64..10), 0..6).prop_map(|terms| {
        let r = ring();
        MultiPoly::from_terms(
            &r,
            terms
                .into_iter()
                .map(|((x, y, z), c)| (Monomial::from_exponents(&[x, y, z]), BigInt::from(c))),
        )
    })
}

fn nonzero() -> impl Strategy<Value = MultiPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn point() -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec((-20i64..21).prop_map(BigInt::from), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        let zero = MultiPoly::zero(&ring());
        let one = MultiPoly::one(&ring());
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &zero, a.clone());
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a * &zero).is_zero());
    }

    /// Evaluation is a ring homomorphism into the integers.
    #[test]
    fn evaluation_oracle(a in poly(), b in poly(), x in point()) {
        prop_assert_eq!((&a * &b).eval_int(&x), a.eval_int(&x) * b.eval_int(&x));
        prop_assert_eq!((&a + &b).eval_int(&x), a.eval_int(&x) + b.eval_int(&x));
        prop_assert_eq!((&a - &b).eval_int(&x), a.eval_int(&x) - b.eval_int(&x));
    }

    #[test]
    fn exact_division_round_trip(a in poly(), b in nonzero()) {
        let prod = &a * &b;
        prop_assert_eq!(prod.exact_div(&b).unwrap(), a);
        prop_assert!(prod.is_divisible_by(&b));
    }

    #[test]
    fn gcd_round_trip(a in nonzero(), b in nonzero(), c in nonzero()) {
        let (x, y) = (&a * &c, &b * &c);
        let g = gcd(&x, &y).unwrap();
        prop_assert!(x.is_divisible_by(&g));
        prop_assert!(y.is_divisible_by(&g));
        prop_assert!(g.is_divisible_by(&c.primitive_part()));
        prop_assert_eq!(g.content(), BigInt::from(1));
        // cofactors are coprime
        let h = gcd(&x.exact_div(&g).unwrap(), &y.exact_div(&g).unwrap()).unwrap();
        prop_assert!(h.is_constant());
    }

    #[test]
    fn parse_display_round_trip(a in poly()) {
        let text = a.to_string();
        prop_assert_eq!(MultiPoly::parse(&ring(), &text).unwrap(), a);
    }
}
