use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::*;

fn q_ring() -> Arc<Ring> {
    Ring::new(["q"]).unwrap()
}

fn abq() -> Arc<Ring> {
    Ring::new(["alpha", "beta", "q"]).unwrap()
}

fn p(r: &Arc<Ring>, s: &str) -> MultiPoly {
    MultiPoly::parse(r, s).unwrap()
}

#[test]
fn difference_of_squares() {
    let r = q_ring();
    assert_eq!((p(&r, "q + 1") * p(&r, "q - 1")).to_string(), "q^2 - 1");
}

#[test]
fn common_factor_of_example_chain() {
    let r = q_ring();
    let prod = p(&r, "q + 1") * p(&r, "2*q^2 - q + 2");
    assert_eq!(prod.to_string(), "2*q^3 + q^2 + q + 2");
}

#[test]
fn distributivity_example() {
    let r = abq();
    let s = p(&r, "alpha*beta") + p(&r, "alpha*beta*q");
    assert_eq!(s.len(), 2);
    assert_eq!(s, p(&r, "alpha*beta*(1 + q)"));
}

#[test]
fn ring_mismatch_is_an_error() {
    let a = p(&q_ring(), "q");
    let b = p(&abq(), "q");
    assert!(matches!(
        arith(&a, &b, ArithOp::Add),
        Err(PolyError::RingMismatch { .. })
    ));
    assert!(matches!(a.exact_div(&b), Err(PolyError::RingMismatch { .. })));
}

#[test]
fn exact_division_examples() {
    let r = q_ring();
    let a = p(&r, "2*q^3 + q^2 + q + 2");
    assert_eq!(a.exact_div(&p(&r, "q + 1")).unwrap().to_string(), "2*q^2 - q + 2");
    assert_eq!(a.exact_div(&MultiPoly::one(&r)).unwrap(), a);
    assert_eq!(
        p(&r, "q^2 - 1").exact_div(&p(&r, "q + 2")),
        Err(PolyError::NotDivisible)
    );
    assert_eq!(a.exact_div(&MultiPoly::zero(&r)), Err(PolyError::DivisionByZero));
    // integer remainder is also a failure
    assert_eq!(
        p(&r, "2*q + 1").exact_div(&p(&r, "2")),
        Err(PolyError::NotDivisible)
    );
}

#[test]
fn gcd_examples() {
    let r = q_ring();
    let g = gcd(&p(&r, "2*q^3 + q^2 + q + 2"), &p(&r, "q^3 + q^2 + 2*q + 2")).unwrap();
    assert_eq!(g.to_string(), "q + 1");
    let a = p(&r, "6*q^2 - 4");
    assert_eq!(gcd(&a, &MultiPoly::zero(&r)).unwrap().to_string(), "3*q^2 - 2");
    assert_eq!(
        gcd(&p(&r, "q^2 - 1"), &p(&r, "q^2 + 2*q + 1")).unwrap().to_string(),
        "q + 1"
    );
    assert_eq!(
        gcd(&MultiPoly::zero(&r), &MultiPoly::zero(&r)),
        Err(PolyError::ZeroGcd)
    );
}

#[test]
fn gcd_multivariate() {
    let r = abq();
    let g = p(&r, "alpha*beta + q");
    let a = &g * &p(&r, "alpha^2 - beta");
    let b = &g * &p(&r, "(alpha + q)^2");
    assert_eq!(gcd(&a, &b).unwrap(), g);
    // monomial factors are kept
    assert_eq!(
        gcd(&p(&r, "alpha^2*beta*(q + 1)"), &p(&r, "alpha*beta^3*(q + 1)*(q - 1)")).unwrap(),
        p(&r, "alpha*beta*(q + 1)")
    );
}

#[test]
fn evaluate_examples() {
    let r = abq();
    let z2 = p(&r, "alpha^2 + alpha*beta*(alpha + beta + q) + alpha*beta + beta^2");
    let ones = assignment([("alpha", 1, 1), ("beta", 1, 1), ("q", 1, 1)]);
    assert_eq!(z2.evaluate(&ones).unwrap(), BigRational::from_integer(6.into()));
    assert_eq!(
        MultiPoly::zero(&r).evaluate(&ones).unwrap(),
        BigRational::from_integer(0.into())
    );
    let half = assignment([("alpha", 1, 2), ("beta", 1, 3), ("q", 2, 1)]);
    // 1/4 + 1/6*(1/2 + 1/3 + 2) + 1/6 + 1/9
    let expected = BigRational::new(1.into(), 4.into())
        + BigRational::new(1.into(), 6.into()) * BigRational::new(17.into(), 6.into())
        + BigRational::new(1.into(), 6.into())
        + BigRational::new(1.into(), 9.into());
    assert_eq!(z2.evaluate(&half).unwrap(), expected);
    let partial = assignment([("alpha", 1, 1)]);
    assert_eq!(
        z2.evaluate(&partial),
        Err(PolyError::MissingVariable("beta".into()))
    );
}

#[test]
fn render_format() {
    let r = abq();
    assert_eq!(
        p(&r, "alpha*beta*(alpha + beta + q)").to_string(),
        "alpha^2*beta + alpha*beta^2 + alpha*beta*q"
    );
    assert_eq!(p(&r, "-q^2 + 3*alpha - 1").to_string(), "3*alpha - q^2 - 1");
    assert_eq!(p(&r, "-alpha").to_string(), "-alpha");
    assert_eq!(MultiPoly::zero(&r).to_string(), "0");
    assert_eq!(p(&r, "-7").to_string(), "-7");
}

#[test]
fn parse_errors() {
    let r = abq();
    assert!(matches!(
        MultiPoly::parse(&r, "gamma + 1"),
        Err(PolyError::UnknownVariable(_))
    ));
    assert!(matches!(MultiPoly::parse(&r, "q +"), Err(PolyError::Parse { .. })));
    assert!(matches!(MultiPoly::parse(&r, "(q"), Err(PolyError::Parse { .. })));
    assert!(matches!(MultiPoly::parse(&r, "q^x"), Err(PolyError::Parse { .. })));
}

#[test]
fn ring_construction_rules() {
    assert!(matches!(
        Ring::new(["q", "q"]),
        Err(PolyError::DuplicateVariable(_))
    ));
    assert!(matches!(
        Ring::new(["1x"]),
        Err(PolyError::InvalidVariableName(_))
    ));
    let many: Vec<String> = (0..=MAX_VARS).map(|i| format!("x{i}")).collect();
    assert!(matches!(Ring::new(many), Err(PolyError::TooManyVariables(_))));
}

#[test]
fn change_of_ring_by_name() {
    let small = abq();
    let big = Ring::new(["alpha", "beta", "gamma", "delta", "q"]).unwrap();
    let f = p(&big, "alpha*q + beta^2");
    let g = f.to_ring(&small).unwrap();
    assert_eq!(g.to_string(), "alpha*q + beta^2");
    assert_eq!(g.to_ring(&big).unwrap(), f);
    let h = p(&big, "gamma + 1");
    assert!(matches!(h.to_ring(&small), Err(PolyError::UnknownVariable(_))));
    assert_eq!(
        p(&big, "gamma*alpha + delta + beta").substitute(&[("gamma", 0), ("delta", 0)]).unwrap(),
        p(&big, "beta")
    );
}

// ---- property tests -------------------------------------------------------

fn small_poly(ring: Arc<Ring>) -> impl Strategy<Value = MultiPoly> {
    let nvars = ring.nvars();
    prop::collection::vec(
        (prop::collection::vec(0u16..4, nvars), -9i64..10),
        0..6,
    )
    .prop_map(move |terms| {
        MultiPoly::from_terms(
            &ring,
            terms
                .into_iter()
                .map(|(e, c)| (Monomial::from_exponents(&e), BigInt::from(c)))
                .collect::<Vec<_>>(),
        )
    })
}

fn three() -> Arc<Ring> {
    Ring::new(["a", "b", "c"]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(a in small_poly(three()), b in small_poly(three()), c in small_poly(three())) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn exact_div_round_trip(a in small_poly(three()), b in small_poly(three())) {
        prop_assume!(!b.is_zero());
        let prod = &a * &b;
        prop_assert_eq!(prod.exact_div(&b).unwrap(), a);
    }

    #[test]
    fn gcd_divides_and_scales(a in small_poly(three()), b in small_poly(three()), g in small_poly(three())) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let h = gcd(&a, &b).unwrap();
        prop_assert!(a.is_divisible_by(&h));
        prop_assert!(b.is_divisible_by(&h));
        prop_assume!(!g.is_zero());
        let g = g.primitive_part();
        let hg = gcd(&(&a * &g), &(&b * &g)).unwrap();
        prop_assert_eq!(hg, (&h * &g).primitive_part());
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        a in small_poly(three()),
        b in small_poly(three()),
        x in -5i64..6, y in -5i64..6, z in 1i64..6,
    ) {
        let pt = assignment([("a", x, 1), ("b", y, 1), ("c", 1, z)]);
        let ab = (&a * &b).evaluate(&pt).unwrap();
        prop_assert_eq!(ab, a.evaluate(&pt).unwrap() * b.evaluate(&pt).unwrap());
    }

    #[test]
    fn render_parse_round_trip(a in small_poly(three())) {
        let text = a.to_string();
        prop_assert_eq!(MultiPoly::parse(a.ring(), &text).unwrap(), a);
    }

    #[test]
    fn kernel_annihilates(entries in prop::collection::vec(small_poly(three()), 6)) {
        // random 3x3 rate matrix: off-diagonals given, diagonal balances rows
        let r = three();
        let mut m = PolyMatrix::zeros(&r, 3, 3);
        let mut k = 0;
        for i in 0..3 {
            let mut diag = MultiPoly::zero(&r);
            for j in 0..3 {
                if i != j {
                    m.set(i, j, entries[k].clone());
                    diag = &diag - &entries[k];
                    k += 1;
                }
            }
            m.set(i, i, diag);
        }
        if let Ok(v) = m.left_kernel() {
            prop_assert!(m.left_apply(&v).unwrap().iter().all(MultiPoly::is_zero));
            let content = v.iter().fold(BigInt::from(0), |g, p| num_integer::Integer::gcd(&g, &p.content()));
            prop_assert_eq!(content, BigInt::from(1));
        }
    }
}
