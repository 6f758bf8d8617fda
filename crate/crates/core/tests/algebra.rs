use cesaro_core::exact::{rat, LinearFactor, Monomial, MultiPoly, RatFun, Rational, Var};
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::array::uniform4(0u16..=2), rational()), 0..6)
        .prop_map(|terms| MultiPoly::from_terms(terms.into_iter().map(|(e, c)| (Monomial(e), c))))
}

fn poly_without(v: Var) -> impl Strategy<Value = MultiPoly> {
    poly().prop_map(move |p| p.eval(&[(v, Rational::zero())]))
}

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(Var::ALL.to_vec())
}

fn point() -> impl Strategy<Value = Vec<(Var, Rational)>> {
    prop::array::uniform4(rational()).prop_map(|xs| Var::ALL.iter().copied().zip(xs).collect())
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a + &MultiPoly::zero(), a.clone());
        prop_assert_eq!(&a * &MultiPoly::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(-(-a.clone()), a);
    }

    #[test]
    fn divide_exact_inverts_multiplication(p in poly(), v in var(), offset in 0i64..5, q in poly()) {
        let factor = LinearFactor::new(v, q.eval(&[(v, Rational::zero())]) + MultiPoly::int(offset));
        let product = &p * &factor.to_poly();
        prop_assert_eq!(product.divide_exact(&factor).unwrap(), p.clone());
        let (quotient, remainder) = p.divide_linear(&factor);
        prop_assert!(!remainder.contains(v));
        prop_assert_eq!(quotient * factor.to_poly() + remainder, p);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), at in point()) {
        let va = a.value_at(&at).unwrap();
        let vb = b.value_at(&at).unwrap();
        prop_assert_eq!((&a + &b).value_at(&at).unwrap(), &va + &vb);
        prop_assert_eq!((&a * &b).value_at(&at).unwrap(), &va * &vb);
    }

    #[test]
    fn ratfun_equality_is_an_equivalence(p in poly_without(Var::K), s in rational(), t in 1i64..6, extra in 1i64..6) {
        prop_assume!(!s.is_zero());
        let factors = vec![LinearFactor::shifted(Var::K, t), LinearFactor::shifted(Var::K, t + 1)];
        let a = RatFun::new(p.clone(), factors.clone(), s.clone());
        // the same function with a common factor inserted above and below
        let common = LinearFactor::shifted(Var::K, t + extra + 1);
        let mut wider = factors.clone();
        wider.push(common.clone());
        let b = RatFun::new(&p * &common.to_poly(), wider, s.clone());
        let c = RatFun::new(p.scale(&s), factors, Rational::from_integer(1.into()));
        prop_assert!(a.equals(&a));
        prop_assert!(a.equals(&b) && b.equals(&a));
        prop_assert!(b.equals(&c) && a.equals(&c));
        prop_assert!(a.cross_residual(&b).is_zero());
        prop_assert_eq!(&a, &b);
    }

    #[test]
    fn ratfun_arithmetic_commutes_with_evaluation(
        p in poly_without(Var::K),
        q in poly_without(Var::K),
        t in 1i64..5,
        u in 1i64..5,
        k in 0i64..20,
    ) {
        let a = RatFun::new(p, vec![LinearFactor::shifted(Var::K, t)], rat(1, 1));
        let b = RatFun::new(q, vec![LinearFactor::shifted(Var::K, u)], rat(1, 1));
        let at = [(Var::I, rat(2, 3)), (Var::J, rat(5, 1)), (Var::K, rat(k, 1)), (Var::N, rat(0, 1))];
        let va = a.value_at(&at).unwrap();
        let vb = b.value_at(&at).unwrap();
        prop_assert_eq!(a.add(&b).value_at(&at).unwrap(), &va + &vb);
        prop_assert_eq!(a.sub(&b).value_at(&at).unwrap(), &va - &vb);
        prop_assert_eq!(a.mul(&b).value_at(&at).unwrap(), &va * &vb);
    }

    #[test]
    fn shift_matches_substitution(p in poly(), v in var(), by in rational(), at in point()) {
        let shifted = p.shift(v, &by);
        let moved: Vec<(Var, Rational)> = at
            .iter()
            .map(|(w, x)| if *w == v { (*w, x + &by) } else { (*w, x.clone()) })
            .collect();
        prop_assert_eq!(shifted.value_at(&at).unwrap(), p.value_at(&moved).unwrap());
    }
}
