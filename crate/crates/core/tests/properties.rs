use proptest::prelude::*;
use tame_core::automorphism::{compose, elementary, ElementaryData, Endo};
use tame_core::presentation::{evaluate, normalize, rewrite_merge, Gen, Word};
use tame_core::{Monomial, Polynomial, Rational};

fn poly_in(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let term = (prop::collection::vec(0..=max_exp, nvars), -6i64..=6, 1i64..=4);
    prop::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
        Polynomial::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(e, n, d)| (Monomial::from_exponents(&e), Rational::new(n.into(), d.into()))),
        )
    })
}

fn poly() -> impl Strategy<Value = Polynomial> {
    poly_in(3, 3, 5)
}

fn endo() -> impl Strategy<Value = Endo> {
    prop::collection::vec(poly_in(3, 2, 3), 3).prop_map(|v| Endo::new(v).unwrap())
}

fn letter() -> impl Strategy<Value = ElementaryData> {
    (1usize..=3, -3i64..=3, 1i64..=2, poly_in(3, 2, 3)).prop_map(|(i, n, d, f)| {
        let alpha = if n == 0 { Rational::from_integer(1.into()) } else { Rational::new(n.into(), d.into()) };
        // drop x_i from f
        let f = Polynomial::from_terms(3, f.terms().filter(|(m, _)| m.exponents()[i - 1] == 0).map(|(m, c)| (m.clone(), c.clone())));
        ElementaryData { index: i, alpha, f }
    })
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec((letter(), any::<bool>()), 0..5).prop_map(|ls| {
        Word::new(3, ls.into_iter().map(|(l, inv)| if inv { Gen::plain(l).inverse() } else { Gen::plain(l) }).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(3), a.clone());
    }

    #[test]
    fn degree_is_additive(a in poly(), b in poly()) {
        prop_assert_eq!((&a * &b).total_degree(), a.total_degree() + b.total_degree());
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!((&a * &b).top(), &a.top() * &b.top());
    }

    #[test]
    fn substitution_is_a_homomorphism(a in poly(), b in poly(), e in endo()) {
        let imgs = e.images();
        prop_assert_eq!((&a * &b).subst(imgs), &a.subst(imgs) * &b.subst(imgs));
        prop_assert_eq!((&a + &b).subst(imgs), &a.subst(imgs) + &b.subst(imgs));
    }

    #[test]
    fn compose_is_associative(a in endo(), b in endo(), c in endo()) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn chain_rule(p in poly(), e in endo(), i in 0usize..3) {
        let lhs = p.subst(e.images()).diff(i);
        let mut rhs = Polynomial::zero(3);
        for k in 0..3 {
            rhs = &rhs + &(&p.diff(k).subst(e.images()) * &e.image(k).diff(i));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobian_is_multiplicative(a in endo(), b in endo()) {
        let c = compose(&a, &b).unwrap();
        prop_assert_eq!(c.jacobian_det(), &a.jacobian_det() * &b.jacobian_det().subst(a.images()));
    }

    #[test]
    fn letters_invert(l in letter()) {
        let e = elementary(&l);
        prop_assert!(compose(&e, &elementary(&l.inverse())).unwrap().is_identity());
        prop_assert!(compose(&elementary(&l.inverse()), &e).unwrap().is_identity());
    }

    #[test]
    fn rewrites_preserve_evaluation(w in word()) {
        let e = evaluate(&w);
        prop_assert_eq!(evaluate(&rewrite_merge(&w)), e.clone());
        prop_assert_eq!(evaluate(&normalize(&w)), e.clone());
        prop_assert!(evaluate(&w.concat(&w.inverse())).is_identity());
    }

    #[test]
    fn polynomial_display_round_trips(a in poly()) {
        prop_assert_eq!(Polynomial::parse(&a.to_string(), 3).unwrap(), a);
    }

    #[test]
    fn word_display_round_trips(w in word()) {
        let back = Word::parse(&w.to_string(), 3).unwrap();
        prop_assert_eq!(evaluate(&back), evaluate(&w));
        prop_assert_eq!(back.len(), w.len());
    }

    #[test]
    fn map_display_round_trips(e in endo()) {
        prop_assert_eq!(Endo::parse(&e.to_string(), 3).unwrap(), e);
    }
}
