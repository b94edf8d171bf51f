use std::sync::Arc;

use hitsymp::bonahon_dreyer::{double_ratio, flag_of, rotation_check, triple_ratio, Flag};
use hitsymp::cohomology::{coboundary, cup_pairing, Cocycle};
use hitsymp::representation::{irreducible_embed, pants_representation, sl2_hyperbolic, ConstructionParams};
use hitsymp::word_algebra::{GroupRingElement, TwoChain, Word};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn codes(rank: i32, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g }), 0..=max_len)
}

fn element(rank: i32) -> impl Strategy<Value = GroupRingElement> {
    prop::collection::vec((codes(rank, 6), -5i64..=5), 0..5).prop_map(|terms| {
        GroupRingElement::from_terms(terms.into_iter().map(|(w, c)| (Word::from_codes(&w), BigInt::from(c))))
    })
}

fn gen(s: usize) -> GroupRingElement {
    GroupRingElement::from_word(Word::generator(s))
}

proptest! {
    #[test]
    fn fundamental_formula(w in codes(6, 40)) {
        let word = GroupRingElement::from_word(Word::from_codes(&w));
        let mut rhs = GroupRingElement::monomial(Word::identity(), word.augmentation());
        for s in 0..6 {
            rhs = &rhs + &(&word.fox_derivative(s) * &(&gen(s) - &GroupRingElement::one()));
        }
        prop_assert_eq!(word, rhs);
    }

    #[test]
    fn fox_product_rule(u in element(4), v in element(4), s in 0usize..4) {
        let lhs = (&u * &v).fox_derivative(s);
        let eps = GroupRingElement::monomial(Word::identity(), v.augmentation());
        let rhs = &(&u.fox_derivative(s) * &eps) + &(&u * &v.fox_derivative(s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn words_reduce_freely(a in codes(5, 20), b in codes(5, 20)) {
        let (x, y) = (Word::from_codes(&a), Word::from_codes(&b));
        prop_assert!(x.concat(&x.inverse()).is_identity());
        prop_assert_eq!(x.inverse().inverse(), x.clone());
        prop_assert_eq!((&x * &y).inverse(), &y.inverse() * &x.inverse());
        prop_assert!(x.codes().windows(2).all(|p| p[0] != -p[1]));
    }

    #[test]
    fn bar_is_an_anti_involution(u in element(3), v in element(3)) {
        prop_assert_eq!(u.bar().bar(), u.clone());
        prop_assert_eq!((&u * &v).bar(), &v.bar() * &u.bar());
        prop_assert_eq!(u.bar().augmentation(), u.augmentation());
    }

    #[test]
    fn chain_equivalence_ignores_term_order(
        terms in prop::collection::vec((element(3), codes(3, 5)), 1..5)
    ) {
        let forward = terms.iter().fold(TwoChain::new(), |c, (a, x)| c.with(a.clone(), Word::from_codes(x)));
        let backward = terms.iter().rev().fold(TwoChain::new(), |c, (a, x)| c.with(a.clone(), Word::from_codes(x)));
        prop_assert!(forward.equivalent(&backward));
        prop_assert!(forward.minus(&backward).canonical().is_empty());
        let doubled = forward.plus(&forward);
        prop_assert!(doubled.minus(&forward).equivalent(&forward));
    }

    #[test]
    fn triple_ratio_is_projectively_invariant(
        params in prop::collection::vec((0.3f64..2.0, 0.0f64..std::f64::consts::PI), 3),
        g in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        let flags: Vec<Flag> = params
            .iter()
            .map(|&(l, th)| flag_of(&irreducible_embed(&sl2_hyperbolic(l, th), 3)).unwrap())
            .collect();
        let m = DMatrix::from_row_slice(3, 3, &g) + DMatrix::<f64>::identity(3, 3) * 3.0;
        let moved: Vec<Flag> = flags.iter().map(|f| f.transformed(&m).unwrap()).collect();
        let (Ok(t0), Ok(t1)) = (
            triple_ratio(&flags[0], &flags[1], &flags[2], 1, 1, 1),
            triple_ratio(&moved[0], &moved[1], &moved[2], 1, 1, 1),
        ) else {
            return Ok(());
        };
        prop_assert!((t0 - t1).abs() <= 1e-8 * t0.abs().max(1.0));
        prop_assert!(rotation_check(&flags[0], &flags[1], &flags[2]).unwrap() <= 1e-9);
    }

    #[test]
    fn double_ratio_swap_is_reciprocal(
        params in prop::collection::vec((0.3f64..2.0, 0.0f64..std::f64::consts::PI), 4),
        i in 1usize..4,
    ) {
        let f: Vec<Flag> = params
            .iter()
            .map(|&(l, th)| flag_of(&irreducible_embed(&sl2_hyperbolic(l, th), 4)).unwrap())
            .collect();
        let (Ok(d), Ok(s)) = (double_ratio(&f[0], &f[1], &f[2], &f[3], i), double_ratio(&f[0], &f[1], &f[3], &f[2], i)) else {
            return Ok(());
        };
        prop_assert!((d * s - 1.0).abs() <= 1e-9 * (1.0 + d.abs() * s.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cup_pairing_is_bilinear(seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Ok(rep) = pants_representation(3, &mut rng, &ConstructionParams::default()) else {
            return Ok(());
        };
        let rep = Arc::new(rep);
        let x = |k: f64| DMatrix::from_fn(3, 3, |i, j| if i == j { if i == 2 { -2.0 * k } else { k } } else { (i + 2 * j) as f64 * k });
        let a = coboundary(&rep, &x(1.0));
        let b = Cocycle::new(rep.clone(), rep.images().iter().map(|g| g.transpose() * 0.1).collect()).unwrap();
        let c = Cocycle::new(rep.clone(), rep.images().iter().map(|g| g * 0.05).collect()).unwrap();
        let chain = rep.presentation().fundamental_class(&Word::identity());
        let lhs = cup_pairing(&a.plus(&b.scaled(s)), &c, &chain);
        let rhs = cup_pairing(&a, &c, &chain) + s * cup_pairing(&b, &c, &chain);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }
}
