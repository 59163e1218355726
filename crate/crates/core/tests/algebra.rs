//! Ring laws, representation laws and agreement between the two braid
//! triviality oracles.

use burau4::braid::BraidWord;
use burau4::burau::{
    burau, burau_generic, burau_mod, burau_rational, determinant, generator_matrix, identity, mat_mul, specialize,
    Generic, ModularAt,
};
use burau4::freegroup::artin_action_capped;
use burau4::garside::{braids_equal, is_trivial_braid};
use burau4::laurent::LaurentPoly;
use burau4::modular::{ModPoint, MERSENNE_61};
use num_rational::BigRational;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = LaurentPoly> {
    (-4i64..4, prop::collection::vec(-6i64..=6, 0..6)).prop_map(|(d, c)| LaurentPoly::from_i64s(d, &c))
}

fn word(strands: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    let g = strands as i32 - 1;
    prop::collection::vec((1..=g, any::<bool>()), 0..=max_len).prop_map(move |v| {
        let letters = v.into_iter().map(|(i, inv)| if inv { -i } else { i }).collect();
        BraidWord::new(strands, letters).unwrap()
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-7i64..=7, 1i64..=5)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
}

/// The defining relators of `B_4`, each equal to the identity.
fn relators() -> Vec<Vec<i32>> {
    vec![
        vec![1, 2, 1, -2, -1, -2],
        vec![2, 3, 2, -3, -2, -3],
        vec![1, 3, -1, -3],
        vec![3, 1, -3, -1],
        vec![1, -1],
        vec![-2, 2],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn laurent_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_ring_map(a in poly(), b in poly(), x in rational()) {
        let (ea, eb) = (a.evaluate(&x).unwrap(), b.evaluate(&x).unwrap());
        prop_assert_eq!((&a * &b).evaluate(&x).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).evaluate(&x).unwrap(), ea + eb);
    }

    #[test]
    fn modular_evaluation_is_a_ring_map(a in poly(), b in poly(), q0 in 2u64..1_000_000) {
        let pt = ModPoint::new(q0, MERSENNE_61).unwrap();
        let m = MERSENNE_61;
        let (ea, eb) = (a.eval_mod(&pt) as u128, b.eval_mod(&pt) as u128);
        prop_assert_eq!((&a * &b).eval_mod(&pt) as u128, ea * eb % m as u128);
        prop_assert_eq!((&a + &b).eval_mod(&pt) as u128, (ea + eb) % m as u128);
    }

    #[test]
    fn mirror_is_an_involution(a in poly()) {
        prop_assert_eq!(a.mirror().mirror(), a.clone());
        prop_assert_eq!(a.normalize_with_mirror(), a.mirror().normalize_with_mirror());
    }

    #[test]
    fn burau_is_a_homomorphism(u in word(4, 10), v in word(4, 10)) {
        let uv = u.compose(&v).unwrap();
        prop_assert_eq!(burau_generic(&uv), mat_mul(&Generic, &burau_generic(&u), &burau_generic(&v)));
        let inv = mat_mul(&Generic, &burau_generic(&u), &burau_generic(&u.inverse()));
        prop_assert_eq!(inv, identity(&Generic, 3));
    }

    #[test]
    fn determinant_is_power_of_minus_q(u in word(4, 12)) {
        let e = u.exponent_sum();
        let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
        prop_assert_eq!(determinant(&Generic, &burau_generic(&u)), LaurentPoly::monomial(sign, e));
    }

    #[test]
    fn conjugation_covariance(w in word(4, 8), x in word(4, 8)) {
        let conj = w.inverse().compose(&x).unwrap().compose(&w).unwrap();
        let lhs = burau_generic(&conj);
        let rhs = mat_mul(
            &Generic,
            &mat_mul(&Generic, &burau_generic(&w.inverse()), &burau_generic(&x)),
            &burau_generic(&w),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn specializations_commute(u in word(4, 10), x in rational()) {
        let via_generic = specialize(&burau_generic(&u), &x).unwrap();
        prop_assert_eq!(via_generic, burau_rational(&u, &x).unwrap());
    }

    #[test]
    fn modular_matches_generic(u in word(4, 10), q0 in 2u64..1_000_000) {
        let pt = ModPoint::new(q0, MERSENNE_61).unwrap();
        let m = burau_generic(&u);
        let expect = m.map(|p| p.eval_mod(&pt));
        prop_assert_eq!(burau_mod(&u, pt), expect.clone());
        prop_assert_eq!(burau(&ModularAt(pt), &u), expect);
    }

    #[test]
    fn relators_act_trivially(u in word(4, 6), r in 0usize..6, at in 0usize..7) {
        let rel = &relators()[r];
        let mut letters = u.letters().to_vec();
        let at = at.min(letters.len());
        letters.splice(at..at, rel.iter().copied());
        let v = BraidWord::new(4, letters).unwrap();
        prop_assert_eq!(burau_generic(&v), burau_generic(&u));
        let phi_u = artin_action_capped(&u, 1 << 16).unwrap();
        let phi_v = artin_action_capped(&v, 1 << 16).unwrap();
        prop_assert_eq!(phi_u, phi_v);
        prop_assert!(braids_equal(&u, &v).unwrap());
    }

    #[test]
    fn garside_agrees_with_artin_expansion(u in word(4, 9), v in word(4, 9)) {
        // u v v^-1 u^-1 is trivial; u v u^-1 is trivial iff v is
        let w = u.compose(&v).unwrap().compose(&u.inverse()).unwrap();
        let phi = artin_action_capped(&w, 1 << 18).unwrap();
        prop_assert_eq!(is_trivial_braid(&w), phi.is_identity());
        let t = w.compose(&w.inverse()).unwrap();
        prop_assert!(is_trivial_braid(&t));
    }

    #[test]
    fn garside_agrees_on_b3(u in word(3, 14)) {
        let phi = artin_action_capped(&u, 1 << 18).unwrap();
        prop_assert_eq!(is_trivial_braid(&u), phi.is_identity());
    }
}

#[test]
fn generators_have_the_printed_shape() {
    // row i of σ_i: 1 in column i-1, -q on the diagonal, q in column i+1
    for strands in 3..=6 {
        for i in 1..strands {
            let m = generator_matrix(&Generic, strands, i, false);
            for r in 0..strands - 1 {
                for c in 0..strands - 1 {
                    let want = if r + 1 != i {
                        if r == c { LaurentPoly::one() } else { LaurentPoly::zero() }
                    } else if c + 2 == i {
                        LaurentPoly::one()
                    } else if c + 1 == i {
                        LaurentPoly::monomial(-1, 1)
                    } else if c == i {
                        LaurentPoly::q()
                    } else {
                        LaurentPoly::zero()
                    };
                    assert_eq!(*m.get(r, c), want, "strands {strands} σ{i} ({r},{c})");
                }
            }
        }
    }
}

#[test]
fn full_twists_are_scalar() {
    for strands in 3..=5usize {
        let mut letters = Vec::new();
        for _ in 0..strands {
            letters.extend(1..strands as i32);
        }
        let m = burau_generic(&BraidWord::new(strands, letters).unwrap());
        let s = LaurentPoly::monomial(1, strands as i64);
        let mut want = identity(&Generic, strands - 1);
        want = want.map(|e| e * &s);
        assert_eq!(m, want, "{strands} strands");
    }
}
