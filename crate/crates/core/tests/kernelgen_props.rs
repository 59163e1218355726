use burau4::braid::BraidWord;
use burau4::burau::{burau_generic, is_identity, specialize, RationalAt};
use burau4::forkpair::ForkSpec;
use burau4::kernelgen::{
    arc_of_spec, build_candidate, coords_action, manual_candidate, synthesize_from_coords, ArcCoords,
    CandidateMode, DEFAULT_PLATEAU_BUDGET,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn word(strands: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    let g = strands as i32 - 1;
    prop::collection::vec((1..=g, any::<bool>()), 0..=max_len).prop_map(move |v| {
        let letters = v.into_iter().map(|(i, inv)| if inv { -i } else { i }).collect();
        BraidWord::new(strands, letters).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn coords_action_is_a_group_action(u in word(4, 6), v in word(4, 6), i in 1usize..=3) {
        let c = ArcCoords::standard(4, i);
        let uv = u.compose(&v).unwrap();
        prop_assert_eq!(coords_action(&uv, &c), coords_action(&u, &coords_action(&v, &c)));
        let back = coords_action(&u.inverse(), &coords_action(&u, &c));
        prop_assert_eq!(back, c);
    }

    #[test]
    fn action_preserves_ends_set(u in word(4, 8), i in 1usize..=3) {
        let c = coords_action(&u, &ArcCoords::standard(4, i));
        let perm = u.permutation();
        let (a, b) = c.ends();
        // the braid carries {p_i, p_i+1} to the ends of the image arc
        let mut got = [a, b];
        got.sort();
        let mut want = [perm[i - 1] + 1, perm[i] + 1];
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn synthesis_round_trip(v in word(4, 10), i in 1usize..=3) {
        let target = coords_action(&v, &ArcCoords::standard(4, i));
        let s = synthesize_from_coords(&target, DEFAULT_PLATEAU_BUDGET).unwrap();
        prop_assert_eq!(coords_action(&s.word, &ArcCoords::standard(4, s.standard)), target);
    }

    #[test]
    fn synthesis_round_trip_b3(v in word(3, 12)) {
        let target = coords_action(&v, &ArcCoords::standard(3, 1));
        let s = synthesize_from_coords(&target, DEFAULT_PLATEAU_BUDGET).unwrap();
        prop_assert_eq!(coords_action(&s.word, &ArcCoords::standard(3, s.standard)), target);
    }

    #[test]
    fn manual_checks_match_generic_specialization(u in word(4, 10)) {
        let w = BraidWord::commutator(&u, &BraidWord::generator(4, 2, false).unwrap()).unwrap();
        let targets: Vec<BigRational> = [2i64, 3, -2]
            .iter()
            .map(|&a| BigRational::from_integer(a.into()))
            .collect();
        let c = manual_candidate(w.clone(), "test", &targets).unwrap();
        prop_assert_eq!(c.checks.exponent_sum, 0);
        let generic = burau_generic(&w);
        for q0 in &targets {
            let m = specialize(&generic, q0).unwrap();
            let ring = RationalAt::new(q0.clone()).unwrap();
            prop_assert_eq!(c.checks.per_q0[&q0.to_string()], is_identity(&ring, &m));
        }
    }
}

#[test]
fn figure_four_candidate_is_consistent() {
    let spec: ForkSpec = "n=4;c=24,18,11,0;ends=1,3".parse().unwrap();
    let two = BigRational::from_integer(2.into());
    let c = build_candidate(&spec, &CandidateMode::Specialization(two.clone())).unwrap();
    assert_eq!(c.word.exponent_sum(), 0);
    assert!(c.checks.kernel_at(&two));
    let m = specialize(&burau_generic(&c.word), &two).unwrap();
    assert!(is_identity(&RationalAt::new(two).unwrap(), &m));
    let conj = c.provenance.conjugator.unwrap();
    let std = ArcCoords::standard(4, c.provenance.standard_arc.unwrap());
    assert_eq!(coords_action(&conj, &std), arc_of_spec(&spec).unwrap());
}

#[test]
fn candidate_json_shape() {
    let spec: ForkSpec = "n=4;c=24,18,11,0;ends=1,3".parse().unwrap();
    let two = BigRational::from_integer(2.into());
    let c = build_candidate(&spec, &CandidateMode::Specialization(two)).unwrap();
    let v = serde_json::to_value(&c).unwrap();
    for key in ["word", "provenance", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["artin", "generic", "per_q0"] {
        assert!(v["checks"].get(key).is_some(), "{key}");
    }
    let back: burau4::kernelgen::KernelCandidate = serde_json::from_value(v).unwrap();
    assert_eq!(back, c);
}

#[test]
fn non_hit_is_rejected() {
    let spec: ForkSpec = "n=4;c=1,0,0,0;ends=1,2".parse().unwrap();
    let two = BigRational::from_integer(2.into());
    assert!(build_candidate(&spec, &CandidateMode::Specialization(two)).is_err());
    assert!(build_candidate(&spec, &CandidateMode::Generic).is_err());
}
