//! Randomized invariants: every construction is checked against the
//! brute-force word-level oracle on small random instances.

use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;

use hpc::alphabet::{Alphabet, Word};
use hpc::bridges::{build_bridge_nfa, compute_bridges, unique_paths_upto};
use hpc::decide::{decide, validate_witness, DecideOptions, OrientationFilter};
use hpc::dfa::Dfa;
use hpc::grammar::{
    build_grammar, count_derivations, enumerate_grammar, enumerate_with_multiplicity,
};
use hpc::instance::{parse_instance_str, render_instance};
use hpc::oracle::{membership, minimal_gamma_alpha_prefix, oracle_hairpin_set};
use hpc::HairpinInstance;

fn alphabet_pool() -> Vec<Alphabet> {
    vec![
        Alphabet::from_pairs(&[("a", "A")]).unwrap(),
        Alphabet::from_pairs(&[("a", "A"), ("b", "b")]).unwrap(),
        Alphabet::from_pairs(&[("a", "A"), ("b", "B")]).unwrap(),
    ]
}

fn dfa_strategy(n: usize, k: usize) -> impl Strategy<Value = Dfa> {
    (
        prop::collection::vec(prop::collection::vec(0..n, k), n),
        prop::collection::vec(any::<bool>(), n),
    )
        .prop_map(move |(delta, finals)| Dfa { n, k, initial: 0, finals, delta })
}

fn instance_strategy() -> impl Strategy<Value = HairpinInstance> {
    (0usize..3, 1usize..=3, 1usize..=3, 1usize..=2, 0u8..5).prop_flat_map(
        |(ai, n1, n2, kappa, l2_kind)| {
            let al = alphabet_pool()[ai].clone();
            let k = al.len();
            let d2 = if l2_kind == 0 {
                Just(Dfa::empty_language(k)).boxed()
            } else {
                dfa_strategy(n2, k).boxed()
            };
            (dfa_strategy(n1, k), d2).prop_map(move |(dfa1, dfa2)| {
                HairpinInstance::new(al.clone(), kappa, dfa1, dfa2)
            })
        },
    )
}

fn instance_and_word() -> impl Strategy<Value = (HairpinInstance, Word)> {
    instance_strategy().prop_flat_map(|inst| {
        let k = inst.alphabet.len() as u8;
        (Just(inst), prop::collection::vec(0..k, 0..=9))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn grammar_and_oracle_agree(inst in instance_strategy()) {
        let g = build_grammar(&inst).unwrap();
        let from_grammar: BTreeSet<Word> =
            enumerate_grammar(&g, 7).unwrap().into_iter().collect();
        let from_oracle: BTreeSet<Word> =
            oracle_hairpin_set(&inst, 7).unwrap().into_iter().collect();
        prop_assert_eq!(from_grammar, from_oracle);
    }

    #[test]
    fn every_member_derives_exactly_once(inst in instance_strategy()) {
        let g = build_grammar(&inst).unwrap();
        for (w, m) in enumerate_with_multiplicity(&g, 6) {
            prop_assert!(membership(&w, &inst));
            prop_assert_eq!(m, 1);
        }
    }

    #[test]
    fn membership_matches_derivability((inst, w) in instance_and_word()) {
        let g = build_grammar(&inst).unwrap();
        let derivable = !count_derivations(&g, &w).is_zero();
        prop_assert_eq!(membership(&w, &inst), derivable);
    }

    #[test]
    fn minimal_prefixes_trace_the_prefix_automaton(inst in instance_strategy()) {
        let tables = compute_bridges(&inst.dfa1, &inst.dfa2, &inst.alphabet);
        let a = build_bridge_nfa(&inst, &tables);
        let nfa = a.to_nfa();
        for w in oracle_hairpin_set(&inst, 6).unwrap() {
            let split = minimal_gamma_alpha_prefix(&w, &inst).expect("member has a split");
            let prefix = &w[..split.gamma.len() + split.alpha.len()];
            prop_assert!(nfa.accepts(prefix));
        }
    }

    #[test]
    fn bridge_paths_are_unique_per_label(inst in instance_strategy()) {
        let tables = compute_bridges(&inst.dfa1, &inst.dfa2, &inst.alphabet);
        let a = build_bridge_nfa(&inst, &tables);
        prop_assert!(unique_paths_upto(&a, 5));
    }

    #[test]
    fn witnesses_revalidate(inst in instance_strategy()) {
        let d = decide(&inst, &DecideOptions::default());
        prop_assert!(validate_witness(&d, &inst));
    }

    #[test]
    fn mirroring_preserves_the_verdict(inst in instance_strategy()) {
        let d = decide(&inst, &DecideOptions::default());
        let m = decide(&inst.mirrored(), &DecideOptions::default());
        prop_assert_eq!(d.is_regular(), m.is_regular());
    }

    #[test]
    fn fast_and_direct_routes_report_identically(inst in instance_strategy()) {
        let fast = decide(
            &inst,
            &DecideOptions { fast_path: true, orientation: OrientationFilter::Both },
        );
        let direct = decide(
            &inst,
            &DecideOptions { fast_path: false, orientation: OrientationFilter::Both },
        );
        prop_assert!(!fast.stats.window_disagreement);
        prop_assert!(!direct.stats.window_disagreement);
        let a = serde_json::to_string(&fast.to_report(&inst.alphabet)).unwrap();
        let b = serde_json::to_string(&direct.to_report(&inst.alphabet)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn instance_files_round_trip(inst in instance_strategy()) {
        let text = render_instance(&inst);
        let parsed = parse_instance_str(&text).unwrap();
        prop_assert_eq!(parsed.instance, inst);
    }
}
