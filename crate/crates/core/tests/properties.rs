use proptest::prelude::*;

use share_alloc::envy::{min_envy_auto, solve_ersa_auto, solve_ersa_fpt_agents};
use share_alloc::io::{instance_to_json, parse_instance, parse_sharing, sharing_to_json};
use share_alloc::model::{envious_agents, validate_sharing, welfare, Instance, Rational};
use share_alloc::random::{generate_random, AttentionModel, GraphModel};
use share_alloc::welfare::{maximize_ewsa_simple, solve_ewsa_simple, solve_uwsa};

fn shapes() -> impl Strategy<Value = (GraphModel, AttentionModel)> {
    prop_oneof![
        Just((GraphModel::Clique, AttentionModel::Graph(GraphModel::Clique))),
        Just((GraphModel::Path, AttentionModel::SameAsSharingBidirected)),
        Just((GraphModel::Tree, AttentionModel::SameAsSharingBidirected)),
        (0.2f64..1.0).prop_map(|p| (GraphModel::ErdosRenyi(p), AttentionModel::Graph(GraphModel::ErdosRenyi(p)))),
    ]
}

fn instances() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 1usize..=6, 0usize..=6, shapes(), 1u64..=8)
        .prop_map(|(seed, n, m, (s, a), u)| generate_random(seed, n, m, s, a, u).expect("valid parameters"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_json_round_trips(inst in instances()) {
        let text = instance_to_json(&inst);
        let back = parse_instance(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_to_json(&back), text);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), n in 1usize..=8, m in 0usize..=8, (s, a) in shapes()) {
        let one = generate_random(seed, n, m, s, a, 5).unwrap();
        let two = generate_random(seed, n, m, s, a, 5).unwrap();
        prop_assert_eq!(one, two);
    }

    #[test]
    fn uwsa_is_monotone_in_k(inst in instances(), b in 1usize..=3) {
        let best = solve_uwsa(&inst, b, Rational::from_integer(0)).unwrap().optimum;
        for shift in -2i64..=2 {
            let k = best + Rational::new(shift.into(), 2);
            let sol = solve_uwsa(&inst, b, k).unwrap();
            prop_assert_eq!(sol.yes, k <= best);
            prop_assert!(validate_sharing(&inst, &sol.witness).is_ok());
        }
    }

    #[test]
    fn ewsa_is_monotone_in_k(inst in instances()) {
        let (best, witness) = maximize_ewsa_simple(&inst).unwrap();
        prop_assert_eq!(welfare(&inst, &witness).unwrap().egalitarian, best);
        prop_assert!(solve_ewsa_simple(&inst, best).unwrap().is_some());
        prop_assert!(solve_ewsa_simple(&inst, best + Rational::new(1, 4)).unwrap().is_none());
    }

    #[test]
    fn ersa_is_monotone_in_k(inst in instances()) {
        let answers: Vec<bool> = (0..=inst.agent_count())
            .map(|k| solve_ersa_fpt_agents(&inst, k).unwrap().is_some())
            .collect();
        prop_assert!(answers.windows(2).all(|w| !w[0] || w[1]));
        prop_assert!(answers[inst.agent_count()]);
    }

    #[test]
    fn auto_witnesses_are_valid(inst in instances()) {
        let (min, witness, _) = min_envy_auto(&inst).unwrap();
        prop_assert!(validate_sharing(&inst, &witness).is_ok());
        prop_assert_eq!(envious_agents(&inst, &witness).unwrap().count(), min);
        for k in 0..=inst.agent_count() {
            let ans = solve_ersa_auto(&inst, k as i64).unwrap();
            prop_assert_eq!(ans.yes, min <= k);
            if let Some(w) = ans.witness {
                prop_assert!(validate_sharing(&inst, &w).is_ok());
                prop_assert!(envious_agents(&inst, &w).unwrap().count() <= k);
            }
        }
    }

    #[test]
    fn sharing_json_round_trips(inst in instances()) {
        let (_, witness, _) = min_envy_auto(&inst).unwrap();
        let back = parse_sharing(sharing_to_json(&witness).as_bytes(), &inst).unwrap();
        prop_assert_eq!(back, witness);
    }
}
