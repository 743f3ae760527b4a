use mmlk::fuzz::{check_instance, random_arena, random_instances, Bounds, CheckOptions};
use mmlk::proof::{parse_structured, serialize_proof, ProofFormat};
use mmlk::{extract, mps_solve, parse_formula, ExplicitArena, StateId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bounds() -> impl Strategy<Value = Bounds> {
    (1..=7usize, 1..=3usize, 1..=4usize, 0..=4usize, 1..=11usize).prop_map(
        |(max_states, max_agents, max_atoms, max_moves, max_formula_size)| Bounds {
            max_states,
            max_agents,
            max_atoms,
            max_moves,
            max_formula_size,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Every property checker passes on instances a bit beyond the default bounds.
    #[test]
    fn engine_agrees_with_oracles(seed in any::<u64>(), bounds in bounds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let options = CheckOptions { enumeration_bound: Some(10), ..CheckOptions::default() };
        for inst in random_instances(&mut rng, &bounds) {
            if let Err(failure) = check_instance(&inst, &options) {
                prop_assert!(false, "{failure}\n{inst}");
            }
        }
    }

    #[test]
    fn arena_text_round_trips(seed in any::<u64>(), bounds in bounds()) {
        let arena = random_arena(&mut ChaCha8Rng::seed_from_u64(seed), &bounds);
        let text = arena.to_text();
        let again = ExplicitArena::load(&text).unwrap();
        prop_assert_eq!(again.to_text(), text);
    }

    #[test]
    fn structured_export_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for inst in random_instances(&mut rng, &Bounds::default()) {
            let result = mps_solve(&inst.arena, inst.state.clone(), inst.formula.clone(), &inst.model).unwrap();
            let proof = extract(&inst.model, &result.tree).unwrap();
            let text = serialize_proof(&proof, ProofFormat::Structured, &inst.model);
            let back = parse_structured::<StateId>(&text).unwrap();
            prop_assert_eq!(back, proof);
        }
    }

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for inst in random_instances(&mut rng, &Bounds { max_formula_size: 15, ..Bounds::default() }) {
            let text = inst.formula.to_string();
            prop_assert_eq!(parse_formula(&text, &inst.arena).unwrap(), inst.formula);
        }
    }
}
