//! Compare the search with the exhaustive oracles on one arena: the plain
//! recursive model checker, the minimal-cost recursion and a bounded
//! enumeration of every (dis)proof.
//!
//! cargo run --example oracle_crosscheck

use mmlk::cost::{heuristic_disproof, heuristic_proof, QueryCount};
use mmlk::oracle::{enumerate_proofs, full_tree_size, min_cost, naive_model_check};
use mmlk::{mps_solve, parse_formula, proof_cost};

fn main() {
    let arena = mmlk::fixtures::a1();
    let q0 = arena.state("q0").unwrap();
    let model = QueryCount;

    for text in ["[a]p", "<a>p", "[a](p | !p)", "<a>p & <a>!p", "!(p & [a]p)"] {
        let phi = parse_formula(text, &arena).unwrap();
        let holds = naive_model_check(&arena, &q0, &phi).unwrap();
        let truth = min_cost(&arena, &q0, &phi, &model).unwrap();
        let result = mps_solve(&arena, q0.clone(), phi.clone(), &model).unwrap();
        let listing = enumerate_proofs(&arena, &q0, &phi, 16).unwrap();
        let cheapest = |trees: &[mmlk::ProofTree<mmlk::StateId>]| {
            trees.iter().map(|t| proof_cost(&model, t)).min().map_or("none".to_string(), |c| c.to_string())
        };

        println!("{text}");
        println!("  holds {holds}, search says {}", result.verdict);
        println!(
            "  MinP {} MinD {}, heuristics I {} J {}",
            truth.min_proof_cost,
            truth.min_disproof_cost,
            heuristic_proof(&model, &phi),
            heuristic_disproof(&model, &phi)
        );
        println!(
            "  {} proofs (cheapest {}), {} disproofs (cheapest {}){}",
            listing.proofs.len(),
            cheapest(&listing.proofs),
            listing.disproofs.len(),
            cheapest(&listing.disproofs),
            if listing.truncated { ", truncated" } else { "" }
        );
        println!(
            "  search cost {} after {} iterations, full tree has {} nodes",
            result.cost(),
            result.iterations,
            full_tree_size(&arena, &q0, &phi).unwrap()
        );
        assert_eq!(result.cost(), truth.cost());
    }
}
