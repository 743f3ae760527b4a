//! The same question under the three builtin cost models, plus a custom one.
//!
//! Depth favours shallow witnesses, query count favours small ones, and the
//! weighted model prices each atom and each agent's moves separately.
//!
//! cargo run --example cost_models

use mmlk::cost::{max_of, Depth, QueryCount, Weighted};
use mmlk::{extract, mps_solve, parse_formula, proof_cost, AgentId, Cost, CostModel, ExplicitArena};

const ARENA: &str = r#"{
  "atoms": ["goal"],
  "agents": ["fast", "slow"],
  "states": [
    {"id": "start", "labels": []},
    {"id": "mid", "labels": []},
    {"id": "done", "labels": ["goal"]}
  ],
  "transitions": [
    {"from": "start", "agent": "fast", "to": "done"},
    {"from": "start", "agent": "slow", "to": "mid"},
    {"from": "mid", "agent": "slow", "to": "done"}
  ]
}"#;

/// Depth-like model where every box costs its agent's latency.
struct Latency;

impl CostModel for Latency {
    fn base_cost(&self, _atom: &mmlk::AtomId) -> Cost {
        Cost::ZERO
    }

    fn agg_conj(&self, costs: &[Cost]) -> Cost {
        max_of(costs)
    }

    fn agg_box(&self, agent: &AgentId, costs: &[Cost]) -> Cost {
        let step = if agent.as_str() == "fast" { 10.0 } else { 1.0 };
        Cost::finite(step).unwrap() + max_of(costs)
    }
}

fn main() {
    let arena = ExplicitArena::load(ARENA).unwrap();
    let start = arena.state("start").unwrap();
    let phi = parse_formula("<fast>goal | <slow><slow>goal", &arena).unwrap();

    let weighted = Weighted::new().with_box_cost("fast", Cost::finite(5.0).unwrap());
    let models: [(&str, &dyn CostModel); 4] =
        [("depth", &Depth), ("query_count", &QueryCount), ("weighted", &weighted), ("latency", &Latency)];

    for (name, model) in models {
        let result = mps_solve(&arena, start.clone(), phi.clone(), model).unwrap();
        let proof = extract(model, &result.tree).unwrap();
        let mut route = Vec::new();
        walk(&proof, &mut route);
        route.dedup();
        println!(
            "{name:<12} verdict {} cost {:<3} route {}",
            result.verdict,
            proof_cost(model, &proof),
            route.join(" -> ")
        );
    }
}

/// States visited by the witness, which here is a single path.
fn walk<S: std::fmt::Display>(tree: &mmlk::ProofTree<S>, route: &mut Vec<String>) {
    route.push(tree.state.to_string());
    for child in &tree.children {
        walk(child, route);
    }
}
