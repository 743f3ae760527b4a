//! Export a minimal disproof as Graphviz DOT and as structured JSON, then
//! read the JSON back and validate it against the arena.
//!
//! cargo run --example proof_export > proof.dot

use mmlk::cost::QueryCount;
use mmlk::proof::{parse_structured, serialize_proof, ProofFormat};
use mmlk::{check_proof, extract, mps_solve, parse_formula, StateId};

fn main() {
    let arena = mmlk::fixtures::a1();
    let phi = parse_formula("[a]p | [a]!p", &arena).unwrap();
    let result = mps_solve(&arena, arena.state("q0").unwrap(), phi, &QueryCount).unwrap();
    let disproof = extract(&QueryCount, &result.tree).unwrap();

    print!("{}", serialize_proof(&disproof, ProofFormat::Dot, &QueryCount));

    let json = serialize_proof(&disproof, ProofFormat::Structured, &QueryCount);
    let back: mmlk::ProofTree<StateId> = parse_structured(&json).unwrap();
    assert_eq!(back, disproof);
    match check_proof(&arena, &back) {
        Ok(()) => eprintln!("structured export re-read and validated ({} nodes)", back.node_count()),
        Err(e) => eprintln!("validation failed: {e}"),
    }
}
