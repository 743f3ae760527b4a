//! Decide one formula on a small arena and print the minimal (dis)proof.
//!
//! cargo run --example quickstart

use mmlk::cost::QueryCount;
use mmlk::{extract, mps_solve, parse_formula, ExplicitArena, Polarity};

fn main() {
    // q0 moves to q1 (labelled p) or to q2 (unlabelled)
    let arena = ExplicitArena::load(mmlk::fixtures::A1).expect("valid arena");
    let q0 = arena.state("q0").unwrap();

    for text in ["[a]p", "<a>p", "<a>p & <a>!p"] {
        let phi = parse_formula(text, &arena).expect("valid formula");
        let result = mps_solve(&arena, q0.clone(), phi, &QueryCount).expect("search succeeds");
        let answer = match result.verdict {
            Polarity::Proof => "holds",
            Polarity::Disproof => "fails",
        };
        println!("q0, {text}: {answer} (witness cost {}, {} expansions)", result.cost(), result.expansions);

        let witness = extract(&QueryCount, &result.tree).unwrap();
        print_tree(&witness, 1);
    }
}

fn print_tree(tree: &mmlk::ProofTree<mmlk::StateId>, indent: usize) {
    let sign = if tree.polarity == Polarity::Proof { "⊨" } else { "⊭" };
    println!("{}{} {sign} {}", "  ".repeat(indent), tree.state, tree.formula);
    for child in &tree.children {
        print_tree(child, indent + 1);
    }
}
