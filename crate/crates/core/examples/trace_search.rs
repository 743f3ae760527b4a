//! Step the search by hand and watch the root's effort numbers.
//!
//! cargo run --example trace_search

use mmlk::cost::QueryCount;
use mmlk::engine::{trace_line, NodeId, Search, SearchTree};
use mmlk::{parse_formula, StateId};

fn main() {
    let arena = mmlk::fixtures::a1();
    let phi = parse_formula("[a]p & <a>p", &arena).unwrap();
    let mut search = Search::new(&arena, &QueryCount, arena.state("q0").unwrap(), phi);

    while let Some(step) = search.step().expect("arena queries succeed") {
        println!("{}", trace_line(search.tree(), step));
    }

    let tree = search.tree();
    println!("\nfinal tree, {} nodes:", tree.len());
    print_subtree(tree, tree.root(), 0);
}

fn print_subtree(tree: &SearchTree<StateId>, id: NodeId, depth: usize) {
    let node = tree.node(id);
    println!(
        "{:>3} {}({}, {}) mpn {} mdn {}",
        id.index(),
        "  ".repeat(depth),
        node.state(),
        node.formula(),
        node.mpn(),
        node.mdn()
    );
    for &child in node.children() {
        print_subtree(tree, child, depth + 1);
    }
}
