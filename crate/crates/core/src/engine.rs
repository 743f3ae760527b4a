//! Minimal proof search.
//!
//! Best-first growth of an exploration tree whose nodes carry a minimal
//! proof number (MPN) and a minimal disproof number (MDN). Both are lower
//! bounds on the cost of any proof, respectively disproof, of the node's
//! `(state, formula)` pair; one of them becomes infinite once the node is
//! solved the other way. The loop descends along minimal aggregated MDN,
//! expands one leaf, and pushes changed numbers back towards the root,
//! stopping at the first ancestor whose numbers did not move (the next
//! descent restarts there).

use std::fmt;

use thiserror::Error;

use crate::arena::{Arena, ArenaError, AtomId};
use crate::cost::{heuristic_disproof, heuristic_proof, min_of, Cost, CostModel};
use crate::formula::Formula;
use crate::proof::{dedup, shared_conjunct, Polarity};

/// Effort numbers of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Effort {
    pub mpn: Cost,
    pub mdn: Cost,
}

impl Effort {
    pub fn new(mpn: Cost, mdn: Cost) -> Self {
        Effort { mpn, mdn }
    }

    pub fn is_solved(self) -> bool {
        self.mpn.is_infinite() || self.mdn.is_infinite()
    }
}

impl fmt::Display for Effort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.mpn, self.mdn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Not expanded yet; numbers come from the heuristics.
    Leaf,
    /// Expanded non-atomic node; numbers follow its children.
    Internal,
    /// Expanded atom; numbers are final.
    Terminal,
}

#[derive(Debug, Clone)]
pub struct SearchNode<S> {
    state: S,
    formula: Formula,
    effort: Effort,
    children: Vec<NodeId>,
    parent: Option<NodeId>,
    kind: NodeKind,
    // info-term values of an expanded atom
    terminal: Option<Effort>,
}

impl<S> SearchNode<S> {
    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn effort(&self) -> Effort {
        self.effort
    }

    pub fn mpn(&self) -> Cost {
        self.effort.mpn
    }

    pub fn mdn(&self) -> Cost {
        self.effort.mdn
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn is_solved(&self) -> bool {
        self.effort.is_solved()
    }

    /// `Proof` once MDN is infinite, `Disproof` once MPN is.
    pub fn verdict(&self) -> Option<Polarity> {
        if self.effort.mdn.is_infinite() {
            Some(Polarity::Proof)
        } else if self.effort.mpn.is_infinite() {
            Some(Polarity::Disproof)
        } else {
            None
        }
    }
}

/// Arena-allocated exploration tree. Nodes are never removed, so a
/// [`NodeId`] stays valid for the lifetime of the search.
#[derive(Debug, Clone)]
pub struct SearchTree<S> {
    nodes: Vec<SearchNode<S>>,
}

impl<S> SearchTree<S> {
    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &SearchNode<S> {
        &self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &SearchNode<S>)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    fn push(&mut self, node: SearchNode<S>) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("arena query failed: {0}")]
    Arena(#[from] ArenaError),
}

/// Effort numbers of a fresh leaf: `(I(φ), J(φ))`.
pub fn init_leaf<M: CostModel + ?Sized>(model: &M, formula: &Formula) -> Effort {
    Effort::new(heuristic_proof(model, formula), heuristic_disproof(model, formula))
}

/// Effort numbers of an expanded atom.
pub fn info_term<A, M>(model: &M, arena: &A, state: &A::State, atom: &AtomId) -> Result<Effort, ArenaError>
where
    A: Arena + ?Sized,
    M: CostModel + ?Sized,
{
    let k = model.base_cost(atom);
    Ok(if arena.holds(state, atom)? { Effort::new(k, Cost::INFINITY) } else { Effort::new(Cost::INFINITY, k) })
}

/// Aggregated MDN of `child` as seen from a conjunction or box parent.
fn child_disproof<M: CostModel + ?Sized>(model: &M, parent: &Formula, child_mdn: Cost) -> Cost {
    match parent {
        Formula::Box(agent, _) => model.agg_box(agent, &[child_mdn]),
        _ => model.agg_conj(&[child_mdn]),
    }
}

/// Recomputes an expanded node's numbers from its children. Leaves and
/// terminals return their stored numbers.
pub fn update_node<S, M: CostModel + ?Sized>(model: &M, tree: &SearchTree<S>, id: NodeId) -> Effort {
    let node = tree.node(id);
    match node.kind {
        NodeKind::Leaf => return node.effort,
        NodeKind::Terminal => return node.terminal.unwrap_or(node.effort),
        NodeKind::Internal => {}
    }
    let child = |c: &NodeId| tree.node(*c).effort;
    match &node.formula {
        Formula::Atom(_) => node.effort,
        Formula::Not(_) => {
            let c = child(&node.children[0]);
            Effort::new(c.mdn, c.mpn)
        }
        Formula::And(..) => {
            let mut mpns: Vec<Cost> = node.children.iter().map(|c| child(c).mpn).collect();
            if mpns.len() == 1 && shared_conjunct(&node.formula) {
                mpns.push(mpns[0]);
            }
            let mdn = min_of(node.children.iter().map(|c| model.agg_conj(&[child(c).mdn])));
            Effort::new(model.agg_conj(&mpns), mdn)
        }
        Formula::Box(agent, _) => {
            let mpns: Vec<Cost> = node.children.iter().map(|c| child(c).mpn).collect();
            let mdn = min_of(node.children.iter().map(|c| model.agg_box(agent, &[child(c).mdn])));
            Effort::new(model.agg_box(agent, &mpns), mdn)
        }
    }
}

/// How the descent picks a child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionRule {
    /// Child minimizing the aggregated MDN, lowest index on ties.
    #[default]
    MinimalDisproof,
    /// First unsolved child. Still sound, but gives up minimality; kept as a
    /// negative control for the property checks.
    FirstUnsolved,
}

/// Picks the child to descend into from an unsolved internal node.
pub fn select_child<S, M: CostModel + ?Sized>(model: &M, tree: &SearchTree<S>, id: NodeId) -> NodeId {
    select_child_with(model, tree, id, SelectionRule::MinimalDisproof)
}

pub fn select_child_with<S, M: CostModel + ?Sized>(
    model: &M,
    tree: &SearchTree<S>,
    id: NodeId,
    rule: SelectionRule,
) -> NodeId {
    let node = tree.node(id);
    debug_assert!(!node.is_solved(), "descent entered a solved node");
    let chosen = match (&node.formula, rule) {
        (Formula::Not(_), _) => node.children[0],
        (_, SelectionRule::FirstUnsolved) => {
            *node.children.iter().find(|&&c| !tree.node(c).is_solved()).expect("unsolved node has an unsolved child")
        }
        (formula, SelectionRule::MinimalDisproof) => {
            let mut best = node.children[0];
            let mut best_value = child_disproof(model, formula, tree.node(best).mdn());
            for &c in &node.children[1..] {
                let value = child_disproof(model, formula, tree.node(c).mdn());
                if value < best_value {
                    best = c;
                    best_value = value;
                }
            }
            best
        }
    };
    debug_assert!(!tree.node(chosen).is_solved(), "selected a solved child");
    chosen
}

/// Outcome of a finished search.
#[derive(Debug, Clone)]
pub struct SearchResult<S> {
    pub tree: SearchTree<S>,
    pub verdict: Polarity,
    pub expansions: usize,
    pub iterations: usize,
}

impl<S> SearchResult<S> {
    /// The finite effort number of the root: the cost of the minimal
    /// (dis)proof.
    pub fn cost(&self) -> Cost {
        let root = self.tree.node(self.tree.root());
        match self.verdict {
            Polarity::Proof => root.mpn(),
            Polarity::Disproof => root.mdn(),
        }
    }
}

/// What one iteration did, handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub iteration: usize,
    pub expanded: NodeId,
    pub resume_at: NodeId,
}

/// A running search over one `(state, formula)` pair.
pub struct Search<'a, A: Arena + ?Sized, M: CostModel + ?Sized> {
    arena: &'a A,
    model: &'a M,
    tree: SearchTree<A::State>,
    current: NodeId,
    rule: SelectionRule,
    expansions: usize,
    iterations: usize,
}

impl<'a, A: Arena + ?Sized, M: CostModel + ?Sized> Search<'a, A, M> {
    pub fn new(arena: &'a A, model: &'a M, state: A::State, formula: Formula) -> Self {
        let effort = init_leaf(model, &formula);
        let root = SearchNode {
            state,
            formula,
            effort,
            children: Vec::new(),
            parent: None,
            kind: NodeKind::Leaf,
            terminal: None,
        };
        Search {
            arena,
            model,
            tree: SearchTree { nodes: vec![root] },
            current: NodeId(0),
            rule: SelectionRule::default(),
            expansions: 0,
            iterations: 0,
        }
    }

    pub fn with_selection(mut self, rule: SelectionRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn tree(&self) -> &SearchTree<A::State> {
        &self.tree
    }

    pub fn is_solved(&self) -> bool {
        self.tree.node(self.tree.root()).is_solved()
    }

    pub fn expansions(&self) -> usize {
        self.expansions
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Expands an unsolved leaf: atoms become terminal, other formulas get
    /// their children with initial numbers. The leaf's stored numbers are
    /// left alone so [`Search::backpropagate`] can see whether they change.
    pub fn extend(&mut self, leaf: NodeId) -> Result<(), EngineError> {
        let node = self.tree.node(leaf);
        debug_assert_eq!(node.kind, NodeKind::Leaf, "extend on an expanded node");
        let state = node.state.clone();
        let labels: Vec<(A::State, Formula)> = match node.formula.clone() {
            Formula::Atom(p) => {
                let effort = info_term(self.model, self.arena, &state, &p)?;
                let node = &mut self.tree.nodes[leaf.0];
                node.kind = NodeKind::Terminal;
                node.terminal = Some(effort);
                self.expansions += 1;
                return Ok(());
            }
            Formula::Not(inner) => vec![(state, (*inner).clone())],
            Formula::And(l, r) if l == r => vec![(state, (*l).clone())],
            Formula::And(l, r) => vec![(state.clone(), (*l).clone()), (state, (*r).clone())],
            Formula::Box(agent, inner) => {
                dedup(self.arena.successors(&state, &agent)?).into_iter().map(|s| (s, (*inner).clone())).collect()
            }
        };
        for (state, formula) in labels {
            let effort = init_leaf(self.model, &formula);
            let child = self.tree.push(SearchNode {
                state,
                formula,
                effort,
                children: Vec::new(),
                parent: Some(leaf),
                kind: NodeKind::Leaf,
                terminal: None,
            });
            self.tree.nodes[leaf.0].children.push(child);
        }
        self.tree.nodes[leaf.0].kind = NodeKind::Internal;
        self.expansions += 1;
        Ok(())
    }

    /// Refreshes numbers from `node` upwards. Returns the node where the
    /// next descent should start: the first one whose numbers did not
    /// change, or the root.
    pub fn backpropagate(&mut self, mut node: NodeId) -> NodeId {
        loop {
            let new = update_node(self.model, &self.tree, node);
            let slot = &mut self.tree.nodes[node.0];
            if new == slot.effort {
                return node;
            }
            debug_assert!(
                new.mpn >= slot.effort.mpn && new.mdn >= slot.effort.mdn,
                "effort numbers decreased from {} to {new}",
                slot.effort
            );
            slot.effort = new;
            match slot.parent {
                Some(parent) => node = parent,
                None => return node,
            }
        }
    }

    /// One descent, expansion and backpropagation. No-op once solved.
    pub fn step(&mut self) -> Result<Option<Step>, EngineError> {
        if self.is_solved() {
            return Ok(None);
        }
        let mut node = self.current;
        while self.tree.node(node).kind != NodeKind::Leaf {
            node = select_child_with(self.model, &self.tree, node, self.rule);
        }
        self.extend(node)?;
        self.current = self.backpropagate(node);
        self.iterations += 1;
        Ok(Some(Step { iteration: self.iterations, expanded: node, resume_at: self.current }))
    }

    /// Runs to completion, calling `observer` after every iteration.
    pub fn run_observed(
        mut self,
        mut observer: impl FnMut(&SearchTree<A::State>, Step),
    ) -> Result<SearchResult<A::State>, EngineError> {
        while let Some(step) = self.step()? {
            observer(&self.tree, step);
        }
        self.finish()
    }

    pub fn run(self) -> Result<SearchResult<A::State>, EngineError> {
        self.run_observed(|_, _| {})
    }

    fn finish(self) -> Result<SearchResult<A::State>, EngineError> {
        let verdict = self.tree.node(self.tree.root()).verdict().expect("search stopped before the root was solved");
        Ok(SearchResult { tree: self.tree, verdict, expansions: self.expansions, iterations: self.iterations })
    }
}

/// Decides `state ⊨ formula` and builds a tree containing a minimal-cost
/// proof or disproof.
pub fn mps_solve<A, M>(
    arena: &A,
    state: A::State,
    formula: Formula,
    model: &M,
) -> Result<SearchResult<A::State>, EngineError>
where
    A: Arena + ?Sized,
    M: CostModel + ?Sized,
{
    Search::new(arena, model, state, formula).run()
}

/// One trace line: iteration, expanded leaf label, root numbers afterwards.
pub fn trace_line<S: fmt::Display>(tree: &SearchTree<S>, step: Step) -> String {
    let leaf = tree.node(step.expanded);
    let root = tree.node(tree.root());
    format!(
        "iter {} leaf ({}, {}) root mpn {} mdn {}",
        step.iteration,
        leaf.state(),
        leaf.formula(),
        root.mpn(),
        root.mdn()
    )
}
