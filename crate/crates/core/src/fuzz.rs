//! Random instances and the engine-versus-oracle property checks.
//!
//! Every instance is a small random arena, a start state, a random formula
//! and one of the builtin cost models. [`check_instance`] solves it and
//! compares everything the search claims against independent computations.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{AgentId, Arena, ArenaBuilder, AtomId, ExplicitArena, QueryKind, RecordingArena, StateId};
use crate::cost::{heuristic_disproof, heuristic_proof, BuiltinModel, Cost, Depth, QueryCount, Weighted};
use crate::engine::{select_child, NodeKind, Search, SearchTree, SelectionRule};
use crate::formula::Formula;
use crate::oracle::{enumerate_proofs, full_tree_size, min_cost, naive_model_check, OracleResult};
use crate::proof::{check_proof, extract, proof_cost, Polarity};

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_agents: usize,
    pub max_atoms: usize,
    /// Upper end of the 0..=n successors drawn per (state, agent).
    pub max_moves: usize,
    pub max_formula_size: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_states: 6, max_agents: 2, max_atoms: 3, max_moves: 3, max_formula_size: 8 }
    }
}

/// One generated model-checking problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub arena: ExplicitArena,
    pub state: StateId,
    pub formula: Formula,
    pub model: BuiltinModel,
}

impl fmt::Display for Instance {
    /// Everything needed to replay the instance from the command line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "state: {}", self.state)?;
        writeln!(f, "formula: {}", self.formula)?;
        writeln!(f, "cost: {}", self.model.to_config())?;
        write!(f, "arena:\n{}", self.arena.to_text())
    }
}

pub fn random_arena(rng: &mut impl Rng, bounds: &Bounds) -> ExplicitArena {
    let num_states = rng.gen_range(1..=bounds.max_states);
    let num_agents = rng.gen_range(1..=bounds.max_agents);
    let num_atoms = rng.gen_range(1..=bounds.max_atoms);
    let atoms: Vec<String> =
        (0..num_atoms).map(|i| ["p", "q", "r", "s", "t"].get(i).map_or(format!("p{i}"), |s| s.to_string())).collect();
    let agents: Vec<String> =
        (0..num_agents).map(|i| ["a", "b", "c"].get(i).map_or(format!("a{i}"), |s| s.to_string())).collect();
    let states: Vec<String> = (0..num_states).map(|i| format!("s{i}")).collect();

    let mut builder = ArenaBuilder::new();
    for atom in &atoms {
        builder = builder.atom(atom);
    }
    for agent in &agents {
        builder = builder.agent(agent);
    }
    for state in &states {
        let labels: Vec<&str> = atoms.iter().filter(|_| rng.gen_bool(0.5)).map(String::as_str).collect();
        builder = builder.state(state, &labels);
    }
    for from in &states {
        for agent in &agents {
            let count = rng.gen_range(0..=bounds.max_moves.min(num_states));
            for to in states.choose_multiple(rng, count) {
                builder = builder.transition(from, agent, to);
            }
        }
    }
    builder.build().expect("generated arenas are well formed")
}

/// Random core formula with exactly `size` constructors.
pub fn random_formula(rng: &mut impl Rng, atoms: &[AtomId], agents: &[AgentId], size: usize) -> Formula {
    assert!(size >= 1);
    if size == 1 {
        return Formula::Atom(atoms.choose(rng).expect("atoms").clone());
    }
    let choice = if size >= 3 { rng.gen_range(0..3) } else { rng.gen_range(0..2) };
    match choice {
        0 => Formula::negation(random_formula(rng, atoms, agents, size - 1)),
        1 => Formula::boxed(agents.choose(rng).expect("agents").clone(), random_formula(rng, atoms, agents, size - 1)),
        _ => {
            let left = rng.gen_range(1..=size - 2);
            Formula::and(random_formula(rng, atoms, agents, left), random_formula(rng, atoms, agents, size - 1 - left))
        }
    }
}

/// Weighted model with integer weights in `0..=3` for every atom and agent.
pub fn random_weighted(rng: &mut impl Rng, arena: &ExplicitArena) -> Weighted {
    let mut model = Weighted::new();
    for atom in arena.atoms() {
        model = model.with_atom_cost(atom.clone(), Cost::finite(rng.gen_range(0..=3) as f64).unwrap());
    }
    for agent in arena.agents() {
        model = model.with_box_cost(agent.clone(), Cost::finite(rng.gen_range(0..=3) as f64).unwrap());
    }
    model
}

/// Draws one arena, state and formula, and pairs it with each builtin model.
pub fn random_instances(rng: &mut impl Rng, bounds: &Bounds) -> Vec<Instance> {
    let arena = random_arena(rng, bounds);
    let state = arena.states().nth(rng.gen_range(0..arena.num_states())).unwrap().clone();
    let size = rng.gen_range(1..=bounds.max_formula_size);
    let formula = random_formula(rng, arena.atoms(), arena.agents(), size);
    let weighted = random_weighted(rng, &arena);
    [BuiltinModel::Depth(Depth), BuiltinModel::QueryCount(QueryCount), BuiltinModel::Weighted(weighted)]
        .into_iter()
        .map(|model| Instance { arena: arena.clone(), state: state.clone(), formula: formula.clone(), model })
        .collect()
}

/// Which checks to run beyond the always-on ones.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Per-iteration monotonicity, lower-bound, solving and descent checks.
    pub snapshots: bool,
    /// Enumerate every (dis)proof up to this many nodes and check
    /// admissibility and minimality against each one.
    pub enumeration_bound: Option<usize>,
    pub selection: SelectionRule,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { snapshots: true, enumeration_bound: None, selection: SelectionRule::MinimalDisproof }
    }
}

/// Property names, one per check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Verdict,
    Minimality,
    CostIdentity,
    ProofValidity,
    Admissibility,
    EnumeratedAdmissibility,
    EnumerationAgreement,
    Monotonicity,
    LowerBound,
    SolvingCharacterization,
    DescentSafety,
    IterationBound,
    QueryLocality,
    Engine,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub property: Property,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated: {}", self.property, self.detail)
    }
}

fn fail<T>(property: Property, detail: impl Into<String>) -> Result<T, Failure> {
    Err(Failure { property, detail: detail.into() })
}

/// Numbers gathered while checking one instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceStats {
    pub iterations: usize,
    pub expansions: usize,
    pub full_tree_size: usize,
    pub snapshots: usize,
    /// `Some(count)` when an untruncated enumeration was compared.
    pub enumerated: Option<usize>,
}

type Memo = HashMap<(StateId, Formula), OracleResult>;

fn oracle_for(memo: &mut Memo, inst: &Instance, state: &StateId, formula: &Formula) -> OracleResult {
    memo.entry((state.clone(), formula.clone()))
        .or_insert_with(|| min_cost(&inst.arena, state, formula, &inst.model).expect("generated arenas answer queries"))
        .to_owned()
}

/// Solves `inst` and verifies every property against the oracles.
pub fn check_instance(inst: &Instance, options: &CheckOptions) -> Result<InstanceStats, Failure> {
    let arena = &inst.arena;
    let model = &inst.model;
    let mut memo = Memo::new();
    let truth = oracle_for(&mut memo, inst, &inst.state, &inst.formula);
    let mut stats = InstanceStats::default();

    let holds = naive_model_check(arena, &inst.state, &inst.formula).expect("generated arenas answer queries");
    if holds != truth.holds {
        return fail(Property::Verdict, format!("min_cost says holds={}, direct check says {holds}", truth.holds));
    }

    // admissibility against the exact minima
    let i = heuristic_proof(model, &inst.formula);
    let j = heuristic_disproof(model, &inst.formula);
    if i.is_infinite() || j.is_infinite() {
        return fail(Property::Admissibility, format!("heuristics not finite: I={i} J={j}"));
    }
    if i > truth.min_proof_cost || j > truth.min_disproof_cost {
        return fail(
            Property::Admissibility,
            format!("I={i} J={j} but MinP={} MinD={}", truth.min_proof_cost, truth.min_disproof_cost),
        );
    }

    let recording = RecordingArena::new(arena);
    let mut snapshot_error: Option<Failure> = None;
    let mut previous: Vec<(Cost, Cost)> = Vec::new();
    let search =
        Search::new(&recording, model, inst.state.clone(), inst.formula.clone()).with_selection(options.selection);
    let result = search.run_observed(|tree, _step| {
        stats.snapshots += 1;
        if options.snapshots && snapshot_error.is_none() {
            if let Err(e) = check_snapshot(inst, tree, &mut previous, &mut memo) {
                snapshot_error = Some(e);
            }
        }
    });
    let result = match result {
        Ok(r) => r,
        Err(e) => return fail(Property::Engine, e.to_string()),
    };
    if let Some(e) = snapshot_error {
        return Err(e);
    }
    stats.iterations = result.iterations;
    stats.expansions = result.expansions;

    let engine_holds = result.verdict == Polarity::Proof;
    if engine_holds != holds {
        return fail(Property::Verdict, format!("search says {}, direct check says holds={holds}", result.verdict));
    }

    let root = result.tree.node(result.tree.root());
    if !(root.mpn().is_infinite() ^ root.mdn().is_infinite()) {
        return fail(Property::Verdict, format!("root numbers ({}, {}) not solved one way", root.mpn(), root.mdn()));
    }

    let proof = match extract(model, &result.tree) {
        Ok(p) => p,
        Err(e) => return fail(Property::ProofValidity, e.to_string()),
    };
    if let Err(e) = check_proof(arena, &proof) {
        return fail(Property::ProofValidity, e.to_string());
    }
    let k = proof_cost(model, &proof);
    if k != result.cost() {
        return fail(Property::CostIdentity, format!("root number {} but extracted cost {k}", result.cost()));
    }
    if k != truth.cost() {
        return fail(Property::Minimality, format!("extracted cost {k} but oracle minimum {}", truth.cost()));
    }

    stats.full_tree_size = full_tree_size(arena, &inst.state, &inst.formula).expect("generated arenas answer queries");
    if result.iterations > stats.full_tree_size {
        return fail(
            Property::IterationBound,
            format!("{} iterations for a full tree of {} nodes", result.iterations, stats.full_tree_size),
        );
    }

    let depth = inst.formula.modal_depth();
    let distances = arena.distances(&inst.state).expect("start state exists");
    for (state, kind) in recording.queries() {
        let d = distances.get(&state).copied();
        let ok = match kind {
            QueryKind::Successors(_) => d.is_some_and(|d| d < depth),
            _ => d.is_some_and(|d| d <= depth),
        };
        if !ok {
            return fail(
                Property::QueryLocality,
                format!("{kind:?} query on {state} at distance {d:?}, modal depth {depth}"),
            );
        }
    }

    if let Some(bound) = options.enumeration_bound {
        let listing =
            enumerate_proofs(arena, &inst.state, &inst.formula, bound).expect("generated arenas answer queries");
        if !listing.truncated {
            stats.enumerated = Some(listing.proofs.len() + listing.disproofs.len());
            check_enumeration(inst, &truth, i, j, &listing.proofs, &listing.disproofs)?;
        }
    }

    Ok(stats)
}

fn check_enumeration(
    inst: &Instance,
    truth: &OracleResult,
    i: Cost,
    j: Cost,
    proofs: &[crate::proof::ProofTree<StateId>],
    disproofs: &[crate::proof::ProofTree<StateId>],
) -> Result<(), Failure> {
    for (trees, bound, name, expected) in
        [(proofs, i, "I", truth.min_proof_cost), (disproofs, j, "J", truth.min_disproof_cost)]
    {
        let mut best = Cost::INFINITY;
        for tree in trees {
            if let Err(e) = check_proof(&inst.arena, tree) {
                return fail(Property::EnumerationAgreement, format!("enumerated tree rejected: {e}"));
            }
            let k = proof_cost(&inst.model, tree);
            if bound > k {
                return fail(Property::EnumeratedAdmissibility, format!("{name}={bound} exceeds enumerated cost {k}"));
            }
            best = best.min(k);
        }
        if best != expected {
            return fail(
                Property::EnumerationAgreement,
                format!("cheapest enumerated {name}-side tree costs {best}, min_cost says {expected}"),
            );
        }
    }
    Ok(())
}

/// Does the subtree at each node contain a proof / disproof rooted there?
/// Decided from tree shape and direct atom checks, never from effort numbers.
fn containment(inst: &Instance, tree: &SearchTree<StateId>) -> Vec<(bool, bool)> {
    let mut out = vec![(false, false); tree.len()];
    let nodes: Vec<_> = tree.iter().collect();
    // children always have larger ids than their parent
    for &(id, node) in nodes.iter().rev() {
        let index = id.index();
        let kids: Vec<(bool, bool)> = node.children().iter().map(|c| out[c.index()]).collect();
        out[index] = match (node.kind(), node.formula()) {
            (NodeKind::Leaf, _) => (false, false),
            (_, Formula::Atom(p)) => {
                let holds = inst.arena.holds(node.state(), p).expect("known state");
                (holds, !holds)
            }
            (_, Formula::Not(_)) => (kids[0].1, kids[0].0),
            (_, Formula::And(l, r)) => {
                let covered = |phi: &Formula| {
                    node.children().iter().zip(&kids).any(|(c, k)| tree.node(*c).formula() == phi && k.0)
                };
                (covered(l) && covered(r), kids.iter().any(|k| k.1))
            }
            (_, Formula::Box(..)) => (kids.iter().all(|k| k.0), kids.iter().any(|k| k.1)),
        };
    }
    out
}

fn check_snapshot(
    inst: &Instance,
    tree: &SearchTree<StateId>,
    previous: &mut Vec<(Cost, Cost)>,
    memo: &mut Memo,
) -> Result<(), Failure> {
    let contains = containment(inst, tree);
    for (id, node) in tree.iter() {
        let (mpn, mdn) = (node.mpn(), node.mdn());
        if let Some(&(old_mpn, old_mdn)) = previous.get(id.index()) {
            if mpn < old_mpn || mdn < old_mdn {
                return fail(
                    Property::Monotonicity,
                    format!("node {} went from ({old_mpn}, {old_mdn}) to ({mpn}, {mdn})", id.index()),
                );
            }
        }
        let exact = oracle_for(memo, inst, node.state(), node.formula());
        if mpn > exact.min_proof_cost || mdn > exact.min_disproof_cost {
            return fail(
                Property::LowerBound,
                format!(
                    "node ({}, {}) has ({mpn}, {mdn}) above minima ({}, {})",
                    node.state(),
                    node.formula(),
                    exact.min_proof_cost,
                    exact.min_disproof_cost
                ),
            );
        }
        let (has_proof, has_disproof) = contains[id.index()];
        if mdn.is_infinite() != has_proof || mpn.is_infinite() != has_disproof {
            return fail(
                Property::SolvingCharacterization,
                format!(
                    "node ({}, {}) has ({mpn}, {mdn}) but contains proof={has_proof} disproof={has_disproof}",
                    node.state(),
                    node.formula()
                ),
            );
        }
        if node.kind() == NodeKind::Internal && !node.is_solved() {
            let chosen = select_child(&inst.model, tree, id);
            if tree.node(chosen).is_solved() {
                return fail(Property::DescentSafety, format!("selected solved child of node {}", id.index()));
            }
        }
    }
    previous.clear();
    previous.extend(tree.iter().map(|(_, n)| (n.mpn(), n.mdn())));
    Ok(())
}

/// Settings for a fuzz campaign.
#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Number of random (arena, state, formula) draws; each is checked under
    /// all three builtin models.
    pub cases: usize,
    pub bounds: Bounds,
    pub options: CheckOptions,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 42, cases: 1000, bounds: Bounds::default(), options: CheckOptions::default() }
    }
}

/// First failing instance of a campaign.
#[derive(Debug, Clone)]
pub struct FuzzFailure {
    pub case: usize,
    pub instance: Instance,
    pub failure: Failure,
}

impl fmt::Display for FuzzFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {} failed: {}", self.case, self.failure)?;
        write!(f, "{}", self.instance)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FuzzReport {
    pub cases: usize,
    pub instances: usize,
    pub proved: usize,
    pub disproved: usize,
    pub iterations: usize,
    pub snapshots: usize,
    pub enumerated_instances: usize,
    pub failure: Option<FuzzFailure>,
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cases: {}", self.cases)?;
        writeln!(f, "instances: {}", self.instances)?;
        writeln!(f, "proved: {}", self.proved)?;
        writeln!(f, "disproved: {}", self.disproved)?;
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "snapshots: {}", self.snapshots)?;
        writeln!(f, "enumerated: {}", self.enumerated_instances)?;
        match &self.failure {
            None => writeln!(f, "result: pass"),
            Some(failure) => write!(f, "result: FAIL\n{failure}"),
        }
    }
}

/// Generates `config.cases` draws and checks each; stops at the first failure.
pub fn run_fuzz(config: &FuzzConfig) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = FuzzReport::default();
    for case in 0..config.cases {
        report.cases += 1;
        for instance in random_instances(&mut rng, &config.bounds) {
            report.instances += 1;
            match check_instance(&instance, &config.options) {
                Ok(stats) => {
                    report.iterations += stats.iterations;
                    report.snapshots += stats.snapshots;
                    report.enumerated_instances += usize::from(stats.enumerated.is_some());
                    let holds = naive_model_check(&instance.arena, &instance.state, &instance.formula).unwrap_or(false);
                    if holds {
                        report.proved += 1;
                    } else {
                        report.disproved += 1;
                    }
                }
                Err(failure) => {
                    report.failure = Some(FuzzFailure { case, instance, failure });
                    return report;
                }
            }
        }
    }
    report
}
