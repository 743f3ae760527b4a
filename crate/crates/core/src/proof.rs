//! Proofs and disproofs: extraction from a solved search, independent
//! validation against the arena, cost evaluation and serialization.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{Arena, ArenaError};
use crate::cost::{Cost, CostModel};
use crate::engine::{NodeId, SearchTree};
use crate::formula::{parse_unchecked, Formula, FormulaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Proof,
    Disproof,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Proof => Polarity::Disproof,
            Polarity::Disproof => Polarity::Proof,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Proof => "proof",
            Polarity::Disproof => "disproof",
        })
    }
}

/// A proof (`state ⊨ formula`) or disproof (`state ⊭ formula`) tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree<S> {
    pub state: S,
    pub formula: Formula,
    pub polarity: Polarity,
    pub children: Vec<ProofTree<S>>,
}

impl<S> ProofTree<S> {
    pub fn leaf(state: S, formula: Formula, polarity: Polarity) -> Self {
        ProofTree { state, formula, polarity, children: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ProofTree::node_count).sum::<usize>()
    }

    /// Node at the given child-index path.
    pub fn at(&self, path: &[usize]) -> Option<&ProofTree<S>> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get(i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut ProofTree<S>> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get_mut(i)?.at_mut(rest),
        }
    }
}

/// A proved conjunction whose two conjuncts are the same formula keeps one
/// child for both; its cost is aggregated as if the child appeared twice.
pub(crate) fn shared_conjunct(phi: &Formula) -> bool {
    matches!(phi, Formula::And(l, r) if l == r)
}

/// Cost `K` of a (dis)proof tree.
pub fn proof_cost<S, M: CostModel + ?Sized>(model: &M, tree: &ProofTree<S>) -> Cost {
    let child_costs = || tree.children.iter().map(|c| proof_cost(model, c)).collect::<Vec<_>>();
    match &tree.formula {
        Formula::Atom(p) => model.base_cost(p),
        Formula::Not(_) => tree.children.first().map_or(Cost::INFINITY, |c| proof_cost(model, c)),
        Formula::And(..) => {
            let mut costs = child_costs();
            if tree.polarity == Polarity::Proof && costs.len() == 1 && shared_conjunct(&tree.formula) {
                costs.push(costs[0]);
            }
            model.agg_conj(&costs)
        }
        Formula::Box(agent, _) => model.agg_box(agent, &child_costs()),
    }
}

/// The clause of the (dis)proof definition a node violates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("atom not in labels")]
    AtomNotInLabels,
    #[error("atom in labels")]
    AtomInLabels,
    #[error("expected {expected} children, found {found}")]
    ChildCount { expected: usize, found: usize },
    #[error("child has polarity {found}, expected {expected}")]
    ChildPolarity { expected: Polarity, found: Polarity },
    #[error("child label ({state}, {formula}) is not allowed here")]
    ChildLabel { state: String, formula: String },
    #[error("duplicate child ({state}, {formula})")]
    DuplicateChild { state: String, formula: String },
    #[error("missing successor {0}")]
    MissingSuccessor(String),
    #[error("conjunct {0} is not covered")]
    MissingConjunct(String),
    #[error("arena query failed: {0}")]
    Arena(#[from] ArenaError),
}

/// First violation found, with the child-index path from the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {polarity} at node {path:?} ({state} , {formula}): {violation}")]
pub struct ProofError {
    pub path: Vec<usize>,
    pub state: String,
    pub formula: String,
    pub polarity: Polarity,
    pub violation: Violation,
}

/// Validates `tree` against the arena. Effort numbers play no part: every
/// clause is decided from the tree shape and fresh arena queries.
#[allow(clippy::result_large_err)]
pub fn check_proof<A: Arena>(arena: &A, tree: &ProofTree<A::State>) -> Result<(), ProofError> {
    let mut path = Vec::new();
    check_node(arena, tree, &mut path)
}

#[allow(clippy::result_large_err)]
fn check_node<A: Arena>(arena: &A, tree: &ProofTree<A::State>, path: &mut Vec<usize>) -> Result<(), ProofError> {
    if let Err(violation) = check_local(arena, tree) {
        return Err(ProofError {
            path: path.clone(),
            state: tree.state.to_string(),
            formula: tree.formula.to_string(),
            polarity: tree.polarity,
            violation,
        });
    }
    for (i, child) in tree.children.iter().enumerate() {
        path.push(i);
        check_node(arena, child, path)?;
        path.pop();
    }
    Ok(())
}

fn child_count<S>(tree: &ProofTree<S>, expected: usize) -> Result<(), Violation> {
    if tree.children.len() == expected {
        Ok(())
    } else {
        Err(Violation::ChildCount { expected, found: tree.children.len() })
    }
}

fn bad_label<S: fmt::Display>(child: &ProofTree<S>) -> Violation {
    Violation::ChildLabel { state: child.state.to_string(), formula: child.formula.to_string() }
}

fn check_local<A: Arena>(arena: &A, tree: &ProofTree<A::State>) -> Result<(), Violation> {
    let q = &tree.state;
    let child_polarity = match tree.formula {
        Formula::Not(_) => tree.polarity.flip(),
        _ => tree.polarity,
    };
    for child in &tree.children {
        if child.polarity != child_polarity {
            return Err(Violation::ChildPolarity { expected: child_polarity, found: child.polarity });
        }
    }
    let mut seen = HashSet::new();
    for child in &tree.children {
        if !seen.insert((&child.state, &child.formula)) {
            return Err(Violation::DuplicateChild {
                state: child.state.to_string(),
                formula: child.formula.to_string(),
            });
        }
    }

    match (&tree.formula, tree.polarity) {
        (Formula::Atom(p), polarity) => {
            child_count(tree, 0)?;
            match (arena.holds(q, p)?, polarity) {
                (true, Polarity::Proof) | (false, Polarity::Disproof) => Ok(()),
                (false, Polarity::Proof) => Err(Violation::AtomNotInLabels),
                (true, Polarity::Disproof) => Err(Violation::AtomInLabels),
            }
        }
        (Formula::Not(inner), _) => {
            child_count(tree, 1)?;
            let child = &tree.children[0];
            if child.state != *q || child.formula != **inner {
                return Err(bad_label(child));
            }
            Ok(())
        }
        (Formula::And(left, right), Polarity::Proof) => {
            let expected = if left == right { 1 } else { 2 };
            child_count(tree, expected)?;
            for child in &tree.children {
                if child.state != *q || (child.formula != **left && child.formula != **right) {
                    return Err(bad_label(child));
                }
            }
            for conjunct in [left, right] {
                if !tree.children.iter().any(|c| c.formula == **conjunct) {
                    return Err(Violation::MissingConjunct(conjunct.to_string()));
                }
            }
            Ok(())
        }
        (Formula::And(left, right), Polarity::Disproof) => {
            child_count(tree, 1)?;
            let child = &tree.children[0];
            if child.state != *q || (child.formula != **left && child.formula != **right) {
                return Err(bad_label(child));
            }
            Ok(())
        }
        (Formula::Box(agent, inner), polarity) => {
            let successors = dedup(arena.successors(q, agent)?);
            for child in &tree.children {
                if child.formula != **inner || !successors.contains(&child.state) {
                    return Err(bad_label(child));
                }
            }
            match polarity {
                Polarity::Proof => {
                    if let Some(missing) = successors.iter().find(|s| !tree.children.iter().any(|c| c.state == **s)) {
                        return Err(Violation::MissingSuccessor(missing.to_string()));
                    }
                    child_count(tree, successors.len())
                }
                Polarity::Disproof => child_count(tree, 1),
            }
        }
    }
}

/// Removes repeated states, keeping first occurrences.
pub(crate) fn dedup<S: Clone + Eq + Hash>(states: Vec<S>) -> Vec<S> {
    let mut seen = HashSet::new();
    states.into_iter().filter(|s| seen.insert(s.clone())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("root is not solved")]
    Unsolved,
    #[error("disproved node {0:?} has no disproved child")]
    NoSolvedChild(NodeId),
}

/// Pulls the (dis)proof out of a solved search tree.
///
/// Proved conjunction and box nodes keep all their children. Disproved ones
/// keep a single disproved child minimizing the aggregated disproof number,
/// lowest index first.
pub fn extract<S, M>(model: &M, tree: &SearchTree<S>) -> Result<ProofTree<S>, ExtractError>
where
    S: Clone,
    M: CostModel + ?Sized,
{
    let root = tree.root();
    let polarity = tree.node(root).verdict().ok_or(ExtractError::Unsolved)?;
    extract_node(model, tree, root, polarity)
}

fn extract_node<S, M>(
    model: &M,
    tree: &SearchTree<S>,
    id: NodeId,
    polarity: Polarity,
) -> Result<ProofTree<S>, ExtractError>
where
    S: Clone,
    M: CostModel + ?Sized,
{
    let node = tree.node(id);
    let mut out = ProofTree::leaf(node.state().clone(), node.formula().clone(), polarity);
    let kept: Vec<(NodeId, Polarity)> = match (node.formula(), polarity) {
        (Formula::Atom(_), _) => Vec::new(),
        (Formula::Not(_), p) => node.children().iter().map(|&c| (c, p.flip())).collect(),
        (_, Polarity::Proof) => node.children().iter().map(|&c| (c, Polarity::Proof)).collect(),
        (formula, Polarity::Disproof) => {
            let aggregate = |c: NodeId| {
                let mdn = tree.node(c).mdn();
                match formula {
                    Formula::Box(agent, _) => model.agg_box(agent, &[mdn]),
                    _ => model.agg_conj(&[mdn]),
                }
            };
            let best = node
                .children()
                .iter()
                .copied()
                .filter(|&c| tree.node(c).mpn().is_infinite())
                .min_by_key(|&c| aggregate(c))
                .ok_or(ExtractError::NoSolvedChild(id))?;
            vec![(best, Polarity::Disproof)]
        }
    };
    for (child, p) in kept {
        out.children.push(extract_node(model, tree, child, p)?);
    }
    Ok(out)
}

/// Output format for [`serialize_proof`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofFormat {
    Dot,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown proof format `{0}` (expected dot or structured)")]
pub struct UnknownFormat(pub String);

impl FromStr for ProofFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ProofFormat::Dot),
            "structured" => Ok(ProofFormat::Structured),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    state: String,
    formula: String,
    polarity: Polarity,
    children: Vec<Record>,
}

fn to_record<S: fmt::Display>(tree: &ProofTree<S>) -> Record {
    Record {
        state: tree.state.to_string(),
        formula: tree.formula.to_string(),
        polarity: tree.polarity,
        children: tree.children.iter().map(to_record).collect(),
    }
}

/// Renders a (dis)proof. DOT labels include each subtree's cost under `model`.
pub fn serialize_proof<S: fmt::Display, M: CostModel + ?Sized>(
    tree: &ProofTree<S>,
    format: ProofFormat,
    model: &M,
) -> String {
    match format {
        ProofFormat::Structured => {
            let mut text = serde_json::to_string_pretty(&to_record(tree)).expect("proof serialization cannot fail");
            text.push('\n');
            text
        }
        ProofFormat::Dot => to_dot(tree, model),
    }
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot<S: fmt::Display, M: CostModel + ?Sized>(tree: &ProofTree<S>, model: &M) -> String {
    fn walk<S: fmt::Display, M: CostModel + ?Sized>(
        tree: &ProofTree<S>,
        model: &M,
        next: &mut usize,
        out: &mut String,
    ) -> usize {
        let id = *next;
        *next += 1;
        let (relation, shape) = match tree.polarity {
            Polarity::Proof => ("⊨", "box"),
            Polarity::Disproof => ("⊭", "ellipse"),
        };
        let label = escape(&format!("{} {} {}", tree.state, relation, tree.formula));
        let cost = proof_cost(model, tree);
        let _ = writeln!(out, "  n{id} [label=\"{label}\\ncost {cost}\", shape={shape}];");
        for child in &tree.children {
            let child_id = walk(child, model, next, out);
            let _ = writeln!(out, "  n{id} -> n{child_id};");
        }
        id
    }

    let mut out = String::from("digraph proof {\n  node [fontname=\"monospace\"];\n  edge [style=solid];\n");
    walk(tree, model, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

#[derive(Debug, Error)]
pub enum ProofParseError {
    #[error("malformed proof document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("bad formula `{text}`: {source}")]
    Formula { text: String, source: FormulaError },
    #[error("bad state `{0}`")]
    State(String),
}

/// Reads the structured format back.
pub fn parse_structured<S: FromStr>(text: &str) -> Result<ProofTree<S>, ProofParseError> {
    fn convert<S: FromStr>(record: Record) -> Result<ProofTree<S>, ProofParseError> {
        let formula = parse_unchecked(&record.formula)
            .map_err(|source| ProofParseError::Formula { text: record.formula.clone(), source })?;
        let state = record.state.parse().map_err(|_| ProofParseError::State(record.state.clone()))?;
        let children = record.children.into_iter().map(convert).collect::<Result<_, _>>()?;
        Ok(ProofTree { state, formula, polarity: record.polarity, children })
    }
    convert(serde_json::from_str(text)?)
}
