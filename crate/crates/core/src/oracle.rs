//! Ground truth for small instances, computed without the search.
//!
//! [`naive_model_check`] is the satisfaction relation by structural
//! recursion. [`min_cost`] computes the minimal proof and disproof costs
//! exactly. It relies on minimal (dis)proofs being built from minimal
//! sub-(dis)proofs: a proof's cost is an increasing aggregate of its
//! children's costs, so swapping any child for a cheaper one never raises
//! the total, and the cheapest choice at every node gives the cheapest tree.
//! [`enumerate_proofs`] lists every (dis)proof under a size bound and needs
//! no such argument, so the two cross-check each other.

use std::hash::Hash;

use crate::arena::{Arena, ArenaError};
use crate::cost::{min_of, Cost, CostModel};
use crate::formula::Formula;
use crate::proof::{dedup, Polarity, ProofTree};

/// Whether `state ⊨ formula`.
pub fn naive_model_check<A: Arena + ?Sized>(
    arena: &A,
    state: &A::State,
    formula: &Formula,
) -> Result<bool, ArenaError> {
    Ok(match formula {
        Formula::Atom(p) => arena.holds(state, p)?,
        Formula::Not(inner) => !naive_model_check(arena, state, inner)?,
        Formula::And(l, r) => naive_model_check(arena, state, l)? && naive_model_check(arena, state, r)?,
        Formula::Box(agent, inner) => {
            for next in arena.successors(state, agent)? {
                if !naive_model_check(arena, &next, inner)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResult {
    pub holds: bool,
    pub min_proof_cost: Cost,
    pub min_disproof_cost: Cost,
}

impl OracleResult {
    /// Minimal cost of whichever of proof or disproof exists.
    pub fn cost(&self) -> Cost {
        if self.holds {
            self.min_proof_cost
        } else {
            self.min_disproof_cost
        }
    }
}

/// Minimal proof and disproof costs of `state ⊨ formula`; `∞` when none exists.
pub fn min_cost<A, M>(arena: &A, state: &A::State, formula: &Formula, model: &M) -> Result<OracleResult, ArenaError>
where
    A: Arena + ?Sized,
    M: CostModel + ?Sized,
{
    let (min_proof_cost, min_disproof_cost) = min_costs(arena, state, formula, model)?;
    Ok(OracleResult { holds: min_proof_cost.is_finite(), min_proof_cost, min_disproof_cost })
}

fn min_costs<A, M>(arena: &A, state: &A::State, formula: &Formula, model: &M) -> Result<(Cost, Cost), ArenaError>
where
    A: Arena + ?Sized,
    M: CostModel + ?Sized,
{
    Ok(match formula {
        Formula::Atom(p) => {
            let k = model.base_cost(p);
            if arena.holds(state, p)? {
                (k, Cost::INFINITY)
            } else {
                (Cost::INFINITY, k)
            }
        }
        Formula::Not(inner) => {
            let (proof, disproof) = min_costs(arena, state, inner, model)?;
            (disproof, proof)
        }
        Formula::And(l, r) => {
            let (lp, ld) = min_costs(arena, state, l, model)?;
            let (rp, rd) = if l == r { (lp, ld) } else { min_costs(arena, state, r, model)? };
            let proof = if lp.is_finite() && rp.is_finite() { model.agg_conj(&[lp, rp]) } else { Cost::INFINITY };
            let disproof = min_of([ld, rd].into_iter().filter(|c| c.is_finite()).map(|c| model.agg_conj(&[c])));
            (proof, disproof)
        }
        Formula::Box(agent, inner) => {
            let mut proofs = Vec::new();
            let mut disproofs = Vec::new();
            for next in dedup(arena.successors(state, agent)?) {
                let (p, d) = min_costs(arena, &next, inner, model)?;
                proofs.push(p);
                if d.is_finite() {
                    disproofs.push(model.agg_box(agent, &[d]));
                }
            }
            let proof =
                if proofs.iter().all(|c| c.is_finite()) { model.agg_box(agent, &proofs) } else { Cost::INFINITY };
            (proof, min_of(disproofs))
        }
    })
}

/// All (dis)proofs of one pair with at most `bound` nodes.
#[derive(Debug, Clone)]
pub struct Enumeration<S> {
    pub proofs: Vec<ProofTree<S>>,
    pub disproofs: Vec<ProofTree<S>>,
    /// Set when some (dis)proof was skipped for exceeding the bound.
    pub truncated: bool,
}

/// Lists every structurally distinct proof and disproof of
/// `state ⊨ formula` that has at most `bound` nodes.
pub fn enumerate_proofs<A: Arena + ?Sized>(
    arena: &A,
    state: &A::State,
    formula: &Formula,
    bound: usize,
) -> Result<Enumeration<A::State>, ArenaError> {
    let mut truncated = false;
    let proofs = enumerate(arena, state, formula, Polarity::Proof, bound, &mut truncated)?;
    let disproofs = enumerate(arena, state, formula, Polarity::Disproof, bound, &mut truncated)?;
    Ok(Enumeration { proofs, disproofs, truncated })
}

fn enumerate<A: Arena + ?Sized>(
    arena: &A,
    state: &A::State,
    formula: &Formula,
    polarity: Polarity,
    budget: usize,
    truncated: &mut bool,
) -> Result<Vec<ProofTree<A::State>>, ArenaError> {
    if budget == 0 {
        *truncated = true;
        return Ok(Vec::new());
    }
    let node = |children| ProofTree { state: state.clone(), formula: formula.clone(), polarity, children };
    let inner_budget = budget - 1;
    Ok(match (formula, polarity) {
        (Formula::Atom(p), polarity) => {
            let holds = arena.holds(state, p)?;
            if holds == (polarity == Polarity::Proof) {
                vec![node(Vec::new())]
            } else {
                Vec::new()
            }
        }
        (Formula::Not(inner), polarity) => enumerate(arena, state, inner, polarity.flip(), inner_budget, truncated)?
            .into_iter()
            .map(|c| node(vec![c]))
            .collect(),
        (Formula::And(l, r), Polarity::Proof) => {
            let mut groups = vec![enumerate(arena, state, l, Polarity::Proof, inner_budget, truncated)?];
            if l != r {
                groups.push(enumerate(arena, state, r, Polarity::Proof, inner_budget, truncated)?);
            }
            product(&groups, inner_budget, truncated).into_iter().map(node).collect()
        }
        (Formula::And(l, r), Polarity::Disproof) => {
            let mut out: Vec<_> = enumerate(arena, state, l, Polarity::Disproof, inner_budget, truncated)?
                .into_iter()
                .map(|c| node(vec![c]))
                .collect();
            if l != r {
                out.extend(
                    enumerate(arena, state, r, Polarity::Disproof, inner_budget, truncated)?
                        .into_iter()
                        .map(|c| node(vec![c])),
                );
            }
            out
        }
        (Formula::Box(agent, inner), Polarity::Proof) => {
            let mut groups = Vec::new();
            for next in dedup(arena.successors(state, agent)?) {
                groups.push(enumerate(arena, &next, inner, Polarity::Proof, inner_budget, truncated)?);
            }
            product(&groups, inner_budget, truncated).into_iter().map(node).collect()
        }
        (Formula::Box(agent, inner), Polarity::Disproof) => {
            let mut out = Vec::new();
            for next in dedup(arena.successors(state, agent)?) {
                out.extend(
                    enumerate(arena, &next, inner, Polarity::Disproof, inner_budget, truncated)?
                        .into_iter()
                        .map(|c| node(vec![c])),
                );
            }
            out
        }
    })
}

/// One pick from every group, keeping only combinations within `budget` nodes.
fn product<S: Clone>(groups: &[Vec<ProofTree<S>>], budget: usize, truncated: &mut bool) -> Vec<Vec<ProofTree<S>>> {
    let mut partial: Vec<(Vec<ProofTree<S>>, usize)> = vec![(Vec::new(), 0)];
    for group in groups {
        let mut next = Vec::new();
        for (picked, size) in &partial {
            for choice in group {
                let total = size + choice.node_count();
                if total > budget {
                    *truncated = true;
                    continue;
                }
                let mut picked = picked.clone();
                picked.push(choice.clone());
                next.push((picked, total));
            }
        }
        partial = next;
    }
    partial.into_iter().map(|(picked, _)| picked).collect()
}

/// Node count of the fully expanded exploration tree of `state ⊨ formula`,
/// as the search would build it. Bounds the number of search iterations.
pub fn full_tree_size<A: Arena + ?Sized>(arena: &A, state: &A::State, formula: &Formula) -> Result<usize, ArenaError>
where
    A::State: Hash,
{
    Ok(1 + match formula {
        Formula::Atom(_) => 0,
        Formula::Not(inner) => full_tree_size(arena, state, inner)?,
        Formula::And(l, r) if l == r => full_tree_size(arena, state, l)?,
        Formula::And(l, r) => full_tree_size(arena, state, l)? + full_tree_size(arena, state, r)?,
        Formula::Box(agent, inner) => {
            let mut total = 0;
            for next in dedup(arena.successors(state, agent)?) {
                total += full_tree_size(arena, &next, inner)?;
            }
            total
        }
    })
}
