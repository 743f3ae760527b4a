//! Extended nonnegative costs, cost models and the heuristics derived from them.
//!
//! A cost model is a base cost on atoms plus two aggregators, one for
//! conjunctions and one per agent for box modalities. Aggregators must be
//! increasing (adding or raising elements never lowers the result), map
//! `{∞}` to `∞`, and keep finite inputs finite. [`check_axioms`] tests
//! those properties on a concrete multiset.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::Deserialize;
use thiserror::Error;

use crate::arena::{AgentId, AtomId};
use crate::formula::Formula;

/// A nonnegative real cost, or infinity.
#[derive(Clone, Copy, PartialEq)]
pub struct Cost(f64);

impl Cost {
    pub const ZERO: Cost = Cost(0.0);
    pub const ONE: Cost = Cost(1.0);
    pub const INFINITY: Cost = Cost(f64::INFINITY);

    /// Builds a finite cost. Returns `None` for negative, NaN or infinite input.
    pub fn finite(value: f64) -> Option<Cost> {
        (value.is_finite() && value >= 0.0).then_some(Cost(value))
    }

    /// Like [`Cost::finite`] but also accepts `+∞`.
    pub fn new(value: f64) -> Option<Cost> {
        if value == f64::INFINITY {
            Some(Cost::INFINITY)
        } else {
            Cost::finite(value)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if self.0.fract() == 0.0 && self.0.abs() < 1e15 {
            write!(f, "{}", self.0 as i64)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Largest element, `0` for the empty multiset.
pub fn max_of(costs: &[Cost]) -> Cost {
    costs.iter().copied().max().unwrap_or(Cost::ZERO)
}

/// Smallest element, `∞` for the empty multiset.
pub fn min_of(costs: impl IntoIterator<Item = Cost>) -> Cost {
    costs.into_iter().min().unwrap_or(Cost::INFINITY)
}

/// Base cost plus conjunction and box aggregators.
///
/// Aggregators receive multisets as slices; implementations must not depend
/// on element order.
pub trait CostModel {
    fn base_cost(&self, atom: &AtomId) -> Cost;

    fn agg_conj(&self, costs: &[Cost]) -> Cost;

    fn agg_box(&self, agent: &AgentId, costs: &[Cost]) -> Cost;
}

impl<M: CostModel + ?Sized> CostModel for &M {
    fn base_cost(&self, atom: &AtomId) -> Cost {
        (**self).base_cost(atom)
    }

    fn agg_conj(&self, costs: &[Cost]) -> Cost {
        (**self).agg_conj(costs)
    }

    fn agg_box(&self, agent: &AgentId, costs: &[Cost]) -> Cost {
        (**self).agg_box(agent, costs)
    }
}

/// Nesting depth of box operators: `k = 0`, `A∧ = max`, `A□(a, X) = 1 + max X`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Depth;

impl CostModel for Depth {
    fn base_cost(&self, _atom: &AtomId) -> Cost {
        Cost::ZERO
    }

    fn agg_conj(&self, costs: &[Cost]) -> Cost {
        max_of(costs)
    }

    fn agg_box(&self, _agent: &AgentId, costs: &[Cost]) -> Cost {
        Cost::ONE + max_of(costs)
    }
}

/// Number of atomic queries: `k = 1`, `A∧ = Σ`, `A□(a, X) = Σ X`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryCount;

impl CostModel for QueryCount {
    fn base_cost(&self, _atom: &AtomId) -> Cost {
        Cost::ONE
    }

    fn agg_conj(&self, costs: &[Cost]) -> Cost {
        costs.iter().copied().sum()
    }

    fn agg_box(&self, _agent: &AgentId, costs: &[Cost]) -> Cost {
        costs.iter().copied().sum()
    }
}

/// Priced interactions: per-atom query cost and a per-agent price for
/// reading the transition function. `A∧ = Σ`, `A□(a, X) = k□a + Σ X`.
///
/// Atoms and agents without an explicit entry cost `1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Weighted {
    atom_costs: BTreeMap<AtomId, Cost>,
    box_costs: BTreeMap<AgentId, Cost>,
}

impl Weighted {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_atom_cost(mut self, atom: impl Into<AtomId>, cost: Cost) -> Self {
        assert!(cost.is_finite(), "atom costs must be finite");
        self.atom_costs.insert(atom.into(), cost);
        self
    }

    pub fn with_box_cost(mut self, agent: impl Into<AgentId>, cost: Cost) -> Self {
        assert!(cost.is_finite(), "box costs must be finite");
        self.box_costs.insert(agent.into(), cost);
        self
    }

    pub fn box_cost(&self, agent: &AgentId) -> Cost {
        self.box_costs.get(agent).copied().unwrap_or(Cost::ONE)
    }
}

impl CostModel for Weighted {
    fn base_cost(&self, atom: &AtomId) -> Cost {
        self.atom_costs.get(atom).copied().unwrap_or(Cost::ONE)
    }

    fn agg_conj(&self, costs: &[Cost]) -> Cost {
        costs.iter().copied().sum()
    }

    fn agg_box(&self, agent: &AgentId, costs: &[Cost]) -> Cost {
        self.box_cost(agent) + costs.iter().copied().sum()
    }
}

/// One of the three builtin models, selected at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinModel {
    Depth(Depth),
    QueryCount(QueryCount),
    Weighted(Weighted),
}

impl BuiltinModel {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinModel::Depth(_) => "depth",
            BuiltinModel::QueryCount(_) => "query_count",
            BuiltinModel::Weighted(_) => "weighted",
        }
    }

    fn inner(&self) -> &dyn CostModel {
        match self {
            BuiltinModel::Depth(m) => m,
            BuiltinModel::QueryCount(m) => m,
            BuiltinModel::Weighted(m) => m,
        }
    }
}

impl CostModel for BuiltinModel {
    fn base_cost(&self, atom: &AtomId) -> Cost {
        self.inner().base_cost(atom)
    }

    fn agg_conj(&self, costs: &[Cost]) -> Cost {
        self.inner().agg_conj(costs)
    }

    fn agg_box(&self, agent: &AgentId, costs: &[Cost]) -> Cost {
        self.inner().agg_box(agent, costs)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed cost configuration: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown cost model `{0}` (expected depth, query_count or weighted)")]
    UnknownModel(String),
    #[error("cost for `{name}` must be a nonnegative finite number, got {value}")]
    BadValue { name: String, value: f64 },
    #[error("`{0}` only applies to the weighted model")]
    NotWeighted(&'static str),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    #[serde(default)]
    atom_costs: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    box_costs: Option<BTreeMap<String, f64>>,
}

impl BuiltinModel {
    /// JSON configuration text that [`BuiltinModel::from_config`] reads back.
    pub fn to_config(&self) -> String {
        let mut value = serde_json::json!({ "model": self.name() });
        if let BuiltinModel::Weighted(w) = self {
            let atoms: BTreeMap<&str, f64> = w.atom_costs.iter().map(|(k, v)| (k.as_str(), v.value())).collect();
            let boxes: BTreeMap<&str, f64> = w.box_costs.iter().map(|(k, v)| (k.as_str(), v.value())).collect();
            value["atom_costs"] = serde_json::json!(atoms);
            value["box_costs"] = serde_json::json!(boxes);
        }
        value.to_string()
    }

    /// Model by bare name: `depth`, `query_count` or `weighted` (all weights 1).
    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        match name {
            "depth" => Ok(BuiltinModel::Depth(Depth)),
            "query_count" => Ok(BuiltinModel::QueryCount(QueryCount)),
            "weighted" => Ok(BuiltinModel::Weighted(Weighted::new())),
            other => Err(ConfigError::UnknownModel(other.to_string())),
        }
    }

    /// Parses a JSON cost configuration:
    ///
    /// ```json
    /// {"model": "weighted", "atom_costs": {"p": 2}, "box_costs": {"a": 3}}
    /// ```
    pub fn from_config(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let mut model = Self::from_name(&raw.model)?;
        match &mut model {
            BuiltinModel::Weighted(w) => {
                for (name, value) in raw.atom_costs.unwrap_or_default() {
                    let cost = Cost::finite(value).ok_or(ConfigError::BadValue { name: name.clone(), value })?;
                    w.atom_costs.insert(AtomId::new(name), cost);
                }
                for (name, value) in raw.box_costs.unwrap_or_default() {
                    let cost = Cost::finite(value).ok_or(ConfigError::BadValue { name: name.clone(), value })?;
                    w.box_costs.insert(AgentId::new(name), cost);
                }
            }
            _ => {
                if raw.atom_costs.is_some() {
                    return Err(ConfigError::NotWeighted("atom_costs"));
                }
                if raw.box_costs.is_some() {
                    return Err(ConfigError::NotWeighted("box_costs"));
                }
            }
        }
        Ok(model)
    }
}

/// Admissible lower bound on the cost of any proof of `phi` (the `I` heuristic).
pub fn heuristic_proof<M: CostModel + ?Sized>(model: &M, phi: &Formula) -> Cost {
    match phi {
        Formula::Atom(p) => model.base_cost(p),
        Formula::Not(inner) => heuristic_disproof(model, inner),
        Formula::And(left, right) => model.agg_conj(&[heuristic_proof(model, left), heuristic_proof(model, right)]),
        Formula::Box(agent, _) => model.agg_box(agent, &[]),
    }
}

/// Admissible lower bound on the cost of any disproof of `phi` (the `J` heuristic).
pub fn heuristic_disproof<M: CostModel + ?Sized>(model: &M, phi: &Formula) -> Cost {
    match phi {
        Formula::Atom(p) => model.base_cost(p),
        Formula::Not(inner) => heuristic_proof(model, inner),
        Formula::And(left, right) => {
            let l = model.agg_conj(&[heuristic_disproof(model, left)]);
            let r = model.agg_conj(&[heuristic_disproof(model, right)]);
            l.min(r)
        }
        Formula::Box(agent, inner) => model.agg_box(agent, &[heuristic_disproof(model, inner)]),
    }
}

/// Which aggregator an axiom violation was found in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Aggregator {
    Conj,
    Box(AgentId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomViolation {
    #[error("{aggregator:?} not increasing when adding {added:?} to {base:?}")]
    NotIncreasingOnInsert { aggregator: Aggregator, base: Vec<Cost>, added: Cost },
    #[error("{aggregator:?} not increasing when raising {low:?} to {high:?} in {base:?}")]
    NotIncreasingOnRaise { aggregator: Aggregator, base: Vec<Cost>, low: Cost, high: Cost },
    #[error("{aggregator:?} maps {{inf}} to a finite cost")]
    InfinityNotAbsorbed { aggregator: Aggregator },
    #[error("{aggregator:?} became infinite when adding finite {added:?} to {base:?}")]
    FinitenessLost { aggregator: Aggregator, base: Vec<Cost>, added: Cost },
    #[error("{aggregator:?} depends on element order for {base:?}")]
    OrderSensitive { aggregator: Aggregator, base: Vec<Cost> },
}

/// Checks the aggregator axioms for one multiset `base`, one pair `x <= y`
/// and every agent in `agents`.
pub fn check_axioms<M: CostModel + ?Sized>(
    model: &M,
    agents: &[AgentId],
    base: &[Cost],
    x: Cost,
    y: Cost,
) -> Result<(), AxiomViolation> {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let mut aggregators = vec![Aggregator::Conj];
    aggregators.extend(agents.iter().cloned().map(Aggregator::Box));
    for aggregator in aggregators {
        let eval = |costs: &[Cost]| match &aggregator {
            Aggregator::Conj => model.agg_conj(costs),
            Aggregator::Box(a) => model.agg_box(a, costs),
        };
        let with = |extra: Cost| {
            let mut v = base.to_vec();
            v.push(extra);
            v
        };
        let plain = eval(base);
        let with_x = eval(&with(x));
        let with_y = eval(&with(y));
        if with_x < plain {
            return Err(AxiomViolation::NotIncreasingOnInsert { aggregator, base: base.to_vec(), added: x });
        }
        if with_y < with_x {
            return Err(AxiomViolation::NotIncreasingOnRaise { aggregator, base: base.to_vec(), low: x, high: y });
        }
        if eval(&[Cost::INFINITY]).is_finite() {
            return Err(AxiomViolation::InfinityNotAbsorbed { aggregator });
        }
        if x.is_finite() && plain.is_finite() && with_x.is_infinite() {
            return Err(AxiomViolation::FinitenessLost { aggregator, base: base.to_vec(), added: x });
        }
        let mut reversed = base.to_vec();
        reversed.reverse();
        let mut rotated = base.to_vec();
        if !rotated.is_empty() {
            rotated.rotate_left(1);
        }
        if eval(&reversed) != plain || eval(&rotated) != plain {
            return Err(AxiomViolation::OrderSensitive { aggregator, base: base.to_vec() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    fn c(v: f64) -> Cost {
        Cost::new(v).unwrap()
    }

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(Cost::INFINITY > c(1e300));
        assert!(c(0.0) < c(0.5));
        assert_eq!(min_of([c(2.0), Cost::INFINITY, c(1.0)]), c(1.0));
        assert_eq!(min_of(std::iter::empty()), Cost::INFINITY);
        assert_eq!(max_of(&[]), Cost::ZERO);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(Cost::finite(-1.0).is_none());
        assert!(Cost::finite(f64::NAN).is_none());
        assert!(Cost::finite(f64::INFINITY).is_none());
        assert_eq!(Cost::new(f64::INFINITY), Some(Cost::INFINITY));
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(c(3.0).to_string(), "3");
        assert_eq!(c(0.5).to_string(), "0.5");
        assert_eq!(Cost::INFINITY.to_string(), "inf");
    }

    #[test]
    fn empty_aggregation_conventions() {
        let a = AgentId::new("a");
        assert_eq!(Depth.agg_box(&a, &[]), c(1.0));
        assert_eq!(QueryCount.agg_box(&a, &[]), c(0.0));
        assert_eq!(Weighted::new().with_box_cost("a", c(3.0)).agg_box(&a, &[]), c(3.0));
    }

    #[test]
    fn heuristic_examples() {
        let a = AgentId::new("a");
        assert_eq!(heuristic_proof(&QueryCount, &p()), c(1.0));
        assert_eq!(heuristic_proof(&Depth, &Formula::boxed(a.clone(), p())), c(1.0));
        assert_eq!(heuristic_proof(&QueryCount, &Formula::and(p(), p())), c(2.0));

        assert_eq!(heuristic_disproof(&QueryCount, &p()), c(1.0));
        assert_eq!(heuristic_disproof(&QueryCount, &Formula::and(p(), Formula::atom("q"))), c(1.0));
        assert_eq!(heuristic_disproof(&Depth, &Formula::boxed(a, p())), c(1.0));
    }

    #[test]
    fn negation_swaps_heuristics() {
        let a = AgentId::new("a");
        let phi = Formula::and(Formula::boxed(a, p()), p());
        let neg = Formula::negation(phi.clone());
        assert_eq!(heuristic_proof(&QueryCount, &neg), heuristic_disproof(&QueryCount, &phi));
        assert_eq!(heuristic_disproof(&QueryCount, &neg), heuristic_proof(&QueryCount, &phi));
    }

    #[test]
    fn config_parsing() {
        let m = BuiltinModel::from_config(r#"{"model": "weighted", "atom_costs": {"p": 2}, "box_costs": {"a": 3.5}}"#)
            .unwrap();
        assert_eq!(m.base_cost(&AtomId::new("p")), c(2.0));
        assert_eq!(m.base_cost(&AtomId::new("q")), c(1.0));
        assert_eq!(m.agg_box(&AgentId::new("a"), &[c(1.0)]), c(4.5));
        assert_eq!(m.agg_box(&AgentId::new("b"), &[]), c(1.0));

        assert_eq!(BuiltinModel::from_config(r#"{"model":"depth"}"#).unwrap(), BuiltinModel::Depth(Depth));
        assert!(matches!(BuiltinModel::from_config(r#"{"model":"fancy"}"#), Err(ConfigError::UnknownModel(_))));
        assert!(matches!(
            BuiltinModel::from_config(r#"{"model":"weighted","atom_costs":{"p":-1}}"#),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            BuiltinModel::from_config(r#"{"model":"depth","box_costs":{"a":2}}"#),
            Err(ConfigError::NotWeighted(_))
        ));
        assert!(matches!(BuiltinModel::from_config("{"), Err(ConfigError::Syntax(_))));
        assert_eq!(BuiltinModel::from_config(&m.to_config()).unwrap(), m);
    }

    #[test]
    fn builtins_satisfy_axioms_on_edge_cases() {
        let agents = [AgentId::new("a")];
        let models = [
            BuiltinModel::Depth(Depth),
            BuiltinModel::QueryCount(QueryCount),
            BuiltinModel::Weighted(Weighted::new().with_box_cost("a", c(0.0))),
        ];
        for model in &models {
            for base in [vec![], vec![Cost::INFINITY], vec![c(0.0), c(2.0)]] {
                for (x, y) in [(c(0.0), Cost::INFINITY), (c(1.0), c(1.0))] {
                    check_axioms(model, &agents, &base, x, y).unwrap();
                }
            }
        }
    }

    struct Broken;

    impl CostModel for Broken {
        fn base_cost(&self, _: &AtomId) -> Cost {
            Cost::ONE
        }

        fn agg_conj(&self, costs: &[Cost]) -> Cost {
            // `min` decreases when elements are added
            min_of(costs.iter().copied())
        }

        fn agg_box(&self, _: &AgentId, costs: &[Cost]) -> Cost {
            costs.first().copied().unwrap_or(Cost::ZERO)
        }
    }

    #[test]
    fn detects_broken_aggregator() {
        let err = check_axioms(&Broken, &[], &[c(2.0)], c(1.0), c(1.0)).unwrap_err();
        assert!(matches!(err, AxiomViolation::NotIncreasingOnInsert { .. }));
        let err = check_axioms(&Broken, &[AgentId::new("a")], &[], c(1.0), c(1.0)).unwrap_err();
        // conj of [] is inf, adding 1 lowers it
        assert!(matches!(err, AxiomViolation::NotIncreasingOnInsert { aggregator: Aggregator::Conj, .. }));
    }
}
