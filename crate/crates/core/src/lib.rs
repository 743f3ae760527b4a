//! Model checking of multi-agent modal logic K over game arenas with
//! minimal proof search.
//!
//! The search answers `state ⊨ formula` and returns a proof or disproof of
//! minimal cost under a user-chosen [`cost::CostModel`].
//!
//! ```
//! use mmlk::{fixtures, formula::parse_formula, cost::QueryCount, engine::mps_solve, proof::extract};
//!
//! let arena = fixtures::a1();
//! let phi = parse_formula("[a]p", &arena).unwrap();
//! let result = mps_solve(&arena, arena.state("q0").unwrap(), phi, &QueryCount).unwrap();
//! let disproof = extract(&QueryCount, &result.tree).unwrap();
//! assert_eq!(disproof.children[0].state.as_str(), "q2");
//! ```

pub mod arena;
pub mod cli;
pub mod cost;
pub mod engine;
pub mod fixtures;
pub mod formula;
pub mod fuzz;
pub mod oracle;
pub mod proof;

pub use arena::{AgentId, Arena, ArenaError, AtomId, ExplicitArena, StateId};
pub use cost::{BuiltinModel, Cost, CostModel};
pub use engine::{mps_solve, SearchResult};
pub use formula::{parse_formula, Formula};
pub use proof::{check_proof, extract, proof_cost, Polarity, ProofTree};
