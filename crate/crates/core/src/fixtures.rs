//! Small reference arenas used by the tests and examples.

use crate::arena::ExplicitArena;

/// Three states, one agent, one atom: `q0 -a-> q1`, `q0 -a-> q2`, and only
/// `q1` is labelled `p`.
pub const A1: &str = r#"{
  "atoms": ["p"],
  "agents": ["a"],
  "states": [
    {"id": "q0", "labels": []},
    {"id": "q1", "labels": ["p"]},
    {"id": "q2", "labels": []}
  ],
  "transitions": [
    {"from": "q0", "agent": "a", "to": "q1"},
    {"from": "q0", "agent": "a", "to": "q2"}
  ]
}
"#;

pub fn a1() -> ExplicitArena {
    ExplicitArena::load(A1).expect("fixture A1 is well formed")
}
