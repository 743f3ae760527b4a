//! A game arena computed on the fly instead of loaded from a file.
//!
//! Two players take turns removing one or two stones; whoever takes the last
//! stone wins. "Alice can force a win" is the formula
//!
//! ```text
//! W0 = alice_won
//! Wk = alice_won | <alice>(alice_won | [bob]W(k-1))
//! ```
//!
//! and the search only ever generates positions it needs.
//!
//! cargo run --example programmatic_arena

use std::cell::Cell;
use std::collections::BTreeSet;
use std::fmt;

use mmlk::cost::Depth;
use mmlk::{mps_solve, AgentId, Arena, ArenaError, AtomId, Formula};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Position {
    stones: u32,
    alice_to_move: bool,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.stones, if self.alice_to_move { "A" } else { "B" })
    }
}

struct Nim {
    atoms: Vec<AtomId>,
    agents: Vec<AgentId>,
    generated: Cell<usize>,
}

impl Nim {
    fn new() -> Self {
        Nim {
            atoms: vec![AtomId::new("alice_won")],
            agents: vec![AgentId::new("alice"), AgentId::new("bob")],
            generated: Cell::new(0),
        }
    }
}

impl Arena for Nim {
    type State = Position;

    fn atoms(&self) -> &[AtomId] {
        &self.atoms
    }

    fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    fn successors(&self, state: &Position, agent: &AgentId) -> Result<Vec<Position>, ArenaError> {
        let mover = match agent.as_str() {
            "alice" => true,
            "bob" => false,
            _ => return Err(ArenaError::UnknownAgent(agent.clone())),
        };
        if mover != state.alice_to_move {
            return Ok(Vec::new());
        }
        let next: Vec<Position> = (1..=2)
            .filter(|take| *take <= state.stones)
            .map(|take| Position { stones: state.stones - take, alice_to_move: !state.alice_to_move })
            .collect();
        self.generated.set(self.generated.get() + next.len());
        Ok(next)
    }

    fn labels(&self, state: &Position) -> Result<BTreeSet<AtomId>, ArenaError> {
        let mut labels = BTreeSet::new();
        // Bob to move on an empty heap means Alice took the last stone
        if state.stones == 0 && !state.alice_to_move {
            labels.insert(self.atoms[0].clone());
        }
        Ok(labels)
    }
}

fn alice_wins_within(rounds: u32) -> Formula {
    let won = Formula::atom("alice_won");
    (0..rounds).fold(won.clone(), |inner, _| {
        let after_alice = Formula::or(won.clone(), Formula::boxed("bob", inner));
        Formula::or(won.clone(), Formula::diamond("alice", after_alice))
    })
}

fn main() {
    let nim = Nim::new();
    for stones in 1..=9 {
        let start = Position { stones, alice_to_move: true };
        nim.generated.set(0);
        let phi = alice_wins_within(stones.div_ceil(2));
        let result = mps_solve(&nim, start, phi, &Depth).unwrap();
        println!(
            "{stones} stones: Alice {} (witness depth {}, {} positions generated)",
            if result.verdict == mmlk::Polarity::Proof { "wins" } else { "loses" },
            result.cost(),
            nim.generated.get()
        );
    }
}
