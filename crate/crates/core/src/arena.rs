//! Game arenas: atom-labelled states and agent-labelled transitions.
//!
//! [`Arena`] is the query interface the search and the oracle use. An arena
//! only has to answer questions about states it is asked about, so large
//! games can implement it lazily. [`ExplicitArena`] is the in-memory form
//! loaded from arena files.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! name_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                $name(Arc::from(name.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                $name::new(name)
            }
        }

        impl From<String> for $name {
            fn from(name: String) -> Self {
                $name::new(name)
            }
        }

        impl FromStr for $name {
            type Err = std::convert::Infallible;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Ok($name::new(s))
            }
        }
    };
}

name_id!(
    /// State label. Two atoms are equal iff their names are equal.
    AtomId
);
name_id!(
    /// Transition label.
    AgentId
);
name_id!(
    /// State of an [`ExplicitArena`], identified by its declared name.
    StateId
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(AgentId),
    #[error("unknown atom `{0}`")]
    UnknownAtom(AtomId),
}

/// Read-only access to a game arena.
///
/// `successors` must be deterministic. The search removes duplicate
/// successors itself, keeping the first occurrence.
pub trait Arena {
    type State: Clone + Eq + Hash + fmt::Debug + fmt::Display;

    fn atoms(&self) -> &[AtomId];

    fn agents(&self) -> &[AgentId];

    fn successors(&self, state: &Self::State, agent: &AgentId) -> Result<Vec<Self::State>, ArenaError>;

    fn labels(&self, state: &Self::State) -> Result<BTreeSet<AtomId>, ArenaError>;

    /// Whether `atom` labels `state`. Override when a single atom is cheaper
    /// to query than the whole label set.
    fn holds(&self, state: &Self::State, atom: &AtomId) -> Result<bool, ArenaError> {
        Ok(self.labels(state)?.contains(atom))
    }

    fn has_atom(&self, atom: &AtomId) -> bool {
        self.atoms().contains(atom)
    }

    fn has_agent(&self, agent: &AgentId) -> bool {
        self.agents().contains(agent)
    }
}

impl<A: Arena + ?Sized> Arena for &A {
    type State = A::State;

    fn atoms(&self) -> &[AtomId] {
        (**self).atoms()
    }

    fn agents(&self) -> &[AgentId] {
        (**self).agents()
    }

    fn successors(&self, state: &Self::State, agent: &AgentId) -> Result<Vec<Self::State>, ArenaError> {
        (**self).successors(state, agent)
    }

    fn labels(&self, state: &Self::State) -> Result<BTreeSet<AtomId>, ArenaError> {
        (**self).labels(state)
    }

    fn holds(&self, state: &Self::State, atom: &AtomId) -> Result<bool, ArenaError> {
        (**self).holds(state, atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct StateEntry {
    id: StateId,
    labels: Vec<AtomId>,
    // successors per agent index, in declaration order
    moves: Vec<Vec<StateId>>,
}

/// Fully enumerated arena. Declaration order fixes successor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitArena {
    atoms: Vec<AtomId>,
    agents: Vec<AgentId>,
    states: Vec<StateEntry>,
    index: HashMap<StateId, usize>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
}

impl From<serde_json::Error> for LoadError {
    fn from(err: serde_json::Error) -> Self {
        LoadError::Syntax { line: err.line(), column: err.column(), message: err.to_string() }
    }
}

fn semantic(message: impl Into<String>) -> LoadError {
    LoadError::Semantic(message.into())
}

/// Incremental construction of an [`ExplicitArena`] with the same checks
/// the file loader applies.
#[derive(Debug, Default)]
pub struct ArenaBuilder {
    atoms: Vec<AtomId>,
    agents: Vec<AgentId>,
    states: Vec<(StateId, Vec<AtomId>)>,
    transitions: Vec<(StateId, AgentId, StateId)>,
}

impl ArenaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atom(mut self, name: &str) -> Self {
        self.atoms.push(AtomId::new(name));
        self
    }

    pub fn agent(mut self, name: &str) -> Self {
        self.agents.push(AgentId::new(name));
        self
    }

    pub fn state(mut self, name: &str, labels: &[&str]) -> Self {
        self.states.push((StateId::new(name), labels.iter().map(AtomId::new).collect()));
        self
    }

    pub fn transition(mut self, from: &str, agent: &str, to: &str) -> Self {
        self.transitions.push((StateId::new(from), AgentId::new(agent), StateId::new(to)));
        self
    }

    pub fn build(self) -> Result<ExplicitArena, LoadError> {
        if self.agents.is_empty() {
            return Err(semantic("arena must declare at least one agent"));
        }
        if self.atoms.is_empty() {
            return Err(semantic("arena must declare at least one atom"));
        }
        let mut seen = HashSet::new();
        for atom in &self.atoms {
            if !seen.insert(atom.as_str()) {
                return Err(semantic(format!("duplicate atom `{atom}`")));
            }
        }
        seen.clear();
        for agent in &self.agents {
            if !seen.insert(agent.as_str()) {
                return Err(semantic(format!("duplicate agent `{agent}`")));
            }
        }
        let mut index = HashMap::new();
        let mut states = Vec::with_capacity(self.states.len());
        for (id, labels) in self.states {
            if index.insert(id.clone(), states.len()).is_some() {
                return Err(semantic(format!("duplicate state `{id}`")));
            }
            let mut own = HashSet::new();
            for label in &labels {
                if !self.atoms.contains(label) {
                    return Err(semantic(format!("state `{id}` uses undeclared atom `{label}`")));
                }
                if !own.insert(label.clone()) {
                    return Err(semantic(format!("state `{id}` repeats label `{label}`")));
                }
            }
            states.push(StateEntry { id, labels, moves: vec![Vec::new(); self.agents.len()] });
        }
        for (from, agent, to) in self.transitions {
            let &src =
                index.get(&from).ok_or_else(|| semantic(format!("transition from undeclared state `{from}`")))?;
            if !index.contains_key(&to) {
                return Err(semantic(format!("transition to undeclared state `{to}`")));
            }
            let slot = self
                .agents
                .iter()
                .position(|a| *a == agent)
                .ok_or_else(|| semantic(format!("transition uses undeclared agent `{agent}`")))?;
            let moves = &mut states[src].moves[slot];
            if moves.contains(&to) {
                return Err(semantic(format!("duplicate transition `{from}` -{agent}-> `{to}`")));
            }
            moves.push(to);
        }
        Ok(ExplicitArena { atoms: self.atoms, agents: self.agents, states, index })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArenaFile {
    atoms: Vec<String>,
    agents: Vec<String>,
    states: Vec<StateRecord>,
    transitions: Vec<TransitionRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    id: String,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRecord {
    from: String,
    agent: String,
    to: String,
}

impl ExplicitArena {
    /// Parses an arena file (JSON with `atoms`, `agents`, `states`, `transitions`).
    pub fn load(text: &str) -> Result<Self, LoadError> {
        let file: ArenaFile = serde_json::from_str(text)?;
        let mut builder = ArenaBuilder::new();
        for atom in &file.atoms {
            builder = builder.atom(atom);
        }
        for agent in &file.agents {
            builder = builder.agent(agent);
        }
        for state in &file.states {
            let labels: Vec<&str> = state.labels.iter().map(String::as_str).collect();
            builder = builder.state(&state.id, &labels);
        }
        for t in &file.transitions {
            builder = builder.transition(&t.from, &t.agent, &t.to);
        }
        builder.build()
    }

    /// Canonical arena file text. Transitions are grouped by source state,
    /// then agent, each group in successor order.
    pub fn to_text(&self) -> String {
        let file = ArenaFile {
            atoms: self.atoms.iter().map(ToString::to_string).collect(),
            agents: self.agents.iter().map(ToString::to_string).collect(),
            states: self
                .states
                .iter()
                .map(|s| StateRecord {
                    id: s.id.to_string(),
                    labels: s.labels.iter().map(ToString::to_string).collect(),
                })
                .collect(),
            transitions: self
                .states
                .iter()
                .flat_map(|s| {
                    self.agents.iter().zip(&s.moves).flat_map(move |(agent, targets)| {
                        targets.iter().map(move |to| TransitionRecord {
                            from: s.id.to_string(),
                            agent: agent.to_string(),
                            to: to.to_string(),
                        })
                    })
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("arena serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn states(&self) -> impl Iterator<Item = &StateId> {
        self.states.iter().map(|s| &s.id)
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        let id = StateId::new(name);
        self.index.contains_key(&id).then_some(id)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    fn entry(&self, state: &StateId) -> Result<&StateEntry, ArenaError> {
        self.index.get(state).map(|&i| &self.states[i]).ok_or_else(|| ArenaError::UnknownState(state.to_string()))
    }

    /// Shortest distance (over all agents) from `from` to every reachable state.
    pub fn distances(&self, from: &StateId) -> Result<HashMap<StateId, usize>, ArenaError> {
        self.entry(from)?;
        let mut dist = HashMap::from([(from.clone(), 0)]);
        let mut frontier = vec![from.clone()];
        let mut depth = 0;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for state in &frontier {
                for targets in &self.entry(state)?.moves {
                    for to in targets {
                        if !dist.contains_key(to) {
                            dist.insert(to.clone(), depth);
                            next.push(to.clone());
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(dist)
    }
}

impl Arena for ExplicitArena {
    type State = StateId;

    fn atoms(&self) -> &[AtomId] {
        &self.atoms
    }

    fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    fn successors(&self, state: &StateId, agent: &AgentId) -> Result<Vec<StateId>, ArenaError> {
        let entry = self.entry(state)?;
        let slot =
            self.agents.iter().position(|a| a == agent).ok_or_else(|| ArenaError::UnknownAgent(agent.clone()))?;
        Ok(entry.moves[slot].clone())
    }

    fn labels(&self, state: &StateId) -> Result<BTreeSet<AtomId>, ArenaError> {
        Ok(self.entry(state)?.labels.iter().cloned().collect())
    }

    fn holds(&self, state: &StateId, atom: &AtomId) -> Result<bool, ArenaError> {
        Ok(self.entry(state)?.labels.contains(atom))
    }
}

/// Which arena method a recorded query went through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Successors(AgentId),
    Labels,
    Holds(AtomId),
}

/// Wraps an arena and logs every state it is queried about.
///
/// Single-threaded: the log lives in a `RefCell`.
pub struct RecordingArena<A: Arena> {
    inner: A,
    log: RefCell<Vec<(A::State, QueryKind)>>,
}

impl<A: Arena> RecordingArena<A> {
    pub fn new(inner: A) -> Self {
        RecordingArena { inner, log: RefCell::new(Vec::new()) }
    }

    pub fn queries(&self) -> Vec<(A::State, QueryKind)> {
        self.log.borrow().clone()
    }

    pub fn into_inner(self) -> A {
        self.inner
    }
}

impl<A: Arena> Arena for RecordingArena<A> {
    type State = A::State;

    fn atoms(&self) -> &[AtomId] {
        self.inner.atoms()
    }

    fn agents(&self) -> &[AgentId] {
        self.inner.agents()
    }

    fn successors(&self, state: &Self::State, agent: &AgentId) -> Result<Vec<Self::State>, ArenaError> {
        self.log.borrow_mut().push((state.clone(), QueryKind::Successors(agent.clone())));
        self.inner.successors(state, agent)
    }

    fn labels(&self, state: &Self::State) -> Result<BTreeSet<AtomId>, ArenaError> {
        self.log.borrow_mut().push((state.clone(), QueryKind::Labels));
        self.inner.labels(state)
    }

    fn holds(&self, state: &Self::State, atom: &AtomId) -> Result<bool, ArenaError> {
        self.log.borrow_mut().push((state.clone(), QueryKind::Holds(atom.clone())));
        self.inner.holds(state, atom)
    }
}
