//! The contract every puzzle family implements, plus the small vocabulary
//! (labels, slot diffs, traces) shared by the sampler, renderer and judge.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::Result;

/// Default cap on backtracking nodes for every solvability oracle.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateLabel {
    Solvable,
    Unsolvable,
}

impl StateLabel {
    pub fn from_bool(solvable: bool) -> Self {
        if solvable {
            StateLabel::Solvable
        } else {
            StateLabel::Unsolvable
        }
    }

    pub fn is_solvable(self) -> bool {
        self == StateLabel::Solvable
    }
}

/// One slot whose content differs between two states. `slot` is a
/// domain-specific coordinate (row/col for grids, vertex for colorings,
/// expression position for Game of 24).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotChange {
    pub slot: Vec<usize>,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTrace<S> {
    pub states: Vec<S>,
    pub labels: Vec<StateLabel>,
    pub instance_id: String,
}

impl<S> PathTrace<S> {
    pub fn new(instance_id: impl Into<String>) -> Self {
        Self {
            states: Vec::new(),
            labels: Vec::new(),
            instance_id: instance_id.into(),
        }
    }

    pub fn push(&mut self, state: S, label: StateLabel) {
        self.states.push(state);
        self.labels.push(label);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

/// Capability surface of one puzzle instance (the instance data and the
/// rules live together in the implementing value).
pub trait PuzzleDomain: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;
    type Move: Clone + Debug + PartialEq + Serialize + DeserializeOwned + Send + Sync;

    fn initial(&self) -> Self::State;

    fn rule_valid(&self, state: &Self::State) -> bool;

    /// Every minimal forward move whose result is rule-valid, in a fixed order.
    fn forward_moves(&self, state: &Self::State) -> Vec<Self::Move>;

    /// The moves expanded by the search tree (a subset of `forward_moves`).
    /// Sudoku and coloring branch on a single slot; the others branch on
    /// every forward move.
    fn branch_moves(&self, state: &Self::State) -> Vec<Self::Move> {
        self.forward_moves(state)
    }

    /// Forward-shaped moves on the branching slot whose result breaks a rule.
    fn violating_moves(&self, _state: &Self::State) -> Vec<Self::Move> {
        Vec::new()
    }

    fn apply(&self, state: &Self::State, mv: &Self::Move) -> Result<Self::State>;

    /// Undo `mv`, which must be the move that produced `state`.
    fn revert(&self, state: &Self::State, mv: &Self::Move) -> Result<Self::State>;

    fn is_solution(&self, state: &Self::State) -> bool;

    /// Oracle for "some solution extends this state". Rule-invalid states
    /// yield `Ok(false)`; a blown search budget is an error.
    fn is_solvable(&self, state: &Self::State) -> Result<bool>;

    fn label(&self, state: &Self::State) -> Result<StateLabel> {
        if !self.rule_valid(state) {
            return Ok(StateLabel::Unsolvable);
        }
        self.is_solvable(state).map(StateLabel::from_bool)
    }

    /// Solvable forward children, in `forward_moves` order.
    fn solvable_children(&self, state: &Self::State) -> Result<Vec<(Self::Move, Self::State)>> {
        let mut out = Vec::new();
        for mv in self.forward_moves(state) {
            let child = self.apply(state, &mv)?;
            if self.is_solvable(&child)? {
                out.push((mv, child));
            }
        }
        Ok(out)
    }

    fn canonical_text(&self, state: &Self::State) -> String;

    fn parse_state(&self, text: &str) -> Result<Self::State>;

    /// Count of unfilled slots.
    fn difficulty(&self, state: &Self::State) -> usize;

    /// Longest possible path from the initial state to a solution.
    fn max_depth(&self) -> usize;

    fn diff(&self, a: &Self::State, b: &Self::State) -> Result<Vec<SlotChange>>;

    /// True when `to` is `from` plus exactly one forward minimal move,
    /// regardless of whether the result obeys the rules.
    fn is_forward_step(&self, from: &Self::State, to: &Self::State) -> bool;

    /// Key used to compare a proposed state against gold answers.
    fn state_key(&self, state: &Self::State) -> String {
        self.canonical_text(state)
    }
}

/// True iff every state is rule-valid and each consecutive pair is one
/// forward move apart.
pub fn validate_trace<D: PuzzleDomain>(trace: &PathTrace<D::State>, domain: &D) -> bool {
    if !trace.states.iter().all(|s| domain.rule_valid(s)) {
        return false;
    }
    trace
        .states
        .windows(2)
        .all(|w| domain.is_forward_step(&w[0], &w[1]))
}
