//! Finite-memory strategies.
//!
//! Memory is a table-driven transducer that reads every observed transition
//! `(state, action, next state)`. Several strategies of a profile may share
//! one transducer through an `Arc`; shared memory is tracked once when the
//! profile is evaluated.

use std::sync::Arc;

use crate::arena::{ActionId, Arena, Player, StateId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    size: usize,
    initial: usize,
    num_edges: usize,
    update: Vec<u32>,
}

impl Transducer {
    /// The one-state memory (positional strategies).
    pub fn trivial(arena: &Arena) -> Self {
        Transducer {
            size: 1,
            initial: 0,
            num_edges: arena.num_edges(),
            update: vec![0; arena.num_edges()],
        }
    }

    /// Tabulates `next(memory, state, action, successor index)`.
    pub fn from_fn(
        arena: &Arena,
        size: usize,
        initial: usize,
        next: impl Fn(usize, StateId, ActionId, usize) -> usize,
    ) -> Self {
        let num_edges = arena.num_edges();
        let mut update = vec![0u32; size * num_edges];
        for m in 0..size {
            for s in 0..arena.num_states() {
                for a in 0..arena.num_actions(s) {
                    for k in 0..arena.successors(s, a).len() {
                        let e = arena.edge(s, a, k);
                        let to = next(m, s, a, k);
                        debug_assert!(to < size);
                        update[m * num_edges + e] = to as u32;
                    }
                }
            }
        }
        Transducer {
            size,
            initial,
            num_edges,
            update,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Memory after observing edge `edge` (see [`Arena::edge`]).
    pub fn next(&self, memory: usize, edge: usize) -> usize {
        self.update[memory * self.num_edges + edge] as usize
    }

    pub fn fits(&self, arena: &Arena) -> bool {
        self.num_edges == arena.num_edges()
            && self.initial < self.size
            && self.update.len() == self.size * self.num_edges
            && self.update.iter().all(|&m| (m as usize) < self.size)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMemoryStrategy {
    pub owner: Player,
    pub memory: Arc<Transducer>,
    num_states: usize,
    /// `choice[m * num_states + s]`; entries for states the owner does not
    /// control are ignored.
    choice: Vec<ActionId>,
}

impl FiniteMemoryStrategy {
    pub fn new(
        owner: Player,
        arena: &Arena,
        memory: Arc<Transducer>,
        choose: impl Fn(usize, StateId) -> ActionId,
    ) -> Self {
        let n = arena.num_states();
        let mut choice = vec![0; memory.size() * n];
        for m in 0..memory.size() {
            for s in 0..n {
                if arena.controller(s) == owner {
                    choice[m * n + s] = choose(m, s);
                }
            }
        }
        FiniteMemoryStrategy {
            owner,
            memory,
            num_states: n,
            choice,
        }
    }

    /// Memoryless strategy choosing `choices[s]` at every owned state.
    pub fn positional(owner: Player, arena: &Arena, choices: &[ActionId]) -> Self {
        let memory = Arc::new(Transducer::trivial(arena));
        Self::new(owner, arena, memory, |_, s| choices[s])
    }

    pub fn action(&self, memory: usize, s: StateId) -> ActionId {
        self.choice[memory * self.num_states + s]
    }

    pub fn validate(&self, arena: &Arena) -> Result<()> {
        if !self.memory.fits(arena) || self.num_states != arena.num_states() {
            return Err(Error::InvalidProfile(format!(
                "strategy of player {} does not fit the arena",
                self.owner
            )));
        }
        for m in 0..self.memory.size() {
            for s in 0..arena.num_states() {
                if arena.controller(s) == self.owner && self.action(m, s) >= arena.num_actions(s) {
                    return Err(Error::InvalidProfile(format!(
                        "player {} chooses unknown action at state {}",
                        self.owner,
                        arena.state(s).name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One strategy per player, in player order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile {
    pub strategies: Vec<FiniteMemoryStrategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<FiniteMemoryStrategy>) -> Self {
        StrategyProfile { strategies }
    }

    /// Every player picks from one shared state-indexed table.
    pub fn positional(arena: &Arena, choices: &[ActionId]) -> Self {
        let memory = Arc::new(Transducer::trivial(arena));
        let strategies = (0..arena.num_players())
            .map(|i| FiniteMemoryStrategy::new(i, arena, memory.clone(), |_, s| choices[s]))
            .collect();
        StrategyProfile { strategies }
    }

    pub fn validate(&self, arena: &Arena) -> Result<()> {
        if self.strategies.len() != arena.num_players() {
            return Err(Error::InvalidProfile(format!(
                "{} strategies for {} players",
                self.strategies.len(),
                arena.num_players()
            )));
        }
        for (i, strategy) in self.strategies.iter().enumerate() {
            if strategy.owner != i {
                return Err(Error::InvalidProfile(format!(
                    "strategy {i} is owned by player {}",
                    strategy.owner
                )));
            }
            strategy.validate(arena)?;
        }
        Ok(())
    }

    /// `(τ_i, σ_{-i})`.
    pub fn with_deviation(&self, deviation: FiniteMemoryStrategy) -> Self {
        let mut out = self.clone();
        let i = deviation.owner;
        out.strategies[i] = deviation;
        out
    }

    /// Distinct transducers (by identity) and, per player, the index of the
    /// transducer that player's strategy reads.
    pub fn memories(&self) -> (Vec<Arc<Transducer>>, Vec<usize>) {
        let mut distinct: Vec<Arc<Transducer>> = Vec::new();
        let mut index = Vec::with_capacity(self.strategies.len());
        for s in &self.strategies {
            match distinct.iter().position(|t| Arc::ptr_eq(t, &s.memory)) {
                Some(k) => index.push(k),
                None => {
                    index.push(distinct.len());
                    distinct.push(s.memory.clone());
                }
            }
        }
        (distinct, index)
    }
}
