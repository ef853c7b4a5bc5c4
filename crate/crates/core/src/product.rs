//! Synchronous products of an arena with deterministic memory.

use std::collections::HashMap;
use std::hash::Hash;

use crate::arena::{Action, ActionId, Arena, State, StateId, Transition};
use crate::strategy::Transducer;

/// Which actions a product state keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Moves {
    All,
    Only(ActionId),
}

/// Product arena over the states reachable from `(initial, init)`.
///
/// Successor order is preserved: the `k`-th successor of product action `b`
/// at product state `p` corresponds to the `k`-th successor of base action
/// `action_origin[p][b]` at base state `origin[p].0`.
#[derive(Clone, Debug)]
pub struct Product<M> {
    pub arena: Arena,
    pub origin: Vec<(StateId, M)>,
    pub action_origin: Vec<Vec<ActionId>>,
    index: HashMap<(StateId, M), usize>,
}

impl<M: Clone + Eq + Hash> Product<M> {
    /// The arena itself, every state paired with `memory(s)`.
    pub fn identity(base: &Arena, memory: impl Fn(StateId) -> M) -> Self {
        let origin: Vec<(StateId, M)> = (0..base.num_states()).map(|s| (s, memory(s))).collect();
        let index = origin.iter().cloned().enumerate().map(|(p, k)| (k, p)).collect();
        Product {
            arena: base.clone(),
            action_origin: (0..base.num_states())
                .map(|s| (0..base.num_actions(s)).collect())
                .collect(),
            origin,
            index,
        }
    }

    pub fn lookup(&self, s: StateId, m: &M) -> Option<usize> {
        self.index.get(&(s, m.clone())).copied()
    }

    pub fn base_state(&self, p: usize) -> StateId {
        self.origin[p].0
    }

    pub fn memory(&self, p: usize) -> &M {
        &self.origin[p].1
    }

    /// Product action at `p` corresponding to base action `a`, if kept.
    pub fn product_action(&self, p: usize, a: ActionId) -> Option<ActionId> {
        self.action_origin[p].iter().position(|&b| b == a)
    }
}

/// Explores the product of `base` with a memory that starts at `init` and is
/// updated by `step(memory, state, action, successor index, next state)`.
pub fn explore<M, FA, FS>(base: &Arena, init: M, moves: FA, step: FS) -> Product<M>
where
    M: Clone + Eq + Hash,
    FA: Fn(StateId, &M) -> Moves,
    FS: Fn(&M, StateId, ActionId, usize, StateId) -> M,
{
    let mut index: HashMap<(StateId, M), usize> = HashMap::new();
    let mut origin: Vec<(StateId, M)> = Vec::new();
    let start = (base.initial(), init);
    index.insert(start.clone(), 0);
    origin.push(start);
    let mut states: Vec<State> = Vec::new();
    let mut action_origin = Vec::new();
    let mut next = 0;
    while next < origin.len() {
        let (s, m) = origin[next].clone();
        let kept: Vec<ActionId> = match moves(s, &m) {
            Moves::All => (0..base.num_actions(s)).collect(),
            Moves::Only(a) => vec![a],
        };
        let mut actions = Vec::with_capacity(kept.len());
        for &a in &kept {
            let mut successors = Vec::new();
            for (k, t) in base.successors(s, a).iter().enumerate() {
                let key = (t.target, step(&m, s, a, k, t.target));
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = origin.len();
                        index.insert(key.clone(), id);
                        origin.push(key);
                        id
                    }
                };
                successors.push(Transition {
                    target: id,
                    prob: t.prob.clone(),
                });
            }
            actions.push(Action {
                name: base.state(s).actions[a].name.clone(),
                successors,
            });
        }
        states.push(State {
            name: format!("{}#{}", base.state(s).name, next),
            controller: base.controller(s),
            actions,
        });
        action_origin.push(kept);
        next += 1;
    }
    Product {
        arena: Arena::from_parts(base.players().to_vec(), states, 0),
        origin,
        action_origin,
        index,
    }
}

/// Product of an arena with a finite-memory transducer.
pub fn product_arena(arena: &Arena, memory: &Transducer) -> Product<usize> {
    explore(
        arena,
        memory.initial(),
        |_, _| Moves::All,
        |&m, s, a, k, _| memory.next(m, arena.edge(s, a, k)),
    )
}
