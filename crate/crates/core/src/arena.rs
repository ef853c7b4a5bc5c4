//! Finite turn-based game graphs.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

pub type Player = usize;
pub type StateId = usize;
pub type ActionId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub target: StateId,
    pub prob: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub successors: Vec<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub controller: Player,
    pub actions: Vec<Action>,
}

/// Something wrong with an arena. Returned as data by [`Arena::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoPlayers,
    NoStates,
    InitialOutOfRange(StateId),
    UnknownController { state: String, controller: Player },
    EmptyActionSet { state: String },
    EmptyDistribution { state: String, action: String },
    ProbabilityOutOfRange { state: String, action: String, prob: Scalar },
    MassNotOne { state: String, action: String, mass: Scalar },
    DanglingTarget { state: String, action: String, target: StateId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPlayers => write!(f, "no players"),
            Violation::NoStates => write!(f, "no states"),
            Violation::InitialOutOfRange(s) => write!(f, "initial state {s} out of range"),
            Violation::UnknownController { state, controller } => {
                write!(f, "state {state}: unknown controller {controller}")
            }
            Violation::EmptyActionSet { state } => write!(f, "state {state}: empty action set"),
            Violation::EmptyDistribution { state, action } => {
                write!(f, "state {state}, action {action}: empty distribution")
            }
            Violation::ProbabilityOutOfRange {
                state,
                action,
                prob,
            } => write!(
                f,
                "state {state}, action {action}: probability {} outside [0, 1]",
                scalar::format(prob)
            ),
            Violation::MassNotOne {
                state,
                action,
                mass,
            } => write!(
                f,
                "state {state}, action {action}: distribution mass {} ≠ 1",
                scalar::format(mass)
            ),
            Violation::DanglingTarget {
                state,
                action,
                target,
            } => write!(
                f,
                "state {state}, action {action}: dangling transition target {target}"
            ),
        }
    }
}

/// A finite perfect-information game graph.
///
/// Distributions are normalized on construction: duplicate targets are merged
/// and zero-probability entries dropped, so an action is deterministic exactly
/// when it has a single successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    players: Vec<String>,
    states: Vec<State>,
    initial: StateId,
    edge_offsets: Vec<Vec<usize>>,
    num_edges: usize,
}

impl Arena {
    /// Builds and validates an arena.
    pub fn new(players: Vec<String>, states: Vec<State>, initial: StateId) -> Result<Self> {
        let arena = Self::from_parts(players, states, initial);
        let violations = arena.validate();
        if violations.is_empty() {
            Ok(arena)
        } else {
            Err(Error::InvalidArena(violations))
        }
    }

    /// Builds an arena without validating it. Use [`Arena::validate`] to
    /// inspect the result.
    pub fn from_parts(players: Vec<String>, mut states: Vec<State>, initial: StateId) -> Self {
        for state in &mut states {
            for action in &mut state.actions {
                action.successors = normalize(std::mem::take(&mut action.successors));
            }
        }
        let mut edge_offsets = Vec::with_capacity(states.len());
        let mut num_edges = 0;
        for state in &states {
            let mut offsets = Vec::with_capacity(state.actions.len());
            for action in &state.actions {
                offsets.push(num_edges);
                num_edges += action.successors.len();
            }
            edge_offsets.push(offsets);
        }
        Arena {
            players,
            states,
            initial,
            edge_offsets,
            num_edges,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.players.is_empty() {
            out.push(Violation::NoPlayers);
        }
        if self.states.is_empty() {
            out.push(Violation::NoStates);
        }
        if self.initial >= self.states.len() && !self.states.is_empty() {
            out.push(Violation::InitialOutOfRange(self.initial));
        }
        for state in &self.states {
            if state.controller >= self.players.len() {
                out.push(Violation::UnknownController {
                    state: state.name.clone(),
                    controller: state.controller,
                });
            }
            if state.actions.is_empty() {
                out.push(Violation::EmptyActionSet {
                    state: state.name.clone(),
                });
            }
            for action in &state.actions {
                if action.successors.is_empty() {
                    out.push(Violation::EmptyDistribution {
                        state: state.name.clone(),
                        action: action.name.clone(),
                    });
                    continue;
                }
                let mut mass = scalar::zero();
                for t in &action.successors {
                    if t.prob.is_negative() || t.prob > Scalar::one() {
                        out.push(Violation::ProbabilityOutOfRange {
                            state: state.name.clone(),
                            action: action.name.clone(),
                            prob: t.prob.clone(),
                        });
                    }
                    if t.target >= self.states.len() {
                        out.push(Violation::DanglingTarget {
                            state: state.name.clone(),
                            action: action.name.clone(),
                            target: t.target,
                        });
                    }
                    mass += &t.prob;
                }
                if !mass.is_one() {
                    out.push(Violation::MassNotOne {
                        state: state.name.clone(),
                        action: action.name.clone(),
                        mass,
                    });
                }
            }
        }
        out
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, s: StateId) -> &State {
        &self.states[s]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn controller(&self, s: StateId) -> Player {
        self.states[s].controller
    }

    pub fn num_actions(&self, s: StateId) -> usize {
        self.states[s].actions.len()
    }

    pub fn successors(&self, s: StateId, a: ActionId) -> &[Transition] {
        &self.states[s].actions[a].successors
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Dense index of the `k`-th successor of `(s, a)`.
    pub fn edge(&self, s: StateId, a: ActionId, k: usize) -> usize {
        self.edge_offsets[s][a] + k
    }

    pub fn is_deterministic(&self) -> bool {
        self.states
            .iter()
            .all(|s| s.actions.iter().all(|a| a.successors.len() == 1))
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn player_index(&self, name: &str) -> Option<Player> {
        self.players.iter().position(|p| p == name)
    }

    /// Position of `target` among the successors of `(s, a)`.
    pub fn successor_index(&self, s: StateId, a: ActionId, target: StateId) -> Option<usize> {
        self.successors(s, a).iter().position(|t| t.target == target)
    }

    /// States reachable from the initial state when state `s` may only use
    /// the actions for which `allowed(s, a)` holds.
    pub fn reachable(&self, allowed: impl Fn(StateId, ActionId) -> bool) -> Vec<bool> {
        self.reachable_from(self.initial, allowed)
    }

    pub fn reachable_from(
        &self,
        start: StateId,
        allowed: impl Fn(StateId, ActionId) -> bool,
    ) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(s) = stack.pop() {
            for a in 0..self.num_actions(s) {
                if !allowed(s, a) {
                    continue;
                }
                for t in self.successors(s, a) {
                    if !seen[t.target] {
                        seen[t.target] = true;
                        stack.push(t.target);
                    }
                }
            }
        }
        seen
    }

    /// Same arena, different initial state.
    pub fn rerooted(&self, initial: StateId) -> Arena {
        let mut arena = self.clone();
        arena.initial = initial;
        arena
    }
}

fn normalize(successors: Vec<Transition>) -> Vec<Transition> {
    let mut merged: BTreeMap<StateId, Scalar> = BTreeMap::new();
    let mut order = Vec::new();
    for t in successors {
        if t.prob.is_zero() {
            continue;
        }
        match merged.get_mut(&t.target) {
            Some(p) => *p += t.prob,
            None => {
                order.push(t.target);
                merged.insert(t.target, t.prob);
            }
        }
    }
    order
        .into_iter()
        .map(|target| Transition {
            target,
            prob: merged.remove(&target).unwrap(),
        })
        .collect()
}

/// An ultimately periodic play: `prefix` followed by `cycle` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<(StateId, ActionId)>,
    pub cycle: Vec<(StateId, ActionId)>,
}

impl Lasso {
    pub fn validate(&self, arena: &Arena) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidLasso("empty cycle".into()));
        }
        let steps: Vec<_> = self.prefix.iter().chain(&self.cycle).copied().collect();
        if steps[0].0 != arena.initial() {
            return Err(Error::InvalidLasso("does not start at the initial state".into()));
        }
        for &(s, a) in &steps {
            if s >= arena.num_states() || a >= arena.num_actions(s) {
                return Err(Error::InvalidLasso(format!("unknown step ({s}, {a})")));
            }
        }
        let has_edge = |(s, a): (StateId, ActionId), to: StateId| {
            arena.successors(s, a).iter().any(|t| t.target == to)
        };
        for w in steps.windows(2) {
            if !has_edge(w[0], w[1].0) {
                return Err(Error::InvalidLasso(format!(
                    "no transition from {} to {}",
                    arena.state(w[0].0).name,
                    arena.state(w[1].0).name
                )));
            }
        }
        let last = *self.cycle.last().unwrap();
        if !has_edge(last, self.cycle[0].0) {
            return Err(Error::InvalidLasso("cycle does not close".into()));
        }
        Ok(())
    }

    /// The `t`-th step of the infinite play.
    pub fn step(&self, t: usize) -> (StateId, ActionId) {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn visited(&self) -> impl Iterator<Item = StateId> + '_ {
        self.prefix.iter().chain(&self.cycle).map(|&(s, _)| s)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    pub fn det(target: StateId, name: &str) -> Action {
        Action {
            name: name.into(),
            successors: vec![Transition {
                target,
                prob: int(1),
            }],
        }
    }

    #[test]
    fn minimal_arena_is_valid() {
        let arena = Arena::new(
            vec!["p".into()],
            vec![State {
                name: "s".into(),
                controller: 0,
                actions: vec![det(0, "loop")],
            }],
            0,
        )
        .unwrap();
        assert!(arena.validate().is_empty());
        assert!(arena.is_deterministic());
    }

    #[test]
    fn reports_missing_mass() {
        let arena = Arena::from_parts(
            vec!["p".into()],
            vec![State {
                name: "s".into(),
                controller: 0,
                actions: vec![Action {
                    name: "a".into(),
                    successors: vec![
                        Transition {
                            target: 0,
                            prob: ratio(1, 2),
                        },
                        Transition {
                            target: 0,
                            prob: ratio(1, 4),
                        },
                    ],
                }],
            }],
            0,
        );
        let v = arena.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(
            v[0].to_string(),
            "state s, action a: distribution mass 3/4 ≠ 1"
        );
    }

    #[test]
    fn reports_empty_action_set_and_dangling_target() {
        let arena = Arena::from_parts(
            vec!["p".into()],
            vec![
                State {
                    name: "s".into(),
                    controller: 0,
                    actions: vec![det(7, "a")],
                },
                State {
                    name: "t".into(),
                    controller: 0,
                    actions: vec![],
                },
            ],
            0,
        );
        let v = arena.validate();
        assert!(v.contains(&Violation::EmptyActionSet { state: "t".into() }));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::DanglingTarget { target: 7, .. })));
        assert!(v.iter().any(|x| x.to_string().contains("empty action set")));
    }

    #[test]
    fn merges_duplicate_targets() {
        let arena = Arena::new(
            vec!["p".into()],
            vec![State {
                name: "s".into(),
                controller: 0,
                actions: vec![Action {
                    name: "a".into(),
                    successors: vec![
                        Transition {
                            target: 0,
                            prob: ratio(1, 3),
                        },
                        Transition {
                            target: 0,
                            prob: ratio(2, 3),
                        },
                    ],
                }],
            }],
            0,
        )
        .unwrap();
        assert!(arena.is_deterministic());
    }

    #[test]
    fn lasso_must_close() {
        let arena = Arena::new(
            vec!["p".into()],
            vec![
                State {
                    name: "a".into(),
                    controller: 0,
                    actions: vec![det(1, "go")],
                },
                State {
                    name: "b".into(),
                    controller: 0,
                    actions: vec![det(1, "stay")],
                },
            ],
            0,
        )
        .unwrap();
        let ok = Lasso {
            prefix: vec![(0, 0)],
            cycle: vec![(1, 0)],
        };
        assert!(ok.validate(&arena).is_ok());
        let bad = Lasso {
            prefix: vec![],
            cycle: vec![(0, 0)],
        };
        assert!(bad.validate(&arena).is_err());
    }
}
