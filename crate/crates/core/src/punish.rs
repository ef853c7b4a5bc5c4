//! Deviation detection and punishment, shared by both constructions.
//!
//! The profile follows a prescribed positional policy on the model until
//! some player's action differs from it. The first such player is labelled
//! and every other player switches to a strategy that holds the deviator's
//! payoff down forever. The memory also records whether the history so far
//! used only actions of an inner restriction (the elimination fixpoint):
//! punishment uses the inner game's minimizers while that holds and the
//! full game's minimizers afterwards. Whether a history stayed inside is a
//! property of the history, not of the state it ends in, since a graph
//! state of the inner game can also be entered through an outside action.

use std::sync::Arc;

use crate::arena::{ActionId, Arena, Player, StateId};
use crate::model::Model;
use crate::solve::Restriction;
use crate::strategy::{FiniteMemoryStrategy, StrategyProfile, Transducer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// Nobody has deviated.
    Clear,
    /// The first player to deviate.
    Deviator(Player),
}

/// Memory `(label, inside flag, model node)` over arena transitions.
#[derive(Clone, Debug)]
pub struct LabelAutomaton {
    pub memory: Arc<Transducer>,
    players: usize,
    nodes: usize,
}

impl LabelAutomaton {
    pub fn encode(&self, label: Label, inside: bool, node: usize) -> usize {
        let l = match label {
            Label::Clear => 0,
            Label::Deviator(i) => i + 1,
        };
        (l * 2 + inside as usize) * self.nodes + node
    }

    pub fn decode(&self, m: usize) -> (Label, bool, usize) {
        let node = m % self.nodes;
        let rest = m / self.nodes;
        let inside = rest % 2 == 1;
        let label = match rest / 2 {
            0 => Label::Clear,
            l => Label::Deviator(l - 1),
        };
        debug_assert!(rest / 2 <= self.players);
        (label, inside, node)
    }

    /// Memory after a finite play given as `(state, action, successor
    /// index)` steps.
    pub fn run(&self, arena: &Arena, steps: &[(StateId, ActionId, usize)]) -> usize {
        steps.iter().fold(self.memory.initial(), |m, &(s, a, k)| {
            self.memory.next(m, arena.edge(s, a, k))
        })
    }
}

/// Model node after an arena step, tracking the model's own memory.
fn step_node(model: &Model, base: &Arena, node: usize, s: StateId, a: ActionId, k: usize) -> usize {
    match &model.memory {
        None => base.successors(s, a)[k].target,
        Some(_) if model.base_state(node) == s => model.next_node(node, a, k),
        Some(_) => node,
    }
}

/// Builds the label memory for a prescribed model policy. `inside` is the
/// restriction whose actions keep the inside flag set.
pub fn build_label_automaton(
    base: &Arena,
    model: &Model,
    prescribed: &[ActionId],
    inside: &Restriction,
) -> LabelAutomaton {
    let players = base.num_players();
    let nodes = model.num_nodes();
    let size = (players + 1) * 2 * nodes;
    let mut automaton = LabelAutomaton {
        memory: Arc::new(Transducer::trivial(base)),
        players,
        nodes,
    };
    let root = automaton.encode(Label::Clear, true, model.root());
    let table = Transducer::from_fn(base, size, root, |m, s, a, k| {
        let (label, flag, node) = automaton.decode(m);
        let Some(p) = model.node(node, s) else {
            return m;
        };
        let b = model
            .product
            .product_action(p, a)
            .expect("model keeps every action");
        let label = match label {
            Label::Clear if b != prescribed[p] => Label::Deviator(base.controller(s)),
            other => other,
        };
        let flag = flag && inside.states[p] && inside.actions[p][b];
        automaton.encode(label, flag, step_node(model, base, p, s, a, k))
    });
    automaton.memory = Arc::new(table);
    automaton
}

/// Positional punishment policies on the model, per punished player: the
/// full game's, and the inner game's (used while the history stays inside).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunishmentKit {
    pub full: Vec<Vec<ActionId>>,
    pub inner: Vec<Vec<ActionId>>,
}

/// The profile: prescribed policy while clear; a labelled player keeps to
/// the smallest inner action while inside (the first action otherwise); the
/// others play the punishment policies against the labelled player.
pub fn assemble_profile(
    base: &Arena,
    model: &Model,
    automaton: &LabelAutomaton,
    prescribed: &[ActionId],
    inside: &Restriction,
    kit: &PunishmentKit,
) -> StrategyProfile {
    let strategies = (0..base.num_players())
        .map(|j| {
            FiniteMemoryStrategy::new(j, base, automaton.memory.clone(), |m, s| {
                let (label, flag, node) = automaton.decode(m);
                let Some(p) = model.node(node, s) else {
                    return 0;
                };
                let flag = flag && inside.states[p];
                let b = match label {
                    Label::Clear => prescribed[p],
                    Label::Deviator(i) if i == j => {
                        if flag {
                            inside.first_allowed(p)
                        } else {
                            0
                        }
                    }
                    Label::Deviator(i) => {
                        if flag {
                            kit.inner[i][p]
                        } else {
                            kit.full[i][p]
                        }
                    }
                };
                model.base_action(p, b)
            })
        })
        .collect();
    StrategyProfile::new(strategies)
}
