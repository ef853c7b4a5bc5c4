//! Iterated deletion of non-optimal actions.
//!
//! Level 0 is the part of the model reachable from the initial state. Each
//! step keeps, at every state, only the actions that are optimal for the
//! controller in its own zero-sum game on the current level, prunes states
//! that became unreachable, and re-solves every player's game. The last
//! level is the fixpoint, where every remaining action is optimal.

use crate::arena::ActionId;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::par;
use crate::payoff::Game;
use crate::solve::Restriction;
use crate::zerosum::{solve_on_model, ValueTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationLevel {
    pub index: usize,
    pub restriction: Restriction,
    /// One table per player, solved on this level.
    pub tables: Vec<ValueTable>,
}

/// When a model state leaves the elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phi {
    /// Present at this level but not the next.
    Level(usize),
    /// Present at every level.
    Infinite,
    /// Never reachable from the initial state.
    Unreachable,
}

#[derive(Clone, Debug)]
pub struct EliminationTrace {
    pub model: Model,
    pub levels: Vec<EliminationLevel>,
    pub phi: Vec<Phi>,
}

impl EliminationTrace {
    pub fn fixpoint(&self) -> &EliminationLevel {
        self.levels.last().unwrap()
    }

    /// `(node, action)` pairs allowed at level `k - 1` but not at level `k`
    /// (only for nodes still present at level `k`).
    pub fn removed(&self, k: usize) -> Vec<(usize, ActionId)> {
        let before = &self.levels[k - 1].restriction;
        let after = &self.levels[k].restriction;
        let mut out = Vec::new();
        for p in after.members() {
            for (b, &was) in before.actions[p].iter().enumerate() {
                if was && !after.actions[p][b] {
                    out.push((p, b));
                }
            }
        }
        out
    }
}

/// Solves every player's game on a restriction.
pub fn solve_level(game: &Game, model: &Model, index: usize, restriction: Restriction) -> Result<EliminationLevel> {
    let tables = par::try_map_range(game.num_players(), |i| {
        solve_on_model(game, model, i, &restriction).map(|(t, _)| t)
    })?;
    Ok(EliminationLevel {
        index,
        restriction,
        tables,
    })
}

/// Allowed actions with `v_{i(s)}(s, a) = v_{i(s)}(s)`, exactly.
pub fn optimal_actions(model: &Model, level: &EliminationLevel) -> Vec<Vec<bool>> {
    let restr = &level.restriction;
    let mut out = restr.actions.clone();
    for p in restr.members() {
        let table = &level.tables[model.arena().controller(p)];
        for (b, keep) in out[p].iter_mut().enumerate() {
            *keep = *keep && table.action_values[p][b] == table.state_values[p];
        }
    }
    out
}

/// The next level, or `None` at the fixpoint.
pub fn eliminate_step(game: &Game, model: &Model, level: &EliminationLevel) -> Result<Option<EliminationLevel>> {
    let optimal = optimal_actions(model, level);
    if optimal == level.restriction.actions {
        return Ok(None);
    }
    let mut restriction = Restriction {
        states: level.restriction.states.clone(),
        actions: optimal,
    };
    restriction.prune_from(model.arena(), model.root());
    solve_level(game, model, level.index + 1, restriction).map(Some)
}

/// Runs the elimination to its fixpoint. Reward-based families only.
pub fn eliminate_fixpoint(game: &Game) -> Result<EliminationTrace> {
    let model = Model::new(game)?;
    if model.is_limit() {
        return Err(Error::Unsupported(
            "elimination needs discounted or finite-horizon payoffs".into(),
        ));
    }
    let mut restriction = Restriction::full(model.arena());
    restriction.prune_from(model.arena(), model.root());
    let mut levels = vec![solve_level(game, &model, 0, restriction)?];
    while let Some(next) = eliminate_step(game, &model, levels.last().unwrap())? {
        levels.push(next);
    }
    let phi = (0..model.num_nodes())
        .map(|p| {
            if !levels[0].restriction.states[p] {
                Phi::Unreachable
            } else {
                match levels.iter().position(|l| !l.restriction.states[p]) {
                    Some(k) => Phi::Level(k - 1),
                    None => Phi::Infinite,
                }
            }
        })
        .collect();
    Ok(EliminationTrace { model, levels, phi })
}
