//! Zero-sum games `G_i`: player `i` maximizes its payoff against the
//! coalition of all other players, which acts as a single minimizer.

use num::{One, Signed};

use crate::arena::{ActionId, Arena, Player};
use crate::error::{Error, Result};
use crate::model::{Model, Objective};
use crate::payoff::{Family, Game, PayoffSpec};
use crate::scalar::Scalar;
use crate::solve::{Horizon, Restriction, RewardGame, Side, Solution};
use crate::strategy::FiniteMemoryStrategy;

/// Values `v_i(s)` and action values `v_i(s, a)` on the states of a model.
/// Entries outside the restriction they were solved on are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueTable {
    pub player: Player,
    pub state_values: Vec<Scalar>,
    pub action_values: Vec<Vec<Scalar>>,
}

/// Optimal strategies of `G_i`: the maximizer's, and one per opponent (in
/// player order, skipping `i`) that jointly form the coalition's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptStrategyPair {
    pub maximizer: FiniteMemoryStrategy,
    pub minimizers: Vec<FiniteMemoryStrategy>,
}

/// `v(s, a)` for every allowed action, from state values.
pub fn action_values(
    model: &Model,
    objective: &Objective,
    restr: &Restriction,
    values: &[Scalar],
) -> Vec<Vec<Scalar>> {
    (0..model.num_nodes())
        .map(|p| {
            (0..model.arena().num_actions(p))
                .map(|b| {
                    if restr.states[p] && restr.actions[p][b] {
                        model.q_value(objective, values, p, b)
                    } else {
                        crate::scalar::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Solves `G_i` on the restricted model.
pub fn solve_on_model(
    game: &Game,
    model: &Model,
    player: Player,
    restr: &Restriction,
) -> Result<(ValueTable, Solution)> {
    let objective = model.objective(game, player);
    let sol = model.solve(&objective, restr, &model.sides(player))?;
    let table = ValueTable {
        player,
        action_values: action_values(model, &objective, restr, &sol.values),
        state_values: sol.values.clone(),
    };
    Ok((table, sol))
}

/// Strategies playing a model policy, for `player` and its opponents.
pub fn pair_from_policy(model: &Model, base: &Arena, player: Player, policy: &[ActionId]) -> OptStrategyPair {
    OptStrategyPair {
        maximizer: model.strategy(player, base, policy),
        minimizers: (0..base.num_players())
            .filter(|&j| j != player)
            .map(|j| model.strategy(j, base, policy))
            .collect(),
    }
}

/// Discounted `G_i` on the arena itself.
pub fn solve_discounted(
    arena: &Arena,
    rewards: &[Vec<Scalar>],
    discount: &Scalar,
    player: Player,
) -> Result<(ValueTable, OptStrategyPair)> {
    if !discount.is_positive() || *discount >= Scalar::one() {
        return Err(Error::DiscountOutOfRange(crate::scalar::format(discount)));
    }
    let horizon = Horizon::Discounted(discount.clone());
    let g = RewardGame {
        arena,
        rewards,
        horizon: &horizon,
    };
    let restr = Restriction::full(arena);
    let sides: Vec<Side> = (0..arena.num_states())
        .map(|s| if arena.controller(s) == player { Side::Max } else { Side::Min })
        .collect();
    let sol = g.solve(&restr, &sides)?;
    let action_values = (0..arena.num_states())
        .map(|s| {
            (0..arena.num_actions(s))
                .map(|a| g.q_value(&sol.values, s, a))
                .collect()
        })
        .collect();
    let table = ValueTable {
        player,
        state_values: sol.values,
        action_values,
    };
    let pair = OptStrategyPair {
        maximizer: FiniteMemoryStrategy::positional(player, arena, &sol.policy),
        minimizers: (0..arena.num_players())
            .filter(|&j| j != player)
            .map(|j| FiniteMemoryStrategy::positional(j, arena, &sol.policy))
            .collect(),
    };
    Ok((table, pair))
}

/// Finite-horizon `G_i`, on the clock product. The table is indexed by
/// product node; strategies carry the clock as memory.
pub fn solve_finite_horizon(game: &Game, player: Player) -> Result<(Model, ValueTable, OptStrategyPair)> {
    if !matches!(game.family(), Family::FiniteHorizon { .. }) {
        return Err(Error::Unsupported(game.payoffs[player].family_name().into()));
    }
    solve_with_model(game, player)
}

/// Finite-range `G_i` (reached-set and capped-hitting payoffs) on the
/// monitor product of a deterministic arena.
pub fn solve_reached_set(game: &Game, player: Player) -> Result<(Model, ValueTable, OptStrategyPair)> {
    if !game.payoffs[player].is_finite_range() {
        return Err(Error::Unsupported(game.payoffs[player].family_name().into()));
    }
    solve_with_model(game, player)
}

fn solve_with_model(game: &Game, player: Player) -> Result<(Model, ValueTable, OptStrategyPair)> {
    let model = Model::new(game)?;
    let restr = Restriction::full(model.arena());
    let (table, sol) = solve_on_model(game, &model, player, &restr)?;
    let pair = pair_from_policy(&model, &game.arena, player, &sol.policy);
    Ok((model, table, pair))
}

/// Solves `G_i` for whatever family the game uses. Discounted games are
/// solved on the arena, others on their model.
pub fn solve(game: &Game, player: Player) -> Result<(Model, ValueTable, OptStrategyPair)> {
    if let PayoffSpec::Discounted { rewards, discount } = &game.payoffs[player] {
        let (table, pair) = solve_discounted(&game.arena, rewards, discount, player)?;
        return Ok((Model::new(game)?, table, pair));
    }
    solve_with_model(game, player)
}
