//! Exact expected payoffs of finite-memory strategy profiles.
//!
//! A profile induces a finite Markov chain on arena state × strategy memory
//! × payoff monitor. The chain is solved one strongly connected component at
//! a time, sinks first: discounted rewards give `x = r + βPx`, finite
//! horizons stop paying once the clock reaches the horizon, and finite-range
//! payoffs are fixed on bottom components (where the monitor is constant)
//! and propagated to the rest by absorption.

use crate::arena::{Arena, Lasso, Player};
use crate::error::{Error, Result};
use crate::graph::Sccs;
use crate::linalg;
use crate::payoff::{Family, Game, Track};
use crate::product::{explore, Moves, Product};
use crate::scalar::{self, Scalar};
use crate::strategy::StrategyProfile;

/// Memory of a joint product: one value per distinct transducer of the
/// profile, and the payoff monitor.
pub type JointMemory = (Vec<usize>, Track);

/// Product of the arena with the profile's memories and the payoff monitor.
///
/// States controlled by `free` keep all their actions; every other state
/// keeps only the action its controller's strategy prescribes. Transducers
/// read only by `free` are not tracked.
pub fn joint_product(
    game: &Game,
    profile: &StrategyProfile,
    free: Option<Player>,
) -> Result<Product<JointMemory>> {
    let arena = &game.arena;
    profile.validate(arena)?;
    let (memories, reader) = profile.memories();
    let needed: Vec<bool> = (0..memories.len())
        .map(|k| (0..arena.num_players()).any(|p| Some(p) != free && reader[p] == k))
        .collect();
    let monitor = game.monitor();
    let init: Vec<usize> = memories
        .iter()
        .zip(&needed)
        .map(|(t, &n)| if n { t.initial() } else { 0 })
        .collect();
    Ok(explore(
        arena,
        (init, monitor.initial(arena.initial())),
        |s, (mem, _)| {
            let c = arena.controller(s);
            if Some(c) == free {
                Moves::All
            } else {
                Moves::Only(profile.strategies[c].action(mem[reader[c]], s))
            }
        },
        |(mem, track), s, a, k, next| {
            let e = arena.edge(s, a, k);
            let mem = mem
                .iter()
                .enumerate()
                .map(|(j, &m)| if needed[j] { memories[j].next(m, e) } else { 0 })
                .collect();
            (mem, monitor.step(track, next))
        },
    ))
}

/// Expected payoff of every player under `profile`.
pub fn expected_payoffs(game: &Game, profile: &StrategyProfile) -> Result<Vec<Scalar>> {
    let chain = joint_product(game, profile, None)?;
    Ok(chain_payoffs(game, &chain)?.swap_remove(0))
}

/// Expected payoff vector from every node of a product in which each state
/// keeps exactly one action.
pub fn chain_payoffs(game: &Game, chain: &Product<JointMemory>) -> Result<Vec<Vec<Scalar>>> {
    let arena = &chain.arena;
    let n = arena.num_states();
    let players = game.num_players();
    if (0..n).any(|p| arena.num_actions(p) != 1) {
        return Err(Error::Inconsistent("product is not a Markov chain".into()));
    }
    let family = game.family();
    let clock_limit = game.monitor().clock_limit();
    let factor = match &family {
        Family::Discounted { discount } => discount.clone(),
        _ => scalar::one(),
    };
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|p| arena.successors(p, 0).iter().map(|t| t.target).collect())
        .collect();
    let sccs = Sccs::new(&succ);
    let reward = |p: usize| -> Vec<Scalar> {
        let (s, (_, track)) = &chain.origin[p];
        let a = chain.action_origin[p][0];
        (0..players)
            .map(|i| game.reward(i, track.clock, *s, a))
            .collect()
    };
    let mut values: Vec<Option<Vec<Scalar>>> = vec![None; n];
    for (c, members) in sccs.members.iter().enumerate() {
        let fixed = |p: usize| -> Option<Vec<Scalar>> {
            match &family {
                Family::FiniteRange if sccs.is_bottom(&succ, c) => {
                    Some(game.limit_payoffs(&chain.memory(p).1))
                }
                Family::FiniteHorizon { .. } if chain.memory(p).1.clock >= clock_limit => {
                    Some(vec![scalar::zero(); players])
                }
                _ => None,
            }
        };
        if let Some(v) = fixed(members[0]) {
            for &p in members {
                values[p] = Some(fixed(p).unwrap_or_else(|| v.clone()));
            }
            continue;
        }
        // x_v - f Σ_{u ∈ C} p x_u = r_v + f Σ_{u ∉ C} p x_u
        let k = members.len();
        let local = |p: usize| members.binary_search(&p).ok();
        let mut matrix = vec![vec![scalar::zero(); k]; k];
        let mut rhs = Vec::with_capacity(k);
        for (row, &p) in members.iter().enumerate() {
            matrix[row][row] += scalar::one();
            let mut b = reward(p);
            for t in arena.successors(p, 0) {
                let w = &factor * &t.prob;
                match local(t.target) {
                    Some(col) => matrix[row][col] -= w,
                    None => {
                        let known = values[t.target].as_ref().expect("sinks solved first");
                        for (bi, x) in b.iter_mut().zip(known) {
                            *bi += &w * x;
                        }
                    }
                }
            }
            rhs.push(b);
        }
        let x = linalg::solve_many(matrix, rhs)?;
        for (row, &p) in members.iter().enumerate() {
            values[p] = Some(x[row].clone());
        }
    }
    Ok(values.into_iter().map(Option::unwrap).collect())
}

/// The play a profile induces on a deterministic arena.
pub fn induced_lasso(game: &Game, profile: &StrategyProfile) -> Result<Lasso> {
    if !game.arena.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let chain = joint_product(game, profile, None)?;
    Ok(chain_lasso(&chain))
}

/// The unique play of a deterministic chain product, projected to the base
/// arena.
pub fn chain_lasso<M>(chain: &Product<M>) -> Lasso {
    let mut order = Vec::new();
    let mut seen = vec![usize::MAX; chain.arena.num_states()];
    let mut p = 0;
    while seen[p] == usize::MAX {
        seen[p] = order.len();
        order.push(p);
        p = chain.arena.successors(p, 0)[0].target;
    }
    let steps: Vec<_> = order
        .iter()
        .map(|&q| (chain.origin[q].0, chain.action_origin[q][0]))
        .collect();
    let start = seen[p];
    Lasso {
        prefix: steps[..start].to_vec(),
        cycle: steps[start..].to_vec(),
    }
}

/// Expected payoffs from every state of the arena (the profile restarted
/// with fresh memory at each state).
pub fn payoffs_from_each_state(game: &Game, profile: &StrategyProfile) -> Result<Vec<Vec<Scalar>>> {
    (0..game.arena.num_states())
        .map(|s| expected_payoffs(&game.rerooted(s), profile))
        .collect()
}

/// Every player picks the first action everywhere.
pub fn single_action_profile(arena: &Arena) -> StrategyProfile {
    StrategyProfile::positional(arena, &vec![0; arena.num_states()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::tests::det;
    use crate::arena::{Action, State, Transition};
    use crate::payoff::PayoffSpec;
    use crate::scalar::{int, ratio};

    fn coin_flip() -> Game {
        let arena = Arena::new(
            vec!["p".into()],
            vec![
                State {
                    name: "flip".into(),
                    controller: 0,
                    actions: vec![Action {
                        name: "toss".into(),
                        successors: vec![
                            Transition {
                                target: 1,
                                prob: ratio(1, 2),
                            },
                            Transition {
                                target: 2,
                                prob: ratio(1, 2),
                            },
                        ],
                    }],
                },
                State {
                    name: "zero".into(),
                    controller: 0,
                    actions: vec![det(1, "loop")],
                },
                State {
                    name: "one".into(),
                    controller: 0,
                    actions: vec![det(2, "loop")],
                },
            ],
            0,
        )
        .unwrap();
        let rewards = vec![vec![int(0)], vec![int(0)], vec![int(1)]];
        Game::new(
            arena,
            vec![PayoffSpec::Discounted {
                rewards,
                discount: ratio(1, 2),
            }],
        )
        .unwrap()
    }

    #[test]
    fn coin_flip_to_absorbing_rewards() {
        let game = coin_flip();
        let profile = single_action_profile(&game.arena);
        assert_eq!(expected_payoffs(&game, &profile).unwrap(), vec![ratio(1, 2)]);
    }

    #[test]
    fn reached_set_absorption() {
        let game = coin_flip();
        let game = Game::new(
            game.arena,
            vec![PayoffSpec::ReachedSet {
                targets: vec![vec![2]],
                values: vec![int(-1), int(3)],
            }],
        )
        .unwrap();
        let profile = single_action_profile(&game.arena);
        assert_eq!(expected_payoffs(&game, &profile).unwrap(), vec![int(1)]);
    }

    #[test]
    fn finite_horizon_truncates() {
        let game = coin_flip();
        let step = vec![vec![int(5)], vec![int(0)], vec![int(2)]];
        let game = Game::new(
            game.arena,
            vec![PayoffSpec::FiniteHorizon {
                horizon: 3,
                rewards: vec![step.clone(), step.clone(), step],
            }],
        )
        .unwrap();
        let profile = single_action_profile(&game.arena);
        // 5 + 1/2 (0 + 0) + 1/2 (2 + 2)
        assert_eq!(expected_payoffs(&game, &profile).unwrap(), vec![int(7)]);
    }
}
