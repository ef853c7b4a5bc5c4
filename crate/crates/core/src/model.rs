//! The arena a game is solved on.
//!
//! Discounted games are solved on the arena itself. Finite-horizon games are
//! solved on the product with the period clock, whose states at the horizon
//! are terminal. Finite-range games are solved on the product with the full
//! payoff monitor; a play's payoff is fixed by the monitor value it settles
//! in, so the monitor values are the strata of a limit game.
//!
//! Strategies that are positional on the model become finite-memory
//! strategies on the arena whose memory is the model state.

use std::collections::HashMap;
use std::sync::Arc;

use crate::arena::{ActionId, Arena, Player, StateId};
use crate::error::{Error, Result};
use crate::payoff::{Family, Game, Track};
use crate::product::{explore, Moves, Product};
use crate::scalar::{self, Scalar};
use crate::solve::{Horizon, LimitGame, Restriction, RewardGame, Side, Solution};
use crate::strategy::{FiniteMemoryStrategy, Transducer};

/// What a solver optimizes on a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    /// `rewards[node][action]`.
    Rewards(Vec<Vec<Scalar>>),
    /// Stay value per stratum.
    Stay(Vec<Scalar>),
}

#[derive(Clone, Debug)]
pub struct Model {
    pub product: Product<Track>,
    pub horizon: Option<Horizon>,
    /// Finite-range models: stratum of each node and the monitor value of
    /// each stratum.
    pub stratum: Vec<usize>,
    pub strata: Vec<Track>,
    /// Memory reading the model state off the observed play; `None` when
    /// the model is the arena itself.
    pub memory: Option<Arc<Transducer>>,
}

impl Model {
    pub fn new(game: &Game) -> Result<Self> {
        let arena = &game.arena;
        let monitor = game.monitor();
        let family = game.family();
        if let Family::Discounted { discount } = &family {
            let product = Product::identity(arena, |s| monitor.initial(s));
            return Ok(Model {
                stratum: vec![0; product.arena.num_states()],
                strata: Vec::new(),
                product,
                horizon: Some(Horizon::Discounted(discount.clone())),
                memory: None,
            });
        }
        if family == Family::FiniteRange && !arena.is_deterministic() {
            return Err(Error::NotDeterministic);
        }
        let product = explore(
            arena,
            monitor.initial(arena.initial()),
            |_, _| Moves::All,
            |m, _, _, _, next| monitor.step(m, next),
        );
        let n = product.arena.num_states();
        let memory = Transducer::from_fn(arena, n, 0, |m, s, a, k| {
            if product.base_state(m) != s {
                return m;
            }
            let b = product.product_action(m, a).expect("model keeps every action");
            product.arena.successors(m, b)[k].target
        });
        let mut model = Model {
            stratum: vec![0; n],
            strata: Vec::new(),
            horizon: None,
            memory: Some(Arc::new(memory)),
            product,
        };
        match family {
            Family::FiniteHorizon { .. } => {
                let limit = monitor.clock_limit();
                let terminal = (0..n).map(|p| model.product.memory(p).clock >= limit).collect();
                model.horizon = Some(Horizon::Layered(terminal));
            }
            _ => {
                let mut ids: HashMap<Track, usize> = HashMap::new();
                for p in 0..n {
                    let track = model.product.memory(p).clone();
                    let next = ids.len();
                    let id = *ids.entry(track.clone()).or_insert(next);
                    if id == model.strata.len() {
                        model.strata.push(track);
                    }
                    model.stratum[p] = id;
                }
            }
        }
        Ok(model)
    }

    pub fn arena(&self) -> &Arena {
        &self.product.arena
    }

    pub fn num_nodes(&self) -> usize {
        self.product.arena.num_states()
    }

    /// Node of the initial state.
    pub fn root(&self) -> usize {
        match &self.memory {
            None => self.product.arena.initial(),
            Some(_) => 0,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.horizon.is_none()
    }

    /// Arena state of a model node.
    pub fn base_state(&self, node: usize) -> StateId {
        self.product.base_state(node)
    }

    /// Arena action of a model action.
    pub fn base_action(&self, node: usize, b: ActionId) -> ActionId {
        self.product.action_origin[node][b]
    }

    /// Node for memory `m` at arena state `s`, if they agree.
    pub fn node(&self, memory: usize, s: StateId) -> Option<usize> {
        match &self.memory {
            None => Some(s),
            Some(_) => (self.base_state(memory) == s).then_some(memory),
        }
    }

    /// Memory size of strategies built from model policies.
    pub fn memory_size(&self) -> usize {
        self.memory.as_ref().map_or(1, |t| t.size())
    }

    /// Model memory after moving from `node` with arena edge `(a, k)`.
    pub fn next_node(&self, node: usize, a: ActionId, k: usize) -> usize {
        let b = self.product.product_action(node, a).expect("model keeps every action");
        self.product.arena.successors(node, b)[k].target
    }

    pub fn sides(&self, player: Player) -> Vec<Side> {
        (0..self.num_nodes())
            .map(|p| {
                if self.arena().controller(p) == player {
                    Side::Max
                } else {
                    Side::Min
                }
            })
            .collect()
    }

    /// Payoff vector of each stratum.
    pub fn stay_vectors(&self, game: &Game) -> Vec<Vec<Scalar>> {
        self.strata.iter().map(|t| game.limit_payoffs(t)).collect()
    }

    /// Player `i`'s own payoff as an objective.
    pub fn objective(&self, game: &Game, player: Player) -> Objective {
        let mut weights = vec![scalar::zero(); game.num_players()];
        weights[player] = scalar::one();
        self.weighted_objective(game, &weights)
    }

    /// `Σ_i weights[i] · u_i` as an objective.
    pub fn weighted_objective(&self, game: &Game, weights: &[Scalar]) -> Objective {
        if self.is_limit() {
            return Objective::Stay(
                self.stay_vectors(game)
                    .iter()
                    .map(|v| v.iter().zip(weights).map(|(x, w)| x * w).sum())
                    .collect(),
            );
        }
        let arena = self.arena();
        Objective::Rewards(
            (0..self.num_nodes())
                .map(|p| {
                    let s = self.base_state(p);
                    let clock = self.product.memory(p).clock;
                    (0..arena.num_actions(p))
                        .map(|b| {
                            let a = self.base_action(p, b);
                            (0..game.num_players())
                                .map(|i| &weights[i] * game.reward(i, clock, s, a))
                                .sum()
                        })
                        .collect()
                })
                .collect(),
        )
    }

    fn reward_game<'a>(&'a self, rewards: &'a [Vec<Scalar>]) -> RewardGame<'a> {
        RewardGame {
            arena: self.arena(),
            rewards,
            horizon: self.horizon.as_ref().unwrap(),
        }
    }

    fn limit_game<'a>(&'a self, stay: &'a [Scalar]) -> LimitGame<'a> {
        LimitGame {
            arena: self.arena(),
            stratum: &self.stratum,
            stay,
        }
    }

    /// Optimal values and positional policy on the model.
    pub fn solve(&self, objective: &Objective, restr: &Restriction, sides: &[Side]) -> Result<Solution> {
        match objective {
            Objective::Rewards(r) => self.reward_game(r).solve(restr, sides),
            Objective::Stay(stay) => self.limit_game(stay).solve(restr, sides),
        }
    }

    /// Value of playing `b` at `node` and continuing with `values`.
    pub fn q_value(&self, objective: &Objective, values: &[Scalar], node: usize, b: ActionId) -> Scalar {
        match objective {
            Objective::Rewards(r) => self.reward_game(r).q_value(values, node, b),
            Objective::Stay(stay) => self.limit_game(stay).action_value(values, node, b),
        }
    }

    /// Values of a positional policy on the restricted nodes.
    pub fn evaluate(&self, objective: &Objective, restr: &Restriction, policy: &[ActionId]) -> Result<Vec<Scalar>> {
        match objective {
            Objective::Rewards(r) => self.reward_game(r).evaluate(restr, policy),
            Objective::Stay(_) => {
                let mut only = restr.clone();
                for p in restr.members() {
                    for (b, allowed) in only.actions[p].iter_mut().enumerate() {
                        *allowed = b == policy[p];
                    }
                }
                let sides = vec![Side::Max; self.num_nodes()];
                Ok(self.solve(objective, &only, &sides)?.values)
            }
        }
    }

    /// Strategy for `owner` on the arena playing `policy` on the model. Arena
    /// states the memory does not match get the first action.
    pub fn strategy(&self, owner: Player, base: &Arena, policy: &[ActionId]) -> FiniteMemoryStrategy {
        match &self.memory {
            None => FiniteMemoryStrategy::positional(owner, base, policy),
            Some(t) => FiniteMemoryStrategy::new(owner, base, t.clone(), |m, s| {
                self.node(m, s).map_or(0, |p| self.base_action(p, policy[p]))
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::tests::det;
    use crate::arena::State;
    use crate::payoff::PayoffSpec;
    use crate::scalar::int;

    #[test]
    fn finite_horizon_model_layers_the_clock() {
        let arena = Arena::new(
            vec!["p".into()],
            vec![State {
                name: "s".into(),
                controller: 0,
                actions: vec![det(0, "a"), det(0, "b")],
            }],
            0,
        )
        .unwrap();
        let step = vec![vec![int(1), int(2)]];
        let game = Game::new(
            arena,
            vec![PayoffSpec::FiniteHorizon {
                horizon: 2,
                rewards: vec![step.clone(), step],
            }],
        )
        .unwrap();
        let model = Model::new(&game).unwrap();
        assert_eq!(model.num_nodes(), 3);
        let obj = model.objective(&game, 0);
        let sol = model
            .solve(&obj, &Restriction::full(model.arena()), &model.sides(0))
            .unwrap();
        assert_eq!(sol.values[0], int(4));
        assert_eq!(model.base_action(0, sol.policy[0]), 1);
    }
}
