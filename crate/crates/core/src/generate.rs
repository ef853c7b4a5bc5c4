//! Seeded random games.
//!
//! Every state is reachable from the initial state (a random spanning tree
//! is laid over the action slots first). Reachability families always get
//! a target state lying on a cycle.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arena::{Action, Arena, State, Transition};
use crate::error::{Error, Result};
use crate::graph::Sccs;
use crate::payoff::{Game, PayoffSpec};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyChoice {
    Discounted { discount: (i64, i64) },
    FiniteHorizon { horizon: u32 },
    ReachedSet { labels: usize },
    /// `cap` defaults to `2·|N|·|S|`.
    CappedHitting { cap: Option<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub players: usize,
    pub states: usize,
    pub max_actions: usize,
    pub family: FamilyChoice,
    /// Probabilities are multiples of `1/granularity`.
    pub granularity: u32,
    pub deterministic: bool,
    /// Rewards are `k/d` with `|k| <= reward_bound` and `1 <= d <= 4`.
    pub reward_bound: i64,
}

impl GeneratorConfig {
    pub fn new(seed: u64, family: FamilyChoice) -> Self {
        GeneratorConfig {
            seed,
            players: 2,
            states: 5,
            max_actions: 2,
            family,
            granularity: 4,
            deterministic: true,
            reward_bound: 4,
        }
    }
}

fn reward(rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    scalar::ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
}

/// Splits `1` into `parts` positive multiples of `1/granularity`.
fn split(rng: &mut ChaCha8Rng, parts: usize, granularity: u32) -> Vec<Scalar> {
    let g = granularity as usize;
    let mut cuts: Vec<usize> = (1..g).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort();
    let mut last = 0;
    let mut out = Vec::with_capacity(parts);
    for c in cuts.into_iter().chain(Some(g)) {
        out.push(scalar::ratio((c - last) as i64, g as i64));
        last = c;
    }
    out
}

fn random_arena(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<Arena> {
    let n = cfg.states;
    let slots: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=cfg.max_actions)).collect();
    // targets[s][a]: the tree edge, if any, then filled at random.
    let mut tree: Vec<Vec<Option<usize>>> = slots.iter().map(|&k| vec![None; k]).collect();
    for s in 1..n {
        let free: Vec<(usize, usize)> = (0..s)
            .flat_map(|p| (0..slots[p]).map(move |a| (p, a)))
            .filter(|&(p, a)| tree[p][a].is_none())
            .collect();
        let &(p, a) = free.choose(rng).expect("earlier states have a free slot");
        tree[p][a] = Some(s);
    }
    let states = (0..n)
        .map(|s| State {
            name: format!("s{s}"),
            controller: rng.gen_range(0..cfg.players),
            actions: tree[s]
                .iter()
                .enumerate()
                .map(|(a, fixed)| {
                    let first = fixed.unwrap_or_else(|| rng.gen_range(0..n));
                    let branch = !cfg.deterministic && cfg.granularity > 1 && n > 1 && rng.gen_bool(0.5);
                    let successors = if branch {
                        let parts = rng.gen_range(2..=3.min(cfg.granularity as usize));
                        let mut targets = vec![first];
                        while targets.len() < parts {
                            targets.push(rng.gen_range(0..n));
                        }
                        targets
                            .into_iter()
                            .zip(split(rng, parts, cfg.granularity))
                            .map(|(target, prob)| Transition { target, prob })
                            .collect()
                    } else {
                        vec![Transition {
                            target: first,
                            prob: scalar::one(),
                        }]
                    };
                    Action {
                        name: format!("a{a}"),
                        successors,
                    }
                })
                .collect(),
        })
        .collect();
    let players = (0..cfg.players).map(|i| format!("p{i}")).collect();
    Arena::new(players, states, 0)
}

/// Random non-empty subset of states that includes a state on a cycle.
fn target_set(arena: &Arena, rng: &mut ChaCha8Rng, cyclic: &[usize]) -> Vec<usize> {
    let n = arena.num_states();
    let size = rng.gen_range(1..=2.min(n));
    let mut set: Vec<usize> = (0..n).collect();
    set.shuffle(rng);
    set.truncate(size);
    if !set.iter().any(|s| cyclic.contains(s)) {
        set.push(*cyclic.choose(rng).expect("every finite arena has a cycle"));
    }
    set.sort();
    set.dedup();
    set
}

pub fn generate(cfg: &GeneratorConfig) -> Result<Game> {
    if cfg.players == 0 || cfg.states == 0 || cfg.max_actions == 0 || cfg.granularity == 0 {
        return Err(Error::Document("generator sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let arena = random_arena(cfg, &mut rng)?;
    let n = arena.num_states();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            (0..arena.num_actions(s))
                .flat_map(|a| arena.successors(s, a).iter().map(|t| t.target))
                .collect()
        })
        .collect();
    let sccs = Sccs::new(&succ);
    let cyclic: Vec<usize> = (0..n).filter(|&s| sccs.on_cycle(&succ, s)).collect();
    let table = |rng: &mut ChaCha8Rng| -> Vec<Vec<Scalar>> {
        (0..n)
            .map(|s| (0..arena.num_actions(s)).map(|_| reward(rng, cfg.reward_bound)).collect())
            .collect()
    };
    let specs = match &cfg.family {
        FamilyChoice::Discounted { discount } => {
            let beta = scalar::ratio(discount.0, discount.1);
            (0..cfg.players)
                .map(|_| PayoffSpec::Discounted {
                    rewards: table(&mut rng),
                    discount: beta.clone(),
                })
                .collect()
        }
        FamilyChoice::FiniteHorizon { horizon } => (0..cfg.players)
            .map(|_| PayoffSpec::FiniteHorizon {
                horizon: *horizon,
                rewards: (0..*horizon).map(|_| table(&mut rng)).collect(),
            })
            .collect(),
        FamilyChoice::ReachedSet { labels } => {
            let targets: Vec<Vec<usize>> = (0..(*labels).max(1))
                .map(|_| target_set(&arena, &mut rng, &cyclic))
                .collect();
            let masks = 1usize << targets.len();
            (0..cfg.players)
                .map(|_| PayoffSpec::ReachedSet {
                    targets: targets.clone(),
                    values: (0..masks).map(|_| scalar::int(rng.gen_range(0..=3))).collect(),
                })
                .collect()
        }
        FamilyChoice::CappedHitting { cap } => {
            let cap = cap.unwrap_or((2 * cfg.players * n) as u32);
            (0..cfg.players)
                .map(|_| PayoffSpec::CappedHitting {
                    target: target_set(&arena, &mut rng, &cyclic),
                    cap,
                    // Sooner is better.
                    values: (0..=cap).map(|t| scalar::int((cap - t + 1) as i64)).collect(),
                    unreached: scalar::zero(),
                })
                .collect()
        }
    };
    Game::new(arena, specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_game() {
        let mut cfg = GeneratorConfig::new(7, FamilyChoice::Discounted { discount: (1, 2) });
        cfg.deterministic = false;
        cfg.states = 8;
        cfg.max_actions = 3;
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        cfg.seed = 8;
        let other = generate(&cfg).unwrap();
        cfg.seed = 7;
        assert_ne!(generate(&cfg).unwrap(), other);
    }

    #[test]
    fn every_state_reachable() {
        for seed in 0..40 {
            let mut cfg = GeneratorConfig::new(seed, FamilyChoice::ReachedSet { labels: 3 });
            cfg.states = 1 + (seed as usize % 8);
            cfg.max_actions = 1 + (seed as usize % 3);
            let game = generate(&cfg).unwrap();
            assert!(game.arena.reachable(|_, _| true).iter().all(|&r| r));
        }
    }
}
