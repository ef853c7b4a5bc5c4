//! Payoff families and the monitor that makes them Markovian.
//!
//! Every supported family is a function of the play that a small
//! deterministic monitor can track: a clock for finite horizons and hitting
//! times, and the set of reached target labels. Finite-range payoffs depend
//! only on the monitor value the play eventually settles in.

use num::{One, Signed, Zero};

use crate::arena::{ActionId, Arena, Lasso, Player, StateId};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Largest number of target labels a reached-set payoff may use.
pub const MAX_LABELS: usize = 16;

/// One player's payoff function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PayoffSpec {
    /// `Σ_t β^t · rewards[s_t][a_t]`.
    Discounted {
        rewards: Vec<Vec<Scalar>>,
        discount: Scalar,
    },
    /// `Σ_{t<horizon} rewards[t][s_t][a_t]`.
    FiniteHorizon {
        horizon: u32,
        rewards: Vec<Vec<Vec<Scalar>>>,
    },
    /// `values[R]` where `R` is the set of labels whose target set the play
    /// ever visits, encoded as a bitmask over `targets`.
    ReachedSet {
        targets: Vec<Vec<StateId>>,
        values: Vec<Scalar>,
    },
    /// `values[t]` if the play first enters `target` at period `t <= cap`,
    /// `unreached` otherwise.
    CappedHitting {
        target: Vec<StateId>,
        cap: u32,
        values: Vec<Scalar>,
        unreached: Scalar,
    },
}

impl PayoffSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            PayoffSpec::Discounted { .. } => "discounted",
            PayoffSpec::FiniteHorizon { .. } => "finite_horizon",
            PayoffSpec::ReachedSet { .. } => "reached_set",
            PayoffSpec::CappedHitting { .. } => "capped_hitting",
        }
    }

    pub fn is_finite_range(&self) -> bool {
        matches!(
            self,
            PayoffSpec::ReachedSet { .. } | PayoffSpec::CappedHitting { .. }
        )
    }

    /// All values the payoff can take, sorted and deduplicated. `None` for
    /// the reward-based families.
    pub fn range(&self) -> Option<Vec<Scalar>> {
        let mut values: Vec<Scalar> = match self {
            PayoffSpec::ReachedSet { values, .. } => values.clone(),
            PayoffSpec::CappedHitting {
                values, unreached, ..
            } => values.iter().chain(Some(unreached)).cloned().collect(),
            _ => return None,
        };
        values.sort();
        values.dedup();
        Some(values)
    }

    /// Payoff of an ultimately periodic play.
    pub fn evaluate_on_lasso(&self, arena: &Arena, lasso: &Lasso) -> Result<Scalar> {
        lasso.validate(arena)?;
        Ok(match self {
            PayoffSpec::Discounted { rewards, discount } => {
                let mut total = scalar::zero();
                let mut weight = scalar::one();
                for &(s, a) in &lasso.prefix {
                    total += &weight * &rewards[s][a];
                    weight *= discount;
                }
                let mut cycle_sum = scalar::zero();
                let mut cycle_weight = scalar::one();
                for &(s, a) in &lasso.cycle {
                    cycle_sum += &cycle_weight * &rewards[s][a];
                    cycle_weight *= discount;
                }
                total + weight * cycle_sum / (Scalar::one() - cycle_weight)
            }
            PayoffSpec::FiniteHorizon { horizon, rewards } => (0..*horizon as usize)
                .map(|t| {
                    let (s, a) = lasso.step(t);
                    rewards[t][s][a].clone()
                })
                .fold(scalar::zero(), |acc, r| acc + r),
            PayoffSpec::ReachedSet { targets, values } => {
                let mut mask = 0usize;
                for s in lasso.visited() {
                    for (l, set) in targets.iter().enumerate() {
                        if set.contains(&s) {
                            mask |= 1 << l;
                        }
                    }
                }
                values[mask].clone()
            }
            PayoffSpec::CappedHitting {
                target,
                cap,
                values,
                unreached,
            } => {
                let span = lasso.prefix.len() + lasso.cycle.len();
                (0..span)
                    .find(|&t| target.contains(&lasso.step(t).0))
                    .filter(|&t| t <= *cap as usize)
                    .map(|t| values[t].clone())
                    .unwrap_or_else(|| unreached.clone())
            }
        })
    }
}

/// Which engine-level family a game belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Discounted { discount: Scalar },
    FiniteHorizon { horizon: u32 },
    FiniteRange,
}

/// An arena together with one payoff per player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub arena: Arena,
    pub payoffs: Vec<PayoffSpec>,
}

impl Game {
    pub fn new(arena: Arena, payoffs: Vec<PayoffSpec>) -> Result<Self> {
        let game = Game { arena, payoffs };
        game.check()?;
        Ok(game)
    }

    pub fn num_players(&self) -> usize {
        self.arena.num_players()
    }

    fn check(&self) -> Result<()> {
        let arena = &self.arena;
        let bad = |msg: String| Err(Error::InvalidPayoff(msg));
        if self.payoffs.len() != arena.num_players() {
            return bad(format!(
                "{} payoff specs for {} players",
                self.payoffs.len(),
                arena.num_players()
            ));
        }
        let action_shape = |table: &Vec<Vec<Scalar>>| {
            table.len() == arena.num_states()
                && table
                    .iter()
                    .enumerate()
                    .all(|(s, row)| row.len() == arena.num_actions(s))
        };
        let state_ok = |set: &Vec<StateId>| set.iter().all(|&s| s < arena.num_states());
        let mut discount: Option<&Scalar> = None;
        let mut labels: Option<&Vec<Vec<StateId>>> = None;
        for (i, spec) in self.payoffs.iter().enumerate() {
            match spec {
                PayoffSpec::Discounted {
                    rewards,
                    discount: beta,
                } => {
                    if !action_shape(rewards) {
                        return bad(format!("player {i}: reward table shape"));
                    }
                    if !beta.is_positive() || *beta >= Scalar::one() {
                        return Err(Error::DiscountOutOfRange(scalar::format(beta)));
                    }
                    if discount.is_some_and(|d| d != beta) {
                        return bad("discounted players must share one discount factor".into());
                    }
                    discount = Some(beta);
                }
                PayoffSpec::FiniteHorizon { horizon, rewards } => {
                    if *horizon == 0 {
                        return bad(format!("player {i}: horizon must be positive"));
                    }
                    if rewards.len() != *horizon as usize || !rewards.iter().all(action_shape) {
                        return bad(format!("player {i}: step reward table shape"));
                    }
                }
                PayoffSpec::ReachedSet { targets, values } => {
                    if targets.len() > MAX_LABELS {
                        return bad(format!("at most {MAX_LABELS} target labels"));
                    }
                    if !targets.iter().all(state_ok) {
                        return bad(format!("player {i}: unknown target state"));
                    }
                    if values.len() != 1 << targets.len() {
                        return bad(format!(
                            "player {i}: value map must cover all {} label subsets",
                            1 << targets.len()
                        ));
                    }
                    if labels.is_some_and(|l| l != targets) {
                        return bad("reached-set players must share one target label list".into());
                    }
                    labels = Some(targets);
                }
                PayoffSpec::CappedHitting {
                    target, cap, values, ..
                } => {
                    if *cap == 0 {
                        return bad(format!("player {i}: cap must be positive"));
                    }
                    if !state_ok(target) {
                        return bad(format!("player {i}: unknown target state"));
                    }
                    if values.len() != *cap as usize + 1 {
                        return bad(format!("player {i}: need cap + 1 hitting-time values"));
                    }
                }
            }
        }
        let kinds = self.payoffs.iter().map(|p| match p {
            PayoffSpec::Discounted { .. } => 0,
            PayoffSpec::FiniteHorizon { .. } => 1,
            _ => 2,
        });
        let mut kinds: Vec<_> = kinds.collect();
        kinds.dedup();
        if kinds.len() > 1 {
            return bad("players mix discounted, finite-horizon and finite-range payoffs".into());
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        match &self.payoffs[0] {
            PayoffSpec::Discounted { discount, .. } => Family::Discounted {
                discount: discount.clone(),
            },
            PayoffSpec::FiniteHorizon { .. } => Family::FiniteHorizon {
                horizon: self.max_horizon(),
            },
            _ => Family::FiniteRange,
        }
    }

    fn max_horizon(&self) -> u32 {
        self.payoffs
            .iter()
            .map(|p| match p {
                PayoffSpec::FiniteHorizon { horizon, .. } => *horizon,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_finite_range(&self) -> bool {
        self.family() == Family::FiniteRange
    }

    pub fn monitor(&self) -> Monitor {
        Monitor::new(self)
    }

    /// Immediate reward for `player` when `a` is played at `s` in period
    /// `clock`. Zero for finite-range families.
    pub fn reward(&self, player: Player, clock: u32, s: StateId, a: ActionId) -> Scalar {
        match &self.payoffs[player] {
            PayoffSpec::Discounted { rewards, .. } => rewards[s][a].clone(),
            PayoffSpec::FiniteHorizon { horizon, rewards } => {
                if clock < *horizon {
                    rewards[clock as usize][s][a].clone()
                } else {
                    scalar::zero()
                }
            }
            _ => scalar::zero(),
        }
    }

    /// Payoff vector of a play whose monitor settles at `track`.
    pub fn limit_payoffs(&self, track: &Track) -> Vec<Scalar> {
        self.payoffs
            .iter()
            .enumerate()
            .map(|(i, spec)| match spec {
                PayoffSpec::ReachedSet { values, .. } => values[track.reached as usize].clone(),
                PayoffSpec::CappedHitting {
                    values, unreached, ..
                } => match track.hits[i] {
                    NOT_HIT => unreached.clone(),
                    t => values[t as usize].clone(),
                },
                _ => scalar::zero(),
            })
            .collect()
    }

    /// Pooled range of all finite-range payoffs.
    pub fn pooled_range(&self) -> Option<Vec<Scalar>> {
        let mut all = Vec::new();
        for spec in &self.payoffs {
            all.extend(spec.range()?);
        }
        all.sort();
        all.dedup();
        Some(all)
    }

    pub fn rerooted(&self, initial: StateId) -> Game {
        Game {
            arena: self.arena.rerooted(initial),
            payoffs: self.payoffs.clone(),
        }
    }

    pub fn max_abs_reward(&self) -> Scalar {
        let mut best = scalar::zero();
        for spec in &self.payoffs {
            let tables: Vec<&Vec<Vec<Scalar>>> = match spec {
                PayoffSpec::Discounted { rewards, .. } => vec![rewards],
                PayoffSpec::FiniteHorizon { rewards, .. } => rewards.iter().collect(),
                _ => vec![],
            };
            for v in tables.into_iter().flatten().flatten() {
                if v.abs() > best {
                    best = v.abs();
                }
            }
        }
        best
    }
}

/// Marker for "target not (yet) hit".
pub const NOT_HIT: u32 = u32::MAX;

/// Monitor value: period counter (saturating), reached label mask, and per
/// player first hitting time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Track {
    pub clock: u32,
    pub reached: u64,
    pub hits: Vec<u32>,
}

/// Deterministic transducer over visited states that tracks everything the
/// game's payoffs depend on.
#[derive(Clone, Debug)]
pub struct Monitor {
    label_masks: Vec<u64>,
    hit_targets: Vec<Option<(Vec<bool>, u32)>>,
    clock_limit: u32,
}

impl Monitor {
    pub fn new(game: &Game) -> Self {
        let n = game.arena.num_states();
        let mut label_masks = vec![0u64; n];
        let mut hit_targets = Vec::new();
        let mut clock_limit = 0;
        let mut labels_done = false;
        for spec in &game.payoffs {
            match spec {
                PayoffSpec::ReachedSet { targets, .. } if !labels_done => {
                    for (l, set) in targets.iter().enumerate() {
                        for &s in set {
                            label_masks[s] |= 1 << l;
                        }
                    }
                    labels_done = true;
                    hit_targets.push(None);
                }
                PayoffSpec::CappedHitting { target, cap, .. } => {
                    let mut member = vec![false; n];
                    for &s in target {
                        member[s] = true;
                    }
                    hit_targets.push(Some((member, *cap)));
                    clock_limit = clock_limit.max(cap + 1);
                }
                PayoffSpec::FiniteHorizon { horizon, .. } => {
                    hit_targets.push(None);
                    clock_limit = clock_limit.max(*horizon);
                }
                _ => hit_targets.push(None),
            }
        }
        Monitor {
            label_masks,
            hit_targets,
            clock_limit,
        }
    }

    /// Monitor value after visiting only `s` (at period 0).
    pub fn initial(&self, s: StateId) -> Track {
        let mut track = Track {
            clock: 0,
            reached: 0,
            hits: vec![NOT_HIT; self.hit_targets.len()],
        };
        self.visit(&mut track, s);
        track
    }

    /// Monitor value after moving to `next`.
    pub fn step(&self, track: &Track, next: StateId) -> Track {
        let mut out = track.clone();
        out.clock = (out.clock + 1).min(self.clock_limit);
        self.visit(&mut out, next);
        out
    }

    fn visit(&self, track: &mut Track, s: StateId) {
        track.reached |= self.label_masks[s];
        for (i, target) in self.hit_targets.iter().enumerate() {
            if let Some((member, cap)) = target {
                if track.hits[i] == NOT_HIT && member[s] && track.clock <= *cap {
                    track.hits[i] = track.clock;
                }
            }
        }
    }

    pub fn clock_limit(&self) -> u32 {
        self.clock_limit
    }
}

/// Convenience: the discounted payoff spec with rewards zero everywhere.
pub fn zero_rewards(arena: &Arena) -> Vec<Vec<Scalar>> {
    (0..arena.num_states())
        .map(|s| vec![Scalar::zero(); arena.num_actions(s)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::tests::det;
    use crate::arena::State;
    use crate::scalar::{int, ratio};

    fn loop_arena() -> Arena {
        Arena::new(
            vec!["p".into()],
            vec![State {
                name: "s".into(),
                controller: 0,
                actions: vec![det(0, "loop")],
            }],
            0,
        )
        .unwrap()
    }

    #[test]
    fn discounted_self_loop_is_geometric() {
        let arena = loop_arena();
        let spec = PayoffSpec::Discounted {
            rewards: vec![vec![int(1)]],
            discount: ratio(1, 2),
        };
        let lasso = Lasso {
            prefix: vec![],
            cycle: vec![(0, 0)],
        };
        assert_eq!(spec.evaluate_on_lasso(&arena, &lasso).unwrap(), int(2));
    }

    #[test]
    fn reached_set_unvisited_target_gives_empty_set_value() {
        let arena = Arena::new(
            vec!["p".into()],
            vec![
                State {
                    name: "s".into(),
                    controller: 0,
                    actions: vec![det(0, "loop")],
                },
                State {
                    name: "t".into(),
                    controller: 0,
                    actions: vec![det(1, "loop")],
                },
            ],
            0,
        )
        .unwrap();
        let spec = PayoffSpec::ReachedSet {
            targets: vec![vec![1]],
            values: vec![int(7), int(9)],
        };
        let lasso = Lasso {
            prefix: vec![],
            cycle: vec![(0, 0)],
        };
        assert_eq!(spec.evaluate_on_lasso(&arena, &lasso).unwrap(), int(7));
    }

    #[test]
    fn discounted_prefix_then_zero_cycle() {
        let arena = Arena::new(
            vec!["p".into()],
            vec![
                State {
                    name: "s".into(),
                    controller: 0,
                    actions: vec![det(1, "go")],
                },
                State {
                    name: "t".into(),
                    controller: 0,
                    actions: vec![det(1, "loop")],
                },
            ],
            0,
        )
        .unwrap();
        let spec = PayoffSpec::Discounted {
            rewards: vec![vec![int(3)], vec![int(0)]],
            discount: ratio(1, 2),
        };
        let lasso = Lasso {
            prefix: vec![(0, 0)],
            cycle: vec![(1, 0)],
        };
        // Independent check: sum 64 unrolled periods step by step.
        let mut oracle = scalar::zero();
        let mut w = scalar::one();
        for t in 0..64 {
            let (s, a) = lasso.step(t);
            let r = match &spec {
                PayoffSpec::Discounted { rewards, .. } => rewards[s][a].clone(),
                _ => unreachable!(),
            };
            oracle += &w * r;
            w *= ratio(1, 2);
        }
        let closed = spec.evaluate_on_lasso(&arena, &lasso).unwrap();
        assert_eq!(closed, oracle);
        assert_eq!(closed, int(3));
    }

    #[test]
    fn capped_hitting_pools_late_hits() {
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
                    actions: vec![det(2, "go")],
                },
                State {
                    name: "c".into(),
                    controller: 0,
                    actions: vec![det(2, "loop")],
                },
            ],
            0,
        )
        .unwrap();
        let lasso = Lasso {
            prefix: vec![(0, 0), (1, 0)],
            cycle: vec![(2, 0)],
        };
        let early = PayoffSpec::CappedHitting {
            target: vec![2],
            cap: 2,
            values: vec![int(3), int(2), int(1)],
            unreached: int(0),
        };
        assert_eq!(early.evaluate_on_lasso(&arena, &lasso).unwrap(), int(1));
        let late = PayoffSpec::CappedHitting {
            target: vec![2],
            cap: 1,
            values: vec![int(3), int(2)],
            unreached: int(0),
        };
        assert_eq!(late.evaluate_on_lasso(&arena, &lasso).unwrap(), int(0));
    }

    #[test]
    fn rejects_mixed_discounts() {
        let arena = Arena::new(
            vec!["p".into(), "q".into()],
            vec![State {
                name: "s".into(),
                controller: 0,
                actions: vec![det(0, "loop")],
            }],
            0,
        )
        .unwrap();
        let d = |beta| PayoffSpec::Discounted {
            rewards: vec![vec![int(0)]],
            discount: beta,
        };
        assert!(Game::new(arena.clone(), vec![d(ratio(1, 2)), d(ratio(1, 2))]).is_ok());
        assert!(Game::new(arena, vec![d(ratio(1, 2)), d(ratio(1, 3))]).is_err());
    }

    #[test]
    fn monitor_reached_mask_only_grows() {
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
                    actions: vec![det(0, "back")],
                },
            ],
            0,
        )
        .unwrap();
        let game = Game::new(
            arena,
            vec![PayoffSpec::ReachedSet {
                targets: vec![vec![0], vec![1]],
                values: vec![int(0), int(1), int(2), int(3)],
            }],
        )
        .unwrap();
        let m = game.monitor();
        let t0 = m.initial(0);
        assert_eq!(t0.reached, 1);
        let t1 = m.step(&t0, 1);
        assert_eq!(t1.reached, 3);
        assert_eq!(m.step(&t1, 0).reached, 3);
    }
}
