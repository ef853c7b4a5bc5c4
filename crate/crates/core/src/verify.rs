//! Exact equilibrium checks.
//!
//! For a profile and a player `i`, the deviation product fixes every other
//! player to their strategy (tracking their memory and the payoff monitor)
//! and leaves `i` free: a single-agent problem for `i`.
//!
//! * Discounted and finite-horizon payoffs: best responses by policy
//!   iteration or backward induction. Deviations that keep `i`'s payoff
//!   optimal are exactly those using conserving actions, so opponents'
//!   payoffs among them are optimized on the conserving restriction.
//! * Finite-range payoffs on deterministic arenas: a deviation's outcome is
//!   the payoff of the monitor value its play settles in, and the outcomes
//!   available to `i` are those of the cycles reachable in the product.
//! * Finite horizons additionally enumerate every achievable payoff vector
//!   by a set-valued backward pass, which decides security exactly.
//!
//! Security for discounted games with three or more players is decided
//! exactly when the sum condition holds or a violating deviation is found
//! among the candidates tried; otherwise the positional deviations of the
//! conserving restriction are enumerated and the verdict is marked inexact.

use std::collections::HashMap;
use std::sync::Arc;

use crate::arena::{ActionId, Player};
use crate::error::{Error, Result};
use crate::eval::{expected_payoffs, joint_product, JointMemory};
use crate::graph::Sccs;
use crate::par;
use crate::payoff::{Family, Game};
use crate::product::Product;
use crate::scalar::{self, Scalar};
use crate::solve::{combine_rewards, Horizon, Restriction, RewardGame, Side};
use crate::strategy::{FiniteMemoryStrategy, StrategyProfile, Transducer};

/// Largest number of positional deviations tried for discounted security.
pub const POSITIONAL_DEVIATION_CAP: usize = 20_000;
/// Largest achievable-vector set per product node for finite horizons.
pub const VECTOR_SET_CAP: usize = 100_000;

/// A unilateral deviation and the payoff vector it produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub player: Player,
    pub strategy: FiniteMemoryStrategy,
    pub payoffs: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub holds: bool,
    /// False when the verdict only covers positional deviations.
    pub exact: bool,
    /// Present iff the check fails.
    pub witness: Option<Witness>,
}

impl Check {
    fn pass(exact: bool) -> Self {
        Check {
            holds: true,
            exact,
            witness: None,
        }
    }

    fn fail(witness: Witness) -> Self {
        Check {
            holds: false,
            exact: true,
            witness: Some(witness),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub payoffs: Vec<Scalar>,
    pub nash: Check,
    pub secure: Check,
    pub sum_secure: Check,
    pub strongly_secure: Check,
    /// Sum condition with per-player weights, when weights were given.
    pub weighted_secure: Option<(Vec<Scalar>, Check)>,
}

enum Kind {
    Reward {
        horizon: Horizon,
        /// `[player][node][action]`.
        rewards: Vec<Vec<Vec<Scalar>>>,
    },
    Limit,
}

/// Player `i`'s single-agent view of a profile.
struct Deviations<'a> {
    game: &'a Game,
    profile: &'a StrategyProfile,
    player: Player,
    dev: Product<JointMemory>,
    kind: Kind,
}

/// A deviation given as a positional policy on the deviation product.
struct Candidate {
    policy: Vec<ActionId>,
    payoffs: Vec<Scalar>,
}

impl<'a> Deviations<'a> {
    fn new(game: &'a Game, profile: &'a StrategyProfile, player: Player) -> Result<Self> {
        let dev = joint_product(game, profile, Some(player))?;
        let n = dev.arena.num_states();
        let kind = match game.family() {
            Family::FiniteRange => {
                if !game.arena.is_deterministic() {
                    return Err(Error::Unsupported(
                        "finite-range payoffs on probabilistic arenas cannot be verified".into(),
                    ));
                }
                Kind::Limit
            }
            family => {
                let horizon = match family {
                    Family::Discounted { discount } => Horizon::Discounted(discount),
                    _ => {
                        let limit = game.monitor().clock_limit();
                        Horizon::Layered((0..n).map(|p| dev.memory(p).1.clock >= limit).collect())
                    }
                };
                let rewards = (0..game.num_players())
                    .map(|j| {
                        (0..n)
                            .map(|p| {
                                let (s, (_, track)) = &dev.origin[p];
                                dev.action_origin[p]
                                    .iter()
                                    .map(|&a| game.reward(j, track.clock, *s, a))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                Kind::Reward { horizon, rewards }
            }
        };
        Ok(Deviations {
            game,
            profile,
            player,
            dev,
            kind,
        })
    }

    fn nodes(&self) -> usize {
        self.dev.arena.num_states()
    }

    fn reward_game<'b>(&'b self, rewards: &'b [Vec<Scalar>]) -> RewardGame<'b> {
        let Kind::Reward { horizon, .. } = &self.kind else {
            unreachable!()
        };
        RewardGame {
            arena: &self.dev.arena,
            rewards,
            horizon,
        }
    }

    fn rewards(&self) -> &[Vec<Vec<Scalar>>] {
        match &self.kind {
            Kind::Reward { rewards, .. } => rewards,
            Kind::Limit => &[],
        }
    }

    /// Payoff vector of a positional policy, computed on the product.
    fn evaluate(&self, restr: &Restriction, policy: &[ActionId]) -> Result<Vec<Scalar>> {
        (0..self.game.num_players())
            .map(|j| Ok(self.reward_game(&self.rewards()[j]).evaluate(restr, policy)?[0].clone()))
            .collect()
    }

    /// Best response: optimal values on the product and a greedy policy.
    fn best(&self) -> Result<(Vec<Scalar>, Candidate)> {
        let full = Restriction::full(&self.dev.arena);
        let g = self.reward_game(&self.rewards()[self.player]);
        let sol = g.solve(&full, &vec![Side::Max; self.nodes()])?;
        let payoffs = self.evaluate(&full, &sol.policy)?;
        Ok((
            sol.values,
            Candidate {
                policy: sol.policy,
                payoffs,
            },
        ))
    }

    fn conserving(&self, values: &[Scalar]) -> Restriction {
        let full = Restriction::full(&self.dev.arena);
        let mut restr = self
            .reward_game(&self.rewards()[self.player])
            .conserving(&full, values);
        restr.prune_from(&self.dev.arena, 0);
        restr
    }

    /// Minimizes `Σ_j weights[j] u_j` on a restriction.
    fn minimize(&self, restr: &Restriction, weights: &[Scalar]) -> Result<Candidate> {
        let combined = combine_rewards(self.rewards(), weights);
        let g = self.reward_game(&combined);
        let sol = g.solve(restr, &vec![Side::Min; self.nodes()])?;
        let payoffs = self.evaluate(restr, &sol.policy)?;
        Ok(Candidate {
            policy: sol.policy,
            payoffs,
        })
    }

    /// Every payoff vector a deviation can produce (finite-range case),
    /// each with a positional policy realizing it.
    fn achievable(&self) -> Vec<Candidate> {
        let n = self.nodes();
        let arena = &self.dev.arena;
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|p| {
                (0..arena.num_actions(p))
                    .map(|b| arena.successors(p, b)[0].target)
                    .collect()
            })
            .collect();
        let sccs = Sccs::new(&succ);
        let mut seen: HashMap<Vec<Scalar>, ()> = HashMap::new();
        let mut out = Vec::new();
        for v in 0..n {
            if !sccs.on_cycle(&succ, v) {
                continue;
            }
            let payoffs = self.game.limit_payoffs(&self.dev.memory(v).1);
            if seen.insert(payoffs.clone(), ()).is_some() {
                continue;
            }
            out.push(Candidate {
                policy: lasso_policy(&succ, &sccs, v),
                payoffs,
            });
        }
        out
    }

    /// Strategy on the arena playing `policy` on the product.
    fn witness_strategy(&self, policy: &[ActionId]) -> FiniteMemoryStrategy {
        let base = &self.game.arena;
        let dev = &self.dev;
        let memory = Transducer::from_fn(base, self.nodes(), 0, |m, s, a, k| {
            if dev.base_state(m) != s {
                return m;
            }
            match dev.product_action(m, a) {
                Some(b) => dev.arena.successors(m, b)[k].target,
                None => m,
            }
        });
        FiniteMemoryStrategy::new(self.player, base, Arc::new(memory), |m, s| {
            if dev.base_state(m) == s {
                dev.action_origin[m][policy[m]]
            } else {
                0
            }
        })
    }

    /// Replays a deviation through the evaluator; the product computation
    /// must agree exactly.
    fn witness(&self, candidate: &Candidate) -> Result<Witness> {
        let strategy = self.witness_strategy(&candidate.policy);
        self.replay(strategy, &candidate.payoffs)
    }

    fn replay(&self, strategy: FiniteMemoryStrategy, expected: &[Scalar]) -> Result<Witness> {
        let payoffs = expected_payoffs(self.game, &self.profile.with_deviation(strategy.clone()))?;
        if payoffs != expected {
            return Err(Error::Inconsistent(format!(
                "deviation of player {} replays to a different payoff vector",
                self.player
            )));
        }
        Ok(Witness {
            player: self.player,
            strategy,
            payoffs,
        })
    }
}

/// Positional policy reaching `v` and then cycling through it.
fn lasso_policy(succ: &[Vec<usize>], sccs: &Sccs, v: usize) -> Vec<ActionId> {
    let n = succ.len();
    let mut policy = vec![0; n];
    // Path from the root.
    let mut parent: Vec<Option<(usize, ActionId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(p) = queue.pop_front() {
        if p == v {
            break;
        }
        for (b, &w) in succ[p].iter().enumerate() {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((p, b));
                queue.push_back(w);
            }
        }
    }
    let mut w = v;
    while let Some((p, b)) = parent[w] {
        policy[p] = b;
        w = p;
    }
    // Cycle back to `v` inside its component.
    let comp = sccs.comp[v];
    let mut back: Vec<Option<(usize, ActionId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    let mut closing = None;
    for (b, &w) in succ[v].iter().enumerate() {
        if w == v {
            closing = Some(b);
            break;
        }
        if sccs.comp[w] == comp && !seen[w] {
            seen[w] = true;
            back[w] = Some((v, b));
            queue.push_back(w);
        }
    }
    if let Some(b) = closing {
        policy[v] = b;
        return policy;
    }
    let mut last = None;
    'search: while let Some(p) = queue.pop_front() {
        for (b, &w) in succ[p].iter().enumerate() {
            if w == v {
                last = Some((p, b));
                break 'search;
            }
            if sccs.comp[w] == comp && !seen[w] {
                seen[w] = true;
                back[w] = Some((p, b));
                queue.push_back(w);
            }
        }
    }
    let (mut p, b) = last.expect("node lies on a cycle");
    policy[p] = b;
    while p != v {
        let (q, b) = back[p].unwrap();
        policy[q] = b;
        p = q;
    }
    policy
}

/// First formulation: a deviation keeping `u_i` that leaves every opponent
/// weakly worse and some opponent strictly worse.
pub fn violates_secure(current: &[Scalar], player: Player, payoffs: &[Scalar]) -> bool {
    payoffs[player] == current[player]
        && (0..current.len())
            .filter(|&j| j != player)
            .all(|j| payoffs[j] <= current[j])
        && (0..current.len())
            .filter(|&j| j != player)
            .any(|j| payoffs[j] < current[j])
}

/// Second formulation: a deviation keeping `u_i` that hurts some player
/// while no player gains.
pub fn violates_secure_alt(current: &[Scalar], player: Player, payoffs: &[Scalar]) -> bool {
    let keeps = payoffs[player] == current[player];
    let hurts = (0..current.len()).any(|j| payoffs[j] < current[j]);
    let someone_gains = (0..current.len()).any(|k| payoffs[k] > current[k]);
    keeps && hurts && !someone_gains
}

fn opponents_sum(payoffs: &[Scalar], player: Player, weights: &[Scalar]) -> Scalar {
    payoffs
        .iter()
        .zip(weights)
        .enumerate()
        .filter(|&(j, _)| j != player)
        .map(|(_, (u, w))| u * w)
        .sum()
}

/// Everything the checks need about one player.
struct Analysis {
    best: Witness,
    nash: bool,
    /// Only when `nash`: deviations keeping `u_i`.
    min_sum: Option<Witness>,
    min_weighted: Option<Witness>,
    min_each: Vec<Option<Witness>>,
    violation: Option<Witness>,
    violation_alt: Option<Witness>,
    secure_exact: bool,
}

fn analyze(
    game: &Game,
    profile: &StrategyProfile,
    current: &[Scalar],
    player: Player,
    weights: Option<&[Scalar]>,
) -> Result<Analysis> {
    let d = Deviations::new(game, profile, player)?;
    let n = game.num_players();
    let ones = vec![scalar::one(); n];
    let unit = |j: usize| {
        let mut w = vec![scalar::zero(); n];
        w[j] = scalar::one();
        w
    };
    match &d.kind {
        Kind::Limit => {
            let all = d.achievable();
            let best = all
                .iter()
                .reduce(|a, b| if b.payoffs[player] > a.payoffs[player] { b } else { a })
                .expect("some play exists");
            let best_w = d.witness(best)?;
            let nash = best.payoffs[player] <= current[player];
            let mut a = Analysis::failed(best_w, nash, n);
            if !nash {
                return Ok(a);
            }
            let keeping: Vec<&Candidate> = all
                .iter()
                .filter(|c| c.payoffs[player] == current[player])
                .collect();
            let argmin = |w: &[Scalar]| {
                keeping
                    .iter()
                    .copied()
                    .reduce(|x, y| {
                        if opponents_sum(&y.payoffs, player, w) < opponents_sum(&x.payoffs, player, w) {
                            y
                        } else {
                            x
                        }
                    })
                    .expect("the profile itself keeps the payoff")
            };
            a.min_sum = Some(d.witness(argmin(&ones))?);
            if let Some(w) = weights {
                a.min_weighted = Some(d.witness(argmin(w))?);
            }
            for j in (0..n).filter(|&j| j != player) {
                a.min_each[j] = Some(d.witness(argmin(&unit(j)))?);
            }
            a.find_violations(&d, current, player, keeping.into_iter())?;
            a.secure_exact = true;
            Ok(a)
        }
        Kind::Reward { horizon, .. } => {
            let (values, best) = d.best()?;
            let best_w = d.witness(&best)?;
            let nash = values[0] <= current[player];
            let mut a = Analysis::failed(best_w, nash, n);
            if !nash {
                return Ok(a);
            }
            let restr = d.conserving(&values);
            let min_sum = d.minimize(&restr, &ones)?;
            a.min_sum = Some(d.witness(&min_sum)?);
            if let Some(w) = weights {
                a.min_weighted = Some(d.witness(&d.minimize(&restr, w)?)?);
            }
            let mut candidates = vec![min_sum];
            for j in (0..n).filter(|&j| j != player) {
                let c = d.minimize(&restr, &unit(j))?;
                a.min_each[j] = Some(d.witness(&c)?);
                candidates.push(c);
            }
            let sum_ok = opponents_sum(&candidates[0].payoffs, player, &ones)
                >= opponents_sum(current, player, &ones);
            if let Horizon::Layered(_) = horizon {
                let (found, alt) = finite_horizon_violations(&d, current)?;
                a.violation = found;
                a.violation_alt = alt;
                a.secure_exact = true;
            } else if sum_ok {
                a.secure_exact = true;
            } else {
                a.find_violations(&d, current, player, candidates.iter())?;
                a.secure_exact = true;
                if a.violation.is_none() {
                    let (more, exhausted) = positional_deviations(&d, &restr)?;
                    a.find_violations(&d, current, player, more.iter())?;
                    a.secure_exact = a.violation.is_some() || (exhausted && n <= 2);
                }
            }
            Ok(a)
        }
    }
}

impl Analysis {
    fn failed(best: Witness, nash: bool, n: usize) -> Self {
        Analysis {
            best,
            nash,
            min_sum: None,
            min_weighted: None,
            min_each: vec![None; n],
            violation: None,
            violation_alt: None,
            secure_exact: true,
        }
    }

    fn find_violations<'c>(
        &mut self,
        d: &Deviations,
        current: &[Scalar],
        player: Player,
        candidates: impl Iterator<Item = &'c Candidate> + Clone,
    ) -> Result<()> {
        if self.violation.is_none() {
            if let Some(c) = candidates.clone().find(|c| violates_secure(current, player, &c.payoffs)) {
                self.violation = Some(d.witness(c)?);
            }
        }
        if self.violation_alt.is_none() {
            if let Some(c) = candidates.clone().find(|c| violates_secure_alt(current, player, &c.payoffs)) {
                self.violation_alt = Some(d.witness(c)?);
            }
        }
        Ok(())
    }
}

/// Positional deviations of the restriction, up to the cap. The flag says
/// whether all of them were tried.
fn positional_deviations(d: &Deviations, restr: &Restriction) -> Result<(Vec<Candidate>, bool)> {
    let owned: Vec<(usize, Vec<ActionId>)> = restr
        .members()
        .map(|p| (p, restr.allowed(p).collect::<Vec<_>>()))
        .filter(|(_, acts)| acts.len() > 1)
        .collect();
    let mut total: usize = 1;
    for (_, acts) in &owned {
        total = total.saturating_mul(acts.len());
    }
    let exhausted = total <= POSITIONAL_DEVIATION_CAP;
    let count = total.min(POSITIONAL_DEVIATION_CAP);
    let base: Vec<ActionId> = (0..d.nodes()).map(|p| restr.first_allowed(p)).collect();
    let out = par::try_map_range(count, |mut idx| {
        let mut policy = base.clone();
        for (p, acts) in &owned {
            policy[*p] = acts[idx % acts.len()];
            idx /= acts.len();
        }
        let payoffs = d.evaluate(restr, &policy)?;
        Ok::<_, Error>(Candidate { policy, payoffs })
    })?;
    Ok((out, exhausted))
}

/// Achievable payoff vectors from one product node, with how each arises.
struct VectorSet {
    vectors: Vec<Vec<Scalar>>,
    /// Per vector: product action and, per successor, the successor's
    /// vector index. `None` at terminal nodes.
    origin: Vec<Option<(ActionId, Vec<usize>)>>,
}

/// Exact security check for finite horizons via achievable vector sets.
fn finite_horizon_violations(d: &Deviations, current: &[Scalar]) -> Result<(Option<Witness>, Option<Witness>)> {
    let Kind::Reward {
        horizon: Horizon::Layered(terminal),
        rewards,
    } = &d.kind
    else {
        unreachable!()
    };
    let n = d.nodes();
    let players = d.game.num_players();
    let arena = &d.dev.arena;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&p| std::cmp::Reverse(d.dev.memory(p).1.clock));
    let mut sets: Vec<Option<VectorSet>> = (0..n).map(|_| None).collect();
    for p in order {
        if terminal[p] {
            sets[p] = Some(VectorSet {
                vectors: vec![vec![scalar::zero(); players]],
                origin: vec![None],
            });
            continue;
        }
        let mut index: HashMap<Vec<Scalar>, usize> = HashMap::new();
        let mut set = VectorSet {
            vectors: Vec::new(),
            origin: Vec::new(),
        };
        for b in 0..arena.num_actions(p) {
            let succ = arena.successors(p, b);
            let sizes: Vec<usize> = succ
                .iter()
                .map(|t| sets[t.target].as_ref().expect("later layer solved").vectors.len())
                .collect();
            let combos: usize = sizes.iter().product();
            if combos > VECTOR_SET_CAP {
                return Err(Error::BoundsExceeded("achievable payoff vectors".into()));
            }
            for mut idx in 0..combos {
                let mut pick = Vec::with_capacity(succ.len());
                let mut v: Vec<Scalar> = (0..players).map(|j| rewards[j][p][b].clone()).collect();
                for (t, &size) in succ.iter().zip(&sizes) {
                    let k = idx % size;
                    idx /= size;
                    pick.push(k);
                    let w = &sets[t.target].as_ref().unwrap().vectors[k];
                    for (x, y) in v.iter_mut().zip(w) {
                        *x += &t.prob * y;
                    }
                }
                if !index.contains_key(&v) {
                    index.insert(v.clone(), set.vectors.len());
                    set.vectors.push(v);
                    set.origin.push(Some((b, pick)));
                }
            }
            if set.vectors.len() > VECTOR_SET_CAP {
                return Err(Error::BoundsExceeded("achievable payoff vectors".into()));
            }
        }
        sets[p] = Some(set);
    }
    let sets: Vec<VectorSet> = sets.into_iter().map(Option::unwrap).collect();
    let root = &sets[0];
    let find = |f: fn(&[Scalar], Player, &[Scalar]) -> bool| {
        root.vectors
            .iter()
            .position(|v| f(current, d.player, v))
    };
    let build = |k: usize| -> Result<Witness> {
        let strategy = vector_witness(d, &sets, k);
        d.replay(strategy, &root.vectors[k])
    };
    let first = find(violates_secure).map(build).transpose()?;
    let second = find(violates_secure_alt).map(build).transpose()?;
    Ok((first, second))
}

/// Strategy realizing vector `k` of the root set. Memory is a pair of
/// product node and vector index.
fn vector_witness(d: &Deviations, sets: &[VectorSet], k: usize) -> FiniteMemoryStrategy {
    let base = &d.game.arena;
    let dev = &d.dev;
    let mut offset = Vec::with_capacity(sets.len());
    let mut size = 0;
    for s in sets {
        offset.push(size);
        size += s.vectors.len();
    }
    let decode = |m: usize| {
        let p = offset.partition_point(|&o| o <= m) - 1;
        (p, m - offset[p])
    };
    let memory = Transducer::from_fn(base, size, offset[0] + k, |m, s, a, kk| {
        let (p, x) = decode(m);
        if dev.base_state(p) != s {
            return m;
        }
        let Some(b) = dev.product_action(p, a) else {
            return m;
        };
        let next = dev.arena.successors(p, b)[kk].target;
        match &sets[p].origin[x] {
            Some((chosen, pick)) if *chosen == b => offset[next] + pick[kk],
            _ => offset[next],
        }
    });
    FiniteMemoryStrategy::new(d.player, base, Arc::new(memory), |m, s| {
        let (p, x) = decode(m);
        if dev.base_state(p) != s {
            return 0;
        }
        match &sets[p].origin[x] {
            Some((b, _)) => dev.action_origin[p][*b],
            None => 0,
        }
    })
}

/// Maximum payoff player `i` can get against the others' strategies, and
/// a deviation attaining it.
pub fn best_response(game: &Game, profile: &StrategyProfile, player: Player) -> Result<(Scalar, Witness)> {
    let d = Deviations::new(game, profile, player)?;
    let best = match &d.kind {
        Kind::Limit => d
            .achievable()
            .into_iter()
            .reduce(|a, b| if b.payoffs[player] > a.payoffs[player] { b } else { a })
            .unwrap(),
        Kind::Reward { .. } => d.best()?.1,
    };
    let w = d.witness(&best)?;
    Ok((w.payoffs[player].clone(), w))
}

/// Best-response value, and the least sum of opponents' payoffs among
/// best responses, with a deviation attaining both.
pub fn lexi_best_response(
    game: &Game,
    profile: &StrategyProfile,
    player: Player,
) -> Result<(Scalar, Scalar, Witness)> {
    let d = Deviations::new(game, profile, player)?;
    let ones = vec![scalar::one(); game.num_players()];
    let chosen = match &d.kind {
        Kind::Limit => {
            let all = d.achievable();
            let top = all.iter().map(|c| c.payoffs[player].clone()).max().unwrap();
            all.into_iter()
                .filter(|c| c.payoffs[player] == top)
                .reduce(|x, y| {
                    if opponents_sum(&y.payoffs, player, &ones) < opponents_sum(&x.payoffs, player, &ones) {
                        y
                    } else {
                        x
                    }
                })
                .unwrap()
        }
        Kind::Reward { .. } => {
            let (values, _) = d.best()?;
            d.minimize(&d.conserving(&values), &ones)?
        }
    };
    let w = d.witness(&chosen)?;
    let sum = opponents_sum(&w.payoffs, player, &ones);
    Ok((w.payoffs[player].clone(), sum, w))
}

fn analyses(
    game: &Game,
    profile: &StrategyProfile,
    weights: Option<&[Scalar]>,
) -> Result<(Vec<Scalar>, Vec<Analysis>)> {
    let current = expected_payoffs(game, profile)?;
    let all = par::try_map_range(game.num_players(), |i| analyze(game, profile, &current, i, weights))?;
    Ok((current, all))
}

fn nash_check(all: &[Analysis]) -> Check {
    match all.iter().find(|a| !a.nash) {
        Some(a) => Check::fail(a.best.clone()),
        None => Check::pass(true),
    }
}

fn sum_check(current: &[Scalar], all: &[Analysis], weights: Option<&[Scalar]>) -> Check {
    let nash = nash_check(all);
    if !nash.holds {
        return nash;
    }
    let ones = vec![scalar::one(); current.len()];
    let w = weights.unwrap_or(&ones);
    for (i, a) in all.iter().enumerate() {
        let witness = if weights.is_some() {
            a.min_weighted.as_ref()
        } else {
            a.min_sum.as_ref()
        };
        let witness = witness.expect("computed when Nash holds");
        if opponents_sum(&witness.payoffs, i, w) < opponents_sum(current, i, w) {
            return Check::fail(witness.clone());
        }
    }
    Check::pass(true)
}

fn strong_check(current: &[Scalar], all: &[Analysis]) -> Check {
    let nash = nash_check(all);
    if !nash.holds {
        return nash;
    }
    for a in all {
        for (j, w) in a.min_each.iter().enumerate() {
            if let Some(w) = w {
                if w.payoffs[j] < current[j] {
                    return Check::fail(w.clone());
                }
            }
        }
    }
    Check::pass(true)
}

fn secure_check(all: &[Analysis], alternative: bool) -> Result<Check> {
    let nash = nash_check(all);
    if !nash.holds {
        return Ok(nash);
    }
    let mut exact = true;
    for a in all {
        if a.violation.is_some() != a.violation_alt.is_some() {
            return Err(Error::Inconsistent(
                "the two formulations of security disagree".into(),
            ));
        }
        let v = if alternative { &a.violation_alt } else { &a.violation };
        if let Some(w) = v {
            return Ok(Check::fail(w.clone()));
        }
        exact &= a.secure_exact;
    }
    Ok(Check::pass(exact))
}

pub fn check_nash(game: &Game, profile: &StrategyProfile) -> Result<Check> {
    let (_, all) = analyses(game, profile, None)?;
    Ok(nash_check(&all))
}

pub fn check_secure(game: &Game, profile: &StrategyProfile) -> Result<Check> {
    let (_, all) = analyses(game, profile, None)?;
    secure_check(&all, false)
}

/// The second formulation of security, decided independently.
pub fn check_secure_alt(game: &Game, profile: &StrategyProfile) -> Result<Check> {
    let (_, all) = analyses(game, profile, None)?;
    secure_check(&all, true)
}

pub fn check_sum_secure(game: &Game, profile: &StrategyProfile) -> Result<Check> {
    let (current, all) = analyses(game, profile, None)?;
    Ok(sum_check(&current, &all, None))
}

/// Sum condition with opponents' payoffs weighted by `weights`.
pub fn check_weighted_secure(game: &Game, profile: &StrategyProfile, weights: &[Scalar]) -> Result<Check> {
    let (current, all) = analyses(game, profile, Some(weights))?;
    Ok(sum_check(&current, &all, Some(weights)))
}

pub fn check_strongly_secure(game: &Game, profile: &StrategyProfile) -> Result<Check> {
    let (current, all) = analyses(game, profile, None)?;
    Ok(strong_check(&current, &all))
}

/// All checks at once.
pub fn verify_profile(
    game: &Game,
    profile: &StrategyProfile,
    weights: Option<&[Scalar]>,
) -> Result<EquilibriumReport> {
    let (current, all) = analyses(game, profile, weights)?;
    let secure = secure_check(&all, false)?;
    let alt = secure_check(&all, true)?;
    if secure.holds != alt.holds {
        return Err(Error::Inconsistent(
            "the two formulations of security disagree".into(),
        ));
    }
    Ok(EquilibriumReport {
        nash: nash_check(&all),
        secure,
        sum_secure: sum_check(&current, &all, None),
        strongly_secure: strong_check(&current, &all),
        weighted_secure: weights.map(|w| (w.to_vec(), sum_check(&current, &all, Some(w)))),
        payoffs: current,
    })
}
