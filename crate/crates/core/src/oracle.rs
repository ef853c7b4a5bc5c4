//! Brute-force oracles over explicit finite strategy classes.
//!
//! Nothing here uses the solvers: profiles are evaluated by direct linear
//! solves, walks along deterministic plays, or sums over history trees,
//! and equilibrium properties are checked by literal quantification over
//! the class.
//!
//! Classes:
//! * discounted payoffs: positional strategies on the arena;
//! * finite-range payoffs (deterministic arenas): positional strategies on
//!   the arena × payoff monitor product;
//! * finite horizons: all strategies, as action choices at every history
//!   shorter than the horizon.

use std::sync::Arc;

use crate::arena::{ActionId, Arena, Player, StateId};
use crate::error::{Error, Result};
use crate::eval::{expected_payoffs, joint_product};
use crate::linalg;
use crate::model::Model;
use crate::par;
use crate::payoff::{Family, Game};
use crate::scalar::{self, Scalar};
use crate::strategy::{FiniteMemoryStrategy, StrategyProfile, Transducer};

pub const DEFAULT_MAX_PROFILES: usize = 1_000_000;
/// Largest number of profile comparisons made while checking deviations.
pub const MAX_DEVIATION_WORK: usize = 200_000_000;
const MAX_TREE_NODES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyClass {
    /// Positional on the arena.
    Positional,
    /// Positional on the arena × payoff monitor product.
    ProductPositional,
    /// Choice at every history shorter than the horizon.
    HistoryTree,
}

/// A place where a profile chooses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionPoint {
    pub controller: Player,
    pub state: StateId,
    pub arity: usize,
    /// The history (as states) for tree classes; the state alone otherwise.
    pub history: Vec<StateId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleProfile {
    /// Action index at each decision point.
    pub choices: Vec<ActionId>,
    pub payoffs: Vec<Scalar>,
    pub sum_secure: bool,
    pub strongly_secure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub class: StrategyClass,
    pub points: Vec<DecisionPoint>,
    pub profiles: usize,
    pub nash_count: usize,
    /// Secure equilibria of the class.
    pub equilibria: Vec<OracleProfile>,
    /// Profiles where a stronger property held but a weaker one failed.
    pub hierarchy_violations: usize,
}

impl OracleResult {
    pub fn contains(&self, choices: &[ActionId]) -> bool {
        self.equilibria.iter().any(|e| e.choices == choices)
    }

    /// Distinct payoff vectors of the secure equilibria, sorted.
    pub fn payoff_set(&self) -> Vec<Vec<Scalar>> {
        let mut out: Vec<Vec<Scalar>> = self.equilibria.iter().map(|e| e.payoffs.clone()).collect();
        out.sort();
        out.dedup();
        out
    }
}

struct TreeNode {
    state: StateId,
    depth: u32,
    history: Vec<StateId>,
    /// `[action][successor]`, `None` past the horizon.
    children: Vec<Vec<Option<usize>>>,
}

enum Space {
    Arena,
    Product(Model),
    Tree(Vec<TreeNode>),
}

/// The strategy class of a game with its decision points and evaluator.
pub struct ProfileSpace<'g> {
    game: &'g Game,
    class: StrategyClass,
    space: Space,
    points: Vec<DecisionPoint>,
    /// Decision point of every arena state / product node / tree node.
    point_of: Vec<Option<usize>>,
}

impl<'g> ProfileSpace<'g> {
    pub fn new(game: &'g Game) -> Result<Self> {
        let arena = &game.arena;
        match game.family() {
            Family::Discounted { .. } => {
                let mut points = Vec::new();
                let point_of = (0..arena.num_states())
                    .map(|s| {
                        (arena.num_actions(s) > 1).then(|| {
                            points.push(DecisionPoint {
                                controller: arena.controller(s),
                                state: s,
                                arity: arena.num_actions(s),
                                history: vec![s],
                            });
                            points.len() - 1
                        })
                    })
                    .collect();
                Ok(ProfileSpace {
                    game,
                    class: StrategyClass::Positional,
                    space: Space::Arena,
                    points,
                    point_of,
                })
            }
            Family::FiniteRange => {
                let model = Model::new(game)?;
                let mut points = Vec::new();
                let point_of = (0..model.num_nodes())
                    .map(|p| {
                        let s = model.base_state(p);
                        (arena.num_actions(s) > 1).then(|| {
                            points.push(DecisionPoint {
                                controller: arena.controller(s),
                                state: s,
                                arity: arena.num_actions(s),
                                history: vec![s],
                            });
                            points.len() - 1
                        })
                    })
                    .collect();
                Ok(ProfileSpace {
                    game,
                    class: StrategyClass::ProductPositional,
                    space: Space::Product(model),
                    points,
                    point_of,
                })
            }
            Family::FiniteHorizon { .. } => {
                let horizon = game.monitor().clock_limit();
                let mut nodes = Vec::new();
                if horizon > 0 {
                    nodes.push(TreeNode {
                        state: arena.initial(),
                        depth: 0,
                        history: vec![arena.initial()],
                        children: Vec::new(),
                    });
                }
                let mut next = 0;
                while next < nodes.len() {
                    let (s, depth, history) = {
                        let n = &nodes[next];
                        (n.state, n.depth, n.history.clone())
                    };
                    let mut children = Vec::new();
                    for a in 0..arena.num_actions(s) {
                        let mut row = Vec::new();
                        for t in arena.successors(s, a) {
                            if depth + 1 < horizon {
                                let mut h = history.clone();
                                h.push(t.target);
                                row.push(Some(nodes.len()));
                                nodes.push(TreeNode {
                                    state: t.target,
                                    depth: depth + 1,
                                    history: h,
                                    children: Vec::new(),
                                });
                            } else {
                                row.push(None);
                            }
                        }
                        children.push(row);
                    }
                    nodes[next].children = children;
                    next += 1;
                    if nodes.len() > MAX_TREE_NODES {
                        return Err(Error::BoundsExceeded("history tree".into()));
                    }
                }
                let mut points = Vec::new();
                let point_of = nodes
                    .iter()
                    .map(|n| {
                        (arena.num_actions(n.state) > 1).then(|| {
                            points.push(DecisionPoint {
                                controller: arena.controller(n.state),
                                state: n.state,
                                arity: arena.num_actions(n.state),
                                history: n.history.clone(),
                            });
                            points.len() - 1
                        })
                    })
                    .collect();
                Ok(ProfileSpace {
                    game,
                    class: StrategyClass::HistoryTree,
                    space: Space::Tree(nodes),
                    points,
                    point_of,
                })
            }
        }
    }

    pub fn class(&self) -> StrategyClass {
        self.class
    }

    pub fn points(&self) -> &[DecisionPoint] {
        &self.points
    }

    /// Number of profiles, or `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        self.points
            .iter()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.arity))
    }

    /// Choices of the profile with mixed-radix index `index`.
    pub fn decode(&self, mut index: usize) -> Vec<ActionId> {
        self.points
            .iter()
            .map(|p| {
                let a = index % p.arity;
                index /= p.arity;
                a
            })
            .collect()
    }

    fn choice(&self, choices: &[ActionId], node: usize) -> ActionId {
        self.point_of[node].map_or(0, |k| choices[k])
    }

    /// Payoff vector of a profile of the class.
    pub fn evaluate(&self, choices: &[ActionId]) -> Result<Vec<Scalar>> {
        let game = self.game;
        let arena = &game.arena;
        let players = game.num_players();
        match &self.space {
            Space::Arena => {
                let Family::Discounted { discount } = game.family() else {
                    unreachable!()
                };
                let n = arena.num_states();
                let mut matrix = vec![vec![scalar::zero(); n]; n];
                let mut rhs = Vec::with_capacity(n);
                for (s, row) in matrix.iter_mut().enumerate() {
                    let a = self.choice(choices, s);
                    row[s] += scalar::one();
                    for t in arena.successors(s, a) {
                        row[t.target] -= &discount * &t.prob;
                    }
                    rhs.push((0..players).map(|i| game.reward(i, 0, s, a)).collect());
                }
                Ok(linalg::solve_many(matrix, rhs)?.swap_remove(arena.initial()))
            }
            Space::Product(model) => {
                let mut seen = vec![false; model.num_nodes()];
                let mut p = model.root();
                while !seen[p] {
                    seen[p] = true;
                    let b = model
                        .product
                        .product_action(p, self.choice(choices, p))
                        .expect("model keeps every action");
                    p = model.arena().successors(p, b)[0].target;
                }
                Ok(game.limit_payoffs(model.product.memory(p)))
            }
            Space::Tree(nodes) => {
                let mut values: Vec<Vec<Scalar>> = vec![Vec::new(); nodes.len()];
                for v in (0..nodes.len()).rev() {
                    let node = &nodes[v];
                    let a = self.choice(choices, v);
                    let mut out: Vec<Scalar> = (0..players)
                        .map(|i| game.reward(i, node.depth, node.state, a))
                        .collect();
                    for (t, child) in arena.successors(node.state, a).iter().zip(&node.children[a]) {
                        if let Some(c) = child {
                            for (x, y) in out.iter_mut().zip(&values[*c]) {
                                *x += &t.prob * y;
                            }
                        }
                    }
                    values[v] = out;
                }
                Ok(values
                    .into_iter()
                    .next()
                    .unwrap_or_else(|| vec![scalar::zero(); players]))
            }
        }
    }

    /// Choices a finite-memory profile makes at the decision points of a
    /// history tree.
    pub fn tree_choices(&self, profile: &StrategyProfile) -> Result<Vec<ActionId>> {
        let Space::Tree(nodes) = &self.space else {
            return Err(Error::Unsupported("only history trees hold every profile".into()));
        };
        let arena = &self.game.arena;
        profile.validate(arena)?;
        let mut memory: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        let mut choices = vec![0; self.points.len()];
        if nodes.is_empty() {
            return Ok(choices);
        }
        memory[0] = profile.strategies.iter().map(|s| s.memory.initial()).collect();
        for v in 0..nodes.len() {
            let node = &nodes[v];
            let c = arena.controller(node.state);
            let a = profile.strategies[c].action(memory[v][c], node.state);
            if let Some(k) = self.point_of[v] {
                choices[k] = a;
            }
            // Off-path nodes matter too: deviations lead there.
            for (b, row) in node.children.iter().enumerate() {
                for (k, child) in row.iter().enumerate() {
                    if let Some(w) = child {
                        let e = arena.edge(node.state, b, k);
                        memory[*w] = profile
                            .strategies
                            .iter()
                            .zip(&memory[v])
                            .map(|(s, &m)| s.memory.next(m, e))
                            .collect();
                    }
                }
            }
        }
        Ok(choices)
    }

    /// The profile of the class as finite-memory strategies on the arena.
    pub fn profile(&self, choices: &[ActionId]) -> StrategyProfile {
        let arena = &self.game.arena;
        match &self.space {
            Space::Arena => {
                let table: Vec<ActionId> = (0..arena.num_states()).map(|s| self.choice(choices, s)).collect();
                StrategyProfile::positional(arena, &table)
            }
            Space::Product(model) => {
                let policy: Vec<ActionId> = (0..model.num_nodes())
                    .map(|p| {
                        model
                            .product
                            .product_action(p, self.choice(choices, p))
                            .expect("model keeps every action")
                    })
                    .collect();
                StrategyProfile::new(
                    (0..arena.num_players())
                        .map(|i| model.strategy(i, arena, &policy))
                        .collect(),
                )
            }
            Space::Tree(nodes) => {
                // Memory is the tree node; one extra sink past the horizon.
                let sink = nodes.len();
                let memory = Transducer::from_fn(arena, sink + 1, 0, |m, s, a, k| {
                    if m == sink || nodes[m].state != s {
                        return sink;
                    }
                    nodes[m].children[a][k].unwrap_or(sink)
                });
                let memory = Arc::new(memory);
                StrategyProfile::new(
                    (0..arena.num_players())
                        .map(|i| {
                            FiniteMemoryStrategy::new(i, arena, memory.clone(), |m, s| {
                                if m < sink && nodes[m].state == s {
                                    self.choice(choices, m)
                                } else {
                                    0
                                }
                            })
                        })
                        .collect(),
                )
            }
        }
    }
}

/// Every secure equilibrium of the game's strategy class, checked against
/// every deviation inside the class.
pub fn oracle_enumerate(game: &Game, max_profiles: usize) -> Result<OracleResult> {
    let space = ProfileSpace::new(game)?;
    let total = space
        .size()
        .filter(|&t| t <= max_profiles)
        .ok_or_else(|| Error::BoundsExceeded(format!("more than {max_profiles} profiles")))?;
    let players = game.num_players();
    // Mixed-radix place value of every decision point.
    let mut place = Vec::with_capacity(space.points.len());
    let mut acc = 1usize;
    for p in &space.points {
        place.push(acc);
        acc *= p.arity;
    }
    let owned: Vec<Vec<usize>> = (0..players)
        .map(|i| (0..space.points.len()).filter(|&k| space.points[k].controller == i).collect())
        .collect();
    let per_profile: usize = owned
        .iter()
        .map(|ks| ks.iter().map(|&k| space.points[k].arity).product::<usize>())
        .sum();
    if total.saturating_mul(per_profile) > MAX_DEVIATION_WORK {
        return Err(Error::BoundsExceeded("deviation checks".into()));
    }
    let vectors = par::try_map_range(total, |idx| space.evaluate(&space.decode(idx)))?;

    let judged = par::map_range(total, |idx| {
        let own = &vectors[idx];
        let choices = space.decode(idx);
        let mut nash = true;
        let mut secure = true;
        let mut sum_secure = true;
        let mut strongly = true;
        for i in 0..players {
            let ks = &owned[i];
            let base = idx - ks.iter().map(|&k| choices[k] * place[k]).sum::<usize>();
            let count: usize = ks.iter().map(|&k| space.points[k].arity).product();
            for mut sub in 0..count {
                let mut q = base;
                for &k in ks {
                    let arity = space.points[k].arity;
                    q += (sub % arity) * place[k];
                    sub /= arity;
                }
                let dev = &vectors[q];
                if dev[i] > own[i] {
                    nash = false;
                }
                if dev[i] != own[i] {
                    continue;
                }
                let others = || (0..players).filter(move |&j| j != i);
                let weakly_worse = others().all(|j| dev[j] <= own[j]);
                let strictly = others().any(|j| dev[j] < own[j]);
                if weakly_worse && strictly {
                    secure = false;
                }
                let s_dev: Scalar = others().map(|j| &dev[j]).sum();
                let s_own: Scalar = others().map(|j| &own[j]).sum();
                if s_dev < s_own {
                    sum_secure = false;
                }
                if strictly {
                    strongly = false;
                }
            }
        }
        let secure = nash && secure;
        let sum_secure = nash && sum_secure;
        let strongly = nash && strongly;
        let broken = (strongly && !sum_secure) || (sum_secure && !secure);
        (nash, secure, sum_secure, strongly, broken)
    });

    let mut equilibria = Vec::new();
    let mut nash_count = 0;
    let mut hierarchy_violations = 0;
    for (idx, &(nash, secure, sum_secure, strongly, broken)) in judged.iter().enumerate() {
        nash_count += nash as usize;
        hierarchy_violations += broken as usize;
        if secure {
            equilibria.push(OracleProfile {
                choices: space.decode(idx),
                payoffs: vectors[idx].clone(),
                sum_secure,
                strongly_secure: strongly,
            });
        }
    }
    Ok(OracleResult {
        class: space.class,
        points: space.points.clone(),
        profiles: total,
        nash_count,
        equilibria,
        hierarchy_violations,
    })
}

fn product_of_arities(mut arities: impl Iterator<Item = usize>, cap: usize) -> Result<usize> {
    arities
        .try_fold(1usize, |acc, a| acc.checked_mul(a).filter(|&t| t <= cap))
        .ok_or_else(|| Error::BoundsExceeded(format!("more than {cap} strategies")))
}

fn decode_over(arities: &[usize], mut index: usize) -> Vec<usize> {
    arities
        .iter()
        .map(|&a| {
            let d = index % a;
            index /= a;
            d
        })
        .collect()
}

/// `max_σ min_τ` over positional strategies of `player` and of the
/// coalition, state by state, on a discounted arena.
pub fn brute_force_discounted(
    arena: &Arena,
    rewards: &[Vec<Scalar>],
    discount: &Scalar,
    player: Player,
    cap: usize,
) -> Result<Vec<Scalar>> {
    let n = arena.num_states();
    let mine: Vec<StateId> = (0..n).filter(|&s| arena.controller(s) == player).collect();
    let theirs: Vec<StateId> = (0..n).filter(|&s| arena.controller(s) != player).collect();
    let arity = |set: &[StateId]| set.iter().map(|&s| arena.num_actions(s)).collect::<Vec<_>>();
    let (ma, ta) = (arity(&mine), arity(&theirs));
    let count_max = product_of_arities(ma.iter().copied(), cap)?;
    let count_min = product_of_arities(ta.iter().copied(), cap)?;
    if count_max.saturating_mul(count_min) > cap {
        return Err(Error::BoundsExceeded(format!("more than {cap} strategy pairs")));
    }
    let per_max = par::try_map_range(count_max, |x| {
        let mut policy = vec![0; n];
        for (&s, a) in mine.iter().zip(decode_over(&ma, x)) {
            policy[s] = a;
        }
        let mut worst: Option<Vec<Scalar>> = None;
        for y in 0..count_min {
            for (&s, a) in theirs.iter().zip(decode_over(&ta, y)) {
                policy[s] = a;
            }
            let mut matrix = vec![vec![scalar::zero(); n]; n];
            let mut rhs = Vec::with_capacity(n);
            for (s, row) in matrix.iter_mut().enumerate() {
                row[s] += scalar::one();
                for t in arena.successors(s, policy[s]) {
                    row[t.target] -= discount * &t.prob;
                }
                rhs.push(vec![rewards[s][policy[s]].clone()]);
            }
            let x: Vec<Scalar> = linalg::solve_many(matrix, rhs)?
                .into_iter()
                .map(|mut v| v.swap_remove(0))
                .collect();
            worst = Some(match worst {
                None => x,
                Some(w) => w.into_iter().zip(x).map(|(a, b)| a.min(b)).collect(),
            });
        }
        Ok::<_, Error>(worst.expect("some coalition strategy"))
    })?;
    Ok((0..n)
        .map(|s| per_max.iter().map(|v| v[s].clone()).max().unwrap())
        .collect())
}

/// `max_σ min_τ` of `player`'s payoff at the initial state over positional
/// strategies on the arena × payoff monitor product (deterministic arenas).
pub fn brute_force_product_value(game: &Game, player: Player, cap: usize) -> Result<Scalar> {
    let model = Model::new(game)?;
    if !model.is_limit() {
        return Err(Error::Unsupported("finite-range payoffs only".into()));
    }
    let arena = model.arena();
    let n = model.num_nodes();
    let mine: Vec<usize> = (0..n).filter(|&p| arena.controller(p) == player).collect();
    let theirs: Vec<usize> = (0..n).filter(|&p| arena.controller(p) != player).collect();
    let arity = |set: &[usize]| set.iter().map(|&p| arena.num_actions(p)).collect::<Vec<_>>();
    let (ma, ta) = (arity(&mine), arity(&theirs));
    let count_max = product_of_arities(ma.iter().copied(), cap)?;
    let count_min = product_of_arities(ta.iter().copied(), cap)?;
    if count_max.saturating_mul(count_min) > cap {
        return Err(Error::BoundsExceeded(format!("more than {cap} strategy pairs")));
    }
    let per_max = par::map_range(count_max, |x| {
        let mut policy = vec![0; n];
        for (&p, b) in mine.iter().zip(decode_over(&ma, x)) {
            policy[p] = b;
        }
        (0..count_min)
            .map(|y| {
                for (&p, b) in theirs.iter().zip(decode_over(&ta, y)) {
                    policy[p] = b;
                }
                let mut seen = vec![false; n];
                let mut p = model.root();
                while !seen[p] {
                    seen[p] = true;
                    p = arena.successors(p, policy[p])[0].target;
                }
                game.limit_payoffs(model.product.memory(p))[player].clone()
            })
            .min()
            .unwrap()
    });
    Ok(per_max.into_iter().max().unwrap())
}

/// Payoff vectors of all positional deviations of `player` on the product
/// of the arena with the other strategies' memories and the payoff monitor.
pub fn positional_deviation_payoffs(
    game: &Game,
    profile: &StrategyProfile,
    player: Player,
    cap: usize,
) -> Result<Vec<Vec<Scalar>>> {
    let dev = joint_product(game, profile, Some(player))?;
    let n = dev.arena.num_states();
    let free: Vec<usize> = (0..n).filter(|&p| dev.arena.num_actions(p) > 1).collect();
    let arities: Vec<usize> = free.iter().map(|&p| dev.arena.num_actions(p)).collect();
    let count = product_of_arities(arities.iter().copied(), cap)?;
    let base = &game.arena;
    par::try_map_range(count, |x| {
        let mut policy = vec![0; n];
        for (&p, b) in free.iter().zip(decode_over(&arities, x)) {
            policy[p] = b;
        }
        let memory = Transducer::from_fn(base, n, 0, |m, s, a, k| {
            if dev.base_state(m) != s {
                return m;
            }
            match dev.product_action(m, a) {
                Some(b) => dev.arena.successors(m, b)[k].target,
                None => m,
            }
        });
        let strategy = FiniteMemoryStrategy::new(player, base, Arc::new(memory), |m, s| {
            if dev.base_state(m) == s {
                dev.action_origin[m][policy[m]]
            } else {
                0
            }
        });
        expected_payoffs(game, &profile.with_deviation(strategy))
    })
}

/// Best positional deviation value, and the least opponents' sum among
/// deviations attaining it.
pub fn brute_force_lexi(
    game: &Game,
    profile: &StrategyProfile,
    player: Player,
    cap: usize,
) -> Result<(Scalar, Scalar)> {
    let all = positional_deviation_payoffs(game, profile, player, cap)?;
    let best = all.iter().map(|v| v[player].clone()).max().unwrap();
    let sum = all
        .iter()
        .filter(|v| v[player] == best)
        .map(|v| {
            v.iter()
                .enumerate()
                .filter(|&(j, _)| j != player)
                .map(|(_, x)| x)
                .sum::<Scalar>()
        })
        .min()
        .unwrap();
    Ok((best, sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::tests::det;
    use crate::arena::State;
    use crate::payoff::PayoffSpec;
    use crate::scalar::int;

    fn remark_game() -> Game {
        let absorbing = |name: &str, s| State {
            name: name.into(),
            controller: 0,
            actions: vec![det(s, "stay")],
        };
        let arena = Arena::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                State {
                    name: "s".into(),
                    controller: 0,
                    actions: vec![det(1, "left"), det(2, "right")],
                },
                absorbing("l", 1),
                absorbing("r", 2),
            ],
            0,
        )
        .unwrap();
        let left = [1, 2, 0];
        let right = [1, 0, 2];
        let specs = (0..3)
            .map(|i| PayoffSpec::ReachedSet {
                targets: vec![vec![1], vec![2]],
                values: vec![int(0), int(left[i]), int(right[i]), int(0)],
            })
            .collect();
        Game::new(arena, specs).unwrap()
    }

    #[test]
    fn both_choices_are_secure() {
        let r = oracle_enumerate(&remark_game(), DEFAULT_MAX_PROFILES).unwrap();
        assert_eq!(r.profiles, 2);
        assert_eq!(
            r.payoff_set(),
            vec![vec![int(1), int(0), int(2)], vec![int(1), int(2), int(0)]]
        );
        assert!(r.equilibria.iter().all(|e| e.sum_secure && !e.strongly_secure));
        assert_eq!(r.hierarchy_violations, 0);
    }

    #[test]
    fn single_profile_is_secure() {
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
        let game = Game::new(
            arena,
            vec![PayoffSpec::FiniteHorizon {
                horizon: 2,
                rewards: vec![vec![vec![int(1)]]; 2],
            }],
        )
        .unwrap();
        let r = oracle_enumerate(&game, 10).unwrap();
        assert_eq!(r.profiles, 1);
        assert_eq!(r.equilibria[0].payoffs, vec![int(2)]);
    }

    #[test]
    fn class_profiles_evaluate_consistently() {
        let game = remark_game();
        let space = ProfileSpace::new(&game).unwrap();
        for idx in 0..space.size().unwrap() {
            let choices = space.decode(idx);
            assert_eq!(
                space.evaluate(&choices).unwrap(),
                expected_payoffs(&game, &space.profile(&choices)).unwrap()
            );
        }
    }
}
