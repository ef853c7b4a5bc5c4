//! Exact solvers shared by the zero-sum, construction and verification code.
//!
//! Two kinds of game are handled:
//!
//! * reward games: additive rewards on `(state, action)`, either discounted
//!   with `β < 1` (strategy iteration with exact linear solves) or layered,
//!   meaning the non-terminal part is acyclic and terminal states are worth
//!   zero (backward induction);
//! * limit games on deterministic arenas: each state belongs to a stratum and
//!   a play is worth the stay value of the stratum it eventually remains in.
//!   Strata may only be left towards strata that are never re-entered.
//!
//! Every solver works on a [`Restriction`] of the arena (a state subset
//! closed under the allowed actions), and reports the lexicographically
//! smallest optimal action wherever there is a choice.

use std::collections::HashMap;

use num::Zero;

use crate::arena::{ActionId, Arena, StateId};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{self, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Max,
    Min,
}

impl Side {
    fn better(self, a: &Scalar, b: &Scalar) -> bool {
        match self {
            Side::Max => a > b,
            Side::Min => a < b,
        }
    }
}

/// Allowed states and actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub states: Vec<bool>,
    pub actions: Vec<Vec<bool>>,
}

impl Restriction {
    pub fn full(arena: &Arena) -> Self {
        Restriction {
            states: vec![true; arena.num_states()],
            actions: (0..arena.num_states())
                .map(|s| vec![true; arena.num_actions(s)])
                .collect(),
        }
    }

    /// Keeps only states reachable from `start` under the allowed actions.
    pub fn prune_from(&mut self, arena: &Arena, start: StateId) {
        let actions = &self.actions;
        let reach = arena.reachable_from(start, |s, a| actions[s][a]);
        self.states = reach;
    }

    pub fn allowed(&self, s: StateId) -> impl Iterator<Item = ActionId> + '_ {
        self.actions[s]
            .iter()
            .enumerate()
            .filter(|(_, &ok)| ok)
            .map(|(a, _)| a)
    }

    pub fn first_allowed(&self, s: StateId) -> ActionId {
        self.allowed(s).next().unwrap_or(0)
    }

    pub fn members(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, &ok)| ok)
            .map(|(s, _)| s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Horizon {
    Discounted(Scalar),
    /// Terminal flags; the non-terminal part must be acyclic.
    Layered(Vec<bool>),
}

/// Additive-reward game view over an arena.
#[derive(Clone, Copy, Debug)]
pub struct RewardGame<'a> {
    pub arena: &'a Arena,
    /// `rewards[state][action]`.
    pub rewards: &'a [Vec<Scalar>],
    pub horizon: &'a Horizon,
}

/// Values and one chosen action per allowed state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<Scalar>,
    pub policy: Vec<ActionId>,
}

impl RewardGame<'_> {
    fn terminal(&self, s: StateId) -> bool {
        match self.horizon {
            Horizon::Layered(t) => t[s],
            Horizon::Discounted(_) => false,
        }
    }

    fn factor(&self) -> Scalar {
        match self.horizon {
            Horizon::Discounted(beta) => beta.clone(),
            Horizon::Layered(_) => scalar::one(),
        }
    }

    /// `r(s,a) + β Σ_z q(s,a)(z) v(z)`; zero at terminal states.
    pub fn q_value(&self, values: &[Scalar], s: StateId, a: ActionId) -> Scalar {
        if self.terminal(s) {
            return scalar::zero();
        }
        let mut expect = scalar::zero();
        for t in self.arena.successors(s, a) {
            expect += &t.prob * &values[t.target];
        }
        &self.rewards[s][a] + self.factor() * expect
    }

    /// Values of a stationary policy on the restricted states.
    pub fn evaluate(&self, restr: &Restriction, policy: &[ActionId]) -> Result<Vec<Scalar>> {
        match self.horizon {
            Horizon::Discounted(beta) => self.evaluate_discounted(beta, restr, policy),
            Horizon::Layered(_) => {
                let order = self.layer_order(restr)?;
                let mut values = vec![scalar::zero(); self.arena.num_states()];
                for &s in order.iter().rev() {
                    values[s] = self.q_value(&values, s, policy[s]);
                }
                Ok(values)
            }
        }
    }

    fn evaluate_discounted(
        &self,
        beta: &Scalar,
        restr: &Restriction,
        policy: &[ActionId],
    ) -> Result<Vec<Scalar>> {
        let members: Vec<StateId> = restr.members().collect();
        let mut pos = vec![usize::MAX; self.arena.num_states()];
        for (k, &s) in members.iter().enumerate() {
            pos[s] = k;
        }
        let n = members.len();
        let mut matrix = vec![vec![scalar::zero(); n]; n];
        let mut rhs = Vec::with_capacity(n);
        for (row, &s) in members.iter().enumerate() {
            let a = policy[s];
            matrix[row][row] += scalar::one();
            for t in self.arena.successors(s, a) {
                let col = pos[t.target];
                if col == usize::MAX {
                    return Err(Error::Inconsistent(
                        "restriction is not closed under its actions".into(),
                    ));
                }
                matrix[row][col] -= beta * &t.prob;
            }
            rhs.push(self.rewards[s][a].clone());
        }
        let x = linalg::solve(matrix, rhs)?;
        let mut values = vec![scalar::zero(); self.arena.num_states()];
        for (k, &s) in members.iter().enumerate() {
            values[s] = x[k].clone();
        }
        Ok(values)
    }

    /// Non-terminal restricted states in topological order.
    fn layer_order(&self, restr: &Restriction) -> Result<Vec<StateId>> {
        let n = self.arena.num_states();
        // 0 = unseen, 1 = on stack, 2 = done
        let mut mark = vec![0u8; n];
        let mut post = Vec::new();
        for root in restr.members() {
            if mark[root] != 0 || self.terminal(root) {
                continue;
            }
            let mut stack: Vec<(StateId, Vec<StateId>)> = vec![(root, self.children(restr, root))];
            mark[root] = 1;
            while let Some((s, children)) = stack.last_mut() {
                if let Some(c) = children.pop() {
                    match mark[c] {
                        0 => {
                            mark[c] = 1;
                            let grandchildren = self.children(restr, c);
                            stack.push((c, grandchildren));
                        }
                        1 => {
                            return Err(Error::Inconsistent(
                                "layered game has a cycle outside its terminal states".into(),
                            ))
                        }
                        _ => {}
                    }
                } else {
                    let s = *s;
                    mark[s] = 2;
                    post.push(s);
                    stack.pop();
                }
            }
        }
        post.reverse();
        Ok(post)
    }

    fn children(&self, restr: &Restriction, s: StateId) -> Vec<StateId> {
        restr
            .allowed(s)
            .flat_map(|a| self.arena.successors(s, a).iter().map(|t| t.target))
            .filter(|&t| !self.terminal(t))
            .collect()
    }

    /// Optimal values and positional strategies for a two-sided game in
    /// which `sides[s]` says who picks the action at `s`.
    pub fn solve(&self, restr: &Restriction, sides: &[Side]) -> Result<Solution> {
        let values = match self.horizon {
            Horizon::Layered(_) => {
                let order = self.layer_order(restr)?;
                let mut values = vec![scalar::zero(); self.arena.num_states()];
                for &s in order.iter().rev() {
                    let side = sides[s];
                    let mut best: Option<Scalar> = None;
                    for a in restr.allowed(s) {
                        let q = self.q_value(&values, s, a);
                        if best.as_ref().is_none_or(|b| side.better(&q, b)) {
                            best = Some(q);
                        }
                    }
                    values[s] = best.unwrap_or_else(scalar::zero);
                }
                values
            }
            Horizon::Discounted(_) => self.strategy_iteration(restr, sides)?,
        };
        let policy = self.greedy(restr, sides, &values);
        Ok(Solution { values, policy })
    }

    /// Smallest action attaining the optimum of `values` at every state.
    pub fn greedy(&self, restr: &Restriction, sides: &[Side], values: &[Scalar]) -> Vec<ActionId> {
        let mut policy = vec![0; self.arena.num_states()];
        for s in restr.members() {
            let side = sides[s];
            let mut best: Option<(ActionId, Scalar)> = None;
            for a in restr.allowed(s) {
                let q = self.q_value(values, s, a);
                if best.as_ref().is_none_or(|(_, b)| side.better(&q, b)) {
                    best = Some((a, q));
                }
            }
            policy[s] = best.map(|(a, _)| a).unwrap_or(0);
        }
        policy
    }

    /// Actions attaining `values[s]` under the controller's objective.
    pub fn conserving(&self, restr: &Restriction, values: &[Scalar]) -> Restriction {
        let mut out = restr.clone();
        for s in restr.members() {
            for a in restr.allowed(s) {
                if self.q_value(values, s, a) != values[s] {
                    out.actions[s][a] = false;
                }
            }
        }
        out
    }

    fn strategy_iteration(&self, restr: &Restriction, sides: &[Side]) -> Result<Vec<Scalar>> {
        let mut policy: Vec<ActionId> = (0..self.arena.num_states())
            .map(|s| restr.first_allowed(s))
            .collect();
        loop {
            let values = self.improve_side(restr, sides, Side::Min, &mut policy)?;
            let mut changed = false;
            for s in restr.members().filter(|&s| sides[s] == Side::Max) {
                if let Some(a) = self.strict_improvement(restr, Side::Max, &values, s, policy[s]) {
                    policy[s] = a;
                    changed = true;
                }
            }
            if !changed {
                return Ok(values);
            }
        }
    }

    /// Policy iteration for the states of one side, the others fixed.
    fn improve_side(
        &self,
        restr: &Restriction,
        sides: &[Side],
        side: Side,
        policy: &mut [ActionId],
    ) -> Result<Vec<Scalar>> {
        loop {
            let values = self.evaluate(restr, policy)?;
            let mut changed = false;
            for s in restr.members().filter(|&s| sides[s] == side) {
                if let Some(a) = self.strict_improvement(restr, side, &values, s, policy[s]) {
                    policy[s] = a;
                    changed = true;
                }
            }
            if !changed {
                return Ok(values);
            }
        }
    }

    fn strict_improvement(
        &self,
        restr: &Restriction,
        side: Side,
        values: &[Scalar],
        s: StateId,
        current: ActionId,
    ) -> Option<ActionId> {
        let mut best = self.q_value(values, s, current);
        let mut choice = None;
        for a in restr.allowed(s) {
            let q = self.q_value(values, s, a);
            if side.better(&q, &best) {
                best = q;
                choice = Some(a);
            }
        }
        choice
    }
}

/// Limit-payoff view over a deterministic arena.
#[derive(Clone, Copy, Debug)]
pub struct LimitGame<'a> {
    pub arena: &'a Arena,
    pub stratum: &'a [usize],
    /// Stay value per stratum.
    pub stay: &'a [Scalar],
}

#[derive(Clone)]
enum Edge {
    Internal(StateId),
    Exit(Scalar),
}

impl LimitGame<'_> {
    fn target(&self, s: StateId, a: ActionId) -> StateId {
        self.arena.successors(s, a)[0].target
    }

    /// Strata of the restricted states, ordered so that every stratum comes
    /// after all strata it can exit to.
    fn strata_order(&self, restr: &Restriction) -> Result<Vec<Vec<StateId>>> {
        let mut groups: HashMap<usize, Vec<StateId>> = HashMap::new();
        for s in restr.members() {
            groups.entry(self.stratum[s]).or_default().push(s);
        }
        let mut succ: HashMap<usize, Vec<usize>> = HashMap::new();
        for s in restr.members() {
            for a in restr.allowed(s) {
                let t = self.target(s, a);
                if self.stratum[t] != self.stratum[s] {
                    succ.entry(self.stratum[s]).or_default().push(self.stratum[t]);
                }
            }
        }
        let mut keys: Vec<usize> = groups.keys().copied().collect();
        keys.sort_unstable();
        let mut mark: HashMap<usize, u8> = HashMap::new();
        let mut order = Vec::new();
        for &root in &keys {
            if mark.contains_key(&root) {
                continue;
            }
            let mut stack = vec![(root, succ.get(&root).cloned().unwrap_or_default())];
            mark.insert(root, 1);
            while let Some((k, children)) = stack.last_mut() {
                if let Some(c) = children.pop() {
                    match mark.get(&c) {
                        None => {
                            mark.insert(c, 1);
                            let next = succ.get(&c).cloned().unwrap_or_default();
                            stack.push((c, next));
                        }
                        Some(1) => {
                            return Err(Error::Inconsistent("strata are not monotone".into()))
                        }
                        _ => {}
                    }
                } else {
                    let k = *k;
                    mark.insert(k, 2);
                    order.push(k);
                    stack.pop();
                }
            }
        }
        Ok(order.into_iter().map(|k| groups.remove(&k).unwrap()).collect())
    }

    /// Optimal values and positional strategies, `sides[s]` choosing at `s`.
    pub fn solve(&self, restr: &Restriction, sides: &[Side]) -> Result<Solution> {
        if !self.arena.is_deterministic() {
            return Err(Error::NotDeterministic);
        }
        let n = self.arena.num_states();
        let mut values: Vec<Option<Scalar>> = vec![None; n];
        let mut policy = vec![0; n];
        for members in self.strata_order(restr)? {
            let stay = self.stay[self.stratum[members[0]]].clone();
            let stay = &stay;
            let mut local = vec![usize::MAX; n];
            for (k, &s) in members.iter().enumerate() {
                local[s] = k;
            }
            let edges: Vec<Vec<(ActionId, Edge)>> = members
                .iter()
                .map(|&s| {
                    restr
                        .allowed(s)
                        .map(|a| {
                            let t = self.target(s, a);
                            let e = if local[t] != usize::MAX {
                                Edge::Internal(local[t])
                            } else {
                                Edge::Exit(values[t].clone().expect("exit stratum solved"))
                            };
                            (a, e)
                        })
                        .collect()
                })
                .collect();
            let mut thresholds: Vec<&Scalar> = vec![stay];
            for e in edges.iter().flatten() {
                if let (_, Edge::Exit(v)) = e {
                    thresholds.push(v);
                }
            }
            thresholds.sort();
            thresholds.dedup();
            let is_max: Vec<bool> = members.iter().map(|&s| sides[s] == Side::Max).collect();

            let mut local_value: Vec<Option<usize>> = vec![None; members.len()];
            let mut games: Vec<ThresholdGame> = Vec::with_capacity(thresholds.len());
            for x in &thresholds {
                games.push(ThresholdGame::new(&edges, &is_max, stay, x));
            }
            for ti in (0..thresholds.len()).rev() {
                for v in 0..members.len() {
                    if local_value[v].is_none() && games[ti].max_wins(v) {
                        local_value[v] = Some(ti);
                    }
                }
            }
            for (v, &s) in members.iter().enumerate() {
                let ti = local_value[v].expect("lowest threshold is always won");
                values[s] = Some((*thresholds[ti]).clone());
            }
            for (v, &s) in members.iter().enumerate() {
                let ti = local_value[v].unwrap();
                policy[s] = if is_max[v] {
                    games[ti].max_choice(v, &edges[v])
                } else if ti + 1 < thresholds.len() {
                    games[ti + 1].min_choice(v, &edges[v])
                } else {
                    // Top value: anything not above it, i.e. the first action.
                    edges[v][0].0
                };
            }
        }
        let values = values
            .into_iter()
            .map(|v| v.unwrap_or_else(scalar::zero))
            .collect();
        Ok(Solution { values, policy })
    }

    /// Value of `(s, a)`: the value of its unique successor.
    pub fn action_value(&self, values: &[Scalar], s: StateId, a: ActionId) -> Scalar {
        values[self.target(s, a)].clone()
    }
}

/// Threshold game inside one stratum: does the maximizer secure at least `x`?
struct ThresholdGame {
    /// When the stay value reaches the threshold the maximizer plays safety
    /// (avoid bad exits); otherwise reachability (force a good exit).
    safety: bool,
    /// Per edge: is it a good exit (value ≥ x)? bad exit (< x)?
    good: Vec<Vec<bool>>,
    bad: Vec<Vec<bool>>,
    /// Attractor ranks: of the maximizer to good exits (reachability), or of
    /// the minimizer to bad exits (safety).
    rank: Vec<Option<usize>>,
    internal: Vec<Vec<Option<usize>>>,
}

impl ThresholdGame {
    fn new(edges: &[Vec<(ActionId, Edge)>], is_max: &[bool], stay: &Scalar, x: &Scalar) -> Self {
        let safety = stay >= x;
        let good: Vec<Vec<bool>> = edges
            .iter()
            .map(|es| {
                es.iter()
                    .map(|(_, e)| matches!(e, Edge::Exit(v) if v >= x))
                    .collect()
            })
            .collect();
        let bad: Vec<Vec<bool>> = edges
            .iter()
            .map(|es| {
                es.iter()
                    .map(|(_, e)| matches!(e, Edge::Exit(v) if v < x))
                    .collect()
            })
            .collect();
        let internal: Vec<Vec<Option<usize>>> = edges
            .iter()
            .map(|es| {
                es.iter()
                    .map(|(_, e)| match e {
                        Edge::Internal(w) => Some(*w),
                        Edge::Exit(_) => None,
                    })
                    .collect()
            })
            .collect();
        // The attracting player is the maximizer for reachability and the
        // minimizer for safety; their target edges are good resp. bad exits.
        let attracting = |v: usize| if safety { !is_max[v] } else { is_max[v] };
        let target = if safety { &bad } else { &good };
        let n = edges.len();
        let mut rank: Vec<Option<usize>> = vec![None; n];
        let mut round = 0;
        loop {
            let mut added = Vec::new();
            for v in 0..n {
                if rank[v].is_some() {
                    continue;
                }
                let hits = |k: usize| {
                    target[v][k] || internal[v][k].is_some_and(|w| rank[w].is_some_and(|r| r < round + 1))
                };
                let ok = if attracting(v) {
                    (0..edges[v].len()).any(hits)
                } else {
                    (0..edges[v].len()).all(hits)
                };
                if ok {
                    added.push(v);
                }
            }
            if added.is_empty() {
                break;
            }
            for v in added {
                rank[v] = Some(round);
            }
            round += 1;
        }
        ThresholdGame {
            safety,
            good,
            bad,
            rank,
            internal,
        }
    }

    fn max_wins(&self, v: usize) -> bool {
        if self.safety {
            self.rank[v].is_none()
        } else {
            self.rank[v].is_some()
        }
    }

    fn max_choice(&self, v: usize, edges: &[(ActionId, Edge)]) -> ActionId {
        let pick = |ok: &dyn Fn(usize) -> bool| {
            (0..edges.len())
                .find(|&k| ok(k))
                .map(|k| edges[k].0)
                .expect("winning vertex has a winning move")
        };
        if self.safety {
            pick(&|k| {
                self.good[v][k] || self.internal[v][k].is_some_and(|w| self.rank[w].is_none())
            })
        } else {
            let r = self.rank[v].unwrap();
            pick(&|k| {
                self.good[v][k] || self.internal[v][k].is_some_and(|w| self.rank[w].is_some_and(|q| q < r))
            })
        }
    }

    fn min_choice(&self, v: usize, edges: &[(ActionId, Edge)]) -> ActionId {
        let pick = |ok: &dyn Fn(usize) -> bool| {
            (0..edges.len())
                .find(|&k| ok(k))
                .map(|k| edges[k].0)
                .expect("losing vertex has a spoiling move")
        };
        if self.safety {
            let r = self.rank[v].unwrap();
            pick(&|k| {
                self.bad[v][k] || self.internal[v][k].is_some_and(|w| self.rank[w].is_some_and(|q| q < r))
            })
        } else {
            pick(&|k| self.bad[v][k] || self.internal[v][k].is_some_and(|w| self.rank[w].is_none()))
        }
    }
}

/// Sum of `weights[i] * rewards[i]` over players, per state and action.
pub fn combine_rewards(tables: &[Vec<Vec<Scalar>>], weights: &[Scalar]) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = tables[0]
        .iter()
        .map(|row| vec![scalar::zero(); row.len()])
        .collect();
    for (table, w) in tables.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (s, row) in table.iter().enumerate() {
            for (a, r) in row.iter().enumerate() {
                out[s][a] += w * r;
            }
        }
    }
    out
}
