//! TOML documents for games, profiles and reports.
//!
//! ```toml
//! players = ["alice", "bob"]
//! initial = "s"
//!
//! [[states]]
//! name = "s"
//! controller = "alice"
//! actions = [
//!     { name = "go", transitions = [["t", "1/3"], ["s", "2/3"]] },
//! ]
//!
//! [[payoffs]]
//! player = "alice"
//! family = "discounted"
//! discount = "1/2"
//! rewards = [{ state = "s", action = "go", value = "1" }]
//! ```
//!
//! Numbers are exact rationals written as strings (`"3"`, `"-1/4"`).
//! Reward entries not listed are zero. Reached-set values are indexed by
//! the bitmask of reached labels. A `[profile]` section lists memory
//! transducers (entries `[memory, state, action, target, next]`; unlisted
//! transitions keep the memory) and per-player choice tables (entries
//! `[memory, state, action]`; unlisted choices are the first action).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arena::{Action, Arena, Player, State, StateId, Transition};
use crate::error::{Error, Result};
use crate::payoff::{Game, PayoffSpec};
use crate::scalar::{self, Scalar};
use crate::strategy::{FiniteMemoryStrategy, StrategyProfile, Transducer};
use crate::delta::{DeltaParams, TransformedPayoffs};
use crate::eliminate::{EliminationTrace, Phi};
use crate::model::Model;
use crate::oracle::OracleResult;
use crate::payoff::{Track, NOT_HIT};
use crate::verify::{Check, EquilibriumReport, Witness};

/// A game with an optional profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameDocument {
    pub game: Game,
    pub profile: Option<StrategyProfile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocFile {
    players: Vec<String>,
    initial: String,
    states: Vec<StateDoc>,
    payoffs: Vec<PayoffDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<ProfileDoc>,
    /// Reports written next to a profile are ignored on input.
    #[allow(dead_code)]
    #[serde(default, skip_serializing)]
    report: Option<toml::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    name: String,
    controller: String,
    actions: Vec<ActionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionDoc {
    name: String,
    transitions: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RewardDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<u32>,
    state: String,
    action: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum PayoffDoc {
    Discounted {
        player: String,
        discount: String,
        #[serde(default)]
        rewards: Vec<RewardDoc>,
    },
    FiniteHorizon {
        player: String,
        horizon: u32,
        #[serde(default)]
        rewards: Vec<RewardDoc>,
    },
    ReachedSet {
        player: String,
        targets: Vec<Vec<String>>,
        values: Vec<String>,
    },
    CappedHitting {
        player: String,
        target: Vec<String>,
        cap: u32,
        values: Vec<String>,
        unreached: String,
    },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemoryDoc {
    size: usize,
    initial: usize,
    #[serde(default)]
    update: Vec<(usize, String, String, String, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyDoc {
    player: String,
    memory: usize,
    #[serde(default)]
    choices: Vec<(usize, String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    memories: Vec<MemoryDoc>,
    strategies: Vec<StrategyDoc>,
}

fn syntax(text: &str, err: toml::de::Error) -> Error {
    let offset = err.span().map_or(0, |s| s.start).min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Error::Syntax {
        line,
        column,
        message: err.message().to_string(),
    }
}

fn number(text: &str, what: &str) -> Result<Scalar> {
    scalar::parse(text).ok_or_else(|| Error::Document(format!("{what}: `{text}` is not a rational")))
}

/// Name lookups for one arena.
struct Names<'a> {
    arena: &'a Arena,
    players: HashMap<&'a str, Player>,
    states: HashMap<&'a str, StateId>,
}

impl<'a> Names<'a> {
    fn new(arena: &'a Arena) -> Self {
        Names {
            arena,
            players: arena.players().iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect(),
            states: arena.states().iter().enumerate().map(|(s, st)| (st.name.as_str(), s)).collect(),
        }
    }

    fn player(&self, name: &str) -> Result<Player> {
        self.players
            .get(name)
            .copied()
            .ok_or_else(|| Error::Document(format!("unknown player `{name}`")))
    }

    fn state(&self, name: &str) -> Result<StateId> {
        self.states
            .get(name)
            .copied()
            .ok_or_else(|| Error::Document(format!("unknown state `{name}`")))
    }

    fn action(&self, s: StateId, name: &str) -> Result<usize> {
        self.arena
            .state(s)
            .actions
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Document(format!("state `{}` has no action `{name}`", self.arena.state(s).name)))
    }

    fn successor(&self, s: StateId, a: usize, target: &str) -> Result<usize> {
        let t = self.state(target)?;
        self.arena.successor_index(s, a, t).ok_or_else(|| {
            Error::Document(format!(
                "action `{}` of `{}` cannot move to `{target}`",
                self.arena.state(s).actions[a].name,
                self.arena.state(s).name
            ))
        })
    }
}

fn unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Document(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

fn build_arena(doc: &DocFile) -> Result<Arena> {
    unique(&doc.players, "player")?;
    let names: Vec<String> = doc.states.iter().map(|s| s.name.clone()).collect();
    unique(&names, "state")?;
    let player = |n: &str| {
        doc.players
            .iter()
            .position(|p| p == n)
            .ok_or_else(|| Error::Document(format!("unknown player `{n}`")))
    };
    let state = |n: &str| {
        names
            .iter()
            .position(|s| s == n)
            .ok_or_else(|| Error::Document(format!("unknown state `{n}`")))
    };
    let mut states = Vec::with_capacity(doc.states.len());
    for st in &doc.states {
        let actions: Vec<String> = st.actions.iter().map(|a| a.name.clone()).collect();
        unique(&actions, &format!("action of `{}`", st.name))?;
        let mut out = Vec::new();
        for a in &st.actions {
            let successors = a
                .transitions
                .iter()
                .map(|(t, p)| {
                    Ok(Transition {
                        target: state(t)?,
                        prob: number(p, &format!("probability in `{}`/`{}`", st.name, a.name))?,
                    })
                })
                .collect::<Result<_>>()?;
            out.push(Action {
                name: a.name.clone(),
                successors,
            });
        }
        states.push(State {
            name: st.name.clone(),
            controller: player(&st.controller)?,
            actions: out,
        });
    }
    Arena::new(doc.players.clone(), states, state(&doc.initial)?)
}

fn reward_table(names: &Names, entries: &[RewardDoc]) -> Result<Vec<Vec<Scalar>>> {
    let arena = names.arena;
    let mut table = crate::payoff::zero_rewards(arena);
    for e in entries {
        let s = names.state(&e.state)?;
        let a = names.action(s, &e.action)?;
        table[s][a] = number(&e.value, "reward")?;
    }
    Ok(table)
}

fn build_payoffs(names: &Names, docs: &[PayoffDoc]) -> Result<Vec<PayoffSpec>> {
    let arena = names.arena;
    let mut specs: Vec<Option<PayoffSpec>> = vec![None; arena.num_players()];
    let states = |list: &[String]| list.iter().map(|n| names.state(n)).collect::<Result<Vec<_>>>();
    let numbers = |list: &[String]| list.iter().map(|v| number(v, "payoff value")).collect::<Result<Vec<_>>>();
    for doc in docs {
        let (player, spec) = match doc {
            PayoffDoc::Discounted {
                player,
                discount,
                rewards,
            } => (
                player,
                PayoffSpec::Discounted {
                    rewards: reward_table(names, rewards)?,
                    discount: number(discount, "discount")?,
                },
            ),
            PayoffDoc::FiniteHorizon {
                player,
                horizon,
                rewards,
            } => {
                let mut by_period: Vec<Vec<RewardDoc>> = (0..*horizon).map(|_| Vec::new()).collect();
                for r in rewards {
                    let t = r
                        .period
                        .ok_or_else(|| Error::Document("finite-horizon reward without period".into()))?;
                    let slot = by_period
                        .get_mut(t as usize)
                        .ok_or_else(|| Error::Document(format!("period {t} is past the horizon")))?;
                    slot.push(RewardDoc {
                        period: None,
                        state: r.state.clone(),
                        action: r.action.clone(),
                        value: r.value.clone(),
                    });
                }
                let rewards = by_period
                    .iter()
                    .map(|entries| reward_table(names, entries))
                    .collect::<Result<_>>()?;
                (
                    player,
                    PayoffSpec::FiniteHorizon {
                        horizon: *horizon,
                        rewards,
                    },
                )
            }
            PayoffDoc::ReachedSet {
                player,
                targets,
                values,
            } => (
                player,
                PayoffSpec::ReachedSet {
                    targets: targets.iter().map(|t| states(t)).collect::<Result<_>>()?,
                    values: numbers(values)?,
                },
            ),
            PayoffDoc::CappedHitting {
                player,
                target,
                cap,
                values,
                unreached,
            } => (
                player,
                PayoffSpec::CappedHitting {
                    target: states(target)?,
                    cap: *cap,
                    values: numbers(values)?,
                    unreached: number(unreached, "unreached value")?,
                },
            ),
        };
        let i = names.player(player)?;
        if specs[i].replace(spec).is_some() {
            return Err(Error::Document(format!("two payoffs for player `{player}`")));
        }
    }
    specs
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Document(format!("no payoff for player `{}`", arena.players()[i]))))
        .collect()
}

fn build_memory(names: &Names, doc: &MemoryDoc) -> Result<Transducer> {
    if doc.size == 0 || doc.initial >= doc.size {
        return Err(Error::Document("memory initial value out of range".into()));
    }
    let mut table: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    for (m, s, a, t, next) in &doc.update {
        if *m >= doc.size || *next >= doc.size {
            return Err(Error::Document(format!("memory value out of range in update from {m}")));
        }
        let s = names.state(s)?;
        let a = names.action(s, a)?;
        let k = names.successor(s, a, t)?;
        table.insert((*m, s, a, k), *next);
    }
    Ok(Transducer::from_fn(names.arena, doc.size, doc.initial, |m, s, a, k| {
        table.get(&(m, s, a, k)).copied().unwrap_or(m)
    }))
}

fn build_strategy(names: &Names, player: Player, memory: Arc<Transducer>, choices: &[(usize, String, String)]) -> Result<FiniteMemoryStrategy> {
    let mut table: HashMap<(usize, StateId), usize> = HashMap::new();
    for (m, s, a) in choices {
        if *m >= memory.size() {
            return Err(Error::Document(format!("memory value {m} out of range in choices")));
        }
        let s = names.state(s)?;
        if names.arena.controller(s) != player {
            return Err(Error::Document(format!(
                "player `{}` chooses at `{}`, which it does not control",
                names.arena.players()[player],
                names.arena.state(s).name
            )));
        }
        table.insert((*m, s), names.action(s, a)?);
    }
    Ok(FiniteMemoryStrategy::new(player, names.arena, memory, |m, s| {
        table.get(&(m, s)).copied().unwrap_or(0)
    }))
}

fn build_profile(names: &Names, doc: &ProfileDoc) -> Result<StrategyProfile> {
    let memories: Vec<Arc<Transducer>> = doc
        .memories
        .iter()
        .map(|m| build_memory(names, m).map(Arc::new))
        .collect::<Result<_>>()?;
    let mut strategies: Vec<Option<FiniteMemoryStrategy>> = vec![None; names.arena.num_players()];
    for s in &doc.strategies {
        let i = names.player(&s.player)?;
        let memory = memories
            .get(s.memory)
            .cloned()
            .ok_or_else(|| Error::Document(format!("unknown memory {}", s.memory)))?;
        if strategies[i].replace(build_strategy(names, i, memory, &s.choices)?).is_some() {
            return Err(Error::Document(format!("two strategies for player `{}`", s.player)));
        }
    }
    let strategies = strategies
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Document(format!("no strategy for player `{}`", names.arena.players()[i]))))
        .collect::<Result<_>>()?;
    let profile = StrategyProfile::new(strategies);
    profile.validate(names.arena)?;
    Ok(profile)
}

pub fn parse_document(text: &str) -> Result<GameDocument> {
    let doc: DocFile = toml::from_str(text).map_err(|e| syntax(text, e))?;
    let arena = build_arena(&doc)?;
    let names = Names::new(&arena);
    let payoffs = build_payoffs(&names, &doc.payoffs)?;
    let profile = doc.profile.as_ref().map(|p| build_profile(&names, p)).transpose()?;
    Ok(GameDocument {
        game: Game::new(arena, payoffs)?,
        profile,
    })
}

fn reward_docs(arena: &Arena, table: &[Vec<Scalar>], period: Option<u32>) -> Vec<RewardDoc> {
    let mut out = Vec::new();
    for (s, row) in table.iter().enumerate() {
        for (a, v) in row.iter().enumerate() {
            if *v != scalar::zero() {
                out.push(RewardDoc {
                    period,
                    state: arena.state(s).name.clone(),
                    action: arena.state(s).actions[a].name.clone(),
                    value: scalar::format(v),
                });
            }
        }
    }
    out
}

fn memory_doc(arena: &Arena, t: &Transducer) -> MemoryDoc {
    let mut update = Vec::new();
    for m in 0..t.size() {
        for s in 0..arena.num_states() {
            for a in 0..arena.num_actions(s) {
                for (k, tr) in arena.successors(s, a).iter().enumerate() {
                    let next = t.next(m, arena.edge(s, a, k));
                    if next != m {
                        let st = arena.state(s);
                        update.push((m, st.name.clone(), st.actions[a].name.clone(), arena.state(tr.target).name.clone(), next));
                    }
                }
            }
        }
    }
    MemoryDoc {
        size: t.size(),
        initial: t.initial(),
        update,
    }
}

fn choice_docs(arena: &Arena, strategy: &FiniteMemoryStrategy) -> Vec<(usize, String, String)> {
    let mut out = Vec::new();
    for m in 0..strategy.memory.size() {
        for s in 0..arena.num_states() {
            if arena.controller(s) != strategy.owner {
                continue;
            }
            let a = strategy.action(m, s);
            if a != 0 {
                let st = arena.state(s);
                out.push((m, st.name.clone(), st.actions[a].name.clone()));
            }
        }
    }
    out
}

fn profile_doc(arena: &Arena, profile: &StrategyProfile) -> ProfileDoc {
    let (memories, reader) = profile.memories();
    ProfileDoc {
        memories: memories.iter().map(|t| memory_doc(arena, t)).collect(),
        strategies: profile
            .strategies
            .iter()
            .enumerate()
            .map(|(i, s)| StrategyDoc {
                player: arena.players()[i].clone(),
                memory: reader[i],
                choices: choice_docs(arena, s),
            })
            .collect(),
    }
}

fn doc_file(doc: &GameDocument) -> DocFile {
    let arena = &doc.game.arena;
    let name = |s: StateId| arena.state(s).name.clone();
    let players = arena.players();
    DocFile {
        players: players.to_vec(),
        initial: name(arena.initial()),
        states: arena
            .states()
            .iter()
            .map(|st| StateDoc {
                name: st.name.clone(),
                controller: players[st.controller].clone(),
                actions: st
                    .actions
                    .iter()
                    .map(|a| ActionDoc {
                        name: a.name.clone(),
                        transitions: a
                            .successors
                            .iter()
                            .map(|t| (name(t.target), scalar::format(&t.prob)))
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
        payoffs: doc
            .game
            .payoffs
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let player = players[i].clone();
                let names = |set: &[StateId]| set.iter().map(|&s| name(s)).collect::<Vec<_>>();
                let texts = |vals: &[Scalar]| vals.iter().map(scalar::format).collect::<Vec<_>>();
                match spec {
                    PayoffSpec::Discounted { rewards, discount } => PayoffDoc::Discounted {
                        player,
                        discount: scalar::format(discount),
                        rewards: reward_docs(arena, rewards, None),
                    },
                    PayoffSpec::FiniteHorizon { horizon, rewards } => PayoffDoc::FiniteHorizon {
                        player,
                        horizon: *horizon,
                        rewards: rewards
                            .iter()
                            .enumerate()
                            .flat_map(|(t, table)| reward_docs(arena, table, Some(t as u32)))
                            .collect(),
                    },
                    PayoffSpec::ReachedSet { targets, values } => PayoffDoc::ReachedSet {
                        player,
                        targets: targets.iter().map(|t| names(t)).collect(),
                        values: texts(values),
                    },
                    PayoffSpec::CappedHitting {
                        target,
                        cap,
                        values,
                        unreached,
                    } => PayoffDoc::CappedHitting {
                        player,
                        target: names(target),
                        cap: *cap,
                        values: texts(values),
                        unreached: scalar::format(unreached),
                    },
                }
            })
            .collect(),
        profile: doc.profile.as_ref().map(|p| profile_doc(arena, p)),
        report: None,
    }
}

pub fn serialize_document(doc: &GameDocument) -> String {
    toml::to_string(&doc_file(doc)).expect("documents serialize")
}

#[derive(Serialize)]
struct WitnessDoc {
    player: String,
    payoffs: Vec<String>,
    memory: MemoryDoc,
    choices: Vec<(usize, String, String)>,
}

#[derive(Serialize)]
struct CheckDoc {
    holds: bool,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessDoc>,
}

#[derive(Serialize)]
struct ReportDoc {
    payoffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
    nash: CheckDoc,
    secure: CheckDoc,
    sum_secure: CheckDoc,
    strongly_secure: CheckDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    weighted_secure: Option<CheckDoc>,
}

fn texts(values: &[Scalar]) -> Vec<String> {
    values.iter().map(scalar::format).collect()
}

fn witness_doc(arena: &Arena, w: &Witness) -> WitnessDoc {
    WitnessDoc {
        player: arena.players()[w.player].clone(),
        payoffs: texts(&w.payoffs),
        memory: memory_doc(arena, &w.strategy.memory),
        choices: choice_docs(arena, &w.strategy),
    }
}

fn check_doc(arena: &Arena, c: &Check) -> CheckDoc {
    CheckDoc {
        holds: c.holds,
        exact: c.exact,
        witness: c.witness.as_ref().map(|w| witness_doc(arena, w)),
    }
}

/// The report as a TOML document (the `report` table).
pub fn report_structured(arena: &Arena, report: &EquilibriumReport) -> String {
    #[derive(Serialize)]
    struct Wrapper {
        report: ReportDoc,
    }
    let doc = ReportDoc {
        payoffs: texts(&report.payoffs),
        weights: report.weighted_secure.as_ref().map(|(w, _)| texts(w)),
        nash: check_doc(arena, &report.nash),
        secure: check_doc(arena, &report.secure),
        sum_secure: check_doc(arena, &report.sum_secure),
        strongly_secure: check_doc(arena, &report.strongly_secure),
        weighted_secure: report.weighted_secure.as_ref().map(|(_, c)| check_doc(arena, c)),
    };
    toml::to_string(&Wrapper { report: doc }).expect("reports serialize")
}

/// One line per check, witnesses summarized by player and payoffs.
pub fn report_text(arena: &Arena, report: &EquilibriumReport) -> String {
    let vector = |v: &[Scalar]| format!("({})", texts(v).join(", "));
    let mut out = format!("payoffs {}\n", vector(&report.payoffs));
    let mut line = |name: &str, c: &Check| {
        let verdict = if c.holds { "holds" } else { "fails" };
        out.push_str(&format!("{name:<16} {verdict}"));
        if !c.exact {
            out.push_str(" (positional deviations only)");
        }
        if let Some(w) = &c.witness {
            out.push_str(&format!(
                ": {} deviates to {}",
                arena.players()[w.player],
                vector(&w.payoffs)
            ));
        }
        out.push('\n');
    };
    line("nash", &report.nash);
    line("secure", &report.secure);
    line("sum_secure", &report.sum_secure);
    line("strongly_secure", &report.strongly_secure);
    if let Some((w, c)) = &report.weighted_secure {
        line(&format!("weighted {}", vector(w)), c);
    }
    out
}

/// Readable name of a model node: the state, with the period for
/// finite horizons and the monitor value for finite-range payoffs.
pub fn node_name(game: &Game, model: &Model, p: usize) -> String {
    let state = &game.arena.state(model.base_state(p)).name;
    match (&model.memory, &model.horizon) {
        (None, _) => state.clone(),
        (Some(_), Some(_)) => format!("{state}@{}", model.product.memory(p).clock),
        (Some(_), None) => format!("{state}{}", track_name(model.product.memory(p))),
    }
}

fn track_name(t: &Track) -> String {
    let hits: Vec<String> = t
        .hits
        .iter()
        .map(|&h| if h == NOT_HIT { "-".into() } else { h.to_string() })
        .collect();
    format!("[reached={:b} hits={}]", t.reached, hits.join(","))
}

#[derive(Serialize)]
struct LevelDoc {
    index: usize,
    states: usize,
    removed: Vec<(String, String)>,
    /// Per player, the value of its zero-sum game at the initial state.
    values: Vec<String>,
}

#[derive(Serialize)]
struct TraceDoc {
    levels: Vec<LevelDoc>,
    /// Per model state, the last level it is present at (`"inf"` if all).
    phi: Vec<(String, String)>,
}

fn trace_doc(game: &Game, trace: &EliminationTrace) -> TraceDoc {
    let model = &trace.model;
    let action = |p: usize, b: usize| {
        let s = model.base_state(p);
        game.arena.state(s).actions[model.base_action(p, b)].name.clone()
    };
    TraceDoc {
        levels: trace
            .levels
            .iter()
            .map(|l| LevelDoc {
                index: l.index,
                states: l.restriction.members().count(),
                removed: if l.index == 0 {
                    Vec::new()
                } else {
                    trace
                        .removed(l.index)
                        .into_iter()
                        .map(|(p, b)| (node_name(game, model, p), action(p, b)))
                        .collect()
                },
                values: l
                    .tables
                    .iter()
                    .map(|t| scalar::format(&t.state_values[model.root()]))
                    .collect(),
            })
            .collect(),
        phi: trace
            .phi
            .iter()
            .enumerate()
            .filter(|(_, f)| **f != Phi::Unreachable)
            .map(|(p, f)| {
                let v = match f {
                    Phi::Level(k) => k.to_string(),
                    _ => "inf".into(),
                };
                (node_name(game, model, p), v)
            })
            .collect(),
    }
}

pub fn trace_structured(game: &Game, trace: &EliminationTrace) -> String {
    #[derive(Serialize)]
    struct Wrapper {
        trace: TraceDoc,
    }
    toml::to_string(&Wrapper {
        trace: trace_doc(game, trace),
    })
    .expect("traces serialize")
}

pub fn trace_text(game: &Game, trace: &EliminationTrace) -> String {
    let doc = trace_doc(game, trace);
    let mut out = String::new();
    for l in &doc.levels {
        out.push_str(&format!(
            "level {}: {} states, values ({})\n",
            l.index,
            l.states,
            l.values.join(", ")
        ));
        for (s, a) in &l.removed {
            out.push_str(&format!("  removed {s} {a}\n"));
        }
    }
    out.push_str(&format!("fixpoint reached after {} levels\n", doc.levels.len()));
    for (s, v) in &doc.phi {
        out.push_str(&format!("  phi({s}) = {v}\n"));
    }
    out
}

#[derive(Serialize)]
struct TransformDoc {
    range: Vec<String>,
    players: usize,
    r: String,
    d: String,
    delta: String,
    margin: String,
    strata: Vec<StratumDoc>,
    /// Per player, transformed reached-set values by label mask.
    #[serde(skip_serializing_if = "Option::is_none")]
    value_maps: Option<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct StratumDoc {
    monitor: String,
    original: Vec<String>,
    transformed: Vec<String>,
}

fn transform_doc(params: &DeltaParams, t: &TransformedPayoffs) -> TransformDoc {
    TransformDoc {
        range: texts(&params.range),
        players: params.players,
        r: scalar::format(&params.r),
        d: scalar::format(&params.d),
        delta: scalar::format(&params.delta),
        margin: scalar::format(&params.margin()),
        strata: t
            .strata
            .iter()
            .zip(&t.original)
            .zip(&t.transformed)
            .map(|((s, o), x)| StratumDoc {
                monitor: track_name(s),
                original: texts(o),
                transformed: texts(x),
            })
            .collect(),
        value_maps: t.specs.as_ref().map(|specs| {
            specs
                .iter()
                .filter_map(|s| match s {
                    PayoffSpec::ReachedSet { values, .. } => Some(texts(values)),
                    _ => None,
                })
                .collect()
        }),
    }
}

pub fn transform_structured(params: &DeltaParams, t: &TransformedPayoffs) -> String {
    #[derive(Serialize)]
    struct Wrapper {
        transform: TransformDoc,
    }
    toml::to_string(&Wrapper {
        transform: transform_doc(params, t),
    })
    .expect("transforms serialize")
}

pub fn transform_text(params: &DeltaParams, t: &TransformedPayoffs) -> String {
    let doc = transform_doc(params, t);
    let mut out = format!(
        "M = {{{}}}, |N| = {}, R = {}, d = {}, delta = {}\n",
        doc.range.join(", "),
        doc.players,
        doc.r,
        doc.d,
        doc.delta
    );
    for s in &doc.strata {
        out.push_str(&format!(
            "{}: ({}) -> ({})\n",
            s.monitor,
            s.original.join(", "),
            s.transformed.join(", ")
        ));
    }
    if let Some(maps) = &doc.value_maps {
        for (i, m) in maps.iter().enumerate() {
            out.push_str(&format!("value map {i}: [{}]\n", m.join(", ")));
        }
    }
    out
}

#[derive(Serialize)]
struct OracleEntryDoc {
    payoffs: Vec<String>,
    sum_secure: bool,
    strongly_secure: bool,
    /// `[state history, action]` at every decision point.
    choices: Vec<(String, String)>,
}

#[derive(Serialize)]
struct OracleDoc {
    class: String,
    profiles: usize,
    nash: usize,
    secure: usize,
    payoff_set: Vec<Vec<String>>,
    equilibria: Vec<OracleEntryDoc>,
}

fn oracle_doc(game: &Game, r: &OracleResult) -> OracleDoc {
    let arena = &game.arena;
    OracleDoc {
        class: format!("{:?}", r.class),
        profiles: r.profiles,
        nash: r.nash_count,
        secure: r.equilibria.len(),
        payoff_set: r.payoff_set().iter().map(|v| texts(v)).collect(),
        equilibria: r
            .equilibria
            .iter()
            .map(|e| OracleEntryDoc {
                payoffs: texts(&e.payoffs),
                sum_secure: e.sum_secure,
                strongly_secure: e.strongly_secure,
                choices: r
                    .points
                    .iter()
                    .zip(&e.choices)
                    .map(|(pt, &a)| {
                        let history: Vec<&str> =
                            pt.history.iter().map(|&s| arena.state(s).name.as_str()).collect();
                        (history.join(" "), arena.state(pt.state).actions[a].name.clone())
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn oracle_structured(game: &Game, r: &OracleResult) -> String {
    #[derive(Serialize)]
    struct Wrapper {
        oracle: OracleDoc,
    }
    toml::to_string(&Wrapper {
        oracle: oracle_doc(game, r),
    })
    .expect("oracle results serialize")
}

pub fn oracle_text(game: &Game, r: &OracleResult) -> String {
    let doc = oracle_doc(game, r);
    let mut out = format!(
        "{} profiles ({}), {} Nash, {} secure\n",
        doc.profiles, doc.class, doc.nash, doc.secure
    );
    for e in &doc.equilibria {
        out.push_str(&format!(
            "({}) sum_secure={} strongly_secure={}",
            e.payoffs.join(", "),
            e.sum_secure,
            e.strongly_secure
        ));
        for (h, a) in &e.choices {
            out.push_str(&format!(" [{h}: {a}]"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    const THIRDS: &str = r#"
players = ["p"]
initial = "s"

[[states]]
name = "s"
controller = "p"
actions = [{ name = "go", transitions = [["s", "1/3"], ["t", "1/3"], ["u", "1/3"]] }]

[[states]]
name = "t"
controller = "p"
actions = [{ name = "stay", transitions = [["t", "1"]] }]

[[states]]
name = "u"
controller = "p"
actions = [{ name = "stay", transitions = [["u", "1"]] }]

[[payoffs]]
player = "p"
family = "discounted"
discount = "1/2"
rewards = [{ state = "t", action = "stay", value = "3/2" }]
"#;

    #[test]
    fn exact_thirds() {
        let doc = parse_document(THIRDS).unwrap();
        let succ = doc.game.arena.successors(0, 0);
        assert_eq!(succ.len(), 3);
        assert!(succ.iter().all(|t| t.prob == ratio(1, 3)));
        match &doc.game.payoffs[0] {
            PayoffSpec::Discounted { rewards, .. } => assert_eq!(rewards[1][0], ratio(3, 2)),
            _ => panic!(),
        }
    }

    #[test]
    fn round_trip_is_stable() {
        let doc = parse_document(THIRDS).unwrap();
        let text = serialize_document(&doc);
        let again = parse_document(&text).unwrap();
        assert_eq!(again, doc);
        assert_eq!(serialize_document(&again), text);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_document("players = [\"p\"]\ninitial = \n").unwrap_err();
        match err {
            Error::Syntax { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let bad = THIRDS.replace("[\"u\", \"1/3\"]", "[\"u\", \"1/2\"]");
        assert!(matches!(parse_document(&bad), Err(Error::InvalidArena(_))));
        let bad = THIRDS.replace("controller = \"p\"\nactions = [{ name = \"go\"", "controller = \"q\"\nactions = [{ name = \"go\"");
        assert!(matches!(parse_document(&bad), Err(Error::Document(_))));
    }
}
