//! Secure equilibria of deterministic finite-range games by payoff
//! transformation.
//!
//! With `M` the pooled payoff range, `R = max |m|`, `d` the smallest gap
//! between distinct values and `δ = d / (2|N|R)`, the payoffs
//! `u_i − δ Σ_{j≠i} u_j` order plays exactly as `u_i` does whenever `u_i`
//! differs, and penalize helping opponents on ties. A Nash equilibrium of
//! the transformed game, built from optimal strategies and punishment in
//! every player's zero-sum game, is therefore secure in the original game.

use num::{Signed, Zero};

use crate::arena::ActionId;
use crate::error::{Error, Result};
use crate::eval::{expected_payoffs, single_action_profile};
use crate::model::{Model, Objective};
use crate::par;
use crate::payoff::{Game, PayoffSpec, Track};
use crate::punish::{assemble_profile, build_label_automaton, LabelAutomaton, PunishmentKit};
use crate::scalar::{self, Scalar};
use crate::solve::Restriction;
use crate::strategy::StrategyProfile;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaParams {
    pub range: Vec<Scalar>,
    pub players: usize,
    /// `max_{m ∈ M} |m|`.
    pub r: Scalar,
    /// Smallest distance between distinct elements of `M`.
    pub d: Scalar,
    pub delta: Scalar,
}

impl DeltaParams {
    /// `d − δ (|N| − 1) 2R`, positive by the choice of `δ`.
    pub fn margin(&self) -> Scalar {
        let others = Scalar::from_integer((self.players as i64 - 1).into());
        &self.d - &self.delta * others * scalar::int(2) * &self.r
    }

    /// `u_i − δ Σ_{j≠i} u_j` for every `i`.
    pub fn transform(&self, payoffs: &[Scalar]) -> Vec<Scalar> {
        let total = scalar::sum(payoffs);
        payoffs
            .iter()
            .map(|u| u - &self.delta * (&total - u))
            .collect()
    }
}

/// Parameters for a range shared by `players` players.
pub fn compute_delta(range: &[Scalar], players: usize) -> Result<DeltaParams> {
    let mut range = range.to_vec();
    range.sort();
    range.dedup();
    if range.len() < 2 {
        return Err(Error::TrivialRange);
    }
    let r = range.iter().map(Signed::abs).max().unwrap();
    let d = range.windows(2).map(|w| &w[1] - &w[0]).min().unwrap();
    let n = Scalar::from_integer((players as i64).into());
    let delta = &d / (scalar::int(2) * n * &r);
    Ok(DeltaParams {
        range,
        players,
        r,
        d,
        delta,
    })
}

/// Parameters for the pooled range of a finite-range game.
pub fn compute_delta_for(game: &Game) -> Result<DeltaParams> {
    let range = game
        .pooled_range()
        .ok_or_else(|| Error::Unsupported("payoffs without a finite range".into()))?;
    compute_delta(&range, game.num_players())
}

/// Transformed payoffs as a function of the pooled monitor value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedPayoffs {
    /// Monitor values reachable from the initial state.
    pub strata: Vec<Track>,
    pub original: Vec<Vec<Scalar>>,
    pub transformed: Vec<Vec<Scalar>>,
    /// The transformed game's specs when every player has a reached-set
    /// payoff (the value maps combine pointwise over label subsets).
    pub specs: Option<Vec<PayoffSpec>>,
}

pub fn transform_payoffs(game: &Game, params: &DeltaParams) -> Result<TransformedPayoffs> {
    let model = Model::new(game)?;
    if !model.is_limit() {
        return Err(Error::Unsupported("payoffs without a finite range".into()));
    }
    let original = model.stay_vectors(game);
    let transformed = original.iter().map(|v| params.transform(v)).collect();
    Ok(TransformedPayoffs {
        strata: model.strata.clone(),
        original,
        transformed,
        specs: transformed_specs(game, params),
    })
}

/// Reached-set specs of the transformed game, if all payoffs are reached-set.
pub fn transformed_specs(game: &Game, params: &DeltaParams) -> Option<Vec<PayoffSpec>> {
    let mut targets = None;
    let mut maps = Vec::new();
    for spec in &game.payoffs {
        match spec {
            PayoffSpec::ReachedSet { targets: t, values } => {
                targets = Some(t.clone());
                maps.push(values.clone());
            }
            _ => return None,
        }
    }
    let targets = targets?;
    let n = game.num_players();
    let mut out: Vec<Vec<Scalar>> = vec![Vec::new(); n];
    for mask in 0..maps[0].len() {
        let vector: Vec<Scalar> = maps.iter().map(|m| m[mask].clone()).collect();
        for (i, v) in params.transform(&vector).into_iter().enumerate() {
            out[i].push(v);
        }
    }
    Some(
        out.into_iter()
            .map(|values| PayoffSpec::ReachedSet {
                targets: targets.clone(),
                values,
            })
            .collect(),
    )
}

/// Output of the construction.
#[derive(Clone, Debug)]
pub struct DeltaConstruction {
    pub profile: StrategyProfile,
    /// `None` when the pooled range is trivial; the profile then plays the
    /// first action everywhere.
    pub params: Option<DeltaParams>,
    pub model: Option<Model>,
    /// Per player, the optimal policy of its transformed zero-sum game.
    pub policies: Vec<Vec<ActionId>>,
    pub automaton: Option<LabelAutomaton>,
    pub payoffs: Vec<Scalar>,
}

/// Nash equilibrium of the game whose per-stratum payoff vectors are
/// `stay`: everyone plays its own optimal strategy, and a deviator is
/// punished by the others' minimizing strategies.
pub fn construct_nash_in_gdelta(
    game: &Game,
    model: &Model,
    stay: &[Vec<Scalar>],
) -> Result<(StrategyProfile, Vec<Vec<ActionId>>, LabelAutomaton)> {
    let full = Restriction::full(model.arena());
    let policies = par::try_map_range(game.num_players(), |i| {
        let objective = Objective::Stay(stay.iter().map(|v| v[i].clone()).collect());
        model
            .solve(&objective, &full, &model.sides(i))
            .map(|sol| sol.policy)
    })?;
    let prescribed: Vec<ActionId> = (0..model.num_nodes())
        .map(|p| policies[model.arena().controller(p)][p])
        .collect();
    let kit = PunishmentKit {
        full: policies.clone(),
        inner: policies.clone(),
    };
    let automaton = build_label_automaton(&game.arena, model, &prescribed, &full);
    let profile = assemble_profile(&game.arena, model, &automaton, &prescribed, &full, &kit);
    Ok((profile, policies, automaton))
}

/// Runs the whole construction on a deterministic finite-range game.
pub fn construct_secure_equilibrium_det(game: &Game) -> Result<DeltaConstruction> {
    if !game.is_finite_range() {
        return Err(Error::Unsupported(game.payoffs[0].family_name().into()));
    }
    if !game.arena.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let params = match compute_delta_for(game) {
        Ok(p) => p,
        Err(Error::TrivialRange) => {
            let profile = single_action_profile(&game.arena);
            let payoffs = expected_payoffs(game, &profile)?;
            return Ok(DeltaConstruction {
                profile,
                params: None,
                model: None,
                policies: Vec::new(),
                automaton: None,
                payoffs,
            });
        }
        Err(e) => return Err(e),
    };
    debug_assert!(!params.margin().is_zero());
    let model = Model::new(game)?;
    let stay: Vec<Vec<Scalar>> = model
        .stay_vectors(game)
        .iter()
        .map(|v| params.transform(v))
        .collect();
    let (profile, policies, automaton) = construct_nash_in_gdelta(game, &model, &stay)?;
    let payoffs = expected_payoffs(game, &profile)?;
    Ok(DeltaConstruction {
        profile,
        params: Some(params),
        model: Some(model),
        policies,
        automaton: Some(automaton),
        payoffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn delta_substitutions() {
        let p = compute_delta(&[int(0), int(1)], 2).unwrap();
        assert_eq!((p.r.clone(), p.d.clone(), p.delta.clone()), (int(1), int(1), ratio(1, 4)));
        assert_eq!(compute_delta(&[int(0), int(1)], 3).unwrap().delta, ratio(1, 6));
        let p = compute_delta(&[int(-2), int(1), int(5)], 2).unwrap();
        assert_eq!((p.r, p.d, p.delta), (int(5), int(3), ratio(3, 20)));
        assert!(matches!(compute_delta(&[int(7)], 2), Err(Error::TrivialRange)));
    }

    #[test]
    fn transform_two_players() {
        let p = compute_delta(&[int(0), int(1)], 2).unwrap();
        assert_eq!(p.transform(&[int(1), int(0)]), vec![int(1), ratio(-1, 4)]);
        let m = int(1);
        let all = p.transform(&[m.clone(), m.clone()]);
        assert!(all.iter().all(|v| *v == &m * (int(1) - &p.delta)));
    }
}
