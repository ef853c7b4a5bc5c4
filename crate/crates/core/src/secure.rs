//! Secure equilibria by elimination and punishment.
//!
//! After the elimination reaches its fixpoint, the players follow a profile
//! of the fixpoint game that minimizes the (weighted) sum of all payoffs.
//! A deviator is punished with the fixpoint game's minimizers as long as
//! the history stays inside the fixpoint game, and with the full game's
//! minimizers once it leaves. Reward-based families only: discounted games
//! on the arena, finite-horizon games on the clock product.

use num::Signed;

use crate::arena::{ActionId, Player};
use crate::eliminate::{eliminate_fixpoint, EliminationTrace};
use crate::error::{Error, Result};
use crate::eval::expected_payoffs;
use crate::model::Model;
use crate::par;
use crate::payoff::Game;
use crate::punish::{assemble_profile, build_label_automaton, LabelAutomaton, PunishmentKit};
use crate::scalar::{self, Scalar};
use crate::solve::{Restriction, Side};
use crate::strategy::StrategyProfile;
use crate::zerosum::{solve_on_model, ValueTable};

/// Output of the construction.
#[derive(Clone, Debug)]
pub struct SecureConstruction {
    pub profile: StrategyProfile,
    pub trace: EliminationTrace,
    /// Values of every player's zero-sum game on the full model.
    pub values: Vec<ValueTable>,
    /// The sum-minimizing policy on the fixpoint game, per model node.
    pub rho: Vec<ActionId>,
    pub kit: PunishmentKit,
    pub automaton: LabelAutomaton,
    pub weights: Vec<Scalar>,
    pub payoffs: Vec<Scalar>,
}

pub fn check_weights(game: &Game, weights: &[Scalar]) -> Result<()> {
    if weights.len() != game.num_players() || weights.iter().any(Signed::is_negative) {
        return Err(Error::InvalidWeights);
    }
    Ok(())
}

/// Positional policy on the restricted model minimizing `Σ_i w_i u_i`,
/// with the smallest minimizing action at every node.
pub fn minimize_sum_profile(
    game: &Game,
    model: &Model,
    restr: &Restriction,
    weights: &[Scalar],
) -> Result<(Vec<ActionId>, Scalar)> {
    check_weights(game, weights)?;
    if model.is_limit() {
        return Err(Error::Unsupported(
            "sum minimization needs discounted or finite-horizon payoffs".into(),
        ));
    }
    let objective = model.weighted_objective(game, weights);
    let sides = vec![Side::Min; model.num_nodes()];
    let sol = model.solve(&objective, restr, &sides)?;
    let value = sol.values[model.root()].clone();
    Ok((sol.policy, value))
}

/// Runs the whole construction. `weights` defaults to all ones.
pub fn construct_secure_equilibrium(game: &Game, weights: Option<&[Scalar]>) -> Result<SecureConstruction> {
    let weights: Vec<Scalar> = match weights {
        Some(w) => w.to_vec(),
        None => vec![scalar::one(); game.num_players()],
    };
    check_weights(game, &weights)?;
    let trace = eliminate_fixpoint(game)?;
    let model = &trace.model;
    let inner = trace.fixpoint().restriction.clone();
    let full = Restriction::full(model.arena());
    let solved: Vec<(ValueTable, Vec<ActionId>, Vec<ActionId>)> =
        par::try_map_range(game.num_players(), |i: Player| {
            let (table, sol) = solve_on_model(game, model, i, &full)?;
            let (_, inner_sol) = solve_on_model(game, model, i, &inner)?;
            Ok::<_, Error>((table, sol.policy, inner_sol.policy))
        })?;
    let mut values = Vec::new();
    let mut kit = PunishmentKit {
        full: Vec::new(),
        inner: Vec::new(),
    };
    for (table, f, r) in solved {
        values.push(table);
        kit.full.push(f);
        kit.inner.push(r);
    }
    let (rho, _) = minimize_sum_profile(game, model, &inner, &weights)?;
    let automaton = build_label_automaton(&game.arena, model, &rho, &inner);
    let profile = assemble_profile(&game.arena, model, &automaton, &rho, &inner, &kit);
    let payoffs = expected_payoffs(game, &profile)?;
    Ok(SecureConstruction {
        profile,
        values,
        rho,
        kit,
        automaton,
        weights,
        payoffs,
        trace,
    })
}
