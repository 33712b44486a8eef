//! Profitable-deviation witnesses for games outside the one-round
//! weak-dominance class.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{best_responses, is_generic, one_round_wds, pure_nash, undominated_actions};
use crate::exact::{self, ratio, Q};
use crate::game::{ActionProfile, Game, PayoffMatrix, Player};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessConfig {
    #[serde(with = "exact::exact_serde")]
    pub epsilon: Q,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { epsilon: ratio(1, 10) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("epsilon must lie in (0, 1/5]")]
    BadEpsilon,
    #[error("game must be generic")]
    NotGeneric,
    #[error("game is in the one-round weak-dominance class")]
    InWds,
    #[error("absorbed profile out of range")]
    BadProfile,
    #[error("no target action with a unique supporting reply")]
    NoTarget,
}

/// The constructed game and the checked conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Player `i` whose payoffs are kept.
    pub learner: Player,
    /// Player `-i` who receives the new payoffs and deviates.
    pub deviator: Player,
    pub absorbed: ActionProfile,
    /// Unique Nash equilibrium of the constructed game.
    pub target: ActionProfile,
    pub game: Game,
    #[serde(with = "exact::exact_serde")]
    pub epsilon: Q,
    /// Constructed game generic with unique pure Nash `target`.
    pub generic_unique_nash: bool,
    /// `target_i != absorbed_i`.
    pub learner_moves: bool,
    /// Deviator strictly prefers the absorbed profile to the target.
    pub deviation_profitable: bool,
}

impl Witness {
    pub fn holds(&self) -> bool {
        self.generic_unique_nash && self.learner_moves && self.deviation_profitable
    }
}

/// A violating pair for `player`: two undominated own actions whose payoffs
/// differ against some undominated opponent action.
fn violation(g: &Game, player: Player) -> Option<(usize, usize)> {
    let view = g.own_view(player);
    let own = undominated_actions(&view);
    let opp = undominated_actions(&g.own_view(player.other()));
    for (x, &a) in own.iter().enumerate() {
        for &b in &own[x + 1..] {
            if opp.iter().any(|&t| view.get(a, t) != view.get(b, t)) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Builds `u~_{-i}` so that learners of `(u_i, u~_{-i})` go to a Nash
/// profile the deviator likes less than `absorbed`, which the deviator can
/// reach by playing as if its payoffs were still `u_{-i}`.
///
/// With `x = 1/2`, the deviator's target action `a*_{-i}` is strictly
/// dominant and the ladder is `u~(a∞_i, a*_{-i}) = x + 2e`, `u~(a∞) = x + e`,
/// `u~(a*) = x`. Remaining cells of the dominant action sit above `x + 2e`,
/// every other cell below `x - e`, all pairwise distinct.
pub fn wds_converse_witness(u: &Game, absorbed: ActionProfile, cfg: &WitnessConfig) -> Result<Witness, WitnessError> {
    let e = &cfg.epsilon;
    if *e <= Q::zero() || *e > ratio(1, 5) {
        return Err(WitnessError::BadEpsilon);
    }
    if !is_generic(u) {
        return Err(WitnessError::NotGeneric);
    }
    if one_round_wds(u) {
        return Err(WitnessError::InWds);
    }
    let (n, m) = u.shape();
    if absorbed.row >= n || absorbed.col >= m {
        return Err(WitnessError::BadProfile);
    }
    let (learner, (a, b)) = Player::BOTH
        .iter()
        .find_map(|&p| violation(u, p).map(|v| (p, v)))
        .ok_or(WitnessError::NoTarget)?;
    let deviator = learner.other();
    let inf_i = absorbed.action(learner);
    let inf_d = absorbed.action(deviator);
    let star_i = if a != inf_i { a } else { b };
    let star_d = (0..u.num_actions(deviator))
        .find(|&o| best_responses(u, learner, o) == [star_i] && o != inf_d)
        .ok_or(WitnessError::NoTarget)?;

    let (own, opp) = (u.num_actions(deviator), u.num_actions(learner));
    let x = ratio(1, 2);
    let delta = e / Q::from_integer((10 * own * opp).into());
    let view = PayoffMatrix::from_fn(own, opp, |j, k| {
        if j == star_d {
            if k == inf_i {
                &x + e * exact::int(2)
            } else if k == star_i {
                x.clone()
            } else {
                &x + e * exact::int(2) + &delta * Q::from_integer(((k + 1) as i64).into())
            }
        } else if j == inf_d && k == inf_i {
            &x + e
        } else {
            &x - e - &delta * Q::from_integer(((j * opp + k) as i64).into())
        }
    });
    debug_assert!(view.entries().iter().all(|v| *v > Q::zero() && *v < Q::one()));
    let table = match deviator {
        Player::Row => view,
        Player::Col => view.transpose(),
    };
    let game = u.with_matrix(deviator, table).expect("same shape");
    let target = ActionProfile::from_view(learner, star_i, star_d);
    let nash = pure_nash(&game);
    let generic_unique_nash = is_generic(&game) && nash == [target];
    let learner_moves = nash.iter().all(|p| p.action(learner) != inf_i);
    let deviation_profitable = nash.iter().all(|&p| game.payoff(deviator, absorbed) > game.payoff(deviator, p));
    Ok(Witness {
        learner,
        deviator,
        absorbed,
        target,
        game,
        epsilon: e.clone(),
        generic_unique_nash,
        learner_moves,
        deviation_profitable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::experiments::fixtures;

    #[test]
    fn ladder_on_u1() {
        let w = wds_converse_witness(&fixtures::u1(), ActionProfile::new(1, 0), &WitnessConfig::default()).unwrap();
        assert!(w.holds());
        assert_eq!((w.learner, w.deviator), (Player::Col, Player::Row));
        assert_eq!(w.target, ActionProfile::new(0, 1));
        let r = |row, col| w.game.payoff(Player::Row, ActionProfile::new(row, col)).clone();
        assert_eq!(r(0, 0), ratio(7, 10));
        assert_eq!(r(1, 0), ratio(6, 10));
        assert_eq!(r(0, 1), ratio(5, 10));
        assert!(r(1, 1) < ratio(4, 10));
        assert_eq!(w.game.matrix(Player::Col), fixtures::u1().matrix(Player::Col));
    }

    #[test]
    fn guards() {
        let cfg = WitnessConfig::default();
        let wds = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(3, 3), (2, 1)], &[(1, 2), (0, 0)]]);
        assert_eq!(wds_converse_witness(&wds, ActionProfile::new(0, 0), &cfg), Err(WitnessError::InWds));
        let bad = WitnessConfig { epsilon: int(0) };
        assert_eq!(wds_converse_witness(&fixtures::u1(), ActionProfile::new(1, 0), &bad), Err(WitnessError::BadEpsilon));
        let tie = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(1, 1), (1, 0)], &[(0, 0), (2, 2)]]);
        assert_eq!(wds_converse_witness(&tie, ActionProfile::new(0, 0), &cfg), Err(WitnessError::NotGeneric));
    }
}
