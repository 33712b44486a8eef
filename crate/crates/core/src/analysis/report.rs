//! Aggregated classification and solver output, as emitted by the CLI.

use serde::{Deserialize, Serialize};

use super::correlated::{correlated_equilibrium, CorrelatedReport};
use super::dominance::{
    iterated_admissible_set, minimal_curb_sets, one_round_wds, rationalizable_set, weakly_dominated, DominanceReport,
    ProductSet, CURB_LIMIT,
};
use super::nash::{mixed_nash_2x2, pure_nash};
use super::potential::{find_increasing_differences_orders, ordinal_potential_exists};
use super::region::feasible_ir_region;
use super::values::{is_common_interest, minimax, stackelberg, StackelbergReport};
use super::is_generic;
use crate::exact::{self, Q};
use crate::game::{ActionProfile, Game, MixedProfile, Player};

/// Largest action count per side for which the LP-based solvers run.
pub const LP_SIDE_LIMIT: usize = 12;
/// Largest profile count for the correlated-equilibrium uniqueness check.
pub const CE_PROFILE_LIMIT: usize = 36;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub generic: bool,
    pub has_pure_nash: bool,
    /// `None` when the game is too large for the dominance programs.
    pub wds: Option<bool>,
    #[serde(with = "exact::exact_serde")]
    pub common_interest: Option<(Q, Q)>,
    #[serde(with = "exact::exact_serde")]
    pub ordinal_potential: Option<Vec<Vec<Q>>>,
    /// Row and column action labels from lowest to highest.
    pub supermodular_orders: Option<(Vec<String>, Vec<String>)>,
    pub pure_nash: Vec<(String, String)>,
}

fn labelled(g: &Game, profiles: &[ActionProfile]) -> Vec<(String, String)> {
    profiles
        .iter()
        .map(|p| (g.label(Player::Row, p.row).to_string(), g.label(Player::Col, p.col).to_string()))
        .collect()
}

fn fits_lp(g: &Game) -> bool {
    let (n, m) = g.shape();
    n <= LP_SIDE_LIMIT && m <= LP_SIDE_LIMIT
}

pub fn classify(g: &Game) -> ClassLabel {
    let nash = pure_nash(g);
    let orders = find_increasing_differences_orders(g).ok().flatten().map(|(rows, cols)| {
        let names = |p: Player, order: Vec<usize>| order.into_iter().map(|a| g.label(p, a).to_string()).collect();
        (names(Player::Row, rows), names(Player::Col, cols))
    });
    ClassLabel {
        generic: is_generic(g),
        has_pure_nash: !nash.is_empty(),
        wds: fits_lp(g).then(|| one_round_wds(g)),
        common_interest: is_common_interest(g),
        ordinal_potential: ordinal_potential_exists(g).map(|p| p.to_nested()),
        supermodular_orders: orders,
        pure_nash: labelled(g, &nash),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimaxValues {
    #[serde(with = "exact::exact_serde")]
    pub row: Q,
    #[serde(with = "exact::exact_serde")]
    pub col: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub shape: (usize, usize),
    pub classification: ClassLabel,
    pub pure_nash: Vec<ActionProfile>,
    pub mixed_nash: Option<Vec<MixedProfile>>,
    pub dominance: Option<Vec<DominanceReport>>,
    pub rationalizable: Option<ProductSet>,
    pub iterated_admissible: Option<ProductSet>,
    pub minimal_curb_sets: Option<Vec<ProductSet>>,
    pub correlated_equilibrium: Option<CorrelatedReport>,
    pub stackelberg: Vec<StackelbergReport>,
    pub minimax: MinimaxValues,
    #[serde(with = "exact::exact_serde")]
    pub feasible_ir_region: Vec<(Q, Q)>,
}

/// Runs every solver that fits the game's size. Optional fields are `None`
/// when the corresponding solver was skipped.
pub fn solve(g: &Game) -> AnalysisReport {
    let (n, m) = g.shape();
    let lp_ok = fits_lp(g);
    AnalysisReport {
        shape: (n, m),
        classification: classify(g),
        pure_nash: pure_nash(g),
        mixed_nash: mixed_nash_2x2(g).ok(),
        dominance: lp_ok.then(|| Player::BOTH.iter().map(|&p| weakly_dominated(g, p)).collect()),
        rationalizable: lp_ok.then(|| rationalizable_set(g)),
        iterated_admissible: lp_ok.then(|| iterated_admissible_set(g)),
        minimal_curb_sets: (n <= CURB_LIMIT && m <= CURB_LIMIT).then(|| minimal_curb_sets(g).ok()).flatten(),
        correlated_equilibrium: (n * m <= CE_PROFILE_LIMIT).then(|| correlated_equilibrium(g)),
        stackelberg: Player::BOTH.iter().map(|&p| stackelberg(g, p)).collect(),
        minimax: MinimaxValues { row: minimax(g, Player::Row), col: minimax(g, Player::Col) },
        feasible_ir_region: feasible_ir_region(g),
    }
}
