//! Stage-game solvers and classifiers.

pub mod correlated;
pub mod dominance;
pub mod nash;
pub mod potential;
pub mod region;
pub mod report;
pub mod values;

use std::collections::HashSet;

use crate::game::{Game, Player};

pub use correlated::{correlated_equilibrium, is_correlated_equilibrium, CorrelatedReport};
pub use dominance::{
    iterated_admissible_set, minimal_curb_sets, one_round_wds, rationalizable_set, strict_dominance_witness,
    undominated_actions, verifies_weak_dominance, weak_dominance_witness, weakly_dominated, DominanceReport,
    ProductSet, Witness,
};
pub use nash::{best_responses, best_responses_in_view, is_best_response, mixed_nash_2x2, pure_nash};
pub use potential::{
    find_increasing_differences_orders, increasing_differences, ordinal_potential_exists, verify_ordinal_potential,
};
pub use region::feasible_ir_region;
pub use report::{classify, solve, AnalysisReport, ClassLabel};
pub use values::{is_common_interest, minimax, minimax_lp, stackelberg, StackelbergReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("expected a 2x2 game, got {}x{}", .0.0, .0.1)]
    NotTwoByTwo((usize, usize)),
    #[error("game is {}x{}; this solver enumerates subsets and accepts at most {limit} actions per player", .shape.0, .shape.1)]
    TooLarge { limit: usize, shape: (usize, usize) },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Each player's payoff entries are pairwise distinct.
pub fn is_generic(g: &Game) -> bool {
    Player::BOTH.iter().all(|&p| {
        let entries = g.matrix(p).entries();
        let distinct: HashSet<_> = entries.iter().collect();
        distinct.len() == entries.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::fixtures;

    #[test]
    fn genericity() {
        assert!(is_generic(&fixtures::u1()));
        assert!(is_generic(&fixtures::u2()));
        assert!(!is_generic(&fixtures::matching_pennies()));
        assert!(is_generic(&fixtures::ci_u()));
    }
}
