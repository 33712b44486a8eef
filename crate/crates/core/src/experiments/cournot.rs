//! Cournot duopolies on quantity grids and the search for teaching cycles
//! against a myopic best responder.

use itertools::Itertools;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::analysis::best_responses;
use crate::exact::{self, Q};
use crate::game::{Game, PayoffMatrix, Player};

/// Profit `max(intercept - q_i - q_j, 0) * q_i - cost * q_i` for both firms on
/// the same quantity grid. Labels are the quantities.
pub fn cournot_game(intercept: &Q, unit_cost: &Q, grid: &[Q]) -> Game {
    assert!(!grid.is_empty(), "quantity grid must be nonempty");
    let profit = |own: &Q, other: &Q| -> Q {
        let price = intercept - own - other;
        let price = if price < Q::zero() { Q::zero() } else { price };
        price * own - unit_cost * own
    };
    let n = grid.len();
    let row = PayoffMatrix::from_fn(n, n, |r, c| profit(&grid[r], &grid[c]));
    let col = PayoffMatrix::from_fn(n, n, |r, c| profit(&grid[c], &grid[r]));
    let labels: Vec<String> = grid
        .iter()
        .map(|q| exact::to_decimal_string(q).unwrap_or_else(|| q.to_string()))
        .collect();
    Game::new(labels.clone(), labels, row, col).expect("square grid game")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleResult {
    /// Teacher action indices, one per period of the cycle.
    pub cycle: Vec<usize>,
    pub labels: Vec<String>,
    #[serde(with = "exact::exact_serde")]
    pub average: Q,
    pub cycles_examined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycleError {
    #[error("max_len must be at least 1")]
    EmptyLength,
    #[error("{0} candidate cycles exceed the budget of {1}")]
    Budget(u128, u64),
    #[error("candidate action {0} out of range")]
    BadCandidate(usize),
}

pub const DEFAULT_CYCLE_BUDGET: u64 = 2_000_000;

/// Best cyclic teaching plan against a myopic best responder.
///
/// The teacher repeats `cycle` forever; in each period the follower plays
/// its lowest-index best reply to the teacher's previous action. The steady
/// state average of the teacher's payoff is maximized over every cycle of
/// length at most `max_len` drawn from `candidates` (teacher action indices;
/// the follower always uses the full action set). Shorter cycles win ties,
/// then the lexicographically smallest sequence of candidate positions.
pub fn optimal_cycle_search(
    g: &Game,
    teacher: Player,
    candidates: &[usize],
    max_len: usize,
    budget: u64,
) -> Result<CycleResult, CycleError> {
    if max_len == 0 {
        return Err(CycleError::EmptyLength);
    }
    let k = candidates.len();
    if let Some(&bad) = candidates.iter().find(|&&a| a >= g.num_actions(teacher)) {
        return Err(CycleError::BadCandidate(bad));
    }
    let total: u128 = (1..=max_len as u32).map(|l| (k as u128).pow(l)).sum();
    if total > budget as u128 {
        return Err(CycleError::Budget(total, budget));
    }
    let follower = teacher.other();
    // pay[i][j]: teacher payoff playing candidates[i] after having played candidates[j].
    let reply: Vec<usize> = candidates.iter().map(|&a| best_responses(g, follower, a)[0]).collect();
    let pay_exact: Vec<Vec<Q>> = candidates
        .iter()
        .map(|&a| {
            reply
                .iter()
                .map(|&f| g.payoff(teacher, crate::game::ActionProfile::from_view(teacher, a, f)).clone())
                .collect()
        })
        .collect();
    let pay: Vec<Vec<f64>> = pay_exact.iter().map(|r| r.iter().map(exact::to_f64).collect()).collect();
    let scale = pay.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;

    // Screen in floating point, keep every cycle within `slack` of the best,
    // then decide exactly.
    let mut best_f = f64::NEG_INFINITY;
    let mut shortlist: Vec<Vec<usize>> = Vec::new();
    let cycle_avg = |c: &[usize]| -> f64 {
        let l = c.len();
        (0..l).map(|t| pay[c[t]][c[(t + l - 1) % l]]).sum::<f64>() / l as f64
    };
    for len in 1..=max_len {
        for seq in (0..len).map(|_| 0..k).multi_cartesian_product() {
            let avg = cycle_avg(&seq);
            if avg > best_f + slack {
                best_f = avg;
                shortlist.retain(|c| cycle_avg(c) >= best_f - slack);
            }
            if avg >= best_f - slack {
                shortlist.push(seq);
            }
        }
    }
    let exact_avg = |c: &[usize]| -> Q {
        let l = c.len();
        let sum: Q = (0..l).map(|t| &pay_exact[c[t]][c[(t + l - 1) % l]]).sum();
        sum / Q::from_integer(l.into())
    };
    let mut best: Option<(Q, Vec<usize>)> = None;
    for c in shortlist {
        let v = exact_avg(&c);
        // Shortlist is generated shortest-first, then lexicographically.
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, c));
        }
    }
    let (average, positions) = best.expect("at least one cycle");
    let cycle: Vec<usize> = positions.iter().map(|&i| candidates[i]).collect();
    Ok(CycleResult {
        labels: cycle.iter().map(|&a| g.label(teacher, a).to_string()).collect(),
        cycle,
        average,
        cycles_examined: total as u64,
    })
}

/// Average of a given cycle against the myopic best responder.
pub fn cycle_average(g: &Game, teacher: Player, cycle: &[usize]) -> Q {
    let l = cycle.len();
    let sum: Q = (0..l)
        .map(|t| {
            let f = best_responses(g, teacher.other(), cycle[(t + l - 1) % l])[0];
            g.payoff(teacher, crate::game::ActionProfile::from_view(teacher, cycle[t], f)).clone()
        })
        .sum();
    sum / Q::from_integer(l.into())
}

/// Indices of the integer-grid quantities that are multiples of `step`,
/// plus any `extra` quantities, in increasing order.
pub fn coarse_grid(max_quantity: usize, step: usize, extra: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=max_quantity).step_by(step).chain(extra.iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{pure_nash, stackelberg};
    use crate::exact::int;
    use crate::experiments::fixtures;
    use crate::game::ActionProfile;

    #[test]
    fn integer_duopoly() {
        let g = fixtures::cournot_109();
        // Integer ties add the asymmetric pairs (35, 37) and (37, 35).
        let nash = pure_nash(&g);
        let symmetric: Vec<_> = nash.iter().filter(|p| p.row == p.col).collect();
        assert_eq!(symmetric, vec![&ActionProfile::new(36, 36)]);
        assert_eq!(nash.len(), 3);
        assert_eq!(g.payoff(Player::Row, ActionProfile::new(36, 36)), &int(1296));
        let s = stackelberg(&g, Player::Row);
        assert_eq!((s.leader_action, s.worst_follower_reply, s.value), (54, 27, int(1458)));
    }

    #[test]
    fn stationary_cycle_is_the_leader_quantity() {
        let g = fixtures::cournot_109();
        let grid = coarse_grid(108, 6, &[]);
        let r = optimal_cycle_search(&g, Player::Row, &grid, 1, DEFAULT_CYCLE_BUDGET).unwrap();
        assert_eq!((r.cycle, r.average), (vec![54], int(1458)));
    }

    #[test]
    fn four_cycles_beat_the_leader() {
        let g = fixtures::cournot_109();
        let grid = coarse_grid(108, 6, &[]);
        let r = optimal_cycle_search(&g, Player::Row, &grid, 4, DEFAULT_CYCLE_BUDGET).unwrap();
        assert_eq!(r.cycle, vec![42, 108, 66, 54]);
        assert_eq!(r.average, int(1521));
        assert_eq!(cycle_average(&g, Player::Row, &r.cycle), int(1521));
        assert_eq!(r.labels, vec!["42", "108", "66", "54"]);
    }

    #[test]
    fn budget_and_arguments() {
        let g = fixtures::u1();
        assert_eq!(optimal_cycle_search(&g, Player::Row, &[0, 1], 0, 10), Err(CycleError::EmptyLength));
        assert!(matches!(optimal_cycle_search(&g, Player::Row, &[0, 1], 4, 10), Err(CycleError::Budget(30, 10))));
        assert_eq!(optimal_cycle_search(&g, Player::Row, &[5], 1, 10), Err(CycleError::BadCandidate(5)));
    }

    #[test]
    fn one_period_cycle_matches_stackelberg_on_fixtures() {
        for g in [fixtures::u1(), fixtures::u2(), fixtures::ci_u()] {
            for p in Player::BOTH {
                let all: Vec<usize> = (0..g.num_actions(p)).collect();
                let r = optimal_cycle_search(&g, p, &all, 1, 100).unwrap();
                assert_eq!(r.average, stackelberg(&g, p).value);
            }
        }
    }
}
