use num_traits::{One, Zero};

use super::AnalysisError;
use crate::exact::Q;
use crate::game::{ActionProfile, Game, MixedProfile, PayoffMatrix, Player};

/// Maximizers of `view[own][opp]` over own actions, ties included.
pub fn best_responses_in_view(view: &PayoffMatrix, opp: usize) -> Vec<usize> {
    let best = (0..view.rows()).map(|a| view.get(a, opp)).max().expect("nonempty");
    (0..view.rows()).filter(|&a| view.get(a, opp) == best).collect()
}

pub fn best_responses(g: &Game, player: Player, opp_action: usize) -> Vec<usize> {
    let own_count = g.num_actions(player);
    let payoff = |a: usize| g.payoff(player, ActionProfile::from_view(player, a, opp_action));
    let best = (0..own_count).map(payoff).max().expect("nonempty");
    (0..own_count).filter(|&a| payoff(a) == best).collect()
}

pub fn is_best_response(g: &Game, player: Player, profile: ActionProfile) -> bool {
    let own = profile.action(player);
    let opp = profile.action(player.other());
    let mine = g.payoff(player, profile);
    (0..g.num_actions(player)).all(|a| g.payoff(player, ActionProfile::from_view(player, a, opp)) <= mine || a == own)
}

pub fn pure_nash(g: &Game) -> Vec<ActionProfile> {
    g.profiles()
        .filter(|&p| is_best_response(g, Player::Row, p) && is_best_response(g, Player::Col, p))
        .collect()
}

fn two_point(p: Q) -> Vec<Q> {
    let rest = Q::one() - &p;
    vec![p, rest]
}

fn strictly_inside(p: &Q) -> bool {
    *p > Q::zero() && *p < Q::one()
}

/// Weight on the first of the opponent's two actions that makes `view`'s
/// two rows equally good, if such a weight exists.
fn indifference_weight(view: &PayoffMatrix) -> Option<Q> {
    let (a, b, c, d) = (view.get(0, 0), view.get(0, 1), view.get(1, 0), view.get(1, 1));
    let denom = a - b - c + d;
    if denom.is_zero() {
        return None;
    }
    Some((d - b) / denom)
}

/// Equilibria of a 2x2 game by support enumeration.
///
/// Returns the pure equilibria, the completely mixed equilibrium when one
/// exists, and, in degenerate games where a player is indifferent against a
/// pure action, the mixed endpoint of that equilibrium segment.
pub fn mixed_nash_2x2(g: &Game) -> Result<Vec<MixedProfile>, AnalysisError> {
    if g.shape() != (2, 2) {
        return Err(AnalysisError::NotTwoByTwo(g.shape()));
    }
    let mut out: Vec<MixedProfile> = pure_nash(g).into_iter().map(|p| MixedProfile::pure((2, 2), p)).collect();
    let row_view = g.own_view(Player::Row);
    let col_view = g.own_view(Player::Col);
    // Column weight that keeps the row player indifferent, and vice versa.
    let q = indifference_weight(&row_view);
    let p = indifference_weight(&col_view);
    if let (Some(p), Some(q)) = (&p, &q) {
        if strictly_inside(p) && strictly_inside(q) {
            out.push(MixedProfile { row_mix: two_point(p.clone()), col_mix: two_point(q.clone()) });
        }
    }
    let unit = |i: usize| if i == 0 { vec![Q::one(), Q::zero()] } else { vec![Q::zero(), Q::one()] };
    // One side pure, the other strictly mixed.
    if let Some(q) = q.filter(strictly_inside) {
        for r in 0..2 {
            if col_view.get(0, r) == col_view.get(1, r) {
                out.push(MixedProfile { row_mix: unit(r), col_mix: two_point(q.clone()) });
            }
        }
    }
    if let Some(p) = p.filter(strictly_inside) {
        for c in 0..2 {
            if row_view.get(0, c) == row_view.get(1, c) {
                out.push(MixedProfile { row_mix: two_point(p.clone()), col_mix: unit(c) });
            }
        }
    }
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::experiments::fixtures;

    #[test]
    fn counterexample_best_responses() {
        let u1 = fixtures::u1();
        assert_eq!(best_responses(&u1, Player::Col, 1), vec![0]);
        let u2 = fixtures::u2();
        assert_eq!(best_responses(&u2, Player::Row, 1), vec![0]);
        let flat = Game::from_pairs(&["x", "y", "z"], &["l"], &[&[(1, 1)], &[(1, 1)], &[(1, 1)]]);
        assert_eq!(best_responses(&flat, Player::Row, 0), vec![0, 1, 2]);
    }

    #[test]
    fn pure_equilibria() {
        assert_eq!(pure_nash(&fixtures::u1()), vec![ActionProfile::new(1, 0)]);
        assert_eq!(pure_nash(&fixtures::u2()), vec![ActionProfile::new(0, 1)]);
        assert!(pure_nash(&fixtures::matching_pennies()).is_empty());
    }

    #[test]
    fn pennies_mixed() {
        let half = vec![ratio(1, 2), ratio(1, 2)];
        let eq = mixed_nash_2x2(&fixtures::matching_pennies()).unwrap();
        assert_eq!(eq, vec![MixedProfile { row_mix: half.clone(), col_mix: half.clone() }]);
        let eq = mixed_nash_2x2(&fixtures::biased_matching_pennies()).unwrap();
        assert_eq!(eq, vec![MixedProfile { row_mix: half, col_mix: vec![ratio(2, 5), ratio(3, 5)] }]);
    }

    #[test]
    fn u2_has_only_the_pure_equilibrium() {
        let eq = mixed_nash_2x2(&fixtures::u2()).unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0].as_pure(), Some(ActionProfile::new(0, 1)));
    }

    #[test]
    fn degenerate_segment_endpoint() {
        // Column player indifferent everywhere; row prefers top against left.
        let g = Game::from_pairs(&["t", "b"], &["l", "r"], &[&[(1, 0), (0, 0)], &[(0, 0), (1, 0)]]);
        let eq = mixed_nash_2x2(&g).unwrap();
        let top = vec![ratio(1, 1), ratio(0, 1)];
        assert!(eq.iter().any(|m| m.row_mix == top && m.col_mix == vec![ratio(1, 2), ratio(1, 2)]));
        assert!(eq.iter().any(|m| m.as_pure() == Some(ActionProfile::new(0, 0))));
        assert!(mixed_nash_2x2(&Game::from_pairs(&["a"], &["a"], &[&[(0, 0)]])).is_err());
    }
}
