//! Stackelberg, minimax and common-interest values.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::nash::best_responses;
use crate::exact::{self, Q};
use crate::game::{ActionProfile, Game, PayoffMatrix, Player};
use crate::lp::{LinearProgram, Relation, Sense};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackelbergReport {
    pub leader: Player,
    #[serde(with = "exact::exact_serde")]
    pub value: Q,
    pub leader_action: usize,
    pub worst_follower_reply: usize,
}

/// Worst-case Stackelberg leader payoff: the follower best-responds and
/// breaks ties against the leader. Ties on either side go to the lowest index.
pub fn stackelberg(g: &Game, leader: Player) -> StackelbergReport {
    let follower = leader.other();
    let mut best: Option<StackelbergReport> = None;
    for a in 0..g.num_actions(leader) {
        let worst = best_responses(g, follower, a)
            .into_iter()
            .map(|f| (g.payoff(leader, ActionProfile::from_view(leader, a, f)).clone(), f))
            .min_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)))
            .expect("best responses are nonempty");
        if best.as_ref().is_none_or(|b| worst.0 > b.value) {
            best = Some(StackelbergReport { leader, value: worst.0, leader_action: a, worst_follower_reply: worst.1 });
        }
    }
    best.expect("at least one leader action")
}

fn upper_envelope(view: &PayoffMatrix, q: &Q) -> Q {
    let rest = Q::one() - q;
    (0..view.rows()).map(|a| q * view.get(a, 0) + &rest * view.get(a, 1)).max().expect("nonempty")
}

/// `min` over the opponent's mixed actions of `max` over the player's own
/// actions. Closed form when the opponent has at most two actions.
pub fn minimax(g: &Game, player: Player) -> Q {
    let view = g.own_view(player);
    match view.cols() {
        1 => (0..view.rows()).map(|a| view.get(a, 0).clone()).max().expect("nonempty"),
        2 => {
            // The envelope of lines in q is convex; its minimum sits at an
            // endpoint or where two lines cross.
            let mut candidates = vec![Q::zero(), Q::one()];
            for a in 0..view.rows() {
                for b in a + 1..view.rows() {
                    let slope = (view.get(a, 0) - view.get(a, 1)) - (view.get(b, 0) - view.get(b, 1));
                    if !slope.is_zero() {
                        let q = (view.get(b, 1) - view.get(a, 1)) / slope;
                        if q > Q::zero() && q < Q::one() {
                            candidates.push(q);
                        }
                    }
                }
            }
            candidates.iter().map(|q| upper_envelope(&view, q)).min().expect("nonempty")
        }
        _ => minimax_lp(g, player),
    }
}

/// The same value from the linear program of the auxiliary zero-sum game.
pub fn minimax_lp(g: &Game, player: Player) -> Q {
    let view = g.own_view(player);
    let m = view.cols();
    let mut lp = LinearProgram::new(m + 1, Sense::Minimize);
    lp.set_free(m).set_objective_coeff(m, Q::one());
    let mut simplex = vec![Q::one(); m + 1];
    simplex[m] = Q::zero();
    lp.add_constraint(simplex, Relation::Eq, Q::one());
    for a in 0..view.rows() {
        let mut row: Vec<Q> = view.row(a).to_vec();
        row.push(-Q::one());
        lp.add_constraint(row, Relation::Le, Q::zero());
    }
    lp.solve().optimal().expect("minimax program is feasible and bounded").value
}

/// `(z_R, z_C)` when some profile pays both players their maximal stage
/// payoff and every other payoff vector is strictly below it in both
/// coordinates.
pub fn is_common_interest(g: &Game) -> Option<(Q, Q)> {
    let z_r = g.matrix(Player::Row).max().clone();
    let z_c = g.matrix(Player::Col).max().clone();
    let mut attained = false;
    for p in g.profiles() {
        let (r, c) = (g.payoff(Player::Row, p), g.payoff(Player::Col, p));
        if *r == z_r && *c == z_c {
            attained = true;
        } else if *r >= z_r || *c >= z_c {
            return None;
        }
    }
    attained.then_some((z_r, z_c))
}
