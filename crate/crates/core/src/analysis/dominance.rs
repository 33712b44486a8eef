//! Dominance by mixed actions, decided by small exact linear programs.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::exact::{self, Q};
use crate::game::{Game, PayoffMatrix, Player};
use crate::lp::{LinearProgram, Relation, Sense};

/// A dominated action and a mixed action that dominates it. The mix is
/// indexed by the player's full action set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub action: usize,
    #[serde(with = "exact::exact_serde")]
    pub mix: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub player: Player,
    pub weakly_dominated: Vec<usize>,
    pub survivors: Vec<usize>,
    pub witnesses: Vec<Witness>,
}

/// A product of action subsets, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductSet {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl ProductSet {
    pub fn full(g: &Game) -> Self {
        ProductSet { rows: (0..g.num_actions(Player::Row)).collect(), cols: (0..g.num_actions(Player::Col)).collect() }
    }

    pub fn of(&self, player: Player) -> &[usize] {
        match player {
            Player::Row => &self.rows,
            Player::Col => &self.cols,
        }
    }

    pub fn contains(&self, other: &ProductSet) -> bool {
        other.rows.iter().all(|r| self.rows.contains(r)) && other.cols.iter().all(|c| self.cols.contains(c))
    }
}

/// Mixed action over `candidates` weakly dominating `action` against the
/// opponent actions `opp`: never worse, strictly better somewhere. The LP
/// maximizes the total slack; the action is dominated iff it is positive.
pub fn weak_dominance_witness(view: &PayoffMatrix, candidates: &[usize], opp: &[usize], action: usize) -> Option<Vec<Q>> {
    let support: Vec<usize> = candidates.iter().copied().filter(|&s| s != action).collect();
    if support.is_empty() || opp.is_empty() {
        return None;
    }
    let mut lp = LinearProgram::new(support.len(), Sense::Maximize);
    lp.set_objective(support.iter().map(|&s| opp.iter().map(|&t| view.get(s, t)).sum()).collect());
    lp.add_constraint(vec![Q::one(); support.len()], Relation::Eq, Q::one());
    for &t in opp {
        lp.add_constraint(support.iter().map(|&s| view.get(s, t).clone()).collect(), Relation::Ge, view.get(action, t).clone());
    }
    let sol = lp.solve().optimal()?;
    let baseline: Q = opp.iter().map(|&t| view.get(action, t)).sum();
    if sol.value <= baseline {
        return None;
    }
    Some(spread(view.rows(), &support, sol.x))
}

/// Mixed action over `candidates` strictly better than `action` against every
/// opponent action in `opp`. Maximizes the uniform margin.
pub fn strict_dominance_witness(view: &PayoffMatrix, candidates: &[usize], opp: &[usize], action: usize) -> Option<Vec<Q>> {
    let support: Vec<usize> = candidates.iter().copied().filter(|&s| s != action).collect();
    if support.is_empty() || opp.is_empty() {
        return None;
    }
    let k = support.len();
    let mut lp = LinearProgram::new(k + 1, Sense::Maximize);
    lp.set_free(k).set_objective_coeff(k, Q::one());
    let mut simplex = vec![Q::one(); k + 1];
    simplex[k] = Q::zero();
    lp.add_constraint(simplex, Relation::Eq, Q::one());
    for &t in opp {
        let mut row: Vec<Q> = support.iter().map(|&s| view.get(s, t).clone()).collect();
        row.push(-Q::one());
        lp.add_constraint(row, Relation::Ge, view.get(action, t).clone());
    }
    let sol = lp.solve().optimal()?;
    if sol.value <= Q::zero() {
        return None;
    }
    let mut x = sol.x;
    x.truncate(k);
    Some(spread(view.rows(), &support, x))
}

fn spread(n: usize, support: &[usize], weights: Vec<Q>) -> Vec<Q> {
    let mut mix = vec![Q::zero(); n];
    for (&s, w) in support.iter().zip(weights) {
        mix[s] = w;
    }
    mix
}

/// Re-checks the two weak-dominance inequalities for a witness.
pub fn verifies_weak_dominance(view: &PayoffMatrix, opp: &[usize], action: usize, mix: &[Q]) -> bool {
    let mixed = |t: usize| -> Q { mix.iter().enumerate().map(|(s, w)| w * view.get(s, t)).sum() };
    let valid_mix = mix.iter().all(|w| *w >= Q::zero()) && mix.iter().sum::<Q>() == Q::one();
    valid_mix
        && opp.iter().all(|&t| mixed(t) >= *view.get(action, t))
        && opp.iter().any(|&t| mixed(t) > *view.get(action, t))
}

/// Actions surviving one round of weak-dominance deletion, computed from the
/// player's own payoffs only.
pub fn undominated_actions(view: &PayoffMatrix) -> Vec<usize> {
    let own: Vec<usize> = (0..view.rows()).collect();
    let opp: Vec<usize> = (0..view.cols()).collect();
    own.iter().copied().filter(|&a| weak_dominance_witness(view, &own, &opp, a).is_none()).collect()
}

pub fn weakly_dominated(g: &Game, player: Player) -> DominanceReport {
    let view = g.own_view(player);
    let own: Vec<usize> = (0..view.rows()).collect();
    let opp: Vec<usize> = (0..view.cols()).collect();
    let mut report = DominanceReport { player, weakly_dominated: vec![], survivors: vec![], witnesses: vec![] };
    for &a in &own {
        match weak_dominance_witness(&view, &own, &opp, a) {
            Some(mix) => {
                report.weakly_dominated.push(a);
                report.witnesses.push(Witness { action: a, mix });
            }
            None => report.survivors.push(a),
        }
    }
    report
}

/// One round of weak-dominance deletion leaves each player indifferent among
/// their surviving actions against every surviving opponent action.
pub fn one_round_wds(g: &Game) -> bool {
    let survivors = [undominated_actions(&g.own_view(Player::Row)), undominated_actions(&g.own_view(Player::Col))];
    Player::BOTH.iter().all(|&p| {
        let view = g.own_view(p);
        let own = &survivors[p.index()];
        let opp = &survivors[p.other().index()];
        opp.iter().all(|&t| own.windows(2).all(|w| view.get(w[0], t) == view.get(w[1], t)))
    })
}

fn iterate_elimination(g: &Game, dominated: impl Fn(&PayoffMatrix, &[usize], &[usize], usize) -> bool) -> ProductSet {
    let views = [g.own_view(Player::Row), g.own_view(Player::Col)];
    let mut sets = [
        (0..g.num_actions(Player::Row)).collect::<Vec<_>>(),
        (0..g.num_actions(Player::Col)).collect::<Vec<_>>(),
    ];
    loop {
        let next: Vec<Vec<usize>> = Player::BOTH
            .iter()
            .map(|&p| {
                let (own, opp) = (&sets[p.index()], &sets[p.other().index()]);
                own.iter().copied().filter(|&a| !dominated(&views[p.index()], own, opp, a)).collect()
            })
            .collect();
        if next[0] == sets[0] && next[1] == sets[1] {
            break;
        }
        sets = [next[0].clone(), next[1].clone()];
    }
    let [rows, cols] = sets;
    ProductSet { rows, cols }
}

/// Iterated elimination of actions strictly dominated by mixed actions.
pub fn rationalizable_set(g: &Game) -> ProductSet {
    iterate_elimination(g, |v, own, opp, a| strict_dominance_witness(v, own, opp, a).is_some())
}

/// Iterated simultaneous deletion of all weakly dominated actions.
pub fn iterated_admissible_set(g: &Game) -> ProductSet {
    iterate_elimination(g, |v, own, opp, a| weak_dominance_witness(v, own, opp, a).is_some())
}

pub const CURB_LIMIT: usize = 6;

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// Minimal product sets closed under best replies to beliefs over the
/// opponent's part of the set. An action is such a best reply iff no mixture
/// of the player's actions strictly dominates it on those opponent actions.
pub fn minimal_curb_sets(g: &Game) -> Result<Vec<ProductSet>, AnalysisError> {
    let (n, m) = g.shape();
    if n > CURB_LIMIT || m > CURB_LIMIT {
        return Err(AnalysisError::TooLarge { limit: CURB_LIMIT, shape: (n, m) });
    }
    // best_reply_masks[p][opp_mask] = bitmask of p's best replies to beliefs on opp_mask.
    let best_reply_masks: Vec<Vec<u32>> = Player::BOTH
        .iter()
        .map(|&p| {
            let view = g.own_view(p);
            let own: Vec<usize> = (0..view.rows()).collect();
            let opp_n = view.cols();
            (0..1u32 << opp_n)
                .map(|mask| {
                    if mask == 0 {
                        return 0;
                    }
                    let opp = members(mask, opp_n);
                    own.iter()
                        .filter(|&&a| strict_dominance_witness(&view, &own, &opp, a).is_none())
                        .fold(0u32, |acc, &a| acc | (1 << a))
                })
                .collect()
        })
        .collect();
    let mut curb = Vec::new();
    for rmask in 1..1u32 << n {
        for cmask in 1..1u32 << m {
            let closed = best_reply_masks[0][cmask as usize] & !rmask == 0
                && best_reply_masks[1][rmask as usize] & !cmask == 0;
            if closed {
                curb.push((rmask, cmask));
            }
        }
    }
    let minimal = curb
        .iter()
        .filter(|&&(r, c)| !curb.iter().any(|&(r2, c2)| (r2, c2) != (r, c) && r2 & !r == 0 && c2 & !c == 0))
        .map(|&(r, c)| ProductSet { rows: members(r, n), cols: members(c, m) })
        .collect();
    Ok(minimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::experiments::fixtures;

    #[test]
    fn counterexample_dominance() {
        let r = weakly_dominated(&fixtures::u1(), Player::Row);
        assert_eq!(r.weakly_dominated, vec![0]);
        assert_eq!(r.survivors, vec![1]);
        assert_eq!(r.witnesses[0].mix, vec![int(0), int(1)]);
        let r = weakly_dominated(&fixtures::u2(), Player::Row);
        assert_eq!(r.weakly_dominated, vec![1]);
    }

    #[test]
    fn mixture_dominates_safe_row() {
        let g = Game::from_pairs(&["x", "y", "z"], &["l", "r"], &[&[(4, 0), (0, 0)], &[(0, 0), (4, 0)], &[(1, 0), (1, 0)]]);
        let r = weakly_dominated(&g, Player::Row);
        assert_eq!(r.weakly_dominated, vec![2]);
        // Any mix of x and y with weight in [1/4, 3/4] works; the LP returns a vertex.
        let mix = &r.witnesses[0].mix;
        assert_eq!(mix[2], int(0));
        assert!(mix[0] >= ratio(1, 4) && mix[0] <= ratio(3, 4));
        let view = g.own_view(Player::Row);
        assert!(verifies_weak_dominance(&view, &[0, 1], 2, &r.witnesses[0].mix));
    }

    #[test]
    fn wds_examples() {
        let both_dominant = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(3, 3), (1, 2)], &[(2, 1), (0, 0)]]);
        assert!(one_round_wds(&both_dominant));
        assert!(!one_round_wds(&fixtures::u1()));
        assert!(!one_round_wds(&fixtures::ci_u()));
    }

    #[test]
    fn elimination_on_counterexamples() {
        let single = |r: usize, c: usize| ProductSet { rows: vec![r], cols: vec![c] };
        assert_eq!(rationalizable_set(&fixtures::u1()), single(1, 0));
        assert_eq!(rationalizable_set(&fixtures::u2()), single(0, 1));
        assert_eq!(iterated_admissible_set(&fixtures::u1()), single(1, 0));
        assert_eq!(iterated_admissible_set(&fixtures::u2()), single(0, 1));
        let mp = fixtures::matching_pennies();
        assert_eq!(rationalizable_set(&mp), ProductSet::full(&mp));
        let flat = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(0, 0), (0, 0)], &[(0, 0), (0, 0)]]);
        assert_eq!(iterated_admissible_set(&flat), ProductSet::full(&flat));
    }

    #[test]
    fn curb_sets() {
        let single = |r: usize, c: usize| vec![ProductSet { rows: vec![r], cols: vec![c] }];
        assert_eq!(minimal_curb_sets(&fixtures::u1()).unwrap(), single(1, 0));
        assert_eq!(minimal_curb_sets(&fixtures::u2()).unwrap(), single(0, 1));
        let mp = fixtures::matching_pennies();
        assert_eq!(minimal_curb_sets(&mp).unwrap(), vec![ProductSet::full(&mp)]);
        let big = crate::experiments::cournot::cournot_game(&int(109), &int(1), &(0..8).map(int).collect::<Vec<_>>());
        assert!(matches!(minimal_curb_sets(&big), Err(AnalysisError::TooLarge { .. })));
    }

    #[test]
    fn strict_needs_margin_everywhere() {
        // Row y ties x against r: weakly but not strictly dominated.
        let g = Game::from_pairs(&["x", "y"], &["l", "r"], &[&[(2, 0), (1, 0)], &[(1, 0), (1, 0)]]);
        let view = g.own_view(Player::Row);
        assert!(weak_dominance_witness(&view, &[0, 1], &[0, 1], 1).is_some());
        assert!(strict_dominance_witness(&view, &[0, 1], &[0, 1], 1).is_none());
        assert!(strict_dominance_witness(&view, &[0, 1], &[0], 1).is_some());
    }
}
