use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{self, Q};
use crate::game::{Game, Player};
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};

/// A correlated equilibrium as a row-major distribution over profiles, and
/// whether it is the only one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatedReport {
    pub unique: bool,
    #[serde(with = "exact::exact_serde")]
    pub witness: Vec<Q>,
}

fn polytope(g: &Game, sense: Sense) -> LinearProgram {
    let (n, m) = g.shape();
    let idx = |r: usize, c: usize| r * m + c;
    let mut lp = LinearProgram::new(n * m, sense);
    lp.add_constraint(vec![Q::one(); n * m], Relation::Eq, Q::one());
    for p in Player::BOTH {
        let own_n = g.num_actions(p);
        let opp_n = g.num_actions(p.other());
        let view = g.own_view(p);
        // Recommended action a must beat every deviation d given the conditional.
        for a in 0..own_n {
            for d in (0..own_n).filter(|&d| d != a) {
                let terms: Vec<(usize, Q)> = (0..opp_n)
                    .map(|o| {
                        let var = match p {
                            Player::Row => idx(a, o),
                            Player::Col => idx(o, a),
                        };
                        (var, view.get(a, o) - view.get(d, o))
                    })
                    .filter(|(_, w)| !w.is_zero())
                    .collect();
                if !terms.is_empty() {
                    lp.add_sparse(&terms, Relation::Ge, Q::zero());
                }
            }
        }
    }
    lp
}

/// Obedience constraints hold exactly for the distribution `x`.
pub fn is_correlated_equilibrium(g: &Game, x: &[Q]) -> bool {
    x.len() == g.shape().0 * g.shape().1 && polytope(g, Sense::Maximize).is_feasible(x)
}

/// Finds a correlated equilibrium and decides uniqueness by maximizing and
/// minimizing every coordinate over the polytope.
pub fn correlated_equilibrium(g: &Game) -> CorrelatedReport {
    let vars = g.shape().0 * g.shape().1;
    let base = polytope(g, Sense::Maximize);
    let witness = match base.solve() {
        LpOutcome::Optimal(s) => s.x,
        other => panic!("correlated equilibrium polytope is never empty: {other:?}"),
    };
    let extreme = |var: usize, sense: Sense| -> Q {
        let mut lp = polytope(g, sense);
        lp.set_objective_coeff(var, Q::one());
        lp.solve().optimal().expect("bounded polytope").value
    };
    let unique = (0..vars).all(|v| extreme(v, Sense::Maximize) == extreme(v, Sense::Minimize));
    CorrelatedReport { unique, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::experiments::fixtures;

    fn point_mass(n: usize, at: usize) -> Vec<Q> {
        (0..n).map(|i| if i == at { int(1) } else { int(0) }).collect()
    }

    #[test]
    fn counterexamples_have_unique_pure_ce() {
        let r = correlated_equilibrium(&fixtures::u1());
        assert!(r.unique);
        assert_eq!(r.witness, point_mass(4, 2));
        let r = correlated_equilibrium(&fixtures::u2());
        assert!(r.unique);
        assert_eq!(r.witness, point_mass(4, 1));
    }

    #[test]
    fn pennies_ce_is_the_product_mix() {
        let r = correlated_equilibrium(&fixtures::matching_pennies());
        assert!(r.unique);
        assert_eq!(r.witness, vec![ratio(1, 4); 4]);
        let r = correlated_equilibrium(&fixtures::biased_matching_pennies());
        assert!(r.unique);
        assert_eq!(r.witness, vec![ratio(1, 5), ratio(3, 10), ratio(1, 5), ratio(3, 10)]);
    }

    #[test]
    fn coordination_has_many() {
        let g = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(1, 1), (0, 0)], &[(0, 0), (1, 1)]]);
        let r = correlated_equilibrium(&g);
        assert!(!r.unique);
        assert!(is_correlated_equilibrium(&g, &r.witness));
        assert!(!is_correlated_equilibrium(&g, &[int(0), int(1), int(0), int(0)]));
    }
}
