//! Ordinal potentials and increasing differences.

use std::cmp::Ordering;

use itertools::Itertools;

use super::AnalysisError;
use crate::exact::int;
use crate::game::{ActionProfile, Game, PayoffMatrix, Player};

/// Every unilateral deviation `(from, to)` with the deviating player.
fn deviations(g: &Game) -> impl Iterator<Item = (Player, ActionProfile, ActionProfile)> + '_ {
    let (n, m) = g.shape();
    let rows = (0..m).flat_map(move |c| {
        (0..n).flat_map(move |a| {
            (0..n).filter(move |&b| b != a).map(move |b| (Player::Row, ActionProfile::new(a, c), ActionProfile::new(b, c)))
        })
    });
    let cols = (0..n).flat_map(move |r| {
        (0..m).flat_map(move |a| {
            (0..m).filter(move |&b| b != a).map(move |b| (Player::Col, ActionProfile::new(r, a), ActionProfile::new(r, b)))
        })
    });
    rows.chain(cols)
}

pub fn verify_ordinal_potential(g: &Game, p: &PayoffMatrix) -> Result<bool, AnalysisError> {
    if (p.rows(), p.cols()) != g.shape() {
        return Err(AnalysisError::ShapeMismatch(format!(
            "potential is {}x{}, game is {}x{}",
            p.rows(),
            p.cols(),
            g.shape().0,
            g.shape().1
        )));
    }
    Ok(deviations(g).all(|(player, from, to)| {
        g.payoff(player, to).cmp(g.payoff(player, from)) == p.get(to.row, to.col).cmp(p.get(from.row, from.col))
    }))
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Builds an ordinal potential when one exists. Profiles joined by a
/// payoff-neutral deviation are merged; the potential is then the length of
/// the longest strict-improvement path into each merged class, which exists
/// iff the improvement graph between classes is acyclic.
pub fn ordinal_potential_exists(g: &Game) -> Option<PayoffMatrix> {
    let (n, m) = g.shape();
    let node = |a: ActionProfile| a.row * m + a.col;
    let mut parent: Vec<usize> = (0..n * m).collect();
    let mut strict = Vec::new();
    for (player, from, to) in deviations(g) {
        match g.payoff(player, to).cmp(g.payoff(player, from)) {
            Ordering::Equal => {
                let (a, b) = (find(&mut parent, node(from)), find(&mut parent, node(to)));
                parent[a] = b;
            }
            Ordering::Greater => strict.push((node(from), node(to))),
            Ordering::Less => {}
        }
    }
    let class: Vec<usize> = (0..n * m).map(|v| find(&mut parent, v)).collect();
    let mut succ = vec![Vec::new(); n * m];
    let mut indegree = vec![0usize; n * m];
    for &(a, b) in &strict {
        let (ca, cb) = (class[a], class[b]);
        if ca == cb {
            return None;
        }
        succ[ca].push(cb);
        indegree[cb] += 1;
    }
    let roots: Vec<usize> = (0..n * m).filter(|&v| class[v] == v).collect();
    let mut rank = vec![0i64; n * m];
    let mut queue: Vec<usize> = roots.iter().copied().filter(|&v| indegree[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in &succ[v] {
            rank[w] = rank[w].max(rank[v] + 1);
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push(w);
            }
        }
    }
    if seen < roots.len() {
        return None;
    }
    Some(PayoffMatrix::from_fn(n, m, |r, c| int(rank[class[r * m + c]])))
}

/// Standard increasing differences for both players with the actions ranked
/// by position in `row_order` and `col_order` (lowest first).
pub fn increasing_differences(g: &Game, row_order: &[usize], col_order: &[usize]) -> bool {
    Player::BOTH.iter().all(|&p| {
        let u = g.matrix(p);
        row_order.iter().tuple_combinations().all(|(&lo_r, &hi_r)| {
            col_order.iter().tuple_combinations().all(|(&lo_c, &hi_c)| {
                u.get(hi_r, hi_c) - u.get(lo_r, hi_c) >= u.get(hi_r, lo_c) - u.get(lo_r, lo_c)
            })
        })
    })
}

pub const ORDER_SEARCH_LIMIT: usize = 5;

/// Row and column action orders.
pub type OrderPair = (Vec<usize>, Vec<usize>);

/// First pair of action orders, in lexicographic permutation order, under
/// which the game has increasing differences.
pub fn find_increasing_differences_orders(g: &Game) -> Result<Option<OrderPair>, AnalysisError> {
    let (n, m) = g.shape();
    if n > ORDER_SEARCH_LIMIT || m > ORDER_SEARCH_LIMIT {
        return Err(AnalysisError::TooLarge { limit: ORDER_SEARCH_LIMIT, shape: (n, m) });
    }
    for rows in (0..n).permutations(n) {
        for cols in (0..m).permutations(m) {
            if increasing_differences(g, &rows, &cols) {
                return Ok(Some((rows, cols)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::fixtures;

    #[test]
    fn displayed_potentials() {
        assert!(verify_ordinal_potential(&fixtures::u1(), &fixtures::p1()).unwrap());
        assert!(verify_ordinal_potential(&fixtures::u2(), &fixtures::p2()).unwrap());
        assert!(!verify_ordinal_potential(&fixtures::u1(), &fixtures::p2()).unwrap());
        let wrong = PayoffMatrix::from_ints(&[&[1, 2, 3]]);
        assert!(verify_ordinal_potential(&fixtures::u1(), &wrong).is_err());
    }

    #[test]
    fn constructed_potentials() {
        for g in [fixtures::u1(), fixtures::u2(), fixtures::ci_u()] {
            let p = ordinal_potential_exists(&g).expect("potential");
            assert!(verify_ordinal_potential(&g, &p).unwrap());
        }
        assert!(ordinal_potential_exists(&fixtures::matching_pennies()).is_none());
        let flat = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(0, 0), (0, 0)], &[(0, 0), (0, 0)]]);
        assert!(verify_ordinal_potential(&flat, &ordinal_potential_exists(&flat).unwrap()).unwrap());
    }

    #[test]
    fn complementarity_orders() {
        let u1 = fixtures::u1();
        // rows b<c, cols b<a
        assert!(increasing_differences(&u1, &[0, 1], &[1, 0]));
        // rows b<c, cols a<b
        assert!(!increasing_differences(&u1, &[0, 1], &[0, 1]));
        let coord = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(1, 1), (0, 0)], &[(0, 0), (1, 1)]]);
        assert!(increasing_differences(&coord, &[0, 1], &[0, 1]));
        assert!(find_increasing_differences_orders(&u1).unwrap().is_some());
        assert!(find_increasing_differences_orders(&fixtures::u2()).unwrap().is_some());
        assert_eq!(find_increasing_differences_orders(&fixtures::matching_pennies()).unwrap(), None);
    }
}
