//! Named stage games used throughout the tests, drivers and demos.

use crate::exact::{int, parse_decimal, Q};
use crate::game::{Game, PayoffMatrix};

use super::cournot::cournot_game;

/// Rowena: b is strictly dominated by c; unique equilibrium (c, a).
pub fn u1() -> Game {
    Game::from_pairs(&["b", "c"], &["a", "b"], &[&[(16, 12), (13, 13)], &[(17, 7), (14, 6)]])
}

/// Same as `u1` except for Rowena's payoffs from c; unique equilibrium (b, b).
pub fn u2() -> Game {
    Game::from_pairs(&["b", "c"], &["a", "b"], &[&[(16, 12), (13, 13)], &[(15, 7), (9, 6)]])
}

/// Ordinal potential of `u1`.
pub fn p1() -> PayoffMatrix {
    PayoffMatrix::from_ints(&[&[5, 8], &[10, 9]])
}

/// Ordinal potential of `u2`.
pub fn p2() -> PayoffMatrix {
    PayoffMatrix::from_ints(&[&[2, 3], &[1, -1]])
}

/// Zero-sum pennies. The (t, t) cell is (1, -1).
pub fn matching_pennies() -> Game {
    Game::from_pairs(&["h", "t"], &["h", "t"], &[&[(1, -1), (-1, 1)], &[(-1, 1), (1, -1)]])
}

/// Pennies with Rowena's (h, h) payoff raised to 2.
pub fn biased_matching_pennies() -> Game {
    Game::from_pairs(&["h", "t"], &["h", "t"], &[&[(2, -1), (-1, 1)], &[(-1, 1), (1, -1)]])
}

pub fn ci_u() -> Game {
    Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(8, 9), (2, 3)], &[(0, 1), (4, 5)]])
}

pub fn ci_utilde() -> Game {
    Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(8, 9), (6, 3)], &[(0, 7), (4, 5)]])
}

pub fn ci_uhat() -> Game {
    Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(8, 9), (10, 11)], &[(0, 1), (4, 5)]])
}

/// Rowena from `ci_u`, Colin from `ci_utilde`; unique equilibrium (a, a).
pub fn ci_u_r_utilde_c() -> Game {
    Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(8, 9), (2, 3)], &[(0, 7), (4, 5)]])
}

/// Rowena from `ci_u`, Colin from `ci_uhat`; unique equilibrium (b, b).
pub fn ci_u_r_uhat_c() -> Game {
    Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(8, 9), (2, 11)], &[(0, 1), (4, 5)]])
}

/// Integer Cournot duopoly, intercept 109, unit cost 1, quantities 0..=108.
pub fn cournot_109() -> Game {
    let grid: Vec<Q> = (0..=108).map(int).collect();
    cournot_game(&int(109), &int(1), &grid)
}

/// Cournot duopoly with intercept 10.9 and unit cost 0.1 on the quantities
/// {2.7, 3.6, 5.4} (follower, Cournot and leader quantities).
pub fn cournot_10_9() -> Game {
    let d = |s: &str| parse_decimal(s).expect("literal");
    cournot_game(&d("10.9"), &d("0.1"), &[d("2.7"), d("3.6"), d("5.4")])
}

/// The 2x2 block of `cournot_10_9` with Rowena on {3.6, 5.4} and Colin on
/// {2.7, 3.6}; it rounds to `u2`.
pub fn cournot_10_9_block() -> Game {
    cournot_10_9().restrict(&[1, 2], &[0, 1]).expect("indices in range")
}

/// Every fixture by name.
pub fn catalog() -> Vec<(&'static str, Game)> {
    vec![
        ("u1", u1()),
        ("u2", u2()),
        ("matching_pennies", matching_pennies()),
        ("biased_matching_pennies", biased_matching_pennies()),
        ("ci_u", ci_u()),
        ("ci_utilde", ci_utilde()),
        ("ci_uhat", ci_uhat()),
        ("ci_u_r_utilde_c", ci_u_r_utilde_c()),
        ("ci_u_r_uhat_c", ci_u_r_uhat_c()),
        ("cournot_109", cournot_109()),
        ("cournot_10_9", cournot_10_9()),
    ]
}

pub fn by_name(name: &str) -> Option<Game> {
    catalog().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{is_common_interest, is_generic, pure_nash, verify_ordinal_potential};
    use crate::exact::to_f64;
    use crate::game::{ActionProfile, Player};

    #[test]
    fn catalog_self_test() {
        for g in [u1(), u2()] {
            assert!(is_generic(&g));
            assert_eq!(pure_nash(&g).len(), 1);
        }
        assert!(verify_ordinal_potential(&u1(), &p1()).unwrap());
        assert!(verify_ordinal_potential(&u2(), &p2()).unwrap());
        for g in [ci_u(), ci_utilde(), ci_uhat()] {
            assert!(is_common_interest(&g).is_some());
        }
        assert_eq!(pure_nash(&ci_u_r_utilde_c()), vec![ActionProfile::new(0, 0)]);
        assert_eq!(pure_nash(&ci_u_r_uhat_c()), vec![ActionProfile::new(1, 1)]);
        assert!(pure_nash(&matching_pennies()).is_empty());
        assert_eq!(catalog().len(), 11);
        assert!(by_name("u2").is_some() && by_name("nope").is_none());
    }

    #[test]
    fn product_games_recombine_matrices() {
        assert_eq!(ci_u_r_utilde_c(), ci_u().with_matrix(Player::Col, ci_utilde().matrix(Player::Col).clone()).unwrap());
        assert_eq!(ci_u_r_uhat_c(), ci_u().with_matrix(Player::Col, ci_uhat().matrix(Player::Col).clone()).unwrap());
    }

    #[test]
    fn decimal_cournot_rounds_to_u2() {
        let block = cournot_10_9_block();
        let target = u2();
        let mut worst = 0.0f64;
        for p in block.profiles() {
            for pl in Player::BOTH {
                worst = worst.max((to_f64(block.payoff(pl, p)) - to_f64(target.payoff(pl, p))).abs());
            }
        }
        // The (c, b) cell for Rowena is 9.72 against 9.
        assert!((worst - 0.72).abs() < 1e-12, "{worst}");
        assert_eq!(block.payoff(Player::Row, ActionProfile::new(1, 1)), &parse_decimal("9.72").unwrap());
    }
}
