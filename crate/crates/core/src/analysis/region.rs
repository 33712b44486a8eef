//! Feasible and individually rational payoff region of the repeated game.

use num_traits::Zero;

use super::values::minimax;
use crate::exact::Q;
use crate::game::{Game, Player};

type Point = (Q, Q);

fn cross(o: &Point, a: &Point, b: &Point) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Counterclockwise convex hull without collinear points (monotone chain).
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= Q::zero() {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    hull
}

/// Keeps the part of a convex polygon where `coord(p) >= bound`.
fn clip(poly: &[Point], bound: &Q, coord: fn(&Point) -> &Q) -> Vec<Point> {
    let inside = |p: &Point| coord(p) >= bound;
    let mut out = Vec::new();
    for (i, cur) in poly.iter().enumerate() {
        let prev = &poly[(i + poly.len() - 1) % poly.len()];
        if inside(cur) != inside(prev) {
            let t = (bound - coord(prev)) / (coord(cur) - coord(prev));
            out.push((&prev.0 + &t * (&cur.0 - &prev.0), &prev.1 + &t * (&cur.1 - &prev.1)));
        }
        if inside(cur) {
            out.push(cur.clone());
        }
    }
    out
}

/// Vertices of the payoff hull cut at both minimax values, listed
/// counterclockwise from the lowest (then leftmost) vertex. Empty when no
/// feasible payoff is individually rational.
pub fn feasible_ir_region(g: &Game) -> Vec<Point> {
    let pts: Vec<Point> = g.profiles().map(|p| g.payoff_pair(p)).collect();
    let hull = convex_hull(pts);
    let clipped = clip(&hull, &minimax(g, Player::Row), |p| &p.0);
    let clipped = clip(&clipped, &minimax(g, Player::Col), |p| &p.1);
    let region = convex_hull(clipped);
    match region.iter().enumerate().min_by(|a, b| (&a.1 .1, &a.1 .0).cmp(&(&b.1 .1, &b.1 .0))) {
        Some((start, _)) => region[start..].iter().chain(&region[..start]).cloned().collect(),
        None => region,
    }
}

/// Shoelace area of a polygon given counterclockwise.
pub fn polygon_area(poly: &[Point]) -> Q {
    let twice: Q = (0..poly.len())
        .map(|i| {
            let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
            &a.0 * &b.1 - &b.0 * &a.1
        })
        .sum();
    twice / Q::from_integer(2.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::experiments::fixtures;

    #[test]
    fn counterexample_regions() {
        let r = feasible_ir_region(&fixtures::u1());
        assert_eq!(r, vec![(int(14), int(7)), (int(17), int(7)), (int(16), int(12)), (int(14), ratio(38, 3))]);
        assert_eq!(polygon_area(&r), ratio(79, 6));
        let r = feasible_ir_region(&fixtures::u2());
        assert_eq!(r, vec![(int(13), int(7)), (int(15), int(7)), (int(16), int(12)), (int(13), int(13))]);
        assert_eq!(polygon_area(&r), int(14));
    }

    #[test]
    fn single_payoff_game() {
        let g = Game::from_pairs(&["a"], &["a"], &[&[(3, 4)]]);
        assert_eq!(feasible_ir_region(&g), vec![(int(3), int(4))]);
    }

    #[test]
    fn zero_sum_region_is_a_point() {
        assert_eq!(feasible_ir_region(&fixtures::matching_pennies()), vec![(int(0), int(0))]);
    }
}
