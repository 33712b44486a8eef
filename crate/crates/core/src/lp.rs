//! Dense two-phase simplex over exact rationals.
//!
//! Sized for the stage-game programs in [`crate::analysis`]: a few dozen
//! variables and constraints at most. Bland's rule is used for both the
//! entering and the leaving variable, so the method terminates without any
//! tolerance handling.

use num_traits::{Signed, Zero};

use crate::exact::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
struct Constraint {
    coeffs: Vec<Q>,
    relation: Relation,
    rhs: Q,
}

/// `optimize c·x  s.t.  A x (<=|>=|=) b`, with `x >= 0` unless a variable is
/// marked free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    sense: Sense,
    objective: Vec<Q>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<Q>,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        LinearProgram {
            num_vars,
            sense,
            objective: vec![Q::zero(); num_vars],
            free: vec![false; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_objective(&mut self, coeffs: Vec<Q>) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.objective = coeffs;
        self
    }

    pub fn set_objective_coeff(&mut self, var: usize, c: Q) -> &mut Self {
        self.objective[var] = c;
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Q>, relation: Relation, rhs: Q) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    /// Sparse form: `(variable, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, Q)], relation: Relation, rhs: Q) -> &mut Self {
        let mut coeffs = vec![Q::zero(); self.num_vars];
        for (v, c) in terms {
            coeffs[*v] += c;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    /// Checks a candidate point against every constraint and sign restriction.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, free)| !free && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs: Q = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            }
        })
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: structural columns (free variables split into a
        // positive and a negative part), then slacks/surpluses, then artificials.
        let mut col_of = Vec::with_capacity(self.num_vars);
        let mut ncols = 0;
        for &free in &self.free {
            col_of.push((ncols, free));
            ncols += if free { 2 } else { 1 };
        }
        let structural = ncols;
        let m = self.constraints.len();
        let mut rows: Vec<(Vec<Q>, Relation, Q)> = Vec::with_capacity(m);
        for c in &self.constraints {
            let mut coeffs = vec![Q::zero(); structural];
            for (v, a) in c.coeffs.iter().enumerate() {
                let (col, free) = col_of[v];
                coeffs[col] = a.clone();
                if free {
                    coeffs[col + 1] = -a;
                }
            }
            let (coeffs, relation, rhs) = if c.rhs.is_negative() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (coeffs.into_iter().map(|a| -a).collect(), flipped, -c.rhs.clone())
            } else {
                (coeffs, c.relation, c.rhs.clone())
            };
            rows.push((coeffs, relation, rhs));
        }
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let total = structural + n_slack + n_art;
        let art_start = structural + n_slack;

        let mut tab = Tableau { a: Vec::with_capacity(m), basis: Vec::with_capacity(m), width: total };
        let (mut next_slack, mut next_art) = (structural, art_start);
        for (coeffs, relation, rhs) in rows {
            let mut row = coeffs;
            row.resize(total + 1, Q::zero());
            row[total] = rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = Q::from_integer(1.into());
                    tab.basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = Q::from_integer((-1).into());
                    next_slack += 1;
                    row[next_art] = Q::from_integer(1.into());
                    tab.basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Q::from_integer(1.into());
                    tab.basis.push(next_art);
                    next_art += 1;
                }
            }
            tab.a.push(row);
        }

        if n_art > 0 {
            let mut cost = vec![Q::zero(); total];
            for c in cost.iter_mut().skip(art_start) {
                *c = Q::from_integer((-1).into());
            }
            // Phase one is bounded above by zero.
            let _ = tab.optimize(&cost, |_| true);
            if !tab.objective(&cost).is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis; drop redundant rows.
            let mut i = 0;
            while i < tab.a.len() {
                if tab.basis[i] >= art_start {
                    match (0..art_start).find(|&j| !tab.a[i][j].is_zero()) {
                        Some(j) => {
                            tab.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            tab.a.remove(i);
                            tab.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut cost = vec![Q::zero(); total];
        for (v, c) in self.objective.iter().enumerate() {
            let c = match self.sense {
                Sense::Maximize => c.clone(),
                Sense::Minimize => -c,
            };
            let (col, free) = col_of[v];
            if free {
                cost[col + 1] = -&c;
            }
            cost[col] = c;
        }
        if tab.optimize(&cost, |j| j < art_start).is_err() {
            return LpOutcome::Unbounded;
        }

        let mut values = vec![Q::zero(); total];
        for (i, &b) in tab.basis.iter().enumerate() {
            values[b] = tab.a[i][total].clone();
        }
        let x: Vec<Q> = col_of
            .iter()
            .map(|&(col, free)| if free { &values[col] - &values[col + 1] } else { values[col].clone() })
            .collect();
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal(Solution { x, value })
    }
}

struct Tableau {
    a: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

struct Unbounded;

impl Tableau {
    fn objective(&self, cost: &[Q]) -> Q {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| &cost[b] * &self.a[i][self.width])
            .sum()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` from the current basic feasible solution.
    fn optimize(&mut self, cost: &[Q], allowed: impl Fn(usize) -> bool) -> Result<(), Unbounded> {
        loop {
            let entering = (0..self.width).filter(|&j| allowed(j) && !self.basis.contains(&j)).find(|&j| {
                let reduced: Q = &cost[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !self.a[*i][j].is_zero())
                        .map(|(i, &b)| &cost[b] * &self.a[i][j])
                        .sum::<Q>();
                reduced.is_positive()
            });
            let Some(j) = entering else { return Ok(()) };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][j].is_positive() {
                    continue;
                }
                let ratio = &self.a[i][self.width] / &self.a[i][j];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return Err(Unbounded),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.set_objective(vec![int(3), int(5)]);
        lp.add_constraint(vec![int(1), int(0)], Relation::Le, int(4));
        lp.add_constraint(vec![int(0), int(2)], Relation::Le, int(12));
        lp.add_constraint(vec![int(3), int(2)], Relation::Le, int(18));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.x, vec![int(2), int(6)]);
        assert_eq!(s.value, int(36));
    }

    #[test]
    fn equality_and_ge_constraints() {
        // min x + y  s.t. x + 2y >= 3, x - y = 0 -> x = y = 1
        let mut lp = LinearProgram::new(2, Sense::Minimize);
        lp.set_objective(vec![int(1), int(1)]);
        lp.add_constraint(vec![int(1), int(2)], Relation::Ge, int(3));
        lp.add_constraint(vec![int(1), int(-1)], Relation::Eq, int(0));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.x, vec![int(1), int(1)]);
        assert_eq!(s.value, int(2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.add_constraint(vec![int(1)], Relation::Ge, int(2));
        lp.add_constraint(vec![int(1)], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.set_objective(vec![int(1)]);
        lp.add_constraint(vec![int(1)], Relation::Ge, int(0));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variable_goes_negative() {
        // min t  s.t. t >= -3/2 with t free
        let mut lp = LinearProgram::new(1, Sense::Minimize);
        lp.set_free(0).set_objective(vec![int(1)]);
        lp.add_constraint(vec![int(1)], Relation::Ge, ratio(-3, 2));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.value, ratio(-3, 2));
    }

    #[test]
    fn redundant_equalities() {
        // x + y = 1 stated twice; max x
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.set_objective(vec![int(1), int(0)]);
        lp.add_constraint(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.add_constraint(vec![int(2), int(2)], Relation::Eq, int(2));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.x, vec![int(1), int(0)]);
        assert!(lp.is_feasible(&s.x));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4, Sense::Maximize);
        lp.set_objective(vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6)]);
        lp.add_constraint(vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)], Relation::Le, int(0));
        lp.add_constraint(vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)], Relation::Le, int(0));
        lp.add_constraint(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.value, ratio(1, 20));
    }
}
