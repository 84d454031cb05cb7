//! Dense two-phase simplex over exact rationals with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Q)>,
    pub cmp: Cmp,
    pub rhs: Q,
}

/// Minimize `objective · x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<(usize, Q)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, ..Default::default() }
    }

    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn constrain(&mut self, coeffs: Vec<(usize, Q)>, cmp: Cmp, rhs: Q) {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    /// Each row holds the coefficients followed by the right-hand side.
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    /// Columns `>= artificial_start` are artificial.
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let slacks = lp.constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
        let needs_artificial: Vec<bool> = lp
            .constraints
            .iter()
            .map(|c| {
                let flip = c.rhs.is_negative();
                match c.cmp {
                    Cmp::Eq => true,
                    Cmp::Le => flip,
                    Cmp::Ge => !flip,
                }
            })
            .collect();
        let artificial_start = lp.num_vars + slacks;
        let width = artificial_start + needs_artificial.iter().filter(|&&a| a).count() + 1;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (lp.num_vars, artificial_start);
        for (con, &needs_art) in lp.constraints.iter().zip(&needs_artificial) {
            let mut row = vec![Q::zero(); width];
            for (j, a) in &con.coeffs {
                row[*j] += a;
            }
            row[width - 1] = con.rhs.clone();
            match con.cmp {
                Cmp::Le => row[slack] = q(1),
                Cmp::Ge => row[slack] = q(-1),
                Cmp::Eq => {}
            }
            let slack_col = (con.cmp != Cmp::Eq).then_some(slack);
            if con.cmp != Cmp::Eq {
                slack += 1;
            }
            if con.rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            if needs_art {
                row[art] = q(1);
                basis.push(art);
                art += 1;
            } else {
                basis.push(slack_col.expect("slack basis"));
            }
            rows.push(row);
        }
        Tableau { rows, basis, artificial_start }
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(self.artificial_start + 1, Vec::len)
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Minimizes `cost` over columns `< limit`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], limit: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let mut reduced: Vec<Q> = cost[..limit].to_vec();
            for (row, &b) in self.rows.iter().zip(&self.basis) {
                let cb = cost.get(b).cloned().unwrap_or_else(Q::zero);
                if cb.is_zero() {
                    continue;
                }
                for (j, r) in reduced.iter_mut().enumerate() {
                    if !row[j].is_zero() {
                        *r -= &cb * &row[j];
                    }
                }
            }
            let Some(enter) = (0..limit).find(|&j| reduced[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[rhs] / &row[enter];
                    let better = match &leave {
                        None => true,
                        Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        let width = self.width();
        let rhs = width - 1;
        let mut phase1 = vec![Q::zero(); rhs];
        for c in phase1.iter_mut().skip(self.artificial_start) {
            *c = q(1);
        }
        self.optimize(&phase1, rhs);
        let infeasibility: Q = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &b)| b >= self.artificial_start)
            .map(|(row, _)| row[rhs].clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_start {
                match (0..self.artificial_start).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let mut phase2 = vec![Q::zero(); rhs];
        for (j, c) in &lp.objective {
            phase2[*j] += c;
        }
        if !self.optimize(&phase2, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); lp.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < lp.num_vars {
                x[b] = row[rhs].clone();
            }
        }
        let value = lp.objective.iter().map(|(j, c)| c * &x[*j]).sum();
        LpOutcome::Optimal { value, x }
    }
}
