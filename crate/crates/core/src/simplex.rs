//! Exact two-phase simplex over the rationals with Bland's rule.
//!
//! Only what the certifier needs: `minimize cᵀx s.t. Ax = b, x ≥ 0`, and the
//! nonnegative-kernel feasibility form built on top of it.

use num::{One, Signed, Zero};

use crate::linalg::{self, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Constraint rows, each `[coefficients | rhs]`.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row, `[costs | -objective]`.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Minimizes `cᵀx` subject to `a·x = b`, `x ≥ 0`, in exact arithmetic.
pub fn minimize(c: &[Rational], a: &RationalMatrix, b: &[Rational]) -> LpOutcome {
    let (m, n) = a.shape();
    assert_eq!(c.len(), n, "cost length must match column count");
    assert_eq!(b.len(), m, "rhs length must match row count");

    // Phase 1: artificial columns n..n+m, rhs made nonnegative.
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![Rational::zero(); width + 1];
        for j in 0..n {
            row[j] = if flip { -&a[(i, j)] } else { a[(i, j)].clone() };
        }
        row[n + i] = Rational::one();
        row[width] = if flip { -&b[i] } else { b[i].clone() };
        rows.push(row);
    }
    let mut cost = vec![Rational::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        width,
    };
    t.optimize(width);
    if !t.cost[width].is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2: reduced costs for the real objective.
    let mut cost = vec![Rational::zero(); width + 1];
    cost[..n].clone_from_slice(c);
    for (r, &bj) in t.basis.iter().enumerate() {
        let cb = c[bj].clone();
        if cb.is_zero() {
            continue;
        }
        for (j, v) in t.rows[r].iter().enumerate() {
            if !v.is_zero() {
                cost[j] -= &cb * v;
            }
        }
    }
    t.cost = cost;
    if !t.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &bj) in t.basis.iter().enumerate() {
        x[bj] = t.rhs(r).clone();
    }
    let value = linalg::dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Finds `u ≥ 0`, `u ≠ 0`, zero off `support`, with `aᵀu = 0`.
///
/// Solves `max Σ_{i∈support} u_i` s.t. `aᵀu = 0`, `0 ≤ u_i ≤ 1`; a positive
/// optimum yields the certificate, a zero optimum proves none exists. The
/// returned vector is rescaled to primitive integers.
pub fn nonneg_kernel_certificate(a: &RationalMatrix, support: &[usize]) -> Option<Vec<Rational>> {
    let (n, m) = a.shape();
    let k = support.len();
    if k == 0 {
        return None;
    }
    // Variables: u_s (k), slack for u_s ≤ 1 (k).
    let mut lp = RationalMatrix::zeros(m + k, 2 * k);
    let mut rhs = vec![Rational::zero(); m + k];
    for (col, &s) in support.iter().enumerate() {
        for j in 0..m {
            lp[(j, col)] = a[(s, j)].clone();
        }
        lp[(m + col, col)] = Rational::one();
        lp[(m + col, k + col)] = Rational::one();
        rhs[m + col] = Rational::one();
    }
    let mut cost = vec![Rational::zero(); 2 * k];
    for c in cost.iter_mut().take(k) {
        *c = -Rational::one();
    }
    match minimize(&cost, &lp, &rhs) {
        LpOutcome::Optimal { x, value } if value.is_negative() => {
            let mut u = vec![Rational::zero(); n];
            for (col, &s) in support.iter().enumerate() {
                u[s] = x[col].clone();
            }
            Some(linalg::primitive(&u))
        }
        _ => None,
    }
}

/// Checks the defining conditions of a nonnegative-kernel certificate by
/// direct substitution.
pub fn verify_nonneg_kernel(a: &RationalMatrix, support: &[usize], u: &[Rational]) -> bool {
    if u.len() != a.rows() {
        return false;
    }
    let in_support = |i: usize| support.contains(&i);
    let shape_ok = u
        .iter()
        .enumerate()
        .all(|(i, v)| !v.is_negative() && (v.is_zero() || in_support(i)));
    shape_ok
        && !linalg::is_zero_vec(u)
        && a.transpose()
            .mul_vec(u)
            .map(|r| linalg::is_zero_vec(&r))
            .unwrap_or(false)
}
