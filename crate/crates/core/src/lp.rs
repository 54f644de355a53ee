//! Exact linear feasibility: find `x ≥ 0` with `A x = b` over the rationals.
//!
//! A presolve removes variables forced to zero by one-signed rows with zero
//! right-hand side, then a dense two-phase simplex (phase one only) with
//! Bland's rule decides the rest. Bland's rule guarantees termination.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, Default)]
pub struct Problem {
    vars: usize,
    rows: Vec<(Vec<(usize, Rational)>, Rational)>,
}

impl Problem {
    pub fn new(vars: usize) -> Problem {
        Problem {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Adds `Σ coef · x_var = rhs`. Repeated variables are summed.
    pub fn add_row(&mut self, terms: Vec<(usize, Rational)>, rhs: Rational) {
        assert!(
            terms.iter().all(|(v, _)| *v < self.vars),
            "variable out of range"
        );
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        let mut terms = terms;
        terms.sort_by_key(|(v, _)| *v);
        for (v, c) in terms {
            match merged.last_mut() {
                Some((w, d)) if *w == v => *d += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.rows.push((merged, rhs));
    }

    /// A non-negative solution, if one exists.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        let mut dead = vec![false; self.vars];
        loop {
            let mut changed = false;
            for (terms, rhs) in &self.rows {
                if !rhs.is_zero() {
                    continue;
                }
                let live: Vec<&(usize, Rational)> =
                    terms.iter().filter(|(v, _)| !dead[*v]).collect();
                let pos = live.iter().all(|(_, c)| c.is_positive());
                let neg = live.iter().all(|(_, c)| c.is_negative());
                if pos || neg {
                    for (v, _) in live {
                        dead[*v] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let live_vars: Vec<usize> = (0..self.vars).filter(|&v| !dead[v]).collect();
        let mut col = vec![usize::MAX; self.vars];
        for (k, &v) in live_vars.iter().enumerate() {
            col[v] = k;
        }
        let mut rows: Vec<(Vec<(usize, Rational)>, Rational)> = Vec::new();
        for (terms, rhs) in &self.rows {
            let t: Vec<(usize, Rational)> = terms
                .iter()
                .filter(|(v, _)| !dead[*v])
                .map(|(v, c)| (col[*v], c.clone()))
                .collect();
            if t.is_empty() {
                if !rhs.is_zero() {
                    return None;
                }
                continue;
            }
            rows.push((t, rhs.clone()));
        }
        let reduced = phase_one(live_vars.len(), &rows)?;
        let mut x = vec![Rational::zero(); self.vars];
        for (k, &v) in live_vars.iter().enumerate() {
            x[v] = reduced[k].clone();
        }
        Some(x)
    }

    /// `x` satisfies every row and is non-negative.
    pub fn check(&self, x: &[Rational]) -> bool {
        x.len() == self.vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|(terms, rhs)| {
                let lhs: Rational = terms.iter().map(|(v, c)| c * &x[*v]).sum();
                &lhs == rhs
            })
    }
}

fn phase_one(n: usize, rows: &[(Vec<(usize, Rational)>, Rational)]) -> Option<Vec<Rational>> {
    let m = rows.len();
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    // Columns: n structural, m artificial, then the right-hand side.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = vec![vec![Rational::zero(); width]; m];
    for (i, (terms, rhs)) in rows.iter().enumerate() {
        let flip = rhs.is_negative();
        for (v, c) in terms {
            t[i][*v] = if flip { -c } else { c.clone() };
        }
        t[i][n + i] = Rational::from_integer(1.into());
        t[i][width - 1] = if flip { -rhs } else { rhs.clone() };
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective `min Σ artificials`.
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..width {
            if j < n || j == width - 1 {
                cost[j] -= &row[j];
            }
        }
    }
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase one objective is bounded below");
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v /= &p;
        }
    }
    let prow: Vec<(usize, Rational)> = t[r]
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (j, v.clone()))
        .collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (j, v) in &prow {
            row[*j] -= &f * v;
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (j, v) in &prow {
            cost[*j] -= &f * v;
        }
    }
}
