//! Dense exact-rational simplex with Bland's rule.

use num_traits::{Signed, Zero};

use crate::rat::Rat;

/// Solution of `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: Rat,
    /// Optimal structural variables.
    pub x: Vec<Rat>,
    /// Optimal dual prices, one per constraint row.
    pub y: Vec<Rat>,
}

/// Primal simplex over exact rationals. The all-slack basis is feasible
/// because `b >= 0`; Bland's rule (smallest entering index, smallest
/// leaving basis variable on ratio ties) guarantees termination. Panics if
/// the problem is unbounded, which callers exclude by construction.
pub fn solve_max(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> LpSolution {
    let m = a.len();
    let n = c.len();
    debug_assert!(b.iter().all(|v| !v.is_negative()));
    // Tableau: m constraint rows of [A | I | b], then the objective row
    // [-c | 0 | 0]. Column j < n is structural, n + i is the slack of row i.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a[i].iter().cloned());
        for k in 0..m {
            row.push(if k == i {
                Rat::from_integer(1.into())
            } else {
                Rat::zero()
            });
        }
        row.push(b[i].clone());
        t.push(row);
    }
    let mut obj: Vec<Rat> = Vec::with_capacity(width);
    obj.extend(c.iter().map(|v| -v.clone()));
    obj.resize(width, Rat::zero());
    t.push(obj);

    let mut basis: Vec<usize> = (n..n + m).collect();
    // Bland: enter the first column with a negative objective coefficient.
    while let Some(entering) = (0..n + m).find(|&j| t[m][j] < Rat::zero()) {
        // Minimum ratio; ties resolved by smallest basis variable.
        let mut leaving: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if t[i][entering] > Rat::zero() {
                let ratio = &t[i][width - 1] / &t[i][entering];
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        ratio < *cur
                            || (ratio == *cur
                                && basis[i] < basis[leaving.expect("best implies leaving")])
                    }
                };
                if better {
                    best = Some(ratio);
                    leaving = Some(i);
                }
            }
        }
        let leaving = leaving.expect("LP is bounded by construction");
        pivot(&mut t, leaving, entering, width);
        basis[leaving] = entering;
    }


    let mut x = vec![Rat::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][width - 1].clone();
        }
    }
    let y = (0..m).map(|i| t[m][n + i].clone()).collect();
    LpSolution {
        value: t[m][width - 1].clone(),
        x,
        y,
    }
}

fn pivot(t: &mut [Vec<Rat>], row: usize, col: usize, width: usize) {
    let inv = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &inv;
    }
    let pivot_row = t[row].clone();
    for (r, other) in t.iter_mut().enumerate() {
        if r == row || other[col].is_zero() {
            continue;
        }
        let factor = other[col].clone();
        for (j, v) in other.iter_mut().enumerate().take(width) {
            let delta = &factor * &pivot_row[j];
            *v -= delta;
        }
    }
}
