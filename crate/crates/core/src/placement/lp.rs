//! Exact rational simplex for feasibility of `A·x = b, x ≥ 0`.
//!
//! Phase one with artificial variables and Bland's rule. The answer is a basic
//! feasible solution: at most one nonzero per row.

use num_traits::{Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSolution {
    pub x: Vec<Q>,
    /// Column index per basic row (artificial rows that turned out redundant are dropped).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

/// Finds a basic feasible solution or proves there is none.
pub fn basic_feasible_solution(a: &[Vec<Q>], b: &[Q]) -> Option<BasicSolution> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == m);
    // Tableau: m rows of [A | I | b], objective row last.
    let width = n + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = Vec::with_capacity(width);
        for v in &a[i] {
            row.push(if flip { -v.clone() } else { v.clone() });
        }
        for k in 0..m {
            row.push(if k == i { Q::from_integer(1.into()) } else { Q::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut obj = vec![Q::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
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
        let (row, _) = leave.expect("phase one objective is bounded below");
        pivot(&mut t, row, enter);
        basis[row] = enter;
        pivots += 1;
    }
    if !t[m][width - 1].is_zero() {
        return None;
    }
    // Drive remaining artificial variables out of the basis.
    let mut keep = vec![true; m];
    for i in 0..m {
        if basis[i] >= n {
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => {
                    pivot(&mut t, i, j);
                    basis[i] = j;
                    pivots += 1;
                }
                None => keep[i] = false,
            }
        }
    }
    let mut x = vec![Q::zero(); n];
    let mut kept = Vec::new();
    for i in 0..m {
        if keep[i] {
            x[basis[i]] = t[i][width - 1].clone();
            kept.push(basis[i]);
        }
    }
    Some(BasicSolution { x, basis: kept, pivots })
}

fn pivot(t: &mut [Vec<Q>], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &factor * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn rows(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn simple_feasible() {
        let a = rows(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![qi(3), qi(5)];
        let s = basic_feasible_solution(&a, &b).unwrap();
        assert_eq!(&s.x[0] + &s.x[1], qi(3));
        assert_eq!(&s.x[1] + &s.x[2], qi(5));
        assert!(s.x.iter().filter(|v| !v.is_zero()).count() <= 2);
    }

    #[test]
    fn infeasible() {
        let a = rows(&[&[1, 1], &[1, 1]]);
        assert!(basic_feasible_solution(&a, &[qi(1), qi(2)]).is_none());
        let a = rows(&[&[1, -1]]);
        assert!(basic_feasible_solution(&a, &[qi(-1)]).is_some());
        let a = rows(&[&[1, 2]]);
        assert!(basic_feasible_solution(&a, &[qi(-1)]).is_none());
    }

    #[test]
    fn redundant_rows_and_fractions() {
        let a = rows(&[&[2, 0], &[4, 0], &[0, 3]]);
        let s = basic_feasible_solution(&a, &[qi(1), qi(2), qi(1)]).unwrap();
        assert_eq!(s.x, vec![q(1, 2), q(1, 3)]);
        assert_eq!(s.basis.len(), 2);
    }
}
