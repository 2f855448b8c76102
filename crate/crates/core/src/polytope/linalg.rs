//! Dense exact linear algebra over the rationals.

use num_traits::Zero;

use crate::rational::Q;

/// Reduced row echelon form in place; returns the pivot columns among the
/// first `cols` columns (extra columns, e.g. a right-hand side, are carried
/// along but never pivoted on).
pub fn rref(rows: &mut Vec<Vec<Q>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::from_integer(1.into()) / &rows[r][c];
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>], cols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, cols).len()
}

/// Basis of `{x : A x = 0}`.
pub fn null_space(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::from_integer(1.into());
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Parametrization `x = x0 + Σ t_k basis_k` of `{x : A x = b}`; `None` when
/// the system is inconsistent.
pub fn solve_affine(rows: &[(Vec<Q>, Q)], cols: usize) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, cols);
    if m[pivots.len()..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x0 = vec![Q::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x0[p] = m[r][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::from_integer(1.into());
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect();
    Some((x0, basis))
}

pub fn mat_vec(matrix: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    matrix.iter().map(|row| crate::rational::dot(row, x)).collect()
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "inner dimensions differ");
            (0..cols)
                .map(|c| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][c].is_zero())
                        .fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][c])
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{dot, qi};

    #[test]
    fn affine_solution_set() {
        // x + y + z = 1, x - y = 0
        let rows = vec![(vec![qi(1), qi(1), qi(1)], qi(1)), (vec![qi(1), qi(-1), qi(0)], qi(0))];
        let (x0, basis) = solve_affine(&rows, 3).unwrap();
        assert_eq!(basis.len(), 1);
        for (a, b) in &rows {
            assert_eq!(&dot(a, &x0), b);
            assert!(dot(a, &basis[0]).is_zero());
        }
    }

    #[test]
    fn inconsistent_system() {
        let rows = vec![(vec![qi(1), qi(1)], qi(1)), (vec![qi(2), qi(2)], qi(3))];
        assert!(solve_affine(&rows, 2).is_none());
    }

    #[test]
    fn rank_and_kernel() {
        let rows = vec![vec![qi(1), qi(2), qi(3)], vec![qi(2), qi(4), qi(6)]];
        assert_eq!(rank(&rows, 3), 1);
        let ker = null_space(&rows, 3);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(dot(&rows[0], v).is_zero());
        }
    }
}
