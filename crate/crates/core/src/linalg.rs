//! Exact Gaussian elimination over the rationals.

use num::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `matrix · x = rhs`. The matrix is square and given row-major.
pub fn solve(matrix: Vec<Vec<Scalar>>, rhs: Vec<Scalar>) -> Result<Vec<Scalar>> {
    let rows = rhs.into_iter().map(|v| vec![v]).collect();
    Ok(solve_many(matrix, rows)?
        .into_iter()
        .map(|mut row| row.pop().unwrap())
        .collect())
}

/// Solves `matrix · X = rhs` for several right-hand sides at once;
/// `rhs[r]` holds row `r` of every right-hand side.
pub fn solve_many(mut matrix: Vec<Vec<Scalar>>, mut rhs: Vec<Vec<Scalar>>) -> Result<Vec<Vec<Scalar>>> {
    let n = rhs.len();
    debug_assert!(matrix.len() == n && matrix.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !matrix[r][col].is_zero())
            .ok_or(Error::Singular)?;
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = matrix[col][col].recip();
        for k in col..n {
            let v = &matrix[col][k] * &inv;
            matrix[col][k] = v;
        }
        for v in rhs[col].iter_mut() {
            *v = &*v * &inv;
        }
        let (head, tail) = matrix.split_at_mut(col + 1);
        let pivot_row = &head[col];
        let (rhs_head, rhs_tail) = rhs.split_at_mut(col + 1);
        let pivot_rhs = &rhs_head[col];
        for (row, rrow) in tail.iter_mut().zip(rhs_tail.iter_mut()) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for k in col..n {
                if !pivot_row[k].is_zero() {
                    let v = &factor * &pivot_row[k];
                    row[k] -= v;
                }
            }
            for (x, p) in rrow.iter_mut().zip(pivot_rhs) {
                *x -= &factor * p;
            }
        }
    }
    for col in (0..n).rev() {
        let (head, tail) = rhs.split_at_mut(col);
        let solved = &tail[0];
        for (r, rrow) in head.iter_mut().enumerate() {
            if !matrix[r][col].is_zero() {
                for (x, p) in rrow.iter_mut().zip(solved) {
                    *x -= &matrix[r][col] * p;
                }
            }
        }
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn solves_small_system() {
        // 2x + y = 3, x - y = 0
        let m = vec![vec![int(2), int(1)], vec![int(1), int(-1)]];
        let x = solve(m, vec![int(3), int(0)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
    }

    #[test]
    fn needs_row_swap() {
        let m = vec![vec![int(0), int(1)], vec![ratio(1, 2), int(0)]];
        let x = solve(m, vec![int(5), int(1)]).unwrap();
        assert_eq!(x, vec![int(2), int(5)]);
    }

    #[test]
    fn reports_singular() {
        let m = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(matches!(solve(m, vec![int(1), int(2)]), Err(Error::Singular)));
    }
}
