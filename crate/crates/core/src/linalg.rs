//! Small dense complex solves used by the numerical cross-checks.

use num_complex::Complex;

use crate::real::Real;

/// Solves `a · X = b` by Gaussian elimination with partial pivoting.
///
/// `a` is `n x n`, `b` is `n x m`, both row-major. Returns `None` when a pivot
/// vanishes exactly.
pub fn solve_dense<T: Real>(
    mut a: Vec<Vec<Complex<T>>>,
    mut b: Vec<Vec<Complex<T>>>,
) -> Option<Vec<Vec<Complex<T>>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .norm()
                .partial_cmp(&a[j][col].norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].norm() == T::zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, &v) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= factor * v;
            }
            let (upper, lower) = b.split_at_mut(row);
            for (x, &v) in lower[0].iter_mut().zip(&upper[col]) {
                *x -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let (head, solved) = b.split_at_mut(col + 1);
        for (k, x) in head[col].iter_mut().enumerate() {
            let mut acc = *x;
            for (coef, row) in a[col][col + 1..].iter().zip(solved.iter()) {
                acc -= *coef * row[k];
            }
            *x = acc / a[col][col];
        }
    }
    Some(b)
}
