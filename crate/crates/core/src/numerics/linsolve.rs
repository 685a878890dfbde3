use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Solves `A·x = b` by LU factorization with partial pivoting.
///
/// A pivot smaller than `n·ε·‖A‖∞` is reported as [`Error::Singular`]; for the
/// resonator chain this is an undamped (κ = 0) drive sitting on an eigenmode.
pub fn solve_complex(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::InvalidInput(format!(
            "right-hand side has length {}, matrix dimension is {n}",
            b.len()
        )));
    }
    if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("right-hand side"));
    }

    let tiny = n as f64 * f64::EPSILON * a.norm_inf();
    let mut lu = a.as_slice().to_vec();
    let mut x = b.to_vec();

    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, lu[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= tiny || pivot_abs == 0.0 {
            return Err(Error::Singular {
                column: col,
                pivot: pivot_abs,
            });
        }
        if pivot_row != col {
            for c in 0..n {
                lu.swap(col * n + c, pivot_row * n + c);
            }
            x.swap(col, pivot_row);
        }
        let pivot = lu[col * n + col];
        for r in col + 1..n {
            let factor = lu[r * n + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            lu[r * n + col] = factor;
            for c in col + 1..n {
                let upper = lu[col * n + c];
                lu[r * n + c] -= factor * upper;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }

    for r in (0..n).rev() {
        let mut acc = x[r];
        for c in r + 1..n {
            acc -= lu[r * n + c] * x[c];
        }
        x[r] = acc / lu[r * n + r];
    }
    Ok(x)
}
