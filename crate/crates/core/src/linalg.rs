//! Dense Gaussian elimination with partial pivoting for the small systems
//! produced by tabular policy evaluation.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("matrix is singular at pivot column {column} (largest pivot {pivot:e})")]
pub struct SingularMatrix {
    pub column: usize,
    pub pivot: f64,
}

const PIVOT_EPS: f64 = 1e-300;

/// Solves `A X = B` for `X`.
///
/// `a` is `n x n` row-major, `rhs` holds the columns of `B` (each of length `n`).
/// Returns the solution columns in the same order.
pub fn solve(a: &[f64], n: usize, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, SingularMatrix> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let k = rhs.len();
    for col in rhs {
        assert_eq!(col.len(), n, "right-hand side length mismatch");
    }

    // Augmented matrix [A | B], row-major with width n + k.
    let w = n + k;
    let mut m = vec![0.0; n * w];
    for i in 0..n {
        m[i * w..i * w + n].copy_from_slice(&a[i * n..(i + 1) * n]);
        for (j, col) in rhs.iter().enumerate() {
            m[i * w + n + j] = col[i];
        }
    }

    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[r * w + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs < PIVOT_EPS || !pivot_abs.is_finite() {
            return Err(SingularMatrix {
                column: col,
                pivot: pivot_abs,
            });
        }
        if pivot_row != col {
            for j in 0..w {
                m.swap(col * w + j, pivot_row * w + j);
            }
        }
        let pivot = m[col * w + col];
        for r in col + 1..n {
            let factor = m[r * w + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[r * w + col] = 0.0;
            for j in col + 1..w {
                m[r * w + j] -= factor * m[col * w + j];
            }
        }
    }

    let mut out = vec![vec![0.0; n]; k];
    for (j, x) in out.iter_mut().enumerate() {
        for i in (0..n).rev() {
            let mut acc = m[i * w + n + j];
            for c in i + 1..n {
                acc -= m[i * w + c] * x[c];
            }
            x[i] = acc / m[i * w + i];
        }
    }
    Ok(out)
}
