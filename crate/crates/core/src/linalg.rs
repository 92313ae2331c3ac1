//! Dense symmetric linear algebra used by the solvers.
//!
//! Thin wrappers around `faer` for the two O(n^3) kernels — the full
//! symmetric eigendecomposition and the SPD linear solve — keeping
//! `ndarray` as the container type everywhere else.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

fn to_faer(a: &Array2<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Full eigendecomposition of a symmetric matrix; only the lower triangle is
/// read. Returns eigenvalues in nondecreasing order and the matching
/// eigenvectors as columns.
pub fn sym_eigh(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if !a.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerics(
            "non-finite entries in eigensolver input".into(),
        ));
    }
    let evd = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerics(format!("symmetric eigendecomposition failed: {e:?}")))?;
    let s = evd.S().column_vector().to_owned();
    let u = evd.U();

    // faer returns eigenvalues in ascending order, but sort defensively so
    // callers can rely on the contract.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].partial_cmp(&s[j]).expect("finite eigenvalues"));

    let mut values = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = s[src];
        for row in 0..n {
            vectors[[row, dst]] = u[(row, src)];
        }
    }
    Ok((values, vectors))
}

/// Solves `A X = B` for symmetric positive-definite `A` via a Cholesky
/// factorization. Never forms an explicit inverse.
pub fn spd_solve(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!(
            "SPD solve needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if b.nrows() != n {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, expected {}",
            b.nrows(),
            n
        )));
    }
    if !a.iter().all(|v| v.is_finite()) || !b.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerics(
            "non-finite entries in linear system".into(),
        ));
    }
    let llt = to_faer(a)
        .llt(Side::Lower)
        .map_err(|e| Error::Numerics(format!("Cholesky factorization failed: {e:?}")))?;
    let x = llt.solve(to_faer(b));
    Ok(Array2::from_shape_fn((n, b.ncols()), |(i, j)| x[(i, j)]))
}

/// Frobenius norm.
pub fn fro_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
