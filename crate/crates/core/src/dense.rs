//! Large dense kernels (symmetric eigensolvers, linear solves) routed
//! through faer; everything else stays in nalgebra.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix, ascending. Only the lower triangle
/// is read.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_square(a)?;
    let mut values = to_faer(a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Diagonalization {
            message: format!("symmetric eigenvalues of order {}: {e:?}", a.nrows()),
            matrix_dump: String::new(),
        })?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_square(a)?;
    let evd = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Diagonalization {
            message: format!("symmetric eigendecomposition of order {}: {e:?}", a.nrows()),
            matrix_dump: String::new(),
        })?;
    let s = evd.S().column_vector();
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let values = order.iter().map(|&i| s[i]).collect();
    let u = evd.U();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| u[(r, order[c])]);
    Ok((values, vectors))
}

/// `a⁻¹ b` by LU with partial pivoting.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let x = to_faer(a).partial_piv_lu().solve(to_faer(b));
    let x = from_faer(x.as_ref());
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("linear system is singular".into()));
    }
    Ok(x)
}
