//! Dense symmetric eigenproblems, backed by faer.

use faer::{MatRef, Side};
use ndarray::{Array2, ArrayView2};

use crate::error::{DickeError, Result};

fn as_faer<'a>(a: &'a ArrayView2<'_, f64>) -> Option<MatRef<'a, f64>> {
    let (rows, cols) = a.dim();
    a.as_slice()
        .map(|s| MatRef::from_row_major_slice(s, rows, cols))
}

fn eig_error(context: &str, rows: usize, cols: usize) -> DickeError {
    DickeError::Numerical {
        context: context.to_string(),
        rows,
        cols,
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real
/// symmetric matrix. Only the lower triangle is read.
pub fn symmetric_eigen(a: ArrayView2<'_, f64>, context: &str) -> Result<(Vec<f64>, Array2<f64>)> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(DickeError::param(format!("{context}: matrix is {rows}x{cols}")));
    }
    let owned;
    let view = match as_faer(&a) {
        Some(v) => v,
        None => {
            owned = a.as_standard_layout().to_owned();
            return symmetric_eigen(owned.view(), context);
        }
    };
    let evd = view
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| eig_error(context, rows, cols))?;
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let u = evd.U();
    let vectors = Array2::from_shape_fn((rows, cols), |(i, k)| u[(i, k)]);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(eig_error(context, rows, cols));
    }
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(a: ArrayView2<'_, f64>, context: &str) -> Result<Vec<f64>> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(DickeError::param(format!("{context}: matrix is {rows}x{cols}")));
    }
    let owned;
    let view = match as_faer(&a) {
        Some(v) => v,
        None => {
            owned = a.as_standard_layout().to_owned();
            return symmetric_eigenvalues(owned.view(), context);
        }
    };
    let values = view
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| eig_error(context, rows, cols))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(eig_error(context, rows, cols));
    }
    Ok(values)
}

/// `a^T b` for column-stacked vectors `a` and `b` with equal row counts.
pub fn transpose_product(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    assert_eq!(a.nrows(), b.nrows(), "row counts differ");
    let a = a.as_standard_layout();
    let b = b.as_standard_layout();
    let fa = MatRef::from_row_major_slice(a.as_slice().expect("standard layout"), a.nrows(), a.ncols());
    let fb = MatRef::from_row_major_slice(b.as_slice().expect("standard layout"), b.nrows(), b.ncols());
    let c = fa.transpose() * fb;
    Array2::from_shape_fn((c.nrows(), c.ncols()), |(i, k)| c[(i, k)])
}

/// `max |a - a^T|` relative to `max |a|`.
pub fn asymmetry(a: ArrayView2<'_, f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for k in 0..=i {
            worst = worst.max((a[(i, k)] - a[(k, i)]).abs());
            scale = scale.max(a[(i, k)].abs());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}
