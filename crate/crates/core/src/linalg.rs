//! Dense complex matrix helpers shared by the spectral and channel code.

use faer::{c64, Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// max |m - m†| over all entries.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// max |m - I|.
pub fn identity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..m.ncols() {
            let target = if i == j { c(1.0) } else { c(0.0) };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Real input goes through the real symmetric solver. The returned columns
/// are orthonormal but carry whatever phase the solver produced.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: m.ncols(),
        });
    }
    let (values, vectors): (Vec<f64>, CMatrix) = if is_real(m) {
        let eig = to_faer_real(m)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::numerical(format!("real symmetric eigensolver failed: {e:?}")))?;
        let u = eig.U();
        (
            (0..n).map(|i| eig.S()[i]).collect(),
            CMatrix::from_fn(n, n, |i, j| c(u[(i, j)])),
        )
    } else {
        let eig = to_faer_complex(m)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::numerical(format!("hermitian eigensolver failed: {e:?}")))?;
        let u = eig.U();
        (
            (0..n).map(|i| eig.S()[i].re).collect(),
            CMatrix::from_fn(n, n, |i, j| Complex64::new(u[(i, j)].re, u[(i, j)].im)),
        )
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite eigenvalue"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok((sorted_values, sorted_vectors))
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    let mut values: Vec<f64> = if is_real(m) {
        to_faer_real(m)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::numerical(format!("real symmetric eigensolver failed: {e:?}")))?
    } else {
        to_faer_complex(m)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::numerical(format!("hermitian eigensolver failed: {e:?}")))?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite eigenvalue"));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn to_faer_real(m: &CMatrix) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

fn to_faer_complex(m: &CMatrix) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)].re, m[(i, j)].im))
}

/// Trace distance ½‖a − b‖₁ between two Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let mut diff = a - b;
    // symmetrize away roundoff so the solver sees an exactly Hermitian input
    let adj = diff.adjoint();
    diff = (diff + adj) * c(0.5);
    Ok(0.5 * hermitian_eigenvalues(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
}

/// a† b
pub fn adjoint_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.adjoint() * b
}

/// v† m v
pub fn expectation(m: &CMatrix, v: &CVector) -> Complex64 {
    v.dotc(&(m * v))
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
