//! Polynomial-of-matrix kernels applied to a block of vectors.
//!
//! Nothing here forms an explicit power `A^k`; every kernel advances one
//! multiply at a time so intermediate magnitudes stay close to the result.

use crate::error::{Error, Result};
use crate::matrix::{matmul, DenseMatrix};

/// Entries above this magnitude during Taylor accumulation abort the sum.
pub const OVERFLOW_LIMIT: f64 = 1e280;

/// `T_n(γ) x = Σ_{k=0}^{n} (γA)^k x / k!`, accumulated through
/// `term_{k+1} = (γ / (k+1)) A term_k`.
pub fn taylor_apply(a: &DenseMatrix, x: &DenseMatrix, n: usize, gamma: f64) -> Result<DenseMatrix> {
    check_square_compatible(a, x)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let mut term = x.clone();
    let mut acc = x.clone();
    for k in 0..n {
        term = matmul(a, &term)?.scale(gamma / (k + 1) as f64);
        acc = acc.add(&term)?;
        if !within_limit(&acc) || !within_limit(&term) {
            return Err(Error::Overflow { term: k + 1 });
        }
    }
    Ok(acc)
}

/// `(A - shift I)^k x` by `k` successive multiply-and-subtract steps.
pub fn shifted_power_apply(
    a: &DenseMatrix,
    shift: f64,
    k: usize,
    x: &DenseMatrix,
) -> Result<DenseMatrix> {
    check_square_compatible(a, x)?;
    let mut out = x.clone();
    for _ in 0..k {
        out = matmul(a, &out)?.sub(&out.scale(shift))?;
    }
    Ok(out)
}

/// Vector form of [`shifted_power_apply`].
pub fn shifted_power_vec(a: &DenseMatrix, shift: f64, k: usize, x: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::dim("shifted power requires a square matrix"));
    }
    let mut out = x.to_vec();
    for _ in 0..k {
        out = shifted_step(a, shift, &out)?;
    }
    Ok(out)
}

/// One application of `A - shift I` to a vector.
#[inline]
pub(crate) fn shifted_step(a: &DenseMatrix, shift: f64, x: &[f64]) -> Result<Vec<f64>> {
    let mut y = a.apply(x)?;
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= shift * xi;
    }
    Ok(y)
}

fn check_square_compatible(a: &DenseMatrix, x: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dim(format!("operator must be square, got {:?}", a.shape())));
    }
    if a.cols() != x.rows() {
        return Err(Error::dim(format!(
            "operator {:?} cannot act on {:?}",
            a.shape(),
            x.shape()
        )));
    }
    Ok(())
}

fn within_limit(m: &DenseMatrix) -> bool {
    m.entries().iter().all(|v| v.abs() <= OVERFLOW_LIMIT)
}
