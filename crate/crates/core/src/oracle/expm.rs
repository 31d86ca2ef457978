use crate::error::{Error, Result};
use crate::matrix::{frobenius_norm, matmul, DenseMatrix};

/// `e^A` by scaling and squaring: scale so `‖A‖_F / 2^p ≤ 0.5`, sum the Taylor
/// series until a term drops below `1e-20` relative, then square `p` times.
pub fn expm_reference(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::dim(format!("expm needs a square matrix, got {:?}", a.shape())));
    }
    let norm = frobenius_norm(a);
    let mut p = 0i32;
    while norm / 2f64.powi(p) > 0.5 {
        p += 1;
    }
    let scaled = a.scale(2f64.powi(-p));
    let m = a.rows();
    let mut term = DenseMatrix::identity(m);
    let mut acc = DenseMatrix::identity(m);
    for k in 1..=60 {
        term = matmul(&scaled, &term)?.scale(1.0 / k as f64);
        acc = acc.add(&term)?;
        if frobenius_norm(&term) < 1e-20 * frobenius_norm(&acc) {
            break;
        }
    }
    for _ in 0..p {
        acc = matmul(&acc, &acc)?;
        if !acc.all_finite() || acc.max_abs() > 1e300 {
            return Err(Error::Overflow { term: 0 });
        }
    }
    Ok(acc)
}
