//! Small dense helpers shared by the eigenspace extraction and the oracle.

use crate::error::{Error, Result};
use crate::matrix::{axpy_neg, dot, norm2, DenseMatrix};

/// Output of column-pivoted modified Gram–Schmidt.
#[derive(Debug, Clone)]
pub struct PivotedGramSchmidt {
    /// Orthonormal vectors, one per accepted pivot.
    pub basis: Vec<Vec<f64>>,
    /// Source column index of each pivot, in selection order.
    pub pivots: Vec<usize>,
    /// Residual norm each pivot had when it was selected.
    pub residuals: Vec<f64>,
}

/// Column-pivoted modified Gram–Schmidt with one reorthogonalization pass.
///
/// At every step the remaining column with the largest residual norm is
/// taken; the process stops once that residual falls below `threshold`.
pub fn pivoted_gram_schmidt(columns: &[Vec<f64>], threshold: f64) -> PivotedGramSchmidt {
    let mut work: Vec<Vec<f64>> = columns.to_vec();
    let mut taken = vec![false; work.len()];
    let mut out = PivotedGramSchmidt {
        basis: Vec::new(),
        pivots: Vec::new(),
        residuals: Vec::new(),
    };
    let dim = columns.first().map_or(0, Vec::len);
    while out.basis.len() < dim {
        let best = work
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, c)| (i, norm2(c)))
            // first maximum wins ties so the selection is deterministic
            .fold(None, |acc: Option<(usize, f64)>, (i, n)| match acc {
                Some((_, bn)) if bn >= n => acc,
                _ => Some((i, n)),
            });
        let Some((p, _)) = best else { break };
        // reorthogonalize the pivot before trusting its residual
        let mut q = work[p].clone();
        for b in &out.basis {
            let c = dot(b, &q);
            axpy_neg(c, b, &mut q);
        }
        let res = norm2(&q);
        if !(res >= threshold) || res == 0.0 {
            break;
        }
        q.iter_mut().for_each(|v| *v /= res);
        taken[p] = true;
        for (i, col) in work.iter_mut().enumerate() {
            if !taken[i] {
                let c = dot(&q, col);
                axpy_neg(c, &q, col);
            }
        }
        out.basis.push(q);
        out.pivots.push(p);
        out.residuals.push(res);
    }
    out
}

/// Extends orthonormal `basis` (vectors of length `dim`) to a full orthonormal
/// basis and returns only the added vectors.
pub fn orthogonal_complement(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut added = Vec::new();
    while all.len() < dim {
        // unit vector with the largest residual against the current span
        let mut best: Option<(Vec<f64>, f64)> = None;
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            for _ in 0..2 {
                for b in &all {
                    let c = dot(b, &e);
                    axpy_neg(c, b, &mut e);
                }
            }
            let n = norm2(&e);
            if best.as_ref().is_none_or(|(_, bn)| n > *bn) {
                best = Some((e, n));
            }
        }
        let (mut v, n) = best.expect("dim > 0");
        v.iter_mut().for_each(|x| *x /= n);
        all.push(v.clone());
        added.push(v);
    }
    added
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let m = a.rows();
    if !a.is_square() || b.rows() != m {
        return Err(Error::dim("lu_solve needs a square system"));
    }
    let k = b.cols();
    let mut lu: Vec<Vec<f64>> = (0..m).map(|r| a.row(r).to_vec()).collect();
    let mut rhs: Vec<Vec<f64>> = (0..m).map(|r| b.row(r).to_vec()).collect();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| lu[i][col].abs().total_cmp(&lu[j][col].abs()))
            .unwrap();
        if lu[piv][col].abs() <= 1e-13 * scale {
            return Err(Error::Degenerate(format!("singular system at column {col}")));
        }
        lu.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..m {
            let f = lu[r][col] / lu[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..m {
                lu[r][c] -= f * lu[col][c];
            }
            for c in 0..k {
                rhs[r][c] -= f * rhs[col][c];
            }
        }
    }
    let mut x = vec![vec![0.0; k]; m];
    for r in (0..m).rev() {
        for c in 0..k {
            let mut s = rhs[r][c];
            for j in r + 1..m {
                s -= lu[r][j] * x[j][c];
            }
            x[r][c] = s / lu[r][r];
        }
    }
    DenseMatrix::from_rows(&x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut s: Vec<Vec<f64>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        let total: f64 = s.iter().flatten().map(|v| v * v).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if s[p][q] == 0.0 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| s[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `MᵀM` for a list of columns.
pub fn gram(columns: &[Vec<f64>]) -> DenseMatrix {
    let k = columns.len();
    let mut g = DenseMatrix::zeros(k.max(1), k.max(1));
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = dot(&columns[i], &columns[j]);
        }
    }
    g
}
