//! Well-conditioned spanning set for the principal generalized eigenspace.
//!
//! With `Ā = A - s̄I`, the shifted iteration `S_n` concentrates on the eigenspace
//! of `s̄` but still carries the polynomial growth `Σ tᵏĀᵏ/k!`. Applying
//! `P̄(n) = Σ_{k≤d} (-1)ᵏ nᵏ/k! Āᵏ` cancels that growth and leaves a matrix whose
//! columns span the eigenspace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::run_iteration;
use crate::linalg::{gram, pivoted_gram_schmidt, symmetric_eigenvalues};
use crate::matrix::{frobenius_norm, matmul, norm2, DenseMatrix};

/// Residual threshold for basis extraction on unit-norm columns.
pub const RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceBasis {
    /// `P̄(n) S_n / ‖P̄(n) S_n‖_F`
    pub b_tilde: DenseMatrix,
    pub s_bar: f64,
    pub nu: usize,
    /// Degree of `P̄`.
    pub d: usize,
    pub n: usize,
    /// Zero-based columns of `b_tilde` forming the basis, in pivot order.
    pub selected_columns: Vec<usize>,
    pub dim_estimate: usize,
    /// Smallest eigenvalue of the Gram matrix of the normalized selected columns.
    pub conditioning: f64,
}

impl EigenspaceBasis {
    /// Selected columns of `b_tilde`, each scaled to unit length.
    pub fn basis(&self) -> DenseMatrix {
        let cols: Vec<Vec<f64>> = self
            .selected_columns
            .iter()
            .map(|&c| {
                let v = self.b_tilde.column(c);
                let n = norm2(&v);
                v.iter().map(|x| x / n).collect()
            })
            .collect();
        DenseMatrix::from_columns(&cols).expect("selected columns are non-empty and finite")
    }
}

/// `Σ_{k=0}^{d} (-1)ᵏ tᵏ/k! (A - s̄I)ᵏ x`, one shifted multiply per term.
pub fn p_bar_apply(a: &DenseMatrix, s_bar: f64, d: usize, t: f64, x: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() || a.cols() != x.rows() {
        return Err(Error::dim(format!(
            "operator {:?} cannot act on {:?}",
            a.shape(),
            x.shape()
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    let mut term = x.clone();
    let mut acc = x.clone();
    for k in 0..d {
        let next = matmul(a, &term)?.sub(&term.scale(s_bar))?;
        term = next.scale(-t / (k + 1) as f64);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `S_n` from the normalized iteration on `A - s̄I` with `γ = 1`.
pub fn run_shifted_iteration(a: &DenseMatrix, s_bar: f64, v: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    run_shifted_iteration_with_gamma(a, s_bar, v, n, 1.0)
}

/// [`run_shifted_iteration`] with an explicit `γ` for badly scaled inputs.
pub fn run_shifted_iteration_with_gamma(
    a: &DenseMatrix,
    s_bar: f64,
    v: &DenseMatrix,
    n: usize,
    gamma: f64,
) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::dim(format!("matrix must be square, got {:?}", a.shape())));
    }
    Ok(run_iteration(&a.shifted(s_bar)?, v, n, gamma)?.w_n)
}

/// Builds `B̃ = P̄(n)S_n/‖P̄(n)S_n‖` with `d = ν - 1` and extracts a basis from its
/// columns by pivoted Gram–Schmidt at [`RANK_TOL`].
pub fn compute_basis(a: &DenseMatrix, s_bar: f64, nu: usize, n: usize, v: &DenseMatrix) -> Result<EigenspaceBasis> {
    compute_basis_with(a, s_bar, nu, nu.saturating_sub(1), n, v, 1.0)
}

/// [`compute_basis`] with explicit polynomial degree `d` and iteration `γ`.
/// The polynomial is evaluated at `t = γn`.
pub fn compute_basis_with(
    a: &DenseMatrix,
    s_bar: f64,
    nu: usize,
    d: usize,
    n: usize,
    v: &DenseMatrix,
    gamma: f64,
) -> Result<EigenspaceBasis> {
    if nu == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need nu >= 1 and n >= 1, got nu = {nu}, n = {n}"
        )));
    }
    let s_n = run_shifted_iteration_with_gamma(a, s_bar, v, n, gamma)?;
    let raw = p_bar_apply(a, s_bar, d, gamma * n as f64, &s_n)?;
    let b_tilde = raw.normalized().map_err(|_| Error::EmptySpace)?;

    let unit: Vec<Vec<f64>> = b_tilde
        .columns()
        .into_iter()
        .map(|c| {
            let n = norm2(&c);
            if n > 0.0 {
                c.iter().map(|x| x / n).collect()
            } else {
                c
            }
        })
        .collect();
    let gs = pivoted_gram_schmidt(&unit, RANK_TOL);
    if gs.pivots.is_empty() {
        return Err(Error::EmptySpace);
    }
    let chosen: Vec<Vec<f64>> = gs.pivots.iter().map(|&p| unit[p].clone()).collect();
    let conditioning = symmetric_eigenvalues(&gram(&chosen))[0];

    Ok(EigenspaceBasis {
        b_tilde,
        s_bar,
        nu,
        d,
        n,
        dim_estimate: gs.pivots.len(),
        selected_columns: gs.pivots,
        conditioning,
    })
}

/// Sine of the largest principal angle between the column spans of `u` and `w`.
///
/// Both are orthonormalized first. With `Q_u` the smaller basis, the result is
/// the spectral norm of `Q_u - Q_w Q_wᵀ Q_u`, which stays accurate for tiny
/// angles where `sqrt(1 - σ_min²)` would not.
pub fn subspace_gap(u: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    if u.rows() != w.rows() {
        return Err(Error::dim("subspaces live in spaces of different dimension"));
    }
    let qu = orthonormal_columns(u)?;
    let qw = orthonormal_columns(w)?;
    let (small, big) = if qu.len() <= qw.len() { (qu, qw) } else { (qw, qu) };
    let residual: Vec<Vec<f64>> = small
        .iter()
        .map(|q| {
            let mut r = q.clone();
            for _ in 0..2 {
                for b in &big {
                    let c = crate::matrix::dot(b, &r);
                    crate::matrix::axpy_neg(c, b, &mut r);
                }
            }
            r
        })
        .collect();
    let ev = symmetric_eigenvalues(&gram(&residual));
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt().min(1.0))
}

fn orthonormal_columns(m: &DenseMatrix) -> Result<Vec<Vec<f64>>> {
    let scale = frobenius_norm(m);
    if scale == 0.0 {
        return Err(Error::Degenerate("zero subspace spanning set".into()));
    }
    let gs = pivoted_gram_schmidt(&m.columns(), 1e-12 * scale);
    if gs.pivots.len() < m.cols() {
        return Err(Error::Degenerate(format!(
            "spanning set has rank {} < {} columns",
            gs.pivots.len(),
            m.cols()
        )));
    }
    Ok(gs.basis)
}
