//! Double-index normalized Taylor iteration.
//!
//! For a fixed degree `n`, `M_n(0) = V/‖V‖` and
//! `M_n(k+1) = T_n(γ) M_n(k) / ‖T_n(γ) M_n(k)‖`, where `T_n(γ)` is the degree-`n`
//! Taylor polynomial of `e^{γA}`. After `n` steps `W_n = M_n(n)` approximates the
//! normalized dominant part of `e^{γnA} V`, and the Rayleigh value
//! `s_n = ⟨A W_n, W_n⟩` estimates the principal eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::taylor_apply;
use crate::linalg::pivoted_gram_schmidt;
use crate::matrix::{frobenius_inner, frobenius_norm, matmul, DenseMatrix};

/// Depth used when the caller does not pick one.
pub const DEFAULT_DEPTH: usize = 50;

/// Norms below this value mean `T_n(γ)` annihilated the iterate.
pub const SINGULAR_NORM: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub n: usize,
    pub gamma: f64,
    /// `W_n = M_n(n)`, unit Frobenius norm.
    pub w_n: DenseMatrix,
    /// Rayleigh estimate `⟨A W_n, W_n⟩`.
    pub s_n: f64,
    /// `(k, ⟨A M_n(k), M_n(k)⟩)` for `k = 0..=n`.
    pub rayleigh_trace: Vec<(usize, f64)>,
    pub init_description: String,
}

/// `γ = min(1, 2/‖A‖_F)`, so that `‖γA‖_F ≤ 2`.
pub fn default_gamma(a: &DenseMatrix) -> f64 {
    let norm = frobenius_norm(a);
    if norm == 0.0 {
        1.0
    } else {
        (2.0 / norm).min(1.0)
    }
}

/// One normalized step `T_n(γ) m / ‖T_n(γ) m‖`.
pub fn k_step(a: &DenseMatrix, m: &DenseMatrix, n: usize, gamma: f64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("Taylor degree n must be at least 1".into()));
    }
    if frobenius_norm(m) == 0.0 {
        return Err(Error::Degenerate("iterate has zero norm".into()));
    }
    let next = taylor_apply(a, m, n, gamma)?;
    let norm = frobenius_norm(&next);
    if !norm.is_finite() {
        return Err(Error::Overflow { term: n });
    }
    if norm < SINGULAR_NORM {
        return Err(Error::SingularIteration { norm });
    }
    let out = next.scale(1.0 / norm);
    if !out.all_finite() {
        return Err(Error::Overflow { term: n });
    }
    Ok(out)
}

/// Heuristic nonsingularity test for an initial matrix.
///
/// Rejects any column with norm below `1e-12`, or a numerical rank below `m`
/// from pivoted Gram–Schmidt at tolerance `1e-10 ‖V‖_F`.
pub fn check_nonsingular(v: &DenseMatrix) -> Result<()> {
    if !v.is_square() {
        return Err(Error::dim(format!("initial matrix must be square, got {:?}", v.shape())));
    }
    let m = v.rows();
    if v.column_norms().iter().any(|&c| c < 1e-12) {
        let rank = m - v.column_norms().iter().filter(|&&c| c < 1e-12).count();
        return Err(Error::SingularInit { rank, dim: m });
    }
    let gs = pivoted_gram_schmidt(&v.columns(), 1e-10 * frobenius_norm(v));
    if gs.pivots.len() < m {
        return Err(Error::SingularInit {
            rank: gs.pivots.len(),
            dim: m,
        });
    }
    Ok(())
}

/// Runs `n` normalized steps of degree `n` from `V` (normalized first).
pub fn run_iteration(a: &DenseMatrix, v: &DenseMatrix, n: usize, gamma: f64) -> Result<SpectralEstimate> {
    if !a.is_square() {
        return Err(Error::dim(format!("matrix must be square, got {:?}", a.shape())));
    }
    if v.shape() != a.shape() {
        return Err(Error::dim(format!(
            "initial matrix {:?} does not match {:?}",
            v.shape(),
            a.shape()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("depth n must be at least 1".into()));
    }
    check_nonsingular(v)?;

    let mut m = v.normalized()?;
    let mut trace = Vec::with_capacity(n + 1);
    trace.push((0, rayleigh(a, &m)?));
    for k in 1..=n {
        m = k_step(a, &m, n, gamma)?;
        trace.push((k, rayleigh(a, &m)?));
    }
    let s_n = trace[n].1;
    Ok(SpectralEstimate {
        n,
        gamma,
        w_n: m,
        s_n,
        rayleigh_trace: trace,
        init_description: if v.is_identity() { "identity".into() } else { "custom".into() },
    })
}

/// [`run_iteration`] started from the identity.
pub fn run_from_identity(a: &DenseMatrix, n: usize, gamma: f64) -> Result<SpectralEstimate> {
    run_iteration(a, &DenseMatrix::identity(a.rows()), n, gamma)
}

/// `⟨A M, M⟩ / ⟨M, M⟩`; the divisor is 1 up to rounding for normalized iterates.
pub fn rayleigh(a: &DenseMatrix, m: &DenseMatrix) -> Result<f64> {
    Ok(frobenius_inner(&matmul(a, m)?, m)? / frobenius_inner(m, m)?)
}

/// `X_n(t) = Σ_{k≤n} t^k A^k V / k!`, normalized. Evaluated in one shot, without
/// intermediate renormalization, so it is only usable for moderate `t‖A‖`.
pub fn direct_taylor_state(a: &DenseMatrix, v: &DenseMatrix, t: f64, n: usize) -> Result<DenseMatrix> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return v.normalized();
    }
    let x = taylor_apply(a, v, n, t)?;
    x.normalized()
}
