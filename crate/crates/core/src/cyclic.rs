//! Cyclic order of the principal generalized eigenspace from the β-ratio dichotomy.
//!
//! With `w` the dominant column of `W_n` and `s̄` a rough principal eigenvalue,
//! `ψ_k = (γn)^{2k} ‖(A - s̄I)^k w‖²` and `β_k = ψ_k / ψ_{k-1}`. For `k` below the
//! cyclic order `ν` the ratios stay of order one, while `β_ν` collapses towards
//! zero. A probe point `(N, n)` shows the dichotomy at `k₀` when
//! `β_k ≥ 1 - ε` for every `k < k₀` and `β_{k₀} < ε`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::{run_from_identity, SpectralEstimate};
use crate::kernels::{shifted_power_vec, shifted_step};
use crate::matrix::{dot, DenseMatrix};

/// Denominators below this value make `β_k` undefined.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-300;

pub const DEFAULT_EPSILON: f64 = 0.10;
pub const DEFAULT_CAPITAL_N: usize = 100;

/// Settings for [`detect_cyclic_order_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicOrderConfig {
    /// Large depth `N` giving `s_N` and the column index `j`.
    pub capital_n: usize,
    /// Extra large depths `N + offset` probed with the same `j`.
    pub depth_offsets: Vec<usize>,
    /// Small depths `n` at which the β ratios are evaluated.
    pub n_grid: Vec<usize>,
    pub epsilon: f64,
    /// Iteration parameter; `β` uses the effective time `γn`.
    pub gamma: f64,
}

impl Default for CyclicOrderConfig {
    fn default() -> Self {
        Self {
            capital_n: DEFAULT_CAPITAL_N,
            depth_offsets: vec![0, 5, 10],
            n_grid: (4..=10).collect(),
            epsilon: DEFAULT_EPSILON,
            gamma: 1.0,
        }
    }
}

/// β values at one probe point `(N, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub capital_n: usize,
    pub s_approx: f64,
    pub n: usize,
    /// `betas[k]` is `β_k`; `betas[0] = 1`. Shorter than `m + 1` when the
    /// column was annihilated exactly.
    pub betas: Vec<f64>,
    /// `k₀` if this row shows the dichotomy.
    pub dichotomy: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicOrderReport {
    pub capital_n: usize,
    /// `s_N` at the base depth.
    pub s_approx: f64,
    /// One-based dominant column index, `1 ≤ j ≤ m`.
    pub j: usize,
    pub epsilon: f64,
    pub beta_grid: Vec<BetaRow>,
    pub detected_nu: Option<usize>,
    /// Every row that showed a dichotomy agreed on the same index.
    pub stable: bool,
}

/// Zero-based index of the first column with maximal 2-norm.
pub fn select_dominant_column(w: &DenseMatrix) -> Result<usize> {
    let norms = w.column_norms();
    let (mut best, mut best_norm) = (0, norms[0]);
    for (i, &n) in norms.iter().enumerate().skip(1) {
        if n > best_norm {
            best = i;
            best_norm = n;
        }
    }
    if best_norm == 0.0 {
        return Err(Error::Degenerate("dominant column of a zero matrix".into()));
    }
    Ok(best)
}

/// `ψ_k(n, s̄) = n^{2k} ‖(A - s̄I)^k w‖²`.
pub fn psi_bar(a: &DenseMatrix, s_bar: f64, w_col: &[f64], n: usize, k: usize) -> Result<f64> {
    psi_bar_at_time(a, s_bar, w_col, n as f64, k)
}

/// [`psi_bar`] with a real time scale `t` in place of `n`.
pub fn psi_bar_at_time(a: &DenseMatrix, s_bar: f64, w_col: &[f64], t: f64, k: usize) -> Result<f64> {
    let v = shifted_power_vec(a, s_bar, k, w_col)?;
    Ok(t.powi(2 * k as i32) * dot(&v, &v))
}

/// `β_k(n, s̄) = ψ_k / ψ_{k-1}`, with `β_0 = 1`.
pub fn beta(a: &DenseMatrix, s_bar: f64, w_col: &[f64], n: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let prev = shifted_power_vec(a, s_bar, k - 1, w_col)?;
    let den = dot(&prev, &prev);
    if den < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateRatio { k, order: k - 1 });
    }
    let next = shifted_step(a, s_bar, &prev)?;
    let t = n as f64;
    Ok(t * t * dot(&next, &next) / den)
}

/// `β_0..=β_max_k` at time scale `t`, stopping early when the column is annihilated.
pub fn beta_sequence(a: &DenseMatrix, s_bar: f64, w_col: &[f64], t: f64, max_k: usize) -> Result<Vec<f64>> {
    let mut out = vec![1.0];
    let mut prev = w_col.to_vec();
    let mut den = dot(&prev, &prev);
    for _ in 1..=max_k {
        if den < DEGENERATE_DENOMINATOR {
            break;
        }
        let next = shifted_step(a, s_bar, &prev)?;
        let num = dot(&next, &next);
        out.push(t * t * num / den);
        prev = next;
        den = num;
    }
    Ok(out)
}

/// The smallest `k₀ ≥ 1` with `β_k ≥ 1 - ε` for `k < k₀` and `β_{k₀} < ε`.
/// Ratios strictly between the two thresholds void the row.
pub fn dichotomy_index(betas: &[f64], epsilon: f64) -> Option<usize> {
    for (k, &b) in betas.iter().enumerate().skip(1) {
        if b < epsilon {
            return Some(k);
        }
        if b < 1.0 - epsilon {
            return None;
        }
    }
    None
}

/// [`detect_cyclic_order_with`] using the default depth offsets and `γ = 1`.
pub fn detect_cyclic_order(
    a: &DenseMatrix,
    capital_n: usize,
    n_grid: &[usize],
    epsilon: f64,
) -> Result<CyclicOrderReport> {
    detect_cyclic_order_with(
        a,
        &CyclicOrderConfig {
            capital_n,
            n_grid: n_grid.to_vec(),
            epsilon,
            ..CyclicOrderConfig::default()
        },
    )
}

/// Runs the three-step scheme: `s_N` and `j` from depth `N`, then β rows for every
/// `(N + offset, n)` probe. `ν` is reported once the same dichotomy index appears at
/// two or more distinct `n` (at any of the depths) and no other index is seen at as
/// many distinct `n`.
pub fn detect_cyclic_order_with(a: &DenseMatrix, cfg: &CyclicOrderConfig) -> Result<CyclicOrderReport> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {}",
            cfg.epsilon
        )));
    }
    if cfg.n_grid.is_empty() {
        return Err(Error::InvalidArgument("n grid is empty".into()));
    }
    if let Some(&n) = cfg.n_grid.iter().find(|&&n| n == 0 || n >= cfg.capital_n) {
        return Err(Error::InvalidArgument(format!(
            "grid depth {n} must satisfy 1 <= n < N = {}",
            cfg.capital_n
        )));
    }
    let m = a.rows();
    let base = run_from_identity(a, cfg.capital_n, cfg.gamma)?;
    let j = select_dominant_column(&base.w_n)?;

    let small: Vec<SpectralEstimate> = cfg
        .n_grid
        .iter()
        .map(|&n| run_from_identity(a, n, cfg.gamma))
        .collect::<Result<_>>()?;

    let mut offsets = cfg.depth_offsets.clone();
    if !offsets.contains(&0) {
        offsets.insert(0, 0);
    }
    let mut rows = Vec::new();
    for off in offsets {
        let s_approx = if off == 0 {
            base.s_n
        } else {
            run_from_identity(a, cfg.capital_n + off, cfg.gamma)?.s_n
        };
        for est in &small {
            let col = est.w_n.column(j);
            let betas = beta_sequence(a, s_approx, &col, cfg.gamma * est.n as f64, m)?;
            let dichotomy = dichotomy_index(&betas, cfg.epsilon);
            rows.push(BetaRow {
                capital_n: cfg.capital_n + off,
                s_approx,
                n: est.n,
                betas,
                dichotomy,
            });
        }
    }

    // each k₀ is credited once per distinct n, however many depths N agree there
    let mut votes: Vec<(usize, Vec<usize>)> = Vec::new();
    for row in &rows {
        let Some(k0) = row.dichotomy else { continue };
        match votes.iter_mut().find(|(k, _)| *k == k0) {
            Some((_, ns)) if !ns.contains(&row.n) => ns.push(row.n),
            Some(_) => {}
            None => votes.push((k0, vec![row.n])),
        }
    }
    let top = votes.iter().map(|(_, ns)| ns.len()).max().unwrap_or(0);
    let leaders: Vec<usize> = votes.iter().filter(|(_, ns)| ns.len() == top).map(|(k, _)| *k).collect();
    let detected_nu = (top >= 2 && leaders.len() == 1).then(|| leaders[0]);

    Ok(CyclicOrderReport {
        capital_n: cfg.capital_n,
        s_approx: base.s_n,
        j: j + 1,
        epsilon: cfg.epsilon,
        beta_grid: rows,
        detected_nu,
        stable: detected_nu.is_some() && votes.len() == 1,
    })
}
