//! Gradient-flow refinement of a rough principal eigenvalue.
//!
//! `φ(τ) = ‖(A - τI)^ν x‖²` has a unique local minimizer near `s` when `x` is close
//! to a generalized eigenvector of order `ν`. The scalar flow
//! `dτ/dt = -(γn)^{2(ν-1)} φ'(τ)` is integrated with fixed-step RK4 from `τ(0) = s₀`.

use serde::{Deserialize, Serialize};

use crate::cyclic::{detect_cyclic_order_with, select_dominant_column, CyclicOrderConfig};
use crate::error::{Error, Result};
use crate::iteration::run_from_identity;
use crate::kernels::{shifted_power_vec, shifted_step};
use crate::matrix::{dot, frobenius_norm, DenseMatrix};

pub const DEFAULT_GAMMA: f64 = 0.2;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 100.0;
pub const DEFAULT_DEPTH: usize = 20;

/// `|dτ/dt|` below this value at the final time counts as converged.
pub const CONVERGED_RATE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementResult {
    pub s0: f64,
    pub nu: usize,
    pub n: usize,
    pub gamma: f64,
    pub dt: f64,
    /// `(t, τ(t))` samples, starting with `(0, s₀)` and ending at the final step.
    pub trajectory: Vec<(f64, f64)>,
    pub s_refined: f64,
    pub converged: bool,
    /// `(γn)^{2(ν-1)} dt |φ''(s₀)|`; values above 2 signal that the explicit
    /// step is likely to oscillate.
    pub stability_ratio: f64,
    /// Zero-based column of `W_n` used as `x`, when chosen by the combined method.
    pub column: Option<usize>,
}

/// `φ(τ) = ‖(A - τI)^ν x‖²`
pub fn phi(a: &DenseMatrix, tau: f64, x: &[f64], nu: usize) -> Result<f64> {
    let v = shifted_power_vec(a, tau, nu, x)?;
    Ok(dot(&v, &v))
}

/// `φ'(τ) = -2ν ⟨(A - τI)^{ν-1} x, (A - τI)^ν x⟩`
pub fn phi_prime(a: &DenseMatrix, tau: f64, x: &[f64], nu: usize) -> Result<f64> {
    if nu == 0 {
        return Ok(0.0);
    }
    let low = shifted_power_vec(a, tau, nu - 1, x)?;
    let high = shifted_step(a, tau, &low)?;
    Ok(-2.0 * nu as f64 * dot(&low, &high))
}

/// `φ''(τ) = 2ν(ν-1)⟨(A-τI)^{ν-2}x, (A-τI)^ν x⟩ + 2ν²‖(A-τI)^{ν-1}x‖²`
pub fn phi_second(a: &DenseMatrix, tau: f64, x: &[f64], nu: usize) -> Result<f64> {
    if nu == 0 {
        return Ok(0.0);
    }
    let nu_f = nu as f64;
    if nu == 1 {
        return Ok(2.0 * dot(x, x));
    }
    let v2 = shifted_power_vec(a, tau, nu - 2, x)?;
    let v1 = shifted_step(a, tau, &v2)?;
    let v0 = shifted_step(a, tau, &v1)?;
    Ok(2.0 * nu_f * (nu_f - 1.0) * dot(&v2, &v0) + 2.0 * nu_f * nu_f * dot(&v1, &v1))
}

/// Integrates the gradient flow with classical RK4 at fixed step `dt`.
///
/// Samples are kept every `max(1, round(1/dt))` steps plus the final step.
/// Leaving `[-‖A‖_F - 1, ‖A‖_F + 1]` is reported as divergence.
#[allow(clippy::too_many_arguments)]
pub fn gradient_flow(
    a: &DenseMatrix,
    x: &[f64],
    nu: usize,
    s0: f64,
    gamma: f64,
    n: usize,
    t_end: f64,
    dt: f64,
) -> Result<RefinementResult> {
    if nu == 0 {
        return Err(Error::InvalidArgument("nu must be at least 1".into()));
    }
    if !(gamma > 0.0) || n == 0 || !(dt > 0.0) || !(t_end >= dt) {
        return Err(Error::InvalidArgument(format!(
            "need gamma > 0, n >= 1, dt > 0 and t_end >= dt (gamma={gamma}, n={n}, dt={dt}, t_end={t_end})"
        )));
    }
    if x.len() != a.rows() {
        return Err(Error::dim("flow vector does not match the matrix"));
    }
    let speed = (gamma * n as f64).powi(2 * (nu as i32 - 1));
    let bound = frobenius_norm(a) + 1.0;
    let rhs = |tau: f64| -> Result<f64> { Ok(-speed * phi_prime(a, tau, x, nu)?) };

    let steps = (t_end / dt).round() as usize;
    let every = ((1.0 / dt).round() as usize).max(1);
    let mut tau = s0;
    let mut trajectory = vec![(0.0, s0)];
    for i in 1..=steps {
        let k1 = rhs(tau)?;
        let k2 = rhs(tau + 0.5 * dt * k1)?;
        let k3 = rhs(tau + 0.5 * dt * k2)?;
        let k4 = rhs(tau + dt * k3)?;
        tau += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t = i as f64 * dt;
        if !tau.is_finite() || tau.abs() > bound {
            return Err(Error::Divergence { t, tau });
        }
        if i % every == 0 || i == steps {
            trajectory.push((t, tau));
        }
    }
    let final_rate = rhs(tau)?.abs();
    Ok(RefinementResult {
        s0,
        nu,
        n,
        gamma,
        dt,
        trajectory,
        s_refined: tau,
        converged: final_rate < CONVERGED_RATE,
        stability_ratio: speed * dt * phi_second(a, s0, x, nu)?.abs(),
        column: None,
    })
}

/// Settings for [`combined_method`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedConfig {
    /// Large depth `N` for `s₀` and `j`.
    pub capital_n: usize,
    /// Small depth `n` whose `W_n` column drives the flow.
    pub n: usize,
    /// Flow speed parameter.
    pub gamma: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Cyclic-order detection; its `capital_n` is overwritten by `capital_n` above.
    pub cyclic: CyclicOrderConfig,
}

impl Default for CombinedConfig {
    fn default() -> Self {
        Self {
            capital_n: crate::cyclic::DEFAULT_CAPITAL_N,
            n: DEFAULT_DEPTH,
            gamma: DEFAULT_GAMMA,
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
            cyclic: CyclicOrderConfig::default(),
        }
    }
}

/// Combined method with default cyclic-order settings.
pub fn combined_method(
    a: &DenseMatrix,
    capital_n: usize,
    n: usize,
    gamma: f64,
    t_end: f64,
    dt: f64,
) -> Result<RefinementResult> {
    combined_method_with(
        a,
        &CombinedConfig {
            capital_n,
            n,
            gamma,
            t_end,
            dt,
            cyclic: CyclicOrderConfig::default(),
        },
    )
}

/// Combined method: `s₀` and `j` from `W_N`, `ν` from the β dichotomy, then the
/// gradient flow on column `j` of `W_n`.
pub fn combined_method_with(a: &DenseMatrix, cfg: &CombinedConfig) -> Result<RefinementResult> {
    if cfg.n == 0 || cfg.n >= cfg.capital_n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n < N, got n = {}, N = {}",
            cfg.n, cfg.capital_n
        )));
    }
    let iter_gamma = cfg.cyclic.gamma;
    let base = run_from_identity(a, cfg.capital_n, iter_gamma)?;
    let s0 = base.s_n;
    let j = select_dominant_column(&base.w_n)?;

    let cyc = CyclicOrderConfig {
        capital_n: cfg.capital_n,
        ..cfg.cyclic.clone()
    };
    let report = detect_cyclic_order_with(a, &cyc)?;
    let nu = report.detected_nu.ok_or(Error::CyclicOrderUnresolved)?;

    let small = run_from_identity(a, cfg.n, iter_gamma)?;
    let x = small.w_n.column(j);
    let mut out = gradient_flow(a, &x, nu, s0, cfg.gamma, cfg.n, cfg.t_end, cfg.dt)?;
    out.column = Some(j);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jordan2() -> DenseMatrix {
        DenseMatrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap()
    }

    #[test]
    fn phi_examples() {
        let a = DenseMatrix::identity(2).scale(2.0);
        assert_eq!(phi(&a, 2.0, &[0.3, 0.4], 3).unwrap(), 0.0);
        assert_eq!(phi(&jordan2(), 1.3, &[0.0, 0.0], 2).unwrap(), 0.0);
        assert_eq!(phi(&jordan2(), 2.0, &[0.0, 1.0], 2).unwrap(), 0.0);
        // (A - 3I)^2 (0, 1)ᵀ = (-2, 1)ᵀ
        assert_eq!(phi(&jordan2(), 3.0, &[0.0, 1.0], 2).unwrap(), 5.0);
    }

    #[test]
    fn phi_prime_examples() {
        let a = DenseMatrix::from_rows(&[[3.0]]).unwrap();
        assert_eq!(phi_prime(&a, 1.0, &[1.0], 1).unwrap(), -4.0);
        assert_eq!(phi_prime(&a, 3.0, &[1.0], 1).unwrap(), 0.0);
        let d = DenseMatrix::diagonal(&[1.0, 2.0]);
        assert_eq!(phi_prime(&d, 2.0, &[0.0, 1.0], 1).unwrap(), 0.0);
    }

    #[test]
    fn phi_second_matches_difference_of_phi_prime() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 0.0], [0.5, -1.0, 1.0], [0.0, 0.3, 0.7]]).unwrap();
        let x = [0.2, -0.7, 0.4];
        for nu in 1..=3 {
            let h = 1e-5;
            let fd = (phi_prime(&a, 0.4 + h, &x, nu).unwrap() - phi_prime(&a, 0.4 - h, &x, nu).unwrap())
                / (2.0 * h);
            let exact = phi_second(&a, 0.4, &x, nu).unwrap();
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "nu={nu}");
        }
    }

    #[test]
    fn flow_from_stationary_point_stays_put() {
        let out = gradient_flow(&jordan2(), &[0.0, 1.0], 2, 2.0, 0.2, 20, 5.0, 0.01).unwrap();
        assert!(out.trajectory.iter().all(|&(_, tau)| tau == 2.0));
        assert!(out.converged);
    }

    #[test]
    fn scalar_flow_matches_closed_form() {
        // τ' = 2(3 - τ), τ(0) = 0  ⇒  τ(t) = 3 - 3e^{-2t}
        let a = DenseMatrix::from_rows(&[[3.0]]).unwrap();
        let out = gradient_flow(&a, &[1.0], 1, 0.0, 0.2, 20, 1.0, 0.01).unwrap();
        let exact = 3.0 - 3.0 * (-2.0f64).exp();
        assert!((out.s_refined - exact).abs() < 1e-8);
        assert_eq!(out.trajectory.len(), 2);
        assert_eq!(out.trajectory[0], (0.0, 0.0));
        assert_eq!(out.trajectory.last().unwrap().1, out.s_refined);
    }

    #[test]
    fn sampling_keeps_final_step() {
        let a = DenseMatrix::from_rows(&[[3.0]]).unwrap();
        let out = gradient_flow(&a, &[1.0], 1, 0.0, 0.2, 20, 2.55, 0.01).unwrap();
        let ts: Vec<f64> = out.trajectory.iter().map(|p| p.0).collect();
        assert_eq!(ts.len(), 4);
        assert!((ts[3] - 2.55).abs() < 1e-12);
    }

    #[test]
    fn oversized_step_diverges() {
        let a = DenseMatrix::from_rows(&[[3.0]]).unwrap();
        let err = gradient_flow(&a, &[10.0], 1, 0.0, 0.2, 20, 10.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn flow_argument_checks() {
        let a = DenseMatrix::from_rows(&[[3.0]]).unwrap();
        assert!(gradient_flow(&a, &[1.0], 0, 0.0, 0.2, 20, 1.0, 0.01).is_err());
        assert!(gradient_flow(&a, &[1.0], 1, 0.0, 0.0, 20, 1.0, 0.01).is_err());
        assert!(gradient_flow(&a, &[1.0], 1, 0.0, 0.2, 20, 0.001, 0.01).is_err());
        assert!(gradient_flow(&a, &[1.0, 2.0], 1, 0.0, 0.2, 20, 1.0, 0.01).is_err());
    }

    #[test]
    fn combined_on_scaled_identity() {
        let a = DenseMatrix::identity(3).scale(2.0);
        let out = combined_method_with(&a, &CombinedConfig::default()).unwrap();
        assert_eq!(out.s0, 2.0);
        assert_eq!(out.nu, 1);
        assert_eq!(out.s_refined, 2.0);
        assert!(out.trajectory.iter().all(|&(_, tau)| tau == 2.0));
    }
}
