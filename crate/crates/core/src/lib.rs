//! Principal eigenvalue, cyclic order and generalized eigenspace of Perron-like
//! matrices through normalized Taylor-polynomial iterations of `e^{γA}`.
//!
//! A real square matrix is Perron-like when it has a real eigenvalue `s` whose
//! real part strictly exceeds that of every other eigenvalue. The pipeline is:
//!
//! 1. [`run_iteration`] gives a rough `s_N` and the dominant column `j`;
//! 2. [`detect_cyclic_order`] finds the size `ν` of the largest Jordan block at `s`;
//! 3. [`gradient_flow`] sharpens `s_N` to a high-accuracy `s̄`;
//! 4. [`compute_basis`] returns a well-conditioned basis of the eigenspace of `s̄`.
//!
//! [`oracle`] holds independent dense reference computations.

pub mod cyclic;
pub mod eigenspace;
pub mod error;
pub mod io;
pub mod iteration;
pub mod kernels;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod refine;

pub use cyclic::{
    beta, beta_sequence, detect_cyclic_order, detect_cyclic_order_with, dichotomy_index, psi_bar,
    select_dominant_column, BetaRow, CyclicOrderConfig, CyclicOrderReport,
};
pub use eigenspace::{compute_basis, p_bar_apply, run_shifted_iteration, subspace_gap, EigenspaceBasis};
pub use error::{Error, Result};
pub use iteration::{default_gamma, k_step, run_from_identity, run_iteration, SpectralEstimate};
pub use kernels::{shifted_power_apply, taylor_apply};
pub use matrix::{frobenius_inner, frobenius_norm, matmul, DenseMatrix};
pub use oracle::{oracle_report, OracleReport};
pub use refine::{combined_method, combined_method_with, gradient_flow, phi, phi_prime, CombinedConfig, RefinementResult};
