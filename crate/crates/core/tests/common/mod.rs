#![allow(dead_code)]

use std::path::PathBuf;

use perron_core::linalg::{lu_solve, symmetric_eigenvalues};
use perron_core::{io, matmul, DenseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn fixture(name: &str) -> DenseMatrix {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    io::read_matrix(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
        .unwrap_or_else(|e| panic!("cannot parse {}: {e}", path.display()))
}

/// Seed from `PERRON_EIG_SEED`, default 1.
pub fn seed() -> u64 {
    std::env::var("PERRON_EIG_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    let v: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::new(rows, cols, v).unwrap()
}

pub fn condition_number(s: &DenseMatrix) -> f64 {
    let ev = symmetric_eigenvalues(&matmul(&s.transpose(), s).unwrap());
    (ev[ev.len() - 1] / ev[0].max(f64::MIN_POSITIVE)).sqrt()
}

/// `S J S⁻¹` with a known Jordan structure at the rightmost eigenvalue.
pub struct Planted {
    pub a: DenseMatrix,
    pub s: f64,
    pub nu: usize,
    /// Jordan block sizes at `s`; their sum is the algebraic multiplicity.
    pub blocks: Vec<usize>,
    /// Columns of `S` belonging to the blocks at `s`.
    pub ge: DenseMatrix,
}

/// Size 2..=6, cyclic order 1..=3, `s ∈ [-1, 2)`, every other eigenvalue at least
/// 0.5 to the left of `s` in real part, `cond(S) ≤ 50`.
pub fn planted(rng: &mut impl Rng) -> Planted {
    let m: usize = rng.random_range(2..=6);
    let nu: usize = rng.random_range(1..=m.min(3));
    let s: f64 = rng.random_range(-1.0..2.0);
    let gap: f64 = rng.random_range(0.5..2.0);
    let mut blocks = vec![nu];
    let mut rem = m - nu;
    while rem > 0 && rng.random::<f64>() < 0.4 {
        let b = rng.random_range(1..=nu.min(rem));
        blocks.push(b);
        rem -= b;
    }
    let mut j = DenseMatrix::zeros(m, m);
    let mut i = 0;
    for &b in &blocks {
        for k in 0..b {
            j[(i + k, i + k)] = s;
            if k > 0 {
                j[(i + k - 1, i + k)] = 1.0;
            }
        }
        i += b;
    }
    let alg = i;
    while i < m {
        let re = s - gap - rng.random_range(0.0..2.0);
        if m - i >= 2 && rng.random::<f64>() < 0.4 {
            let im = rng.random_range(0.2..2.0);
            j[(i, i)] = re;
            j[(i + 1, i + 1)] = re;
            j[(i, i + 1)] = im;
            j[(i + 1, i)] = -im;
            i += 2;
        } else {
            j[(i, i)] = re;
            i += 1;
        }
    }
    let sm = loop {
        let cand = gaussian(rng, m, m);
        if condition_number(&cand) <= 50.0 {
            break cand;
        }
    };
    let sinv = lu_solve(&sm, &DenseMatrix::identity(m)).unwrap();
    let a = matmul(&matmul(&sm, &j).unwrap(), &sinv).unwrap();
    let ge = sm.select_columns(&(0..alg).collect::<Vec<_>>()).unwrap();
    Planted { a, s, nu, blocks, ge }
}
