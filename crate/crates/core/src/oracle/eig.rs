//! Real nonsymmetric eigenvalues: Householder reduction to upper Hessenberg form,
//! then implicit Francis double-shift QR with deflation.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Reduces `a` to upper Hessenberg form by Householder reflections.
pub fn hessenberg(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::dim(format!("eigenvalues need a square matrix, got {:?}", a.shape())));
    }
    let n = a.rows();
    let mut h: Vec<Vec<f64>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| h[i][k] * h[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = -h[k + 1][k].signum() * alpha_sq.sqrt();
        let alpha = if h[k + 1][k] == 0.0 { -alpha_sq.sqrt() } else { alpha };
        let mut v = vec![0.0; n];
        v[k + 1] = h[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = h[i][k];
        }
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // H ← (I - 2vvᵀ/vᵀv) H (I - 2vvᵀ/vᵀv)
        for j in 0..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * h[i][j]).sum::<f64>() * 2.0 / vnorm_sq;
            for i in k + 1..n {
                h[i][j] -= s * v[i];
            }
        }
        for row in h.iter_mut() {
            let s: f64 = (k + 1..n).map(|j| row[j] * v[j]).sum::<f64>() * 2.0 / vnorm_sq;
            for j in k + 1..n {
                row[j] -= s * v[j];
            }
        }
        for i in k + 2..n {
            h[i][k] = 0.0;
        }
    }
    DenseMatrix::from_rows(&h)
}

/// Eigenvalues of a real square matrix as `(re, im)` pairs; complex conjugates
/// are adjacent. Fails after `100 m` QR sweeps without full deflation.
pub fn eig_small(a: &DenseMatrix) -> Result<Vec<(f64, f64)>> {
    let h = hessenberg(a)?;
    let n = h.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|r| h.row(r).to_vec()).collect();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let eps = f64::EPSILON;
    let anorm: f64 = (0..n)
        .flat_map(|i| (i.saturating_sub(1)..n).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].abs())
        .sum();
    let sweep_limit = 100 * n.max(1);
    let mut sweeps = 0;

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // look for a negligible subdiagonal element
            let mut l = nu;
            while l > 0 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }
            sweeps += 1;
            if its >= 60 || sweeps > sweep_limit {
                return Err(Error::Oracle(format!(
                    "QR iteration did not converge after {sweeps} sweeps"
                )));
            }
            if its == 10 || its == 20 || its == 40 {
                // exceptional shift
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // find two consecutive small subdiagonal elements
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            // double QR step on rows l..=nu and columns m..=nu
            let mut k = m;
            while k < nu {
                let mut scale = 0.0;
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    scale = p.abs() + q.abs() + r.abs();
                    if scale != 0.0 {
                        p /= scale;
                        q /= scale;
                        r /= scale;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * scale;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * zz;
                        }
                        a[k + 1][j] -= pp * yy;
                        a[k][j] -= pp * xx;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = xx * row[k] + yy * row[k + 1];
                        if k + 1 != nu {
                            pp += zz * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
            if l + 1 >= nu {
                break;
            }
        }
    }
    let mut out: Vec<(f64, f64)> = wr.into_iter().zip(wi).collect();
    // descending real part, positive imaginary part first so pairs stay adjacent
    out.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.total_cmp(&x.1)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(ev: &[(f64, f64)], expect: &[(f64, f64)], tol: f64) -> bool {
        ev.len() == expect.len()
            && ev
                .iter()
                .zip(expect)
                .all(|(a, b)| (a.0 - b.0).abs() < tol && (a.1 - b.1).abs() < tol)
    }

    #[test]
    fn diagonal_and_rotation() {
        let ev = eig_small(&DenseMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap();
        assert!(close(&ev, &[(3.0, 0.0), (2.0, 0.0), (1.0, 0.0)], 1e-14));
        let rot = DenseMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let ev = eig_small(&rot).unwrap();
        assert!(close(&ev, &[(0.0, 1.0), (0.0, -1.0)], 1e-14));
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let c = DenseMatrix::from_rows(&[
            [10.0, -35.0, 50.0, -24.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let ev = eig_small(&c).unwrap();
        assert!(close(&ev, &[(4.0, 0.0), (3.0, 0.0), (2.0, 0.0), (1.0, 0.0)], 1e-9));
    }

    #[test]
    fn mixed_real_and_complex_block() {
        let a = DenseMatrix::from_rows(&[
            [1.0, 2.0, 0.0, 0.5],
            [-2.0, 1.0, 0.3, 0.0],
            [0.0, 0.0, 5.0, 1.0],
            [0.0, 0.0, 0.0, -1.0],
        ])
        .unwrap();
        let ev = eig_small(&a).unwrap();
        assert!(close(&ev, &[(5.0, 0.0), (1.0, 2.0), (1.0, -2.0), (-1.0, 0.0)], 1e-10));
    }

    #[test]
    fn hessenberg_preserves_trace_and_shape() {
        let a = DenseMatrix::from_rows(&[
            [4.0, 1.0, -2.0, 2.0],
            [1.0, 2.0, 0.0, 1.0],
            [-2.0, 0.0, 3.0, -2.0],
            [2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let h = hessenberg(&a).unwrap();
        for i in 2..4 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        let tr = |m: &DenseMatrix| (0..4).map(|i| m[(i, i)]).sum::<f64>();
        assert!((tr(&a) - tr(&h)).abs() < 1e-12);
        let fa = crate::matrix::frobenius_norm(&a);
        assert!((fa - crate::matrix::frobenius_norm(&h)).abs() < 1e-12);
    }

    #[test]
    fn tiny_inputs() {
        assert_eq!(eig_small(&DenseMatrix::from_rows(&[[7.0]]).unwrap()).unwrap(), vec![(7.0, 0.0)]);
        let z = eig_small(&DenseMatrix::zeros(3, 3)).unwrap();
        assert!(z.iter().all(|&(r, i)| r == 0.0 && i == 0.0));
        assert!(eig_small(&DenseMatrix::zeros(2, 3)).is_err());
    }
}
