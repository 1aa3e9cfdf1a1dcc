//! Symmetric tridiagonal eigen-decomposition by implicit-shift QL iteration.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// `T = Q diag(values) Q^T`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector of `values[k]`.
    vectors: Vec<f64>,
}

impl TridiagonalEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Component `row` of eigenvector `col`.
    #[inline]
    pub fn q(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * self.values.len() + col]
    }

    pub fn eigenvector(&self, col: usize) -> Vec<f64> {
        (0..self.dim()).map(|r| self.q(r, col)).collect()
    }
}

/// Diagonalizes the symmetric tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta` (`beta.len() + 1 == alpha.len()`).
pub fn eigen_tridiagonal(alpha: &[f64], beta: &[f64]) -> Result<TridiagonalEigen> {
    let n = alpha.len();
    assert_eq!(beta.len() + 1, n.max(1), "off-diagonal length must be n - 1");
    if n == 0 {
        return Ok(TridiagonalEigen {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(beta);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigenNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zi1 = z[k * n + i + 1];
                    let zi = z[k * n + i];
                    z[k * n + i + 1] = s * zi + c * zi1;
                    z[k * n + i] = c * zi - s * zi1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    for v in d.iter() {
        if !v.is_finite() {
            return Err(Error::NotFinite("tridiagonal eigensolver"));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        // sign: first non-negligible component positive
        let pivot = (0..n)
            .map(|r| z[r * n + old])
            .find(|x| x.abs() > 1e-14)
            .unwrap_or(1.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[r * n + new] = sign * z[r * n + old];
        }
    }
    Ok(TridiagonalEigen { values, vectors })
}
