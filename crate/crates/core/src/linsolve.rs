//! Full (unrestarted) GMRES for complex linear systems.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vector::{self, StateVector, ZERO};

#[derive(Clone, Copy, Debug)]
pub struct GmresConfig {
    /// Stop when `||A x - b|| / ||b||` falls to this value.
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-6,
            max_iterations: 100,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub solution: StateVector,
    /// Arnoldi iterations after the initial residual check.
    pub iterations: usize,
    /// Relative residual estimate at exit.
    pub residual: f64,
    /// Relative residual after the initial check and after each iteration.
    pub history: Vec<f64>,
}

/// Solves `A x = rhs` from `guess`. `apply_lhs` computes `y = A x`; it is
/// called once for the initial residual and once per iteration.
pub fn gmres_solve<F>(
    mut apply_lhs: F,
    rhs: &[Complex64],
    guess: &[Complex64],
    cfg: &GmresConfig,
) -> Result<GmresOutcome>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    if !(cfg.residual_tol > 0.0) {
        return Err(Error::InvalidArgument("GMRES tolerance must be positive".into()));
    }
    if rhs.len() != guess.len() {
        return Err(Error::DimensionMismatch {
            expected: rhs.len(),
            actual: guess.len(),
        });
    }
    let n = rhs.len();
    let rhs_norm = vector::norm(rhs);
    if rhs_norm == 0.0 {
        return Ok(GmresOutcome {
            solution: vec![ZERO; n],
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
        });
    }

    let mut x = guess.to_vec();
    let mut r = vec![ZERO; n];
    apply_lhs(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
    let beta = vector::norm(&r);
    let mut history = vec![beta / rhs_norm];
    if beta / rhs_norm <= cfg.residual_tol {
        return Ok(GmresOutcome {
            solution: x,
            iterations: 0,
            residual: beta / rhs_norm,
            history,
        });
    }

    let m = cfg.max_iterations;
    let mut basis: Vec<StateVector> = Vec::with_capacity(m + 1);
    basis.push(r.iter().map(|z| z / beta).collect());
    // columns of the Hessenberg matrix after rotation, stored column-wise
    let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut cs: Vec<f64> = Vec::with_capacity(m);
    let mut sn: Vec<Complex64> = Vec::with_capacity(m);
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut w = vec![ZERO; n];

    for k in 0..m {
        apply_lhs(&basis[k], &mut w);
        let mut col = vec![ZERO; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hik = vector::dot(v, &w);
            col[i] = hik;
            vector::axpy(-hik, v, &mut w);
        }
        let hnext = vector::norm(&w);
        col[k + 1] = Complex64::new(hnext, 0.0);

        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i].conj() * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let (c, s, rr) = givens(col[k], col[k + 1]);
        cs.push(c);
        sn.push(s);
        col[k] = rr;
        col[k + 1] = ZERO;
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s.conj() * gk);
        h.push(col);

        let res = g[k + 1].norm() / rhs_norm;
        history.push(res);
        let done = res <= cfg.residual_tol || hnext <= f64::EPSILON * beta;
        if done {
            let y = back_substitute(&h, &g[..k + 1]);
            for (v, yi) in basis.iter().zip(&y) {
                vector::axpy(*yi, v, &mut x);
            }
            return Ok(GmresOutcome {
                solution: x,
                iterations: k + 1,
                residual: res,
                history,
            });
        }
        basis.push(w.iter().map(|z| z / hnext).collect());
    }
    Err(Error::GmresNoConvergence {
        iterations: m,
        history,
    })
}

/// Complex Givens rotation zeroing `b` against `a`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO, a);
    }
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0), b);
    }
    let r = an.hypot(bn);
    let phase = a / an;
    let c = an / r;
    let s = phase * b.conj() / r;
    (c, s, phase * r)
}

fn back_substitute(h: &[Vec<Complex64>], g: &[Complex64]) -> Vec<Complex64> {
    let k = g.len();
    let mut y = vec![ZERO; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for j in i + 1..k {
            acc -= h[j][i] * y[j];
        }
        y[i] = acc / h[i][i];
    }
    y
}
