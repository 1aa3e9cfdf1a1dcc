//! Lowest eigenpair of `A + f0 B` by restarted Lanczos with full
//! reorthogonalization, in real arithmetic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krylov::eigen_tridiagonal;
use crate::sparse::{hamiltonian_real_into, SparseOperator};
use crate::vector::{normalize_with_phase, StateVector};

const MAX_RESTARTS: usize = 500;
const CYCLE_LENGTH: usize = 80;

/// Returns the normalized ground state (largest amplitude real positive)
/// and its energy. Converged when `||H psi - E psi|| <= tol * max(1, |E|)`.
pub fn ground_state(
    a: &SparseOperator,
    b: &SparseOperator,
    f0: f64,
    tol: f64,
) -> Result<(StateVector, f64)> {
    let n = a.dimension();
    if b.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.dimension(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let m = CYCLE_LENGTH.min(n);
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for j in 0..m {
            hamiltonian_real_into(a, b, f0, &basis[j], &mut w);
            let aj = dot(&basis[j], &w);
            alpha.push(aj);
            if j + 1 == m {
                break;
            }
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let p = dot(v, &w);
                    axpy(-p, v, &mut w);
                }
            }
            let bj = norm(&w);
            if !bj.is_finite() {
                return Err(Error::NotFinite("ground-state Lanczos"));
            }
            if bj < 1e-13 * aj.abs().max(1.0) {
                break;
            }
            beta.push(bj);
            basis.push(w.iter().map(|v| v / bj).collect());
        }
        let eig = eigen_tridiagonal(&alpha, &beta)?;
        let y = eig.eigenvector(0);
        x.iter_mut().for_each(|v| *v = 0.0);
        for (v, &yj) in basis.iter().zip(&y) {
            axpy(yj, v, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);

        hamiltonian_real_into(a, b, f0, &x, &mut w);
        let energy = dot(&x, &w);
        axpy(-energy, &x, &mut w);
        residual = norm(&w);
        if residual <= tol * energy.abs().max(1.0) {
            let mut psi: StateVector = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            normalize_with_phase(&mut psi);
            return Ok((psi, energy));
        }
    }
    Err(Error::GroundStateNoConvergence {
        restarts: MAX_RESTARTS,
        residual,
    })
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
