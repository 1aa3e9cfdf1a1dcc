use num_complex::Complex64;

use super::{check_tolerance, Method, Problem, PropagationRecord, Run, RunOptions};
use crate::error::{Error, Result};
use crate::krylov::{build_krylov, last_coefficient, propagate_in_krylov};
use crate::sparse::hamiltonian_into;
use crate::vector::StateVector;

/// Constant-Hamiltonian propagation with a fixed Krylov dimension.
///
/// Each step builds a `krylov_dim` space for `H = A + f B` and takes the
/// longest step `(t_stop - t) / 2^k` whose last Krylov coefficient stays
/// within `tol`.
pub fn propagate_alc(
    problem: &Problem,
    f_const: f64,
    psi0: &[Complex64],
    t_span: (f64, f64),
    tol: f64,
    krylov_dim: usize,
    options: RunOptions,
) -> Result<(StateVector, PropagationRecord)> {
    check_tolerance(tol)?;
    if krylov_dim < 2 {
        return Err(Error::InvalidArgument("Krylov dimension must be at least 2".into()));
    }
    let mut run = Run::start(problem, Method::Alc, psi0, t_span, options)?;
    let mut psi = psi0.to_vec();
    while !run.finished() {
        let counter = &run.counter;
        let built = build_krylov(
            |x, y| {
                hamiltonian_into(problem.a, problem.b, f_const, x, y);
                counter.add(1);
            },
            &psi,
            krylov_dim,
        )?;
        let space = built.into_space();
        let eig = space.eigen()?;
        let (mut h, _) = run.clamp(f64::INFINITY);
        let mut c_last = last_coefficient(&space, &eig, h);
        while c_last > tol {
            h *= 0.5;
            run.check_underflow(h)?;
            c_last = last_coefficient(&space, &eig, h);
        }
        let (next, _) = propagate_in_krylov(&space, &eig, h);
        run.accept(&next, h, c_last, space.dim(), 0);
        psi = next;
    }
    Ok((psi, run.finish()))
}
