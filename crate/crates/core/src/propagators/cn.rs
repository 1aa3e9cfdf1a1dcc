use num_complex::Complex64;

use super::rk::check_fixed_step;
use super::{Method, Problem, PropagationRecord, Run, RunOptions};
use crate::error::Result;
use crate::linsolve::{gmres_solve, GmresConfig};
use crate::vector::{StateVector, ZERO};

/// Crank-Nicolson with a fixed step:
/// `(1 + i h/2 H(t+h)) psi' = (1 - i h/2 H(t)) psi`, solved by GMRES from
/// the explicit Euler prediction `psi - i h H(t) psi`.
///
/// Per step: one matvec for `H(t) psi`, one for the initial GMRES residual,
/// one per GMRES iteration.
pub fn propagate_cn_fixed(
    problem: &Problem,
    psi0: &[Complex64],
    t_span: (f64, f64),
    dt: f64,
    gmres: GmresConfig,
    options: RunOptions,
) -> Result<(StateVector, PropagationRecord)> {
    check_fixed_step(dt)?;
    let mut run = Run::start(problem, Method::Cn, psi0, t_span, options)?;
    let n = psi0.len();
    let mut psi = psi0.to_vec();
    let mut hpsi = vec![ZERO; n];
    let mut rhs = vec![ZERO; n];
    let mut guess = vec![ZERO; n];
    while !run.finished() {
        let t = run.t;
        let (h, _) = run.clamp(dt);
        problem.apply_h(t, &psi, &mut hpsi, &run.counter);
        // -i z = (z.im, -z.re)
        for i in 0..n {
            let mih = Complex64::new(hpsi[i].im, -hpsi[i].re);
            rhs[i] = psi[i] + mih * (0.5 * h);
            guess[i] = psi[i] + mih * h;
        }
        let t_next = t + h;
        let counter = &run.counter;
        let outcome = gmres_solve(
            |x, y| {
                problem.apply_h(t_next, x, y, counter);
                for (yi, xi) in y.iter_mut().zip(x) {
                    // x + i h/2 H x
                    *yi = xi + Complex64::new(-yi.im, yi.re) * (0.5 * h);
                }
            },
            &rhs,
            &guess,
            &gmres,
        )?;
        psi = outcome.solution;
        run.accept(&psi, h, outcome.residual, 0, outcome.iterations);
    }
    Ok((psi, run.finish()))
}
