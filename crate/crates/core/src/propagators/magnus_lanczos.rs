//! Adaptive Lanczos propagation for time-dependent Hamiltonians.

use num_complex::Complex64;

use super::magnus::{MagnusCoefficients, MagnusGenerator, MagnusOrder};
use super::{
    adjust_step, check_tolerance, Method, Problem, PropagationRecord, Run, RunOptions,
    KRYLOV_SHRINK_FRACTION, STEP_FACTOR,
};
use crate::error::{Error, Result};
use crate::krylov::{combine, krylov_coefficients, Lanczos};
use crate::vector::{self, StateVector};

/// Result of growing a Krylov space until the last coefficient is small.
#[derive(Clone, Debug)]
pub enum KrylovStep {
    Converged { psi: StateVector, dim: usize },
    /// `dk_max` was reached with `|c_last|` still above tolerance.
    Exhausted { dim: usize },
}

impl KrylovStep {
    pub fn dim(&self) -> usize {
        match self {
            Self::Converged { dim, .. } | Self::Exhausted { dim } => *dim,
        }
    }
}

/// Computes `exp(-i M) psi`, adding one Lanczos vector at a time until
/// `|c_last| <= tol` or the space becomes invariant.
pub fn adaptive_krylov_step<F>(apply: F, psi: &[Complex64], tol: f64, dk_max: usize) -> Result<KrylovStep>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    if dk_max < 2 {
        return Err(Error::InvalidArgument("Krylov cap must be at least 2".into()));
    }
    let mut lanczos = Lanczos::new(psi, apply)?;
    loop {
        lanczos.extend()?;
        let dim = lanczos.dim();
        if dim < 2 && !lanczos.is_invariant() {
            continue;
        }
        let eig = lanczos.eigen()?;
        if lanczos.last_coefficient(&eig, 1.0) <= tol {
            let coeffs = krylov_coefficients(&eig, 1.0);
            let space = lanczos.into_space();
            return Ok(KrylovStep::Converged {
                psi: combine(&space.vectors, &coeffs),
                dim,
            });
        }
        if dim >= dk_max {
            return Ok(KrylovStep::Exhausted { dim });
        }
    }
}

fn magnus_step(
    problem: &Problem,
    counter: &crate::sparse::MatvecCounter,
    psi: &[Complex64],
    t: f64,
    h: f64,
    order: MagnusOrder,
    tol: f64,
    dk_max: usize,
) -> Result<KrylovStep> {
    let coeffs = MagnusCoefficients::new(problem.drive, t, h, order);
    let mut generator = MagnusGenerator::new(problem.a, problem.b, coeffs, order, counter);
    adaptive_krylov_step(|x, y| generator.apply(x, y), psi, tol, dk_max)
}

enum Trial {
    Accepted { psi: StateVector, error: f64, dim: usize },
    Rejected { error: f64, dim: usize },
}

fn drive_loop(
    problem: &Problem,
    method: Method,
    psi0: &[Complex64],
    t_span: (f64, f64),
    tol: f64,
    dk_max: usize,
    options: RunOptions,
    mut trial: impl FnMut(&Run, &[Complex64], f64) -> Result<Trial>,
) -> Result<(StateVector, PropagationRecord)> {
    check_tolerance(tol)?;
    let mut run = Run::start(problem, method, psi0, t_span, options)?;
    let mut psi = psi0.to_vec();
    let mut dt = t_span.1 - t_span.0;
    while !run.finished() {
        run.check_underflow(dt)?;
        let (h, shortened) = run.clamp(dt);
        match trial(&run, &psi, h)? {
            Trial::Rejected { error, dim } => {
                run.reject(h, error, dim);
                dt = 0.5 * h;
            }
            Trial::Accepted {
                psi: next,
                error,
                dim,
            } => {
                run.accept(&next, h, error, dim, 0);
                psi = next;
                if !shortened {
                    dt = adjust_step(error, tol, h);
                }
                if dim as f64 > KRYLOV_SHRINK_FRACTION * dk_max as f64 {
                    dt /= STEP_FACTOR;
                }
            }
        }
    }
    Ok((psi, run.finish()))
}

/// First-order Magnus steps with step-doubling error control: one step of
/// length `h` against two of length `h/2`; the two half steps continue the
/// run.
pub fn propagate_al1(
    problem: &Problem,
    psi0: &[Complex64],
    t_span: (f64, f64),
    tol: f64,
    dk_max: usize,
    options: RunOptions,
) -> Result<(StateVector, PropagationRecord)> {
    drive_loop(problem, Method::Al1, psi0, t_span, tol, dk_max, options, |run, psi, h| {
        let t = run.t;
        let counter = &run.counter;
        let order = MagnusOrder::First;
        let full = match magnus_step(problem, counter, psi, t, h, order, tol, dk_max)? {
            KrylovStep::Converged { psi, dim } => (psi, dim),
            KrylovStep::Exhausted { dim } => return Ok(Trial::Rejected { error: f64::INFINITY, dim }),
        };
        let half = 0.5 * h;
        let first = match magnus_step(problem, counter, psi, t, half, order, tol, dk_max)? {
            KrylovStep::Converged { psi, dim } => (psi, dim),
            KrylovStep::Exhausted { dim } => return Ok(Trial::Rejected { error: f64::INFINITY, dim }),
        };
        let second = match magnus_step(problem, counter, &first.0, t + half, half, order, tol, dk_max)? {
            KrylovStep::Converged { psi, dim } => (psi, dim),
            KrylovStep::Exhausted { dim } => return Ok(Trial::Rejected { error: f64::INFINITY, dim }),
        };
        let dim = full.1.max(first.1).max(second.1);
        let error = vector::distance(&full.0, &second.0);
        Ok(if error <= tol {
            Trial::Accepted {
                psi: second.0,
                error,
                dim,
            }
        } else {
            Trial::Rejected { error, dim }
        })
    })
}

/// Second-order Magnus steps checked against the first-order exponent; the
/// second-order result continues the run.
pub fn propagate_al2(
    problem: &Problem,
    psi0: &[Complex64],
    t_span: (f64, f64),
    tol: f64,
    dk_max: usize,
    options: RunOptions,
) -> Result<(StateVector, PropagationRecord)> {
    drive_loop(problem, Method::Al2, psi0, t_span, tol, dk_max, options, |run, psi, h| {
        let t = run.t;
        let counter = &run.counter;
        let accurate = match magnus_step(problem, counter, psi, t, h, MagnusOrder::Second, tol, dk_max)? {
            KrylovStep::Converged { psi, dim } => (psi, dim),
            KrylovStep::Exhausted { dim } => return Ok(Trial::Rejected { error: f64::INFINITY, dim }),
        };
        let reference = match magnus_step(problem, counter, psi, t, h, MagnusOrder::First, tol, dk_max)? {
            KrylovStep::Converged { psi, dim } => (psi, dim),
            KrylovStep::Exhausted { dim } => return Ok(Trial::Rejected { error: f64::INFINITY, dim }),
        };
        let dim = accurate.1.max(reference.1);
        let error = vector::distance(&accurate.0, &reference.0);
        Ok(if error <= tol {
            Trial::Accepted {
                psi: accurate.0,
                error,
                dim,
            }
        } else {
            Trial::Rejected { error, dim }
        })
    })
}
