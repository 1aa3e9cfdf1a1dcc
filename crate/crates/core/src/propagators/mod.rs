//! Time stepping of `d psi/dt = -i (A + f(t) B) psi`.
//!
//! Krylov exponential integrators:
//! * [`propagate_alc`] for a constant Hamiltonian, fixed Krylov dimension
//!   and bisection of the remaining interval.
//! * [`propagate_al1`] first-order Magnus steps checked by step doubling.
//! * [`propagate_al2`] second-order Magnus steps checked against first order.
//!
//! Reference integrators: [`propagate_rk8`] (embedded 8(7) pair),
//! [`propagate_rk4_fixed`] and [`propagate_cn_fixed`] (Crank-Nicolson with
//! GMRES).

mod alc;
mod cn;
mod magnus;
mod magnus_lanczos;
mod rk;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use alc::propagate_alc;
pub use cn::propagate_cn_fixed;
pub use magnus::{MagnusCoefficients, MagnusGenerator, MagnusOrder};
pub use magnus_lanczos::{adaptive_krylov_step, propagate_al1, propagate_al2, KrylovStep};
pub use rk::{propagate_rk4_fixed, propagate_rk8, rk8_step, Rk8Tableau, RK8};

use crate::drive::DriveFunction;
use crate::error::{Error, Result};
use crate::sparse::{hamiltonian_into, MatvecCounter, SparseOperator};
use crate::vector::{self, ZERO};

/// Growth/shrink factor of the Lanczos-method step controller.
pub const STEP_FACTOR: f64 = 1.1;
/// Smallest step before a run is declared stalled.
pub const MIN_STEP: f64 = 1e-12;
/// Fraction of the Krylov cap above which the next step is shortened.
pub const KRYLOV_SHRINK_FRACTION: f64 = 0.8;

/// `H(t) = A + f(t) B` together with what is needed to sample observables.
#[derive(Clone, Copy, Debug)]
pub struct Problem<'a> {
    pub a: &'a SparseOperator,
    pub b: &'a SparseOperator,
    pub drive: &'a DriveFunction,
    /// Particle count, used to normalize `x_mean`.
    pub particles: usize,
}

impl<'a> Problem<'a> {
    pub fn new(
        a: &'a SparseOperator,
        b: &'a SparseOperator,
        drive: &'a DriveFunction,
        particles: usize,
    ) -> Result<Self> {
        if a.dimension() != b.dimension() {
            return Err(Error::DimensionMismatch {
                expected: a.dimension(),
                actual: b.dimension(),
            });
        }
        if particles == 0 {
            return Err(Error::InvalidArgument("particle count must be positive".into()));
        }
        Ok(Self {
            a,
            b,
            drive,
            particles,
        })
    }

    pub fn dimension(&self) -> usize {
        self.a.dimension()
    }

    fn check_state(&self, psi: &[Complex64]) -> Result<()> {
        if psi.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: psi.len(),
            });
        }
        Ok(())
    }

    /// `y = H(t) x`, counted as one matvec.
    pub(crate) fn apply_h(&self, t: f64, x: &[Complex64], y: &mut [Complex64], counter: &MatvecCounter) {
        hamiltonian_into(self.a, self.b, self.drive.eval(t), x, y);
        counter.add(1);
    }

    /// `<psi|B|psi> / N`.
    pub fn x_mean(&self, psi: &[Complex64]) -> f64 {
        x_mean(psi, self.b, self.particles)
    }

    /// `<psi|H(t)|psi>`, uncounted.
    pub fn energy(&self, t: f64, psi: &[Complex64]) -> f64 {
        let mut y = vec![ZERO; psi.len()];
        hamiltonian_into(self.a, self.b, self.drive.eval(t), psi, &mut y);
        vector::dot(psi, &y).re
    }
}

/// Mean particle position `<psi| (1/N) sum_j x_j |psi>`.
pub fn x_mean(psi: &[Complex64], b: &SparseOperator, particles: usize) -> f64 {
    let mut y = vec![ZERO; psi.len()];
    b.apply_into(psi, &mut y);
    vector::dot(psi, &y).re / particles as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Alc,
    Al1,
    Al2,
    Rk8,
    Rk4,
    Cn,
}

impl Method {
    pub const ALL: [Method; 6] = [Self::Alc, Self::Al1, Self::Al2, Self::Rk8, Self::Rk4, Self::Cn];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Alc => "alc",
            Self::Al1 => "al1",
            Self::Al2 => "al2",
            Self::Rk8 => "rk8",
            Self::Rk4 => "rk4",
            Self::Cn => "cn",
        }
    }

    pub fn is_adaptive(&self) -> bool {
        !matches!(self, Self::Rk4 | Self::Cn)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Knobs shared by every propagator.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Record `(t, x_mean, norm, energy)` at every accepted step endpoint.
    pub sample_steps: bool,
    /// Force step endpoints onto multiples of this interval (measured from
    /// the start time). Samples then include every grid point.
    pub output_interval: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            sample_steps: true,
            output_interval: None,
        }
    }
}

/// One attempted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub accepted: bool,
    /// Local error estimate (zero for fixed-step methods).
    pub error: f64,
    /// Largest Krylov dimension used (zero for non-Krylov methods).
    pub krylov_dim: usize,
    /// GMRES iterations (Crank-Nicolson only).
    pub solver_iterations: usize,
    pub matvecs: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x_mean: f64,
    pub norm: f64,
    pub energy: f64,
    pub dt: f64,
    pub krylov_dim: usize,
    pub matvecs_cumulative: u64,
}

/// Log of one propagation run.
#[derive(Clone, Debug)]
pub struct PropagationRecord {
    pub method: Method,
    pub steps: Vec<StepRecord>,
    pub samples: Vec<Sample>,
    pub matvecs_total: u64,
    pub matvecs_rejected: u64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// `max |‖psi‖ - 1|` over accepted step endpoints.
    pub max_norm_deviation: f64,
}

impl PropagationRecord {
    fn new(method: Method) -> Self {
        Self {
            method,
            steps: Vec::new(),
            samples: Vec::new(),
            matvecs_total: 0,
            matvecs_rejected: 0,
            steps_accepted: 0,
            steps_rejected: 0,
            max_norm_deviation: 0.0,
        }
    }

    pub fn accepted_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(|s| s.accepted)
    }

    fn push_step(&mut self, step: StepRecord) {
        self.matvecs_total += step.matvecs;
        if step.accepted {
            self.steps_accepted += 1;
        } else {
            self.steps_rejected += 1;
            self.matvecs_rejected += step.matvecs;
        }
        self.steps.push(step);
    }
}

/// Bookkeeping shared by the run loops.
pub(crate) struct Run<'p, 'a> {
    pub problem: &'p Problem<'a>,
    pub counter: MatvecCounter,
    pub record: PropagationRecord,
    pub t: f64,
    t_end: f64,
    t_begin: f64,
    options: RunOptions,
    mark: u64,
}

/// Leftover room, relative to the step, that is absorbed into a step
/// instead of producing a sliver step.
const SNAP: f64 = 1e-6;

impl<'p, 'a> Run<'p, 'a> {
    pub fn start(
        problem: &'p Problem<'a>,
        method: Method,
        psi0: &[Complex64],
        t_span: (f64, f64),
        options: RunOptions,
    ) -> Result<Self> {
        problem.check_state(psi0)?;
        let (t0, t1) = t_span;
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidArgument(format!("empty time span [{t0}, {t1}]")));
        }
        if let Some(dt) = options.output_interval {
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("output interval must be positive".into()));
            }
        }
        let mut run = Self {
            problem,
            counter: MatvecCounter::new(),
            record: PropagationRecord::new(method),
            t: t0,
            t_end: t1,
            t_begin: t0,
            options,
            mark: 0,
        };
        run.observe(psi0, 0.0, 0);
        Ok(run)
    }

    pub fn finished(&self) -> bool {
        self.t >= self.t_end
    }

    /// Next time the integration must land on exactly.
    pub fn next_stop(&self) -> f64 {
        match self.options.output_interval {
            Some(h) => {
                let k = ((self.t - self.t_begin) / h + 1e-9).floor() + 1.0;
                (self.t_begin + k * h).min(self.t_end)
            }
            None => self.t_end,
        }
    }

    /// Limits `dt` so the step does not pass the next stop. Returns the
    /// usable step and whether it was shortened.
    pub fn clamp(&self, dt: f64) -> (f64, bool) {
        let room = self.next_stop() - self.t;
        if dt >= room - SNAP * dt {
            (room, dt > room + SNAP * dt)
        } else {
            (dt, false)
        }
    }

    fn take_cost(&mut self) -> u64 {
        let now = self.counter.get();
        let cost = now - self.mark;
        self.mark = now;
        cost
    }

    pub fn reject(&mut self, dt: f64, error: f64, krylov_dim: usize) {
        let matvecs = self.take_cost();
        self.record.push_step(StepRecord {
            t: self.t,
            dt,
            accepted: false,
            error,
            krylov_dim,
            solver_iterations: 0,
            matvecs,
        });
    }

    pub fn accept(&mut self, psi: &[Complex64], dt: f64, error: f64, krylov_dim: usize, iterations: usize) {
        let matvecs = self.take_cost();
        self.record.push_step(StepRecord {
            t: self.t,
            dt,
            accepted: true,
            error,
            krylov_dim,
            solver_iterations: iterations,
            matvecs,
        });
        let stop = self.next_stop();
        self.t = if (self.t + dt - stop).abs() <= 1e-12 * stop.abs().max(1.0) {
            stop
        } else {
            self.t + dt
        };
        self.observe(psi, dt, krylov_dim);
    }

    fn observe(&mut self, psi: &[Complex64], dt: f64, krylov_dim: usize) {
        let norm = vector::norm(psi);
        self.record.max_norm_deviation = self.record.max_norm_deviation.max((norm - 1.0).abs());
        let on_grid = match self.options.output_interval {
            Some(h) => {
                let k = ((self.t - self.t_begin) / h).round();
                (self.t - self.t_begin - k * h).abs() <= 1e-9 * h || self.t >= self.t_end
            }
            None => false,
        };
        if self.options.sample_steps || on_grid || dt == 0.0 || self.t >= self.t_end {
            self.record.samples.push(Sample {
                t: self.t,
                x_mean: self.problem.x_mean(psi),
                norm,
                energy: self.problem.energy(self.t, psi),
                dt,
                krylov_dim,
                matvecs_cumulative: self.counter.get(),
            });
        }
    }

    pub fn check_underflow(&self, dt: f64) -> Result<()> {
        if !(dt >= MIN_STEP) {
            return Err(Error::StepUnderflow { t: self.t, dt });
        }
        Ok(())
    }

    pub fn finish(self) -> PropagationRecord {
        debug_assert_eq!(self.record.matvecs_total, self.counter.get());
        self.record
    }
}

/// Lanczos-method step controller: grow by 1.1 when the accepted error is
/// below `tol / 2`, otherwise shrink by 1.1. A tie shrinks.
pub fn adjust_step(error: f64, tol: f64, dt: f64) -> f64 {
    if error < 0.5 * tol {
        dt * STEP_FACTOR
    } else {
        dt / STEP_FACTOR
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}
