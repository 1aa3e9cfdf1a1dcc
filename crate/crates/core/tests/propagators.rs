//! Propagators on small systems against dense references.

mod common;

use boseprop::propagators::{
    propagate_al1, propagate_al2, propagate_alc, propagate_cn_fixed, propagate_rk4_fixed, propagate_rk8,
    PropagationRecord,
};
use boseprop::linsolve::GmresConfig;
use boseprop::vector::{self, phase_aligned_distance, StateVector};
use boseprop::groundstate::ground_state;
use boseprop::{DriveFunction, FockBasis, Problem, RunOptions, SparseOperator, WellModel};
use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const QUIET: RunOptions = RunOptions {
    sample_steps: false,
    output_interval: None,
};

fn two_level() -> (SparseOperator, SparseOperator) {
    let basis = FockBasis::enumerate(1, 2).unwrap();
    WellModel::new(1, 2, 0.0).unwrap().assemble(&basis).unwrap()
}

fn small_model(n: usize, d: usize) -> (SparseOperator, SparseOperator) {
    let basis = FockBasis::enumerate(n, d).unwrap();
    WellModel::new(n, d, 2.0).unwrap().assemble(&basis).unwrap()
}

/// Dense classical RK4 for `y' = -i (A + f(t) B) y`, independent of the
/// library's integrators.
fn dense_rk4(a: &SparseOperator, b: &SparseOperator, f: &dyn Fn(f64) -> f64, y0: &[Complex64], t_end: f64, dt: f64) -> StateVector {
    let (da, db) = (complexify(&dense(a)), complexify(&dense(b)));
    let rhs = |t: f64, y: &DVector<Complex64>| -> DVector<Complex64> {
        (&da * y + (&db * y) * c(f(t), 0.0)) * c(0.0, -1.0)
    };
    let mut y = to_dvector(y0);
    let steps = (t_end / dt).round() as usize;
    for k in 0..steps {
        let t = k as f64 * dt;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + dt / 2.0, &(&y + &k1 * c(dt / 2.0, 0.0)));
        let k3 = rhs(t + dt / 2.0, &(&y + &k2 * c(dt / 2.0, 0.0)));
        let k4 = rhs(t + dt, &(&y + &k3 * c(dt, 0.0)));
        y += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
    }
    y.iter().copied().collect()
}

fn check_bookkeeping(record: &PropagationRecord, tol: f64) {
    let total: u64 = record.steps.iter().map(|s| s.matvecs).sum();
    assert_eq!(total, record.matvecs_total);
    let rejected: u64 = record.steps.iter().filter(|s| !s.accepted).map(|s| s.matvecs).sum();
    assert_eq!(rejected, record.matvecs_rejected);
    for (i, s) in record.steps.iter().enumerate() {
        if s.accepted {
            assert!(s.error <= tol, "accepted step {i} has error {}", s.error);
        } else {
            let next = record.steps[i + 1];
            assert_eq!(next.t, s.t, "rejection must retry the same interval");
            assert!((next.dt - 0.5 * s.dt).abs() <= 1e-15 * s.dt || next.dt < 0.5 * s.dt);
        }
    }
}

#[test]
fn alc_two_level_matches_expm() {
    let (a, b) = two_level();
    let drive = DriveFunction::Constant(40.0);
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    let psi0 = vec![c(0.8, 0.0), c(0.0, 0.6)];
    let (psi, record) = propagate_alc(&problem, 40.0, &psi0, (0.0, 3.0), 1e-10, 30, QUIET).unwrap();
    let h = complexify(&(dense(&a) + dense(&b) * 40.0));
    let exact = apply(&expm_hermitian(&h, 3.0), &psi0);
    assert!(max_abs_diff(&psi, &exact) < 1e-8);
    check_bookkeeping(&record, 1e-10);
}

#[test]
fn alc_eigenstate_single_step() {
    let (a, b) = small_model(2, 5);
    let drive = DriveFunction::Constant(0.0);
    let problem = Problem::new(&a, &b, &drive, 2).unwrap();
    let (psi0, e) = ground_state(&a, &b, 0.0, 1e-12).unwrap();
    let (psi, record) = propagate_alc(&problem, 0.0, &psi0, (0.0, 10.0), 1e-6, 30, QUIET).unwrap();
    assert_eq!(record.steps_accepted, 1);
    let phase = Complex64::from_polar(1.0, -10.0 * e);
    let expected: StateVector = psi0.iter().map(|z| z * phase).collect();
    assert!(max_abs_diff(&psi, &expected) < 1e-8);
}

#[test]
fn alc_conserves_energy_and_norm() {
    let (a, b) = small_model(3, 6);
    let (psi0, _) = ground_state(&a, &b, 100.0, 1e-10).unwrap();
    let drive = DriveFunction::CaseA;
    let problem = Problem::new(&a, &b, &drive, 3).unwrap();
    let options = RunOptions {
        sample_steps: true,
        output_interval: None,
    };
    let (_, record) = propagate_alc(&problem, 0.0, &psi0, (0.0, 10.0), 1e-6, 30, options).unwrap();
    let e0 = record.samples[0].energy;
    for s in &record.samples {
        assert!(((s.energy - e0) / e0).abs() < 1e-6);
        assert!((s.norm - 1.0).abs() < 1e-9);
    }
}

#[test]
fn al1_sine_drive_matches_fine_reference() {
    let (a, b) = two_level();
    let drive = DriveFunction::custom(|t: f64| 30.0 * t.sin());
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    let psi0 = vec![c(1.0, 0.0), c(0.0, 0.0)];
    let (psi, record) = propagate_al1(&problem, &psi0, (0.0, 2.0), 1e-9, 30, QUIET).unwrap();
    let reference = dense_rk4(&a, &b, &|t| 30.0 * t.sin(), &psi0, 2.0, 1e-4);
    assert!(max_abs_diff(&psi, &reference) < 1e-6, "{}", max_abs_diff(&psi, &reference));
    check_bookkeeping(&record, 1e-9);
}

#[test]
fn al1_constant_drive_agrees_with_alc() {
    let (a, b) = small_model(2, 6);
    let (psi0, _) = ground_state(&a, &b, 100.0, 1e-10).unwrap();
    let drive = DriveFunction::Constant(20.0);
    let problem = Problem::new(&a, &b, &drive, 2).unwrap();
    let tol = 1e-6;
    let (alc, _) = propagate_alc(&problem, 20.0, &psi0, (0.0, 3.0), tol, 30, QUIET).unwrap();
    let (al1, record) = propagate_al1(&problem, &psi0, (0.0, 3.0), tol, 30, QUIET).unwrap();
    let bound = 2.0 * tol * record.steps_accepted as f64;
    assert!(vector::distance(&alc, &al1) < bound);
    check_bookkeeping(&record, tol);
}

#[test]
fn al2_constant_drive_has_no_commutator_error() {
    let (a, b) = small_model(2, 6);
    let (psi0, _) = ground_state(&a, &b, 100.0, 1e-10).unwrap();
    let drive = DriveFunction::Constant(100.0);
    let problem = Problem::new(&a, &b, &drive, 2).unwrap();
    let (_, record) = propagate_al2(&problem, &psi0, (0.0, 1.0), 1e-6, 30, QUIET).unwrap();
    for s in record.accepted_steps() {
        assert_eq!(s.error, 0.0);
    }
    // zero error always grows the step
    let dts: Vec<f64> = record.accepted_steps().map(|s| s.dt).collect();
    for w in dts.windows(2).take(dts.len().saturating_sub(2)) {
        assert!(w[1] >= w[0]);
    }
}

#[test]
fn al2_linear_drive_matches_fine_reference() {
    let (a, b) = two_level();
    let drive = DriveFunction::custom(|t: f64| 50.0 * t);
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    let psi0 = vec![c(0.6, 0.0), c(0.8, 0.0)];
    let (psi, record) = propagate_al2(&problem, &psi0, (0.0, 1.0), 1e-9, 30, QUIET).unwrap();
    let reference = dense_rk4(&a, &b, &|t| 50.0 * t, &psi0, 1.0, 1e-4);
    assert!(max_abs_diff(&psi, &reference) < 1e-6);
    check_bookkeeping(&record, 1e-9);
}

#[test]
fn krylov_cap_forces_rejection_not_acceptance() {
    let (a, b) = small_model(3, 8);
    let (psi0, _) = ground_state(&a, &b, 100.0, 1e-10).unwrap();
    let drive = DriveFunction::CaseD;
    let problem = Problem::new(&a, &b, &drive, 3).unwrap();
    let (_, record) = propagate_al1(&problem, &psi0, (0.0, 0.5), 1e-6, 6, QUIET).unwrap();
    assert!(record.steps_rejected > 0);
    for s in record.accepted_steps() {
        assert!(s.krylov_dim <= 6);
        assert!(s.error <= 1e-6);
    }
}

#[test]
fn rk8_scalar_single_step() {
    let a = SparseOperator::diagonal(&[1.0]);
    let b = SparseOperator::diagonal(&[0.0]);
    let drive = DriveFunction::CaseA;
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    // one step of length 1: the tableau's stability polynomial evaluated in
    // 40-digit arithmetic differs from exp(-i) by 3.1128e-8
    let (psi, record) = propagate_rk8(&problem, &[c(1.0, 0.0)], (0.0, 1.0), 1e-3, QUIET).unwrap();
    assert_eq!(record.steps_accepted, 1);
    assert_eq!(record.matvecs_total, 13);
    let err = (psi[0] - Complex64::from_polar(1.0, -1.0)).norm();
    assert!((err - 3.1128e-8).abs() < 1e-11, "{err}");
    // a step of length 1/2 is below 1e-9 (high-precision value 3.2618e-11)
    let (psi, record) = propagate_rk8(&problem, &[c(1.0, 0.0)], (0.0, 0.5), 1e-3, QUIET).unwrap();
    assert_eq!(record.steps_accepted, 1);
    let err = (psi[0] - Complex64::from_polar(1.0, -0.5)).norm();
    assert!(err <= 1e-9 && (err - 3.2618e-11).abs() < 1e-13, "{err}");
}

#[test]
fn rk8_eigenstate_phase() {
    let (a, b) = small_model(2, 5);
    let (psi0, e) = ground_state(&a, &b, 0.0, 1e-12).unwrap();
    let drive = DriveFunction::CaseA;
    let problem = Problem::new(&a, &b, &drive, 2).unwrap();
    let (psi, record) = propagate_rk8(&problem, &psi0, (0.0, 2.0), 1e-10, QUIET).unwrap();
    let phase = Complex64::from_polar(1.0, -2.0 * e);
    let expected: StateVector = psi0.iter().map(|z| z * phase).collect();
    assert!(max_abs_diff(&psi, &expected) < 1e-8);
    check_bookkeeping(&record, 1e-10);
}

#[test]
fn rk8_time_dependent_matches_fine_reference() {
    let (a, b) = two_level();
    let drive = DriveFunction::custom(|t: f64| 30.0 * t.sin());
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    let psi0 = vec![c(1.0, 0.0), c(0.0, 0.0)];
    let (psi, record) = propagate_rk8(&problem, &psi0, (0.0, 2.0), 1e-10, QUIET).unwrap();
    let reference = dense_rk4(&a, &b, &|t| 30.0 * t.sin(), &psi0, 2.0, 1e-4);
    assert!(max_abs_diff(&psi, &reference) < 1e-7);
    check_bookkeeping(&record, 1e-10);
}

#[test]
fn rk4_scalar_accuracy_and_cost() {
    let a = SparseOperator::diagonal(&[1.0]);
    let b = SparseOperator::diagonal(&[0.0]);
    let drive = DriveFunction::CaseA;
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    let (psi, record) = propagate_rk4_fixed(&problem, &[c(1.0, 0.0)], (0.0, 1.0), 0.001, QUIET).unwrap();
    assert!((psi[0] - Complex64::from_polar(1.0, -1.0)).norm() < 1e-11);
    assert_eq!(record.steps_accepted, 1000);
    assert_eq!(record.matvecs_total, 4000);
    let (_, one) = propagate_rk4_fixed(&problem, &[c(1.0, 0.0)], (0.0, 1.0), 1.0, QUIET).unwrap();
    assert_eq!(one.matvecs_total, 4);
}

#[test]
fn cn_with_zero_hamiltonian_is_identity() {
    let zero = SparseOperator::diagonal(&[0.0, 0.0, 0.0]);
    let drive = DriveFunction::CaseA;
    let problem = Problem::new(&zero, &zero, &drive, 1).unwrap();
    let psi0 = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
    let (psi, record) =
        propagate_cn_fixed(&problem, &psi0, (0.0, 1.0), 0.25, GmresConfig::default(), QUIET).unwrap();
    assert_eq!(psi, psi0);
    for s in &record.steps {
        assert_eq!(s.solver_iterations, 0);
        // H psi for the right-hand side plus the residual check
        assert_eq!(s.matvecs, 2);
    }
}

#[test]
fn cn_matches_dense_per_step_solve() {
    let (a, b) = two_level();
    let f = |t: f64| 20.0 * (3.0 * t).cos();
    let drive = DriveFunction::custom(f);
    let problem = Problem::new(&a, &b, &drive, 1).unwrap();
    let psi0 = vec![c(1.0, 0.0), c(0.0, 0.0)];
    let dt = 0.01;
    let (psi, record) = propagate_cn_fixed(&problem, &psi0, (0.0, 1.0), dt, GmresConfig::default(), QUIET).unwrap();
    let (da, db) = (complexify(&dense(&a)), complexify(&dense(&b)));
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut y = to_dvector(&psi0);
    for k in 0..100 {
        let t = k as f64 * dt;
        let h0 = &da + &db * c(f(t), 0.0);
        let h1 = &da + &db * c(f(t + dt), 0.0);
        let lhs = &id + h1 * c(0.0, dt / 2.0);
        let rhs = (&id - h0 * c(0.0, dt / 2.0)) * &y;
        y = lhs.lu().solve(&rhs).unwrap();
    }
    let y: StateVector = y.iter().copied().collect();
    assert!(max_abs_diff(&psi, &y) < 1e-10);
    assert_eq!(record.steps_accepted, 100);
}

#[test]
fn adaptive_methods_agree_on_driven_system() {
    let (a, b) = small_model(2, 6);
    let (psi0, _) = ground_state(&a, &b, 100.0, 1e-10).unwrap();
    for drive in [DriveFunction::CaseB, DriveFunction::CaseC, DriveFunction::CaseD] {
        let problem = Problem::new(&a, &b, &drive, 2).unwrap();
        let span = (0.0, 2.0);
        let options = RunOptions {
            sample_steps: false,
            output_interval: Some(0.1),
        };
        let (x1, r1) = propagate_al1(&problem, &psi0, span, 1e-6, 30, options).unwrap();
        let (x2, r2) = propagate_al2(&problem, &psi0, span, 1e-6, 30, options).unwrap();
        let (x8, r8) = propagate_rk8(&problem, &psi0, span, 1e-6, options).unwrap();
        for (p, q) in [(&x1, &x2), (&x1, &x8), (&x2, &x8)] {
            assert!(phase_aligned_distance(p, q) < 1e-2, "{drive:?}");
        }
        for r in [&r1, &r2] {
            assert!(r.max_norm_deviation < 1e-9);
            check_bookkeeping(r, 1e-6);
        }
        check_bookkeeping(&r8, 1e-6);
    }
}

#[test]
fn output_interval_lands_on_grid() {
    let (a, b) = small_model(2, 5);
    let (psi0, _) = ground_state(&a, &b, 100.0, 1e-10).unwrap();
    let drive = DriveFunction::CaseB;
    let problem = Problem::new(&a, &b, &drive, 2).unwrap();
    let options = RunOptions {
        sample_steps: false,
        output_interval: Some(0.25),
    };
    let (_, record) = propagate_al1(&problem, &psi0, (0.0, 2.0), 1e-6, 30, options).unwrap();
    let times: Vec<f64> = record.samples.iter().map(|s| s.t).collect();
    assert_eq!(times.len(), 9);
    for (k, t) in times.iter().enumerate() {
        assert!((t - 0.25 * k as f64).abs() < 1e-12);
    }
    assert_eq!(record.samples.last().unwrap().matvecs_cumulative, record.matvecs_total);
}
