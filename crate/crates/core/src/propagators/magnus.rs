//! Magnus exponents for `H(t) = A + f(t) B` with Simpson-rule integrals.
//!
//! ```text
//! Omega1(t, h) = -i h A - i (h/6) (f(t) + 4 f(t + h/2) + f(t + h)) B
//! Omega2(t, h) = (h^2 / 12) (f(t + h) - f(t)) [A, B]
//! ```
//!
//! The Lanczos process runs on the Hermitian `M = i (Omega1 + Omega2)`,
//! so a step is `exp(-i M) psi`.

use num_complex::Complex64;

use crate::drive::DriveFunction;
use crate::sparse::{MatvecCounter, SparseOperator};
use crate::vector::ZERO;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MagnusOrder {
    First,
    Second,
}

/// `M = a A + b B + i c [A, B]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagnusCoefficients {
    pub a: f64,
    pub b: f64,
    pub commutator: f64,
}

impl MagnusCoefficients {
    pub fn new(drive: &DriveFunction, t: f64, h: f64, order: MagnusOrder) -> Self {
        let f0 = drive.eval(t);
        let fm = drive.eval(t + 0.5 * h);
        let f1 = drive.eval(t + h);
        let commutator = match order {
            MagnusOrder::First => 0.0,
            MagnusOrder::Second => h * h / 12.0 * (f1 - f0),
        };
        Self {
            a: h,
            b: h / 6.0 * (f0 + 4.0 * fm + f1),
            commutator,
        }
    }
}

/// Applies `M` and charges the matvec counter: one unit for the first-order
/// exponent, two when the commutator is included.
pub struct MagnusGenerator<'a> {
    a: &'a SparseOperator,
    b: &'a SparseOperator,
    coeffs: MagnusCoefficients,
    order: MagnusOrder,
    counter: &'a MatvecCounter,
    av: Vec<Complex64>,
    bv: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl<'a> MagnusGenerator<'a> {
    pub fn new(
        a: &'a SparseOperator,
        b: &'a SparseOperator,
        coeffs: MagnusCoefficients,
        order: MagnusOrder,
        counter: &'a MatvecCounter,
    ) -> Self {
        let n = a.dimension();
        Self {
            a,
            b,
            coeffs,
            order,
            counter,
            av: vec![ZERO; n],
            bv: vec![ZERO; n],
            scratch: if order == MagnusOrder::Second { vec![ZERO; n] } else { Vec::new() },
        }
    }

    pub fn coefficients(&self) -> MagnusCoefficients {
        self.coeffs
    }

    pub fn apply(&mut self, x: &[Complex64], y: &mut [Complex64]) {
        let MagnusCoefficients { a, b, commutator } = self.coeffs;
        self.a.apply_into(x, &mut self.av);
        self.b.apply_into(x, &mut self.bv);
        self.counter.add(1);
        for ((yi, ai), bi) in y.iter_mut().zip(&self.av).zip(&self.bv) {
            *yi = ai * a + bi * b;
        }
        if self.order == MagnusOrder::Second {
            // i c (A(Bx) - B(Ax))
            let ic = Complex64::new(0.0, commutator);
            self.a.apply_into(&self.bv, &mut self.scratch);
            for (yi, s) in y.iter_mut().zip(&self.scratch) {
                *yi += ic * s;
            }
            self.b.apply_into(&self.av, &mut self.scratch);
            for (yi, s) in y.iter_mut().zip(&self.scratch) {
                *yi -= ic * s;
            }
            self.counter.add(1);
        }
    }
}
