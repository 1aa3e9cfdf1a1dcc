//! Lanczos factorization and propagation inside the Krylov space.
//!
//! For a Hermitian generator `M` and unit start vector `psi0`, the Lanczos
//! recursion yields orthonormal `k_0 = psi0, k_1, ...` with `K^† M K = T`
//! real symmetric tridiagonal. A step `exp(-i tau M) psi0` is approximated by
//! `K Q exp(-i tau D) Q^T e_0`.
//!
//! Time-dependent exponents are handled by folding the step into `M`
//! (`M = i Omega`, Hermitian), so propagation then uses `tau = 1`.

mod tridiag;

use num_complex::Complex64;

pub use tridiag::{eigen_tridiagonal, TridiagonalEigen};

use crate::error::{Error, Result};
use crate::vector::{self, StateVector, ZERO};

/// Relative size below which an off-diagonal `beta` counts as a breakdown.
pub const BREAKDOWN_RTOL: f64 = 1e-12;

const NORM_TOL: f64 = 1e-8;

/// Orthonormal Krylov vectors with the projected tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct KrylovSpace {
    /// `k_0 .. k_{d-1}`; exactly `alpha.len()` vectors.
    pub vectors: Vec<StateVector>,
    pub alpha: Vec<f64>,
    /// `beta[j]` couples `k_j` and `k_{j+1}`; length `alpha.len() - 1`.
    pub beta: Vec<f64>,
    /// Set when the recursion hit a zero `beta`: the span is invariant under
    /// the generator and propagation inside it is exact.
    pub invariant: bool,
}

impl KrylovSpace {
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn eigen(&self) -> Result<TridiagonalEigen> {
        eigen_tridiagonal(&self.alpha, &self.beta)
    }
}

/// Outcome of [`build_krylov`].
#[derive(Clone, Debug)]
pub enum KrylovBuild {
    Complete(KrylovSpace),
    /// The recursion stopped early on a vanishing `beta`.
    Breakdown(KrylovSpace),
}

impl KrylovBuild {
    pub fn space(&self) -> &KrylovSpace {
        match self {
            Self::Complete(s) | Self::Breakdown(s) => s,
        }
    }

    pub fn into_space(self) -> KrylovSpace {
        match self {
            Self::Complete(s) | Self::Breakdown(s) => s,
        }
    }
}

/// Incremental Lanczos recursion without reorthogonalization.
///
/// `apply` computes `y = M x` and is responsible for any cost accounting.
pub struct Lanczos<F> {
    apply: F,
    vectors: Vec<StateVector>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    scale: f64,
    invariant: bool,
    work: StateVector,
}

impl<F> Lanczos<F>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    pub fn new(start: &[Complex64], apply: F) -> Result<Self> {
        let n = vector::norm(start);
        if !n.is_finite() {
            return Err(Error::NotFinite("Lanczos start vector"));
        }
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self {
            apply,
            vectors: vec![start.to_vec()],
            alpha: Vec::new(),
            beta: Vec::new(),
            scale: 1.0,
            invariant: false,
            work: vec![ZERO; start.len()],
        })
    }

    /// Size of the current projected matrix.
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Off-diagonal of the current `dim x dim` tridiagonal matrix.
    pub fn beta(&self) -> &[f64] {
        &self.beta[..self.alpha.len().saturating_sub(1)]
    }

    /// One generator application: adds `alpha_j` and prepares `k_{j+1}`.
    /// Returns `false` once the space is invariant (no work is done).
    pub fn extend(&mut self) -> Result<bool> {
        if self.invariant {
            return Ok(false);
        }
        let j = self.alpha.len();
        (self.apply)(&self.vectors[j], &mut self.work);
        let w = &mut self.work;
        // removing the previous direction before taking alpha is the more
        // stable ordering of the three-term recursion
        if j > 0 {
            vector::axpy(Complex64::new(-self.beta[j - 1], 0.0), &self.vectors[j - 1], w);
        }
        let a = vector::dot(&self.vectors[j], w).re;
        if !a.is_finite() {
            return Err(Error::NotFinite("Lanczos recursion"));
        }
        vector::axpy(Complex64::new(-a, 0.0), &self.vectors[j], w);
        let b = vector::norm(w);
        if !b.is_finite() {
            return Err(Error::NotFinite("Lanczos recursion"));
        }
        self.alpha.push(a);
        self.scale = self.scale.max(a.abs());
        if b < BREAKDOWN_RTOL * self.scale {
            self.invariant = true;
            return Ok(true);
        }
        self.beta.push(b);
        let inv = 1.0 / b;
        let next: StateVector = w.iter().map(|z| z * inv).collect();
        self.vectors.push(next);
        Ok(true)
    }

    pub fn eigen(&self) -> Result<TridiagonalEigen> {
        eigen_tridiagonal(&self.alpha, self.beta())
    }

    /// `|c_last(tau)|` of the current space; zero when invariant.
    pub fn last_coefficient(&self, eig: &TridiagonalEigen, tau: f64) -> f64 {
        if self.invariant {
            return 0.0;
        }
        last_coefficient_of(eig, tau)
    }

    pub fn into_space(mut self) -> KrylovSpace {
        let d = self.alpha.len();
        self.vectors.truncate(d);
        self.beta.truncate(d.saturating_sub(1));
        KrylovSpace {
            vectors: self.vectors,
            alpha: self.alpha,
            beta: self.beta,
            invariant: self.invariant,
        }
    }
}

/// Runs the recursion up to dimension `dim`, stopping early on breakdown.
pub fn build_krylov<F>(apply: F, start: &[Complex64], dim: usize) -> Result<KrylovBuild>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    if dim == 0 {
        return Err(Error::InvalidArgument("Krylov dimension must be positive".into()));
    }
    let mut lanczos = Lanczos::new(start, apply)?;
    while lanczos.dim() < dim {
        if !lanczos.extend()? {
            break;
        }
        if lanczos.is_invariant() {
            break;
        }
    }
    let invariant = lanczos.is_invariant();
    let space = lanczos.into_space();
    Ok(if invariant {
        KrylovBuild::Breakdown(space)
    } else {
        KrylovBuild::Complete(space)
    })
}

/// In-space coefficients `c(tau) = Q exp(-i tau D) Q^T e_0`.
pub fn krylov_coefficients(eig: &TridiagonalEigen, tau: f64) -> Vec<Complex64> {
    let n = eig.dim();
    let weights: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(eig.q(0, m), -tau * eig.values[m]))
        .collect();
    (0..n)
        .map(|j| {
            weights
                .iter()
                .enumerate()
                .fold(ZERO, |acc, (m, w)| acc + w * eig.q(j, m))
        })
        .collect()
}

fn last_coefficient_of(eig: &TridiagonalEigen, tau: f64) -> f64 {
    let n = eig.dim();
    if n < 2 {
        return 0.0;
    }
    let j = n - 1;
    (0..n)
        .fold(ZERO, |acc, m| {
            acc + Complex64::from_polar(eig.q(0, m) * eig.q(j, m), -tau * eig.values[m])
        })
        .norm()
}

/// `|c_{d-1}(tau)|`, computed within the `d`-dimensional space. An invariant
/// space has no truncation error, so the monitor is zero there.
pub fn last_coefficient(space: &KrylovSpace, eig: &TridiagonalEigen, tau: f64) -> f64 {
    if space.invariant {
        return 0.0;
    }
    last_coefficient_of(eig, tau)
}

/// Maps in-space coefficients back to the full space: `sum_j c_j k_j`.
pub fn combine(vectors: &[StateVector], coeffs: &[Complex64]) -> StateVector {
    let mut out = vec![ZERO; vectors[0].len()];
    for (v, &c) in vectors.iter().zip(coeffs) {
        vector::axpy(c, v, &mut out);
    }
    out
}

/// `exp(-i tau M) psi0` in the Krylov approximation, with the coefficients.
pub fn propagate_in_krylov(
    space: &KrylovSpace,
    eig: &TridiagonalEigen,
    tau: f64,
) -> (StateVector, Vec<Complex64>) {
    let c = krylov_coefficients(eig, tau);
    (combine(&space.vectors, &c), c)
}
