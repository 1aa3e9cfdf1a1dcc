//! Dense reference implementations shared by the integration tests.

#![allow(dead_code)]

use boseprop::vector::StateVector;
use boseprop::SparseOperator;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn dense(op: &SparseOperator) -> DMatrix<f64> {
    let n = op.dimension();
    let mut m = DMatrix::zeros(n, n);
    for (r, col, v) in op.triplets() {
        m[(r, col)] += v;
    }
    m
}

pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| c(v, 0.0))
}

pub fn to_dvector(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let v: StateVector = (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random real symmetric matrix with roughly `density` of its entries
/// filled, as both sparse and dense.
pub fn random_symmetric(rng: &mut impl Rng, n: usize, density: f64) -> (SparseOperator, DMatrix<f64>) {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j || rng.gen_bool(density) {
                let v = rng.gen_range(-1.0..1.0);
                triplets.push((i, j, v));
                if i != j {
                    triplets.push((j, i, v));
                }
            }
        }
    }
    let op = SparseOperator::from_triplets(n, &triplets).expect("symmetric by construction");
    let d = dense(&op);
    (op, d)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&m + m.adjoint()) * c(0.5, 0.0)
}

/// `exp(-i t H)` for Hermitian `H` by eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -t * e)));
    v * phases * v.adjoint()
}

pub fn apply(m: &DMatrix<Complex64>, v: &[Complex64]) -> StateVector {
    (m * to_dvector(v)).iter().copied().collect()
}

pub fn max_abs_diff(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre rule on `[a, b]`.
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Infinite-well orbital `sqrt(2) sin(n pi x)`, `n >= 1`.
pub fn orbital(n: usize, x: f64) -> f64 {
    std::f64::consts::SQRT_2 * (n as f64 * std::f64::consts::PI * x).sin()
}
