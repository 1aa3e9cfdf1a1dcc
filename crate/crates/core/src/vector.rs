//! Dense complex vector helpers.

use num_complex::Complex64;

/// Amplitudes of a many-body state in the Fock basis.
pub type StateVector = Vec<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `<x, y>`, antilinear in `x`.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex64::new(re, im)
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: Complex64, x: &mut [Complex64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `||x - e^{i theta} y||` with `theta` chosen as the phase of `<y, x>`.
pub fn phase_aligned_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    let overlap = dot(y, x);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Scales to unit norm and rotates so the largest-magnitude amplitude is
/// real and positive.
pub fn normalize_with_phase(x: &mut [Complex64]) {
    let n = norm(x);
    let mut best = 0;
    for (i, z) in x.iter().enumerate() {
        if z.norm_sqr() > x[best].norm_sqr() {
            best = i;
        }
    }
    let pivot = x[best];
    let rot = if pivot.norm() > 0.0 {
        pivot.conj() / (pivot.norm() * n)
    } else {
        Complex64::new(1.0 / n, 0.0)
    };
    scale(rot, x);
    x[best].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_phase_does_not_count() {
        let x = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let rot = Complex64::from_polar(1.0, 1.234);
        let y: Vec<_> = x.iter().map(|z| z * rot).collect();
        assert!(distance(&x, &y) > 0.5);
        assert!(phase_aligned_distance(&x, &y) < 1e-15);
        assert_eq!(phase_aligned_distance(&x, &x), 0.0);
    }

    #[test]
    fn phase_convention() {
        let mut x = vec![Complex64::new(0.0, -3.0), Complex64::new(1.0, 1.0)];
        normalize_with_phase(&mut x);
        assert!((norm(&x) - 1.0).abs() < 1e-15);
        assert!(x[0].re > 0.0 && x[0].im == 0.0);
    }
}
