//! Bosons in a unit-width infinite well with a linear tilt and a contact
//! interaction, in units where the particle mass, well width and hbar are 1.
//!
//! The Hamiltonian splits as `H(t) = A + f(t) B` with
//! `A = sum_n E_n n_n + (g/2) sum V_abcd a†_a a†_b a_c a_d` and
//! `B = sum_mn x_mn a†_m a_n`, the total position operator.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{apply_ladder, FockBasis, Ladder};
use crate::sparse::SparseOperator;

/// Kinetic energy `n^2 pi^2 / 2` of orbital `n` (1-based).
pub fn kinetic_energy(n: usize) -> f64 {
    let n = n as f64;
    0.5 * n * n * PI * PI
}

/// `<phi_m | x | phi_n>` for the orbitals `sqrt(2) sin(n pi x)`.
pub fn position_element(m: usize, n: usize) -> f64 {
    if m == n {
        return 0.5;
    }
    if (m + n) % 2 == 0 {
        return 0.0;
    }
    let (mf, nf) = (m as f64, n as f64);
    let d = mf * mf - nf * nf;
    -8.0 * mf * nf / (PI * PI * d * d)
}

/// `int_0^1 phi_a phi_b phi_c phi_d dx`.
///
/// The product of four sines is a sum of cosines `cos(k pi x)` whose integral
/// over the well vanishes unless `k = 0`, so only sign patterns with
/// `a ± b ± c ± d = 0` survive.
pub fn delta_element(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let (a, b, c, d) = (a as i64, b as i64, c as i64, d as i64);
    let hit = |k: i64| if k == 0 { 1.0 } else { 0.0 };
    0.5 * (hit(a - b - c + d) + hit(a - b + c - d) + hit(a + b - c - d)
        - hit(a - b - c - d)
        - hit(a - b + c + d)
        - hit(a + b - c + d)
        - hit(a + b + c - d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WellModel {
    particles: usize,
    orbitals: usize,
    g: f64,
}

impl WellModel {
    pub fn new(particles: usize, orbitals: usize, g: f64) -> Result<Self> {
        if particles == 0 || orbitals == 0 {
            return Err(Error::InvalidArgument(
                "particle and orbital counts must be positive".into(),
            ));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "interaction strength must be finite and non-negative, got {g}"
            )));
        }
        Ok(Self {
            particles,
            orbitals,
            g,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Assembles `(A, B)` in the canonical order of `basis`.
    pub fn assemble(&self, basis: &FockBasis) -> Result<(SparseOperator, SparseOperator)> {
        if basis.particles() != self.particles || basis.orbitals() != self.orbitals {
            return Err(Error::InvalidArgument(format!(
                "basis (N = {}, d1 = {}) does not match the model (N = {}, d1 = {})",
                basis.particles(),
                basis.orbitals(),
                self.particles,
                self.orbitals
            )));
        }
        let a = self.assemble_a(basis)?;
        let b = assemble_position(basis)?;
        Ok((a, b))
    }

    fn assemble_a(&self, basis: &FockBasis) -> Result<SparseOperator> {
        let d = self.orbitals;
        let dim = basis.dimension();
        let energies: Vec<f64> = (1..=d).map(kinetic_energy).collect();
        let mut triplets = Vec::new();

        for (col, state) in basis.states().enumerate() {
            let e: f64 = state
                .iter()
                .zip(&energies)
                .map(|(&n, e)| n as f64 * e)
                .sum();
            triplets.push((col, col, e));
        }

        if self.g != 0.0 && self.particles >= 2 {
            let table = InteractionTable::new(d);
            let half_g = 0.5 * self.g;
            let mut scratch = vec![0u8; d];
            let mut removed = vec![0u8; d];
            for (col, state) in basis.states().enumerate() {
                for c in 0..d {
                    if state[c] == 0 {
                        continue;
                    }
                    for dd in c..d {
                        removed.copy_from_slice(state);
                        let Some(w_out) = apply_ladder(
                            &mut removed,
                            &[Ladder::Annihilate(dd), Ladder::Annihilate(c)],
                        ) else {
                            continue;
                        };
                        let m_cd = if c == dd { 1.0 } else { 2.0 };
                        for a in 0..d {
                            for b in a..d {
                                let v = table.get(a, b, c, dd);
                                if v == 0.0 {
                                    continue;
                                }
                                scratch.copy_from_slice(&removed);
                                let w_in = apply_ladder(
                                    &mut scratch,
                                    &[Ladder::Create(b), Ladder::Create(a)],
                                )
                                .expect("creation always succeeds");
                                let m_ab = if a == b { 1.0 } else { 2.0 };
                                let row = basis
                                    .index_of(&scratch)
                                    .expect("particle-conserving operator stays in the basis");
                                triplets.push((row, col, half_g * m_ab * m_cd * v * w_out * w_in));
                            }
                        }
                    }
                }
            }
        }
        SparseOperator::from_triplets(dim, &triplets)
    }
}

/// Total position operator `sum_j x_j` in the Fock basis.
fn assemble_position(basis: &FockBasis) -> Result<SparseOperator> {
    let d = basis.orbitals();
    let mut triplets = Vec::new();
    let mut scratch = vec![0u8; d];
    for (col, state) in basis.states().enumerate() {
        let diag: f64 = state
            .iter()
            .enumerate()
            .map(|(k, &n)| n as f64 * position_element(k + 1, k + 1))
            .sum();
        triplets.push((col, col, diag));
        for n in 0..d {
            if state[n] == 0 {
                continue;
            }
            for m in 0..d {
                if m == n {
                    continue;
                }
                let x = position_element(m + 1, n + 1);
                if x == 0.0 {
                    continue;
                }
                scratch.copy_from_slice(state);
                let w = apply_ladder(&mut scratch, &[Ladder::Annihilate(n), Ladder::Create(m)])
                    .expect("hop from an occupied orbital");
                let row = basis
                    .index_of(&scratch)
                    .expect("particle-conserving operator stays in the basis");
                triplets.push((row, col, x * w));
            }
        }
    }
    SparseOperator::from_triplets(basis.dimension(), &triplets)
}

struct InteractionTable {
    d: usize,
    values: Vec<f64>,
}

impl InteractionTable {
    fn new(d: usize) -> Self {
        let mut values = vec![0.0; d * d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        values[((a * d + b) * d + c) * d + e] = delta_element(a + 1, b + 1, c + 1, e + 1);
                    }
                }
            }
        }
        Self { d, values }
    }

    #[inline]
    fn get(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        let d = self.d;
        self.values[((a * d + b) * d + c) * d + e]
    }
}
