//! Bosonic occupation-number basis over a finite set of orbitals.
//!
//! Orbital labels in the public API are 1-based (orbital `n` is the `n`-th
//! infinite-well eigenfunction). Storage is 0-based.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Occupation numbers of one many-boson basis state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupationState(Vec<u8>);

impl OccupationState {
    pub fn new(occupations: Vec<u8>) -> Self {
        Self(occupations)
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn particles(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }
}

/// All states with `particles` bosons in `orbitals` orbitals.
///
/// States are stored in descending lexicographic order, so index 0 is the
/// state with every particle in the lowest orbital.
#[derive(Clone, Debug)]
pub struct FockBasis {
    particles: usize,
    orbitals: usize,
    occupations: Vec<u8>,
    index: HashMap<Box<[u8]>, usize>,
}

/// `C(n, k)` with overflow detection.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Bosonic Hilbert-space dimension `C(d1 + N - 1, N)`.
pub fn bosonic_dimension(particles: usize, orbitals: usize) -> Option<u64> {
    let n = (orbitals as u64 + particles as u64).checked_sub(1)?;
    binomial(n, particles as u64)
}

impl FockBasis {
    pub fn enumerate(particles: usize, orbitals: usize) -> Result<Self> {
        if particles == 0 || orbitals == 0 {
            return Err(Error::InvalidArgument(format!(
                "particle and orbital counts must be positive (N = {particles}, d1 = {orbitals})"
            )));
        }
        if particles > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "at most {} particles per orbital are representable",
                u8::MAX
            )));
        }
        let dim = bosonic_dimension(particles, orbitals).ok_or(Error::DimensionOverflow {
            n: (orbitals + particles - 1) as u64,
            k: particles as u64,
        })?;
        let dim = usize::try_from(dim).map_err(|_| Error::DimensionOverflow {
            n: (orbitals + particles - 1) as u64,
            k: particles as u64,
        })?;
        let total = dim.checked_mul(orbitals).ok_or(Error::DimensionOverflow {
            n: (orbitals + particles - 1) as u64,
            k: particles as u64,
        })?;

        let mut occupations = Vec::with_capacity(total);
        let mut current = vec![0u8; orbitals];
        fill(&mut current, 0, particles, &mut occupations);
        debug_assert_eq!(occupations.len(), total);

        let mut index = HashMap::with_capacity(dim);
        for (i, state) in occupations.chunks_exact(orbitals).enumerate() {
            index.insert(Box::from(state), i);
        }
        Ok(Self {
            particles,
            orbitals,
            occupations,
            index,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn dimension(&self) -> usize {
        self.occupations.len() / self.orbitals
    }

    /// Occupations of state `i`.
    pub fn state(&self, i: usize) -> &[u8] {
        &self.occupations[i * self.orbitals..(i + 1) * self.orbitals]
    }

    pub fn states(&self) -> impl Iterator<Item = &[u8]> {
        self.occupations.chunks_exact(self.orbitals)
    }

    pub fn index_of(&self, occupations: &[u8]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    /// Matrix elements of `a†_p a†_q a_s a_r` (1-based labels) as
    /// `(row, col, weight)` triplets, `row` being the target state.
    pub fn pair_operator_map(
        &self,
        creation: (usize, usize),
        annihilation: (usize, usize),
    ) -> Result<Vec<(usize, usize, f64)>> {
        let (p, q) = creation;
        let (r, s) = annihilation;
        for label in [p, q, r, s] {
            if label == 0 || label > self.orbitals {
                return Err(Error::InvalidArgument(format!(
                    "orbital label {label} outside [1, {}]",
                    self.orbitals
                )));
            }
        }
        let ops = [
            Ladder::Annihilate(r - 1),
            Ladder::Annihilate(s - 1),
            Ladder::Create(q - 1),
            Ladder::Create(p - 1),
        ];
        let mut out = Vec::new();
        let mut scratch = vec![0u8; self.orbitals];
        for col in 0..self.dimension() {
            scratch.copy_from_slice(self.state(col));
            if let Some(weight) = apply_ladder(&mut scratch, &ops) {
                let row = self
                    .index_of(&scratch)
                    .expect("particle-conserving operator stays in the basis");
                out.push((row, col, weight));
            }
        }
        Ok(out)
    }
}

fn fill(current: &mut [u8], orbital: usize, remaining: usize, out: &mut Vec<u8>) {
    if orbital + 1 == current.len() {
        current[orbital] = remaining as u8;
        out.extend_from_slice(current);
        return;
    }
    for n in (0..=remaining).rev() {
        current[orbital] = n as u8;
        fill(current, orbital + 1, remaining - n, out);
    }
    current[orbital] = 0;
}

/// Single bosonic ladder operator on a 0-based orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Applies `ops` in slice order (first element acts first) to the
/// occupation vector in place. Returns the accumulated amplitude, or `None`
/// when an annihilator hits an empty orbital.
pub fn apply_ladder(occupations: &mut [u8], ops: &[Ladder]) -> Option<f64> {
    // the squared amplitude is an integer, so take a single square root
    let mut squared: u64 = 1;
    for op in ops {
        match *op {
            Ladder::Annihilate(k) => {
                let n = occupations[k];
                if n == 0 {
                    return None;
                }
                squared = squared.checked_mul(n as u64)?;
                occupations[k] = n - 1;
            }
            Ladder::Create(k) => {
                let n = occupations[k].checked_add(1)?;
                squared = squared.checked_mul(n as u64)?;
                occupations[k] = n;
            }
        }
    }
    Some((squared as f64).sqrt())
}
