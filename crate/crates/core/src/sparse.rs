//! Real symmetric sparse operators acting on complex state vectors, and the
//! matrix-vector cost accounting used by every propagator.
//!
//! Cost unit: one application of `A + f B` is one matvec. A lone `A` or `B`
//! application counts as one as well, so a commutator built from the `Av`
//! and `Bv` products of a Hamiltonian application costs one more.

use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vector::StateVector;

/// Shared count of matrix-vector applications.
#[derive(Debug, Default)]
pub struct MatvecCounter(AtomicU64);

impl MatvecCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, units: u64) {
        self.0.fetch_add(units, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Compressed-row storage of a real symmetric matrix. The full pattern is
/// stored (both triangles).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Builds from coordinate triplets. Duplicates are summed; the result must
    /// be structurally symmetric and is made numerically symmetric by
    /// averaging mirrored entries.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if dim > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "operator dimension {dim} exceeds the column index range"
            )));
        }
        let mut counts = vec![0usize; dim + 1];
        for &(r, c, _) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidArgument(format!(
                    "entry ({r}, {c}) outside a {dim}x{dim} operator"
                )));
            }
            counts[r + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut raw: Vec<(u32, f64)> = vec![(0, 0.0); triplets.len()];
        for &(r, c, v) in triplets {
            raw[next[r]] = (c as u32, v);
            next[r] += 1;
        }

        let mut row_offsets = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        for r in 0..dim {
            let row = &mut raw[counts[r]..counts[r + 1]];
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                cols.push(c);
                values.push(v);
            }
            row_offsets.push(cols.len());
        }

        let mut op = Self {
            dim,
            row_offsets,
            cols,
            values,
        };
        op.symmetrize()?;
        Ok(op)
    }

    /// Diagonal operator.
    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        Self {
            dim,
            row_offsets: (0..=dim).collect(),
            cols: (0..dim as u32).collect(),
            values: values.to_vec(),
        }
    }

    fn symmetrize(&mut self) -> Result<()> {
        for r in 0..self.dim {
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                let c = self.cols[k] as usize;
                if c <= r {
                    continue;
                }
                let mirror = self.position(c, r).ok_or_else(|| {
                    Error::InvalidArgument(format!("entry ({r}, {c}) has no mirror ({c}, {r})"))
                })?;
                let avg = 0.5 * (self.values[k] + self.values[mirror]);
                self.values[k] = avg;
                self.values[mirror] = avg;
            }
        }
        Ok(())
    }

    fn position(&self, r: usize, c: usize) -> Option<usize> {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        self.cols[lo..hi]
            .binary_search(&(c as u32))
            .ok()
            .map(|p| lo + p)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.position(r, c).map_or(0.0, |k| self.values[k])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_offsets[r]..self.row_offsets[r + 1])
                .map(move |k| (r, self.cols[k] as usize, self.values[k]))
        })
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: len,
            });
        }
        Ok(())
    }

    /// `y = self * x` without touching any counter.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[r], self.row_offsets[r + 1]);
            *yr = row_dot(&self.cols[lo..hi], &self.values[lo..hi], x);
        }
    }

    /// Counted application, one unit.
    pub fn apply(&self, x: &[Complex64], counter: &MatvecCounter) -> Result<StateVector> {
        self.check(x.len())?;
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut y);
        counter.add(1);
        Ok(y)
    }

    /// Writes the text triplet format: a `dimension nnz` header followed by
    /// one `row col value` line per stored entry.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.dim, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {v:.17e}")?;
        }
        Ok(())
    }

    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty triplet file".into()))??;
        let mut it = header.split_whitespace();
        let parse_usize = |s: Option<&str>| -> Result<usize> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad triplet header `{header}`")))
        };
        let dim = parse_usize(it.next())?;
        let nnz = parse_usize(it.next())?;
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Format(format!("bad triplet line `{line}`"));
            if f.len() != 3 {
                return Err(bad());
            }
            triplets.push((
                f[0].parse().map_err(|_| bad())?,
                f[1].parse().map_err(|_| bad())?,
                f[2].parse().map_err(|_| bad())?,
            ));
        }
        if triplets.len() != nnz {
            return Err(Error::Format(format!(
                "header announces {nnz} entries, found {}",
                triplets.len()
            )));
        }
        Self::from_triplets(dim, &triplets)
    }
}

#[inline]
fn row_dot(cols: &[u32], values: &[f64], x: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (&c, &v) in cols.iter().zip(values) {
        let xc = x[c as usize];
        re += v * xc.re;
        im += v * xc.im;
    }
    Complex64::new(re, im)
}

/// `y = (A + f B) x`, uncounted.
pub fn hamiltonian_into(
    a: &SparseOperator,
    b: &SparseOperator,
    f: f64,
    x: &[Complex64],
    y: &mut [Complex64],
) {
    for (r, yr) in y.iter_mut().enumerate() {
        let (alo, ahi) = (a.row_offsets[r], a.row_offsets[r + 1]);
        let (blo, bhi) = (b.row_offsets[r], b.row_offsets[r + 1]);
        let ya = row_dot(&a.cols[alo..ahi], &a.values[alo..ahi], x);
        let yb = row_dot(&b.cols[blo..bhi], &b.values[blo..bhi], x);
        *yr = ya + yb * f;
    }
}

/// Real-vector variant of [`hamiltonian_into`].
pub fn hamiltonian_real_into(a: &SparseOperator, b: &SparseOperator, f: f64, x: &[f64], y: &mut [f64]) {
    for (r, yr) in y.iter_mut().enumerate() {
        let mut acc_a = 0.0;
        for k in a.row_offsets[r]..a.row_offsets[r + 1] {
            acc_a += a.values[k] * x[a.cols[k] as usize];
        }
        let mut acc_b = 0.0;
        for k in b.row_offsets[r]..b.row_offsets[r + 1] {
            acc_b += b.values[k] * x[b.cols[k] as usize];
        }
        *yr = acc_a + f * acc_b;
    }
}

/// `(A + f B) v`, one unit.
pub fn apply_hamiltonian(
    a: &SparseOperator,
    b: &SparseOperator,
    f: f64,
    v: &[Complex64],
    counter: &MatvecCounter,
) -> Result<StateVector> {
    a.check(b.dim)?;
    a.check(v.len())?;
    let mut y = vec![Complex64::new(0.0, 0.0); v.len()];
    hamiltonian_into(a, b, f, v, &mut y);
    counter.add(1);
    Ok(y)
}

/// `Av` and `Bv` in one pass, one unit.
pub fn apply_pair(
    a: &SparseOperator,
    b: &SparseOperator,
    v: &[Complex64],
    counter: &MatvecCounter,
) -> Result<(StateVector, StateVector)> {
    a.check(b.dim)?;
    a.check(v.len())?;
    let mut av = vec![Complex64::new(0.0, 0.0); v.len()];
    let mut bv = vec![Complex64::new(0.0, 0.0); v.len()];
    a.apply_into(v, &mut av);
    b.apply_into(v, &mut bv);
    counter.add(1);
    Ok((av, bv))
}

/// `A(Bv) - B(Av)` from already computed `Av` and `Bv`; one unit.
pub fn commutator_from_products(
    a: &SparseOperator,
    b: &SparseOperator,
    av: &[Complex64],
    bv: &[Complex64],
    counter: &MatvecCounter,
) -> Result<StateVector> {
    a.check(b.dim)?;
    a.check(av.len())?;
    a.check(bv.len())?;
    let n = av.len();
    let mut abv = vec![Complex64::new(0.0, 0.0); n];
    let mut bav = vec![Complex64::new(0.0, 0.0); n];
    a.apply_into(bv, &mut abv);
    b.apply_into(av, &mut bav);
    for (x, y) in abv.iter_mut().zip(&bav) {
        *x -= y;
    }
    counter.add(1);
    Ok(abv)
}

/// `[A, B] v = A(Bv) - B(Av)`; two units when computed from scratch.
pub fn apply_commutator(
    a: &SparseOperator,
    b: &SparseOperator,
    v: &[Complex64],
    counter: &MatvecCounter,
) -> Result<StateVector> {
    let (av, bv) = apply_pair(a, b, v, counter)?;
    commutator_from_products(a, b, &av, &bv, counter)
}
