//! Enumeration of the non-degenerate symmetric subspace for `k` phases and
//! `N` resources, plus the exact combinatorial weights attached to its basis.
//!
//! The basis is labelled by occupation vectors `(n1, ..., nk)` with
//! `n1 + ... + nk <= N`; the implied zeroth occupation is
//! `n0 = N - sum(nj)`. Ordering is lexicographic with `n1` outermost, which
//! matches the nested-sum convention used everywhere else in this crate
//! (amplitude vectors, DFT grids, CSV output).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HilbertError {
    #[error("basis dimension C({n}+{k},{n}) overflows the indexing range (k={k}, N={n})")]
    Capacity { k: usize, n: u32 },
    #[error("phase count k must be at least 1")]
    ZeroPhases,
    #[error("index {entries:?} is not a valid occupation vector for N={n}")]
    InvalidIndex { entries: Vec<u32>, n: u32 },
}

/// Occupation numbers `(n1, ..., nk)` of one non-degenerate basis vector.
///
/// Entries are non-negative by construction; validity against a resource
/// count `N` (sum <= N) is checked by the operations that need it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplexIndex {
    entries: Vec<u32>,
}

impl SimplexIndex {
    pub fn new(entries: impl Into<Vec<u32>>) -> Self {
        Self {
            entries: entries.into(),
        }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Sum of the explicit occupations `n1 + ... + nk`.
    pub fn weight(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// The implied `n0 = N - weight`, or `None` when the index is invalid for `N`.
    pub fn residual(&self, n: u32) -> Option<u32> {
        n.checked_sub(self.weight())
    }
}

impl From<Vec<u32>> for SimplexIndex {
    fn from(entries: Vec<u32>) -> Self {
        Self::new(entries)
    }
}

/// The ordered basis of the non-degenerate subspace for fixed `(k, N)`.
///
/// Indices are stored flat (row-major, `k` entries per basis vector) and are
/// pairwise distinct and exhaustive over the simplex `sum(nj) <= N`.
#[derive(Debug, Clone)]
pub struct BasisCatalog {
    k: usize,
    n: u32,
    flat: Vec<u32>,
}

impl BasisCatalog {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.flat.len() / self.k
    }

    /// Occupations of the `i`-th basis vector, in catalog order.
    pub fn get(&self, i: usize) -> &[u32] {
        &self.flat[i * self.k..(i + 1) * self.k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks_exact(self.k)
    }
}

/// Enumerate the basis for `k` phases and `N` resources in nested-sum order
/// (`n1` outermost, each inner index running up to the remaining budget).
pub fn enumerate_basis(k: usize, n: u32) -> Result<BasisCatalog, HilbertError> {
    let size = dimension(k, n)?;
    let size: usize = size
        .try_into()
        .map_err(|_| HilbertError::Capacity { k, n })?;
    size.checked_mul(k).ok_or(HilbertError::Capacity { k, n })?;

    let mut flat = Vec::with_capacity(size * k);
    let mut prefix = vec![0u32; k];
    fill(&mut flat, &mut prefix, 0, n);
    debug_assert_eq!(flat.len(), size * k);
    Ok(BasisCatalog { k, n, flat })
}

fn fill(flat: &mut Vec<u32>, prefix: &mut [u32], level: usize, budget: u32) {
    if level == prefix.len() {
        flat.extend_from_slice(prefix);
        return;
    }
    for v in 0..=budget {
        prefix[level] = v;
        fill(flat, prefix, level + 1, budget - v);
    }
    prefix[level] = 0;
}

/// Dimension of the non-degenerate subspace, `C(N+k, N)`, as an exact integer.
pub fn dimension(k: usize, n: u32) -> Result<u64, HilbertError> {
    if k == 0 {
        return Err(HilbertError::ZeroPhases);
    }
    let a = n as u128 + k as u128;
    let b = (k as u128).min(n as u128);
    let mut acc: u128 = 1;
    for i in 0..b {
        // acc stays an exact binomial after each divide
        acc = acc
            .checked_mul(a - i)
            .ok_or(HilbertError::Capacity { k, n })?;
        acc /= i + 1;
    }
    acc.try_into().map_err(|_| HilbertError::Capacity { k, n })
}

/// Natural log of `n!`, exact in f64 for n <= 33 (integer factorial) and via
/// a Stirling series beyond (error below 1e-16 relative there).
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 33 {
        let mut f: u128 = 1;
        for i in 2..=n as u128 {
            f *= i;
        }
        return (f as f64).ln();
    }
    let x = (n + 1) as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// Natural log of the binomial coefficient `C(a, b)`.
pub fn ln_binomial(a: u64, b: u64) -> f64 {
    assert!(b <= a, "ln_binomial: b > a");
    ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)
}

/// Natural log of the multinomial weight `N! / (n0! n1! ... nk!)` of a basis
/// vector, with `n0 = N - sum(nj)` included.
pub fn log_multiplicity(n: u32, index: &SimplexIndex) -> Result<f64, HilbertError> {
    let n0 = index
        .residual(n)
        .ok_or_else(|| HilbertError::InvalidIndex {
            entries: index.entries().to_vec(),
            n,
        })?;
    Ok(log_multiplicity_parts(n, n0, index.entries()))
}

/// Same as [`log_multiplicity`] but on raw catalog slices; preconditions are
/// the caller's responsibility (`n0 + sum(entries) == n`).
pub(crate) fn log_multiplicity_parts(n: u32, n0: u32, entries: &[u32]) -> f64 {
    let mut acc = ln_factorial(n as u64) - ln_factorial(n0 as u64);
    for &nj in entries {
        acc -= ln_factorial(nj as u64);
    }
    acc
}
