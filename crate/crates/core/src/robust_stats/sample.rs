use crate::domains::Vector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A vector stored as sorted `(index, value)` pairs over a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T> {
    dim: usize,
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> SparseVector<T> {
    /// Builds from arbitrary pairs; duplicate indices are summed in input order.
    pub fn new(dim: usize, mut entries: Vec<(usize, T)>) -> Result<Self> {
        if let Some(&(i, _)) = entries.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::Dimension { expected: dim, found: i + 1 });
        }
        if entries.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite("sparse sample"));
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some((j, w)) if *j == i => *w = *w + v,
                _ => merged.push((i, v)),
            }
        }
        Ok(Self { dim, entries: merged })
    }

    pub fn single(dim: usize, index: usize, value: T) -> Result<Self> {
        Self::new(dim, vec![(index, value)])
    }

    pub fn from_dense(v: &Vector<T>) -> Self {
        Self {
            dim: v.len(),
            entries: v.iter().copied().enumerate().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> T {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|p| self.entries[p].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn to_dense(&self) -> Vector<T> {
        let mut out = vec![T::zero(); self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        Vector::from_vec_unchecked(out)
    }
}

/// Equal-dimension gradient samples plus hidden ground-truth corruption flags.
///
/// Estimators only see `samples`; `corruption_mask` exists for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    dim: usize,
    samples: Vec<SparseVector<T>>,
    corruption_mask: Vec<bool>,
}

impl<T: Scalar> SampleSet<T> {
    pub fn new(dim: usize, samples: Vec<SparseVector<T>>) -> Result<Self> {
        if let Some(s) = samples.iter().find(|s| s.dim() != dim) {
            return Err(Error::Dimension { expected: dim, found: s.dim() });
        }
        let n = samples.len();
        Ok(Self {
            dim,
            samples,
            corruption_mask: vec![false; n],
        })
    }

    pub fn from_dense(samples: &[Vector<T>]) -> Result<Self> {
        let dim = samples.first().map(|s| s.len()).ok_or(Error::EmptySampleSet)?;
        Self::new(dim, samples.iter().map(SparseVector::from_dense).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[SparseVector<T>] {
        &self.samples
    }

    pub fn corruption_mask(&self) -> &[bool] {
        &self.corruption_mask
    }

    pub fn corrupted_count(&self) -> usize {
        self.corruption_mask.iter().filter(|&&c| c).count()
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [SparseVector<T>], &mut Vec<bool>) {
        (&mut self.samples, &mut self.corruption_mask)
    }

    /// Per-coordinate nonzero entries, ordered by sample index.
    pub(crate) fn columns(&self) -> Columns<T> {
        Columns::build(
            self.dim,
            self.samples.len(),
            self.samples
                .iter()
                .enumerate()
                .flat_map(|(n, s)| s.entries().iter().map(move |&(i, v)| (n, i, v))),
        )
    }
}

/// Column-major view of a sample set: for every coordinate the nonzero `(sample, value)`
/// pairs in sample order, over `rows` samples in total.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns<T> {
    rows: usize,
    offsets: Vec<usize>,
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> Columns<T> {
    /// Builds from `(sample, coordinate, value)` triples given in non-decreasing sample order.
    /// Zero values are dropped.
    pub fn build<I>(dim: usize, rows: usize, triples: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, T)> + Clone,
    {
        let mut offsets = vec![0usize; dim + 1];
        for (_, i, v) in triples.clone() {
            if v != T::zero() {
                offsets[i + 1] += 1;
            }
        }
        for k in 0..dim {
            offsets[k + 1] += offsets[k];
        }
        let mut fill = offsets.clone();
        let mut entries = vec![(0usize, T::zero()); offsets[dim]];
        for (n, i, v) in triples {
            if v != T::zero() {
                entries[fill[i]] = (n, v);
                fill[i] += 1;
            }
        }
        Self { rows, offsets, entries }
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn column(&self, k: usize) -> &[(usize, T)] {
        &self.entries[self.offsets[k]..self.offsets[k + 1]]
    }
}
