//! Coordinate-format sparse matrices and sorted ID <-> ordinal maps.

use crate::error::{Error, Result};

/// Real sparse matrix in canonical coordinate form: entries sorted by
/// `(row, col)`, duplicates summed, explicit zeros dropped. Two equal matrices
/// therefore have identical entry sequences.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, 1.0)).collect(),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_triplets(
            values.len(),
            values.len(),
            values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
        .expect("diagonal indices are in range")
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(Error::Shape(format!(
                "entry ({r}, {c}) outside a {rows}x{cols} matrix"
            )));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != 0.0);
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build from entries already sorted, unique and nonzero.
    fn from_canonical(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(entries
            .windows(2)
            .all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .filter(|e| e.2 != 0.0)
            .collect();
        Self::from_canonical(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Row start offsets into `entries` (compressed-row view).
    pub fn row_offsets(&self) -> Vec<usize> {
        let mut offsets = vec![0usize; self.rows + 1];
        for &(r, _, _) in &self.entries {
            offsets[r + 1] += 1;
        }
        for i in 0..self.rows {
            offsets[i + 1] += offsets[i];
        }
        offsets
    }

    pub fn row(&self, i: usize) -> &[(usize, usize, f64)] {
        let start = self.entries.partition_point(|e| e.0 < i);
        let end = self.entries.partition_point(|e| e.0 <= i);
        &self.entries[start..end]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(i, j)))
            .map_or(0.0, |k| self.entries[k].2)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_by_key(|e| (e.0, e.1));
        Self::from_canonical(self.cols, self.rows, entries)
    }

    /// Row `i` multiplied by `d[i]`, i.e. `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.rows {
            return Err(Error::Shape(format!(
                "row scaling vector of length {} for {} rows",
                d.len(),
                self.rows
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v * d[r]))
            .filter(|e| e.2 != 0.0)
            .collect();
        Ok(Self::from_canonical(self.rows, self.cols, entries))
    }

    /// Column `j` multiplied by `d[j]`, i.e. `self * diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.cols {
            return Err(Error::Shape(format!(
                "column scaling vector of length {} for {} columns",
                d.len(),
                self.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v * d[c]))
            .filter(|e| e.2 != 0.0)
            .collect();
        Ok(Self::from_canonical(self.rows, self.cols, entries))
    }

    pub fn scale(&self, s: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v * s))
            .filter(|e| e.2 != 0.0)
            .collect();
        Self::from_canonical(self.rows, self.cols, entries)
    }

    /// Entrywise absolute value; turns an oriented incidence into its unoriented pattern.
    pub fn abs(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v.abs()))
            .collect();
        Self::from_canonical(self.rows, self.cols, entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut t = self.entries.clone();
        t.extend_from_slice(&other.entries);
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Exact sparse product `self * other` (sparse accumulator per row).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let b_offsets = other.row_offsets();
        let mut acc = vec![0.0; other.cols];
        let mut touched = vec![false; other.cols];
        let mut cols_in_row: Vec<usize> = Vec::new();
        let mut entries = Vec::new();
        for row in 0..self.rows {
            for &(_, k, a) in self.row(row) {
                for &(_, j, b) in &other.entries[b_offsets[k]..b_offsets[k + 1]] {
                    if !touched[j] {
                        touched[j] = true;
                        cols_in_row.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            cols_in_row.sort_unstable();
            for &j in &cols_in_row {
                if acc[j] != 0.0 {
                    entries.push((row, j, acc[j]));
                }
                acc[j] = 0.0;
                touched[j] = false;
            }
            cols_in_row.clear();
        }
        Ok(Self::from_canonical(self.rows, other.cols, entries))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut y = vec![0.0; self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        Ok(y)
    }

    /// `x^T * self` as a vector.
    pub fn vecmat(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::Shape(format!(
                "vector of length {} for {} rows",
                x.len(),
                self.rows
            )));
        }
        let mut y = vec![0.0; self.cols];
        for &(r, c, v) in &self.entries {
            y[c] += x[r] * v;
        }
        Ok(y)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.rows];
        for &(r, _, v) in &self.entries {
            s[r] += v;
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }

    /// Largest entrywise difference to `other` (same shape required).
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }
}

/// Bijection between sorted global IDs and dense ordinals `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMap<K> {
    keys: Vec<K>,
}

impl<K> Default for IndexMap<K> {
    fn default() -> Self {
        Self { keys: Vec::new() }
    }
}

impl<K: Ord + Copy> IndexMap<K> {
    pub fn new(mut keys: Vec<K>) -> Self {
        keys.sort_unstable();
        keys.dedup();
        Self { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn ordinal(&self, key: &K) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }

    pub fn key(&self, ordinal: usize) -> K {
        self.keys[ordinal]
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }
}
