//! Dense, bit-packed linear algebra over the two-element field.
//!
//! Vectors are stored as little-endian runs of `u64` words. Elimination is
//! column-oriented and always pivots on the lowest set bit, so reduced forms
//! are reproducible across runs.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Vector with ones exactly at `indices`. Indices listed twice cancel.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = F2Vector::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        F2Vector::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    /// Standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        F2Vector::from_indices(len, [i])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    #[inline]
    pub fn lowest_set_bit(&self) -> Option<usize> {
        self.lowest_set_bit_from(0)
    }

    /// Index of the lowest set bit at position `>= start`.
    pub fn lowest_set_bit_from(&self, start: usize) -> Option<usize> {
        if start >= self.len {
            return None;
        }
        let mut w = start / WORD;
        let mut word = self.words[w] & (!0u64 << (start % WORD));
        loop {
            if word != 0 {
                let i = w * WORD + word.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            word = self.words[w];
        }
    }

    /// Iterator over the positions of set bits, ascending.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// `self += other`. Panics if the lengths differ.
    #[inline]
    pub fn xor_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "F2Vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Adds the first `self.len()` coordinates of `other` into `self`.
    /// `other` may be longer; its tail is ignored.
    #[inline]
    pub fn xor_prefix_of(&mut self, other: &F2Vector) {
        assert!(other.len >= self.len, "prefix source shorter than target");
        let full = self.len / WORD;
        for (a, b) in self.words[..full].iter_mut().zip(&other.words[..full]) {
            *a ^= b;
        }
        let rem = self.len % WORD;
        if rem != 0 {
            self.words[full] ^= other.words[full] & ((1u64 << rem) - 1);
        }
    }

    /// First `len` coordinates. Panics if `len > self.len()`.
    pub fn truncated(&self, len: usize) -> F2Vector {
        assert!(len <= self.len, "cannot truncate to a longer length");
        let mut out = F2Vector::zeros(len);
        out.xor_prefix_of(self);
        out
    }

    /// Zero-padded copy of length `len >= self.len()`.
    pub fn extended(&self, len: usize) -> F2Vector {
        assert!(len >= self.len, "cannot extend to a shorter length");
        let mut words = self.words.clone();
        words.resize(words_for(len), 0);
        F2Vector { len, words }
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "F2Vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_index * WORD + bit);
            }
            self.word_index += 1;
            if self.word_index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_index];
        }
    }
}

/// A dense matrix over F2 stored column by column.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    columns: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows,
            columns: vec![F2Vector::zeros(rows); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix {
            rows: n,
            columns: (0..n).map(|i| F2Vector::unit(n, i)).collect(),
        }
    }

    /// Matrix with no columns.
    pub fn empty(rows: usize) -> Self {
        F2Matrix {
            rows,
            columns: Vec::new(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<F2Vector>) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: c.len(),
            });
        }
        Ok(F2Matrix { rows, columns })
    }

    /// Builds a matrix from row-major 0/1 entries. Test helper.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = F2Matrix::zeros(n_rows, n_cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows");
            for (c, &x) in row.iter().enumerate() {
                if x & 1 == 1 {
                    m.columns[c].set(r, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &F2Vector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[F2Vector] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<F2Vector> {
        self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].get(r)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.columns[c].set(r, bit);
    }

    pub fn push_column(&mut self, v: F2Vector) -> Result<()> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        self.columns.push(v);
        Ok(())
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols(), self.rows);
        for (c, col) in self.columns.iter().enumerate() {
            for r in col.ones() {
                t.columns[r].set(c, true);
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(F2Matrix {
            rows: self.rows,
            columns,
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &F2Vector) -> Result<F2Vector> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                found: x.len(),
            });
        }
        let mut out = F2Vector::zeros(self.rows);
        for j in x.ones() {
            out.xor_assign(&self.columns[j]);
        }
        Ok(out)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols())?;
        for r in 0..self.rows {
            for c in 0..self.cols() {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Column echelon form built incrementally; every stored vector has a distinct
/// lowest set bit (its pivot).
///
/// With tracking enabled each stored vector carries the combination of
/// inserted vectors it equals, which is what kernel computations need.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    pivot_of: Vec<usize>,
    vectors: Vec<F2Vector>,
    tracks: Option<Vec<F2Vector>>,
    track_len: usize,
}

const NO_PIVOT: usize = usize::MAX;

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            pivot_of: vec![NO_PIVOT; dim],
            vectors: Vec::new(),
            tracks: None,
            track_len: 0,
        }
    }

    /// Echelon form whose vectors remember which of up to `track_len`
    /// tagged inputs they are built from.
    pub fn with_tracking(dim: usize, track_len: usize) -> Self {
        Echelon {
            tracks: Some(Vec::new()),
            track_len,
            ..Echelon::new(dim)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[F2Vector] {
        &self.vectors
    }

    fn check_len(&self, v: &F2Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Reduces `v` until its lowest set bit is not a pivot (or it vanishes).
    /// Returns the residual and, when tracking, the combination that was added.
    fn reduce_inner(&self, mut v: F2Vector) -> (F2Vector, Option<F2Vector>) {
        let mut track = self.tracks.as_ref().map(|_| F2Vector::zeros(self.track_len));
        let mut from = 0;
        while let Some(p) = v.lowest_set_bit_from(from) {
            let k = self.pivot_of[p];
            if k == NO_PIVOT {
                break;
            }
            v.xor_assign(&self.vectors[k]);
            if let (Some(t), Some(ts)) = (track.as_mut(), self.tracks.as_ref()) {
                t.xor_assign(&ts[k]);
            }
            from = p + 1;
        }
        (v, track)
    }

    /// Residual of `v` modulo the span.
    pub fn reduce(&self, v: &F2Vector) -> Result<F2Vector> {
        self.check_len(v)?;
        Ok(self.reduce_inner(v.clone()).0)
    }

    pub fn contains(&self, v: &F2Vector) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// Inserts `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: F2Vector) -> Result<bool> {
        self.check_len(&v)?;
        let (r, _) = self.reduce_inner(v);
        Ok(self.push_reduced(r, None))
    }

    /// Inserts `v` tagged with a combination `tag` (length `track_len`).
    ///
    /// Returns `None` if `v` was independent, or `Some(combination)` giving a
    /// set of tags whose vectors sum to zero (a kernel element) otherwise.
    pub fn insert_tracked(&mut self, v: F2Vector, tag: F2Vector) -> Result<Option<F2Vector>> {
        self.check_len(&v)?;
        if self.tracks.is_none() {
            return Err(Error::Invariant("insert_tracked on an untracked echelon".into()));
        }
        if tag.len() != self.track_len {
            return Err(Error::DimensionMismatch {
                expected: self.track_len,
                found: tag.len(),
            });
        }
        let (r, t) = self.reduce_inner(v);
        let mut t = t.expect("tracking enabled");
        t.xor_assign(&tag);
        if r.is_zero() {
            Ok(Some(t))
        } else {
            self.push_reduced(r, Some(t));
            Ok(None)
        }
    }

    fn push_reduced(&mut self, r: F2Vector, track: Option<F2Vector>) -> bool {
        let Some(p) = r.lowest_set_bit() else {
            return false;
        };
        debug_assert_eq!(self.pivot_of[p], NO_PIVOT);
        self.pivot_of[p] = self.vectors.len();
        self.vectors.push(r);
        if let Some(ts) = self.tracks.as_mut() {
            ts.push(track.unwrap_or_else(|| F2Vector::zeros(self.track_len)));
        }
        true
    }
}

/// Dimension of the column span of `m`.
pub fn rank(m: &F2Matrix) -> usize {
    let mut e = Echelon::new(m.rows());
    for c in m.columns() {
        e.insert(c.clone()).expect("column length matches row count");
    }
    e.rank()
}

/// `dim((span S + span B) / span B)`.
pub fn quotient_rank(s: &F2Matrix, b: &F2Matrix) -> Result<usize> {
    if s.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: b.rows(),
            found: s.rows(),
        });
    }
    let mut e = Echelon::new(b.rows());
    for c in b.columns() {
        e.insert(c.clone())?;
    }
    let base = e.rank();
    for c in s.columns() {
        e.insert(c.clone())?;
    }
    Ok(e.rank() - base)
}

/// Whether `v` lies in the column span of `basis`.
pub fn member(basis: &F2Matrix, v: &F2Vector) -> Result<bool> {
    if v.len() != basis.rows() {
        return Err(Error::DimensionMismatch {
            expected: basis.rows(),
            found: v.len(),
        });
    }
    let mut e = Echelon::new(basis.rows());
    for c in basis.columns() {
        e.insert(c.clone())?;
    }
    e.contains(v)
}

/// Basis of the null space `{x : M x = 0}`, as columns of length `m.cols()`.
pub fn kernel(m: &F2Matrix) -> F2Matrix {
    let n = m.cols();
    let mut e = Echelon::with_tracking(m.rows(), n);
    let mut out = F2Matrix::empty(n);
    for (j, c) in m.columns().iter().enumerate() {
        if let Some(k) = e
            .insert_tracked(c.clone(), F2Vector::unit(n, j))
            .expect("column length matches row count")
        {
            out.push_column(k).expect("kernel vector has cols() entries");
        }
    }
    out
}
