//! Dense matrices over GF(p) and incremental span tracking.
//!
//! Vectors are plain `Vec<u64>` of canonical field elements. Over GF(2) with
//! at most 64 coordinates, [`IncrementalBasis`] packs each vector into one
//! machine word and reduces with XOR.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;

pub type Vector = Vec<u64>;

/// Sanity limit on the number of rows of the generic path.
pub const MAX_ROWS: usize = 512;

/// Largest dimension handled by the packed GF(2) path.
pub const PACKED_MAX_DIM: usize = 64;

/// A `rows x cols` matrix over a prime field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Entries must already be in `[0, p)`.
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if rows > MAX_ROWS {
            return Err(Error::Unsupported(format!(
                "{rows} rows exceeds the limit of {MAX_ROWS}"
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x >= field.modulus()) {
            return Err(Error::InvalidArgument(format!(
                "entry {bad} not in [0, {})",
                field.modulus()
            )));
        }
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vector]) -> Result<Self> {
        let cols = columns.len();
        let mut data = vec![0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            check_len(c, rows)?;
            for (i, &x) in c.iter().enumerate() {
                data[i * cols + j] = x;
            }
        }
        Self::new(field, rows, cols, data)
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, k: usize) -> Self {
        let mut m = Self::zeros(field, k, k);
        for i in 0..k {
            m.data[i * k + i] = 1;
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let cols: Vec<Vector> = idx.iter().map(|&j| self.column(j)).collect();
        Matrix::from_columns(self.field, self.rows, &cols).expect("columns of equal length")
    }

    /// Keeps only rows `range` (used for projections onto a file).
    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Matrix {
        let data = range.clone().flat_map(|r| self.row(r).to_vec()).collect();
        Matrix {
            field: self.field,
            rows: range.len(),
            cols: self.cols,
            data,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::Mismatch(format!(
                "fields GF({}) and GF({})",
                self.field.modulus(),
                other.field.modulus()
            )));
        }
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Reduced row echelon form with leftmost pivots; the pivot row is the
    /// first row at or below the current one with a nonzero entry.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.data[i * m.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Dimension of the column span. Uses the packed path over GF(2) when
    /// `rows <= 64`.
    pub fn rank(&self) -> usize {
        if self.field.is_binary() && self.rows <= PACKED_MAX_DIM {
            self.rank_packed()
        } else {
            self.rank_generic()
        }
    }

    pub fn rank_generic(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank through word-packed XOR elimination. Panics unless GF(2) and
    /// `rows <= 64`.
    pub fn rank_packed(&self) -> usize {
        assert!(self.field.is_binary() && self.rows <= PACKED_MAX_DIM);
        let mut basis = PackedBasis::default();
        for c in 0..self.cols {
            basis.insert(pack(&self.column(c)));
        }
        basis.rank()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix GF({}) {}x{}",
            self.field.modulus(),
            self.rows,
            self.cols
        )?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(u64::to_string).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Standard basis vector `e_i` of length `dim`.
pub fn unit_vector(dim: usize, i: usize) -> Vector {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

/// Whether `v` lies in the span of `cols`.
pub fn span_contains(field: PrimeField, cols: &[Vector], v: &[u64]) -> Result<bool> {
    let mut basis = IncrementalBasis::new(field, v.len());
    for c in cols {
        basis.insert(c)?;
    }
    let before = basis.rank();
    let increased = basis.insert(v)?;
    debug_assert_eq!(increased, basis.rank() == before + 1);
    Ok(!increased)
}

/// Whether every vector of `basis` lies in the span of `cols`.
pub fn spans_subspace(field: PrimeField, cols: &[Vector], basis: &[Vector]) -> Result<bool> {
    let Some(dim) = cols.first().or(basis.first()).map(Vec::len) else {
        return Ok(true);
    };
    let mut span = IncrementalBasis::new(field, dim);
    for c in cols {
        span.insert(c)?;
    }
    for b in basis {
        if !span.contains(b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `N(W)`: number of columns of `m` lying in the span of `subspace`.
pub fn column_count_in(m: &Matrix, subspace: &[Vector]) -> Result<usize> {
    let mut span = IncrementalBasis::new(m.field(), m.rows());
    for v in subspace {
        span.insert(v)?;
    }
    let mut count = 0;
    for c in 0..m.cols() {
        if span.contains(&m.column(c))? {
            count += 1;
        }
    }
    Ok(count)
}

fn check_len(v: &[u64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    Ok(())
}

/// Packs a GF(2) vector (length <= 64) into a word, coordinate `i` at bit `i`.
#[inline]
pub fn pack(v: &[u64]) -> u64 {
    debug_assert!(v.len() <= PACKED_MAX_DIM);
    v.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &x)| acc | ((x & 1) << i))
}

/// Span of a growing set of vectors, one insertion at a time.
#[derive(Debug, Clone)]
pub struct IncrementalBasis {
    field: PrimeField,
    dim: usize,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Packed(Box<PackedBasis>),
    Generic(GenericBasis),
}

impl IncrementalBasis {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        let repr = if field.is_binary() && dim <= PACKED_MAX_DIM {
            Repr::Packed(Box::default())
        } else {
            Repr::Generic(GenericBasis::new(field, dim))
        };
        Self { field, dim, repr }
    }

    /// Forces the element-array representation (for cross-checking).
    pub fn new_generic(field: PrimeField, dim: usize) -> Self {
        Self {
            field,
            dim,
            repr: Repr::Generic(GenericBasis::new(field, dim)),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        match &self.repr {
            Repr::Packed(b) => b.rank(),
            Repr::Generic(b) => b.rank(),
        }
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[u64]) -> Result<bool> {
        check_len(v, self.dim)?;
        Ok(match &mut self.repr {
            Repr::Packed(b) => b.insert(pack(v)).is_some(),
            Repr::Generic(b) => b.insert(v.to_vec()),
        })
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        check_len(v, self.dim)?;
        Ok(match &self.repr {
            Repr::Packed(b) => b.contains(pack(v)),
            Repr::Generic(b) => b.contains(v),
        })
    }

    /// Basis vectors in insertion order, each reduced against its
    /// predecessors.
    pub fn basis_rows(&self) -> Vec<Vector> {
        match &self.repr {
            Repr::Packed(b) => b
                .order
                .iter()
                .map(|&slot| {
                    let w = b.slots[slot as usize];
                    (0..self.dim).map(|i| (w >> i) & 1).collect()
                })
                .collect(),
            Repr::Generic(b) => b.rows.iter().map(|(_, r)| r.clone()).collect(),
        }
    }
}

/// XOR basis over GF(2) indexed by leading bit.
#[derive(Debug, Clone)]
pub(crate) struct PackedBasis {
    slots: [u64; PACKED_MAX_DIM],
    order: Vec<u8>,
}

impl Default for PackedBasis {
    fn default() -> Self {
        Self {
            slots: [0; PACKED_MAX_DIM],
            order: Vec::with_capacity(PACKED_MAX_DIM),
        }
    }
}

impl PackedBasis {
    #[inline]
    pub(crate) fn rank(&self) -> usize {
        self.order.len()
    }

    /// Returns the slot filled, if the span grew.
    #[inline]
    pub(crate) fn insert(&mut self, mut v: u64) -> Option<u8> {
        while v != 0 {
            let b = 63 - v.leading_zeros() as usize;
            let s = self.slots[b];
            if s == 0 {
                self.slots[b] = v;
                self.order.push(b as u8);
                return Some(b as u8);
            }
            v ^= s;
        }
        None
    }

    #[inline]
    pub(crate) fn contains(&self, mut v: u64) -> bool {
        while v != 0 {
            let b = 63 - v.leading_zeros() as usize;
            let s = self.slots[b];
            if s == 0 {
                return false;
            }
            v ^= s;
        }
        true
    }

    /// Removes the most recently added basis vector.
    #[inline]
    pub(crate) fn pop(&mut self) {
        if let Some(b) = self.order.pop() {
            self.slots[b as usize] = 0;
        }
    }
}

/// Echelon rows over GF(p); each row has a unit pivot and zeros at the
/// pivots of all earlier rows.
#[derive(Debug, Clone)]
pub(crate) struct GenericBasis {
    field: PrimeField,
    rows: Vec<(usize, Vector)>,
}

impl GenericBasis {
    pub(crate) fn new(field: PrimeField, dim: usize) -> Self {
        Self {
            field,
            rows: Vec::with_capacity(dim),
        }
    }

    #[inline]
    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u64]) {
        let f = self.field;
        for (pivot, row) in &self.rows {
            let factor = v[*pivot];
            if factor != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(factor, r));
                }
            }
        }
    }

    pub(crate) fn insert(&mut self, mut v: Vector) -> bool {
        self.reduce(&mut v);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(v[pivot]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push((pivot, v));
        true
    }

    pub(crate) fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Whether `e_i` is in the span, without allocating.
    pub(crate) fn contains_unit(&self, i: usize, scratch: &mut [u64]) -> bool {
        scratch.fill(0);
        scratch[i] = 1;
        self.reduce(scratch);
        scratch.iter().all(|&x| x == 0)
    }

    pub(crate) fn pop(&mut self) {
        self.rows.pop();
    }
}
