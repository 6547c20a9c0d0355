//! Subset-count profiles `α(s)`: how many `s`-subsets of columns span a
//! target file.
//!
//! [`alpha_exhaustive`] enumerates subsets depth-first, carrying an
//! incremental basis down the include/exclude recursion. Once the current
//! subset spans the target, every completion of it does too, so the whole
//! subtree is counted with binomials instead of visited.

use std::ops::Range;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::code_model::{CodeSpec, FileId};
use crate::error::{Error, Result};
use crate::matrix::{pack, GenericBasis, Matrix, PackedBasis, Vector, PACKED_MAX_DIM};
use crate::scalar::{binomial, serde_biguint_vec, Scalar};

/// Default largest `n` enumerated without `force`.
pub const DEFAULT_CAP: usize = 28;

/// Hard ceiling; subset counts are accumulated in `u128`.
pub const HARD_CAP: usize = 127;

/// Exact counts `α(0), ..., α(n)` for one target subspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaProfile {
    pub n: usize,
    pub target_dim: usize,
    #[serde(serialize_with = "serde_biguint_vec::serialize")]
    pub counts: Vec<BigUint>,
}

impl AlphaProfile {
    pub fn new(n: usize, target_dim: usize, counts: Vec<BigUint>) -> Self {
        assert_eq!(counts.len(), n + 1, "profile needs n + 1 entries");
        Self {
            n,
            target_dim,
            counts,
        }
    }

    pub fn get(&self, s: usize) -> &BigUint {
        &self.counts[s]
    }
}

#[derive(Debug, Clone)]
pub struct EnumOptions {
    pub cap: usize,
    pub force: bool,
    /// Number of leading include/exclude decisions split into parallel
    /// tasks. `None` uses `ceil(log2(threads))`.
    pub split_depth: Option<usize>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            force: false,
            split_depth: None,
        }
    }
}

impl EnumOptions {
    pub fn forced() -> Self {
        Self {
            force: true,
            ..Self::default()
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if n > HARD_CAP || (n > self.cap && !self.force) {
            let cap = if self.force { HARD_CAP } else { self.cap };
            return Err(Error::TooLarge { n, cap });
        }
        Ok(())
    }

    fn depth(&self, n: usize) -> usize {
        let d = self.split_depth.unwrap_or_else(|| {
            let workers = rayon::current_num_threads().max(1);
            workers.next_power_of_two().trailing_zeros() as usize
        });
        d.min(n)
    }
}

pub fn alpha_exhaustive(code: &CodeSpec, file: FileId) -> Result<AlphaProfile> {
    alpha_exhaustive_with(code, file, &EnumOptions::default())
}

pub fn alpha_exhaustive_with(
    code: &CodeSpec,
    file: FileId,
    opts: &EnumOptions,
) -> Result<AlphaProfile> {
    alpha_for_target(code.matrix(), code.partition().coords(file), opts)
}

/// Counts subsets whose span contains `e_i` for every `i` in `target`.
pub fn alpha_for_target(
    matrix: &Matrix,
    target: Range<usize>,
    opts: &EnumOptions,
) -> Result<AlphaProfile> {
    let n = matrix.cols();
    let k = matrix.rows();
    opts.check(n)?;
    if target.end > k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: target.end,
        });
    }
    let target_dim = target.len();
    let depth = opts.depth(n);
    let table = BinomialTable::new(n);

    let raw = if matrix.field().is_binary() && k <= PACKED_MAX_DIM {
        let cols: Vec<u64> = (0..n).map(|j| pack(&matrix.column(j))).collect();
        let mask = target.clone().fold(0u64, |m, i| m | (1u64 << i));
        let make = || PackedTracker {
            cols: &cols,
            basis: PackedBasis::default(),
            target: mask,
            grew: Vec::with_capacity(n),
        };
        run_split(n, target_dim, depth, &table, make)
    } else {
        let cols: Vec<Vector> = matrix.columns();
        let make = || GenericTracker {
            cols: &cols,
            basis: GenericBasis::new(matrix.field(), k),
            target: target.clone(),
            scratch: vec![0; k],
            grew: Vec::with_capacity(n),
        };
        run_split(n, target_dim, depth, &table, make)
    };

    let counts = raw.into_iter().map(BigUint::from).collect();
    Ok(AlphaProfile::new(n, target_dim, counts))
}

trait Tracker: Send {
    /// Adds column `j` to the current subset.
    fn push(&mut self, j: usize);
    /// Removes the most recently pushed column.
    fn pop(&mut self);
    fn rank(&self) -> usize;
    fn covers_target(&mut self) -> bool;
}

struct PackedTracker<'a> {
    cols: &'a [u64],
    basis: PackedBasis,
    target: u64,
    grew: Vec<bool>,
}

impl Tracker for PackedTracker<'_> {
    #[inline]
    fn push(&mut self, j: usize) {
        let g = self.basis.insert(self.cols[j]).is_some();
        self.grew.push(g);
    }

    #[inline]
    fn pop(&mut self) {
        if self.grew.pop() == Some(true) {
            self.basis.pop();
        }
    }

    #[inline]
    fn rank(&self) -> usize {
        self.basis.rank()
    }

    #[inline]
    fn covers_target(&mut self) -> bool {
        let mut m = self.target;
        while m != 0 {
            let bit = m & m.wrapping_neg();
            if !self.basis.contains(bit) {
                return false;
            }
            m ^= bit;
        }
        true
    }
}

struct GenericTracker<'a> {
    cols: &'a [Vector],
    basis: GenericBasis,
    target: Range<usize>,
    scratch: Vec<u64>,
    grew: Vec<bool>,
}

impl Tracker for GenericTracker<'_> {
    fn push(&mut self, j: usize) {
        let g = self.basis.insert(self.cols[j].clone());
        self.grew.push(g);
    }

    fn pop(&mut self) {
        if self.grew.pop() == Some(true) {
            self.basis.pop();
        }
    }

    fn rank(&self) -> usize {
        self.basis.rank()
    }

    fn covers_target(&mut self) -> bool {
        let scratch = &mut self.scratch;
        self.target
            .clone()
            .all(|i| self.basis.contains_unit(i, scratch))
    }
}

/// `C(m, j)` for `m, j <= n` as `u128`.
struct BinomialTable {
    rows: Vec<Vec<u128>>,
}

impl BinomialTable {
    fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut row = vec![1u128; m + 1];
            for j in 1..m {
                row[j] = rows[m - 1][j - 1] + rows[m - 1][j];
            }
            rows.push(row);
        }
        Self { rows }
    }
}

fn run_split<T, F>(
    n: usize,
    target_dim: usize,
    depth: usize,
    table: &BinomialTable,
    make: F,
) -> Vec<u128>
where
    T: Tracker,
    F: Fn() -> T + Sync,
{
    let prefixes: Vec<u64> = (0..1u64 << depth).collect();
    prefixes
        .par_iter()
        .map(|&prefix| {
            let mut counts = vec![0u128; n + 1];
            let mut tracker = make();
            let mut size = 0;
            for j in 0..depth {
                if prefix >> j & 1 == 1 {
                    tracker.push(j);
                    size += 1;
                }
            }
            let mut ctx = Dfs {
                n,
                target_dim,
                table,
                counts: &mut counts,
            };
            ctx.visit(&mut tracker, depth, size);
            counts
        })
        .reduce(
            || vec![0u128; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

struct Dfs<'a> {
    n: usize,
    target_dim: usize,
    table: &'a BinomialTable,
    counts: &'a mut [u128],
}

impl Dfs<'_> {
    fn visit<T: Tracker>(&mut self, t: &mut T, idx: usize, size: usize) {
        let rem = self.n - idx;
        if t.covers_target() {
            for (j, c) in self.table.rows[rem].iter().enumerate() {
                self.counts[size + j] += c;
            }
            return;
        }
        if idx == self.n || t.rank() + rem < self.target_dim {
            return;
        }
        t.push(idx);
        self.visit(t, idx + 1, size + 1);
        t.pop();
        self.visit(t, idx + 1, size);
    }
}

/// Identity code `I_k`: `α(s) = C(k - s_i, s - s_i)` for `s >= s_i`.
pub fn alpha_identity(k: usize, s_i: usize) -> AlphaProfile {
    let counts = (0..=k)
        .map(|s| {
            if s < s_i {
                BigUint::zero()
            } else {
                binomial(k - s_i, s - s_i)
            }
        })
        .collect();
    AlphaProfile::new(k, s_i, counts)
}

/// Systematic `[n, k]` MDS code.
pub fn alpha_global_mds(n: usize, k: usize, s_i: usize) -> AlphaProfile {
    let counts = (0..=n)
        .map(|s| {
            if s < s_i {
                BigUint::zero()
            } else if s < k {
                binomial(n - s_i, s - s_i)
            } else {
                binomial(n, s)
            }
        })
        .collect();
    AlphaProfile::new(n, s_i, counts)
}

/// File-dedicated MDS block of `n_i` columns inside a pool of `n`: a subset
/// recovers the file iff it holds at least `s_i` of the block's columns.
pub fn alpha_local_mds(n: usize, n_i: usize, s_i: usize) -> AlphaProfile {
    let counts = (0..=n)
        .map(|s| {
            if s < s_i {
                return BigUint::zero();
            }
            (s_i..=s.min(n_i))
                .map(|j| binomial(n_i, j) * binomial(n - n_i, s - j))
                .sum()
        })
        .collect();
    AlphaProfile::new(n, s_i, counts)
}

/// `p(s) = α(s) / C(n, s)`.
pub fn p_profile(alpha: &AlphaProfile) -> Vec<BigRational> {
    (0..=alpha.n)
        .map(|s| BigRational::ratio(alpha.get(s), &binomial(alpha.n, s)))
        .collect()
}

/// `α1(s) + α2(s) <= C(n, s)` for every `s < k`.
pub fn check_mutual_exclusivity(a1: &AlphaProfile, a2: &AlphaProfile, k: usize) -> bool {
    assert_eq!(a1.n, a2.n, "profiles must share a pool");
    (0..k.min(a1.n + 1)).all(|s| a1.get(s) + a2.get(s) <= binomial(a1.n, s))
}

/// `p(s) <= p(s + 1)` for `1 <= s <= n - 1`.
pub fn check_p_monotone(p: &[BigRational]) -> bool {
    p.iter().skip(1).zip(p.iter().skip(2)).all(|(a, b)| a <= b)
}
