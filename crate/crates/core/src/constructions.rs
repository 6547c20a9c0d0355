//! Code families: identity, file-dedicated MDS, systematic global MDS and
//! the hybrid cycle code, plus repetition and concatenation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code_model::CodeSpec;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::Matrix;

/// Largest block length whose minors are all checked after construction.
pub const EXHAUSTIVE_MINOR_CHECK: usize = 14;

const SAMPLED_MINORS: usize = 256;

/// A construction tag, as carried by `# family: ...` lines in code files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Identity {
        k: usize,
    },
    Dedicated {
        n1: usize,
        n2: usize,
        s1: usize,
        s2: usize,
    },
    Global {
        n: usize,
        k: usize,
    },
    Hybrid {
        k: usize,
    },
}

impl Family {
    pub fn n(&self) -> usize {
        match *self {
            Family::Identity { k } => k,
            Family::Dedicated { n1, n2, .. } => n1 + n2,
            Family::Global { n, .. } => n,
            Family::Hybrid { k } => 2 * k,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            Family::Identity { k } | Family::Global { k, .. } | Family::Hybrid { k } => k,
            Family::Dedicated { s1, s2, .. } => s1 + s2,
        }
    }

    /// Builds the code. Dedicated tags fix their own partition, so `s1`
    /// must agree with it.
    pub fn build(&self, s1: usize) -> Result<CodeSpec> {
        match *self {
            Family::Identity { k } => make_identity(k, s1),
            Family::Global { n, k } => make_global_mds(n, k, s1),
            Family::Hybrid { k } => make_hybrid_cycle(k, s1),
            Family::Dedicated { n1, n2, s1: d1, s2 } => {
                if s1 != d1 {
                    return Err(Error::Mismatch(format!(
                        "tag fixes s1 = {d1}, requested s1 = {s1}"
                    )));
                }
                make_dedicated(n1, n2, d1, s2)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Identity { k } => write!(f, "identity k={k}"),
            Family::Dedicated { n1, n2, s1, s2 } => {
                write!(f, "dedicated n1={n1} n2={n2} s1={s1} s2={s2}")
            }
            Family::Global { n, k } => write!(f, "global n={n} k={k}"),
            Family::Hybrid { k } => write!(f, "hybrid k={k}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let name = words
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty family tag".into()))?;
        let mut params: Vec<(&str, usize)> = Vec::new();
        for w in words {
            let (key, value) = w
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{w}'")))?;
            let value = value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad value in '{w}'")))?;
            params.push((key, value));
        }
        let expected: &[&str] = match name {
            "identity" | "hybrid" => &["k"],
            "global" => &["n", "k"],
            "dedicated" => &["n1", "n2", "s1", "s2"],
            other => return Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        };
        let mut keys: Vec<&str> = params.iter().map(|p| p.0).collect();
        keys.sort_unstable();
        let mut want = expected.to_vec();
        want.sort_unstable();
        if keys != want {
            return Err(Error::InvalidArgument(format!(
                "family '{name}' needs parameters {}",
                expected.join(", ")
            )));
        }
        let get = |key: &str| params.iter().find(|p| p.0 == key).map(|p| p.1).unwrap();
        Ok(match name {
            "identity" => Family::Identity { k: get("k") },
            "hybrid" => Family::Hybrid { k: get("k") },
            "global" => Family::Global {
                n: get("n"),
                k: get("k"),
            },
            _ => Family::Dedicated {
                n1: get("n1"),
                n2: get("n2"),
                s1: get("s1"),
                s2: get("s2"),
            },
        })
    }
}

pub fn make_identity(k: usize, s1: usize) -> Result<CodeSpec> {
    CodeSpec::new(Matrix::identity(PrimeField::binary(), k), s1)
}

/// Systematic `s x m` MDS generator `[I_s | P]` over GF(q): a Vandermonde
/// matrix on the points `0..m` brought to reduced row echelon form.
pub fn make_mds_generator(s: usize, m: usize, q: PrimeField) -> Result<Matrix> {
    if s == 0 || s > m {
        return Err(Error::InvalidArgument(format!(
            "MDS generator needs 1 <= s <= m, got s = {s}, m = {m}"
        )));
    }
    if m as u64 > q.modulus() {
        return Err(Error::FieldTooSmall { m, q: q.modulus() });
    }
    let mut v = Matrix::zeros(q, s, m);
    for j in 0..m {
        for r in 0..s {
            v.set(r, j, q.pow(j as u64, r as u64));
        }
    }
    let (g, pivots) = v.rref();
    debug_assert_eq!(pivots, (0..s).collect::<Vec<_>>());
    if !is_mds(&g) {
        return Err(Error::Unsupported(format!(
            "construction of a [{m}, {s}] MDS code over GF({}) failed its minor check",
            q.modulus()
        )));
    }
    Ok(g)
}

/// Every `rows` columns independent: all minors when `cols <= 14`, a fixed
/// pseudorandom sample otherwise.
pub fn is_mds(g: &Matrix) -> bool {
    let (s, m) = (g.rows(), g.cols());
    if m <= EXHAUSTIVE_MINOR_CHECK {
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            if g.select_columns(&idx).rank() != s {
                return false;
            }
            // next s-combination of 0..m in lexicographic order
            let Some(pos) = (0..s).rev().find(|&i| idx[i] != i + m - s) else {
                return true;
            };
            idx[pos] += 1;
            for i in pos + 1..s {
                idx[i] = idx[i - 1] + 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..SAMPLED_MINORS).all(|_| {
        let mut idx = sample(&mut rng, m, s).into_vec();
        idx.sort_unstable();
        g.select_columns(&idx).rank() == s
    })
}

/// Block-diagonal code with one MDS block per file, over the smallest prime
/// field with at least `max(n1, n2, 2)` elements.
pub fn make_dedicated(n1: usize, n2: usize, s1: usize, s2: usize) -> Result<CodeSpec> {
    if s1 == 0 || s2 == 0 || n1 < s1 || n2 < s2 {
        return Err(Error::BadAllocation { n1, n2, s1, s2 });
    }
    let q = PrimeField::smallest_at_least(n1.max(n2))?;
    let g1 = make_mds_generator(s1, n1, q)?;
    let g2 = make_mds_generator(s2, n2, q)?;
    let k = s1 + s2;
    let mut m = Matrix::zeros(q, k, n1 + n2);
    for r in 0..s1 {
        for c in 0..n1 {
            m.set(r, c, g1.get(r, c));
        }
    }
    for r in 0..s2 {
        for c in 0..n2 {
            m.set(s1 + r, n1 + c, g2.get(r, c));
        }
    }
    CodeSpec::new(m, s1)
}

/// Systematic `[n, k]` MDS code over the smallest prime field with at least
/// `n` elements.
pub fn make_global_mds(n: usize, k: usize, s1: usize) -> Result<CodeSpec> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "need k <= n, got k = {k}, n = {n}"
        )));
    }
    let q = PrimeField::smallest_at_least(n)?;
    CodeSpec::new(make_mds_generator(k, n, q)?, s1)
}

/// GF(2) code with columns `e_1..e_k` followed by `e_i + e_{i+1 mod k}`.
pub fn make_hybrid_cycle(k: usize, s1: usize) -> Result<CodeSpec> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "hybrid cycle needs k >= 3, got {k}"
        )));
    }
    let mut m = Matrix::zeros(PrimeField::binary(), k, 2 * k);
    for i in 0..k {
        m.set(i, i, 1);
        m.set(i, k + i, 1);
        m.set((i + 1) % k, k + i, 1);
    }
    CodeSpec::new(m, s1)
}

/// `m` copies of the code side by side.
pub fn repeat_code(code: &CodeSpec, m: usize) -> Result<CodeSpec> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "repeat count must be at least 1".into(),
        ));
    }
    let mut out = code.clone();
    for _ in 1..m {
        out = concat_codes(&out, code)?;
    }
    Ok(out)
}

pub fn concat_codes(a: &CodeSpec, b: &CodeSpec) -> Result<CodeSpec> {
    if a.k() != b.k() {
        return Err(Error::Mismatch(format!("k = {} vs k = {}", a.k(), b.k())));
    }
    if a.field() != b.field() {
        return Err(Error::Mismatch(format!(
            "GF({}) vs GF({})",
            a.field().modulus(),
            b.field().modulus()
        )));
    }
    if a.partition() != b.partition() {
        return Err(Error::Mismatch(format!(
            "s1 = {} vs s1 = {}",
            a.partition().s1,
            b.partition().s1
        )));
    }
    CodeSpec::new(a.matrix().hstack(b.matrix())?, a.partition().s1)
}
