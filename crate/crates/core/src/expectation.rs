//! Expected retrieval times.
//!
//! The closed forms are generic over [`Scalar`]; use them with
//! [`Rational`](crate::Rational) for exact values.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::code_model::{CodeSpec, FileId, FilePartition};
use crate::constructions::Family;
use crate::error::{Error, Result};
use crate::scalar::{binomial, serde_rational, to_decimal, Scalar};
use crate::subset_counts::{
    alpha_exhaustive_with, alpha_for_target, alpha_global_mds, alpha_identity, alpha_local_mds,
    AlphaProfile, EnumOptions,
};

/// Significant digits used when rendering expectations as decimals.
pub const DISPLAY_DIGITS: usize = 15;

/// `(E1, E2)` for one code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetrievalPair<T> {
    pub e1: T,
    pub e2: T,
}

impl<T> RetrievalPair<T> {
    pub fn new(e1: T, e2: T) -> Self {
        Self { e1, e2 }
    }

    pub fn get(&self, file: FileId) -> &T {
        match file {
            FileId::F1 => &self.e1,
            FileId::F2 => &self.e2,
        }
    }
}

impl RetrievalPair<BigRational> {
    pub fn to_f64(&self) -> RetrievalPair<f64> {
        RetrievalPair::new(self.e1.to_f64(), self.e2.to_f64())
    }

    pub fn decimals(&self) -> (String, String) {
        (
            to_decimal(&self.e1, DISPLAY_DIGITS),
            to_decimal(&self.e2, DISPLAY_DIGITS),
        )
    }
}

/// `H_r`, with `H_0 = 0`.
pub fn harmonic<T: Scalar>(r: usize) -> T {
    harmonic_diff(r, 0)
}

/// `H_b - H_a` for `a <= b`.
pub fn harmonic_diff<T: Scalar>(b: usize, a: usize) -> T {
    assert!(a <= b, "harmonic_diff needs a <= b");
    let mut acc = T::zero();
    for i in a + 1..=b {
        acc = acc + T::one() / T::from_usize_exact(i);
    }
    acc
}

/// `E = n H_n - sum_{s=0}^{n-1} α(s) / C(n-1, s)`.
///
/// Fails if the full column set does not span the target, in which case the
/// expectation is infinite.
pub fn expected_time_from_alpha<T: Scalar>(alpha: &AlphaProfile) -> Result<T> {
    let n = alpha.n;
    if n == 0 || !alpha.get(n).is_one() {
        return Err(Error::InvalidArgument(
            "target is not spanned by the full column set".into(),
        ));
    }
    let mut acc = T::from_usize_exact(n) * harmonic::<T>(n);
    for s in 0..n {
        let a = alpha.get(s);
        if a.bits() == 0 {
            continue;
        }
        acc = acc - T::ratio(a, &binomial(n - 1, s));
    }
    Ok(acc)
}

/// `β_i = n (H_n - H_{n - s_i})`.
pub fn beta_floor<T: Scalar>(n: usize, s_i: usize) -> T {
    T::from_usize_exact(n) * harmonic_diff::<T>(n, n - s_i)
}

/// Identity code: `k H_{s_i}`.
#[allow(non_snake_case)]
pub fn closed_identity_E<T: Scalar>(k: usize, s_i: usize) -> T {
    T::from_usize_exact(k) * harmonic::<T>(s_i)
}

/// File-dedicated MDS block of length `n_i` in a pool of `n`.
#[allow(non_snake_case)]
pub fn closed_dedicated_E<T: Scalar>(n: usize, n_i: usize, s_i: usize) -> T {
    T::from_usize_exact(n) * harmonic_diff::<T>(n_i, n_i - s_i)
}

/// Systematic global `[n, k]` MDS code.
#[allow(non_snake_case)]
pub fn closed_global_mds_E<T: Scalar>(n: usize, k: usize, s_i: usize) -> T {
    let nn = T::from_usize_exact(n);
    let full = nn.clone() * harmonic_diff::<T>(n, n - k);
    let mut tail = T::zero();
    for s in s_i..k {
        tail = tail + T::ratio(&binomial(s, s_i), &BigUint::from(n - s));
    }
    full - nn * tail / T::from_biguint(&binomial(n, s_i))
}

/// How [`expected_pair_with`] obtains its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Closed,
    /// Closed form when a family tag is known, else enumeration.
    Auto,
}

pub fn expected_pair(code: &CodeSpec) -> Result<RetrievalPair<BigRational>> {
    expected_pair_exhaustive(code, &EnumOptions::default())
}

pub fn expected_pair_exhaustive(
    code: &CodeSpec,
    opts: &EnumOptions,
) -> Result<RetrievalPair<BigRational>> {
    let a1 = alpha_exhaustive_with(code, FileId::F1, opts)?;
    let a2 = alpha_exhaustive_with(code, FileId::F2, opts)?;
    Ok(RetrievalPair::new(
        expected_time_from_alpha(&a1)?,
        expected_time_from_alpha(&a2)?,
    ))
}

pub fn expected_pair_with(
    code: &CodeSpec,
    family: Option<&Family>,
    method: Method,
    opts: &EnumOptions,
) -> Result<RetrievalPair<BigRational>> {
    match method {
        Method::Exhaustive => expected_pair_exhaustive(code, opts),
        Method::Closed => {
            let family = family
                .ok_or_else(|| Error::InvalidArgument("closed method needs a family tag".into()))?;
            closed_pair(family, code)
        }
        Method::Auto => match family.map(|f| closed_pair(f, code)) {
            Some(Ok(pair)) => Ok(pair),
            _ => expected_pair_exhaustive(code, opts),
        },
    }
}

/// Closed-form profiles for a tagged family, checked against the code's
/// shape.
pub fn closed_alpha(family: &Family, code: &CodeSpec) -> Result<[AlphaProfile; 2]> {
    let part = code.partition();
    check_shape(family, code)?;
    let (s1, s2) = (part.s1, part.s2);
    match *family {
        Family::Identity { k } => Ok([alpha_identity(k, s1), alpha_identity(k, s2)]),
        Family::Global { n, k } => Ok([alpha_global_mds(n, k, s1), alpha_global_mds(n, k, s2)]),
        Family::Dedicated { n1, n2, .. } => {
            let n = n1 + n2;
            Ok([alpha_local_mds(n, n1, s1), alpha_local_mds(n, n2, s2)])
        }
        Family::Hybrid { .. } => Err(Error::Unsupported(
            "no closed form for the hybrid cycle family".into(),
        )),
    }
}

pub fn closed_pair(family: &Family, code: &CodeSpec) -> Result<RetrievalPair<BigRational>> {
    check_shape(family, code)?;
    closed_pair_for(family, code.partition())
}

/// Closed-form pair from family parameters alone.
pub fn closed_pair_for<T: Scalar>(
    family: &Family,
    part: FilePartition,
) -> Result<RetrievalPair<T>> {
    let (s1, s2) = (part.s1, part.s2);
    match *family {
        Family::Identity { k } => Ok(RetrievalPair::new(
            closed_identity_E(k, s1),
            closed_identity_E(k, s2),
        )),
        Family::Global { n, k } => Ok(RetrievalPair::new(
            closed_global_mds_E(n, k, s1),
            closed_global_mds_E(n, k, s2),
        )),
        Family::Dedicated { n1, n2, .. } => Ok(RetrievalPair::new(
            closed_dedicated_E(n1 + n2, n1, s1),
            closed_dedicated_E(n1 + n2, n2, s2),
        )),
        Family::Hybrid { .. } => Err(Error::Unsupported(
            "no closed form for the hybrid cycle family".into(),
        )),
    }
}

fn check_shape(family: &Family, code: &CodeSpec) -> Result<()> {
    let (n, k) = (code.n(), code.k());
    let part = code.partition();
    let ok = match *family {
        Family::Identity { k: fk } => fk == k && n == k,
        Family::Global { n: fn_, k: fk } => fn_ == n && fk == k,
        Family::Dedicated { n1, n2, s1, s2 } => n1 + n2 == n && s1 == part.s1 && s2 == part.s2,
        Family::Hybrid { k: fk } => fk == k && n == 2 * k,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Mismatch(format!(
            "family tag '{family}' does not match a {k}x{n} code with s1={}",
            part.s1
        )))
    }
}

/// Exact means of every quantity the Monte Carlo oracle measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactStats {
    #[serde(with = "serde_rational")]
    pub t1: BigRational,
    #[serde(with = "serde_rational")]
    pub t2: BigRational,
    #[serde(with = "serde_rational")]
    pub max: BigRational,
    #[serde(with = "serde_rational")]
    pub min: BigRational,
    #[serde(with = "serde_rational")]
    pub proj1: BigRational,
    #[serde(with = "serde_rational")]
    pub proj2: BigRational,
}

/// `E[max]` is the full-recovery time; `E[min] = E1 + E2 - E[max]`; the
/// projected times come from the profiles of the projected matrices.
pub fn exact_stats(code: &CodeSpec, opts: &EnumOptions) -> Result<ExactStats> {
    let pair = expected_pair_exhaustive(code, opts)?;
    let k = code.k();
    let full = alpha_for_target(code.matrix(), 0..k, opts)?;
    let max: BigRational = expected_time_from_alpha(&full)?;
    let proj = |file| -> Result<BigRational> {
        let m = code.project_columns(file);
        let rows = m.rows();
        expected_time_from_alpha(&alpha_for_target(&m, 0..rows, opts)?)
    };
    Ok(ExactStats {
        min: &pair.e1 + &pair.e2 - &max,
        t1: pair.e1,
        t2: pair.e2,
        max,
        proj1: proj(FileId::F1)?,
        proj2: proj(FileId::F2)?,
    })
}
