//! Scalar abstraction shared by every closed-form formula.
//!
//! Formulas are written once against [`Scalar`] and instantiated with
//! [`Rational`](crate::Rational) for exact verdicts or with `f64`/`f32` for
//! plotting data. Integer combinatorics (binomials, subset counts) always
//! stay in [`BigUint`].

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `num / den`, exact when the scalar is exact.
    fn ratio(num: &BigUint, den: &BigUint) -> Self;

    fn to_f64(&self) -> f64;

    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar")
    }

    fn from_biguint(v: &BigUint) -> Self {
        Self::ratio(v, &BigUint::one())
    }
}

impl Scalar for BigRational {
    fn ratio(num: &BigUint, den: &BigUint) -> Self {
        BigRational::new(
            BigInt::from_biguint(Sign::Plus, num.clone()),
            BigInt::from_biguint(Sign::Plus, den.clone()),
        )
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn ratio(num: &BigUint, den: &BigUint) -> Self {
        Scalar::to_f64(&<BigRational as Scalar>::ratio(num, den))
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn ratio(num: &BigUint, den: &BigUint) -> Self {
        <BigRational as Scalar>::ratio(num, den)
            .to_f32()
            .unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

pub fn rational_from_usize(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Floor of a non-negative rational as `usize`.
pub fn floor_usize(r: &BigRational) -> Option<usize> {
    r.floor().to_integer().to_usize()
}

/// Renders a rational with `sig` significant digits, rounding half to even.
///
/// The output is plain positional notation: `5.04761904761905`,
/// `0.000123`, `1230000`.
pub fn to_decimal(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10u32);

    // exponent e with 10^e <= a < 10^(e+1)
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    loop {
        let p = pow10(e);
        if a < p {
            e -= 1;
        } else if a >= p * BigRational::from_integer(ten.clone()) {
            e += 1;
        } else {
            break;
        }
    }

    let scaled = a * pow10(sig as i64 - 1 - e);
    let (mut q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2u32;
    let den = scaled.denom();
    if twice > *den || (twice == *den && q.is_odd()) {
        q += 1u32;
    }
    if q.to_string().len() > sig {
        q /= &ten;
        e += 1;
    }
    let digits = q.to_string();
    debug_assert_eq!(digits.len(), sig);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= sig as i64 - 1 {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', (e - (sig as i64 - 1)) as usize));
    } else if e >= 0 {
        let split = (e + 1) as usize;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(&digits);
    }
    out
}

/// Renders an `f64` through its exact binary value.
pub fn f64_to_decimal(x: f64, sig: usize) -> String {
    match BigRational::from_float(x) {
        Some(r) => to_decimal(&r, sig),
        None => x.to_string(),
    }
}

fn pow10(e: i64) -> BigRational {
    let p = BigInt::from(10u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Serde helpers that write rationals as `"num/den"` (or `"num"`).
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub mod vec {
        use num_rational::BigRational;
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }
    }

    pub mod option {
        use num_rational::BigRational;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.collect_str(r),
                None => s.serialize_none(),
            }
        }
    }
}

/// Serializes big integers as decimal strings.
pub mod serde_biguint_vec {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}
