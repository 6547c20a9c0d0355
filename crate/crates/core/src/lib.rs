//! Exact expected retrieval times for two files stored in one linear code
//! under uniform sampling of columns with replacement.
//!
//! A [`CodeSpec`] is a `k x n` generator matrix over a prime field whose
//! message coordinates split into file `F1` (first `s1`) and file `F2` (last
//! `s2`). Drawing columns uniformly at random, file `F_i` is retrieved once
//! the drawn columns span its coordinate subspace. [`expected_pair`] returns
//! both expectations as exact rationals.
//!
//! ```
//! use coded_retrieval::{expected_pair, make_hybrid_cycle, rational};
//!
//! let code = make_hybrid_cycle(4, 1).unwrap();
//! let pair = expected_pair(&code).unwrap();
//! assert_eq!(pair.e1, rational(403, 105));
//! assert_eq!(pair.e2, rational(584, 105));
//! ```

pub mod bounds;
pub mod code_model;
pub mod constructions;
pub mod error;
pub mod expectation;
pub mod explore;
pub mod field;
pub mod matrix;
pub mod scalar;
pub mod simulate;
pub mod subset_counts;

pub use code_model::{
    parse_matrix, write_matrix, CodeFile, CodeSpec, ColumnClassification, FileId, FilePartition,
};
pub use constructions::{
    concat_codes, make_dedicated, make_global_mds, make_hybrid_cycle, make_identity,
    make_mds_generator, repeat_code, Family,
};
pub use error::{Error, Result};
pub use expectation::{
    beta_floor, closed_dedicated_E, closed_global_mds_E, closed_identity_E, expected_pair,
    expected_pair_with, expected_time_from_alpha, harmonic, Method, RetrievalPair,
};
pub use field::PrimeField;
pub use matrix::Matrix;
pub use scalar::{rational, to_decimal, Scalar};
pub use subset_counts::{alpha_exhaustive, AlphaProfile, EnumOptions};

/// Exact scalar used for every verdict.
pub type Rational = num_rational::BigRational;

/// Exact `(E1, E2)`.
pub type ExactPair = RetrievalPair<Rational>;

/// Floating-point `(E1, E2)`, for plotting.
pub type FloatPair = RetrievalPair<f64>;
