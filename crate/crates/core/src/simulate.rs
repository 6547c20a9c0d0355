//! Monte Carlo oracle for retrieval times.
//!
//! Every trial gets its own ChaCha8 generator: the master seed selects the
//! key and the trial index selects the stream. Trials can then run on any
//! number of threads and still give identical estimates. Sums are kept as
//! integers, so the reduction order does not matter either.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code_model::CodeSpec;
use crate::error::{Error, Result};
use crate::matrix::{pack, GenericBasis, PackedBasis, Vector, PACKED_MAX_DIM};
use crate::scalar::{f64_to_decimal, to_decimal, Scalar};
use crate::Rational;

/// Hard cap on draws in a single trial.
pub const MAX_DRAWS: u64 = 10_000_000;

const MEAN_DIGITS: usize = 15;
const STDERR_DIGITS: usize = 6;

/// Draw counts of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub t1: u64,
    pub t2: u64,
    pub tproj1: u64,
    pub tproj2: u64,
}

impl Trial {
    pub fn max(&self) -> u64 {
        self.t1.max(self.t2)
    }

    pub fn min(&self) -> u64 {
        self.t1.min(self.t2)
    }

    fn values(&self) -> [u64; 6] {
        [
            self.t1,
            self.t2,
            self.max(),
            self.min(),
            self.tproj1,
            self.tproj2,
        ]
    }
}

/// Runs one trial, drawing column indices from `rng` until both files are
/// retrieved.
pub fn single_trial<R: Rng>(code: &CodeSpec, rng: &mut R) -> Result<Trial> {
    Sampler::new(code).run(rng, 0)
}

enum Columns {
    Packed {
        full: Vec<u64>,
        proj1: Vec<u64>,
        proj2: Vec<u64>,
        mask1: u64,
        mask2: u64,
    },
    Generic {
        full: Vec<Vector>,
        proj1: Vec<Vector>,
        proj2: Vec<Vector>,
    },
}

struct Sampler<'a> {
    code: &'a CodeSpec,
    cols: Columns,
}

impl<'a> Sampler<'a> {
    fn new(code: &'a CodeSpec) -> Self {
        let (k, s1) = (code.k(), code.partition().s1);
        let m = code.matrix();
        let full: Vec<Vector> = m.columns();
        let cols = if m.field().is_binary() && k <= PACKED_MAX_DIM {
            let full: Vec<u64> = full.iter().map(|c| pack(c)).collect();
            let mask1 = low_mask(s1);
            let mask2 = low_mask(k) & !mask1;
            Columns::Packed {
                proj1: full.iter().map(|c| c & mask1).collect(),
                proj2: full.iter().map(|c| c >> s1).collect(),
                full,
                mask1,
                mask2,
            }
        } else {
            Columns::Generic {
                proj1: full.iter().map(|c| c[..s1].to_vec()).collect(),
                proj2: full.iter().map(|c| c[s1..].to_vec()).collect(),
                full,
            }
        };
        Self { code, cols }
    }

    fn run<R: Rng>(&self, rng: &mut R, trial: u64) -> Result<Trial> {
        let n = self.code.n();
        let part = self.code.partition();
        let (s1, s2) = (part.s1, part.s2);
        let mut out = [0u64; 4];
        let mut draws = 0u64;
        let overflow = || Error::TrialOverflow {
            trial,
            cap: MAX_DRAWS,
        };
        match &self.cols {
            Columns::Packed {
                full,
                proj1,
                proj2,
                mask1,
                mask2,
            } => {
                let (mut b, mut b1, mut b2) = (
                    PackedBasis::default(),
                    PackedBasis::default(),
                    PackedBasis::default(),
                );
                while out[0] == 0 || out[1] == 0 {
                    if draws == MAX_DRAWS {
                        return Err(overflow());
                    }
                    let j = rng.random_range(0..n);
                    draws += 1;
                    if b.insert(full[j]).is_some() {
                        for (slot, mask) in [(0, *mask1), (1, *mask2)] {
                            if out[slot] == 0 && spans_mask(&b, mask) {
                                out[slot] = draws;
                            }
                        }
                    }
                    if out[2] == 0 && b1.insert(proj1[j]).is_some() && b1.rank() == s1 {
                        out[2] = draws;
                    }
                    if out[3] == 0 && b2.insert(proj2[j]).is_some() && b2.rank() == s2 {
                        out[3] = draws;
                    }
                }
            }
            Columns::Generic { full, proj1, proj2 } => {
                let field = self.code.field();
                let k = self.code.k();
                let mut b = GenericBasis::new(field, k);
                let mut b1 = GenericBasis::new(field, s1);
                let mut b2 = GenericBasis::new(field, s2);
                let mut scratch = vec![0; k];
                while out[0] == 0 || out[1] == 0 {
                    if draws == MAX_DRAWS {
                        return Err(overflow());
                    }
                    let j = rng.random_range(0..n);
                    draws += 1;
                    if b.insert(full[j].clone()) {
                        for (slot, range) in [(0, 0..s1), (1, s1..k)] {
                            if out[slot] == 0
                                && range.clone().all(|i| b.contains_unit(i, &mut scratch))
                            {
                                out[slot] = draws;
                            }
                        }
                    }
                    if out[2] == 0 && b1.insert(proj1[j].clone()) && b1.rank() == s1 {
                        out[2] = draws;
                    }
                    if out[3] == 0 && b2.insert(proj2[j].clone()) && b2.rank() == s2 {
                        out[3] = draws;
                    }
                }
            }
        }
        let t = Trial {
            t1: out[0],
            t2: out[1],
            tproj1: out[2],
            tproj2: out[3],
        };
        assert_eq!(t.max() + t.min(), t.t1 + t.t2);
        debug_assert!(t.tproj1 <= t.t1 && t.tproj2 <= t.t2);
        Ok(t)
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn spans_mask(b: &PackedBasis, mut mask: u64) -> bool {
    while mask != 0 {
        let bit = mask & mask.wrapping_neg();
        if !b.contains(bit) {
            return false;
        }
        mask ^= bit;
    }
    true
}

/// The generator used for trial `index` under master seed `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Stat {
    pub mean: Rational,
    /// `None` for a single trial.
    pub stderr: Option<f64>,
}

impl Stat {
    fn from_sums(sum: u128, sumsq: u128, trials: u64) -> Self {
        let n = BigInt::from(trials);
        let mean = BigRational::new(BigInt::from(sum), n.clone());
        let stderr = (trials > 1).then(|| {
            // unbiased variance (sumsq - sum^2/N) / (N - 1), exact until the sqrt
            let var = (BigRational::from_integer(BigInt::from(sumsq))
                - BigRational::new(BigInt::from(sum) * BigInt::from(sum), n.clone()))
                / BigRational::from_integer(BigInt::from(trials - 1));
            (Scalar::to_f64(&var) / trials as f64).sqrt()
        });
        Self { mean, stderr }
    }

    /// `|mean - exact| <= z * stderr`.
    pub fn within(&self, exact: &Rational, z: f64) -> bool {
        let gap = (Scalar::to_f64(&self.mean) - Scalar::to_f64(exact)).abs();
        match self.stderr {
            Some(se) => gap <= z * se,
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub trials: u64,
    pub seed: u64,
    pub t1: Stat,
    pub t2: Stat,
    pub max: Stat,
    pub min: Stat,
    pub proj1: Stat,
    pub proj2: Stat,
}

pub const STAT_NAMES: [&str; 6] = ["t1", "t2", "max", "min", "proj1", "proj2"];

impl SimEstimate {
    /// Stats in the order of [`STAT_NAMES`].
    pub fn stats(&self) -> [&Stat; 6] {
        [
            &self.t1,
            &self.t2,
            &self.max,
            &self.min,
            &self.proj1,
            &self.proj2,
        ]
    }

    pub fn report(&self) -> SimReport {
        let mut means = Named::default();
        let mut stderr = Named::default();
        for (name, st) in STAT_NAMES.iter().zip(self.stats()) {
            means.set(name, to_decimal(&st.mean, MEAN_DIGITS));
            stderr.set(name, st.stderr.map(|s| f64_to_decimal(s, STDERR_DIGITS)));
        }
        SimReport {
            schema: 1,
            trials: self.trials,
            seed: self.seed,
            means,
            stderr,
        }
    }
}

/// JSON shape of a [`SimEstimate`]; numbers are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub schema: u32,
    pub trials: u64,
    pub seed: u64,
    pub means: Named<String>,
    pub stderr: Named<Option<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Named<T> {
    pub t1: T,
    pub t2: T,
    pub max: T,
    pub min: T,
    pub proj1: T,
    pub proj2: T,
}

impl<T> Named<T> {
    fn set(&mut self, name: &str, v: T) {
        let slot = match name {
            "t1" => &mut self.t1,
            "t2" => &mut self.t2,
            "max" => &mut self.max,
            "min" => &mut self.min,
            "proj1" => &mut self.proj1,
            _ => &mut self.proj2,
        };
        *slot = v;
    }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    sum: [u128; 6],
    sumsq: [u128; 6],
}

impl Sums {
    fn add(mut self, t: &Trial) -> Self {
        for (i, v) in t.values().into_iter().enumerate() {
            self.sum[i] += u128::from(v);
            self.sumsq[i] += u128::from(v) * u128::from(v);
        }
        self
    }

    fn merge(mut self, o: Sums) -> Self {
        for i in 0..6 {
            self.sum[i] += o.sum[i];
            self.sumsq[i] += o.sumsq[i];
        }
        self
    }
}

/// Estimates all six means from `trials` independent trials.
pub fn simulate(code: &CodeSpec, trials: u64, seed: u64) -> Result<SimEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let sampler = Sampler::new(code);
    // On failure keep the error of the smallest trial index, so the
    // outcome does not depend on scheduling.
    let folded: std::result::Result<Sums, (u64, Error)> = (0..trials)
        .into_par_iter()
        .fold(
            || Ok(Sums::default()),
            |acc, t| {
                let trial = sampler.run(&mut trial_rng(seed, t), t).map_err(|e| (t, e));
                match (acc, trial) {
                    (Ok(s), Ok(tr)) => Ok(s.add(&tr)),
                    (Err(a), Err(b)) => Err(if a.0 <= b.0 { a } else { b }),
                    (Err(a), _) | (_, Err(a)) => Err(a),
                }
            },
        )
        .reduce(
            || Ok(Sums::default()),
            |a, b| match (a, b) {
                (Ok(x), Ok(y)) => Ok(x.merge(y)),
                (Err(a), Err(b)) => Err(if a.0 <= b.0 { a } else { b }),
                (Err(a), _) | (_, Err(a)) => Err(a),
            },
        );
    let sums = folded.map_err(|(_, e)| e)?;
    let st = |i: usize| Stat::from_sums(sums.sum[i], sums.sumsq[i], trials);
    Ok(SimEstimate {
        trials,
        seed,
        t1: st(0),
        t2: st(1),
        max: st(2),
        min: st(3),
        proj1: st(4),
        proj2: st(5),
    })
}
