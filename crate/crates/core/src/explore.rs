//! Frontiers, dominance, local-versus-global comparison, the hyperbolic
//! conjecture harness and asymptotic traces.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::hyperbolic_sum;
use crate::code_model::{write_matrix, CodeSpec, FilePartition};
use crate::constructions::{make_hybrid_cycle, Family};
use crate::error::{Error, Result};
use crate::expectation::{
    closed_dedicated_E, closed_global_mds_E, closed_identity_E, expected_pair_exhaustive,
    expected_time_from_alpha, RetrievalPair, DISPLAY_DIGITS,
};
use crate::field::PrimeField;
use crate::matrix::Matrix;
use crate::scalar::{floor_usize, rational_from_usize, serde_rational, to_decimal};
use crate::simulate::trial_rng;
use crate::subset_counts::{alpha_global_mds, alpha_local_mds, EnumOptions};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrontierPoint {
    pub label: String,
    #[serde(serialize_with = "serialize_pair")]
    pub pair: RetrievalPair<Rational>,
    pub pareto: bool,
}

impl FrontierPoint {
    pub fn new(label: impl Into<String>, pair: RetrievalPair<Rational>) -> Self {
        Self {
            label: label.into(),
            pair,
            pareto: true,
        }
    }
}

fn serialize_pair<S: serde::Serializer>(
    p: &RetrievalPair<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("RetrievalPair", 4)?;
    st.serialize_field("e1", &p.e1.to_string())?;
    st.serialize_field("e2", &p.e2.to_string())?;
    st.serialize_field("e1_decimal", &to_decimal(&p.e1, DISPLAY_DIGITS))?;
    st.serialize_field("e2_decimal", &to_decimal(&p.e2, DISPLAY_DIGITS))?;
    st.end()
}

/// `p <= q` coordinatewise with at least one strict inequality.
pub fn dominates(p: &RetrievalPair<Rational>, q: &RetrievalPair<Rational>) -> bool {
    p.e1 <= q.e1 && p.e2 <= q.e2 && (p.e1 < q.e1 || p.e2 < q.e2)
}

/// Sets the `pareto` flags in place. Of several equal pairs only the first
/// stays Pareto.
pub fn pareto_filter(points: &mut [FrontierPoint]) {
    let flags: Vec<bool> = (0..points.len())
        .map(|i| {
            let p = &points[i].pair;
            !points
                .iter()
                .enumerate()
                .any(|(j, q)| dominates(&q.pair, p) || (j < i && q.pair == *p))
        })
        .collect();
    for (pt, f) in points.iter_mut().zip(flags) {
        pt.pareto = f;
    }
}

/// One point per allocation `n1 = s1 ..= n - s2`.
pub fn dedicated_frontier(n: usize, part: FilePartition) -> Result<Vec<FrontierPoint>> {
    if n < part.k() {
        return Err(Error::InvalidArgument(format!(
            "need n >= k, got n = {n}, k = {}",
            part.k()
        )));
    }
    let mut pts: Vec<FrontierPoint> = (part.s1..=n - part.s2)
        .map(|n1| {
            let n2 = n - n1;
            let tag = Family::Dedicated {
                n1,
                n2,
                s1: part.s1,
                s2: part.s2,
            };
            FrontierPoint::new(
                tag.to_string(),
                RetrievalPair::new(
                    closed_dedicated_E(n, n1, part.s1),
                    closed_dedicated_E(n, n2, part.s2),
                ),
            )
        })
        .collect();
    pareto_filter(&mut pts);
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Dedicated,
    Global,
    Identity,
    Hybrid,
}

/// Operating points of one family. Identity and hybrid fix `n` from `k`.
pub fn family_frontier(
    kind: FamilyKind,
    n: usize,
    part: FilePartition,
    opts: &EnumOptions,
) -> Result<Vec<FrontierPoint>> {
    let k = part.k();
    let mut pts = match kind {
        FamilyKind::Dedicated => return dedicated_frontier(n, part),
        FamilyKind::Global => {
            if n < k {
                return Err(Error::InvalidArgument(format!(
                    "need n >= k, got n = {n}, k = {k}"
                )));
            }
            vec![FrontierPoint::new(
                Family::Global { n, k }.to_string(),
                RetrievalPair::new(
                    closed_global_mds_E(n, k, part.s1),
                    closed_global_mds_E(n, k, part.s2),
                ),
            )]
        }
        FamilyKind::Identity => vec![FrontierPoint::new(
            Family::Identity { k }.to_string(),
            RetrievalPair::new(closed_identity_E(k, part.s1), closed_identity_E(k, part.s2)),
        )],
        FamilyKind::Hybrid => {
            let code = make_hybrid_cycle(k, part.s1)?;
            vec![FrontierPoint::new(
                Family::Hybrid { k }.to_string(),
                expected_pair_exhaustive(&code, opts)?,
            )]
        }
    };
    pareto_filter(&mut pts);
    Ok(pts)
}

/// Local (dedicated) versus global MDS at one allocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllocationComparison {
    pub n1: usize,
    pub n2: usize,
    /// `α_local(s) >= α_global(s)` for every `s <= k - 1`, per file.
    pub alpha_dominates: [bool; 2],
    /// The same inequality over every `s <= n`. Above `k - 1` the global
    /// code recovers from any subset, so this can fail.
    pub alpha_dominates_all_s: [bool; 2],
    #[serde(serialize_with = "serialize_pair")]
    pub local: RetrievalPair<Rational>,
    #[serde(serialize_with = "serialize_pair")]
    pub global: RetrievalPair<Rational>,
    /// `E_local_i <= E_global_i` for both files.
    pub e_dominates: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalGlobalComparison {
    pub n: usize,
    pub k: usize,
    pub s1: usize,
    pub s2: usize,
    pub allocations: Vec<AllocationComparison>,
    /// Present only when `k` divides `n`.
    pub verdict: Option<bool>,
    pub note: Option<String>,
}

/// Compares dedicated MDS at the proportional allocation `n_i = n s_i / k`
/// with the global MDS code of the same length. When `k` does not divide
/// `n`, the floor and ceiling allocations are reported without a verdict.
pub fn compare_local_global(n: usize, part: FilePartition) -> Result<LocalGlobalComparison> {
    let k = part.k();
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "need n >= k, got n = {n}, k = {k}"
        )));
    }
    let (s1, s2) = (part.s1, part.s2);
    let divisible = n.is_multiple_of(k);
    let base = n * s1 / k;
    let mut candidates = vec![base];
    if !divisible {
        candidates.push(base + 1);
    }
    candidates.retain(|&n1| n1 >= s1 && n - n1 >= s2);
    let global_alpha = [alpha_global_mds(n, k, s1), alpha_global_mds(n, k, s2)];
    let global = RetrievalPair::new(
        expected_time_from_alpha(&global_alpha[0])?,
        expected_time_from_alpha(&global_alpha[1])?,
    );
    let mut allocations = Vec::new();
    for n1 in candidates {
        let n2 = n - n1;
        let local_alpha = [alpha_local_mds(n, n1, s1), alpha_local_mds(n, n2, s2)];
        let dominated_up_to = |limit: usize| {
            [0, 1].map(|i| {
                local_alpha[i].counts[..limit]
                    .iter()
                    .zip(&global_alpha[i].counts)
                    .all(|(l, g)| l >= g)
            })
        };
        let alpha_dominates = dominated_up_to(k);
        let alpha_dominates_all_s = dominated_up_to(n + 1);
        let local = RetrievalPair::new(
            expected_time_from_alpha(&local_alpha[0])?,
            expected_time_from_alpha(&local_alpha[1])?,
        );
        let e_dominates = local.e1 <= global.e1 && local.e2 <= global.e2;
        allocations.push(AllocationComparison {
            n1,
            n2,
            alpha_dominates,
            alpha_dominates_all_s,
            local,
            global: global.clone(),
            e_dominates,
        });
    }
    let verdict = divisible.then(|| {
        allocations
            .iter()
            .all(|a| a.alpha_dominates.iter().all(|&b| b) && a.e_dominates)
    });
    let note = (!divisible).then(|| {
        format!("k = {k} does not divide n = {n}; floor and ceiling allocations shown without a verdict")
    });
    Ok(LocalGlobalComparison {
        n,
        k,
        s1,
        s2,
        allocations,
        verdict,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Code file text, replayable with `parse_matrix`.
    pub matrix: String,
    #[serde(serialize_with = "serialize_pair")]
    pub pair: RetrievalPair<Rational>,
    #[serde(with = "serde_rational")]
    pub sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub schema: u32,
    pub n: usize,
    pub k: usize,
    pub s1: usize,
    pub s2: usize,
    pub q: u64,
    pub seed: u64,
    /// Random matrices evaluated.
    pub samples: u64,
    /// Caller-supplied matrices evaluated in addition.
    pub injected: usize,
    #[serde(with = "serde_rational::option")]
    pub max_sum: Option<Rational>,
    pub violations: Vec<Violation>,
    /// `max(s1, s2) = 1`, where the conjecture makes no claim.
    pub excluded_regime: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub n: usize,
    pub part: FilePartition,
    pub q: PrimeField,
    pub samples: u64,
    pub seed: u64,
    pub opts: EnumOptions,
}

/// Uniform `k x n` matrix over GF(q), redrawn until it has rank `k`.
pub fn random_full_rank<R: Rng>(rng: &mut R, q: PrimeField, k: usize, n: usize) -> Matrix {
    assert!(k <= n, "a k x n matrix with k > n cannot have rank k");
    loop {
        let data = (0..k * n)
            .map(|_| rng.random_range(0..q.modulus()))
            .collect();
        let m = Matrix::new(q, k, n, data).expect("entries are reduced");
        if m.rank() == k {
            return m;
        }
    }
}

/// Evaluates `s1/E1 + s2/E2` exactly on random rank-`k` matrices and on any
/// injected ones, recording every sum above 1.
pub fn verify_hyperbolic(params: &VerifyParams, injected: &[Matrix]) -> Result<ConjectureReport> {
    let VerifyParams {
        n,
        part,
        q,
        samples,
        seed,
        ref opts,
    } = *params;
    let k = part.k();
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "need n >= k, got n = {n}, k = {k}"
        )));
    }
    opts.check(n)?;
    for m in injected {
        if (m.rows(), m.cols()) != (k, n) || m.field() != q {
            return Err(Error::Mismatch(format!(
                "injected matrix is {}x{} over GF({}), expected {k}x{n} over GF({})",
                m.rows(),
                m.cols(),
                m.field().modulus(),
                q.modulus()
            )));
        }
    }
    let evaluate = |m: Matrix| -> Result<(Matrix, RetrievalPair<Rational>, Rational)> {
        let code = CodeSpec::new(m, part.s1)?;
        let pair = expected_pair_exhaustive(&code, opts)?;
        let sum = hyperbolic_sum(&pair, part);
        Ok((code.matrix().clone(), pair, sum))
    };
    let mut results: Vec<(Matrix, RetrievalPair<Rational>, Rational)> = injected
        .iter()
        .cloned()
        .map(evaluate)
        .collect::<Result<_>>()?;
    let sampled: Vec<_> = (0..samples)
        .into_par_iter()
        .map(|i| evaluate(random_full_rank(&mut trial_rng(seed, i), q, k, n)))
        .collect::<Result<_>>()?;
    results.extend(sampled);

    let one = Rational::one();
    let max_sum = results.iter().map(|r| r.2.clone()).max();
    let violations = results
        .into_iter()
        .filter(|r| r.2 > one)
        .map(|(m, pair, sum)| Violation {
            matrix: write_matrix(&m, None),
            pair,
            sum,
        })
        .collect();
    Ok(ConjectureReport {
        schema: 1,
        n,
        k,
        s1: part.s1,
        s2: part.s2,
        q: q.modulus(),
        seed,
        samples,
        injected: injected.len(),
        max_sum,
        violations,
        excluded_regime: part.s_max() == 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    #[serde(with = "serde_rational")]
    pub e1: Rational,
    #[serde(with = "serde_rational")]
    pub e2: Rational,
    #[serde(with = "serde_rational")]
    pub gap1: Rational,
    #[serde(with = "serde_rational")]
    pub gap2: Rational,
    #[serde(with = "serde_rational")]
    pub hyperbolic_sum: Rational,
}

impl TraceRow {
    pub fn max_gap(&self) -> &Rational {
        (&self.gap1).max(&self.gap2)
    }
}

/// Dedicated allocations approaching a target point on the hyperbola
/// `s1/E1 + s2/E2 = 1`: `n1 = floor(n s1 / E1*)`, clamped to
/// `[s1, n - s2]`, and `n2 = n - n1`.
pub fn asymptotic_trace(
    part: FilePartition,
    target: &RetrievalPair<Rational>,
    n_list: &[usize],
) -> Result<Vec<TraceRow>> {
    let (s1, s2) = (part.s1, part.s2);
    let (e1t, e2t) = (&target.e1, &target.e2);
    if *e1t <= rational_from_usize(s1) || *e2t <= rational_from_usize(s2) {
        return Err(Error::BadTarget(format!(
            "targets must exceed (s1, s2) = ({s1}, {s2}), got ({e1t}, {e2t})"
        )));
    }
    let sum = hyperbolic_sum(target, part);
    if !sum.is_one() {
        return Err(Error::BadTarget(format!("s1/E1 + s2/E2 = {sum}, not 1")));
    }
    n_list
        .iter()
        .map(|&n| {
            if n < part.k() {
                return Err(Error::InvalidArgument(format!(
                    "need n >= k, got n = {n}, k = {}",
                    part.k()
                )));
            }
            let share = BigRational::new(BigInt::from(n * s1), BigInt::one()) / e1t;
            let n1 = floor_usize(&share).unwrap_or(0).clamp(s1, n - s2);
            let n2 = n - n1;
            let e1: Rational = closed_dedicated_E(n, n1, s1);
            let e2: Rational = closed_dedicated_E(n, n2, s2);
            let pair = RetrievalPair::new(e1.clone(), e2.clone());
            Ok(TraceRow {
                n,
                n1,
                n2,
                gap1: (&e1 - e1t).abs(),
                gap2: (&e2 - e2t).abs(),
                hyperbolic_sum: hyperbolic_sum(&pair, part),
                e1,
                e2,
            })
        })
        .collect()
}

/// Re-evaluates a reported violation from its embedded matrix text.
pub fn replay_violation(v: &Violation, s1: usize) -> Result<Rational> {
    let file = crate::code_model::parse_matrix(&v.matrix)?;
    let code = CodeSpec::new(file.matrix, s1)?;
    let pair = expected_pair_exhaustive(&code, &EnumOptions::default())?;
    Ok(hyperbolic_sum(&pair, code.partition()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Scalar};

    fn part(k: usize, s1: usize) -> FilePartition {
        FilePartition::new(k, s1).unwrap()
    }

    fn pair(a: (i64, i64), b: (i64, i64)) -> RetrievalPair<Rational> {
        RetrievalPair::new(rational(a.0, a.1), rational(b.0, b.1))
    }

    fn counterexample() -> Matrix {
        Matrix::from_rows(
            PrimeField::binary(),
            &[vec![1, 0, 1, 0, 1], vec![0, 1, 0, 1, 1]],
        )
        .unwrap()
    }

    #[test]
    fn dedicated_allocations_at_n8() {
        let pts = dedicated_frontier(8, part(4, 1)).unwrap();
        let e2: Vec<Rational> = pts.iter().map(|p| p.pair.e2.clone()).collect();
        assert_eq!(
            e2,
            vec![
                rational(428, 105),
                rational(74, 15),
                rational(94, 15),
                rational(26, 3),
                rational(44, 3)
            ]
        );
        let e1: Vec<Rational> = pts.iter().map(|p| p.pair.e1.clone()).collect();
        assert_eq!(
            e1,
            vec![
                rational(8, 1),
                rational(4, 1),
                rational(8, 3),
                rational(2, 1),
                rational(8, 5)
            ]
        );
        assert!(pts.iter().all(|p| p.pareto));
        assert_eq!(pts[1].label, "dedicated n1=2 n2=6 s1=1 s2=3");
        assert_eq!(dedicated_frontier(9, part(4, 1)).unwrap().len(), 6);
        let single = dedicated_frontier(4, part(4, 1)).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].pair, pair((4, 1), (22, 3)));
    }

    #[test]
    fn frontier_is_monotone() {
        for (n, k, s1) in [(20, 8, 4), (50, 8, 1), (13, 5, 2)] {
            let pts = dedicated_frontier(n, part(k, s1)).unwrap();
            for w in pts.windows(2) {
                assert!(w[1].pair.e1 < w[0].pair.e1);
                assert!(w[1].pair.e2 > w[0].pair.e2);
            }
        }
    }

    #[test]
    fn dominance_examples() {
        let b = pair((4, 1), (74, 15));
        let c = pair((8, 3), (94, 15));
        let global = pair((4, 1), (106, 21));
        assert!(dominates(&b, &global));
        assert!(!dominates(&b, &c) && !dominates(&c, &b));
        assert!(!dominates(&b, &b));
    }

    #[test]
    fn pareto_examples() {
        let mut pts = dedicated_frontier(8, part(4, 1)).unwrap();
        pts.push(FrontierPoint::new("global", pair((4, 1), (106, 21))));
        pareto_filter(&mut pts);
        assert!(!pts[5].pareto);
        assert!(pts[..5].iter().all(|p| p.pareto));

        let mut dup = vec![
            FrontierPoint::new("a", pair((2, 1), (3, 1))),
            FrontierPoint::new("b", pair((2, 1), (3, 1))),
            FrontierPoint::new("c", pair((3, 1), (2, 1))),
            FrontierPoint::new("d", pair((2, 1), (3, 1))),
        ];
        pareto_filter(&mut dup);
        let flags: Vec<bool> = dup.iter().map(|p| p.pareto).collect();
        assert_eq!(flags, vec![true, false, true, false]);
    }

    #[test]
    fn hybrid_point_is_incomparable_with_dedicated() {
        let g = family_frontier(FamilyKind::Hybrid, 8, part(4, 1), &EnumOptions::default())
            .unwrap()
            .remove(0);
        assert_eq!(g.pair, pair((403, 105), (584, 105)));
        for d in dedicated_frontier(8, part(4, 1)).unwrap() {
            assert!(!dominates(&d.pair, &g.pair));
            assert!(!dominates(&g.pair, &d.pair));
        }
    }

    #[test]
    fn family_frontier_examples() {
        let opts = EnumOptions::default();
        let g = family_frontier(FamilyKind::Global, 8, part(4, 1), &opts).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].pair, pair((4, 1), (106, 21)));
        let id = family_frontier(FamilyKind::Identity, 4, part(4, 1), &opts).unwrap();
        assert_eq!(id[0].pair, pair((4, 1), (22, 3)));
        assert_eq!(
            family_frontier(FamilyKind::Dedicated, 8, part(4, 1), &opts)
                .unwrap()
                .len(),
            5
        );
    }

    #[test]
    fn local_global_examples() {
        let c = compare_local_global(8, part(4, 1)).unwrap();
        assert_eq!(c.verdict, Some(true));
        assert_eq!((c.allocations[0].n1, c.allocations[0].n2), (2, 6));
        assert_eq!(c.allocations[0].local, pair((4, 1), (74, 15)));
        assert_eq!(c.allocations[0].global, pair((4, 1), (106, 21)));
        // at s = 4 the global code recovers from all 70 subsets, the local
        // code from 55 for either file
        assert_eq!(c.allocations[0].alpha_dominates, [true, true]);
        assert_eq!(c.allocations[0].alpha_dominates_all_s, [false, false]);

        let sym = compare_local_global(8, part(4, 2)).unwrap();
        assert_eq!(sym.verdict, Some(true));
        assert_eq!((sym.allocations[0].n1, sym.allocations[0].n2), (4, 4));

        let c12 = compare_local_global(12, part(4, 1)).unwrap();
        assert_eq!((c12.allocations[0].n1, c12.allocations[0].n2), (3, 9));
        assert_eq!(c12.allocations[0].alpha_dominates, [true, true]);

        let odd = compare_local_global(10, part(4, 1)).unwrap();
        assert_eq!(odd.verdict, None);
        assert!(odd.note.is_some());
        let allocs: Vec<usize> = odd.allocations.iter().map(|a| a.n1).collect();
        assert_eq!(allocs, vec![2, 3]);
    }

    #[test]
    fn conjecture_counterexample_is_flagged() {
        let params = VerifyParams {
            n: 5,
            part: part(2, 1),
            q: PrimeField::binary(),
            samples: 0,
            seed: 0,
            opts: EnumOptions::default(),
        };
        let r = verify_hyperbolic(&params, &[counterexample()]).unwrap();
        assert!(r.excluded_regime);
        assert_eq!(r.max_sum, Some(rational(24, 23)));
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].pair, pair((23, 12), (23, 12)));
        assert_eq!(
            replay_violation(&r.violations[0], 1).unwrap(),
            rational(24, 23)
        );
    }

    #[test]
    fn empty_report() {
        let params = VerifyParams {
            n: 8,
            part: part(4, 1),
            q: PrimeField::binary(),
            samples: 0,
            seed: 3,
            opts: EnumOptions::default(),
        };
        let r = verify_hyperbolic(&params, &[]).unwrap();
        assert_eq!(r.max_sum, None);
        assert!(r.violations.is_empty());
        assert!(!r.excluded_regime);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_cap() {
        let mut params = VerifyParams {
            n: 8,
            part: part(4, 2),
            q: PrimeField::binary(),
            samples: 200,
            seed: 7,
            opts: EnumOptions::default(),
        };
        let a = verify_hyperbolic(&params, &[]).unwrap();
        assert_eq!(a, verify_hyperbolic(&params, &[]).unwrap());
        assert!(a.violations.is_empty());
        assert!(a.max_sum.unwrap() <= Rational::one());
        params.opts.cap = 6;
        assert!(matches!(
            verify_hyperbolic(&params, &[]),
            Err(Error::TooLarge { n: 8, cap: 6 })
        ));
        params.opts.cap = 28;
        assert!(matches!(
            verify_hyperbolic(&params, &[counterexample()]),
            Err(Error::Mismatch(_))
        ));
    }

    #[test]
    fn random_matrices_have_full_rank() {
        let mut rng = trial_rng(1, 2);
        for q in [2, 3, 5] {
            let f = PrimeField::new(q).unwrap();
            for _ in 0..20 {
                assert_eq!(random_full_rank(&mut rng, f, 3, 5).rank(), 3);
            }
        }
    }

    #[test]
    fn trace_examples() {
        let target = pair((4, 1), (4, 1));
        let rows = asymptotic_trace(part(4, 1), &target, &[40, 400, 4000]).unwrap();
        assert_eq!((rows[1].n1, rows[1].n2), (100, 300));
        assert_eq!(rows[1].e1, rational(4, 1));
        let e2 = rational(400, 300) + rational(400, 299) + rational(400, 298);
        assert_eq!(rows[1].e2, e2);
        assert!((rows[1].e2.to_f64() - 4.0134).abs() < 1e-4);
        assert!((rows[2].e2.to_f64() - 4.0013).abs() < 1e-4);
        for w in rows.windows(2) {
            assert!(w[1].max_gap() < w[0].max_gap());
        }

        assert!(matches!(
            asymptotic_trace(part(4, 1), &pair((2, 1), (4, 1)), &[40]),
            Err(Error::BadTarget(_))
        ));
        assert!(matches!(
            asymptotic_trace(part(4, 1), &pair((1, 1), (300, 1)), &[40]),
            Err(Error::BadTarget(_))
        ));
    }

    #[test]
    fn trace_clamps_allocation() {
        // target close to (s1, inf) pushes n1 towards n - s2
        let target = RetrievalPair::new(rational(4, 3), rational(12, 1));
        let rows = asymptotic_trace(part(4, 1), &target, &[4, 5]).unwrap();
        assert_eq!((rows[0].n1, rows[0].n2), (1, 3));
        assert_eq!((rows[1].n1, rows[1].n2), (2, 3));
    }
}
