use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use coded_retrieval::bounds::{bound_report, closed_upper_bounds};
use coded_retrieval::expectation::{exact_stats, expected_pair_exhaustive};
use coded_retrieval::matrix::{spans_subspace, unit_vector};
use coded_retrieval::{
    beta_floor, concat_codes, expected_pair, make_hybrid_cycle, parse_matrix, repeat_code,
    write_matrix, CodeSpec, EnumOptions, FileId, FilePartition, Matrix, PrimeField, Rational,
    RetrievalPair,
};

/// Expected draws until the drawn columns span `target`, by first-step
/// analysis on the set `S` of distinct columns seen so far:
/// `h(S) = (n + sum_{j not in S} h(S + j)) / (n - |S|)`, zero once `S`
/// spans the target.
fn markov_oracle(code: &CodeSpec, target: std::ops::Range<usize>) -> Rational {
    let (n, k) = (code.n(), code.k());
    let field = code.field();
    let basis: Vec<Vec<u64>> = target.map(|i| unit_vector(k, i)).collect();
    let cols = code.matrix().columns();
    let zero = Rational::from_integer(BigInt::from(0));
    let mut h = vec![zero; 1 << n];
    for mask in (0..1usize << n).rev() {
        let chosen: Vec<Vec<u64>> = (0..n)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| cols[j].clone())
            .collect();
        if spans_subspace(field, &chosen, &basis).unwrap() {
            continue;
        }
        let mut acc = Rational::from_integer(BigInt::from(n));
        for j in (0..n).filter(|&j| mask >> j & 1 == 0) {
            acc += &h[mask | 1 << j];
        }
        h[mask] = acc / Rational::from_integer(BigInt::from(n - mask.count_ones() as usize));
    }
    h[0].clone()
}

fn file_oracle(code: &CodeSpec, file: FileId) -> Rational {
    markov_oracle(code, code.partition().coords(file))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

/// Random full-rank `k x n` code with `2 <= k <= 4`, `n <= max_n`, and a
/// random partition.
fn code(max_n: usize) -> impl Strategy<Value = CodeSpec> {
    (prime(), 2usize..=4)
        .prop_flat_map(move |(q, k)| (Just(q), Just(k), k..=max_n.max(k)))
        .prop_flat_map(|(q, k, n)| {
            (
                Just(q),
                Just(k),
                Just(n),
                prop::collection::vec(0..q, k * n),
                1..k,
            )
        })
        .prop_filter_map("rank deficient", |(q, k, n, data, s1)| {
            let m = Matrix::new(PrimeField::new(q).unwrap(), k, n, data).ok()?;
            CodeSpec::new(m, s1).ok()
        })
}

fn pair_of(code: &CodeSpec) -> RetrievalPair<Rational> {
    expected_pair(code).unwrap()
}

#[test]
fn markov_oracle_on_golden_codes() {
    let g = make_hybrid_cycle(4, 1).unwrap();
    assert_eq!(
        file_oracle(&g, FileId::F1),
        BigRational::new(403.into(), 105.into())
    );
    assert_eq!(
        file_oracle(&g, FileId::F2),
        BigRational::new(584.into(), 105.into())
    );
}

#[test]
fn closed_upper_bounds_are_ordered() {
    for k in 2..=64 {
        for s1 in 1..k {
            let part = FilePartition::new(k, s1).unwrap();
            let (smax, cs) = closed_upper_bounds::<Rational>(part);
            assert!(cs <= smax, "k={k} s1={s1}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enumeration_matches_markov_oracle(code in code(8)) {
        let pair = pair_of(&code);
        prop_assert_eq!(&pair.e1, &file_oracle(&code, FileId::F1));
        prop_assert_eq!(&pair.e2, &file_oracle(&code, FileId::F2));
    }

    #[test]
    fn proved_bounds_hold(code in code(9)) {
        let pair = pair_of(&code);
        let report = bound_report(&code, &pair).unwrap();
        prop_assert!(report.all_proved_satisfied(), "{:?}", report.violations());
        let part = code.partition();
        let b1: Rational = beta_floor(code.n(), part.s1);
        let b2: Rational = beta_floor(code.n(), part.s2);
        prop_assert!(pair.e1 >= b1 && pair.e2 >= b2);
    }

    #[test]
    fn column_permutation_and_scaling_preserve_times(
        code in code(8),
        seed in any::<u64>(),
    ) {
        let n = code.n();
        let q = code.field().modulus();
        let mut order: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let permuted = code.matrix().select_columns(&order);
        let mut scaled = permuted.clone();
        for c in 0..n {
            let a = 1 + (seed >> (c % 32)) % (q - 1);
            for r in 0..code.k() {
                let v = scaled.get(r, c) * a % q;
                scaled.set(r, c, v);
            }
        }
        let other = CodeSpec::new(scaled, code.partition().s1).unwrap();
        prop_assert_eq!(pair_of(&other), pair_of(&code));
    }

    #[test]
    fn repetition_preserves_times(code in code(6)) {
        let rep = repeat_code(&code, 2).unwrap();
        prop_assert_eq!(pair_of(&rep), pair_of(&code));
    }

    #[test]
    fn concatenation_at_most_doubles(a in code(5), b_seed in any::<u64>()) {
        // a second code with the same field, k and partition
        let q = a.field().modulus();
        let (k, n) = (a.k(), a.n());
        let mut data: Vec<u64> = (0..k * n)
            .map(|i| (b_seed.rotate_left(i as u32 * 7) ^ i as u64) % q)
            .collect();
        for (i, x) in data.iter_mut().enumerate().take(k * n) {
            let (r, c) = (i / n, i % n);
            if c < k {
                *x = u64::from(r == c);
            }
        }
        let m = Matrix::new(a.field(), k, n, data).unwrap();
        let b = CodeSpec::new(m, a.partition().s1).unwrap();
        let ab = concat_codes(&a, &b).unwrap();
        let (pa, pb, pab) = (pair_of(&a), pair_of(&b), pair_of(&ab));
        let two = Rational::from_integer(BigInt::from(2));
        prop_assert!(pab.e1 <= &two * (&pa.e1).min(&pb.e1));
        prop_assert!(pab.e2 <= &two * (&pa.e2).min(&pb.e2));
    }

    #[test]
    fn exact_stats_are_ordered(code in code(8)) {
        let st = exact_stats(&code, &EnumOptions::default()).unwrap();
        prop_assert!(st.max >= st.t1.clone().max(st.t2.clone()));
        prop_assert!(st.min <= st.t1.clone().min(st.t2.clone()));
        // projected columns span F_i no later than the full columns do
        prop_assert!(st.proj1 <= st.t1 && st.proj2 <= st.t2);
        let pair = expected_pair_exhaustive(&code, &EnumOptions::default()).unwrap();
        prop_assert_eq!(&st.max, &markov_oracle(&code, 0..code.k()));
        prop_assert_eq!(st.t1, pair.e1);
    }

    #[test]
    fn text_format_round_trip(code in code(9)) {
        let text = write_matrix(code.matrix(), None);
        let back = parse_matrix(&text).unwrap();
        prop_assert_eq!(&back.matrix, code.matrix());
        prop_assert!(back.family.is_none());
    }
}
