use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use sumrank::counting::{
    count_full_sumrank, count_rank_t, exact_prob_full_sumrank, gaussian_binomial, q_pochhammer_q,
};
use sumrank::matrix::{column_space_basis, rank, sum_rank_weight};
use sumrank::oracle::{brute_weight_histogram, enumerate_matrices, EnumerationBudget};
use sumrank::partitions::{enumerate_partitions, minimize_product, minimize_product_by_scan, partition_count};
use sumrank::sampling::{sample_rank_t, trial_rng};
use sumrank::{FieldSpec, FqMatrix, OrderedPartition, Scenario};

fn field(q: u64) -> Arc<FieldSpec> {
    Arc::new(FieldSpec::new(q).unwrap())
}

/// A random `m x n` matrix over `F_q` together with a random composition of `n`.
fn matrix_and_partition() -> impl Strategy<Value = (FqMatrix, OrderedPartition)> {
    (prop::sample::select(vec![2u64, 3, 4]), 1usize..=8, 1usize..=8).prop_flat_map(|(q, m, n)| {
        let entries = prop::collection::vec(0..q as u32, m * n);
        let cuts = prop::collection::vec(any::<bool>(), n - 1);
        (entries, cuts).prop_map(move |(idx, cuts)| {
            let a = FqMatrix::from_indices(field(q), m, n, &idx).unwrap();
            (a, composition(n, &cuts))
        })
    })
}

/// Composition of `n` cut after position `i` wherever `cuts[i]` is set.
fn composition(n: usize, cuts: &[bool]) -> OrderedPartition {
    let mut parts = Vec::new();
    let mut len = 0;
    for i in 0..n {
        len += 1;
        if i + 1 == n || cuts[i] {
            parts.push(len);
            len = 0;
        }
    }
    OrderedPartition::new(parts).unwrap()
}

fn scenario(q: u64, m: usize, t: usize, parts: Vec<usize>) -> Scenario {
    Scenario::new(q, m, t, OrderedPartition::new(parts).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sum_rank_sandwich((a, p) in matrix_and_partition()) {
        let r = rank(&a);
        let w = sum_rank_weight(&a, &p).unwrap();
        prop_assert!(r <= w);
        prop_assert!(w <= p.len() * r);
    }

    #[test]
    fn refinement_never_lowers_weight((a, p) in matrix_and_partition(), pick in any::<prop::sample::Index>(), at in any::<prop::sample::Index>()) {
        let k = pick.index(p.len());
        let size = p.parts()[k];
        prop_assume!(size >= 2);
        let left = 1 + at.index(size - 1);
        let mut parts = p.parts().to_vec();
        parts.splice(k..=k, [left, size - left]);
        let finer = OrderedPartition::new(parts).unwrap();
        prop_assert!(sum_rank_weight(&a, &finer).unwrap() >= sum_rank_weight(&a, &p).unwrap());
    }

    #[test]
    fn column_space_invariant_under_invertible_right_factor((a, _) in matrix_and_partition(), seed in any::<u64>()) {
        let g = sample_rank_t(a.cols(), a.cols(), a.cols(), a.field(), &mut trial_rng(seed, 0)).unwrap();
        let ag = a.mul(&g).unwrap();
        prop_assert_eq!(column_space_basis(&ag), column_space_basis(&a));
        prop_assert_eq!(rank(&ag), rank(&a));
    }

    #[test]
    fn text_round_trip((a, _) in matrix_and_partition()) {
        prop_assert_eq!(FqMatrix::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn probability_symmetric_in_parts(q in prop::sample::select(vec![2u64, 3, 4, 5, 7]), t in 1usize..=3, extra in prop::collection::vec(0usize..4, 2..=4), rot in 1usize..4) {
        let parts: Vec<usize> = extra.iter().map(|e| t + e).collect();
        let mut rotated = parts.clone();
        let len = rotated.len();
        rotated.rotate_left(rot % len);
        let mut reversed = parts.clone();
        reversed.reverse();
        let base = exact_prob_full_sumrank(&scenario(q, t, t, parts)).unwrap();
        prop_assert_eq!(&exact_prob_full_sumrank(&scenario(q, t, t, rotated)).unwrap(), &base);
        prop_assert_eq!(&exact_prob_full_sumrank(&scenario(q, t, t, reversed)).unwrap(), &base);
    }

    #[test]
    fn probability_independent_of_m(q in prop::sample::select(vec![2u64, 3, 9]), t in 1usize..=3, extra in prop::collection::vec(0usize..3, 1..=3), dm in 1usize..5) {
        let parts: Vec<usize> = extra.iter().map(|e| t + e).collect();
        let tight = exact_prob_full_sumrank(&scenario(q, t, t, parts.clone())).unwrap();
        let loose = exact_prob_full_sumrank(&scenario(q, t + dm, t, parts)).unwrap();
        prop_assert_eq!(tight, loose);
    }

    #[test]
    fn probability_is_count_ratio(q in prop::sample::select(vec![2u64, 3, 4, 8]), t in 1usize..=3, dm in 0usize..3, extra in prop::collection::vec(0usize..3, 1..=3)) {
        let parts: Vec<usize> = extra.iter().map(|e| t + e).collect();
        let s = scenario(q, t + dm, t, parts);
        let full = count_full_sumrank(&s).unwrap();
        let all = count_rank_t(s.m, s.n(), t, q).unwrap();
        prop_assert!(full <= all);
        prop_assert_eq!(exact_prob_full_sumrank(&s).unwrap(), BigRational::new(full, all));
    }

    #[test]
    fn counts_are_integral(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11]), m in 0usize..8, n in 0usize..8, t in 0usize..8) {
        prop_assume!(t <= m && t <= n);
        let gl = q_pochhammer_q(q, t, t);
        let qm = q_pochhammer_q(q, m, t);
        let qn = q_pochhammer_q(q, n, t);
        prop_assert!(qm.is_multiple_of(&gl));
        prop_assert!((&qm * &qn).is_multiple_of(&gl));
        prop_assert_eq!(gaussian_binomial(m, t, q).unwrap() * &gl, qm.clone());
        prop_assert_eq!(count_rank_t(m, n, t, q).unwrap() * gl, qm * qn);
    }

    #[test]
    fn element_encoding_round_trips(q in prop::sample::select(vec![2u64, 4, 8, 9, 25, 27, 49, 64, 121, 65521]), i in any::<u64>()) {
        let f = FieldSpec::new(q).unwrap();
        let a = f.elem(i % q).unwrap();
        prop_assert_eq!(f.decode(&f.encode(a)).unwrap(), a);
    }
}

#[test]
fn sandwich_exhaustive_gf2() {
    let f = field(2);
    let budget = EnumerationBudget::default();
    for m in 1..=4 {
        for n in 1..=12 / m {
            let parts: Vec<_> = (0..1usize << (n - 1))
                .map(|mask| composition(n, &(0..n - 1).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>()))
                .collect();
            for a in enumerate_matrices(m, n, &f, &budget).unwrap() {
                let r = rank(&a);
                for p in &parts {
                    let w = sum_rank_weight(&a, p).unwrap();
                    assert!(r <= w && w <= p.len() * r, "{m}x{n} {p}");
                }
            }
        }
    }
}

#[test]
fn full_weight_counts_match_enumeration() {
    let budget = EnumerationBudget::default();
    let cases: &[(u64, usize, &[usize])] = &[
        (2, 2, &[1, 1]),
        (2, 2, &[2, 2]),
        (2, 3, &[1, 2, 1]),
        (2, 2, &[1, 1, 1, 1, 1]),
        (3, 2, &[1, 2]),
        (3, 2, &[2, 2]),
        (4, 2, &[1, 2]),
        (5, 1, &[1, 1, 1]),
    ];
    for &(q, m, parts) in cases {
        let s = scenario(q, m, 1, parts.to_vec());
        let hist = brute_weight_histogram(&s, &budget).unwrap();
        for t in 1..=m.min(s.n()) {
            if s.partition.min_part() < t {
                continue;
            }
            let st = scenario(q, m, t, parts.to_vec());
            let brute = hist.get(&(t, s.ell() * t)).cloned().unwrap_or_default();
            assert_eq!(brute, count_full_sumrank(&st).unwrap(), "q={q} m={m} t={t} {parts:?}");
        }
    }
}

#[test]
fn partition_enumeration_agrees_with_count_and_minimizer() {
    for q in [2u64, 3, 5] {
        for t in 1..=3 {
            for ell in 1..=4 {
                for n in ell * t..=12 {
                    let all: Vec<_> = enumerate_partitions(n, ell, t).collect();
                    assert_eq!(all.len() as u128, partition_count(n, ell, t));
                    assert!(all.windows(2).all(|w| w[0].parts() < w[1].parts()));
                    assert!(all.iter().all(|p| p.total() == n && p.min_part() >= t));
                    assert_eq!(minimize_product(n, ell, t, q).unwrap(), minimize_product_by_scan(n, ell, t, q).unwrap());
                }
            }
        }
    }
}
