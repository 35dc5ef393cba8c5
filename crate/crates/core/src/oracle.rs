//! Brute-force ground truth by exhaustive enumeration over small fields.
//!
//! Nothing here calls into [`crate::counting`]; the point is to check the
//! closed forms against plain enumeration. For `q = 2` matrices are packed
//! one row per machine word and ranks come from XOR elimination; other
//! fields go through generic Gaussian elimination. The index range is
//! split across rayon workers and per-worker tallies are added up.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::counting::{ExactInt, ExactRatio, Scenario};
use crate::field::{FieldError, FieldSpec, FqElem};
use crate::matrix::{column_space_basis, FqMatrix, OrderedPartition};

/// Default cap on the number of enumerated points, `2^22`.
pub const DEFAULT_MAX_POINTS: u64 = 1 << 22;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration of {points} points exceeds the budget of {max_points}")]
    BudgetExceeded { points: ExactInt, max_points: ExactInt },
    #[error("no matrix satisfies the condition: {0}")]
    DegenerateCondition(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Cap on `q^{m n}` for any single enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_points: ExactInt,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_points: DEFAULT_MAX_POINTS.into() }
    }
}

impl EnumerationBudget {
    pub fn new(max_points: impl Into<ExactInt>) -> Result<Self, OracleError> {
        let max_points = max_points.into();
        if max_points < BigInt::from(1) {
            return Err(OracleError::InvalidDimension("budget must be at least 1".into()));
        }
        Ok(EnumerationBudget { max_points })
    }

    /// `q^{rows cols}` as a `u64` if it fits the budget.
    fn admit(&self, q: u64, rows: usize, cols: usize) -> Result<u64, OracleError> {
        let points = Pow::pow(BigInt::from(q), rows * cols);
        match points.to_u64() {
            Some(p) if points <= self.max_points => Ok(p),
            _ => Err(OracleError::BudgetExceeded { points, max_points: self.max_points.clone() }),
        }
    }
}

fn check_shape(m: usize, n: usize) -> Result<(), OracleError> {
    if m == 0 || n == 0 {
        return Err(OracleError::InvalidDimension(format!("{m}x{n}")));
    }
    Ok(())
}

/// Every `m x n` matrix over the field, each once, in odometer order: the
/// last row-major entry turns fastest.
pub struct MatrixStream {
    field: Arc<FieldSpec>,
    m: usize,
    n: usize,
    digits: Vec<u32>,
    remaining: u64,
}

impl Iterator for MatrixStream {
    type Item = FqMatrix;

    fn next(&mut self) -> Option<FqMatrix> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = FqMatrix::from_indices(self.field.clone(), self.m, self.n, &self.digits).expect("digits are canonical");
        odometer_step(&mut self.digits, self.field.order() as u32);
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

fn odometer_step(digits: &mut [u32], q: u32) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return;
        }
        *d = 0;
    }
}

fn decode_index(mut k: u64, q: u64, len: usize) -> Vec<u32> {
    let mut digits = vec![0u32; len];
    for d in digits.iter_mut().rev() {
        *d = (k % q) as u32;
        k /= q;
    }
    digits
}

pub fn enumerate_matrices(
    m: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    budget: &EnumerationBudget,
) -> Result<MatrixStream, OracleError> {
    check_shape(m, n)?;
    let total = budget.admit(field.order(), m, n)?;
    Ok(MatrixStream { field: field.clone(), m, n, digits: vec![0; m * n], remaining: total })
}

type Histogram = BTreeMap<(usize, usize), u64>;

fn merge(mut a: Histogram, b: Histogram) -> Histogram {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Rank of packed binary rows (bit `i` of a row is one coordinate).
fn rank_gf2(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for r in rows[i + 1..].iter_mut() {
            if *r & low != 0 {
                *r ^= pivot;
            }
        }
    }
    rank
}

/// Rank of a dense row-major `rows x cols` buffer, destroying it.
fn rank_generic(f: &FieldSpec, buf: &mut [FqElem], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !buf[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for k in 0..cols {
                buf.swap(p * cols + k, rank * cols + k);
            }
        }
        let inv = f.inv(buf[rank * cols + c]).expect("nonzero pivot");
        for r in rank + 1..rows {
            let lead = buf[r * cols + c];
            if lead.is_zero() {
                continue;
            }
            let factor = f.mul(lead, inv);
            for k in c..cols {
                let sub = f.mul(factor, buf[rank * cols + k]);
                buf[r * cols + k] = f.sub(buf[r * cols + k], sub);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Joint `(rank, sum-rank weight)` counts over all `m x n` matrices.
fn joint_histogram(
    m: usize,
    n: usize,
    field: &Arc<FieldSpec>,
    partition: &OrderedPartition,
    budget: &EnumerationBudget,
) -> Result<Histogram, OracleError> {
    check_shape(m, n)?;
    if partition.total() != n {
        return Err(OracleError::InvalidDimension(format!("partition {partition} does not sum to n = {n}")));
    }
    let total = budget.admit(field.order(), m, n)?;
    let chunks = total.div_ceil(CHUNK);
    let hist = if field.order() == 2 && n <= 64 && m * n <= 64 {
        (0..chunks)
            .into_par_iter()
            .map(|c| histogram_gf2(m, n, partition, c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .reduce(Histogram::new, merge)
    } else {
        (0..chunks)
            .into_par_iter()
            .map(|c| histogram_generic(m, n, field, partition, c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .reduce(Histogram::new, merge)
    };
    Ok(hist)
}

fn histogram_gf2(m: usize, n: usize, partition: &OrderedPartition, start: u64, end: u64) -> Histogram {
    let row_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // column c of a row lives at bit n - 1 - c
    let block_masks: Vec<u64> = partition
        .ranges()
        .map(|r| r.fold(0u64, |acc, c| acc | (1u64 << (n - 1 - c))))
        .collect();
    let mut hist = Histogram::new();
    let mut rows = vec![0u64; m];
    let mut scratch = vec![0u64; m];
    for k in start..end {
        for (r, row) in rows.iter_mut().enumerate() {
            *row = (k >> (n * (m - 1 - r))) & row_mask;
        }
        scratch.copy_from_slice(&rows);
        let rank = rank_gf2(&mut scratch);
        let weight = if block_masks.len() == 1 {
            rank
        } else {
            block_masks
                .iter()
                .map(|&mask| {
                    for (s, &r) in scratch.iter_mut().zip(&rows) {
                        *s = r & mask;
                    }
                    rank_gf2(&mut scratch)
                })
                .sum()
        };
        *hist.entry((rank, weight)).or_default() += 1;
    }
    hist
}

fn histogram_generic(
    m: usize,
    n: usize,
    field: &FieldSpec,
    partition: &OrderedPartition,
    start: u64,
    end: u64,
) -> Histogram {
    let q = field.order();
    let mut digits = decode_index(start, q, m * n);
    let mut buf = vec![FqElem::ZERO; m * n];
    let mut hist = Histogram::new();
    let ranges: Vec<_> = partition.ranges().collect();
    for _ in start..end {
        for (b, &d) in buf.iter_mut().zip(&digits) {
            *b = FqElem::from_index(d);
        }
        let rank = rank_generic(field, &mut buf, m, n);
        let weight = if ranges.len() == 1 {
            rank
        } else {
            ranges
                .iter()
                .map(|range| {
                    let w = range.len();
                    for r in 0..m {
                        for (j, c) in range.clone().enumerate() {
                            buf[r * w + j] = FqElem::from_index(digits[r * n + c]);
                        }
                    }
                    rank_generic(field, &mut buf[..m * w], m, w)
                })
                .sum()
        };
        *hist.entry((rank, weight)).or_default() += 1;
        odometer_step(&mut digits, q as u32);
    }
    hist
}

/// Number of `m x n` matrices of rank exactly `t`, by enumeration.
pub fn brute_count_rank_t(
    m: usize,
    n: usize,
    t: usize,
    field: &Arc<FieldSpec>,
    budget: &EnumerationBudget,
) -> Result<ExactInt, OracleError> {
    let single = OrderedPartition::single(n.max(1)).expect("n >= 1");
    let hist = joint_histogram(m, n, field, &single, budget)?;
    Ok(hist.iter().filter(|((r, _), _)| *r == t).map(|(_, &c)| c).sum::<u64>().into())
}

/// Number of `t`-dimensional subspaces of `F_q^m`: distinct canonical
/// column spaces among all full-rank `m x t` matrices.
pub fn brute_count_subspaces(
    m: usize,
    t: usize,
    field: &Arc<FieldSpec>,
    budget: &EnumerationBudget,
) -> Result<ExactInt, OracleError> {
    if t > m {
        return Ok(0.into());
    }
    if t == 0 {
        return Ok(1.into());
    }
    let total = budget.admit(field.order(), m, t)?;
    let chunks = total.div_ceil(CHUNK);
    let count = if field.order() == 2 && m <= 64 {
        (0..chunks)
            .into_par_iter()
            .map(|c| subspaces_gf2(m, t, c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
            .len()
    } else {
        (0..chunks)
            .into_par_iter()
            .map(|c| subspaces_generic(m, t, field, c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
            .len()
    };
    Ok(count.into())
}

/// Reduced echelon form of packed vectors, sorted, zero vectors dropped.
/// Two spanning sets of the same space give the same output.
fn canonical_gf2(vecs: &mut Vec<u64>) {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vecs.iter() {
        let mut v = v;
        for &b in &basis {
            let lead = 63 - b.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let lead = 63 - v.leading_zeros();
        for b in basis.iter_mut() {
            if *b >> lead & 1 == 1 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_unstable();
    *vecs = basis;
}

fn subspaces_gf2(m: usize, t: usize, start: u64, end: u64) -> HashSet<Vec<u64>> {
    let mut seen = HashSet::new();
    let mut cols = Vec::with_capacity(t);
    for k in start..end {
        // bits of k in row-major order; gather column c of the m x t matrix
        cols.clear();
        for c in 0..t {
            let mut v = 0u64;
            for r in 0..m {
                let pos = r * t + c;
                v = (v << 1) | ((k >> (m * t - 1 - pos)) & 1);
            }
            cols.push(v);
        }
        canonical_gf2(&mut cols);
        if cols.len() == t {
            seen.insert(cols.clone());
        }
    }
    seen
}

fn subspaces_generic(m: usize, t: usize, field: &Arc<FieldSpec>, start: u64, end: u64) -> HashSet<Vec<Vec<FqElem>>> {
    let q = field.order();
    let mut digits = decode_index(start, q, m * t);
    let mut seen = HashSet::new();
    for _ in start..end {
        let a = FqMatrix::from_indices(field.clone(), m, t, &digits).expect("canonical digits");
        let basis = column_space_basis(&a);
        if basis.len() == t {
            seen.insert(basis);
        }
        odometer_step(&mut digits, q as u32);
    }
    seen
}

/// `#{rank t and wt_SR = l t} / #{rank t}` over all matrices of the scenario's shape.
pub fn brute_conditional_prob(s: &Scenario, budget: &EnumerationBudget) -> Result<ExactRatio, OracleError> {
    let field = Arc::new(FieldSpec::new(s.q)?);
    let hist = joint_histogram(s.m, s.n(), &field, &s.partition, budget)?;
    let target = s.ell() * s.t;
    let of_rank: u64 = hist.iter().filter(|((r, _), _)| *r == s.t).map(|(_, &c)| c).sum();
    if of_rank == 0 {
        return Err(OracleError::DegenerateCondition(format!(
            "no {}x{} matrix has rank {}",
            s.m,
            s.n(),
            s.t
        )));
    }
    let full = hist.get(&(s.t, target)).copied().unwrap_or(0);
    Ok(BigRational::new(full.into(), of_rank.into()))
}

/// Exact joint counts of `(rank, sum-rank weight)` over all matrices of the
/// scenario's shape. The scenario's `t` is not used.
pub fn brute_weight_histogram(
    s: &Scenario,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<(usize, usize), ExactInt>, OracleError> {
    let field = Arc::new(FieldSpec::new(s.q)?);
    let hist = joint_histogram(s.m, s.n(), &field, &s.partition, budget)?;
    Ok(hist.into_iter().map(|(k, v)| (k, v.into())).collect())
}
