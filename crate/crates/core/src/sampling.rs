//! Uniform sampling of fixed-rank matrices over `F_q` and Monte Carlo
//! estimation of the full sum-rank probability.
//!
//! A rank-`t` matrix `A` in `F_q^{m x n}` factors as `A = L R` with `L` of
//! full column rank `t` and `R` of full row rank `t` in exactly
//! `|GL_t(F_q)|` ways, the same number for every `A`. Drawing `L` and `R`
//! independently and uniformly therefore makes `A` uniform.
//!
//! Each draw consumes a fixed number of RNG calls (no rejection loops), and
//! trial `k` of a run with seed `s` uses ChaCha stream `k` seeded by `s`.
//! Results are therefore identical however the trials are scheduled.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::counting::{CountingError, ExactRatio, Scenario};
use crate::field::{FieldError, FieldSpec, FqElem};
use crate::matrix::{sum_rank_weight, FqMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl From<CountingError> for SamplingError {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::InvalidDimension(s) => SamplingError::InvalidDimension(s),
            CountingError::NotAPrimePower(q) => SamplingError::Field(FieldError::NotAPrimePower(q)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub trials: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64, trials: u64) -> Result<Self, SamplingError> {
        if trials == 0 {
            return Err(SamplingError::InvalidDimension("trials must be at least 1".into()));
        }
        Ok(SamplerConfig { seed, trials })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub hits: u64,
    pub trials: u64,
    pub estimate: ExactRatio,
    /// `sqrt(p (1 - p) / trials)` with `p = hits / trials`.
    pub stderr: f64,
}

impl EstimateResult {
    fn new(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        EstimateResult {
            hits,
            trials,
            estimate: BigRational::new(BigInt::from(hits), BigInt::from(trials)),
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

/// The RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn uniform_elem<R: Rng + ?Sized>(field: &FieldSpec, rng: &mut R) -> FqElem {
    FqElem::from_index(rng.random_range(0..field.order()) as u32)
}

/// Uniform `m x t` matrix of rank `t`.
///
/// Column `j` is drawn uniformly from `F_q^m` minus the span `S` of the
/// previous columns. `S` is kept in reduced echelon form with pivot set
/// `P`; every vector splits uniquely as `s + c` with `s` in `S` and `c`
/// supported off `P`, and it lies outside `S` iff `c != 0`. So the column
/// is a uniform `s` (uniform coefficients on the basis) plus a uniform
/// nonzero `c`, indexed directly in `[1, q^{m-j})`.
pub fn sample_full_column_rank<R: Rng + ?Sized>(
    m: usize,
    t: usize,
    field: &Arc<FieldSpec>,
    rng: &mut R,
) -> Result<FqMatrix, SamplingError> {
    if t == 0 || t > m {
        return Err(SamplingError::InvalidDimension(format!("need m >= t >= 1, got m={m}, t={t}")));
    }
    let q = field.order() as u128;
    if (m as f64) * (q as f64).log2() >= 127.0 {
        return Err(SamplingError::InvalidDimension(format!("q^m too large for indexed draws (q={q}, m={m})")));
    }
    let f = &**field;
    let mut basis: Vec<Vec<FqElem>> = Vec::with_capacity(t);
    let mut is_pivot = vec![false; m];
    let mut columns: Vec<Vec<FqElem>> = Vec::with_capacity(t);

    for j in 0..t {
        let free: Vec<usize> = (0..m).filter(|&i| !is_pivot[i]).collect();
        let nonzero = q.pow((m - j) as u32) - 1;
        let mut idx = rng.random_range(0..nonzero) + 1;
        let mut c = vec![FqElem::ZERO; m];
        for &pos in &free {
            c[pos] = FqElem::from_index((idx % q) as u32);
            idx /= q;
        }
        let mut v = c.clone();
        for b in &basis {
            let a = uniform_elem(f, rng);
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.add(*x, f.mul(a, y));
            }
        }
        columns.push(v);

        // Extend the echelon basis with the normalized complement part.
        let pivot = free.into_iter().find(|&i| !c[i].is_zero()).expect("c is nonzero");
        let inv = f.inv(c[pivot]).expect("nonzero");
        for x in c.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for b in basis.iter_mut() {
            let factor = b[pivot];
            if !factor.is_zero() {
                for (x, &y) in b.iter_mut().zip(&c) {
                    *x = f.sub(*x, f.mul(factor, y));
                }
            }
        }
        basis.push(c);
        is_pivot[pivot] = true;
    }

    let mut entries = Vec::with_capacity(m * t);
    for r in 0..m {
        entries.extend(columns.iter().map(|col| col[r]));
    }
    Ok(FqMatrix::new(field.clone(), m, t, entries)?)
}

/// Uniform `m x n` matrix of rank `t`; the zero matrix when `t = 0`.
pub fn sample_rank_t<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    t: usize,
    field: &Arc<FieldSpec>,
    rng: &mut R,
) -> Result<FqMatrix, SamplingError> {
    if t > m || t > n || m == 0 || n == 0 {
        return Err(SamplingError::InvalidDimension(format!("rank {t} impossible for {m}x{n}")));
    }
    if t == 0 {
        return Ok(FqMatrix::zeros(field.clone(), m, n)?);
    }
    let left = sample_full_column_rank(m, t, field, rng)?;
    let right = sample_full_column_rank(n, t, field, rng)?.transpose();
    Ok(left.mul(&right)?)
}

/// Monte Carlo estimate of `Pr[wt_SR(A) = l t | rank(A) = t]`.
pub fn estimate_prob(s: &Scenario, cfg: &SamplerConfig) -> Result<EstimateResult, SamplingError> {
    s.check_parts()?;
    if cfg.trials == 0 {
        return Err(SamplingError::InvalidDimension("trials must be at least 1".into()));
    }
    let field = Arc::new(FieldSpec::new(s.q)?);
    let target = s.ell() * s.t;
    let (m, n, t) = (s.m, s.n(), s.t);
    let hits = (0..cfg.trials)
        .into_par_iter()
        .map(|k| -> Result<u64, SamplingError> {
            let mut rng = trial_rng(cfg.seed, k);
            let a = sample_rank_t(m, n, t, &field, &mut rng)?;
            debug_assert_eq!(a.rank(), t);
            Ok(u64::from(sum_rank_weight(&a, &s.partition)? == target))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(EstimateResult::new(hits, cfg.trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rank, OrderedPartition};

    fn field(q: u64) -> Arc<FieldSpec> {
        Arc::new(FieldSpec::new(q).unwrap())
    }

    #[test]
    fn one_by_one_over_f2_is_always_one() {
        let f = field(2);
        let mut rng = trial_rng(7, 0);
        for _ in 0..20 {
            let a = sample_full_column_rank(1, 1, &f, &mut rng).unwrap();
            assert_eq!(a.get(0, 0), FqElem::ONE);
        }
    }

    #[test]
    fn samples_have_requested_rank() {
        let mut rng = trial_rng(1, 0);
        for q in [2u64, 3, 4, 5, 9] {
            let f = field(q);
            for m in 1..=4 {
                for n in 1..=4 {
                    for t in 0..=m.min(n) {
                        for _ in 0..10 {
                            let a = sample_rank_t(m, n, t, &f, &mut rng).unwrap();
                            assert_eq!((a.rows(), a.cols(), rank(&a)), (m, n, t));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rank_zero_is_zero_matrix() {
        let mut rng = trial_rng(3, 3);
        assert!(sample_rank_t(3, 2, 0, &field(7), &mut rng).unwrap().is_zero());
    }

    #[test]
    fn invalid_dimensions() {
        let f = field(2);
        let mut rng = trial_rng(0, 0);
        assert!(sample_rank_t(2, 3, 3, &f, &mut rng).is_err());
        assert!(sample_full_column_rank(2, 0, &f, &mut rng).is_err());
        assert!(sample_full_column_rank(200, 1, &f, &mut rng).is_err());
        assert!(SamplerConfig::new(0, 0).is_err());
    }

    #[test]
    fn single_nonzero_column_is_uniform() {
        // m=2, t=1, q=2: three nonzero vectors, each about a third of the time
        let f = field(2);
        let mut rng = trial_rng(11, 0);
        let mut counts = [0u32; 4];
        for _ in 0..3000 {
            let a = sample_full_column_rank(2, 1, &f, &mut rng).unwrap();
            counts[(a.get(0, 0).index() + 2 * a.get(1, 0).index()) as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        assert!(counts[1..].iter().all(|&c| (900..1100).contains(&c)), "{counts:?}");
    }

    #[test]
    fn estimate_trivial_cases() {
        let cfg = SamplerConfig::new(5, 500).unwrap();
        let one_block = Scenario::new(3, 3, 2, OrderedPartition::single(4).unwrap()).unwrap();
        let r = estimate_prob(&one_block, &cfg).unwrap();
        assert_eq!((r.hits, r.trials, r.stderr), (500, 500, 0.0));

        let rank_zero = Scenario::new(2, 2, 0, OrderedPartition::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(estimate_prob(&rank_zero, &cfg).unwrap().hits, 500);

        let bad = Scenario::new(2, 2, 2, OrderedPartition::new(vec![1, 3]).unwrap()).unwrap();
        assert!(matches!(estimate_prob(&bad, &cfg), Err(SamplingError::InvalidDimension(_))));
    }

    #[test]
    fn estimate_is_seed_deterministic() {
        let s = Scenario::new(3, 3, 2, OrderedPartition::new(vec![2, 3]).unwrap()).unwrap();
        let cfg = SamplerConfig::new(42, 2000).unwrap();
        let a = estimate_prob(&s, &cfg).unwrap();
        let b = estimate_prob(&s, &cfg).unwrap();
        assert_eq!(a, b);
        // and independent of scheduling: a sequential recount agrees
        let field = field(3);
        let sequential: u64 = (0..cfg.trials)
            .map(|k| {
                let a = sample_rank_t(3, 5, 2, &field, &mut trial_rng(42, k)).unwrap();
                u64::from(sum_rank_weight(&a, &s.partition).unwrap() == 4)
            })
            .sum();
        assert_eq!(a.hits, sequential);
    }
}
