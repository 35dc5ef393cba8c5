//! Exact evaluation of the counting formulas for subspaces and fixed-rank
//! matrices over `F_q`, and of the probability that a uniformly random
//! rank-`t` matrix has sum-rank weight `l*t`.
//!
//! Everything here is polynomial in `q`, so `q` is taken as a plain integer
//! and no field arithmetic is constructed. Callers are expected to pass a
//! prime power (see [`Scenario::new`]); the formulas themselves only need
//! `q >= 2`.
//!
//! The central quantity is `Q_t(x) = (x - 1)(x - q)...(x - q^{t-1})`
//! evaluated at `x = q^r`, which counts ordered `t`-tuples of linearly
//! independent vectors in `F_q^r`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use thiserror::Error;

use crate::field::is_prime_power;
use crate::matrix::OrderedPartition;

/// Arbitrary-precision integer carrying exact counts.
pub type ExactInt = BigInt;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type ExactRatio = BigRational;

/// Number of factors used for the q-Pochhammer enclosure unless told otherwise.
pub const DEFAULT_POCHHAMMER_TERMS: u32 = 40;

/// Significant digits of [`PochhammerEnclosure`] decimal renderings.
pub const POCHHAMMER_DIGITS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
}

fn invalid(msg: impl Into<String>) -> CountingError {
    CountingError::InvalidDimension(msg.into())
}

fn pow(q: u64, r: usize) -> BigInt {
    Pow::pow(BigInt::from(q), r)
}

/// `Q_t(q^r) = prod_{i=0}^{t-1} (q^r - q^i)`.
///
/// Total in `r`: for `r < t` the literal product is returned (zero, since
/// the factor `i = r` vanishes). Returns 1 for `t = 0`.
pub fn q_pochhammer_q(q: u64, r: usize, t: usize) -> ExactInt {
    let x = pow(q, r);
    let mut qi = BigInt::one();
    let mut acc = BigInt::one();
    for _ in 0..t {
        acc *= &x - &qi;
        qi *= q;
    }
    acc
}

/// Number of `t`-dimensional subspaces of `F_q^m`, `Q_t(q^m) / Q_t(q^t)`.
pub fn gaussian_binomial(m: usize, t: usize, q: u64) -> Result<ExactInt, CountingError> {
    if t > m {
        return Err(invalid(format!("t = {t} exceeds m = {m}")));
    }
    let (quot, rem) = q_pochhammer_q(q, m, t).div_rem(&q_pochhammer_q(q, t, t));
    debug_assert!(rem.is_zero());
    Ok(quot)
}

/// Number of `m x n` matrices (any `m >= t`) whose column space is a fixed
/// `t`-dimensional subspace: `Q_t(q^n)`.
pub fn count_fixed_colspace(n: usize, t: usize, q: u64) -> Result<ExactInt, CountingError> {
    if t > n {
        return Err(invalid(format!("t = {t} exceeds n = {n}")));
    }
    Ok(q_pochhammer_q(q, n, t))
}

/// Number of `m x n` matrices of rank `t`: `Q_t(q^m) Q_t(q^n) / Q_t(q^t)`.
pub fn count_rank_t(m: usize, n: usize, t: usize, q: u64) -> Result<ExactInt, CountingError> {
    if t > m || t > n {
        return Err(invalid(format!("rank {t} impossible for {m}x{n}")));
    }
    Ok(gaussian_binomial(m, t, q)? * q_pochhammer_q(q, n, t))
}

/// A sampling scenario: rank-`t` matrices in `F_q^{m x n}` split into
/// column blocks by `partition`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub q: u64,
    pub m: usize,
    pub t: usize,
    pub partition: OrderedPartition,
}

impl Scenario {
    /// Checks that `q` is a prime power and `m >= t`. Part sizes are checked
    /// by the operations that need `n_i >= t`.
    pub fn new(q: u64, m: usize, t: usize, partition: OrderedPartition) -> Result<Self, CountingError> {
        if !is_prime_power(q) {
            return Err(CountingError::NotAPrimePower(q));
        }
        if m == 0 {
            return Err(invalid("m must be positive"));
        }
        if t > m {
            return Err(invalid(format!("t = {t} exceeds m = {m}")));
        }
        Ok(Scenario { q, m, t, partition })
    }

    pub fn n(&self) -> usize {
        self.partition.total()
    }

    pub fn ell(&self) -> usize {
        self.partition.len()
    }

    /// Every block must be able to carry rank `t`.
    pub fn check_parts(&self) -> Result<(), CountingError> {
        if self.partition.min_part() < self.t {
            return Err(invalid(format!(
                "partition {} has a part smaller than t = {}",
                self.partition, self.t
            )));
        }
        Ok(())
    }
}

/// Number of rank-`t` matrices whose every block also has rank `t`:
/// `(Q_t(q^m) / Q_t(q^t)) * prod_i Q_t(q^{n_i})`.
pub fn count_full_sumrank(s: &Scenario) -> Result<ExactInt, CountingError> {
    s.check_parts()?;
    let subspaces = gaussian_binomial(s.m, s.t, s.q)?;
    Ok(s.partition
        .parts()
        .iter()
        .fold(subspaces, |acc, &ni| acc * q_pochhammer_q(s.q, ni, s.t)))
}

/// `Pr[wt_SR(A) = l t | rank(A) = t] = prod_i Q_t(q^{n_i}) / Q_t(q^n)`.
///
/// Independent of `m`. For `t = 0` the only matrix is zero and the result is 1.
pub fn exact_prob_full_sumrank(s: &Scenario) -> Result<ExactRatio, CountingError> {
    s.check_parts()?;
    let num = s
        .partition
        .parts()
        .iter()
        .map(|&ni| q_pochhammer_q(s.q, ni, s.t))
        .product::<BigInt>();
    Ok(BigRational::new(num, q_pochhammer_q(s.q, s.n(), s.t)))
}

/// The probability at the extremal partition `(t, ..., t, n - (l-1)t)`:
/// `Q_t(q^t)^{l-1} Q_t(q^{n-(l-1)t}) / Q_t(q^n)`. A lower bound on
/// [`exact_prob_full_sumrank`] over all partitions of `n` into `l` parts
/// of size at least `t`.
pub fn lower_bound_prob(n: usize, ell: usize, t: usize, q: u64) -> Result<ExactRatio, CountingError> {
    if ell == 0 {
        return Err(invalid("l must be positive"));
    }
    if n < ell * t {
        return Err(invalid(format!("n = {n} < l*t = {}", ell * t)));
    }
    let num = Pow::pow(q_pochhammer_q(q, t, t), ell - 1) * q_pochhammer_q(q, n - (ell - 1) * t, t);
    Ok(BigRational::new(num, q_pochhammer_q(q, n, t)))
}

/// The lower bound written as a product of normalized factors,
///
/// `prod_{i=first}^{t-1} (1 - q^{i-t})^{l-1} (1 - q^{i-n+(l-1)t}) / (1 - q^{i-n})`.
///
/// With `first = 0` this is [`lower_bound_prob`] factor by factor (each
/// `Q_t` factor `q^r - q^i` divided by `q^r`). Starting at `first = 1`
/// drops the `i = 0` factor and overstates the bound; it is exposed so
/// the two can be compared.
pub fn lower_bound_normalized_product(
    n: usize,
    ell: usize,
    t: usize,
    q: u64,
    first: usize,
) -> Result<ExactRatio, CountingError> {
    if ell == 0 {
        return Err(invalid("l must be positive"));
    }
    if n < ell * t {
        return Err(invalid(format!("n = {n} < l*t = {}", ell * t)));
    }
    let one = BigRational::one();
    // 1 - q^{-k} for k >= 1
    let one_minus_inv_pow = |k: usize| &one - BigRational::new(BigInt::one(), pow(q, k));
    let rest = n - (ell - 1) * t;
    let mut acc = one.clone();
    for i in first..t {
        let block = one_minus_inv_pow(t - i);
        acc *= Pow::pow(block, ell - 1);
        acc *= one_minus_inv_pow(rest - i);
        acc /= one_minus_inv_pow(n - i);
    }
    Ok(acc)
}

/// `1 - 1/q - 1/q^2`, the first terms of the pentagonal expansion of
/// `(1/q; 1/q)_inf` and a strict lower bound on it for `q >= 2`.
pub fn pentagonal_lower_bound(q: u64) -> ExactRatio {
    let q = BigInt::from(q);
    let q2 = &q * &q;
    BigRational::new(&q2 - &q - 1, q2)
}

/// `(1 - 1/q - 1/q^2)^l`.
pub fn corollary_bound(q: u64, ell: usize) -> ExactRatio {
    Pow::pow(pentagonal_lower_bound(q), ell)
}

/// Whether the quarter threshold applies, i.e. `l <= q - 1`.
pub fn quarter_threshold_applies(q: u64, ell: usize) -> bool {
    (ell as u64) < q
}

/// Partial product of `(1/q; 1/q)_inf` together with a rigorous enclosure
/// of the infinite product.
#[derive(Debug, Clone, PartialEq)]
pub struct PochhammerEnclosure {
    pub q: u64,
    pub terms: u32,
    /// `prod_{j=1}^{terms} (1 - q^{-j})`, also the upper end of the enclosure.
    pub partial: ExactRatio,
    /// `partial * (1 - q^{-terms} / (q - 1))`.
    pub lower: ExactRatio,
}

impl PochhammerEnclosure {
    pub fn upper(&self) -> &ExactRatio {
        &self.partial
    }

    pub fn contains(&self, x: &ExactRatio) -> bool {
        &self.lower <= x && x <= &self.partial
    }

    /// Distance from `x` to the enclosure (zero when inside).
    pub fn distance_to(&self, x: &ExactRatio) -> ExactRatio {
        if x < &self.lower {
            &self.lower - x
        } else if x > &self.partial {
            x - &self.partial
        } else {
            BigRational::zero()
        }
    }
}

/// Evaluate `prod_{j=1}^{terms} (1 - q^{-j})` exactly and bound the tail.
///
/// Each omitted factor satisfies `1 - q^{-j} <= 1`, and their product is at
/// least `1 - sum_{j>J} q^{-j} = 1 - q^{-J}/(q-1)`, which gives the enclosure.
pub fn pochhammer_partial(q: u64, terms: u32) -> PochhammerEnclosure {
    assert!(q >= 2, "q must be at least 2");
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let mut qj = BigInt::one();
    for _ in 0..terms {
        qj *= q;
        num *= &qj - 1;
        den *= &qj;
    }
    let partial = BigRational::new(num, den);
    let tail = BigRational::new(BigInt::one(), &qj * (q - 1));
    let lower = &partial * (BigRational::one() - tail);
    PochhammerEnclosure { q, terms, partial, lower }
}

/// Render `x` as a decimal with `digits` significant digits, rounding half
/// away from zero.
pub fn to_decimal(x: &ExactRatio, digits: usize) -> String {
    assert!(digits > 0);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let (num, den) = (x.numer().abs(), x.denom().clone());
    let ten = BigInt::from(10);
    // Find e with 10^e <= |x| < 10^{e+1}.
    let mut e: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ge = |e: i64| -> bool {
        if e >= 0 {
            num >= &den * Pow::pow(&ten, e as u64)
        } else {
            &num * Pow::pow(&ten, (-e) as u64) >= den
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }
    // Scale so that the integer part has `digits` digits.
    let shift = digits as i64 - 1 - e;
    let (sn, sd) = if shift >= 0 {
        (&num * Pow::pow(&ten, shift as u64), den.clone())
    } else {
        (num.clone(), &den * Pow::pow(&ten, (-shift) as u64))
    };
    let (mut quot, rem) = sn.div_rem(&sd);
    if rem * 2 >= sd {
        quot += 1;
    }
    let mut exp10 = e;
    let mut s = quot.to_string();
    if s.len() > digits {
        // rounding carried into a new digit, e.g. 9.99 -> 10.0
        s.pop();
        exp10 += 1;
    }
    let body = if exp10 >= digits as i64 - 1 {
        let mut out = s;
        out.extend(std::iter::repeat_n('0', (exp10 - (digits as i64 - 1)) as usize));
        out
    } else if exp10 >= 0 {
        let split = (exp10 + 1) as usize;
        format!("{}.{}", &s[..split], &s[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exp10 - 1) as usize), s)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `num/den`, the serialization used for every exact value.
pub fn ratio_string(x: &ExactRatio) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse a `num/den` (or bare integer) string.
pub fn parse_ratio(s: &str) -> Option<ExactRatio> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}
