//! Ordered partitions with a minimum part size, and the product
//! `prod_i Q_t(q^{n_i})` that they are ranked by.

use num_traits::Pow;

use crate::counting::{q_pochhammer_q, CountingError, ExactInt};
use crate::matrix::OrderedPartition;

/// Lexicographic stream of the ordered partitions of `n` into `ell` parts,
/// each at least `min_part`.
#[derive(Debug, Clone)]
pub struct Partitions {
    n: usize,
    min_part: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for Partitions {
    type Item = OrderedPartition;

    fn next(&mut self) -> Option<OrderedPartition> {
        let current = self.next.take()?;
        let ell = current.len();
        // Advance: bump the rightmost non-final part whose suffix still has
        // slack, reset everything after it to the minimum.
        let mut suffix = current[ell - 1];
        for i in (0..ell - 1).rev() {
            if suffix > (ell - 1 - i) * self.min_part {
                let mut succ = current.clone();
                succ[i] += 1;
                for p in &mut succ[i + 1..ell - 1] {
                    *p = self.min_part;
                }
                let head: usize = succ[..ell - 1].iter().sum();
                succ[ell - 1] = self.n - head;
                self.next = Some(succ);
                break;
            }
            suffix += current[i];
        }
        Some(OrderedPartition::new(current).expect("parts are positive"))
    }
}

/// All `(n_1, ..., n_ell)` with `n_i >= min_part` summing to `n`, in
/// lexicographic order. Empty when `n < ell * min_part`.
///
/// # Panics
///
/// If `ell` or `min_part` is zero.
pub fn enumerate_partitions(n: usize, ell: usize, min_part: usize) -> Partitions {
    assert!(ell >= 1 && min_part >= 1, "ell and min_part must be positive");
    let next = (n >= ell * min_part).then(|| {
        let mut first = vec![min_part; ell];
        first[ell - 1] = n - (ell - 1) * min_part;
        first
    });
    Partitions { n, min_part, next }
}

/// `C(n - ell*min_part + ell - 1, ell - 1)`, the length of
/// [`enumerate_partitions`].
pub fn partition_count(n: usize, ell: usize, min_part: usize) -> u128 {
    if ell == 0 || n < ell * min_part {
        return 0;
    }
    let top = (n - ell * min_part + ell - 1) as u128;
    let k = (ell - 1) as u128;
    (0..k).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

/// `prod_i Q_t(q^{n_i})`.
pub fn product_q(p: &OrderedPartition, t: usize, q: u64) -> Result<ExactInt, CountingError> {
    if p.min_part() < t {
        return Err(CountingError::InvalidDimension(format!("partition {p} has a part smaller than t = {t}")));
    }
    Ok(p.parts().iter().map(|&ni| q_pochhammer_q(q, ni, t)).product())
}

fn check_minimize(n: usize, ell: usize, t: usize) -> Result<(), CountingError> {
    if t == 0 || ell == 0 {
        return Err(CountingError::InvalidDimension("t and l must be positive".into()));
    }
    if n < ell * t {
        return Err(CountingError::InvalidDimension(format!("n = {n} < l*t = {}", ell * t)));
    }
    Ok(())
}

/// The partition minimizing [`product_q`] over all partitions of `n` into
/// `ell` parts of size at least `t`, with the minimum. Returns
/// `(t, ..., t, n - (ell-1)t)`, the lexicographically first minimizer.
pub fn minimize_product(n: usize, ell: usize, t: usize, q: u64) -> Result<(OrderedPartition, ExactInt), CountingError> {
    check_minimize(n, ell, t)?;
    let p = OrderedPartition::extremal(n, ell, t).expect("checked above");
    let value = Pow::pow(q_pochhammer_q(q, t, t), ell - 1) * q_pochhammer_q(q, n - (ell - 1) * t, t);
    Ok((p, value))
}

/// [`minimize_product`] by scanning every admissible partition; ties go to
/// the lexicographically first.
pub fn minimize_product_by_scan(
    n: usize,
    ell: usize,
    t: usize,
    q: u64,
) -> Result<(OrderedPartition, ExactInt), CountingError> {
    check_minimize(n, ell, t)?;
    let mut best: Option<(OrderedPartition, ExactInt)> = None;
    for p in enumerate_partitions(n, ell, t) {
        let v = product_q(&p, t, q)?;
        if best.as_ref().is_none_or(|(_, b)| &v < b) {
            best = Some((p, v));
        }
    }
    Ok(best.expect("at least one admissible partition"))
}

/// `Q_t(q^a) Q_t(q^b) - Q_t(q^{a+1}) Q_t(q^{b-1})`: the change in the
/// product when one unit moves from the smaller part `b` to the larger
/// part `a`. Positive for `a >= b >= t`.
pub fn exchange_inequality_margin(a: usize, b: usize, t: usize, q: u64) -> Result<ExactInt, CountingError> {
    if b < t || a < b || b == 0 {
        return Err(CountingError::InvalidDimension(format!("need a >= b >= max(t, 1), got a={a}, b={b}, t={t}")));
    }
    Ok(q_pochhammer_q(q, a, t) * q_pochhammer_q(q, b, t) - q_pochhammer_q(q, a + 1, t) * q_pochhammer_q(q, b - 1, t))
}
