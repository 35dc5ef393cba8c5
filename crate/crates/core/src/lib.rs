//! Exact and simulated probabilities that a random fixed-rank matrix over a
//! finite field attains the largest possible sum-rank weight.
//!
//! A matrix `A` in `F_q^{m x n}` split into column blocks
//! `A = (A_1 | ... | A_l)` by an ordered partition `(n_1, ..., n_l)` of `n`
//! has sum-rank weight `rank(A_1) + ... + rank(A_l)`, which lies between
//! `rank(A)` and `l * rank(A)`. For `A` uniform among rank-`t` matrices the
//! upper end is reached with probability
//!
//! ```text
//! Q_t(q^{n_1}) ... Q_t(q^{n_l}) / Q_t(q^n),   Q_t(x) = (x - 1)(x - q)...(x - q^{t-1}).
//! ```
//!
//! The crate computes this and the related counts exactly ([`counting`]),
//! explores the partitions that minimize it ([`partitions`]), estimates it
//! by sampling ([`sampling`]) and checks everything against exhaustive
//! enumeration ([`oracle`]).
//!
//! ```
//! use sumrank::counting::{exact_prob_full_sumrank, lower_bound_prob, ratio_string, Scenario};
//! use sumrank::matrix::OrderedPartition;
//!
//! let s = Scenario::new(2, 2, 1, "2,2".parse::<OrderedPartition>()?)?;
//! assert_eq!(ratio_string(&exact_prob_full_sumrank(&s)?), "3/5");
//! assert_eq!(ratio_string(&lower_bound_prob(4, 2, 1, 2)?), "7/15");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The guide under `book/` walks through the mathematics; its code
//! listings are compiled and run as doctests of this crate.

pub mod cli;
pub mod counting;
pub mod field;
pub mod matrix;
pub mod oracle;
pub mod partitions;
pub mod report;
pub mod sampling;

pub use counting::{ExactInt, ExactRatio, Scenario};
pub use field::{FieldSpec, FqElem};
pub use matrix::{FqMatrix, OrderedPartition};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        };
    }
    chapter!(introduction, "introduction.md");
    chapter!(fields, "fields.md");
    chapter!(sum_rank, "sum-rank.md");
    chapter!(counting, "counting.md");
    chapter!(partitions, "partitions.md");
    chapter!(probability, "probability.md");
    chapter!(bounds, "bounds.md");
    chapter!(sampling, "sampling.md");
    chapter!(oracle, "oracle.md");
    chapter!(cli, "cli.md");
}
