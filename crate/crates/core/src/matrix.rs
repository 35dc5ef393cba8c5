//! Dense matrices over `F_q`, ordered partitions of the column index set,
//! and the sum-rank weight.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldError, FieldSpec, FqElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("partition sums to {partition} but the matrix has {cols} columns")]
    PartitionMismatch { partition: usize, cols: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An ordered partition `(n_1, ..., n_l)` of `n` into positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedPartition {
    parts: Vec<usize>,
    n: usize,
}

impl OrderedPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self, MatrixError> {
        if parts.is_empty() {
            return Err(MatrixError::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(MatrixError::InvalidPartition(format!("zero part in {parts:?}")));
        }
        let n = parts.iter().sum();
        Ok(OrderedPartition { parts, n })
    }

    /// The one-part partition `(n)`.
    pub fn single(n: usize) -> Result<Self, MatrixError> {
        Self::new(vec![n])
    }

    /// `(t, ..., t, n - (l-1)t)`, the partition with `l - 1` parts equal to
    /// `t` followed by the remainder.
    pub fn extremal(n: usize, ell: usize, t: usize) -> Result<Self, MatrixError> {
        if ell == 0 || t == 0 || n < ell * t {
            return Err(MatrixError::InvalidPartition(format!(
                "no extremal partition for n={n}, l={ell}, t={t}"
            )));
        }
        let mut parts = vec![t; ell - 1];
        parts.push(n - (ell - 1) * t);
        Self::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `n`, the sum of the parts.
    pub fn total(&self) -> usize {
        self.n
    }

    /// `l`, the number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_part(&self) -> usize {
        *self.parts.iter().min().expect("nonempty")
    }

    pub fn max_part(&self) -> usize {
        *self.parts.iter().max().expect("nonempty")
    }

    /// Whether the multiset of parts equals `{t (l-1 times), n - (l-1)t}`.
    pub fn is_extremal_for(&self, t: usize) -> bool {
        let ell = self.len();
        if t == 0 || self.n < ell * t {
            return false;
        }
        let mut sorted = self.parts.clone();
        sorted.sort_unstable();
        let big = self.n - (ell - 1) * t;
        sorted[..ell - 1].iter().all(|&p| p == t) && sorted[ell - 1] == big
    }

    /// Column ranges `[start, end)` of each block.
    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.parts.iter().scan(0, |start, &len| {
            let r = *start..*start + len;
            *start += len;
            Some(r)
        })
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for OrderedPartition {
    type Err = MatrixError;

    /// Parses `a,b,c`, with or without surrounding parentheses.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| MatrixError::InvalidPartition(format!("cannot parse {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parts)
    }
}

/// A dense `m x n` matrix over `F_q`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct FqMatrix {
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    entries: Vec<FqElem>,
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqMatrix(q={}, {}x{}) [", self.field.order(), self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<_> = self.row(r).iter().map(|&e| self.field.encode(e)).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl FqMatrix {
    pub fn new(field: Arc<FieldSpec>, rows: usize, cols: usize, entries: Vec<FqElem>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Shape(format!("{rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::Shape(format!("{} entries for {rows}x{cols}", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| e.index() as u64 >= field.order()) {
            return Err(FieldError::InvalidElement(bad.index().to_string()).into());
        }
        Ok(FqMatrix { field, rows, cols, entries })
    }

    /// Build from packed element indices.
    pub fn from_indices(field: Arc<FieldSpec>, rows: usize, cols: usize, idx: &[u32]) -> Result<Self, MatrixError> {
        let entries = idx
            .iter()
            .map(|&i| field.elem(i as u64))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, rows, cols, entries)
    }

    pub fn zeros(field: Arc<FieldSpec>, rows: usize, cols: usize) -> Result<Self, MatrixError> {
        Self::new(field, rows, cols, vec![FqElem::ZERO; rows * cols])
    }

    pub fn identity(field: Arc<FieldSpec>, n: usize) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(field, n, n)?;
        for i in 0..n {
            m.entries[i * n + i] = FqElem::ONE;
        }
        Ok(m)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FqElem {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[FqElem] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FqElem] {
        &self.entries
    }

    pub fn column(&self, c: usize) -> Vec<FqElem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            entries.extend((0..self.rows).map(|r| self.get(r, c)));
        }
        FqMatrix { field: self.field.clone(), rows: self.cols, cols: self.rows, entries }
    }

    pub fn mul(&self, rhs: &FqMatrix) -> Result<FqMatrix, MatrixError> {
        if self.cols != rhs.rows || self.field != rhs.field {
            return Err(MatrixError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut entries = vec![FqElem::ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let e = &mut entries[i * rhs.cols + j];
                    *e = f.add(*e, f.mul(a, rhs.get(k, j)));
                }
            }
        }
        Ok(FqMatrix { field: f.clone(), rows: self.rows, cols: rhs.cols, entries })
    }

    /// Columns `range` as a new matrix.
    pub fn column_slice(&self, range: std::ops::Range<usize>) -> FqMatrix {
        let cols = range.len();
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(&self.row(r)[range.clone()]);
        }
        FqMatrix { field: self.field.clone(), rows: self.rows, cols, entries }
    }

    /// Horizontal concatenation.
    pub fn hconcat(blocks: &[FqMatrix]) -> Result<FqMatrix, MatrixError> {
        let first = blocks.first().ok_or_else(|| MatrixError::Shape("no blocks".into()))?;
        if blocks.iter().any(|b| b.rows != first.rows || b.field != first.field) {
            return Err(MatrixError::Shape("blocks disagree on rows or field".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut entries = Vec::with_capacity(first.rows * cols);
        for r in 0..first.rows {
            for b in blocks {
                entries.extend_from_slice(b.row(r));
            }
        }
        Ok(FqMatrix { field: first.field.clone(), rows: first.rows, cols, entries })
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// Parse the text format: a header line `q m n`, then `m` lines of `n`
    /// entries. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<FqMatrix, MatrixError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| MatrixError::Parse("empty input".into()))?;
        let nums = header
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| MatrixError::Parse(format!("bad header {header:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let [q, m, n] = nums[..] else {
            return Err(MatrixError::Parse(format!("header must be `q m n`, got {header:?}")));
        };
        let field = Arc::new(FieldSpec::new(q)?);
        let (m, n) = (m as usize, n as usize);
        let mut entries = Vec::with_capacity(m * n);
        for r in 0..m {
            let line = lines.next().ok_or_else(|| MatrixError::Parse(format!("missing row {r}")))?;
            let row: Vec<_> = line.split_whitespace().collect();
            if row.len() != n {
                return Err(MatrixError::Parse(format!("row {r} has {} entries, expected {n}", row.len())));
            }
            for tok in row {
                entries.push(field.decode(tok)?);
            }
        }
        if lines.next().is_some() {
            return Err(MatrixError::Parse("trailing rows".into()));
        }
        FqMatrix::new(field, m, n, entries)
    }

    /// Render in the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.field.order(), self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<_> = self.row(r).iter().map(|&e| self.field.encode(e)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Bring `rows` (each of equal length) to reduced row echelon form in place.
/// Returns the pivot column of each nonzero row, in order; the first
/// `pivots.len()` rows are the nonzero ones.
pub(crate) fn rref(field: &FieldSpec, rows: &mut [Vec<FqElem>]) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..width {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let inv = field.inv(rows[next][col]).expect("pivot is nonzero");
        for x in rows[next].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, p));
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Rank by Gaussian elimination with first-nonzero pivoting.
pub fn rank(a: &FqMatrix) -> usize {
    let f = &*a.field;
    let mut rows: Vec<Vec<FqElem>> = (0..a.rows).map(|r| a.row(r).to_vec()).collect();
    let mut rank = 0;
    for col in 0..a.cols {
        let Some(found) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = f.mul(rows[r][col], inv);
            for c in col..a.cols {
                let sub = f.mul(factor, rows[rank][c]);
                rows[r][c] = f.sub(rows[r][c], sub);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Canonical basis of the column space: the nonzero rows of the reduced row
/// echelon form of `A^T`, each a vector of length `m`. Matrices with equal
/// column spaces give identical output.
pub fn column_space_basis(a: &FqMatrix) -> Vec<Vec<FqElem>> {
    let mut cols: Vec<Vec<FqElem>> = (0..a.cols).map(|c| a.column(c)).collect();
    let r = rref(&a.field, &mut cols).len();
    cols.truncate(r);
    cols
}

/// The column blocks of `a` under `p`, as owned copies.
pub fn blocks(a: &FqMatrix, p: &OrderedPartition) -> Result<Vec<FqMatrix>, MatrixError> {
    if p.total() != a.cols {
        return Err(MatrixError::PartitionMismatch { partition: p.total(), cols: a.cols });
    }
    Ok(p.ranges().map(|r| a.column_slice(r)).collect())
}

/// Sum of the ranks of the blocks of `a` under `p`.
pub fn sum_rank_weight(a: &FqMatrix, p: &OrderedPartition) -> Result<usize, MatrixError> {
    Ok(blocks(a, p)?.iter().map(rank).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u64) -> Arc<FieldSpec> {
        Arc::new(FieldSpec::new(q).unwrap())
    }

    fn mat(q: u64, rows: usize, cols: usize, idx: &[u32]) -> FqMatrix {
        FqMatrix::from_indices(field(q), rows, cols, idx).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&FqMatrix::zeros(field(2), 3, 3).unwrap()), 0);
        assert_eq!(rank(&FqMatrix::identity(field(3), 3).unwrap()), 3);
        assert_eq!(rank(&mat(2, 2, 2, &[1, 1, 1, 1])), 1);
        // rows (1,2) and (2,1) over F_3: 2*(1,2) = (2,1), dependent
        assert_eq!(rank(&mat(3, 2, 2, &[1, 2, 2, 1])), 1);
        assert_eq!(rank(&mat(5, 2, 2, &[1, 2, 2, 1])), 2);
    }

    #[test]
    fn column_space_basis_examples() {
        assert!(column_space_basis(&FqMatrix::zeros(field(2), 2, 3).unwrap()).is_empty());
        let id = column_space_basis(&FqMatrix::identity(field(2), 2).unwrap());
        assert_eq!(id, vec![vec![FqElem::ONE, FqElem::ZERO], vec![FqElem::ZERO, FqElem::ONE]]);
        let b = column_space_basis(&mat(2, 2, 2, &[1, 1, 0, 0]));
        assert_eq!(b, vec![vec![FqElem::ONE, FqElem::ZERO]]);
    }

    #[test]
    fn blocks_examples() {
        let a = mat(2, 2, 4, &[1, 0, 1, 1, 0, 1, 0, 1]);
        let p = OrderedPartition::new(vec![2, 2]).unwrap();
        let bs = blocks(&a, &p).unwrap();
        assert_eq!(bs.len(), 2);
        assert!(bs.iter().all(|b| b.rows() == 2 && b.cols() == 2));
        assert_eq!(FqMatrix::hconcat(&bs).unwrap(), a);

        assert_eq!(blocks(&a, &OrderedPartition::single(4).unwrap()).unwrap(), vec![a.clone()]);

        let b = mat(2, 2, 3, &[0; 6]);
        assert_eq!(
            blocks(&b, &p).unwrap_err(),
            MatrixError::PartitionMismatch { partition: 4, cols: 3 }
        );
        assert!(sum_rank_weight(&b, &p).is_err());
    }

    #[test]
    fn sum_rank_weight_examples() {
        let p = OrderedPartition::new(vec![2, 2]).unwrap();
        assert_eq!(sum_rank_weight(&mat(2, 2, 4, &[1, 0, 1, 0, 0, 1, 0, 1]), &p).unwrap(), 4);
        assert_eq!(sum_rank_weight(&FqMatrix::zeros(field(3), 3, 4).unwrap(), &p).unwrap(), 0);
        assert_eq!(sum_rank_weight(&mat(2, 2, 4, &[1, 0, 1, 0, 0, 1, 0, 0]), &p).unwrap(), 3);
    }

    #[test]
    fn partition_basics() {
        assert!(OrderedPartition::new(vec![]).is_err());
        assert!(OrderedPartition::new(vec![2, 0]).is_err());
        let p: OrderedPartition = "2,3,1".parse().unwrap();
        assert_eq!((p.total(), p.len()), (6, 3));
        assert_eq!(p.to_string(), "(2,3,1)");
        assert_eq!("(2,3,1)".parse::<OrderedPartition>().unwrap(), p);
        assert!("2,,1".parse::<OrderedPartition>().is_err());
        assert_eq!(p.ranges().collect::<Vec<_>>(), vec![0..2, 2..5, 5..6]);

        let e = OrderedPartition::extremal(7, 3, 2).unwrap();
        assert_eq!(e.parts(), &[2, 2, 3]);
        assert!(e.is_extremal_for(2));
        assert!("3,2,2".parse::<OrderedPartition>().unwrap().is_extremal_for(2));
        assert!(!"3,3,1".parse::<OrderedPartition>().unwrap().is_extremal_for(2));
        assert!(OrderedPartition::extremal(5, 3, 2).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let f4 = field(4);
        let a = FqMatrix::from_indices(f4, 2, 3, &[0, 1, 2, 3, 2, 1]).unwrap();
        let text = a.to_text();
        assert_eq!(text, "4 2 3\n0:0 1:0 0:1\n1:1 0:1 1:0\n");
        assert_eq!(FqMatrix::parse(&text).unwrap(), a);

        let b = FqMatrix::parse("# comment\n3 2 2\n1 2\n\n0 1\n").unwrap();
        assert_eq!(b.get(0, 1).index(), 2);
        assert!(FqMatrix::parse("3 2 2\n1 2\n").is_err());
        assert!(FqMatrix::parse("3 1 2\n1 3\n").is_err());
        assert!(FqMatrix::parse("6 1 1\n0\n").is_err());
    }

    #[test]
    fn mul_and_transpose() {
        let a = mat(3, 2, 3, &[1, 2, 0, 0, 1, 1]);
        let id = FqMatrix::identity(a.field().clone(), 3).unwrap();
        assert_eq!(a.mul(&id).unwrap(), a);
        assert_eq!(a.transpose().transpose(), a);
        let ata = a.mul(&a.transpose()).unwrap();
        // row0.row0 = 1 + 4 = 5 = 2 mod 3; row0.row1 = 2; row1.row1 = 2
        assert_eq!(ata.entries().iter().map(|e| e.index()).collect::<Vec<_>>(), vec![2, 2, 2, 2]);
    }
}
