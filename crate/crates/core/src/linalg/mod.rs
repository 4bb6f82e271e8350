//! Exact sparse linear algebra over Z and Q.
//!
//! Matrices are stored as lists of sparse integer rows. Rational input is
//! accepted by clearing denominators row by row, which changes neither the
//! rank nor the rational row space.

mod echelon;
mod snf;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use echelon::Echelon;
pub use snf::{snf, snf_with, SnfOptions, DEFAULT_SNF_MAX_COLS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("column index {index} out of range for {ncols} columns")]
    ColumnOutOfRange { index: usize, ncols: usize },
    #[error("vector has dimension {found}, matrix has {expected} columns")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Smith normal form needs an integer matrix")]
    NotIntegral,
    #[error("Smith normal form skipped: {ncols} columns exceeds the threshold {max}")]
    TooLarge { ncols: usize, max: usize },
}

/// A sparse integer vector: `(column, value)` pairs sorted by column, no zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SparseVec(Vec<(usize, BigInt)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    /// Builds from unsorted entries, summing duplicates and dropping zeros.
    pub fn from_entries<I: IntoIterator<Item = (usize, BigInt)>>(entries: I) -> Self {
        let mut v: Vec<(usize, BigInt)> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(v.len());
        for (c, x) in v {
            match out.last_mut() {
                Some((lc, lx)) if *lc == c => *lx += x,
                _ => out.push((c, x)),
            }
        }
        out.retain(|(_, x)| !x.is_zero());
        SparseVec(out)
    }

    pub fn from_dense(values: &[BigInt]) -> Self {
        SparseVec(
            values
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(usize, BigInt)] {
        &self.0
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, col: usize) -> Option<&BigInt> {
        self.0
            .binary_search_by_key(&col, |e| e.0)
            .ok()
            .map(|i| &self.0[i].1)
    }

    pub fn lead(&self) -> Option<(usize, &BigInt)> {
        self.0.first().map(|(c, x)| (*c, x))
    }

    pub fn max_col(&self) -> Option<usize> {
        self.0.last().map(|e| e.0)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: &BigInt, other: &SparseVec, beta: &BigInt) -> SparseVec {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push((a[i].0, alpha * &a[i].1));
                i += 1;
            } else if take_b {
                out.push((b[j].0, beta * &b[j].1));
                j += 1;
            } else {
                let x = alpha * &a[i].1 + beta * &b[j].1;
                if !x.is_zero() {
                    out.push((a[i].0, x));
                }
                i += 1;
                j += 1;
            }
        }
        out.retain(|(_, x)| !x.is_zero());
        SparseVec(out)
    }

    pub fn scale(&self, k: &BigInt) -> SparseVec {
        if k.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(c, x)| (*c, x * k)).collect())
    }

    /// gcd of the entries (zero for the zero vector).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, x) in &self.0 {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and makes the leading entry positive.
    pub fn primitive(mut self) -> SparseVec {
        let g = self.content();
        if g.is_zero() {
            return self;
        }
        let flip = self.0[0].1.is_negative();
        if !g.is_one() || flip {
            let d = if flip { -g } else { g };
            for (_, x) in self.0.iter_mut() {
                *x = &*x / &d;
            }
        }
        self
    }

    /// Clears denominators of a rational vector.
    pub fn from_rational<I: IntoIterator<Item = (usize, BigRational)>>(entries: I) -> SparseVec {
        let v: Vec<(usize, BigRational)> = entries.into_iter().filter(|e| !e.1.is_zero()).collect();
        let l = v
            .iter()
            .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
        SparseVec::from_entries(
            v.into_iter()
                .map(|(c, x)| (c, x.numer() * (&l / x.denom()))),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Integer,
    Rational,
}

/// A sparse matrix given by its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat {
    rows: Vec<SparseVec>,
    ncols: usize,
    domain: Domain,
}

impl SparseMat {
    pub fn new(ncols: usize) -> Self {
        SparseMat {
            rows: Vec::new(),
            ncols,
            domain: Domain::Integer,
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseVec>) -> Result<Self, LinalgError> {
        for r in &rows {
            check_cols(r, ncols)?;
        }
        Ok(SparseMat {
            rows: rows.into_iter().filter(|r| !r.is_zero()).collect(),
            ncols,
            domain: Domain::Integer,
        })
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| SparseVec::from_dense(&r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
            .filter(|r| !r.is_zero())
            .collect();
        SparseMat {
            rows,
            ncols,
            domain: Domain::Integer,
        }
    }

    /// Rational rows; each row is scaled to a primitive integer row.
    pub fn from_rational_rows(
        ncols: usize,
        rows: Vec<Vec<(usize, BigRational)>>,
    ) -> Result<Self, LinalgError> {
        let rows: Vec<SparseVec> = rows.into_iter().map(SparseVec::from_rational).collect();
        let mut m = SparseMat::from_rows(ncols, rows)?;
        m.domain = Domain::Rational;
        Ok(m)
    }

    pub fn push_row(&mut self, row: SparseVec) -> Result<(), LinalgError> {
        check_cols(&row, self.ncols)?;
        if !row.is_zero() {
            self.rows.push(row);
        }
        Ok(())
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseVec::nnz).sum()
    }

    pub fn permute_rows(&self, perm: &[usize]) -> SparseMat {
        assert_eq!(perm.len(), self.rows.len());
        SparseMat {
            rows: perm.iter().map(|&i| self.rows[i].clone()).collect(),
            ncols: self.ncols,
            domain: self.domain,
        }
    }

    pub fn transpose(&self) -> SparseMat {
        let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, x) in r.entries() {
                cols[*c].push((i, x.clone()));
            }
        }
        SparseMat {
            rows: cols
                .into_iter()
                .map(SparseVec)
                .filter(|r| !r.is_zero())
                .collect(),
            ncols: self.rows.len(),
            domain: self.domain,
        }
    }

    /// Coordinate-list text, one `row col value` triple per line.
    pub fn to_coordinate_list(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (c, x) in r.entries() {
                let _ = writeln!(s, "{i} {c} {x}");
            }
        }
        s
    }
}

fn check_cols(r: &SparseVec, ncols: usize) -> Result<(), LinalgError> {
    match r.max_col() {
        Some(c) if c >= ncols => Err(LinalgError::ColumnOutOfRange { index: c, ncols }),
        _ => Ok(()),
    }
}

/// Rank over Q.
pub fn rank_q(m: &SparseMat) -> usize {
    Echelon::from_matrix(m).rank()
}

/// Whether `v` (dense, rational) lies in the rational row space of `m`.
pub fn in_span(v: &[BigRational], m: &SparseMat) -> Result<bool, LinalgError> {
    if v.len() != m.ncols() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.ncols(),
            found: v.len(),
        });
    }
    let sv = SparseVec::from_rational(v.iter().cloned().enumerate());
    Echelon::from_matrix(m).contains(&sv)
}
