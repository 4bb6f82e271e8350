//! Smith normal form over Z.
//!
//! The matrix is first brought to an integer row echelon form with
//! unimodular row operations (the row lattice is unchanged), then the
//! transpose of that is echelonized again, leaving a square nonsingular
//! triangular matrix of size `rank`. The invariant factors of that small
//! matrix are found with the classical pivot/divide loop.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Domain, LinalgError, SparseMat, SparseVec};

pub const DEFAULT_SNF_MAX_COLS: usize = 5000;

#[derive(Debug, Clone, Copy)]
pub struct SnfOptions {
    /// Matrices with more columns than this are refused.
    pub max_cols: usize,
}

impl Default for SnfOptions {
    fn default() -> Self {
        SnfOptions {
            max_cols: DEFAULT_SNF_MAX_COLS,
        }
    }
}

/// Invariant factors `d_1 | d_2 | ...` (all positive, one per unit of rank).
pub fn snf(m: &SparseMat) -> Result<Vec<BigInt>, LinalgError> {
    snf_with(m, SnfOptions::default())
}

pub fn snf_with(m: &SparseMat, opts: SnfOptions) -> Result<Vec<BigInt>, LinalgError> {
    if m.domain() != Domain::Integer {
        return Err(LinalgError::NotIntegral);
    }
    if m.ncols() > opts.max_cols {
        return Err(LinalgError::TooLarge {
            ncols: m.ncols(),
            max: opts.max_cols,
        });
    }
    let h = integer_echelon(m.rows().iter().cloned());
    let ht = SparseMat {
        rows: h,
        ncols: m.ncols(),
        domain: Domain::Integer,
    }
    .transpose();
    let k = integer_echelon(ht.rows().iter().cloned());
    let r = k.len();
    let mut dense = vec![vec![BigInt::zero(); r]; r];
    for (i, row) in k.iter().enumerate() {
        for (c, x) in row.entries() {
            dense[i][*c] = x.clone();
        }
    }
    Ok(dense_snf(dense))
}

/// Hermite-style row echelon form over Z. Rows are returned sorted by
/// leading column, each with a positive leading entry.
pub(crate) fn integer_echelon<I: IntoIterator<Item = SparseVec>>(rows: I) -> Vec<SparseVec> {
    let mut basis: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for mut v in rows {
        loop {
            let Some((c, vc)) = v.lead().map(|(c, x)| (c, x.clone())) else {
                break;
            };
            let Some(p) = basis.get(&c) else {
                let v = if vc.is_negative() { v.scale(&-BigInt::one()) } else { v };
                basis.insert(c, v);
                break;
            };
            let pc = p.get(c).expect("lead").clone();
            let (q, rem) = vc.div_rem(&pc);
            if rem.is_zero() {
                v = v.combine(&BigInt::one(), p, &-q);
            } else {
                // unimodular step (determinant -1): the pivot becomes the gcd row
                let e = pc.extended_gcd(&vc);
                let g = e.gcd;
                let new_p = p.combine(&e.x, &v, &e.y);
                let rest = p.combine(&(&vc / &g), &v, &-(&pc / &g));
                let new_p = if new_p.lead().is_some_and(|(_, x)| x.is_negative()) {
                    new_p.scale(&-BigInt::one())
                } else {
                    new_p
                };
                basis.insert(c, new_p);
                v = rest;
            }
        }
    }
    basis.into_values().collect()
}

fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    for t in 0..n.min(m) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(diag);
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                for j in t..m {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..m {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let d = &q * &row[t];
                    row[j] -= d;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..n).find(|&i| (t + 1..m).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..m {
                        let x = a[i][j].clone();
                        a[t][j] += x;
                    }
                }
                None => {
                    diag.push(p.abs());
                    break;
                }
            }
        }
    }
    finish(diag)
}

fn finish(mut d: Vec<BigInt>) -> Vec<BigInt> {
    // the loop already yields a divisibility chain; this pass is a no-op
    // unless the input bypassed the divisibility check
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}
