use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::{check_cols, LinalgError, SparseMat, SparseVec};

/// Incremental fraction-free row echelon basis over Q.
///
/// Each stored row is primitive and vanishes on the pivot columns of every
/// row inserted before it. Reducing a vector against the rows in insertion
/// order therefore never reintroduces an earlier pivot, and all arithmetic
/// stays in Z: `v <- p_c * v - v_c * p` followed by content removal.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_of_col: HashMap<usize, usize>,
    col_weight: Vec<u32>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_of_col: HashMap::new(),
            col_weight: vec![0; ncols],
        }
    }

    /// Eliminates the rows of `m`, sparsest rows first.
    pub fn from_matrix(m: &SparseMat) -> Self {
        let mut order: Vec<usize> = (0..m.nrows()).collect();
        order.sort_by_key(|&i| m.rows()[i].nnz());
        let mut e = Echelon::new(m.ncols());
        for r in m.rows() {
            for (c, _) in r.entries() {
                e.col_weight[*c] += 1;
            }
        }
        for i in order {
            e.insert_unchecked(m.rows()[i].clone());
        }
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: SparseVec) -> SparseVec {
        let mut v = v.primitive();
        let mut heap: BinaryHeap<Reverse<usize>> = v
            .entries()
            .iter()
            .filter_map(|(c, _)| self.pivot_of_col.get(c).map(|&i| Reverse(i)))
            .collect();
        let mut last = None;
        while let Some(Reverse(i)) = heap.pop() {
            if last == Some(i) {
                continue;
            }
            last = Some(i);
            let pc = self.pivots[i];
            let Some(vc) = v.get(pc).cloned() else {
                continue;
            };
            let row = &self.rows[i];
            let rc = row.get(pc).expect("pivot entry present");
            let g = rc.gcd(&vc);
            let (alpha, beta) = (rc / &g, -(&vc / &g));
            v = v.combine(&alpha, row, &beta).primitive();
            for (c, _) in row.entries() {
                if let Some(&j) = self.pivot_of_col.get(c) {
                    if j > i {
                        heap.push(Reverse(j));
                    }
                }
            }
        }
        v
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn insert(&mut self, v: SparseVec) -> Result<bool, LinalgError> {
        check_cols(&v, self.ncols)?;
        Ok(self.insert_unchecked(v))
    }

    fn insert_unchecked(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        if r.is_zero() {
            return false;
        }
        // Markowitz-style choice: smallest magnitude, then lightest column.
        let (pc, _) = r
            .entries()
            .iter()
            .min_by(|(ca, xa), (cb, xb)| {
                xa.abs()
                    .cmp(&xb.abs())
                    .then(self.col_weight[*ca].cmp(&self.col_weight[*cb]))
                    .then(ca.cmp(cb))
            })
            .map(|(c, x)| (*c, x.clone()))
            .expect("nonzero row");
        self.pivot_of_col.insert(pc, self.rows.len());
        self.pivots.push(pc);
        self.rows.push(r);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> Result<bool, LinalgError> {
        check_cols(v, self.ncols)?;
        Ok(self.reduce(v.clone()).is_zero())
    }

    /// Whether `v` is a rational combination of the basis, for `v` given as a
    /// column-indexed integer map.
    pub fn contains_entries<I: IntoIterator<Item = (usize, BigInt)>>(
        &self,
        entries: I,
    ) -> Result<bool, LinalgError> {
        self.contains(&SparseVec::from_entries(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn dense_rank_oracle(rows: &[Vec<i64>]) -> usize {
        // textbook Gauss-Jordan over BigRational
        use num_rational::BigRational;
        let mut m: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&i| m[i][c] != BigRational::from_integer(0.into()))
            else {
                continue;
            };
            m.swap(rank, p);
            for i in 0..m.len() {
                if i != rank {
                    let f = &m[i][c] / &m[rank][c];
                    let pivot_row = m[rank].clone();
                    for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn insert_reports_growth() {
        let mut e = Echelon::new(3);
        let v = |a: &[i64]| SparseVec::from_dense(&a.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        assert!(e.insert(v(&[1, 1, 0])).unwrap());
        assert!(e.insert(v(&[0, 1, 1])).unwrap());
        assert!(!e.insert(v(&[2, 0, -2])).unwrap());
        assert!(e.contains(&v(&[1, 0, -1])).unwrap());
        assert!(!e.contains(&v(&[0, 0, 1])).unwrap());
        assert!(e.insert(v(&[0, 0, 0, 1])).is_err());
    }

    proptest! {
        #[test]
        fn rank_matches_dense_oracle(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 0..7)) {
            let m = SparseMat::from_dense(&rows);
            let expected = dense_rank_oracle(&rows);
            prop_assert_eq!(Echelon::from_matrix(&m).rank(), expected);
        }

        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            rows in prop::collection::vec(prop::collection::vec(-3i64..4, 6), 1..8),
            seed in 0u64..1000,
            k in 1i64..5,
        ) {
            let m = SparseMat::from_dense(&rows);
            let n = m.nrows();
            let mut perm: Vec<usize> = (0..n).collect();
            // deterministic shuffle from the seed
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let scaled: Vec<SparseVec> = m.permute_rows(&perm).rows().iter()
                .enumerate()
                .map(|(i, r)| r.scale(&BigInt::from(if i % 2 == 0 { k } else { -k })))
                .collect();
            let m2 = SparseMat::from_rows(m.ncols(), scaled).unwrap();
            prop_assert_eq!(Echelon::from_matrix(&m).rank(), Echelon::from_matrix(&m2).rank());
        }

        #[test]
        fn rows_are_in_span(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..6),
                            coeffs in prop::collection::vec(-3i64..4, 6)) {
            let m = SparseMat::from_dense(&rows);
            let e = Echelon::from_matrix(&m);
            let mut acc = SparseVec::new();
            for (r, c) in m.rows().iter().zip(coeffs.iter()) {
                acc = acc.combine(&BigInt::from(1), r, &BigInt::from(*c));
            }
            prop_assert!(e.contains(&acc).unwrap());
        }
    }
}
