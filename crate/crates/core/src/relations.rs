//! Presentations of `M_n(Z/NZ)` and of its minus quotient by relation
//! vectors over the canonical symbol basis.
//!
//! The blow-up relation for a tuple `(a_1..a_k, b_1..b_{n-k})` reads
//!
//! ```text
//! <a, b> = sum_i <a_1 - a_i, ..., a_i, ..., a_k - a_i, b>
//! ```
//!
//! with `a_i` kept in the `i`th slot. Since `a_j = (a_j - a_i) + a_i`, every
//! tuple on the right spans the same subgroup as the left-hand tuple.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::linalg::{Echelon, SparseMat, SparseVec};
use crate::qz::QZElem;
use crate::sum::IntSum;
use crate::symbol::{enumerate_symbols, Symbol, SymbolError};

/// How the generation precondition of a relation is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMode {
    /// The tuple must generate a nontrivial subgroup of Q/Z; the ambient
    /// group is whatever it generates.
    QmodZ,
    /// The tuple must generate exactly `(1/N)Z/Z`.
    Fixed(u64),
}

impl GroupMode {
    fn check(self, s: &Symbol) -> Result<(), SymbolError> {
        match self {
            GroupMode::QmodZ if s.is_acceptable() => Ok(()),
            GroupMode::QmodZ => Err(SymbolError::Inacceptable(s.clone())),
            GroupMode::Fixed(m) if s.generates(m) => Ok(()),
            GroupMode::Fixed(m) => Err(SymbolError::NotGenerating {
                symbol: s.clone(),
                modulus: m,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Blowup,
    Minus,
}

/// One relation: a source tuple and the positions it acts on.
///
/// For `Blowup`, `positions` is the `a`-part (at least two positions). For
/// `Minus`, it is the single negated position.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RelationInstance {
    pub source: Vec<QZElem>,
    pub positions: Vec<usize>,
    pub kind: RelationKind,
}

impl RelationInstance {
    pub fn vector(&self, mode: GroupMode) -> Result<IntSum, SymbolError> {
        match self.kind {
            RelationKind::Blowup => blowup_relation(&self.source, &self.positions, mode),
            RelationKind::Minus => {
                let [p] = self.positions[..] else {
                    return Err(SymbolError::BadPositions {
                        positions: self.positions.clone(),
                        arity: self.source.len(),
                    });
                };
                minus_relation(&self.source, p, mode)
            }
        }
    }
}

fn check_positions(positions: &[usize], arity: usize, min: usize) -> Result<(), SymbolError> {
    let bad = || SymbolError::BadPositions {
        positions: positions.to_vec(),
        arity,
    };
    if positions.len() < min || positions.iter().any(|&p| p >= arity) {
        return Err(bad());
    }
    let distinct: HashSet<usize> = positions.iter().copied().collect();
    if distinct.len() != positions.len() {
        return Err(bad());
    }
    Ok(())
}

/// The vector `LHS - RHS` of the blow-up relation on `tuple` with the given
/// `a`-positions (`k = positions.len()`, `2 <= k <= n`).
pub fn blowup_relation(
    tuple: &[QZElem],
    positions: &[usize],
    mode: GroupMode,
) -> Result<IntSum, SymbolError> {
    let lhs = Symbol::canonicalize(tuple.to_vec())?;
    check_positions(positions, tuple.len(), 2)?;
    mode.check(&lhs)?;
    let n = tuple.len();
    let mut out = IntSum::from_symbol(lhs);
    let minus_one = -BigInt::one();
    for &i in positions {
        let ai = tuple[i];
        let rhs: Vec<QZElem> = (0..n)
            .map(|j| {
                if j != i && positions.contains(&j) {
                    tuple[j].sub(&ai)
                } else {
                    tuple[j]
                }
            })
            .collect();
        out.add_term(Symbol::from_tuple(rhs), &minus_one);
    }
    Ok(out)
}

/// `<..., -a_p, ...> + <..., a_p, ...>`, the minus-quotient relation.
pub fn minus_relation(tuple: &[QZElem], position: usize, mode: GroupMode) -> Result<IntSum, SymbolError> {
    let s = Symbol::canonicalize(tuple.to_vec())?;
    check_positions(&[position], tuple.len(), 1)?;
    mode.check(&s)?;
    let mut flipped = tuple.to_vec();
    flipped[position] = flipped[position].neg();
    let mut out = IntSum::from_symbol(s);
    out.add_term(Symbol::from_tuple(flipped), &BigInt::one());
    Ok(out)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Relation instances attached to one basis symbol, in a fixed order.
pub fn instances_for(s: &Symbol, minus: bool) -> Vec<RelationInstance> {
    let n = s.arity();
    let mut out = Vec::new();
    for k in 2..=n {
        for pos in subsets(n, k) {
            out.push(RelationInstance {
                source: s.entries().to_vec(),
                positions: pos,
                kind: RelationKind::Blowup,
            });
        }
    }
    if minus {
        for p in 0..n {
            out.push(RelationInstance {
                source: s.entries().to_vec(),
                positions: vec![p],
                kind: RelationKind::Minus,
            });
        }
    }
    out
}

/// A presentation matrix: rows are relation vectors in the coordinates of
/// `basis`.
#[derive(Debug, Clone)]
pub struct RelationMatrix {
    pub n: usize,
    pub modulus: u64,
    pub minus: bool,
    basis: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
    matrix: SparseMat,
    instances: Vec<RelationInstance>,
}

impl RelationMatrix {
    pub fn basis(&self) -> &[Symbol] {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMat {
        &self.matrix
    }

    /// The instance that produced each row (first occurrence after dedup).
    pub fn instances(&self) -> &[RelationInstance] {
        &self.instances
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Coordinates of a formal sum, or `None` if it leaves the basis.
    pub fn coordinates(&self, x: &IntSum) -> Option<SparseVec> {
        let mut entries = Vec::with_capacity(x.len());
        for (s, c) in x {
            entries.push((self.index_of(s)?, c.clone()));
        }
        Some(SparseVec::from_entries(entries))
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::from_matrix(&self.matrix)
    }
}

fn basis_index(basis: &[Symbol]) -> HashMap<Symbol, usize> {
    basis.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()
}

/// Builds the presentation of `M_n(Z/NZ)` (or of `M_n^-(Z/NZ)` when `minus`).
///
/// Rows are generated per basis symbol in parallel, then deduplicated by
/// vector equality keeping the first occurrence in basis order, so the
/// output does not depend on scheduling. Zero vectors are dropped.
pub fn relation_matrix(n: usize, modulus: u64, minus: bool) -> Result<RelationMatrix, SymbolError> {
    let basis = enumerate_symbols(n, modulus)?;
    let index = basis_index(&basis);
    let mode = GroupMode::Fixed(modulus);
    let per_symbol: Vec<Vec<(RelationInstance, SparseVec)>> = basis
        .par_iter()
        .map(|s| {
            instances_for(s, minus)
                .into_iter()
                .map(|inst| {
                    let v = inst.vector(mode).expect("basis symbols generate Z/NZ");
                    let coords = v
                        .iter()
                        .map(|(t, c)| (index[t], c.clone()))
                        .collect::<Vec<_>>();
                    (inst, SparseVec::from_entries(coords))
                })
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    let mut instances = Vec::new();
    for (inst, row) in per_symbol.into_iter().flatten() {
        if row.is_zero() || !seen.insert(row.clone()) {
            continue;
        }
        rows.push(row);
        instances.push(inst);
    }
    let matrix = SparseMat::from_rows(basis.len(), rows).expect("indices come from the basis");
    Ok(RelationMatrix {
        n,
        modulus,
        minus,
        basis,
        index,
        matrix,
        instances,
    })
}

/// Feeds deduplicated relation rows straight into an eliminator without
/// materializing the matrix; returns `(basis size, relation rank)`.
pub fn relation_rank_streaming(n: usize, modulus: u64, minus: bool) -> Result<(usize, usize), SymbolError> {
    let basis = enumerate_symbols(n, modulus)?;
    let index = basis_index(&basis);
    let mode = GroupMode::Fixed(modulus);
    let mut e = Echelon::new(basis.len());
    let mut seen = HashSet::new();
    for s in &basis {
        for inst in instances_for(s, minus) {
            let v = inst.vector(mode)?;
            let row = SparseVec::from_entries(v.iter().map(|(t, c)| (index[t], c.clone())));
            if row.is_zero() || !seen.insert(row.clone()) {
                continue;
            }
            e.insert(row).expect("indices come from the basis");
        }
    }
    Ok((basis.len(), e.rank()))
}
