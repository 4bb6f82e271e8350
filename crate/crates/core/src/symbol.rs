//! Canonical modular symbols `<a_1, ..., a_n>` with entries in Q/Z.
//!
//! Permutation invariance is absorbed into the representation: a [`Symbol`]
//! always holds its entries sorted ascending by rational value, so two tuples
//! that differ by a permutation are the same value.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::qz::QZElem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("a symbol needs at least one entry")]
    Empty,
    #[error("modulus N = {0} is excluded: the trivial group has no symbols")]
    TrivialGroup(u64),
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("symbol {0} is not acceptable: its entries are all zero")]
    Inacceptable(Symbol),
    #[error("entries of {symbol} do not generate Z/{modulus}Z")]
    NotGenerating { symbol: Symbol, modulus: u64 },
    #[error("invalid position subset {positions:?} for arity {arity}")]
    BadPositions { positions: Vec<usize>, arity: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
}

/// A canonical (sorted) tuple of Q/Z elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Vec<QZElem>);

impl Symbol {
    /// Sorts an arbitrary tuple into canonical form.
    pub fn canonicalize(mut entries: Vec<QZElem>) -> Result<Symbol, SymbolError> {
        if entries.is_empty() {
            return Err(SymbolError::Empty);
        }
        entries.sort_unstable();
        Ok(Symbol(entries))
    }

    /// Crate-internal constructor for tuples that are known to be nonempty.
    pub(crate) fn from_tuple(mut entries: Vec<QZElem>) -> Symbol {
        debug_assert!(!entries.is_empty());
        entries.sort_unstable();
        Symbol(entries)
    }

    pub fn entries(&self) -> &[QZElem] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// lcm of the entry orders: the order of the cyclic group the entries generate.
    pub fn modulus(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, a| acc.lcm(&a.order()))
    }

    /// Q/Z acceptability: the entries generate a nontrivial group.
    pub fn is_acceptable(&self) -> bool {
        self.0.iter().any(|a| !a.is_zero())
    }

    /// Fixed-group membership: every entry lies in `(1/N)Z/Z` and together
    /// they generate all of it.
    pub fn generates(&self, modulus: u64) -> bool {
        self.0.iter().all(|a| modulus.is_multiple_of(a.order())) && self.modulus() == modulus
    }

    pub fn is_zero_tuple(&self) -> bool {
        !self.is_acceptable()
    }

    /// Entrywise multiplication by `k`, re-sorted. May produce the zero tuple.
    pub fn scale(&self, k: i64) -> Symbol {
        Symbol::from_tuple(self.0.iter().map(|a| a.scale(k)).collect())
    }

    /// Concatenation of two symbols, re-sorted.
    pub fn concat(&self, other: &Symbol) -> Symbol {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Symbol::from_tuple(v)
    }

    /// Sub-tuple at the given positions (positions refer to the canonical order).
    pub fn select(&self, positions: &[usize]) -> Vec<QZElem> {
        positions.iter().map(|&p| self.0[p]).collect()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<QZElem>::deserialize(d)?;
        Symbol::canonicalize(v).map_err(serde::de::Error::custom)
    }
}

/// Free function form of [`Symbol::canonicalize`].
pub fn canonicalize(tuple: &[QZElem]) -> Result<Symbol, SymbolError> {
    Symbol::canonicalize(tuple.to_vec())
}

/// All canonical symbols of arity `n` whose entries generate `(1/N)Z/Z`,
/// i.e. the basis of the free module underlying `M_n(Z/NZ)`.
///
/// The output is sorted by [`Symbol`]'s order, which for a fixed `N` is the
/// lexicographic order on nondecreasing residue sequences.
pub fn enumerate_symbols(n: usize, modulus: u64) -> Result<Vec<Symbol>, SymbolError> {
    if n == 0 {
        return Err(SymbolError::ZeroArity);
    }
    if modulus < 2 {
        return Err(SymbolError::TrivialGroup(modulus));
    }
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n);
    enumerate_rec(n, modulus, 0, &mut stack, &mut out);
    Ok(out)
}

fn enumerate_rec(n: usize, m: u64, start: u64, stack: &mut Vec<u64>, out: &mut Vec<Symbol>) {
    if stack.len() == n {
        let g = stack.iter().fold(m, |g, &r| g.gcd(&r));
        if g == 1 {
            out.push(Symbol(
                stack.iter().map(|&r| QZElem::from_residue(r, m)).collect(),
            ));
        }
        return;
    }
    for r in start..m {
        stack.push(r);
        enumerate_rec(n, m, r, stack, out);
        stack.pop();
    }
}

/// Result of reducing a symbol modulo `<-a_1, a_2, ...> = -<a_1, a_2, ...>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinusForm {
    /// The symbol equals `sign * representative` in the minus quotient.
    Signed(Symbol, i8),
    /// The representative is reachable with both parities, so `2 S = 0`.
    TwoTorsion(Symbol),
}

impl MinusForm {
    pub fn representative(&self) -> &Symbol {
        match self {
            MinusForm::Signed(s, _) | MinusForm::TwoTorsion(s) => s,
        }
    }
}

/// Sign-canonical form under entrywise negations.
///
/// Scans all `2^n` negation patterns and keeps the least canonical tuple;
/// the sign records the parity of the flips that reach it.
pub fn minus_canonicalize(s: &Symbol) -> MinusForm {
    let n = s.arity();
    assert!(n < 32, "arity too large for sign enumeration");
    let mut best: Option<Symbol> = None;
    let mut parities = [false; 2];
    for mask in 0u32..(1u32 << n) {
        let t = Symbol::from_tuple(
            s.0.iter()
                .enumerate()
                .map(|(i, a)| if mask >> i & 1 == 1 { a.neg() } else { *a })
                .collect(),
        );
        let parity = (mask.count_ones() % 2) as usize;
        match &best {
            Some(b) if t > *b => {}
            Some(b) if t == *b => parities[parity] = true,
            _ => {
                best = Some(t);
                parities = [false; 2];
                parities[parity] = true;
            }
        }
    }
    let best = best.expect("at least one pattern");
    if parities[0] && parities[1] {
        MinusForm::TwoTorsion(best)
    } else if parities[0] {
        MinusForm::Signed(best, 1)
    } else {
        MinusForm::Signed(best, -1)
    }
}

/// The symbol attached to a lattice datum, read off from the coefficients of
/// the character in a chosen basis of the lattice.
///
/// The induced map on the dual lattice is surjective exactly when the
/// coefficients are not all zero.
pub fn symbol_from_lattice(chi_coeffs: &[QZElem]) -> Result<Symbol, SymbolError> {
    let s = canonicalize(chi_coeffs)?;
    if !s.is_acceptable() {
        return Err(SymbolError::Inacceptable(s));
    }
    Ok(s)
}

/// Parses a symbol from `"p/q"` strings.
pub fn parse_symbol(entries: &[&str]) -> Result<Symbol, String> {
    let v: Result<Vec<QZElem>, _> = entries.iter().map(|e| e.parse::<QZElem>()).collect();
    Symbol::canonicalize(v.map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

/// Euler's totient, used by tests and rank reports.
pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|&r| r.gcd(&n) == 1).count() as u64
}
