//! Formal sums of canonical symbols, the elements of `M_n(Q/Z)` before
//! relations are imposed.

use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{AddAssign, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::symbol::{Symbol, SymbolError};

/// Coefficient rings for formal sums: the integers or the rationals.
pub trait Coeff:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + From<BigInt>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self {
        Self::from(BigInt::from(v))
    }
}

impl Coeff for BigInt {}
impl Coeff for BigRational {}

pub type IntSum = FormalSum<BigInt>;
pub type RatSum = FormalSum<BigRational>;

/// A finite linear combination of symbols of one arity. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq)]
pub struct FormalSum<C> {
    arity: usize,
    terms: BTreeMap<Symbol, C>,
}

impl<C: Coeff> FormalSum<C> {
    pub fn zero(arity: usize) -> Self {
        FormalSum {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_symbol(s: Symbol) -> Self {
        let mut out = Self::zero(s.arity());
        out.terms.insert(s, C::one());
        out
    }

    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self, SymbolError>
    where
        I: IntoIterator<Item = (C, Symbol)>,
    {
        let mut out = Self::zero(arity);
        for (c, s) in terms {
            if s.arity() != arity {
                return Err(SymbolError::ArityMismatch {
                    expected: arity,
                    found: s.arity(),
                });
            }
            out.add_term(s, &c);
        }
        Ok(out)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Symbol, C> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &Symbol) -> C {
        self.terms.get(s).cloned().unwrap_or_else(C::zero)
    }

    /// Adds `c * s`, dropping the entry if it cancels.
    ///
    /// Panics on an arity mismatch; callers that take untrusted input go
    /// through [`FormalSum::from_terms`].
    pub fn add_term(&mut self, s: Symbol, c: &C) {
        assert_eq!(s.arity(), self.arity, "arity mismatch in formal sum");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &C) {
        assert_eq!(self.arity, other.arity, "arity mismatch in formal sum");
        for (s, v) in &other.terms {
            self.add_term(s.clone(), &(v.clone() * c));
        }
    }

    pub fn scaled(&self, c: &C) -> Self {
        let mut out = Self::zero(self.arity);
        out.add_assign_scaled(self, c);
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &C::one());
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-C::one());
        out
    }

    /// Drops every term supported on the all-zero tuple.
    pub fn drop_zero_tuples(mut self) -> Self {
        self.terms.retain(|s, _| s.is_acceptable());
        self
    }

    /// Moduli of the symbols in the support.
    pub fn moduli(&self) -> Vec<u64> {
        let mut m: Vec<u64> = self.terms.keys().map(|s| s.modulus()).collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FormalSum<D> {
        let mut out = FormalSum::zero(self.arity);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), &f(c));
        }
        out
    }
}

impl FormalSum<BigInt> {
    pub fn to_rational(&self) -> FormalSum<BigRational> {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }
}

impl<'a, C> IntoIterator for &'a FormalSum<C> {
    type Item = (&'a Symbol, &'a C);
    type IntoIter = btree_map::Iter<'a, Symbol, C>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<C: Coeff> fmt::Display for FormalSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "({c}){s}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for FormalSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalSum[n={}]({self})", self.arity)
    }
}

/// A formal sum whose coefficient ring is only known at run time, as when
/// it is read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySum {
    Int(IntSum),
    Rat(RatSum),
}

impl AnySum {
    pub fn arity(&self) -> usize {
        match self {
            AnySum::Int(s) => s.arity(),
            AnySum::Rat(s) => s.arity(),
        }
    }
}
