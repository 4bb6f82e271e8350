//! The integral group ring `Z[Q/Z]` with basis `e(r)` and its Bost–Connes
//! endomorphisms, used as an arity-one oracle for the symbol operators.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qz::{torsion_points, QZElem};
use crate::sum::IntSum;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupRingError {
    #[error("the bridge is defined on arity 1 only, got arity {0}")]
    Arity(usize),
    #[error("parameter must be at least 1")]
    ZeroParameter,
}

/// A finitely supported combination of basis elements `e(r)`; zero
/// coefficients are never stored. `e(0)` is the unit.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GroupRingElem {
    terms: BTreeMap<QZElem, BigInt>,
}

impl GroupRingElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(r: QZElem) -> Self {
        let mut x = Self::zero();
        x.add_term(r, &BigInt::one());
        x
    }

    pub fn unit() -> Self {
        Self::basis(QZElem::ZERO)
    }

    pub fn add_term(&mut self, r: QZElem, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(r).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&r);
        }
    }

    pub fn coeff(&self, r: &QZElem) -> BigInt {
        self.terms.get(r).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QZElem, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for (r, v) in &self.terms {
            out.add_term(*r, &(v * c));
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, v) in &other.terms {
            out.add_term(*r, v);
        }
        out
    }

    /// Convolution product `e(r) e(s) = e(r + s)`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (r, a) in &self.terms {
            for (s, b) in &other.terms {
                out.add_term(r.add(s), &(a * b));
            }
        }
        out
    }
}

/// `e(r) -> e(n r)`.
pub fn gr_sigma(n: u64, x: &GroupRingElem) -> Result<GroupRingElem, GroupRingError> {
    if n == 0 {
        return Err(GroupRingError::ZeroParameter);
    }
    let mut out = GroupRingElem::zero();
    for (r, c) in x.iter() {
        out.add_term(r.scale(n as i64), c);
    }
    Ok(out)
}

/// `e(r) -> sum over n s = r of e(s)`.
pub fn gr_rho(n: u64, x: &GroupRingElem) -> Result<GroupRingElem, GroupRingError> {
    if n == 0 {
        return Err(GroupRingError::ZeroParameter);
    }
    let mut out = GroupRingElem::zero();
    for (r, c) in x.iter() {
        for s in r.preimages(n) {
            out.add_term(s, c);
        }
    }
    Ok(out)
}

/// `e(r) -> sum over n t = 0 of e(r + t)`.
pub fn gr_torsion_shift(n: u64, x: &GroupRingElem) -> Result<GroupRingElem, GroupRingError> {
    if n == 0 {
        return Err(GroupRingError::ZeroParameter);
    }
    let tors = torsion_points(n);
    let mut out = GroupRingElem::zero();
    for (r, c) in x.iter() {
        for t in &tors {
            out.add_term(r.add(t), c);
        }
    }
    Ok(out)
}

/// `<a> -> e(a)` on arity-one sums. Not unital: `e(0)` has no preimage.
pub fn bridge(x: &IntSum) -> Result<GroupRingElem, GroupRingError> {
    if x.arity() != 1 {
        return Err(GroupRingError::Arity(x.arity()));
    }
    let mut out = GroupRingElem::zero();
    for (s, c) in x {
        out.add_term(s.entries()[0], c);
    }
    Ok(out)
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "e({r})")?;
            } else {
                write!(f, "({c})e({r})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElem({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    e: QZElem,
    c: BigIntWire,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BigIntWire {
    Small(i64),
    Big(String),
}

impl Serialize for GroupRingElem {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<WireTerm> = self
            .terms
            .iter()
            .map(|(r, c)| WireTerm {
                e: *r,
                c: i64::try_from(c).map_or_else(|_| BigIntWire::Big(c.to_string()), BigIntWire::Small),
            })
            .collect();
        terms.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GroupRingElem {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let terms = Vec::<WireTerm>::deserialize(de)?;
        let mut out = GroupRingElem::zero();
        for t in terms {
            let c = match t.c {
                BigIntWire::Small(v) => BigInt::from(v),
                BigIntWire::Big(s) => s.parse().map_err(serde::de::Error::custom)?,
            };
            out.add_term(t.e, &c);
        }
        Ok(out)
    }
}
