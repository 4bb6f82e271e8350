//! Exact arithmetic in Q/Z.
//!
//! Every element is stored as a reduced fraction `num/den` with
//! `0 <= num < den`, so equality is structural and the order of the element
//! in Q/Z is simply its denominator.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QzError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as an element of Q/Z (expected \"p/q\" or an integer)")]
    Parse(String),
}

/// An element of Q/Z as a reduced fraction in `[0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QZElem {
    num: u64,
    den: u64,
}

/// Narrows a reduced denominator back to `u64`.
///
/// Denominators only grow through `preimages` and `add`; an overflow here
/// means the caller asked for torsion beyond 2^64, which is reported loudly
/// rather than wrapped.
fn narrow(v: u128, what: &str) -> u64 {
    u64::try_from(v).unwrap_or_else(|_| panic!("Q/Z {what} exceeds the 64-bit range: {v}"))
}

impl QZElem {
    pub const ZERO: QZElem = QZElem { num: 0, den: 1 };

    /// Builds `num/den mod 1`, reducing the fraction.
    pub fn new(num: i128, den: u64) -> Result<Self, QzError> {
        if den == 0 {
            return Err(QzError::ZeroDenominator);
        }
        Ok(Self::from_parts(num, den as u128))
    }

    fn from_parts(num: i128, den: u128) -> Self {
        debug_assert!(den > 0);
        let r = num.rem_euclid(den as i128) as u128;
        let g = r.gcd(&den);
        let (num, den) = if r == 0 { (0, 1) } else { (r / g, den / g) };
        QZElem {
            num: narrow(num, "numerator"),
            den: narrow(den, "denominator"),
        }
    }

    /// `j/n mod 1` for a residue `j`.
    pub fn from_residue(j: u64, n: u64) -> Self {
        assert!(n > 0, "modulus must be positive");
        Self::from_parts(j as i128, n as u128)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Order of the element in Q/Z.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, other: &QZElem) -> QZElem {
        let l = (self.den as u128).lcm(&(other.den as u128));
        let a = self.num as u128 * (l / self.den as u128);
        let b = other.num as u128 * (l / other.den as u128);
        // both summands are < l, so the sum fits comfortably in u128
        Self::from_parts(((a + b) % l) as i128, l)
    }

    pub fn neg(&self) -> QZElem {
        if self.num == 0 {
            *self
        } else {
            QZElem {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    pub fn sub(&self, other: &QZElem) -> QZElem {
        self.add(&other.neg())
    }

    /// `k * self mod 1`. Never overflows: `k` is reduced modulo the order first.
    pub fn scale(&self, k: i64) -> QZElem {
        let kr = (k as i128).rem_euclid(self.den as i128);
        Self::from_parts(kr * self.num as i128, self.den as u128)
    }

    /// The `k` solutions `b` of `k * b = self`, sorted ascending.
    pub fn preimages(&self, k: u64) -> Vec<QZElem> {
        assert!(k >= 1, "preimages need k >= 1");
        let den = self.den as u128 * k as u128;
        (0..k as u128)
            .map(|j| Self::from_parts((self.num as u128 + j * self.den as u128) as i128, den))
            .collect()
        // (num + j*den)/(k*den) is increasing in j and stays below 1
    }
}

/// The `k` elements `s` with `k * s = 0`, sorted ascending.
pub fn torsion_points(k: u64) -> Vec<QZElem> {
    QZElem::ZERO.preimages(k)
}

impl Default for QZElem {
    fn default() -> Self {
        QZElem::ZERO
    }
}

impl Ord for QZElem {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for QZElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QZElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for QZElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QZElem {
    type Err = QzError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QzError::Parse(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p: i128 = p.trim().parse().map_err(|_| bad())?;
                let q: u64 = q.trim().parse().map_err(|_| bad())?;
                QZElem::new(p, q)
            }
            None => {
                let p: i128 = t.parse().map_err(|_| bad())?;
                QZElem::new(p, 1)
            }
        }
    }
}

impl serde::Serialize for QZElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for QZElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
