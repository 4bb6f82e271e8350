//! JSON forms of formal sums.
//!
//! A sum is an array of terms `{"c": coefficient, "s": ["p/q", ...]}`. A
//! coefficient is a JSON integer, or a string holding an integer or `p/q`.
//! The object form `{"arity": n, "terms": [...]}` is also read, which is the
//! only way to state the arity of an empty sum.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::qz::QZElem;
use crate::sum::{AnySum, Coeff, FormalSum};
use crate::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("malformed sum: {0}")]
    Shape(String),
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
    #[error("bad entry {0:?}")]
    Entry(String),
    #[error("coefficient {0} is not an integer; use the rational ring")]
    NotIntegral(String),
    #[error("terms of different arities ({0} and {1})")]
    Arity(usize, usize),
    #[error("cannot tell the arity of an empty sum")]
    UnknownArity,
}

/// Coefficient ring of a sum read from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ring {
    Z,
    Q,
}

impl std::str::FromStr for Ring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z" | "Z" => Ok(Ring::Z),
            "q" | "Q" => Ok(Ring::Q),
            _ => Err(format!("unknown ring {s:?} (expected q or z)")),
        }
    }
}

fn coefficient(v: &Value) -> Result<BigRational, WireError> {
    let text = match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => return Err(WireError::Coefficient(other.to_string())),
    };
    let bad = || WireError::Coefficient(text.clone());
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(text.parse().map_err(|_| bad())?)),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

fn symbol(v: &Value) -> Result<Symbol, WireError> {
    let arr = v
        .as_array()
        .ok_or_else(|| WireError::Shape(format!("symbol must be an array, got {v}")))?;
    let entries = arr
        .iter()
        .map(|e| {
            let s = e.as_str().map(str::to_string).unwrap_or_else(|| e.to_string());
            s.parse::<QZElem>().map_err(|_| WireError::Entry(s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Symbol::canonicalize(entries).map_err(|e| WireError::Shape(e.to_string()))
}

/// Reads a sum in the given ring.
pub fn parse_sum(v: &Value, ring: Ring) -> Result<AnySum, WireError> {
    let (declared, terms) = match v {
        Value::Array(t) => (None, t),
        Value::Object(o) => {
            let arity = o.get("arity").and_then(Value::as_u64).map(|a| a as usize);
            let t = o
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| WireError::Shape("missing \"terms\" array".into()))?;
            (arity, t)
        }
        _ => return Err(WireError::Shape("expected an array of terms".into())),
    };
    let mut parsed = Vec::with_capacity(terms.len());
    let mut arity = declared;
    for t in terms {
        let c = t
            .get("c")
            .map(coefficient)
            .transpose()?
            .unwrap_or_else(BigRational::one);
        let s = symbol(
            t.get("s")
                .ok_or_else(|| WireError::Shape(format!("term without \"s\": {t}")))?,
        )?;
        match arity {
            None => arity = Some(s.arity()),
            Some(a) if a != s.arity() => return Err(WireError::Arity(a, s.arity())),
            _ => {}
        }
        parsed.push((c, s));
    }
    let arity = arity.ok_or(WireError::UnknownArity)?;
    let rat = FormalSum::from_terms(arity, parsed).map_err(|e| WireError::Shape(e.to_string()))?;
    match ring {
        Ring::Q => Ok(AnySum::Rat(rat)),
        Ring::Z => {
            let mut out = FormalSum::zero(arity);
            for (s, c) in &rat {
                if !c.is_integer() {
                    return Err(WireError::NotIntegral(c.to_string()));
                }
                out.add_term(s.clone(), &c.to_integer());
            }
            Ok(AnySum::Int(out))
        }
    }
}

fn coeff_json(c: &BigRational) -> Value {
    if c.is_integer() {
        let i = c.to_integer();
        match i64::try_from(&i) {
            Ok(v) => json!(v),
            Err(_) => json!(i.to_string()),
        }
    } else {
        json!(c.to_string())
    }
}

fn terms_json<C: Coeff>(x: &FormalSum<C>, to_q: impl Fn(&C) -> BigRational) -> Value {
    Value::Array(
        x.iter()
            .map(|(s, c)| json!({"c": coeff_json(&to_q(c)), "s": s}))
            .collect(),
    )
}

/// Writes a sum in the object form, which keeps the arity of empty sums.
pub fn sum_to_json(x: &AnySum) -> Value {
    let terms = match x {
        AnySum::Int(s) => terms_json(s, |c| BigRational::from_integer(c.clone())),
        AnySum::Rat(s) => terms_json(s, Clone::clone),
    };
    json!({"arity": x.arity(), "terms": terms})
}
