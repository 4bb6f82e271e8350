//! The Bost–Connes operator family on formal sums of symbols.
//!
//! * `sigma(k)`: entrywise multiplication by `k`;
//! * `rho(k)`: sum over all `k^n` preimage tuples;
//! * `rho_hat(k)`: `rho(k)` divided by `k^n` (rational coefficients only);
//! * `e(k)`: sum over all `k^n` shifts by `k`-torsion tuples;
//! * `nabla(l)`: product `M_{n'} x M_{n''} -> M_{n'+n''}` at an explicit level `l`;
//! * `delta(N)`: coproduct into `M_{n'} (x) M^-_{n''}` for symbols of level `N`.
//!
//! Any output term on the all-zero tuple is dropped: such a tuple is not an
//! acceptable symbol and counts as 0. [`ZeroPolicy::Keep`] switches this off
//! and computes in the free module on all tuples instead.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Pow;
use thiserror::Error;

use crate::qz::{torsion_points, QZElem};
use crate::relations::subsets;
use crate::sum::{AnySum, Coeff, FormalSum, RatSum};
use crate::symbol::{minus_canonicalize, MinusForm, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("operator parameter must be at least 1, got {0}")]
    BadParameter(u64),
    #[error("the product needs a nontrivial level, got l = {0}")]
    TrivialLevel(u64),
    #[error("symbol {symbol} has an entry whose order does not divide the level {level}")]
    OutsideLevel { symbol: Symbol, level: u64 },
    #[error("rho_hat needs rational coefficients")]
    IntegerMode,
    #[error("unknown operator {0:?} (expected sigma:k, rho:k, rhohat:k or ek:k)")]
    UnknownOperator(String),
}

/// Whether terms on the all-zero tuple are discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroPolicy {
    /// Zero tuples are not acceptable symbols and count as 0.
    #[default]
    Drop,
    /// Work in the free module on all tuples, zero tuple included.
    Keep,
}

fn check_k(k: u64) -> Result<(), OpError> {
    if k == 0 {
        Err(OpError::BadParameter(k))
    } else {
        Ok(())
    }
}

/// Calls `f` on every tuple of the cartesian product of `choices`.
fn for_each_product(choices: &[Vec<QZElem>], mut f: impl FnMut(&[QZElem])) {
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let n = choices.len();
    let mut idx = vec![0usize; n];
    let mut cur: Vec<QZElem> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                cur[i] = choices[i][idx[i]];
                break;
            }
            idx[i] = 0;
            cur[i] = choices[i][0];
            i += 1;
        }
    }
}

/// Multiplicities of canonical tuples from a per-entry choice list.
fn product_counts(choices: &[Vec<QZElem>]) -> HashMap<Symbol, u64> {
    let mut counts: HashMap<Symbol, u64> = HashMap::new();
    for_each_product(choices, |t| {
        *counts.entry(Symbol::from_tuple(t.to_vec())).or_insert(0) += 1;
    });
    counts
}

fn emit<C: Coeff>(out: &mut FormalSum<C>, counts: HashMap<Symbol, u64>, c: &C, policy: ZeroPolicy) {
    // sorted insertion keeps the work independent of hash order
    let mut v: Vec<(Symbol, u64)> = counts.into_iter().collect();
    v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    for (s, m) in v {
        if policy == ZeroPolicy::Drop && !s.is_acceptable() {
            continue;
        }
        out.add_term(s, &(C::from(BigInt::from(m)) * c));
    }
}

fn input_terms<C: Coeff>(x: &FormalSum<C>, policy: ZeroPolicy) -> impl Iterator<Item = (&Symbol, &C)> {
    x.iter()
        .filter(move |(s, _)| policy == ZeroPolicy::Keep || s.is_acceptable())
}

pub fn sigma<C: Coeff>(k: u64, x: &FormalSum<C>) -> Result<FormalSum<C>, OpError> {
    sigma_with(k, x, ZeroPolicy::Drop)
}

pub fn sigma_with<C: Coeff>(k: u64, x: &FormalSum<C>, policy: ZeroPolicy) -> Result<FormalSum<C>, OpError> {
    check_k(k)?;
    let mut out = FormalSum::zero(x.arity());
    for (s, c) in input_terms(x, policy) {
        let t = s.scale(k as i64);
        if policy == ZeroPolicy::Drop && !t.is_acceptable() {
            continue;
        }
        out.add_term(t, c);
    }
    Ok(out)
}

pub fn rho<C: Coeff>(k: u64, x: &FormalSum<C>) -> Result<FormalSum<C>, OpError> {
    rho_with(k, x, ZeroPolicy::Drop)
}

pub fn rho_with<C: Coeff>(k: u64, x: &FormalSum<C>, policy: ZeroPolicy) -> Result<FormalSum<C>, OpError> {
    check_k(k)?;
    let mut out = FormalSum::zero(x.arity());
    for (s, c) in input_terms(x, policy) {
        let choices: Vec<Vec<QZElem>> = s.entries().iter().map(|a| a.preimages(k)).collect();
        emit(&mut out, product_counts(&choices), c, policy);
    }
    Ok(out)
}

/// `rho(k)` divided by `k^n`.
pub fn rho_hat(k: u64, x: &RatSum) -> Result<RatSum, OpError> {
    let r = rho(k, x)?;
    let denom = BigRational::from_integer(BigInt::from(k).pow(x.arity() as u32));
    Ok(r.map_coeffs(|c| c / &denom))
}

/// `rho_hat` on a sum of run-time coefficient type; integer sums are refused.
pub fn rho_hat_any(k: u64, x: &AnySum) -> Result<RatSum, OpError> {
    match x {
        AnySum::Int(_) => Err(OpError::IntegerMode),
        AnySum::Rat(r) => rho_hat(k, r),
    }
}

pub fn e_op<C: Coeff>(k: u64, x: &FormalSum<C>) -> Result<FormalSum<C>, OpError> {
    e_op_with(k, x, ZeroPolicy::Drop)
}

pub fn e_op_with<C: Coeff>(k: u64, x: &FormalSum<C>, policy: ZeroPolicy) -> Result<FormalSum<C>, OpError> {
    check_k(k)?;
    let tors = torsion_points(k);
    let mut out = FormalSum::zero(x.arity());
    for (s, c) in input_terms(x, policy) {
        let choices: Vec<Vec<QZElem>> = s
            .entries()
            .iter()
            .map(|a| tors.iter().map(|t| a.add(t)).collect())
            .collect();
        emit(&mut out, product_counts(&choices), c, policy);
    }
    Ok(out)
}

/// The product at level `l`: `<a> x <b> |-> sum over l-lifts a~ of <a~, b>`.
///
/// Every entry of every symbol of `y` must have order dividing `l`.
pub fn nabla<C: Coeff>(ell: u64, x: &FormalSum<C>, y: &FormalSum<C>) -> Result<FormalSum<C>, OpError> {
    if ell < 2 {
        return Err(OpError::TrivialLevel(ell));
    }
    for (b, _) in y {
        if b.entries().iter().any(|e| !ell.is_multiple_of(e.order())) {
            return Err(OpError::OutsideLevel {
                symbol: b.clone(),
                level: ell,
            });
        }
    }
    nabla_formula(ell, x, y)
}

/// The bilinear lift-and-concatenate formula of [`nabla`] without the order
/// check on `y`.
///
/// The ring-homomorphism identity `rho_k . nabla_l = nabla_l . (rho_k x rho_k)`
/// evaluates the product on `rho_k(y)`, whose entries have order dividing
/// `k * l` rather than `l`; this entry point is what that identity needs.
pub fn nabla_formula<C: Coeff>(ell: u64, x: &FormalSum<C>, y: &FormalSum<C>) -> Result<FormalSum<C>, OpError> {
    if ell < 2 {
        return Err(OpError::TrivialLevel(ell));
    }
    let mut out = FormalSum::zero(x.arity() + y.arity());
    for (a, ca) in x.iter().filter(|(s, _)| s.is_acceptable()) {
        let lifts: Vec<Vec<QZElem>> = a.entries().iter().map(|e| e.preimages(ell)).collect();
        let mut lift_counts: Vec<(Vec<QZElem>, u64)> = product_counts(&lifts)
            .into_iter()
            .map(|(s, m)| (s.entries().to_vec(), m))
            .collect();
        lift_counts.sort_unstable();
        for (b, cb) in y.iter().filter(|(s, _)| s.is_acceptable()) {
            let c = ca.clone() * cb;
            for (lift, m) in &lift_counts {
                let mut t = lift.clone();
                t.extend_from_slice(b.entries());
                out.add_term(Symbol::from_tuple(t), &(C::from(BigInt::from(*m)) * &c));
            }
        }
    }
    Ok(out)
}

/// Elements of `(+)_{n'+n''=n} M_{n'} (x) M^-_{n''}`. The right factor is
/// always stored in sign-canonical form.
#[derive(Clone, PartialEq)]
pub struct TensorSum<C> {
    arity: usize,
    parts: BTreeMap<(usize, usize), BTreeMap<(Symbol, Symbol), C>>,
}

impl<C: Coeff> TensorSum<C> {
    pub fn zero(arity: usize) -> Self {
        TensorSum {
            arity,
            parts: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &BTreeMap<(usize, usize), BTreeMap<(Symbol, Symbol), C>> {
        &self.parts
    }

    pub fn part(&self, n1: usize, n2: usize) -> Option<&BTreeMap<(Symbol, Symbol), C>> {
        self.parts.get(&(n1, n2))
    }

    /// Adds `c * (left (x) right^-)`. The right factor is sign-canonicalized;
    /// 2-torsion right factors vanish after tensoring with Q and are skipped,
    /// as are all-zero left factors.
    pub fn add_term(&mut self, left: Symbol, right: Symbol, c: &C) {
        if c.is_zero() || !left.is_acceptable() || !right.is_acceptable() {
            return;
        }
        let (rep, sign) = match minus_canonicalize(&right) {
            MinusForm::Signed(rep, sign) => (rep, sign),
            MinusForm::TwoTorsion(_) => return,
        };
        let c = if sign < 0 { -c.clone() } else { c.clone() };
        let key = (left.arity(), rep.arity());
        let part = self.parts.entry(key).or_default();
        let e = part.entry((left, rep)).or_insert_with(C::zero);
        *e += &c;
        if e.is_zero() {
            let k = part
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("just zeroed");
            part.remove(&k);
            if part.is_empty() {
                self.parts.remove(&key);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        for part in other.parts.values() {
            for ((l, r), v) in part {
                self.add_term(l.clone(), r.clone(), &(v.clone() * c));
            }
        }
    }

    /// `sigma_k (x) sigma_k`, applied factorwise.
    pub fn sigma(&self, k: u64) -> Result<Self, OpError> {
        check_k(k)?;
        let mut out = TensorSum::zero(self.arity);
        for part in self.parts.values() {
            for ((l, r), v) in part {
                out.add_term(l.scale(k as i64), r.scale(k as i64), v);
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.parts.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl<C: Coeff> fmt::Display for TensorSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for part in self.parts.values() {
            for ((l, r), c) in part {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if c.is_one() {
                    write!(f, "{l}(x){r}^-")?;
                } else {
                    write!(f, "({c}){l}(x){r}^-")?;
                }
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for TensorSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorSum[n={}]({self})", self.arity)
    }
}

/// The coproduct at level `N`.
///
/// For each symbol `<a>` it sums, over divisors `l >= 2` of `N` and over
/// splittings of the positions into nonempty `I'` and `I''` such that the
/// entries `a_{I''}` are `l`-torsion and generate all of `(1/l)Z/Z`, the
/// term `<l * a_{I'}> (x) <a_{I''}>^-`.
pub fn delta<C: Coeff>(x: &FormalSum<C>, level: u64) -> Result<TensorSum<C>, OpError> {
    if level == 0 {
        return Err(OpError::BadParameter(0));
    }
    let n = x.arity();
    let divisors: Vec<u64> = (2..=level).filter(|d| level.is_multiple_of(*d)).collect();
    let splits: Vec<Vec<usize>> = (1..n).flat_map(|k| subsets(n, k)).collect();
    let mut out = TensorSum::zero(n);
    for (s, c) in x.iter().filter(|(s, _)| s.is_acceptable()) {
        if s.entries().iter().any(|e| !level.is_multiple_of(e.order())) {
            return Err(OpError::OutsideLevel {
                symbol: s.clone(),
                level,
            });
        }
        for &ell in &divisors {
            for right_pos in &splits {
                let right = s.select(right_pos);
                if right.iter().any(|e| ell % e.order() != 0) {
                    continue;
                }
                let right = Symbol::from_tuple(right);
                if right.modulus() != ell {
                    continue;
                }
                let left: Vec<QZElem> = (0..n)
                    .filter(|i| !right_pos.contains(i))
                    .map(|i| s.entries()[i].scale(ell as i64))
                    .collect();
                out.add_term(Symbol::from_tuple(left), right, c);
            }
        }
    }
    Ok(out)
}

/// Parsed form of an operator name such as `rho:2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpSpec {
    Sigma(u64),
    Rho(u64),
    RhoHat(u64),
    E(u64),
}

impl std::str::FromStr for OpSpec {
    type Err = OpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OpError::UnknownOperator(s.to_string());
        let (name, k) = s.split_once(':').ok_or_else(bad)?;
        let k: u64 = k.trim().parse().map_err(|_| bad())?;
        check_k(k)?;
        match name.trim() {
            "sigma" => Ok(OpSpec::Sigma(k)),
            "rho" => Ok(OpSpec::Rho(k)),
            "rhohat" => Ok(OpSpec::RhoHat(k)),
            "ek" | "e" => Ok(OpSpec::E(k)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for OpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpSpec::Sigma(k) => write!(f, "sigma:{k}"),
            OpSpec::Rho(k) => write!(f, "rho:{k}"),
            OpSpec::RhoHat(k) => write!(f, "rhohat:{k}"),
            OpSpec::E(k) => write!(f, "ek:{k}"),
        }
    }
}

/// Applies an operator to a sum of run-time coefficient type.
pub fn apply(op: OpSpec, x: &AnySum) -> Result<AnySum, OpError> {
    fn go<C: Coeff>(op: OpSpec, x: &FormalSum<C>) -> Result<FormalSum<C>, OpError> {
        match op {
            OpSpec::Sigma(k) => sigma(k, x),
            OpSpec::Rho(k) => rho(k, x),
            OpSpec::E(k) => e_op(k, x),
            OpSpec::RhoHat(_) => unreachable!("handled by the caller"),
        }
    }
    match (op, x) {
        (OpSpec::RhoHat(k), _) => rho_hat_any(k, x).map(AnySum::Rat),
        (_, AnySum::Int(s)) => go(op, s).map(AnySum::Int),
        (_, AnySum::Rat(s)) => go(op, s).map(AnySum::Rat),
    }
}

/// `k^n` as a coefficient.
pub fn power<C: Coeff>(k: u64, n: usize) -> C {
    C::from(BigInt::from(k).pow(n as u32))
}

/// `gcd` helper shared by the law harness.
pub fn coprime(a: u64, b: u64) -> bool {
    a.gcd(&b) == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::sum::IntSum;
    use crate::symbol::parse_symbol;

    fn sym(e: &[&str]) -> Symbol {
        parse_symbol(e).unwrap()
    }

    fn one(e: &[&str]) -> IntSum {
        IntSum::from_symbol(sym(e))
    }

    fn sum(terms: &[(i64, &[&str])]) -> IntSum {
        IntSum::from_terms(
            terms[0].1.len(),
            terms.iter().map(|(c, s)| (BigInt::from(*c), sym(s))),
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sigma_examples() {
        let x = sum(&[(2, &["1/3", "1/6"]), (-1, &["1/2", "1/5"])]);
        assert_eq!(sigma(1, &x).unwrap(), x);
        assert!(sigma(2, &one(&["1/2"])).unwrap().is_zero());
        assert_eq!(sigma(2, &one(&["1/3", "1/6"])).unwrap(), one(&["1/3", "2/3"]));
        assert_eq!(sigma(0, &x), Err(OpError::BadParameter(0)));
    }

    #[test]
    fn rho_examples() {
        let x = sum(&[(2, &["1/3", "1/6"]), (-1, &["1/2", "1/5"])]);
        assert_eq!(rho(1, &x).unwrap(), x);
        assert_eq!(rho(2, &one(&["1/3"])).unwrap(), sum(&[(1, &["1/6"]), (1, &["2/3"])]));
        assert_eq!(
            rho(2, &one(&["1/2", "1/2"])).unwrap(),
            sum(&[(1, &["1/4", "1/4"]), (2, &["1/4", "3/4"]), (1, &["3/4", "3/4"])])
        );
    }

    #[test]
    fn rho_hat_examples() {
        let x = one(&["1/3"]).to_rational();
        assert_eq!(rho_hat(1, &x).unwrap(), x);
        let got = rho_hat(2, &x).unwrap();
        assert_eq!(got.coeff(&sym(&["1/6"])), rat(1, 2));
        assert_eq!(got.coeff(&sym(&["2/3"])), rat(1, 2));
        assert_eq!(got.len(), 2);
        let y = one(&["1/3", "1/3"]).to_rational();
        assert_eq!(sigma(2, &rho_hat(2, &y).unwrap()).unwrap(), y);
        assert_eq!(
            rho_hat_any(2, &AnySum::Int(one(&["1/3"]))),
            Err(OpError::IntegerMode)
        );
    }

    #[test]
    fn e_examples() {
        let x = sum(&[(3, &["1/7", "2/7"])]);
        assert_eq!(e_op(1, &x).unwrap(), x);
        assert_eq!(e_op(2, &one(&["1/3"])).unwrap(), sum(&[(1, &["1/3"]), (1, &["5/6"])]));
        assert_eq!(
            e_op(2, &one(&["1/3", "1/3"])).unwrap(),
            sum(&[(1, &["1/3", "1/3"]), (2, &["1/3", "5/6"]), (1, &["5/6", "5/6"])])
        );
    }

    #[test]
    fn zero_policy_keeps_the_zero_tuple() {
        assert!(sigma(2, &one(&["1/2"])).unwrap().is_zero());
        assert_eq!(
            sigma_with(2, &one(&["1/2"]), ZeroPolicy::Keep).unwrap(),
            one(&["0"])
        );
        assert_eq!(e_op(2, &one(&["1/2"])).unwrap(), one(&["1/2"]));
        assert_eq!(
            e_op_with(2, &one(&["1/2"]), ZeroPolicy::Keep).unwrap(),
            sum(&[(1, &["0"]), (1, &["1/2"])])
        );
    }

    #[test]
    fn nabla_examples() {
        let got = nabla(3, &one(&["1/2"]), &one(&["1/3"])).unwrap();
        assert_eq!(
            got,
            sum(&[(1, &["1/6", "1/3"]), (1, &["1/3", "1/2"]), (1, &["1/3", "5/6"])])
        );
        assert!(nabla(3, &one(&["1/2"]), &IntSum::zero(1)).unwrap().is_zero());
        assert_eq!(
            nabla(1, &one(&["1/2"]), &one(&["1/3"])),
            Err(OpError::TrivialLevel(1))
        );
        assert!(matches!(
            nabla(3, &one(&["1/2"]), &one(&["1/2"])),
            Err(OpError::OutsideLevel { level: 3, .. })
        ));
    }

    #[test]
    fn delta_examples() {
        let d = delta(&one(&["1/6", "1/3"]), 6).unwrap();
        let mut expected = TensorSum::zero(2);
        expected.add_term(sym(&["1/2"]), sym(&["1/3"]), &BigInt::one());
        assert_eq!(d, expected);
        assert_eq!(d.part(1, 1).unwrap().len(), 1);

        assert!(delta(&one(&["1/2", "1/2"]), 2).unwrap().is_zero());
        assert!(delta(&one(&["1/5"]), 5).unwrap().is_zero());
        assert!(matches!(
            delta(&one(&["1/6", "1/3"]), 3),
            Err(OpError::OutsideLevel { level: 3, .. })
        ));
    }

    #[test]
    fn delta_right_factor_sign() {
        // l = 3, I'' = {2/3}: <2/3>^- = -<1/3>^-
        let d = delta(&one(&["1/6", "2/3"]), 6).unwrap();
        let part = d.part(1, 1).unwrap();
        assert_eq!(part.get(&(sym(&["1/2"]), sym(&["1/3"]))), Some(&BigInt::from(-1)));
    }

    #[test]
    fn op_spec_parsing() {
        assert_eq!("sigma:3".parse::<OpSpec>().unwrap(), OpSpec::Sigma(3));
        assert_eq!("rhohat:2".parse::<OpSpec>().unwrap(), OpSpec::RhoHat(2));
        assert_eq!("ek:2".parse::<OpSpec>().unwrap(), OpSpec::E(2));
        assert!("rho".parse::<OpSpec>().is_err());
        assert!("tau:2".parse::<OpSpec>().is_err());
        assert_eq!("rho:0".parse::<OpSpec>(), Err(OpError::BadParameter(0)));
    }
}
