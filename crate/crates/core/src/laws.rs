//! Symbol-wise verification of the operator identities over a parameter grid.
//!
//! Every law is checked as an exact equality of formal sums on every
//! canonical symbol of the grid. Failures are data: they are counted and the
//! first few are kept as counterexamples. Laws marked `asserted: false` are
//! measurements reported alongside and never count against the run.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::Echelon;
use crate::ops::{
    coprime, delta, e_op, e_op_with, nabla, nabla_formula, power, rho, rho_hat, rho_with, sigma,
    sigma_with, OpError, ZeroPolicy,
};
use crate::relations::{relation_matrix, RelationMatrix};
use crate::sum::{Coeff, FormalSum, IntSum};
use crate::symbol::{enumerate_symbols, Symbol, SymbolError};

/// Counterexamples kept per law.
pub const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[serde(rename = "lemma48")]
    Relations,
    Ringhom,
    Coalg,
    Descent,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemma48" => Ok(Suite::Relations),
            "ringhom" => Ok(Suite::Ringhom),
            "coalg" => Ok(Suite::Coalg),
            "descent" => Ok(Suite::Descent),
            _ => Err(format!(
                "unknown suite {s:?} (expected lemma48, ringhom, coalg or descent)"
            )),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Relations => "lemma48",
            Suite::Ringhom => "ringhom",
            Suite::Coalg => "coalg",
            Suite::Descent => "descent",
        })
    }
}

/// Arities `1..=max_n`, moduli `2..=max_modulus`, operator parameters `ks`
/// and second parameters or levels `ells`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub max_n: usize,
    pub max_modulus: u64,
    pub ks: Vec<u64>,
    pub ells: Vec<u64>,
}

impl Grid {
    /// A grid whose second parameter list equals `ks`.
    pub fn square(max_n: usize, max_modulus: u64, ks: &[u64]) -> Grid {
        Grid {
            max_n,
            max_modulus,
            ks: ks.to_vec(),
            ells: ks.to_vec(),
        }
    }

    fn validate(&self) -> Result<(), LawError> {
        if self.max_n == 0 || self.max_modulus < 2 || self.ks.is_empty() || self.ells.is_empty() {
            return Err(LawError::EmptyGrid);
        }
        if let Some(&k) = self.ks.iter().chain(&self.ells).find(|&&k| k == 0) {
            return Err(LawError::Op(OpError::BadParameter(k)));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LawError {
    #[error("the parameter grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub n: usize,
    pub modulus: u64,
    pub k: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub id: String,
    pub description: String,
    pub asserted: bool,
    pub instances: u64,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorReport {
    pub suite: Suite,
    pub grid: Grid,
    pub laws: Vec<LawResult>,
    pub notes: Vec<String>,
}

impl OperatorReport {
    /// Zero failures among asserted laws.
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| !l.asserted || l.failures == 0)
    }

    pub fn law(&self, id: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.id == id)
    }
}

struct LawDef {
    id: &'static str,
    description: &'static str,
    asserted: bool,
}

#[derive(Default, Clone)]
struct Tally {
    instances: u64,
    failures: u64,
    counterexamples: Vec<Counterexample>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.instances += other.instances;
        self.failures += other.failures;
        let room = MAX_COUNTEREXAMPLES.saturating_sub(self.counterexamples.len());
        self.counterexamples
            .extend(other.counterexamples.into_iter().take(room));
    }
}

/// Per-law tallies for one unit of work.
struct Tallies(Vec<Tally>);

impl Tallies {
    fn new(n: usize) -> Self {
        Tallies(vec![Tally::default(); n])
    }

    fn record<C: Coeff>(
        &mut self,
        law: usize,
        lhs: &FormalSum<C>,
        rhs: &FormalSum<C>,
        ctx: impl FnOnce() -> Counterexample,
    ) -> bool {
        let t = &mut self.0[law];
        t.instances += 1;
        if lhs == rhs {
            return true;
        }
        t.failures += 1;
        if t.counterexamples.len() < MAX_COUNTEREXAMPLES {
            let mut c = ctx();
            c.lhs = lhs.to_string();
            c.rhs = rhs.to_string();
            t.counterexamples.push(c);
        }
        false
    }

    fn record_display(&mut self, law: usize, ok: bool, ctx: impl FnOnce() -> Counterexample) {
        let t = &mut self.0[law];
        t.instances += 1;
        if !ok {
            t.failures += 1;
            if t.counterexamples.len() < MAX_COUNTEREXAMPLES {
                t.counterexamples.push(ctx());
            }
        }
    }
}

fn merge_all(defs: &[LawDef], parts: Vec<Tallies>) -> Vec<LawResult> {
    let mut total = Tallies::new(defs.len());
    for p in parts {
        for (acc, t) in total.0.iter_mut().zip(p.0) {
            acc.merge(t);
        }
    }
    defs.iter()
        .zip(total.0)
        .map(|(d, t)| LawResult {
            id: d.id.to_string(),
            description: d.description.to_string(),
            asserted: d.asserted,
            instances: t.instances,
            failures: t.failures,
            counterexamples: t.counterexamples,
        })
        .collect()
}

fn ctx(n: usize, modulus: u64, k: u64, ell: Option<u64>, input: &Symbol) -> Counterexample {
    Counterexample {
        n,
        modulus,
        k,
        ell,
        input: input.to_string(),
        lhs: String::new(),
        rhs: String::new(),
    }
}

/// All canonical symbols of arity `1..=max_n` and modulus `2..=max_modulus`,
/// tagged with `(n, N)`, in a fixed order.
fn grid_symbols(max_n: usize, max_modulus: u64) -> Result<Vec<(usize, u64, Symbol)>, SymbolError> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for m in 2..=max_modulus {
            out.extend(enumerate_symbols(n, m)?.into_iter().map(|s| (n, m, s)));
        }
    }
    Ok(out)
}

pub fn check_laws(suite: Suite, grid: &Grid) -> Result<OperatorReport, LawError> {
    grid.validate()?;
    match suite {
        Suite::Relations => relation_laws(grid),
        Suite::Ringhom => ringhom(grid),
        Suite::Coalg => coalg(grid),
        Suite::Descent => descent(grid),
    }
}

const RELATION_LAWS: [LawDef; 9] = [
    LawDef { id: "i", description: "sigma_k sigma_l = sigma_kl", asserted: true },
    LawDef { id: "ii", description: "rho_k rho_l = rho_kl", asserted: true },
    LawDef { id: "iii", description: "sigma_k rho_l = rho_l sigma_k for gcd(k,l) = 1", asserted: true },
    LawDef { id: "iv", description: "rho_k sigma_k = e_k", asserted: true },
    LawDef { id: "v", description: "sigma_k rho_k = k^n id", asserted: true },
    LawDef { id: "v-stated", description: "sigma_k rho_k = k id (as stated; differs from k^n id when n >= 2)", asserted: false },
    LawDef { id: "hat", description: "sigma_k rho_hat_k = id over Q", asserted: true },
    LawDef { id: "iii-free", description: "law iii in the free module on all tuples, zero tuple kept", asserted: false },
    LawDef { id: "iv-free", description: "law iv in the free module on all tuples, zero tuple kept", asserted: false },
];

fn relation_laws(grid: &Grid) -> Result<OperatorReport, LawError> {
    let symbols = grid_symbols(grid.max_n, grid.max_modulus)?;
    let parts: Vec<(Tallies, u64)> = symbols
        .par_iter()
        .map(|(n, m, s)| relation_laws_symbol(grid, *n, *m, s))
        .collect::<Result<_, OpError>>()?;
    let annihilated: u64 = parts.iter().map(|(_, a)| a).sum();
    let laws = merge_all(&RELATION_LAWS, parts.into_iter().map(|(t, _)| t).collect());
    let mut report = OperatorReport {
        suite: Suite::Relations,
        grid: grid.clone(),
        laws,
        notes: Vec::new(),
    };
    let stated = report.law("v-stated").expect("defined").failures;
    if stated > 0 {
        report.notes.push(format!(
            "sigma_k rho_k was measured as k^n id; the stated k id differs on {stated} instances, all of arity n >= 2"
        ));
    }
    let failed = report.law("iii").expect("defined").failures + report.law("iv").expect("defined").failures;
    if failed > 0 {
        let free = report.law("iii-free").expect("defined").failures
            + report.law("iv-free").expect("defined").failures;
        report.notes.push(format!(
            "{failed} failures of iii/iv, {annihilated} of them on symbols sent to 0 by sigma_k under the zero convention; \
             in the free module on all tuples the same identities have {free} failures"
        ));
    }
    Ok(report)
}

fn relation_laws_symbol(grid: &Grid, n: usize, m: u64, s: &Symbol) -> Result<(Tallies, u64), OpError> {
    let mut t = Tallies::new(RELATION_LAWS.len());
    let mut annihilated = 0;
    let x = IntSum::from_symbol(s.clone());
    let xq = x.to_rational();
    for &k in &grid.ks {
        for &l in &grid.ells {
            let c = || ctx(n, m, k, Some(l), s);
            t.record(0, &sigma(k, &sigma(l, &x)?)?, &sigma(k * l, &x)?, c);
            t.record(1, &rho(k, &rho(l, &x)?)?, &rho(k * l, &x)?, c);
            if coprime(k, l) {
                let ok = t.record(2, &sigma(k, &rho(l, &x)?)?, &rho(l, &sigma(k, &x)?)?, c);
                if !ok && sigma(k, &x)?.is_zero() {
                    annihilated += 1;
                }
                let keep = ZeroPolicy::Keep;
                t.record(
                    7,
                    &sigma_with(k, &rho_with(l, &x, keep)?, keep)?,
                    &rho_with(l, &sigma_with(k, &x, keep)?, keep)?,
                    c,
                );
            }
        }
        let c = || ctx(n, m, k, None, s);
        let ok = t.record(3, &rho(k, &sigma(k, &x)?)?, &e_op(k, &x)?, c);
        if !ok && sigma(k, &x)?.is_zero() {
            annihilated += 1;
        }
        let keep = ZeroPolicy::Keep;
        t.record(
            8,
            &rho_with(k, &sigma_with(k, &x, keep)?, keep)?,
            &e_op_with(k, &x, keep)?,
            c,
        );
        let sr = sigma(k, &rho(k, &x)?)?;
        t.record(4, &sr, &x.scaled(&power(k, n)), c);
        t.record(5, &sr, &x.scaled(&BigInt::from(k)), c);
        t.record(6, &sigma(k, &rho_hat(k, &xq)?)?, &xq, c);
    }
    Ok((t, annihilated))
}

const RINGHOM: [LawDef; 1] = [LawDef {
    id: "vi",
    description: "rho_k nabla_l = nabla_l (rho_k x rho_k)",
    asserted: true,
}];

fn ringhom(grid: &Grid) -> Result<OperatorReport, LawError> {
    let xs = grid_symbols(grid.max_n, grid.max_modulus)?;
    // y ranges over symbols whose modulus divides the level
    let mut work = Vec::new();
    for &l in &grid.ells {
        if l < 2 {
            return Err(OpError::TrivialLevel(l).into());
        }
        let ys: Vec<(usize, u64, Symbol)> = xs
            .iter()
            .filter(|(_, m, _)| l % m == 0)
            .cloned()
            .collect();
        for x in &xs {
            work.push((l, x.clone(), ys.clone()));
        }
    }
    let parts: Vec<Tallies> = work
        .par_iter()
        .map(|(l, (n, m, a), ys)| -> Result<Tallies, OpError> {
            let mut t = Tallies::new(RINGHOM.len());
            let x = IntSum::from_symbol(a.clone());
            for (_, _, b) in ys {
                let y = IntSum::from_symbol(b.clone());
                let prod = nabla(*l, &x, &y)?;
                for &k in &grid.ks {
                    let lhs = rho(k, &prod)?;
                    let rhs = nabla_formula(*l, &rho(k, &x)?, &rho(k, &y)?)?;
                    t.record(0, &lhs, &rhs, || Counterexample {
                        input: format!("{a} , {b}"),
                        ..ctx(*n + b.arity(), *m, k, Some(*l), a)
                    });
                }
            }
            Ok(t)
        })
        .collect::<Result<_, OpError>>()?;
    Ok(OperatorReport {
        suite: Suite::Ringhom,
        grid: grid.clone(),
        laws: merge_all(&RINGHOM, parts),
        notes: vec![
            "the right-hand product is evaluated with the explicit level l on rho_k(y), whose entries have order dividing k l".to_string(),
        ],
    })
}

const COALG: [LawDef; 2] = [
    LawDef { id: "vii", description: "sigma_k Delta = Delta sigma_k for gcd(k,N) = 1", asserted: true },
    LawDef { id: "vii-noncoprime", description: "sigma_k Delta = Delta sigma_k for gcd(k,N) > 1 (reported only)", asserted: false },
];

fn coalg(grid: &Grid) -> Result<OperatorReport, LawError> {
    let symbols = grid_symbols(grid.max_n, grid.max_modulus)?;
    let parts: Vec<Tallies> = symbols
        .par_iter()
        .map(|(n, m, s)| -> Result<Tallies, OpError> {
            let mut t = Tallies::new(COALG.len());
            let x = IntSum::from_symbol(s.clone());
            let d = delta(&x, *m)?;
            for &k in &grid.ks {
                let lhs = d.sigma(k)?;
                let rhs = delta(&sigma(k, &x)?, *m)?;
                let law = if coprime(k, *m) { 0 } else { 1 };
                t.record_display(law, lhs == rhs, || Counterexample {
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                    ..ctx(*n, *m, k, None, s)
                });
            }
            Ok(t)
        })
        .collect::<Result<_, OpError>>()?;
    Ok(OperatorReport {
        suite: Suite::Coalg,
        grid: grid.clone(),
        laws: merge_all(&COALG, parts),
        notes: vec!["the right-hand coproduct is taken at the modulus N of the input symbol".to_string()],
    })
}

const DESCENT: [LawDef; 6] = [
    LawDef { id: "sigma", description: "sigma_k maps relations into relations", asserted: true },
    LawDef { id: "rho", description: "rho_k maps relations into relations", asserted: true },
    LawDef { id: "e", description: "e_k maps relations into relations", asserted: true },
    LawDef { id: "sigma-minus", description: "sigma_k maps minus relations into minus relations", asserted: true },
    LawDef { id: "rho-minus", description: "rho_k maps minus relations into minus relations", asserted: true },
    LawDef { id: "e-minus", description: "e_k maps minus relations into minus relations", asserted: true },
];

/// Echelon forms of the relation rows, one per `(n, modulus, minus)`.
pub struct RelationSpans {
    spans: HashMap<(usize, u64, bool), (RelationMatrix, Echelon)>,
}

impl RelationSpans {
    pub fn build(max_n: usize, max_modulus: u64) -> Result<Self, SymbolError> {
        let keys: Vec<(usize, u64, bool)> = (1..=max_n)
            .flat_map(|n| (2..=max_modulus).flat_map(move |m| [(n, m, false), (n, m, true)]))
            .collect();
        let spans = keys
            .into_par_iter()
            .map(|key| {
                let rm = relation_matrix(key.0, key.1, key.2)?;
                let e = rm.echelon();
                Ok((key, (rm, e)))
            })
            .collect::<Result<HashMap<_, _>, SymbolError>>()?;
        Ok(RelationSpans { spans })
    }

    /// Whether `x` lies in the rational span of the relations, tested one
    /// modulus block at a time (relations never mix moduli).
    pub fn contains(&self, x: &IntSum, minus: bool) -> Option<bool> {
        let mut blocks: BTreeMap<u64, IntSum> = BTreeMap::new();
        for (s, c) in x {
            blocks
                .entry(s.modulus())
                .or_insert_with(|| IntSum::zero(x.arity()))
                .add_term(s.clone(), c);
        }
        for (m, block) in blocks {
            let (rm, e) = self.spans.get(&(x.arity(), m, minus))?;
            let v = rm.coordinates(&block)?;
            if !e.contains(&v).expect("coordinates come from the basis") {
                return Some(false);
            }
        }
        Some(true)
    }
}

fn descent(grid: &Grid) -> Result<OperatorReport, LawError> {
    let kmax = grid.ks.iter().copied().max().expect("validated");
    let spans = RelationSpans::build(grid.max_n, grid.max_modulus * kmax)?;
    let mut work = Vec::new();
    for n in 1..=grid.max_n {
        for m in 2..=grid.max_modulus {
            for minus in [false, true] {
                let (rm, _) = &spans.spans[&(n, m, minus)];
                for row in rm.matrix().rows() {
                    let r = IntSum::from_terms(
                        n,
                        row.entries().iter().map(|(c, v)| (v.clone(), rm.basis()[*c].clone())),
                    )?;
                    work.push((n, m, minus, r));
                }
            }
        }
    }
    let parts: Vec<Tallies> = work
        .par_iter()
        .map(|(n, m, minus, r)| -> Result<Tallies, OpError> {
            let mut t = Tallies::new(DESCENT.len());
            let base = if *minus { 3 } else { 0 };
            for &k in &grid.ks {
                let images = [sigma(k, r)?, rho(k, r)?, e_op(k, r)?];
                for (i, img) in images.iter().enumerate() {
                    let ok = spans.contains(img, *minus).unwrap_or(false);
                    t.record_display(base + i, ok, || Counterexample {
                        n: *n,
                        modulus: *m,
                        k,
                        ell: None,
                        input: r.to_string(),
                        lhs: img.to_string(),
                        rhs: "not in the relation span".to_string(),
                    });
                }
            }
            Ok(t)
        })
        .collect::<Result<_, OpError>>()?;
    Ok(OperatorReport {
        suite: Suite::Descent,
        grid: grid.clone(),
        laws: merge_all(&DESCENT, parts),
        notes: vec!["membership is tested over Q, one modulus block at a time".to_string()],
    })
}
