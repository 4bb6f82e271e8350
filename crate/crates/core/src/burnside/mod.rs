//! Combinatorial Burnside calculus on labelled normal crossings models.
//!
//! Varieties are opaque names with declared dimensions. A model lists the
//! nonempty strata `D_T` of an `S`-labelled divisor `Z` in an ambient `X`;
//! absent subsets are empty intersections.

mod action;
mod rewrite;
pub mod scenarios;
mod tower;

pub use action::{twist_action, versch_product, ActionError, CyclicAction};
pub use rewrite::{pushforward, RewriteError, RewriteRule, RuleSet};
pub use tower::{tower_boundary_check, EdgeMap, TowerVerdict};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BurnsideError {
    #[error("stratum {key} has dimension {found}, expected {expected} (ambient dimension minus |T|)")]
    Snc { key: String, expected: i64, found: u32 },
    #[error("stratum key {key} uses undeclared label {label:?}")]
    UnknownLabel { key: String, label: String },
    #[error("empty stratum key")]
    EmptyKey,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("stratum label {0:?} is not mapped")]
    Unmapped(String),
    #[error("models are not nested: {0}")]
    NotNested(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub name: String,
    pub dim: u32,
}

/// An ambient variety of dimension `dim` with an `S`-labelled divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedModel {
    pub ambient: String,
    pub boundary: String,
    pub dim: u32,
    pub labels: BTreeSet<String>,
    pub strata: BTreeMap<BTreeSet<String>, Stratum>,
}

fn key_string(t: &BTreeSet<String>) -> String {
    t.iter().cloned().collect::<Vec<_>>().join(",")
}

impl StratifiedModel {
    /// Checks the normal crossings condition `dim D_T = d - |T|`.
    pub fn validate(&self) -> Result<(), BurnsideError> {
        for (t, s) in &self.strata {
            if t.is_empty() {
                return Err(BurnsideError::EmptyKey);
            }
            if let Some(l) = t.iter().find(|l| !self.labels.contains(*l)) {
                return Err(BurnsideError::UnknownLabel {
                    key: key_string(t),
                    label: l.clone(),
                });
            }
            let expected = self.dim as i64 - t.len() as i64;
            if s.dim as i64 != expected {
                return Err(BurnsideError::Snc {
                    key: key_string(t),
                    expected,
                    found: s.dim,
                });
            }
        }
        Ok(())
    }

    pub fn stratum(&self, labels: &[&str]) -> Option<&Stratum> {
        let key: BTreeSet<String> = labels.iter().map(|s| s.to_string()).collect();
        self.strata.get(&key)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LabelWire {
    Int(i64),
    Str(String),
}

impl LabelWire {
    fn into_string(self) -> String {
        match self {
            LabelWire::Int(i) => i.to_string(),
            LabelWire::Str(s) => s,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary: Option<String>,
    dim: u32,
    labels: Vec<LabelWire>,
    strata: BTreeMap<String, Stratum>,
}

impl Serialize for StratifiedModel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ModelWire {
            name: Some(self.ambient.clone()),
            boundary: Some(self.boundary.clone()),
            dim: self.dim,
            labels: self.labels.iter().cloned().map(LabelWire::Str).collect(),
            strata: self
                .strata
                .iter()
                .map(|(k, v)| (key_string(k), v.clone()))
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StratifiedModel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = ModelWire::deserialize(de)?;
        let mut labels = BTreeSet::new();
        for l in w.labels {
            let l = l.into_string();
            if !labels.insert(l.clone()) {
                return Err(D::Error::custom(BurnsideError::DuplicateLabel(l)));
            }
        }
        let mut strata = BTreeMap::new();
        for (k, v) in w.strata {
            let key: BTreeSet<String> = k
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            strata.insert(key, v);
        }
        Ok(StratifiedModel {
            ambient: w.name.unwrap_or_else(|| "X".to_string()),
            boundary: w.boundary.unwrap_or_else(|| "Z".to_string()),
            dim: w.dim,
            labels,
            strata,
        })
    }
}

/// A generator `[source x A^affine -> target]` of total dimension `dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BurnGenerator {
    pub source: String,
    pub affine: u32,
    pub target: String,
    pub dim: u32,
}

impl BurnGenerator {
    /// The label seen by rewrite rules: `source`, or `source*A^m` for `m > 0`.
    pub fn label(&self) -> String {
        if self.affine == 0 {
            self.source.clone()
        } else {
            format!("{}*A^{}", self.source, self.affine)
        }
    }

    /// Inverse of [`BurnGenerator::label`]; the dimension is kept as given.
    pub fn from_label(label: &str, target: String, dim: u32) -> BurnGenerator {
        if let Some((src, m)) = label.rsplit_once("*A^") {
            if let Ok(m) = m.parse::<u32>() {
                return BurnGenerator {
                    source: src.to_string(),
                    affine: m,
                    target,
                    dim,
                };
            }
        }
        BurnGenerator {
            source: label.to_string(),
            affine: 0,
            target,
            dim,
        }
    }
}

impl fmt::Display for BurnGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.affine == 0 {
            write!(f, "[{} -> {}]", self.source, self.target)
        } else {
            write!(f, "[{} x A^{} -> {}]", self.source, self.affine, self.target)
        }
    }
}

/// An integer combination of generators; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BurnClass {
    terms: BTreeMap<BurnGenerator, BigInt>,
}

impl BurnClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, g: BurnGenerator, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(g.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), &-c);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BurnGenerator, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &BurnGenerator) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_default()
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

    /// The distinct total dimensions of the generators.
    pub fn grades(&self) -> BTreeSet<u32> {
        self.terms.keys().map(|g| g.dim).collect()
    }
}

impl fmt::Display for BurnClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ClassTerm {
    c: i64,
    #[serde(flatten)]
    g: BurnGenerator,
}

impl Serialize for BurnClass {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        let terms = self
            .terms
            .iter()
            .map(|(g, c)| {
                Ok(ClassTerm {
                    c: i64::try_from(c).map_err(|_| S::Error::custom("coefficient out of range"))?,
                    g: g.clone(),
                })
            })
            .collect::<Result<Vec<_>, S::Error>>()?;
        terms.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BurnClass {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let mut out = BurnClass::zero();
        for t in Vec::<ClassTerm>::deserialize(de)? {
            out.add_term(t.g, &BigInt::from(t.c));
        }
        Ok(out)
    }
}

/// `-sum over nonempty T of (-1)^|T| [D_T x A^{|T|-1} -> Z]`.
pub fn boundary_snc(model: &StratifiedModel) -> Result<BurnClass, BurnsideError> {
    model.validate()?;
    let mut out = BurnClass::zero();
    for (t, s) in &model.strata {
        let sign = if t.len() % 2 == 1 { 1 } else { -1 };
        let m = t.len() as u32 - 1;
        out.add_term(
            BurnGenerator {
                source: s.name.clone(),
                affine: m,
                target: model.boundary.clone(),
                dim: s.dim + m,
            },
            &BigInt::from(sign),
        );
    }
    Ok(out)
}

/// Every generator has total dimension `n` (vacuous on the zero class).
pub fn check_grading(c: &BurnClass, n: u32) -> bool {
    c.iter().all(|(g, _)| g.dim == n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(dim: u32, labels: &[&str], strata: &[(&[&str], &str, u32)]) -> StratifiedModel {
        StratifiedModel {
            ambient: "X".into(),
            boundary: "Z".into(),
            dim,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            strata: strata
                .iter()
                .map(|(k, n, d)| {
                    (
                        k.iter().map(|s| s.to_string()).collect(),
                        Stratum { name: n.to_string(), dim: *d },
                    )
                })
                .collect(),
        }
    }

    fn gen(src: &str, m: u32, dim: u32) -> BurnGenerator {
        BurnGenerator { source: src.into(), affine: m, target: "Z".into(), dim }
    }

    #[test]
    fn boundary_examples() {
        let b = boundary_snc(&model(3, &["1"], &[(&["1"], "D1", 2)])).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.coeff(&gen("D1", 0, 2)), BigInt::one());

        let full = model(2, &["1", "2"], &[(&["1"], "D1", 1), (&["2"], "D2", 1), (&["1", "2"], "D12", 0)]);
        let b = boundary_snc(&full).unwrap();
        assert_eq!(b.coeff(&gen("D1", 0, 1)), BigInt::one());
        assert_eq!(b.coeff(&gen("D2", 0, 1)), BigInt::one());
        assert_eq!(b.coeff(&gen("D12", 1, 1)), BigInt::from(-1));
        assert!(check_grading(&b, 1));
        assert_eq!(b.to_string(), "[D1 -> Z] - [D12 x A^1 -> Z] + [D2 -> Z]");

        let disjoint = model(2, &["1", "2"], &[(&["1"], "D1", 1), (&["2"], "D2", 1)]);
        assert_eq!(boundary_snc(&disjoint).unwrap().len(), 2);
    }

    #[test]
    fn snc_violation_is_an_error() {
        let bad = model(2, &["1", "2"], &[(&["1", "2"], "D12", 1)]);
        assert!(matches!(boundary_snc(&bad), Err(BurnsideError::Snc { .. })));
        let unknown = model(2, &["1"], &[(&["7"], "D7", 1)]);
        assert!(matches!(boundary_snc(&unknown), Err(BurnsideError::UnknownLabel { .. })));
    }

    #[test]
    fn grading_checks() {
        let full = model(
            3,
            &["1", "2", "3"],
            &[
                (&["1"], "A", 2),
                (&["2"], "B", 2),
                (&["3"], "C", 2),
                (&["1", "2"], "AB", 1),
                (&["1", "3"], "AC", 1),
                (&["2", "3"], "BC", 1),
                (&["1", "2", "3"], "ABC", 0),
            ],
        );
        assert!(check_grading(&boundary_snc(&full).unwrap(), 2));
        let mut mixed = BurnClass::zero();
        mixed.add_term(gen("A", 0, 2), &BigInt::one());
        mixed.add_term(gen("B", 0, 1), &BigInt::one());
        assert!(!check_grading(&mixed, 2));
        assert!(check_grading(&BurnClass::zero(), 0));
        assert!(check_grading(&BurnClass::zero(), 7));
    }

    #[test]
    fn model_json_roundtrip() {
        let j = r#"{"dim": 2, "labels": [1, 2], "strata": {"1": {"name": "D1", "dim": 1}, "2,1": {"name": "P", "dim": 0}}}"#;
        let m: StratifiedModel = serde_json::from_str(j).unwrap();
        assert_eq!(m.ambient, "X");
        assert_eq!(m.stratum(&["1", "2"]).unwrap().name, "P");
        let back: StratifiedModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let c = boundary_snc(&m).unwrap();
        let back: BurnClass = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn label_roundtrip() {
        let g = gen("pt", 2, 2);
        assert_eq!(g.label(), "pt*A^2");
        assert_eq!(BurnGenerator::from_label(&g.label(), "Z".into(), 2), g);
        assert_eq!(BurnGenerator::from_label("weird*A^x", "Z".into(), 1).affine, 0);
    }

    fn arb_model() -> impl Strategy<Value = StratifiedModel> {
        (1usize..=4, 0u32..=6).prop_flat_map(|(ns, d)| {
            let subsets: Vec<BTreeSet<String>> = (1u32..(1 << ns))
                .map(|mask| (0..ns).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect())
                .filter(|t: &BTreeSet<String>| t.len() as u32 <= d)
                .collect();
            let n = subsets.len();
            prop::collection::vec(any::<bool>(), n).prop_map(move |keep| StratifiedModel {
                ambient: "X".into(),
                boundary: "Z".into(),
                dim: d,
                labels: (1..=ns).map(|i| i.to_string()).collect(),
                strata: subsets
                    .iter()
                    .zip(&keep)
                    .filter(|(_, k)| **k)
                    .map(|(t, _)| {
                        (t.clone(), Stratum { name: format!("D{}", key_string(t)), dim: d - t.len() as u32 })
                    })
                    .collect(),
            })
        })
    }

    proptest! {
        #[test]
        fn boundary_is_homogeneous(m in arb_model()) {
            let b = boundary_snc(&m).unwrap();
            prop_assert_eq!(b.len(), m.strata.len());
            if m.dim > 0 {
                prop_assert!(check_grading(&b, m.dim - 1));
            } else {
                prop_assert!(b.is_zero());
            }
        }

        #[test]
        fn removing_a_maximal_stratum(m in arb_model()) {
            let maximal: Vec<BTreeSet<String>> = m.strata.keys()
                .filter(|t| !m.strata.keys().any(|u| u.len() > t.len() && t.is_subset(u)))
                .cloned()
                .collect();
            let full = boundary_snc(&m).unwrap();
            for t in maximal {
                let mut smaller = m.clone();
                let s = smaller.strata.remove(&t).unwrap();
                let diff = full.minus(&boundary_snc(&smaller).unwrap());
                let mut expected = BurnClass::zero();
                let k = t.len() as u32;
                expected.add_term(
                    BurnGenerator { source: s.name, affine: k - 1, target: "Z".into(), dim: s.dim + k - 1 },
                    &BigInt::from(if k % 2 == 1 { 1 } else { -1 }),
                );
                prop_assert_eq!(diff, expected);
            }
        }
    }
}
