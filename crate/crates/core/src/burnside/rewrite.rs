use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BurnClass, BurnGenerator, BurnsideError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rewriting {0:?} does not terminate")]
    NonTerminating(String),
    #[error("label {label:?} has several normal forms: {forms:?}")]
    NonConfluent { label: String, forms: Vec<String> },
}

/// Identification of a label with a birationally equivalent one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteRule {
    pub from: String,
    pub to: String,
}

/// A terminating, confluent rewrite system on labels. Normal forms are
/// computed once, on the finite universe of labels the rules mention.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    rules: Vec<RewriteRule>,
    normal: BTreeMap<String, String>,
}

impl RuleSet {
    pub fn new(rules: Vec<RewriteRule>) -> Result<Self, RewriteError> {
        let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &rules {
            if r.from != r.to {
                succ.entry(&r.from).or_default().insert(&r.to);
            }
        }
        // all normal forms reachable from each label, by memoized DFS;
        // a label on the current path means a cycle
        fn forms<'a>(
            l: &'a str,
            succ: &BTreeMap<&'a str, BTreeSet<&'a str>>,
            memo: &mut BTreeMap<&'a str, BTreeSet<&'a str>>,
            path: &mut Vec<&'a str>,
        ) -> Result<BTreeSet<&'a str>, RewriteError> {
            if let Some(f) = memo.get(l) {
                return Ok(f.clone());
            }
            if path.contains(&l) {
                return Err(RewriteError::NonTerminating(l.to_string()));
            }
            let out = match succ.get(l) {
                None => BTreeSet::from([l]),
                Some(next) => {
                    path.push(l);
                    let mut acc = BTreeSet::new();
                    for n in next {
                        acc.extend(forms(n, succ, memo, path)?);
                    }
                    path.pop();
                    acc
                }
            };
            memo.insert(l, out.clone());
            Ok(out)
        }
        let mut memo = BTreeMap::new();
        let mut normal = BTreeMap::new();
        for l in succ.keys() {
            let f = forms(l, &succ, &mut memo, &mut Vec::new())?;
            if f.len() != 1 {
                return Err(RewriteError::NonConfluent {
                    label: l.to_string(),
                    forms: f.into_iter().map(str::to_string).collect(),
                });
            }
            normal.insert(l.to_string(), f.into_iter().next().expect("one form").to_string());
        }
        Ok(RuleSet { rules, normal })
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn normalize(&self, label: &str) -> String {
        self.normal.get(label).cloned().unwrap_or_else(|| label.to_string())
    }

    /// Rewrites every generator label to normal form; dimensions are kept.
    pub fn normalize_class(&self, c: &BurnClass) -> BurnClass {
        let mut out = BurnClass::zero();
        for (g, v) in c.iter() {
            let label = self.normalize(&g.label());
            out.add_term(BurnGenerator::from_label(&label, g.target.clone(), g.dim), v);
        }
        out
    }
}

/// `g_*`: relabels targets through `target_map`, then normalizes source
/// labels and merges like generators.
pub fn pushforward(
    target_map: &BTreeMap<String, String>,
    c: &BurnClass,
    rules: &RuleSet,
) -> Result<BurnClass, BurnsideError> {
    let mut moved = BurnClass::zero();
    for (g, v) in c.iter() {
        let t = target_map
            .get(&g.target)
            .ok_or_else(|| BurnsideError::Unmapped(g.target.clone()))?;
        moved.add_term(BurnGenerator { target: t.clone(), ..g.clone() }, v);
    }
    Ok(rules.normalize_class(&moved))
}
