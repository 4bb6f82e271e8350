//! Canned models: the point blow-up on a surface and the 2-1-0 tower.
//!
//! Affine factors are spelled `label*A^m` (see [`super::BurnGenerator::label`]), so
//! a rule into `pt*A^1` identifies a class with the affine line over a point.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    boundary_snc, pushforward, BurnClass, BurnsideError, EdgeMap, RewriteRule, RuleSet, Stratum,
    StratifiedModel,
};

fn model(ambient: &str, boundary: &str, dim: u32, strata: &[(&[&str], &str, u32)]) -> StratifiedModel {
    let labels: BTreeSet<String> = strata
        .iter()
        .flat_map(|(k, _, _)| k.iter().map(|s| s.to_string()))
        .collect();
    StratifiedModel {
        ambient: ambient.into(),
        boundary: boundary.into(),
        dim,
        labels,
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

/// A surface `X` with boundary curve `Z`, and its blow-up `X'` at a point of
/// `Z`, whose boundary `Z'` is the strict transform plus the exceptional curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupScenario {
    pub x: StratifiedModel,
    pub x_prime: StratifiedModel,
    pub target_map: BTreeMap<String, String>,
    #[serde(default)]
    pub rules: Vec<RewriteRule>,
}

pub fn blowup_scenario() -> BlowupScenario {
    let rule = |a: &str, b: &str| RewriteRule { from: a.into(), to: b.into() };
    BlowupScenario {
        x: model("X", "Z", 2, &[(&["1"], "Z", 1)]),
        x_prime: model(
            "X'",
            "Z'",
            2,
            &[(&["1"], "Z~", 1), (&["2"], "E", 1), (&["1", "2"], "pt", 0)],
        ),
        target_map: [("Z'".to_string(), "Z".to_string())].into(),
        rules: vec![
            rule("Z~", "Z"),
            rule("E", "line-over-pt"),
            rule("line-over-pt", "pt*A^1"),
        ],
    }
}

impl BlowupScenario {
    /// `(g_* d_{Z'}(X'), d_Z(X))`.
    pub fn run(&self) -> Result<(BurnClass, BurnClass), BurnsideError> {
        let rules = RuleSet::new(self.rules.clone())?;
        let pushed = pushforward(&self.target_map, &boundary_snc(&self.x_prime)?, &rules)?;
        Ok((pushed, boundary_snc(&self.x)?))
    }
}

/// `X` of dimension 2 with boundary curve `Y`, and `Y` with boundary point `Z`.
pub fn tower_210() -> (StratifiedModel, StratifiedModel, EdgeMap) {
    let x = model("X", "Y", 2, &[(&["1"], "Y", 1)]);
    let y = model("Y", "Z", 1, &[(&["1"], "Z", 0)]);
    let edge = EdgeMap {
        targets: [("Y".to_string(), "Z".to_string())].into(),
        sources: [("Y".to_string(), Some("Z".to_string()))].into(),
        shift: -1,
        rules: Vec::new(),
    };
    (x, y, edge)
}
