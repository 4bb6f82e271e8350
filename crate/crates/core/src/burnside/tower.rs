use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{boundary_snc, check_grading, BurnClass, BurnGenerator, BurnsideError, RewriteRule, RuleSet, StratifiedModel};

fn default_shift() -> i64 {
    -1
}

/// Declared action of the edge map on generators of `Burn(Y)`: source labels
/// go to new labels (`null` sends the generator to 0), targets are renamed,
/// and total dimension moves by `shift`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMap {
    pub targets: BTreeMap<String, String>,
    pub sources: BTreeMap<String, Option<String>>,
    #[serde(default = "default_shift")]
    pub shift: i64,
    #[serde(default)]
    pub rules: Vec<RewriteRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerVerdict {
    pub holds: bool,
    /// `(dim X - 1, dim Y - 1)`.
    pub grades: (i64, i64),
    pub grades_ok: bool,
    pub image: BurnClass,
    pub expected: BurnClass,
}

impl EdgeMap {
    pub fn apply(&self, c: &BurnClass) -> Result<BurnClass, BurnsideError> {
        let rules = RuleSet::new(self.rules.clone())?;
        let mut out = BurnClass::zero();
        for (g, v) in c.iter() {
            let label = g.label();
            let image = self
                .sources
                .get(&label)
                .ok_or_else(|| BurnsideError::Unmapped(label.clone()))?;
            let Some(image) = image else { continue };
            let target = self
                .targets
                .get(&g.target)
                .ok_or_else(|| BurnsideError::Unmapped(g.target.clone()))?;
            let dim = g.dim as i64 + self.shift;
            if dim < 0 {
                continue;
            }
            out.add_term(BurnGenerator::from_label(image, target.clone(), dim as u32), v);
        }
        Ok(rules.normalize_class(&out))
    }
}

/// For `X` with boundary `Y` and `Y` with boundary `Z`: maps `d_Y(X)` by the
/// declared edge map and compares with `d_Z(Y)`; both must sit in the
/// expected grades `dim X - 1` and `dim Y - 1 = dim X - 2`.
pub fn tower_boundary_check(
    x: &StratifiedModel,
    y: &StratifiedModel,
    edge: &EdgeMap,
) -> Result<TowerVerdict, BurnsideError> {
    if y.ambient != x.boundary {
        return Err(BurnsideError::NotNested(format!(
            "the second model lives on {:?}, the first has boundary {:?}",
            y.ambient, x.boundary
        )));
    }
    let bx = boundary_snc(x)?;
    let bz = boundary_snc(y)?;
    let grades = (x.dim as i64 - 1, y.dim as i64 - 1);
    let grades_ok = grades.1 + 1 == grades.0
        && (grades.0 < 0 || check_grading(&bx, grades.0 as u32))
        && (grades.1 < 0 || check_grading(&bz, grades.1 as u32));
    let image = edge.apply(&bx)?;
    let expected = RuleSet::new(edge.rules.clone())?.normalize_class(&bz);
    Ok(TowerVerdict {
        holds: grades_ok && image == expected,
        grades,
        grades_ok,
        image,
        expected,
    })
}
