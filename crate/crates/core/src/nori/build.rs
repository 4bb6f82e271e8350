use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Diagram, DiagramError, EdgeKind, Vertex};

/// A variety, optionally carrying the level of its residually finite action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarietyDecl {
    Name(String),
    WithLevel { name: String, level: u64 },
}

impl VarietyDecl {
    fn name(&self) -> &str {
        match self {
            VarietyDecl::Name(n) | VarietyDecl::WithLevel { name: n, .. } => n,
        }
    }

    fn level(&self) -> u64 {
        match self {
            VarietyDecl::Name(_) => 1,
            VarietyDecl::WithLevel { level, .. } => *level,
        }
    }
}

/// A morphism of pairs `(X, Y) -> (X', Y')` with `f(Y)` inside `Y'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub name: String,
    pub from: Vec<String>,
    pub to: Vec<String>,
}

fn default_range() -> Vec<i64> {
    vec![0]
}

fn default_shift() -> i64 {
    1
}

/// Pairs are `[X, Y]` with `Y` closed in `X`; ladders are `[X, Y, Z]` with
/// `Z` inside `Y` inside `X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairsDecl {
    pub varieties: Vec<VarietyDecl>,
    #[serde(default)]
    pub pairs: Vec<Vec<String>>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub ladders: Vec<Vec<String>>,
    #[serde(default = "default_range")]
    pub i_range: Vec<i64>,
    /// Degree shift of functoriality edges.
    #[serde(default = "default_shift")]
    pub fstar_shift: i64,
}

/// Equivariant declarations over a base: `chains` are `[X, Y, Z]` ladders and
/// `twists` lists the pairs that receive one twisted projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantDecl {
    #[serde(default = "default_base")]
    pub base: String,
    #[serde(default)]
    pub varieties: Vec<VarietyDecl>,
    #[serde(default)]
    pub pairs: Vec<Vec<String>>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub chains: Vec<Vec<String>>,
    #[serde(default)]
    pub twists: Vec<Vec<String>>,
    #[serde(default = "default_range")]
    pub i_range: Vec<i64>,
    #[serde(default = "default_range")]
    pub w_range: Vec<i64>,
}

fn default_base() -> String {
    "B".to_string()
}

struct Names(BTreeMap<String, u64>);

impl Names {
    fn new(vs: &[VarietyDecl]) -> Result<Self, DiagramError> {
        let mut m = BTreeMap::new();
        for v in vs {
            if v.level() == 0 {
                return Err(DiagramError::Level { name: v.name().to_string() });
            }
            m.insert(v.name().to_string(), v.level());
        }
        Ok(Names(m))
    }

    fn check<'a>(&self, what: &str, names: &'a [String], len: usize) -> Result<&'a [String], DiagramError> {
        if names.len() != len {
            return Err(DiagramError::Shape(format!("{what} {names:?}"), len));
        }
        for n in names {
            if !self.0.contains_key(n) {
                return Err(DiagramError::UnknownVariety(n.clone()));
            }
        }
        Ok(names)
    }

    fn level(&self, n: &str) -> u64 {
        self.0.get(n).copied().unwrap_or(1)
    }
}

fn range_set(r: &[i64], what: &str, nonneg: bool) -> Result<BTreeSet<i64>, DiagramError> {
    if r.is_empty() {
        return Err(DiagramError::Range(format!("{what} is empty")));
    }
    if nonneg && r.iter().any(|&i| i < 0) {
        return Err(DiagramError::Range(format!("{what} must be non-negative")));
    }
    Ok(r.iter().copied().collect())
}

/// Vertices `(X, Y, i)` for every declared pair and `i` in range (ladders and
/// morphisms declare their pairs too); functoriality edges
/// `(X, Y, i) -> (X', Y', i + fstar_shift)`; boundary edges
/// `(Y, Z, i) -> (X, Y, i + 1)`. Edges whose target degree leaves the range
/// are not created.
pub fn build_pairs_diagram(decl: &PairsDecl) -> Result<Diagram, DiagramError> {
    let names = Names::new(&decl.varieties)?;
    let is = range_set(&decl.i_range, "i_range", false)?;
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    let mut order: Vec<(String, String)> = Vec::new();
    let mut add = |p: (String, String)| {
        if pairs.insert(p.clone()) {
            order.push(p);
        }
    };
    for p in &decl.pairs {
        let p = names.check("pair", p, 2)?;
        add((p[0].clone(), p[1].clone()));
    }
    for l in &decl.ladders {
        let l = names.check("ladder", l, 3)?;
        add((l[0].clone(), l[1].clone()));
        add((l[1].clone(), l[2].clone()));
    }
    for m in &decl.morphisms {
        let f = names.check("morphism source", &m.from, 2)?;
        let t = names.check("morphism target", &m.to, 2)?;
        add((f[0].clone(), f[1].clone()));
        add((t[0].clone(), t[1].clone()));
    }
    let mut d = Diagram::new();
    for (x, y) in &order {
        for &i in &is {
            d.add_vertex(Vertex::pair(x, y, i));
        }
    }
    for m in &decl.morphisms {
        for &i in &is {
            let j = i + decl.fstar_shift;
            if is.contains(&j) {
                d.add_edge(
                    Vertex::pair(&m.from[0], &m.from[1], i),
                    Vertex::pair(&m.to[0], &m.to[1], j),
                    EdgeKind::Functoriality,
                    &format!("{}*", m.name),
                );
            }
        }
    }
    for l in &decl.ladders {
        for &i in &is {
            if is.contains(&(i + 1)) {
                d.add_edge(
                    Vertex::pair(&l[1], &l[2], i),
                    Vertex::pair(&l[0], &l[1], i + 1),
                    EdgeKind::Boundary,
                    "boundary",
                );
            }
        }
    }
    Ok(d)
}

/// Vertices `(X -> B, Y, i, w)`; `h*` edges run from the target pair of `h`
/// back to its source at the same `(i, w)`; boundary edges raise `i` by 1;
/// each twist adds `(X x P1 -> B, Y x P1 u X x {0}, i + 2, w + 1)` and the
/// edge to it.
pub fn build_equivariant_diagram(decl: &EquivariantDecl) -> Result<Diagram, DiagramError> {
    let names = Names::new(&decl.varieties)?;
    let is = range_set(&decl.i_range, "i_range", true)?;
    let ws = range_set(&decl.w_range, "w_range", false)?;
    let b = decl.base.as_str();
    let v = |x: &str, y: &str, i: i64, w: i64| Vertex::equivariant(x, b, y, i, w, names.level(x));
    let mut d = Diagram::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for p in &decl.pairs {
        let p = names.check("pair", p, 2)?;
        pairs.push((p[0].clone(), p[1].clone()));
    }
    for c in &decl.chains {
        let c = names.check("chain", c, 3)?;
        pairs.push((c[0].clone(), c[1].clone()));
        pairs.push((c[1].clone(), c[2].clone()));
    }
    for m in &decl.morphisms {
        let f = names.check("morphism source", &m.from, 2)?;
        let t = names.check("morphism target", &m.to, 2)?;
        pairs.push((f[0].clone(), f[1].clone()));
        pairs.push((t[0].clone(), t[1].clone()));
    }
    for t in &decl.twists {
        let t = names.check("twist", t, 2)?;
        pairs.push((t[0].clone(), t[1].clone()));
    }
    for (x, y) in &pairs {
        for &i in &is {
            for &w in &ws {
                d.add_vertex(v(x, y, i, w));
            }
        }
    }
    for m in &decl.morphisms {
        for &i in &is {
            for &w in &ws {
                d.add_edge(
                    v(&m.to[0], &m.to[1], i, w),
                    v(&m.from[0], &m.from[1], i, w),
                    EdgeKind::Functoriality,
                    &format!("{}*", m.name),
                );
            }
        }
    }
    for c in &decl.chains {
        for &i in &is {
            if !is.contains(&(i + 1)) {
                continue;
            }
            for &w in &ws {
                d.add_edge(
                    v(&c[1], &c[2], i, w),
                    v(&c[0], &c[1], i + 1, w),
                    EdgeKind::Boundary,
                    "boundary",
                );
            }
        }
    }
    for t in &decl.twists {
        let (x, y) = (&t[0], &t[1]);
        let px = format!("{x}×P1");
        let py = format!("{y}×P1 ∪ {x}×{{0}}");
        for &i in &is {
            for &w in &ws {
                let target = Vertex::equivariant(&px, b, &py, i + 2, w + 1, names.level(x));
                d.add_edge(v(x, y, i, w), target, EdgeKind::Twist, "twist");
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nori::export_dot;

    fn names(v: &[&str]) -> Vec<VarietyDecl> {
        v.iter().map(|s| VarietyDecl::Name(s.to_string())).collect()
    }

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn pairs_decl() -> PairsDecl {
        PairsDecl {
            varieties: names(&["X", "Y", "Z", "X'", "Y'"]),
            pairs: vec![],
            morphisms: vec![],
            ladders: vec![],
            i_range: vec![0],
            fstar_shift: 1,
        }
    }

    #[test]
    fn single_pair() {
        let d = build_pairs_diagram(&PairsDecl { pairs: vec![strs(&["X", "Y"])], ..pairs_decl() }).unwrap();
        assert_eq!(d.vertices().len(), 1);
        assert!(d.edges().is_empty());
    }

    #[test]
    fn ladder() {
        let decl = PairsDecl { ladders: vec![strs(&["X", "Y", "Z"])], i_range: vec![0, 1], ..pairs_decl() };
        let d = build_pairs_diagram(&decl).unwrap();
        assert_eq!(d.vertices().len(), 4);
        assert_eq!(d.edges().len(), 1);
        let e = &d.edges()[0];
        assert_eq!(d.vertices()[e.from], Vertex::pair("Y", "Z", 0));
        assert_eq!(d.vertices()[e.to], Vertex::pair("X", "Y", 1));
        let dot = export_dot(&d);
        assert_eq!(dot.matches("[label=").count(), 4);
        assert_eq!(dot.matches("kind=\"boundary\"").count(), 1);
    }

    #[test]
    fn morphism_shift() {
        let m = MorphismDecl { name: "f".into(), from: strs(&["X", "Y"]), to: strs(&["X'", "Y'"]) };
        let decl = PairsDecl { morphisms: vec![m], i_range: vec![0, 1], ..pairs_decl() };
        let d = build_pairs_diagram(&decl).unwrap();
        assert_eq!(d.edges().len(), 1);
        let e = &d.edges()[0];
        assert_eq!(d.vertices()[e.from], Vertex::pair("X", "Y", 0));
        assert_eq!(d.vertices()[e.to], Vertex::pair("X'", "Y'", 1));
        let d0 = build_pairs_diagram(&PairsDecl { fstar_shift: 0, ..decl }).unwrap();
        assert_eq!(d0.edges().len(), 2);
        assert!(d0.edges().iter().all(|e| d0.shift(e) == (0, 0)));
    }

    #[test]
    fn dangling_references() {
        let decl = PairsDecl { pairs: vec![strs(&["X", "W"])], ..pairs_decl() };
        assert_eq!(build_pairs_diagram(&decl).unwrap_err(), DiagramError::UnknownVariety("W".into()));
        let decl = PairsDecl { ladders: vec![strs(&["X", "Y"])], ..pairs_decl() };
        assert!(matches!(build_pairs_diagram(&decl), Err(DiagramError::Shape(_, 3))));
    }

    fn eq_decl() -> EquivariantDecl {
        EquivariantDecl {
            base: "B".into(),
            varieties: vec![
                VarietyDecl::WithLevel { name: "X".into(), level: 2 },
                VarietyDecl::Name("Y".into()),
                VarietyDecl::Name("Z".into()),
            ],
            pairs: vec![],
            morphisms: vec![],
            chains: vec![],
            twists: vec![],
            i_range: vec![0],
            w_range: vec![0],
        }
    }

    #[test]
    fn equivariant_twist() {
        let d = build_equivariant_diagram(&EquivariantDecl { twists: vec![strs(&["X", "Y"])], ..eq_decl() }).unwrap();
        assert_eq!(d.vertices().len(), 2);
        assert_eq!(d.edges().len(), 1);
        let e = &d.edges()[0];
        assert_eq!(e.kind, EdgeKind::Twist);
        assert_eq!(d.shift(e), (2, 1));
        let t = &d.vertices()[e.to];
        assert_eq!(t.space, "X×P1");
        assert_eq!(t.sub.as_deref(), Some("Y×P1 ∪ X×{0}"));
        assert_eq!(t.level, Some(2));
    }

    #[test]
    fn equivariant_chain_and_morphism() {
        let decl = EquivariantDecl {
            chains: vec![strs(&["X", "Y", "Z"])],
            morphisms: vec![MorphismDecl { name: "h".into(), from: strs(&["Y", "Z"]), to: strs(&["X", "Y"]) }],
            i_range: vec![0, 1],
            w_range: vec![0, 3],
            ..eq_decl()
        };
        let d = build_equivariant_diagram(&decl).unwrap();
        for e in d.edges() {
            assert_eq!(Some(d.shift(e)), e.kind.equivariant_shift());
        }
        let b = d.edges().iter().find(|e| e.kind == EdgeKind::Boundary).unwrap();
        assert_eq!(d.vertices()[b.from], Vertex::equivariant("Y", "B", "Z", 0, 0, 1));
        assert_eq!(d.vertices()[b.to], Vertex::equivariant("X", "B", "Y", 1, 0, 2));
        let h = d.edges().iter().find(|e| e.kind == EdgeKind::Functoriality).unwrap();
        assert_eq!(d.vertices()[h.from].space, "X");
    }

    #[test]
    fn equivariant_empty_and_errors() {
        let d = build_equivariant_diagram(&EquivariantDecl { varieties: vec![], ..eq_decl() }).unwrap();
        assert!(d.vertices().is_empty());
        let bad = EquivariantDecl {
            varieties: vec![VarietyDecl::WithLevel { name: "X".into(), level: 0 }],
            ..eq_decl()
        };
        assert!(matches!(build_equivariant_diagram(&bad), Err(DiagramError::Level { .. })));
        let neg = EquivariantDecl { i_range: vec![-1], ..eq_decl() };
        assert!(matches!(build_equivariant_diagram(&neg), Err(DiagramError::Range(_))));
    }

    #[test]
    fn decl_json() {
        let j = r#"{"varieties": ["X", "Y", "Z"], "ladders": [["X", "Y", "Z"]], "i_range": [0, 1]}"#;
        let decl: PairsDecl = serde_json::from_str(j).unwrap();
        assert_eq!(decl.fstar_shift, 1);
        assert_eq!(build_pairs_diagram(&decl).unwrap().edges().len(), 1);
        let j = r#"{"varieties": [{"name": "X", "level": 3}, "Y"], "twists": [["X", "Y"]]}"#;
        let decl: EquivariantDecl = serde_json::from_str(j).unwrap();
        assert_eq!(build_equivariant_diagram(&decl).unwrap().count_kind(EdgeKind::Twist), 1);
    }
}
