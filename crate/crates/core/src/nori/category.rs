use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Diagram, EdgeKind, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatError {
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("unknown morphism {0:?}")]
    UnknownMorphism(String),
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("identity {name:?} of {object:?} must be an endomorphism of it")]
    BadIdentity { name: String, object: String },
    #[error("{g} o {f} = {h} has mismatched ends")]
    BadComposite { g: String, f: String, h: String },
    #[error("composition {g} o {f} is given twice with different values")]
    Conflict { g: String, f: String },
    #[error("composition {g} o {f} is missing")]
    Missing { g: String, f: String },
    #[error("composition with an identity is not unital: {g} o {f}")]
    NotUnital { g: String, f: String },
    #[error("composition is not associative on {h} o {g} o {f}")]
    NotAssociative { h: String, g: String, f: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub name: String,
    pub from: String,
    pub to: String,
}

/// `[g, f, h]` declares `g o f = h`.
pub type Composition = [String; 3];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CatDecl {
    objects: Vec<String>,
    #[serde(default)]
    morphisms: Vec<MorphismSpec>,
    /// Object to identity name; missing identities are named `id_<object>`.
    #[serde(default)]
    identities: HashMap<String, String>,
    #[serde(default)]
    compose: Vec<Composition>,
}

#[derive(Debug, Clone)]
struct Mor {
    name: String,
    from: usize,
    to: usize,
}

/// A finite category with explicit hom-sets and a composition table,
/// validated on construction: composition is total on composable pairs,
/// associative and unital.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "CatDecl", into = "CatDecl")]
pub struct CatPresentation {
    objects: Vec<String>,
    mors: Vec<Mor>,
    ident: Vec<usize>,
    comp: HashMap<(usize, usize), usize>,
    hom: Vec<Vec<Vec<usize>>>,
}

impl TryFrom<CatDecl> for CatPresentation {
    type Error = CatError;

    fn try_from(d: CatDecl) -> Result<Self, CatError> {
        CatPresentation::new(d.objects, d.morphisms, d.identities, d.compose)
    }
}

impl From<CatPresentation> for CatDecl {
    fn from(c: CatPresentation) -> CatDecl {
        let is_id: BTreeSet<usize> = c.ident.iter().copied().collect();
        let mut compose: Vec<Composition> = c
            .comp
            .iter()
            .filter(|((g, f), _)| !is_id.contains(g) && !is_id.contains(f))
            .map(|((g, f), h)| [c.mors[*g].name.clone(), c.mors[*f].name.clone(), c.mors[*h].name.clone()])
            .collect();
        compose.sort();
        CatDecl {
            identities: c
                .objects
                .iter()
                .zip(&c.ident)
                .map(|(o, &i)| (o.clone(), c.mors[i].name.clone()))
                .collect(),
            morphisms: c
                .mors
                .iter()
                .enumerate()
                .filter(|(i, _)| !is_id.contains(i))
                .map(|(_, m)| MorphismSpec {
                    name: m.name.clone(),
                    from: c.objects[m.from].clone(),
                    to: c.objects[m.to].clone(),
                })
                .collect(),
            objects: c.objects,
            compose,
        }
    }
}

impl CatPresentation {
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<MorphismSpec>,
        identities: HashMap<String, String>,
        compose: Vec<Composition>,
    ) -> Result<Self, CatError> {
        let mut obj_ix = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_ix.insert(o.clone(), i).is_some() {
                return Err(CatError::Duplicate(o.clone()));
            }
        }
        let obj = |n: &str| obj_ix.get(n).copied().ok_or_else(|| CatError::UnknownObject(n.into()));
        for o in identities.keys() {
            obj(o)?;
        }
        let mut mors: Vec<Mor> = Vec::new();
        let mut mor_ix: HashMap<String, usize> = HashMap::new();
        let mut ident = Vec::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            let name = identities.get(o).cloned().unwrap_or_else(|| format!("id_{o}"));
            if mor_ix.insert(name.clone(), mors.len()).is_some() {
                return Err(CatError::Duplicate(name));
            }
            ident.push(mors.len());
            mors.push(Mor { name, from: i, to: i });
        }
        for m in morphisms {
            let (from, to) = (obj(&m.from)?, obj(&m.to)?);
            if let Some(&j) = mor_ix.get(&m.name) {
                // restating an identity is allowed
                if ident.contains(&j) && mors[j].from == from && mors[j].to == to {
                    continue;
                }
                if ident.contains(&j) {
                    return Err(CatError::BadIdentity { name: m.name, object: m.from });
                }
                return Err(CatError::Duplicate(m.name));
            }
            mor_ix.insert(m.name.clone(), mors.len());
            mors.push(Mor { name: m.name, from, to });
        }
        let mor = |n: &str| mor_ix.get(n).copied().ok_or_else(|| CatError::UnknownMorphism(n.into()));
        let mut comp: HashMap<(usize, usize), usize> = HashMap::new();
        for [g, f, h] in &compose {
            let (gi, fi, hi) = (mor(g)?, mor(f)?, mor(h)?);
            let (mg, mf, mh) = (&mors[gi], &mors[fi], &mors[hi]);
            if mg.from != mf.to || mh.from != mf.from || mh.to != mg.to {
                return Err(CatError::BadComposite { g: g.clone(), f: f.clone(), h: h.clone() });
            }
            let unit = if ident.contains(&fi) {
                Some(gi)
            } else if ident.contains(&gi) {
                Some(fi)
            } else {
                None
            };
            if unit.is_some_and(|u| u != hi) {
                return Err(CatError::NotUnital { g: g.clone(), f: f.clone() });
            }
            if let Some(&old) = comp.get(&(gi, fi)) {
                if old != hi {
                    return Err(CatError::Conflict { g: g.clone(), f: f.clone() });
                }
            }
            comp.insert((gi, fi), hi);
        }
        let n = objects.len();
        let mut hom = vec![vec![Vec::new(); n]; n];
        for (i, m) in mors.iter().enumerate() {
            hom[m.from][m.to].push(i);
        }
        for (i, m) in mors.iter().enumerate() {
            comp.insert((i, ident[m.from]), i);
            comp.insert((ident[m.to], i), i);
        }
        let c = CatPresentation { objects, mors, ident, comp, hom };
        c.check_total_and_associative()?;
        Ok(c)
    }

    fn check_total_and_associative(&self) -> Result<(), CatError> {
        let name = |i: usize| self.mors[i].name.clone();
        for f in 0..self.mors.len() {
            for &g in self.out_of(self.mors[f].to) {
                if !self.comp.contains_key(&(g, f)) {
                    return Err(CatError::Missing { g: name(g), f: name(f) });
                }
            }
        }
        for f in 0..self.mors.len() {
            for &g in self.out_of(self.mors[f].to) {
                let gf = self.comp[&(g, f)];
                for &h in self.out_of(self.mors[g].to) {
                    if self.comp[&(h, gf)] != self.comp[&(self.comp[&(h, g)], f)] {
                        return Err(CatError::NotAssociative { h: name(h), g: name(g), f: name(f) });
                    }
                }
            }
        }
        Ok(())
    }

    fn out_of(&self, o: usize) -> impl Iterator<Item = &usize> {
        self.hom[o].iter().flatten()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_name(&self, m: usize) -> &str {
        &self.mors[m].name
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.hom[a][b]
    }

    /// `g o f`; `None` unless `f` ends where `g` starts.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    pub fn is_iso(&self, f: usize) -> bool {
        let m = &self.mors[f];
        self.hom[m.to][m.from].iter().any(|&g| {
            self.compose(g, f) == Some(self.ident[m.from]) && self.compose(f, g) == Some(self.ident[m.to])
        })
    }

    /// Isomorphism classes as sorted lists of object indices, ordered by
    /// their first member.
    pub fn iso_classes(&self) -> Vec<Vec<usize>> {
        let n = self.objects.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for f in 0..self.mors.len() {
            if self.is_iso(f) {
                let (a, b) = (find(&mut parent, self.mors[f].from), find(&mut parent, self.mors[f].to));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut slot = HashMap::new();
        for o in 0..n {
            let r = find(&mut parent, o);
            let s = *slot.entry(r).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[s].push(o);
        }
        classes
    }

    /// The orbit of `f: a -> b` under `End(a) x End(b)^op`.
    pub fn orbit(&self, f: usize) -> BTreeSet<usize> {
        let (a, b) = (self.mors[f].from, self.mors[f].to);
        let mut out = BTreeSet::new();
        for &h in &self.hom[a][a] {
            let fh = self.comp[&(f, h)];
            for &g in &self.hom[b][b] {
                out.insert(self.comp[&(g, fh)]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub condition: String,
    pub morphisms: Vec<String>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetVerdict {
    pub holds: bool,
    pub groupoid_classes: bool,
    pub single_orbits: bool,
    pub thin: bool,
    pub classes: Vec<Vec<String>>,
    pub witnesses: Vec<Witness>,
}

/// (a) every morphism inside an isomorphism class is invertible; (b) every
/// nonempty hom-set between non-isomorphic objects is a single orbit.
pub fn check_poset_in_groupoids(c: &CatPresentation) -> PosetVerdict {
    let classes = c.iso_classes();
    let mut class_of = vec![0; c.objects.len()];
    for (i, cl) in classes.iter().enumerate() {
        for &o in cl {
            class_of[o] = i;
        }
    }
    let mut witnesses = Vec::new();
    for (f, m) in c.mors.iter().enumerate() {
        if class_of[m.from] == class_of[m.to] && !c.is_iso(f) {
            witnesses.push(Witness {
                condition: "a".into(),
                morphisms: vec![m.name.clone()],
                note: format!("{} is not invertible inside its isomorphism class", m.name),
            });
        }
    }
    let groupoid_classes = witnesses.is_empty();
    let n = c.objects.len();
    for a in 0..n {
        for b in 0..n {
            let h = &c.hom[a][b];
            if class_of[a] == class_of[b] || h.is_empty() {
                continue;
            }
            let orbit = c.orbit(h[0]);
            if let Some(&other) = h.iter().find(|m| !orbit.contains(m)) {
                witnesses.push(Witness {
                    condition: "b".into(),
                    morphisms: vec![c.mors[h[0]].name.clone(), c.mors[other].name.clone()],
                    note: format!(
                        "Hom({}, {}) has more than one orbit",
                        c.objects[a], c.objects[b]
                    ),
                });
            }
        }
    }
    let single_orbits = witnesses.iter().all(|w| w.condition != "b");
    let thin = (0..n).all(|a| (0..n).all(|b| c.hom[a][b].len() <= 1));
    PosetVerdict {
        holds: groupoid_classes && single_orbits,
        groupoid_classes,
        single_orbits,
        thin,
        classes: classes
            .iter()
            .map(|cl| cl.iter().map(|&o| c.objects[o].clone()).collect())
            .collect(),
        witnesses,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TEdge {
    pub from: usize,
    pub to: usize,
    pub orbit: Vec<String>,
    pub indecomposable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TAnalysis {
    pub classes: Vec<Vec<String>>,
    pub edges: Vec<TEdge>,
    /// Length of the longest path down from each class; `None` when the
    /// quotient has a cycle.
    pub heights: Option<Vec<usize>>,
    pub longest_paths: Vec<Vec<String>>,
    pub tops: Vec<String>,
    pub unique_top: bool,
}

/// Longest paths listed in the analysis.
const MAX_PATHS: usize = 64;

fn class_name(c: &CatPresentation, cl: &[usize]) -> String {
    if cl.len() == 1 {
        c.objects[cl[0]].clone()
    } else {
        let names: Vec<&str> = cl.iter().map(|&o| c.objects[o].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// The orbit quotient `T(C)`: isomorphism classes, one edge per two-sided
/// orbit of a hom-set (identity orbits omitted), indecomposability marks,
/// longest paths down and the unique-top verdict.
pub fn quotient_t(c: &CatPresentation) -> (Diagram, TAnalysis) {
    let classes = c.iso_classes();
    let k = classes.len();
    let mut edges = Vec::new();
    for (i, ci) in classes.iter().enumerate() {
        for (j, cj) in classes.iter().enumerate() {
            let (a, b) = (ci[0], cj[0]);
            let mut left: BTreeSet<usize> = c.hom[a][b].iter().copied().collect();
            while let Some(&f) = left.iter().next() {
                let orbit = c.orbit(f);
                left.retain(|m| !orbit.contains(m));
                if i == j && orbit.contains(&c.ident[a]) {
                    continue;
                }
                let decomposable = orbit.iter().any(|&m| {
                    (0..c.objects.len()).any(|y| {
                        c.hom[a][y].iter().filter(|&&f| !c.is_iso(f)).any(|&f| {
                            c.hom[y][b]
                                .iter()
                                .filter(|&&g| !c.is_iso(g))
                                .any(|&g| c.comp[&(g, f)] == m)
                        })
                    })
                });
                edges.push(TEdge {
                    from: i,
                    to: j,
                    orbit: orbit.iter().map(|&m| c.mors[m].name.clone()).collect(),
                    indecomposable: !decomposable,
                });
            }
        }
    }
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    let mut cyclic = false;
    for e in &edges {
        if e.from == e.to {
            cyclic = true;
        } else {
            succ[e.from].insert(e.to);
        }
    }
    let heights = if cyclic { None } else { heights(&succ) };
    let names: Vec<String> = classes.iter().map(|cl| class_name(c, cl)).collect();
    let (tops, longest_paths) = match &heights {
        None => (Vec::new(), Vec::new()),
        Some(h) => {
            let max = h.iter().copied().max().unwrap_or(0);
            let tops: Vec<usize> = (0..k).filter(|&v| h[v] == max).collect();
            let mut paths = Vec::new();
            for &t in &tops {
                let mut path = vec![t];
                collect_paths(&succ, h, &mut path, &mut paths);
            }
            let paths = paths
                .into_iter()
                .map(|p: Vec<usize>| p.into_iter().map(|v| names[v].clone()).collect())
                .collect();
            (tops, paths)
        }
    };
    let mut d = Diagram::new();
    for n in &names {
        d.add_vertex(Vertex::named(n));
    }
    for e in &edges {
        let label = if e.indecomposable {
            e.orbit[0].clone()
        } else {
            format!("{} (composite)", e.orbit[0])
        };
        d.add_edge(
            Vertex::named(&names[e.from]),
            Vertex::named(&names[e.to]),
            EdgeKind::Orbit,
            &label,
        );
    }
    let analysis = TAnalysis {
        unique_top: tops.len() == 1,
        tops: tops.iter().map(|&t| names[t].clone()).collect(),
        classes: classes
            .iter()
            .map(|cl| cl.iter().map(|&o| c.objects[o].clone()).collect())
            .collect(),
        edges,
        heights,
        longest_paths,
    };
    (d, analysis)
}

fn heights(succ: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    // 0 unvisited, 1 on stack, 2 done
    fn visit(v: usize, succ: &[BTreeSet<usize>], state: &mut [u8], h: &mut [usize]) -> bool {
        match state[v] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        state[v] = 1;
        let mut best = 0;
        for &w in &succ[v] {
            if !visit(w, succ, state, h) {
                return false;
            }
            best = best.max(h[w] + 1);
        }
        h[v] = best;
        state[v] = 2;
        true
    }
    let mut state = vec![0u8; succ.len()];
    let mut h = vec![0; succ.len()];
    for v in 0..succ.len() {
        if !visit(v, succ, &mut state, &mut h) {
            return None;
        }
    }
    Some(h)
}

fn collect_paths(succ: &[BTreeSet<usize>], h: &[usize], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if out.len() >= MAX_PATHS {
        return;
    }
    let v = *path.last().expect("nonempty path");
    if h[v] == 0 {
        out.push(path.clone());
        return;
    }
    for &w in &succ[v] {
        if h[w] + 1 == h[v] {
            path.push(w);
            collect_paths(succ, h, path, out);
            path.pop();
        }
    }
}
