//! Diagram-level structures: effective-pairs diagrams, equivariant Nori
//! diagrams, finite categories and their orbit quotients, DOT export.

mod build;
mod category;

pub use build::{
    build_equivariant_diagram, build_pairs_diagram, EquivariantDecl, MorphismDecl, PairsDecl,
    VarietyDecl,
};
pub use category::{
    check_poset_in_groupoids, quotient_t, CatError, CatPresentation, Composition, MorphismSpec,
    PosetVerdict, TAnalysis, TEdge, Witness,
};

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("unknown variety {0:?}")]
    UnknownVariety(String),
    #[error("declaration {0} needs {1} entries")]
    Shape(String, usize),
    #[error("invalid range: {0}")]
    Range(String),
    #[error("action on {name:?} has level 0; residually finite actions need a level >= 1")]
    Level { name: String },
}

/// A diagram vertex: `(space, sub, i)` for pairs, `(space -> base, sub, i, w)`
/// for equivariant diagrams, or a bare name for quotient classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex {
    pub space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
}

impl Vertex {
    pub fn pair(space: &str, sub: &str, i: i64) -> Vertex {
        Vertex {
            space: space.into(),
            sub: Some(sub.into()),
            base: None,
            i: Some(i),
            w: None,
            level: None,
        }
    }

    pub fn equivariant(space: &str, base: &str, sub: &str, i: i64, w: i64, level: u64) -> Vertex {
        Vertex {
            space: space.into(),
            sub: Some(sub.into()),
            base: Some(base.into()),
            i: Some(i),
            w: Some(w),
            level: Some(level),
        }
    }

    pub fn named(name: &str) -> Vertex {
        Vertex {
            space: name.into(),
            sub: None,
            base: None,
            i: None,
            w: None,
            level: None,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(sub) = &self.sub else {
            return write!(f, "{}", self.space);
        };
        write!(f, "(")?;
        match &self.base {
            Some(b) => write!(f, "{} -> {b}, {sub}", self.space)?,
            None => write!(f, "{}, {sub}", self.space)?,
        }
        if let Some(i) = self.i {
            write!(f, ", {i}")?;
        }
        if let Some(w) = self.w {
            write!(f, ", {w}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Functoriality,
    Boundary,
    Twist,
    Orbit,
}

impl EdgeKind {
    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Functoriality => "functoriality",
            EdgeKind::Boundary => "boundary",
            EdgeKind::Twist => "twist",
            EdgeKind::Orbit => "orbit",
        }
    }

    /// The `(i, w)` shift of this kind in an equivariant diagram.
    pub fn equivariant_shift(self) -> Option<(i64, i64)> {
        match self {
            EdgeKind::Functoriality => Some((0, 0)),
            EdgeKind::Boundary => Some((1, 0)),
            EdgeKind::Twist => Some((2, 1)),
            EdgeKind::Orbit => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    pub label: String,
}

/// A directed multigraph with typed edges. Vertices are unique; edge
/// endpoints always index existing vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Diagram {
    vertices: Vec<Vertex>,
    #[serde(skip)]
    index: HashMap<Vertex, usize>,
    edges: Vec<Edge>,
}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `v`, inserting it if new.
    pub fn add_vertex(&mut self, v: Vertex) -> usize {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        self.vertices.push(v.clone());
        self.index.insert(v, self.vertices.len() - 1);
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, from: Vertex, to: Vertex, kind: EdgeKind, label: &str) {
        let from = self.add_vertex(from);
        let to = self.add_vertex(to);
        self.edges.push(Edge {
            from,
            to,
            kind,
            label: label.to_string(),
        });
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// `(di, dw)` between the endpoints; absent gradings count as 0.
    pub fn shift(&self, e: &Edge) -> (i64, i64) {
        let (a, b) = (&self.vertices[e.from], &self.vertices[e.to]);
        (
            b.i.unwrap_or(0) - a.i.unwrap_or(0),
            b.w.unwrap_or(0) - a.w.unwrap_or(0),
        )
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT text. Vertices are numbered in sorted order and edges
/// are listed sorted by endpoints, kind and label.
pub fn export_dot(d: &Diagram) -> String {
    let mut order: Vec<usize> = (0..d.vertices.len()).collect();
    order.sort_by(|&a, &b| d.vertices[a].cmp(&d.vertices[b]));
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut out = String::from("digraph {\n");
    for (r, &i) in order.iter().enumerate() {
        let _ = writeln!(out, "  v{r} [label=\"{}\"];", dot_escape(&d.vertices[i].to_string()));
    }
    let mut edges: Vec<(usize, usize, EdgeKind, &str)> = d
        .edges
        .iter()
        .map(|e| (rank[&e.from], rank[&e.to], e.kind, e.label.as_str()))
        .collect();
    edges.sort();
    for (a, b, kind, label) in edges {
        let _ = writeln!(
            out,
            "  v{a} -> v{b} [kind=\"{}\", label=\"{}\"];",
            kind.name(),
            dot_escape(label)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_examples() {
        assert_eq!(export_dot(&Diagram::new()), "digraph {\n}\n");
        let mut d = Diagram::new();
        d.add_vertex(Vertex::pair("X", "Y", 0));
        let dot = export_dot(&d);
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(dot.contains("(X, Y, 0)"));
    }

    #[test]
    fn dot_is_insertion_order_independent() {
        let (a, b, c) = (Vertex::named("a"), Vertex::named("b \"q\""), Vertex::named("c"));
        let mut d1 = Diagram::new();
        d1.add_edge(a.clone(), b.clone(), EdgeKind::Orbit, "f");
        d1.add_edge(b.clone(), c.clone(), EdgeKind::Orbit, "g");
        let mut d2 = Diagram::new();
        d2.add_vertex(c.clone());
        d2.add_edge(b, c, EdgeKind::Orbit, "g");
        d2.add_edge(a, Vertex::named("b \"q\""), EdgeKind::Orbit, "f");
        assert_eq!(export_dot(&d1), export_dot(&d2));
        assert!(export_dot(&d1).contains("b \\\"q\\\""));
    }

    #[test]
    fn vertices_are_unique() {
        let mut d = Diagram::new();
        let i = d.add_vertex(Vertex::pair("X", "Y", 0));
        assert_eq!(d.add_vertex(Vertex::pair("X", "Y", 0)), i);
        assert_eq!(d.vertices().len(), 1);
        let v = Vertex::equivariant("X", "B", "Y", 1, 2, 3);
        assert_eq!(v.to_string(), "(X -> B, Y, 1, 2)");
    }
}
