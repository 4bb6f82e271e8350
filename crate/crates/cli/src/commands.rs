use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use birmod_core::burnside::scenarios::BlowupScenario;
use birmod_core::burnside::{
    boundary_snc, check_grading, tower_boundary_check, BurnClass, EdgeMap, StratifiedModel,
};
use birmod_core::laws::{check_laws, Grid, OperatorReport, Suite};
use birmod_core::linalg::{rank_q, snf, DEFAULT_SNF_MAX_COLS};
use birmod_core::nori::{
    build_equivariant_diagram, build_pairs_diagram, check_poset_in_groupoids, export_dot,
    quotient_t, CatPresentation, Diagram, EdgeKind, EquivariantDecl, PairsDecl,
};
use birmod_core::ops::{self, OpSpec};
use birmod_core::relations::{relation_matrix, relation_rank_streaming};
use birmod_core::sum::AnySum;
use birmod_core::wire::{parse_sum, sum_to_json, Ring};

use crate::report::{Report, VERSION};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn rank(n: usize, modulus: u64, minus: bool, ring: Ring) -> Result<Report> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    if modulus < 2 {
        bail!("--N must be at least 2");
    }
    let (basis, relation_rank, factors) = match ring {
        Ring::Q => {
            let (basis, r) = relation_rank_streaming(n, modulus, minus)?;
            (basis, r, None)
        }
        Ring::Z => {
            let rm = relation_matrix(n, modulus, minus)?;
            let m = rm.matrix();
            let factors = if m.ncols() <= DEFAULT_SNF_MAX_COLS {
                Some(snf(m)?)
            } else {
                None
            };
            (rm.basis().len(), rank_q(m), factors)
        }
    };
    let rank = basis - relation_rank;
    let torsion: Option<Vec<String>> = factors.as_ref().map(|f| {
        f.iter()
            .filter(|d| **d != 1.into())
            .map(ToString::to_string)
            .collect()
    });
    let name = if minus { "M^-" } else { "M" };
    let mut text = format!(
        "{name}_{n}(Z/{modulus}): basis {basis}, relation rank {relation_rank}, rank {rank}\n"
    );
    match (&torsion, ring) {
        (Some(t), _) => {
            let _ = writeln!(text, "invariant factors: ({})", t.join(", "));
        }
        (None, Ring::Z) => {
            let _ = writeln!(text, "invariant factors skipped: more than {DEFAULT_SNF_MAX_COLS} columns");
        }
        (None, Ring::Q) => {}
    }
    let result = json!({
        "n": n,
        "N": modulus,
        "minus": minus,
        "ring": if ring == Ring::Z { "z" } else { "q" },
        "basis": basis,
        "relation_rank": relation_rank,
        "rank": rank,
        "invariant_factors": torsion,
    });
    Ok(Report::new("rank", text, result))
}

pub fn apply(op: OpSpec, input: &Path, output: Option<&Path>, ring: Ring) -> Result<Report> {
    let v: Value = read_json(input)?;
    let x = parse_sum(&v, ring).with_context(|| format!("reading a sum from {}", input.display()))?;
    let y = ops::apply(op, &x)?;
    let mut sum = sum_to_json(&y);
    if let Some(path) = output {
        let mut file = sum.clone();
        file["birmod"] = json!(VERSION);
        write_file(path, &pretty(&file))?;
    }
    let text = match &y {
        AnySum::Int(s) => format!("{s}\n"),
        AnySum::Rat(s) => format!("{s}\n"),
    };
    sum["op"] = json!(op.to_string());
    Ok(Report::new("apply", text, sum))
}

fn laws_text(r: &OperatorReport) -> String {
    let mut t = format!(
        "suite {}: n <= {}, N <= {}, k in {:?}, l in {:?}\n",
        r.suite, r.grid.max_n, r.grid.max_modulus, r.grid.ks, r.grid.ells
    );
    for l in &r.laws {
        let status = match (l.asserted, l.failures) {
            (false, _) => "INFO",
            (true, 0) => "PASS",
            (true, _) => "FAIL",
        };
        let _ = writeln!(
            t,
            "{status} {}: {} ({} instances, {} failures)",
            l.id, l.description, l.instances, l.failures
        );
        for c in &l.counterexamples {
            let ell = c.ell.map(|e| format!(" l={e}")).unwrap_or_default();
            let _ = writeln!(
                t,
                "    n={} N={} k={}{ell} on {}: {} != {}",
                c.n, c.modulus, c.k, c.input, c.lhs, c.rhs
            );
        }
    }
    for note in &r.notes {
        let _ = writeln!(t, "note: {note}");
    }
    let _ = writeln!(t, "{}", if r.passed() { "all asserted laws hold" } else { "asserted laws fail" });
    t
}

pub fn laws(suite: Suite, max_n: usize, max_modulus: u64, ks: Vec<u64>, ells: Vec<u64>) -> Result<Report> {
    let grid = Grid { max_n, max_modulus, ks, ells };
    let r = check_laws(suite, &grid)?;
    Ok(Report::new("laws", laws_text(&r), serde_json::to_value(&r)?).with_passed(r.passed()))
}

fn class_text(c: &BurnClass) -> String {
    let mut t = String::new();
    for (g, v) in c.iter() {
        let _ = writeln!(t, "  {v:+} {g}  dim {}", g.dim);
    }
    if c.is_zero() {
        t.push_str("  0\n");
    }
    t
}

pub fn boundary(path: &Path) -> Result<Report> {
    let model: StratifiedModel = read_json(path)?;
    let d = boundary_snc(&model)?;
    let grade = model.dim.checked_sub(1);
    let graded = grade.map_or(d.is_zero(), |g| check_grading(&d, g));
    let mut text = format!(
        "boundary of ({}, {}) in degree {}:\n",
        model.ambient,
        model.boundary,
        grade.map_or("-1".to_string(), |g| g.to_string())
    );
    text.push_str(&class_text(&d));
    if !graded {
        text.push_str("grading violated\n");
    }
    let result = json!({
        "model": model,
        "boundary": d,
        "grades": d.grades(),
        "graded": graded,
    });
    Ok(Report::new("burnside boundary", text, result).with_passed(graded))
}

pub fn pushforward(path: &Path) -> Result<Report> {
    let s: BlowupScenario = read_json(path)?;
    let (pushed, expected) = s.run()?;
    let holds = pushed == expected;
    let mut text = String::from("pushforward of the modified boundary:\n");
    text.push_str(&class_text(&pushed));
    text.push_str("boundary of the original pair:\n");
    text.push_str(&class_text(&expected));
    let _ = writeln!(text, "{}", if holds { "equal" } else { "different" });
    let result = json!({"pushed": pushed, "expected": expected, "equal": holds});
    Ok(Report::new("burnside pushforward", text, result).with_passed(holds))
}

#[derive(Deserialize)]
struct TowerFile {
    x: StratifiedModel,
    y: StratifiedModel,
    edge: EdgeMap,
}

pub fn tower(path: &Path) -> Result<Report> {
    let f: TowerFile = read_json(path)?;
    let v = tower_boundary_check(&f.x, &f.y, &f.edge)?;
    let mut text = format!("grades {} and {}", v.grades.0, v.grades.1);
    text.push_str(if v.grades_ok { "\n" } else { " (grading violated)\n" });
    text.push_str("image of the top boundary:\n");
    text.push_str(&class_text(&v.image));
    text.push_str("boundary of the lower pair:\n");
    text.push_str(&class_text(&v.expected));
    let _ = writeln!(text, "verdict: {}", v.holds);
    Ok(Report::new("burnside tower", text, serde_json::to_value(&v)?).with_passed(v.holds))
}

pub struct DiagramOut<'a> {
    pub dot: Option<&'a Path>,
    pub analysis: Option<&'a Path>,
}

impl DiagramOut<'_> {
    /// Writes the requested files; DOT goes into the text summary when no
    /// file is given.
    fn finish(&self, d: &Diagram, analysis: &Value, mut text: String) -> Result<String> {
        let dot = export_dot(d);
        match self.dot {
            Some(p) => write_file(p, &dot)?,
            None => text.push_str(&dot),
        }
        if let Some(p) = self.analysis {
            let mut v = analysis.clone();
            v["birmod"] = json!(VERSION);
            write_file(p, &pretty(&v))?;
        }
        Ok(text)
    }
}

fn diagram_analysis(d: &Diagram) -> (Value, String) {
    let mut counts = BTreeMap::new();
    let mut edges = Vec::new();
    let mut text = format!("{} vertices, {} edges\n", d.vertices().len(), d.edges().len());
    for kind in [EdgeKind::Functoriality, EdgeKind::Boundary, EdgeKind::Twist] {
        let c = d.count_kind(kind);
        counts.insert(kind.name(), c);
        let _ = writeln!(text, "  {}: {c}", kind.name());
    }
    let mut sorted: Vec<_> = d.edges().iter().collect();
    sorted.sort_by_key(|e| (&d.vertices()[e.from], &d.vertices()[e.to], e.kind, &e.label));
    for e in sorted {
        let (di, dw) = d.shift(e);
        let (a, b) = (d.vertices()[e.from].to_string(), d.vertices()[e.to].to_string());
        let _ = writeln!(text, "  {a} -> {b} [{}] {} shift ({di:+}, {dw:+})", e.kind.name(), e.label);
        edges.push(json!({"from": a, "to": b, "kind": e.kind, "label": e.label, "shift": [di, dw]}));
    }
    let vertices: Vec<String> = {
        let mut v: Vec<_> = d.vertices().iter().collect();
        v.sort();
        v.into_iter().map(ToString::to_string).collect()
    };
    (json!({"vertices": vertices, "edges": edges, "counts": counts}), text)
}

pub fn pairs_diagram(path: &Path, out: DiagramOut, fstar_shift: Option<i64>) -> Result<Report> {
    let mut decl: PairsDecl = read_json(path)?;
    if let Some(s) = fstar_shift {
        decl.fstar_shift = s;
    }
    let d = build_pairs_diagram(&decl)?;
    let (analysis, text) = diagram_analysis(&d);
    let text = out.finish(&d, &analysis, text)?;
    Ok(Report::new("diagram", text, analysis))
}

pub fn equivariant_diagram(path: &Path, out: DiagramOut) -> Result<Report> {
    let decl: EquivariantDecl = read_json(path)?;
    let d = build_equivariant_diagram(&decl)?;
    let (analysis, text) = diagram_analysis(&d);
    let shifts_ok = d.edges().iter().all(|e| e.kind.equivariant_shift() == Some(d.shift(e)));
    let text = out.finish(&d, &analysis, text)?;
    Ok(Report::new("diagram", text, analysis).with_passed(shifts_ok))
}

pub fn category_diagram(path: &Path, out: DiagramOut, strict: bool) -> Result<Report> {
    let c: CatPresentation = read_json(path)?;
    let v = check_poset_in_groupoids(&c);
    let (d, t) = quotient_t(&c);
    let failed: Vec<&str> = [("a", v.groupoid_classes), ("b", v.single_orbits)]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(c, _)| c)
        .collect();
    let verdict = if failed.is_empty() {
        "holds".to_string()
    } else {
        format!("fails ({})", failed.join(", "))
    };
    let mut text = format!("poset in groupoids: {verdict}\n");
    for w in &v.witnesses {
        let _ = writeln!(text, "  ({}) {}: {}", w.condition, w.morphisms.join(", "), w.note);
    }
    let _ = writeln!(text, "thin: {}", v.thin);
    let _ = writeln!(
        text,
        "T: {} classes, {} edges, unique top: {}",
        t.classes.len(),
        t.edges.len(),
        t.unique_top
    );
    for p in &t.longest_paths {
        let _ = writeln!(text, "  longest path: {}", p.join(" -> "));
    }
    let analysis = json!({"verdict": verdict, "predicate": v, "quotient": t});
    let text = out.finish(&d, &analysis, text)?;
    Ok(Report::new("diagram", text, analysis).with_passed(!strict || v.holds))
}
