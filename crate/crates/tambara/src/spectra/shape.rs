//! Stratified shape graphs of spectrum tables and homeomorphism testing.
//!
//! The finite model of a spectrum: one vertex per (family, stratum) with
//! identified vertices merged, edges the verified inclusions (closure goes
//! up: an edge `P -> Q` means `P ⊆ Q`, i.e. `Q` lies in the closure of
//! `P`). Two tables are homeomorphic when their graphs admit a
//! stratum-kind-respecting poset isomorphism, found by exhaustive
//! backtracking; adequacy rests on the family generators being affine in q.

use crate::spectra::families::{SpectrumTable, Stratum};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StratumKind {
    Zero,
    Special,
    Generic,
}

fn kind_of(s: Stratum) -> StratumKind {
    match s {
        Stratum::Zero => StratumKind::Zero,
        Stratum::Special(_) => StratumKind::Special,
        Stratum::Generic => StratumKind::Generic,
    }
}

#[derive(Debug, Clone)]
pub struct ShapeVertex {
    /// Merged (family, stratum) labels.
    pub labels: Vec<(String, Stratum)>,
    pub kind: StratumKind,
}

#[derive(Debug, Clone)]
pub struct ShapeGraph {
    pub vertices: Vec<ShapeVertex>,
    /// Strict specialization relation, transitively closed.
    pub edges: BTreeSet<(usize, usize)>,
}

pub fn shape_graph(table: &SpectrumTable) -> ShapeGraph {
    let strata = &table.strata;
    // collect (family, stratum) points
    let mut points: Vec<(String, Stratum)> = Vec::new();
    for fam in &table.families {
        for s in fam.present_strata(strata) {
            points.push((fam.name.clone(), s));
        }
    }
    // union-find over identifications (same-stratum equalities)
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] == i {
            i
        } else {
            let r = find(parent, parent[i]);
            parent[i] = r;
            r
        }
    }
    let index_of = |points: &[(String, Stratum)], name: &str, s: Stratum| {
        points.iter().position(|(n, ps)| n == name && *ps == s)
    };
    for id in &table.identifications {
        if let (Some(a), Some(b)) = (
            index_of(&points, &id.a, id.stratum),
            index_of(&points, &id.b, id.stratum),
        ) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices: Vec<ShapeVertex> = Vec::new();
    for i in 0..points.len() {
        let r = find(&mut parent, i);
        let v = *class_of.entry(r).or_insert_with(|| {
            vertices.push(ShapeVertex {
                labels: Vec::new(),
                kind: kind_of(points[r].1),
            });
            vertices.len() - 1
        });
        vertices[v].labels.push(points[i].clone());
    }
    let vertex_of = |name: &str, s: Stratum| -> Option<usize> {
        vertices
            .iter()
            .position(|v| v.labels.iter().any(|(n, ps)| n == name && *ps == s))
    };
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in &table.inclusions {
        if let (Some(a), Some(b)) = (vertex_of(&e.from.0, e.from.1), vertex_of(&e.to.0, e.to.1)) {
            if a != b {
                edges.insert((a, b));
            }
        }
    }
    // transitive closure
    loop {
        let mut added = Vec::new();
        for &(a, b) in &edges {
            for &(c, d) in &edges {
                if b == c && a != d && !edges.contains(&(a, d)) {
                    added.push((a, d));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        edges.extend(added);
    }
    ShapeGraph { vertices, edges }
}

impl ShapeGraph {
    fn degree_signature(&self, v: usize) -> (StratumKind, usize, usize) {
        let indeg = self.edges.iter().filter(|(_, b)| *b == v).count();
        let outdeg = self.edges.iter().filter(|(a, _)| *a == v).count();
        (self.vertices[v].kind, indeg, outdeg)
    }
}

/// Stratum-respecting poset isomorphism, by exhaustive backtracking with
/// degree pruning (graphs here stay well under 30 vertices).
pub fn homeomorphic(a: &ShapeGraph, b: &ShapeGraph) -> bool {
    let n = a.vertices.len();
    if n != b.vertices.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let siga: Vec<_> = (0..n).map(|v| a.degree_signature(v)).collect();
    let sigb: Vec<_> = (0..n).map(|v| b.degree_signature(v)).collect();
    {
        let mut sa = siga.clone();
        let mut sb = sigb.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return false;
        }
    }
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn consistent(a: &ShapeGraph, b: &ShapeGraph, assignment: &[Option<usize>], v: usize, w: usize) -> bool {
        for (u, img) in assignment.iter().enumerate() {
            let Some(wu) = img else { continue };
            if a.edges.contains(&(v, u)) != b.edges.contains(&(w, *wu)) {
                return false;
            }
            if a.edges.contains(&(u, v)) != b.edges.contains(&(*wu, w)) {
                return false;
            }
        }
        true
    }
    fn backtrack(
        a: &ShapeGraph,
        b: &ShapeGraph,
        siga: &[(StratumKind, usize, usize)],
        sigb: &[(StratumKind, usize, usize)],
        assignment: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        v: usize,
    ) -> bool {
        if v == a.vertices.len() {
            return true;
        }
        for w in 0..b.vertices.len() {
            if used[w] || siga[v] != sigb[w] || !consistent(a, b, assignment, v, w) {
                continue;
            }
            assignment[v] = Some(w);
            used[w] = true;
            if backtrack(a, b, siga, sigb, assignment, used, v + 1) {
                return true;
            }
            assignment[v] = None;
            used[w] = false;
        }
        false
    }
    backtrack(a, b, &siga, &sigb, &mut assignment, &mut used, 0)
}

fn vertex_label(v: &ShapeVertex) -> String {
    let mut names: Vec<String> = v
        .labels
        .iter()
        .map(|(n, s)| match s {
            Stratum::Zero => format!("{n}_0"),
            Stratum::Special(p) => format!("{n}_{p}"),
            Stratum::Generic => format!("{n}_q"),
        })
        .collect();
    names.sort();
    names.dedup();
    names.join(" = ")
}

/// DOT rendering: specialization arrows point upward (`P -> Q` for
/// `P ⊆ Q`), one node per merged (family, stratum) class.
pub fn to_dot(table: &SpectrumTable) -> String {
    let g = shape_graph(table);
    let mut out = String::new();
    out.push_str("digraph spectrum {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str(&format!(
        "  label=\"Spec^({},{})({})\";\n",
        table.om_name, table.oa_name, table.diagram_name
    ));
    for (i, v) in g.vertices.iter().enumerate() {
        out.push_str(&format!("  v{i} [label=\"{}\"];\n", vertex_label(v)));
    }
    // render covering edges only (drop implied compositions)
    for &(a, b) in &g.edges {
        let implied = g
            .edges
            .iter()
            .any(|&(x, y)| x == a && y != b && g.edges.contains(&(y, b)));
        if !implied {
            out.push_str(&format!("  v{a} -> v{b};\n"));
        }
    }
    out.push_str("}\n");
    out
}
