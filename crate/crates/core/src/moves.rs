//! Collapse and expansion moves, with reducedness and deformation-space checks.
//!
//! Collapsing an edge `e` whose group fills `G_u` merges `u` into the other
//! endpoint; expansion is the inverse and pulls a chosen set of edge ends off
//! a vertex onto a new one.

use crate::graph::{End, GraphOfGroups, Vertex};
use crate::normal::is_elliptic;
use crate::rational::{fmt_rational, Rational};
use crate::word::{BaseWord, Letter, Word};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error")]
pub enum MoveError {
    #[error("edge `{edge}` is a loop")]
    LoopCollapse { edge: String },
    #[error("edge `{edge}` has |index| > 1 at both ends")]
    EdgeGroupNotFull { edge: String },
    #[error("collapsing `{edge}` would leave a single point")]
    LastEdgeOfMinimalAction { edge: String },
    #[error("unknown edge `{edge}`")]
    UnknownEdge { edge: String },
    #[error("unknown vertex `{vertex}`")]
    UnknownVertex { vertex: String },
    #[error("edge `{edge}` has no {end:?} end at the expanded vertex")]
    EndNotAtVertex { edge: String, end: End },
    #[error("index of `{edge}` is not divisible by {k}")]
    DivisibilityFailure { edge: String, k: i64 },
    #[error("subgroup index {k} is not allowed here")]
    BadIndex { k: i64 },
    #[error("id `{id}` already in use")]
    DuplicateId { id: String },
    #[error("expansion would create a vertex of valence one with full edge group")]
    NonMinimal,
    #[error("new edge length must be positive")]
    NonpositiveLength,
}

/// Whether the graph admits no collapse, with the first collapsible edge
/// otherwise.
pub fn is_reduced(g: &GraphOfGroups) -> (bool, Option<usize>) {
    let witness = (0..g.edges.len()).find(|&i| collapse_side(g, i).is_some());
    (witness.is_none(), witness)
}

/// The vertex absorbed by collapsing `e`, and the survivor. Prefers to
/// absorb `to(e)`.
fn collapse_side(g: &GraphOfGroups, e: usize) -> Option<(usize, usize)> {
    let ed = &g.edges[e];
    if ed.is_loop() {
        None
    } else if ed.index_to.abs() == 1 {
        Some((ed.to, ed.from))
    } else if ed.index_from.abs() == 1 {
        Some((ed.from, ed.to))
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum MoveKind {
    Collapse { edge: String },
    Expansion { vertex: String, spec: ExpansionSpec },
}

/// Audit record of one move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub before_volume: Rational,
    pub after_volume: Rational,
    /// Graph letters of the old graph and what they become.
    pub rewrites: BTreeMap<String, String>,
}

impl MoveRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "move": self.kind,
            "before_volume": fmt_rational(&self.before_volume),
            "after_volume": fmt_rational(&self.after_volume),
            "marking_update": self.rewrites,
        })
    }
}

/// Renumbers vertices and edges after a removal; `None` marks a removed item.
struct Renumber {
    vertex: Vec<usize>,
    edge: Vec<Option<usize>>,
}

fn rewrite(w: &Word, f: impl Fn(Letter, &mut Word)) -> Word {
    let mut out = Word::identity();
    for &l in w.letters() {
        f(l, &mut out);
    }
    out
}

pub fn collapse_edge(g: &GraphOfGroups, e: usize) -> Result<(GraphOfGroups, MoveRecord), MoveError> {
    let ed = &g.edges[e];
    if ed.is_loop() {
        return Err(MoveError::LoopCollapse { edge: ed.id.clone() });
    }
    let (u, keep) = collapse_side(g, e).ok_or_else(|| MoveError::EdgeGroupNotFull {
        edge: ed.id.clone(),
    })?;
    if g.edges.len() == 1 {
        return Err(MoveError::LastEdgeOfMinimalAction { edge: ed.id.clone() });
    }
    let factor = ed
        .index_from
        .checked_mul(ed.index_to)
        .expect("index overflow");

    // the survivor takes the base position when the base is absorbed
    let mut order: Vec<usize> = (0..g.vertices.len()).filter(|&v| v != u).collect();
    if u == g.base() {
        order.retain(|&v| v != keep);
        order.insert(0, keep);
    }
    let mut vmap = vec![0; g.vertices.len()];
    for (new, &old) in order.iter().enumerate() {
        vmap[old] = new;
    }
    vmap[u] = vmap[keep];
    let mut emap = vec![None; g.edges.len()];
    let mut k = 0;
    for (i, slot) in emap.iter_mut().enumerate() {
        if i != e {
            *slot = Some(k);
            k += 1;
        }
    }
    let rn = Renumber { vertex: vmap, edge: emap };

    let vertices: Vec<Vertex> = order.iter().map(|&v| g.vertices[v].clone()).collect();
    let edges = g
        .edges
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, f)| {
            let mut f = f.clone();
            if f.from == u {
                f.index_from = f.index_from.checked_mul(factor).expect("index overflow");
            }
            if f.to == u {
                f.index_to = f.index_to.checked_mul(factor).expect("index overflow");
            }
            f.from = rn.vertex[f.from];
            f.to = rn.vertex[f.to];
            f
        })
        .collect();
    let mut out = GraphOfGroups::new(vertices, edges);
    if g.in_tree(e) {
        let mut tree: Vec<usize> = g.spanning_tree.iter().filter_map(|&i| rn.edge[i]).collect();
        tree.sort_unstable();
        out.spanning_tree = tree;
    }
    let letter = |l: Letter, w: &mut Word| match l {
        Letter::Vertex(x, c) if x == u => {
            w.push(Letter::Vertex(rn.vertex[keep], c.checked_mul(factor).expect("exponent overflow")))
        }
        Letter::Vertex(x, c) => w.push(Letter::Vertex(rn.vertex[x], c)),
        Letter::Edge { edge, inv } => {
            if let Some(n) = rn.edge[edge] {
                w.push(Letter::edge(n, inv));
            }
        }
    };
    out.marking = g.marking.as_ref().map(|m| {
        m.iter()
            .map(|(k, w)| (k.clone(), rewrite(w, &letter)))
            .collect()
    });

    let mut rewrites = BTreeMap::new();
    if g.is_cyclic(u) {
        rewrites.insert(
            format!("a_{}", g.vertices[u].id),
            Word::from_letters(vec![Letter::Vertex(rn.vertex[keep], factor)]).display(&out),
        );
    }
    rewrites.insert(ed.id.clone(), "1".to_string());
    let record = MoveRecord {
        kind: MoveKind::Collapse { edge: ed.id.clone() },
        before_volume: g.volume(),
        after_volume: out.volume(),
        rewrites,
    };
    Ok((out, record))
}

pub fn collapse_edge_by_id(g: &GraphOfGroups, id: &str) -> Result<(GraphOfGroups, MoveRecord), MoveError> {
    let e = g
        .edge_index(id)
        .ok_or_else(|| MoveError::UnknownEdge { edge: id.to_string() })?;
    collapse_edge(g, e)
}

/// One edge end moving to the new vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: String,
    pub end: End,
}

/// Explicit expansion data. The new edge runs from the expanded vertex `v`
/// to the new vertex `w` with indices `(k, 1)`; migrating ends move to `w`
/// and have their index divided by `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    #[serde(default = "one")]
    pub k: i64,
    #[serde(default)]
    pub migrate: Vec<EdgeEnd>,
    #[serde(with = "crate::rational")]
    pub length: Rational,
    #[serde(default)]
    pub new_vertex: Option<String>,
    #[serde(default)]
    pub new_edge: Option<String>,
}

fn one() -> i64 {
    1
}

fn fresh(taken: impl Fn(&str) -> bool, stem: &str) -> String {
    if !taken(stem) {
        return stem.to_string();
    }
    (1..).map(|i| format!("{stem}{i}")).find(|s| !taken(s)).unwrap()
}

pub fn expand_vertex(
    g: &GraphOfGroups,
    v: usize,
    spec: &ExpansionSpec,
) -> Result<(GraphOfGroups, MoveRecord), MoveError> {
    let k = spec.k;
    if k == 0 || (!g.is_cyclic(v) && k.abs() != 1) {
        return Err(MoveError::BadIndex { k });
    }
    if !spec.length.is_positive() {
        return Err(MoveError::NonpositiveLength);
    }
    let id_taken = |s: &str| g.vertex_index(s).is_some() || g.edge_index(s).is_some();
    let w_id = match &spec.new_vertex {
        Some(s) if id_taken(s) => return Err(MoveError::DuplicateId { id: s.clone() }),
        Some(s) => s.clone(),
        None => fresh(id_taken, &format!("{}'", g.vertices[v].id)),
    };
    let e_id = match &spec.new_edge {
        Some(s) if id_taken(s) || *s == w_id => return Err(MoveError::DuplicateId { id: s.clone() }),
        Some(s) => s.clone(),
        None => fresh(|s| id_taken(s) || s == w_id, &format!("e_{}", g.vertices[v].id)),
    };

    let mut moving: Vec<(usize, End)> = Vec::new();
    for m in &spec.migrate {
        let f = g
            .edge_index(&m.edge)
            .ok_or_else(|| MoveError::UnknownEdge { edge: m.edge.clone() })?;
        if g.endpoint(f, m.end) != v {
            return Err(MoveError::EndNotAtVertex {
                edge: m.edge.clone(),
                end: m.end,
            });
        }
        if g.index_at(f, m.end) % k != 0 {
            return Err(MoveError::DivisibilityFailure {
                edge: m.edge.clone(),
                k,
            });
        }
        if !moving.contains(&(f, m.end)) {
            moving.push((f, m.end));
        }
    }
    let staying = g.valence(v) - moving.len();
    if moving.is_empty() || (staying == 0 && k.abs() == 1) {
        return Err(MoveError::NonMinimal);
    }

    let w = g.vertices.len();
    let ne = g.edges.len();
    let mut out = g.clone();
    out.vertices.push(Vertex {
        id: w_id.clone(),
        group: g.vertices[v].group,
    });
    for &(f, end) in &moving {
        let ed = &mut out.edges[f];
        match end {
            End::From => {
                ed.from = w;
                ed.index_from /= k;
            }
            End::To => {
                ed.to = w;
                ed.index_to /= k;
            }
        }
    }
    out.edges.push(crate::graph::Edge {
        id: e_id.clone(),
        from: v,
        to: w,
        index_from: k,
        index_to: 1,
        length: spec.length.clone(),
    });
    out.spanning_tree.push(ne);

    let migrated = |f: usize, end: End| moving.contains(&(f, end));
    let letter = |l: Letter, out: &mut Word| match l {
        Letter::Edge { edge, inv } => {
            let (left, right) = if inv { (End::From, End::To) } else { (End::To, End::From) };
            if migrated(edge, left) {
                out.push(Letter::edge(ne, true));
            }
            out.push(l);
            if migrated(edge, right) {
                out.push(Letter::edge(ne, false));
            }
        }
        _ => out.push(l),
    };
    out.marking = g.marking.as_ref().map(|m| {
        m.iter()
            .map(|(name, w)| (name.clone(), rewrite(w, &letter)))
            .collect()
    });

    let mut rewrites = BTreeMap::new();
    for &(f, _) in &moving {
        let mut img = Word::identity();
        letter(Letter::edge(f, false), &mut img);
        rewrites.insert(g.edges[f].id.clone(), img.display(&out));
    }
    let mut spec = spec.clone();
    spec.new_vertex = Some(w_id);
    spec.new_edge = Some(e_id);
    let record = MoveRecord {
        kind: MoveKind::Expansion {
            vertex: g.vertices[v].id.clone(),
            spec,
        },
        before_volume: g.volume(),
        after_volume: out.volume(),
        rewrites,
    };
    Ok((out, record))
}

pub fn expand_vertex_by_id(
    g: &GraphOfGroups,
    id: &str,
    spec: &ExpansionSpec,
) -> Result<(GraphOfGroups, MoveRecord), MoveError> {
    let v = g
        .vertex_index(id)
        .ok_or_else(|| MoveError::UnknownVertex { vertex: id.to_string() })?;
    expand_vertex(g, v, spec)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    Disagree(BaseWord),
}

/// Compares the elliptic/hyperbolic classification of each test word
/// through both markings.
pub fn same_deformation_space(
    g1: &GraphOfGroups,
    g2: &GraphOfGroups,
    words: &[BaseWord],
) -> Result<Agreement, crate::graph::MarkingError> {
    for w in words {
        let a = is_elliptic(g1, &g1.mark(w)?).expect("marked words are loops");
        let b = is_elliptic(g2, &g2.mark(w)?).expect("marked words are loops");
        if a != b {
            return Ok(Agreement::Disagree(w.clone()));
        }
    }
    Ok(Agreement::Agree)
}
