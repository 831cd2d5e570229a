//! Finite graphs of groups: the quotient data of a cocompact G-tree.
//!
//! Vertex groups are trivial or infinite cyclic. An edge `e` from `u` to `v`
//! with indices `(p, q)` carries the relation `e a_u^p e^-1 = a_v^q`, so the
//! edge group sits with index `|p|` in `G_u` and `|q|` in `G_v`.

use crate::rational::{self, fmt_rational, Rational};
use crate::word::{BaseWord, Letter, Word};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "1")]
    Trivial,
    #[serde(rename = "Z")]
    InfiniteCyclic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub group: GroupKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub index_from: i64,
    pub index_to: i64,
    pub length: Rational,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

/// Which end of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    From,
    To,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error")]
pub enum GraphError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate id `{id}`")]
    DuplicateId { id: String },
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("edge `{edge}` has a zero index")]
    ZeroIndex { edge: String },
    #[error("edge `{edge}` has nonpositive length")]
    NonpositiveLength { edge: String },
    #[error("edge `{edge}` has |index| > 1 at trivial vertex `{vertex}`")]
    TrivialVertexWithIndex { edge: String, vertex: String },
    #[error("edge `{edge}` joins a trivial and an infinite cyclic vertex")]
    MixedEdgeGroup { edge: String },
    #[error("vertex `{vertex}` is not reachable from the base vertex")]
    Disconnected { vertex: String },
    #[error("bad spanning tree: {reason}")]
    BadSpanningTree { reason: String },
    #[error("marking of `{generator}` is invalid: {reason}")]
    BadMarking { generator: String, reason: String },
}

/// Every violation found by [`GraphOfGroups::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{}", .errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationReport {
    pub errors: Vec<GraphError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Edge indices forming a spanning tree.
    pub spanning_tree: Vec<usize>,
    /// Base-group generator name to loop word at the base vertex.
    pub marking: Option<BTreeMap<String, Word>>,
}

impl GraphOfGroups {
    /// Builds a graph with an automatically chosen spanning tree and no marking.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        let mut g = GraphOfGroups {
            vertices,
            edges,
            spanning_tree: Vec::new(),
            marking: None,
        };
        g.spanning_tree = g.bfs_spanning_tree();
        g
    }

    /// The base vertex is the first listed vertex.
    pub fn base(&self) -> usize {
        0
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn is_cyclic(&self, v: usize) -> bool {
        self.vertices[v].group == GroupKind::InfiniteCyclic
    }

    pub fn all_trivial(&self) -> bool {
        self.vertices.iter().all(|v| v.group == GroupKind::Trivial)
    }

    pub fn volume(&self) -> Rational {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    pub fn lengths(&self) -> Vec<Rational> {
        self.edges.iter().map(|e| e.length.clone()).collect()
    }

    /// Index of edge `e` at end `end`.
    pub fn index_at(&self, e: usize, end: End) -> i64 {
        match end {
            End::From => self.edges[e].index_from,
            End::To => self.edges[e].index_to,
        }
    }

    pub fn endpoint(&self, e: usize, end: End) -> usize {
        match end {
            End::From => self.edges[e].from,
            End::To => self.edges[e].to,
        }
    }

    /// Edge ends incident to `v`, loops contributing both ends.
    pub fn ends_at(&self, v: usize) -> Vec<(usize, End)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push((i, End::From));
            }
            if e.to == v {
                out.push((i, End::To));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.ends_at(v).len()
    }

    /// Homothety: every edge length multiplied by `k`.
    pub fn scaled(&self, k: &Rational) -> GraphOfGroups {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length = &e.length * k;
        }
        g
    }

    pub fn with_lengths(&self, lengths: &[Rational]) -> GraphOfGroups {
        assert_eq!(lengths.len(), self.edges.len());
        let mut g = self.clone();
        for (e, l) in g.edges.iter_mut().zip(lengths) {
            e.length = l.clone();
        }
        g
    }

    pub fn with_marking(mut self, marking: BTreeMap<String, Word>) -> Self {
        self.marking = Some(marking);
        self
    }

    fn bfs_spanning_tree(&self) -> Vec<usize> {
        let n = self.vertices.len();
        if n == 0 {
            return Vec::new();
        }
        let mut seen = vec![false; n];
        let mut tree = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                let other = if e.from == v {
                    e.to
                } else if e.to == v {
                    e.from
                } else {
                    continue;
                };
                if other < n && !seen[other] {
                    seen[other] = true;
                    tree.push(i);
                    queue.push_back(other);
                }
            }
        }
        tree.sort_unstable();
        tree
    }

    /// Replaces the spanning tree by the canonical BFS tree (lowest edge first).
    pub fn reset_spanning_tree(&mut self) {
        self.spanning_tree = self.bfs_spanning_tree();
    }

    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut errors = Vec::new();
        if self.vertices.is_empty() {
            errors.push(GraphError::EmptyGraph);
            return Err(ValidationReport { errors });
        }
        let mut ids: HashMap<&str, ()> = HashMap::new();
        for id in self
            .vertices
            .iter()
            .map(|v| v.id.as_str())
            .chain(self.edges.iter().map(|e| e.id.as_str()))
        {
            if ids.insert(id, ()).is_some() {
                errors.push(GraphError::DuplicateId { id: id.to_string() });
            }
        }
        let n = self.vertices.len();
        for e in &self.edges {
            for v in [e.from, e.to] {
                if v >= n {
                    errors.push(GraphError::UnknownVertex {
                        edge: e.id.clone(),
                        vertex: v.to_string(),
                    });
                }
            }
            if e.index_from == 0 || e.index_to == 0 {
                errors.push(GraphError::ZeroIndex { edge: e.id.clone() });
            }
            if !e.length.is_positive() {
                errors.push(GraphError::NonpositiveLength { edge: e.id.clone() });
            }
            if e.from < n && e.to < n {
                let kf = self.vertices[e.from].group;
                let kt = self.vertices[e.to].group;
                for (v, idx) in [(e.from, e.index_from), (e.to, e.index_to)] {
                    if self.vertices[v].group == GroupKind::Trivial && idx.abs() > 1 {
                        errors.push(GraphError::TrivialVertexWithIndex {
                            edge: e.id.clone(),
                            vertex: self.vertices[v].id.clone(),
                        });
                    }
                }
                if kf != kt {
                    errors.push(GraphError::MixedEdgeGroup { edge: e.id.clone() });
                }
            }
        }
        if errors.iter().any(|e| matches!(e, GraphError::UnknownVertex { .. })) {
            return Err(ValidationReport { errors });
        }
        let reach = self.bfs_spanning_tree();
        let mut seen = vec![false; n];
        seen[0] = true;
        for &i in &reach {
            seen[self.edges[i].from] = true;
            seen[self.edges[i].to] = true;
        }
        for (v, s) in seen.iter().enumerate() {
            if !s {
                errors.push(GraphError::Disconnected {
                    vertex: self.vertices[v].id.clone(),
                });
            }
        }
        if let Err(reason) = self.check_spanning_tree() {
            errors.push(GraphError::BadSpanningTree { reason });
        }
        if let Some(m) = &self.marking {
            for (gen, w) in m {
                if let Err(reason) = w.check_loop(self, Some(self.base())) {
                    errors.push(GraphError::BadMarking {
                        generator: gen.clone(),
                        reason,
                    });
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { errors })
        }
    }

    fn check_spanning_tree(&self) -> Result<(), String> {
        let n = self.vertices.len();
        if self.spanning_tree.len() + 1 != n {
            return Err(format!(
                "{} edges given, a spanning tree on {} vertices needs {}",
                self.spanning_tree.len(),
                n,
                n - 1
            ));
        }
        // union-find
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &i in &self.spanning_tree {
            let Some(e) = self.edges.get(i) else {
                return Err(format!("edge index {i} out of range"));
            };
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a == b {
                return Err(format!("edge `{}` closes a cycle", e.id));
            }
            parent[a] = b;
        }
        Ok(())
    }

    pub fn in_tree(&self, e: usize) -> bool {
        self.spanning_tree.contains(&e)
    }

    /// For every vertex, the path word in the spanning tree from the base to
    /// it (left end at the base, right end at the vertex).
    pub fn tree_paths(&self) -> Vec<Word> {
        let n = self.vertices.len();
        let mut paths: Vec<Option<Word>> = vec![None; n];
        paths[self.base()] = Some(Word::identity());
        let mut queue = VecDeque::from([self.base()]);
        while let Some(v) = queue.pop_front() {
            let pv = paths[v].clone().unwrap();
            for &i in &self.spanning_tree {
                let e = &self.edges[i];
                // crossing from `v`: the letter whose left end is `v`
                let (letter, other) = if e.to == v {
                    (Letter::edge(i, false), e.from)
                } else if e.from == v {
                    (Letter::edge(i, true), e.to)
                } else {
                    continue;
                };
                if paths[other].is_none() {
                    let mut w = pv.clone();
                    w.push(letter);
                    paths[other] = Some(w);
                    queue.push_back(other);
                }
            }
        }
        paths.into_iter().map(|p| p.unwrap_or_default()).collect()
    }

    /// Loop generators of the fundamental group at the base vertex: one per
    /// cyclic vertex and one per edge outside the spanning tree, named by the
    /// corresponding graph letter.
    pub fn loop_generators(&self) -> Vec<(String, Word)> {
        let paths = self.tree_paths();
        let mut out = Vec::new();
        for (v, vx) in self.vertices.iter().enumerate() {
            if vx.group == GroupKind::InfiniteCyclic {
                let w = paths[v]
                    .concat(&Word::from_letters(vec![Letter::Vertex(v, 1)]))
                    .concat(&paths[v].inverse());
                out.push((format!("a_{}", vx.id), w));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if !self.in_tree(i) {
                let w = paths[e.to]
                    .concat(&Word::from_letters(vec![Letter::edge(i, false)]))
                    .concat(&paths[e.from].inverse());
                out.push((e.id.clone(), w));
            }
        }
        out
    }

    /// The identity marking: each loop generator marks itself.
    pub fn identity_marking(&self) -> BTreeMap<String, Word> {
        self.loop_generators().into_iter().collect()
    }

    pub fn marking_generators(&self) -> Option<Vec<String>> {
        self.marking.as_ref().map(|m| m.keys().cloned().collect())
    }

    /// Translates a base-group word through the marking.
    pub fn mark(&self, w: &BaseWord) -> Result<Word, MarkingError> {
        let m = self.marking.as_ref().ok_or(MarkingError::MissingMarking)?;
        let mut out = Word::identity();
        for (gen, k) in &w.0 {
            let img = m
                .get(gen)
                .ok_or_else(|| MarkingError::UnknownGenerator(gen.clone()))?;
            let piece = if *k < 0 { img.inverse() } else { img.clone() };
            for _ in 0..k.unsigned_abs() {
                out = out.concat(&piece);
            }
        }
        Ok(out)
    }

    /// Inverse of an "identity-like" marking: one where every generator is
    /// sent to a single non-tree letter up to spanning-tree letters. Maps
    /// graph loop words back to base-group words.
    pub fn unmark(&self, w: &Word) -> Result<BaseWord, MarkingError> {
        let m = self.marking.as_ref().ok_or(MarkingError::MissingMarking)?;
        let mut table: HashMap<Letter, (String, i64)> = HashMap::new();
        for (gen, img) in m {
            let core: Vec<Letter> = img
                .letters()
                .iter()
                .copied()
                .filter(|l| !matches!(l, Letter::Edge { edge, .. } if self.in_tree(*edge)))
                .collect();
            match core.as_slice() {
                [Letter::Vertex(v, k)] if k.abs() == 1 => {
                    table.insert(Letter::Vertex(*v, 1), (gen.clone(), *k));
                }
                [Letter::Edge { edge, inv }] => {
                    table.insert(Letter::edge(*edge, false), (gen.clone(), if *inv { -1 } else { 1 }));
                }
                _ => return Err(MarkingError::NotInvertible(gen.clone())),
            }
        }
        let mut out = BaseWord::default();
        for l in w.letters() {
            match *l {
                Letter::Vertex(v, k) => {
                    let (g, s) = table
                        .get(&Letter::Vertex(v, 1))
                        .ok_or_else(|| MarkingError::NotInvertible(self.vertices[v].id.clone()))?;
                    out.push(g, k * s);
                }
                Letter::Edge { edge, inv } => {
                    if self.in_tree(edge) {
                        continue;
                    }
                    let (g, s) = table
                        .get(&Letter::edge(edge, false))
                        .ok_or_else(|| MarkingError::NotInvertible(self.edges[edge].id.clone()))?;
                    out.push(g, if inv { -s } else { *s });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error", content = "generator")]
pub enum MarkingError {
    #[error("graph carries no marking")]
    MissingMarking,
    #[error("generator `{0}` is not in the marking")]
    UnknownGenerator(String),
    #[error("marking is not invertible at `{0}`")]
    NotInvertible(String),
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct RawVertex {
    id: String,
    group: GroupKind,
}

fn one() -> i64 {
    1
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    id: String,
    from: String,
    to: String,
    #[serde(default = "one")]
    index_from: i64,
    #[serde(default = "one")]
    index_to: i64,
    #[serde(with = "rational")]
    length: Rational,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spanning_tree: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marking: Option<BTreeMap<String, String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum GraphParseError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown spanning-tree edge `{0}`")]
    UnknownTreeEdge(String),
    #[error("marking word for `{gen}`: {source}")]
    Marking {
        gen: String,
        source: crate::word::WordParseError,
    },
}

impl GraphOfGroups {
    pub fn from_json(text: &str) -> Result<Self, GraphParseError> {
        let raw: RawGraph = serde_json::from_str(text)?;
        Self::from_raw(raw)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self, GraphParseError> {
        Self::from_raw(serde_json::from_value(v)?)
    }

    fn from_raw(raw: RawGraph) -> Result<Self, GraphParseError> {
        let vertices: Vec<Vertex> = raw
            .vertices
            .into_iter()
            .map(|v| Vertex {
                id: v.id,
                group: v.group,
            })
            .collect();
        let vidx = |id: &str| {
            vertices
                .iter()
                .position(|v| v.id == id)
                .ok_or_else(|| GraphParseError::UnknownVertex(id.to_string()))
        };
        let mut edges = Vec::new();
        for e in raw.edges {
            edges.push(Edge {
                from: vidx(&e.from)?,
                to: vidx(&e.to)?,
                id: e.id,
                index_from: e.index_from,
                index_to: e.index_to,
                length: e.length,
            });
        }
        let mut g = GraphOfGroups::new(vertices, edges);
        if let Some(tree) = raw.spanning_tree {
            g.spanning_tree = tree
                .iter()
                .map(|id| g.edge_index(id).ok_or_else(|| GraphParseError::UnknownTreeEdge(id.clone())))
                .collect::<Result<_, _>>()?;
        }
        if let Some(m) = raw.marking {
            let mut marking = BTreeMap::new();
            for (gen, text) in m {
                let w = Word::parse_graph(&g, &text).map_err(|source| GraphParseError::Marking {
                    gen: gen.clone(),
                    source,
                })?;
                marking.insert(gen, w);
            }
            g.marking = Some(marking);
        }
        Ok(g)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = RawGraph {
            vertices: self
                .vertices
                .iter()
                .map(|v| RawVertex {
                    id: v.id.clone(),
                    group: v.group,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    from: self.vertices[e.from].id.clone(),
                    to: self.vertices[e.to].id.clone(),
                    index_from: e.index_from,
                    index_to: e.index_to,
                    length: e.length.clone(),
                })
                .collect(),
            spanning_tree: Some(
                self.spanning_tree
                    .iter()
                    .map(|&i| self.edges[i].id.clone())
                    .collect(),
            ),
            marking: self.marking.as_ref().map(|m| {
                m.iter()
                    .map(|(k, w)| (k.clone(), w.display(self)))
                    .collect()
            }),
        };
        serde_json::to_value(raw).expect("graph serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph serializes")
    }

    /// Graphviz rendering of the quotient graph.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in &self.vertices {
            let shape = match v.group {
                GroupKind::Trivial => "circle",
                GroupKind::InfiniteCyclic => "doublecircle",
            };
            s += &format!("  \"{}\" [shape={shape}];\n", v.id);
        }
        for e in &self.edges {
            s += &format!(
                "  \"{}\" -- \"{}\" [label=\"{} ({},{}) {}\"];\n",
                self.vertices[e.from].id,
                self.vertices[e.to].id,
                e.id,
                e.index_from,
                e.index_to,
                fmt_rational(&e.length)
            );
        }
        s + "}\n"
    }

    /// Same combinatorics and lengths, ignoring ids and marking.
    pub fn same_shape(&self, other: &GraphOfGroups) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.edges.len() == other.edges.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| a.group == b.group)
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.from == b.from
                    && a.to == b.to
                    && a.index_from == b.index_from
                    && a.index_to == b.index_to
                    && a.length == b.length
            })
    }
}

impl fmt::Display for GraphOfGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

pub fn zero_length_edges(g: &GraphOfGroups) -> Vec<usize> {
    g.edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.length.is_zero())
        .map(|(i, _)| i)
        .collect()
}
