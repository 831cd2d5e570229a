//! Geometric edge paths in free graphs and spans of edges.
//!
//! Words are read right to left as geometric paths: the letter `e` crosses
//! `e` from its `from` end to its `to` end.

use crate::graph::GraphOfGroups;
use crate::rational::{fmt_rational, int, parse_rational, Rational};
use crate::word::{Letter, Word};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

/// A directed edge; `fwd` runs from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dir {
    pub edge: usize,
    pub fwd: bool,
}

impl Dir {
    pub fn new(edge: usize, fwd: bool) -> Self {
        Dir { edge, fwd }
    }

    pub fn rev(self) -> Self {
        Dir {
            edge: self.edge,
            fwd: !self.fwd,
        }
    }

    pub fn start(self, g: &GraphOfGroups) -> usize {
        let e = &g.edges[self.edge];
        if self.fwd {
            e.from
        } else {
            e.to
        }
    }

    pub fn end(self, g: &GraphOfGroups) -> usize {
        self.rev().start(g)
    }

    pub fn span(self, g: &GraphOfGroups) -> Span {
        let l = g.edges[self.edge].length.clone();
        if self.fwd {
            Span::new(self.edge, int(0), l)
        } else {
            Span::new(self.edge, l, int(0))
        }
    }
}

/// Geometric path of a word over edge letters.
pub fn word_to_path(w: &Word) -> Vec<Dir> {
    w.letters()
        .iter()
        .rev()
        .map(|l| match *l {
            Letter::Edge { edge, inv } => Dir::new(edge, !inv),
            Letter::Vertex(..) => panic!("vertex letter in a free graph"),
        })
        .collect()
}

pub fn path_to_word(p: &[Dir]) -> Word {
    Word::from_letters(p.iter().rev().map(|d| Letter::edge(d.edge, !d.fwd)).collect())
}

pub fn path_length(g: &GraphOfGroups, p: &[Dir]) -> Rational {
    p.iter().map(|d| g.edges[d.edge].length.clone()).sum()
}

/// A point of a metric graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPoint {
    Vertex(usize),
    /// Interior point at distance `pos` from the edge's `from` end.
    Interior { edge: usize, pos: Rational },
}

pub fn point_on(g: &GraphOfGroups, edge: usize, pos: &Rational) -> GraphPoint {
    let e = &g.edges[edge];
    if pos.is_zero() {
        GraphPoint::Vertex(e.from)
    } else if *pos == e.length {
        GraphPoint::Vertex(e.to)
    } else {
        GraphPoint::Interior {
            edge,
            pos: pos.clone(),
        }
    }
}

/// The part of `edge` between positions `from` and `to`, traversed from
/// `from` to `to`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub edge: usize,
    pub from: Rational,
    pub to: Rational,
}

impl Span {
    pub fn new(edge: usize, from: Rational, to: Rational) -> Self {
        Span { edge, from, to }
    }

    pub fn len(&self) -> Rational {
        (&self.to - &self.from).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.from == self.to
    }

    pub fn fwd(&self) -> bool {
        self.to > self.from
    }

    pub fn rev(&self) -> Span {
        Span::new(self.edge, self.to.clone(), self.from.clone())
    }

    pub fn start(&self, g: &GraphOfGroups) -> GraphPoint {
        point_on(g, self.edge, &self.from)
    }

    pub fn end(&self, g: &GraphOfGroups) -> GraphPoint {
        point_on(g, self.edge, &self.to)
    }

    /// The directed edge, if the span covers its whole edge.
    pub fn full(&self, g: &GraphOfGroups) -> Option<Dir> {
        let l = &g.edges[self.edge].length;
        if self.from.is_zero() && self.to == *l {
            Some(Dir::new(self.edge, true))
        } else if self.to.is_zero() && self.from == *l {
            Some(Dir::new(self.edge, false))
        } else {
            None
        }
    }

    pub fn to_json(&self, g: &GraphOfGroups) -> Value {
        match self.full(g) {
            Some(d) if d.fwd => json!(g.edges[d.edge].id),
            Some(d) => json!(format!("{}^-1", g.edges[d.edge].id)),
            None => json!({
                "edge": g.edges[self.edge].id,
                "from": fmt_rational(&self.from),
                "to": fmt_rational(&self.to),
            }),
        }
    }

    pub fn from_json(g: &GraphOfGroups, v: &Value) -> Result<Span, String> {
        match v {
            Value::String(s) => {
                let (name, fwd) = match s.strip_suffix("^-1") {
                    Some(n) => (n, false),
                    None => (s.as_str(), true),
                };
                let e = g
                    .edge_index(name)
                    .ok_or_else(|| format!("unknown range edge `{name}`"))?;
                Ok(Dir::new(e, fwd).span(g))
            }
            Value::Object(m) => {
                let name = m
                    .get("edge")
                    .and_then(Value::as_str)
                    .ok_or("span needs an `edge`")?;
                let e = g
                    .edge_index(name)
                    .ok_or_else(|| format!("unknown range edge `{name}`"))?;
                let pos = |k: &str| -> Result<Rational, String> {
                    match m.get(k) {
                        Some(Value::String(s)) => parse_rational(s).map_err(|e| e.to_string()),
                        Some(Value::Number(n)) => n
                            .as_i64()
                            .map(int)
                            .ok_or_else(|| format!("bad `{k}`")),
                        _ => Err(format!("span needs `{k}`")),
                    }
                };
                let span = Span::new(e, pos("from")?, pos("to")?);
                let l = &g.edges[e].length;
                for x in [&span.from, &span.to] {
                    if x.is_negative() || x > l {
                        return Err(format!("position {} outside edge `{name}`", fmt_rational(x)));
                    }
                }
                if span.is_empty() {
                    return Err(format!("empty span on `{name}`"));
                }
                Ok(span)
            }
            _ => Err("span must be an edge id or an object".into()),
        }
    }
}

/// Pushes a span onto a path, merging with or cancelling against the last
/// span when they continue along the same edge.
pub fn push_span(out: &mut Vec<Span>, s: Span) {
    if s.is_empty() {
        return;
    }
    if let Some(t) = out.last_mut() {
        if t.edge == s.edge && t.to == s.from {
            t.to = s.to;
            if t.is_empty() {
                out.pop();
            }
            return;
        }
    }
    out.push(s);
}

/// Freely reduced form of a span path.
pub fn tighten(spans: impl IntoIterator<Item = Span>) -> Vec<Span> {
    let mut out = Vec::new();
    for s in spans {
        push_span(&mut out, s);
    }
    out
}

pub fn spans_length(spans: &[Span]) -> Rational {
    spans.iter().map(Span::len).sum()
}

/// Rewrites a closed span path as a loop of whole edges at a vertex,
/// conjugating by part of the first edge when it starts inside an edge.
pub fn closed_to_dirs(g: &GraphOfGroups, spans: &[Span]) -> (Option<usize>, Vec<Dir>) {
    let Some(first) = spans.first() else {
        return (None, Vec::new());
    };
    let mut all = Vec::new();
    let start = match first.start(g) {
        GraphPoint::Vertex(v) => v,
        GraphPoint::Interior { edge, pos } => {
            all.push(Span::new(edge, int(0), pos.clone()));
            g.edges[edge].from
        }
    };
    all.extend(spans.iter().cloned());
    if let GraphPoint::Interior { edge, pos } = first.start(g) {
        all.push(Span::new(edge, pos, int(0)));
    }
    let t = tighten(all);
    let dirs = t
        .iter()
        .map(|s| s.full(g).expect("closed path at a vertex uses whole edges"))
        .collect();
    (Some(start), dirs)
}

/// Loop word at the base vertex for a closed span path.
pub fn based_loop_word(g: &GraphOfGroups, spans: &[Span]) -> Word {
    let (v, dirs) = closed_to_dirs(g, spans);
    let Some(v) = v else {
        return Word::identity();
    };
    let p = g.tree_paths()[v].clone();
    p.concat(&path_to_word(&dirs)).concat(&p.inverse())
}
