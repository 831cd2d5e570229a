//! Subdividing domain and range until the morphism sends every edge onto a
//! single edge.

use super::path::{Dir, GraphPoint, Span};
use crate::graph::{Edge, GraphOfGroups, GroupKind, Vertex};
use crate::rational::Rational;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub struct Simplicial {
    /// Range subdivided at images of domain vertices; original vertices keep
    /// their indices.
    pub range: GraphOfGroups,
    /// Sub-edge of the range to (original edge, from position, to position).
    pub range_parent: Vec<(usize, Rational, Rational)>,
    /// Domain subdivided at preimages of range vertices.
    pub domain: GraphOfGroups,
    /// Original domain edge to its sub-edges, in order from its `from` end.
    pub domain_chain: Vec<Vec<usize>>,
    pub original_vertices: usize,
    /// Image of each domain sub-edge traversed forwards.
    pub img: Vec<Dir>,
    /// Image of each domain vertex.
    pub vimg: Vec<usize>,
}

fn vertex(id: String) -> Vertex {
    Vertex {
        id,
        group: GroupKind::Trivial,
    }
}

fn edge(id: String, from: usize, to: usize, length: Rational) -> Edge {
    Edge {
        id,
        from,
        to,
        index_from: 1,
        index_to: 1,
        length,
    }
}

impl Simplicial {
    /// `images` must already have passed morphism validation.
    pub fn build(domain: &GraphOfGroups, range: &GraphOfGroups, images: &[Vec<Span>]) -> Simplicial {
        // cut points on range edges: images of domain vertices
        let mut cuts: BTreeMap<usize, BTreeSet<Rational>> = BTreeMap::new();
        for spans in images {
            for p in [spans[0].start(range), spans.last().unwrap().end(range)] {
                if let GraphPoint::Interior { edge, pos } = p {
                    cuts.entry(edge).or_default().insert(pos);
                }
            }
        }

        let mut rv: Vec<Vertex> = range.vertices.iter().map(|v| vertex(v.id.clone())).collect();
        let mut re: Vec<Edge> = Vec::new();
        let mut range_parent = Vec::new();
        let mut cut_vertex: BTreeMap<(usize, Rational), usize> = BTreeMap::new();
        // per original range edge, sub-edges in increasing position
        let mut subs: Vec<Vec<usize>> = Vec::new();
        for (i, e) in range.edges.iter().enumerate() {
            let mut points = vec![(Rational::from_integer(0.into()), e.from)];
            for c in cuts.get(&i).into_iter().flatten() {
                let v = rv.len();
                rv.push(vertex(format!("{}@{}", e.id, crate::rational::fmt_rational(c))));
                cut_vertex.insert((i, c.clone()), v);
                points.push((c.clone(), v));
            }
            points.push((e.length.clone(), e.to));
            let mut list = Vec::new();
            for (k, w) in points.windows(2).enumerate() {
                let id = re.len();
                re.push(edge(format!("{}.{k}", e.id), w[0].1, w[1].1, &w[1].0 - &w[0].0));
                range_parent.push((i, w[0].0.clone(), w[1].0.clone()));
                list.push(id);
            }
            subs.push(list);
        }
        let range_s = GraphOfGroups::new(rv, re);

        let point_vertex = |p: GraphPoint| -> usize {
            match p {
                GraphPoint::Vertex(v) => v,
                GraphPoint::Interior { edge, pos } => cut_vertex[&(edge, pos)],
            }
        };
        let sub_dirs = |s: &Span| -> Vec<Dir> {
            let (lo, hi) = if s.fwd() { (&s.from, &s.to) } else { (&s.to, &s.from) };
            let mut out: Vec<Dir> = subs[s.edge]
                .iter()
                .filter(|&&k| range_parent[k].1 >= *lo && range_parent[k].2 <= *hi)
                .map(|&k| Dir::new(k, true))
                .collect();
            if !s.fwd() {
                out.reverse();
                out.iter_mut().for_each(|d| d.fwd = false);
            }
            out
        };

        let mut dv: Vec<Vertex> = domain.vertices.iter().map(|v| vertex(v.id.clone())).collect();
        let mut vimg = vec![usize::MAX; domain.vertices.len()];
        let mut de: Vec<Edge> = Vec::new();
        let mut img = Vec::new();
        let mut domain_chain = Vec::new();
        for (f, spans) in images.iter().enumerate() {
            let fe = &domain.edges[f];
            vimg[fe.from] = point_vertex(spans[0].start(range));
            vimg[fe.to] = point_vertex(spans.last().unwrap().end(range));
            let dirs: Vec<Dir> = spans.iter().flat_map(|s| sub_dirs(s)).collect();
            let mut chain = Vec::new();
            let mut at = fe.from;
            for (k, d) in dirs.iter().enumerate() {
                let next = if k + 1 == dirs.len() {
                    fe.to
                } else {
                    dv.push(vertex(format!("{}.{}", fe.id, k + 1)));
                    vimg.push(d.end(&range_s));
                    dv.len() - 1
                };
                chain.push(de.len());
                de.push(edge(
                    format!("{}.{k}", fe.id),
                    at,
                    next,
                    range_s.edges[d.edge].length.clone(),
                ));
                img.push(*d);
                at = next;
            }
            domain_chain.push(chain);
        }
        let mut domain_s = GraphOfGroups::new(dv, de);
        domain_s.spanning_tree.clear();
        Simplicial {
            range: range_s,
            range_parent,
            domain: domain_s,
            domain_chain,
            original_vertices: domain.vertices.len(),
            img,
            vimg,
        }
    }

    /// Image of a directed domain sub-edge.
    pub fn image(&self, d: Dir) -> Dir {
        let i = self.img[d.edge];
        if d.fwd {
            i
        } else {
            i.rev()
        }
    }

    /// Directed sub-edges leaving each domain vertex.
    pub fn links(&self) -> Vec<Vec<Dir>> {
        let mut out = vec![Vec::new(); self.domain.vertices.len()];
        for (i, e) in self.domain.edges.iter().enumerate() {
            out[e.from].push(Dir::new(i, true));
            out[e.to].push(Dir::new(i, false));
        }
        out
    }
}
