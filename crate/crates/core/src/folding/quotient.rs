//! The tree `T_t`: the quotient of the domain identifying points with a common
//! image whose connecting path maps into the ball of radius `m(φ)·t`.

use super::path::{Dir, Span};
use super::{new_unanalysed, tighten, FoldError, Morphism};
use crate::graph::{Edge, GraphOfGroups, GroupKind, Vertex};
use crate::normal::translation_length;
use crate::rational::{fmt_rational, int, Rational};
use crate::word::BaseWord;
use petgraph::unionfind::UnionFind;
use std::collections::{BTreeSet, HashMap, HashSet};

#[derive(Debug, Clone)]
pub struct FoldStep {
    pub time: Rational,
    pub tree: GraphOfGroups,
    /// φ_0t from the domain to `tree`.
    pub to_time: Morphism,
    /// φ_t1 from `tree` to the range.
    pub from_time: Morphism,
}

/// Edge of the subdivided quotient before valence-two vertices are erased.
struct Piece {
    from: usize,
    to: usize,
    range_edge: usize,
    lo: Rational,
    hi: Rational,
}

fn fresh(base: &str, k: &mut usize, used: &mut HashSet<String>) -> String {
    loop {
        let name = format!("{base}{k}");
        *k += 1;
        if used.insert(name.clone()) {
            return name;
        }
    }
}

pub fn fold_at_time(m: &Morphism, t: &Rational) -> Result<FoldStep, FoldError> {
    if *t < int(0) || *t > int(1) {
        return Err(FoldError::TOutOfRange(fmt_rational(t)));
    }
    let s = m.simplicial()?;
    let fib = m.fibres()?;
    let budget = m.fold_depth()? * t;
    let dom = &s.domain;

    // fold intervals in range sub-edge coordinates
    let mut cuts: Vec<BTreeSet<Rational>> = s
        .range
        .edges
        .iter()
        .map(|e| BTreeSet::from([int(0), e.length.clone()]))
        .collect();
    let mut folds = Vec::new();
    for p in &fib.edges {
        let l = &s.range.edges[p.range_edge].length;
        let lo = p.b.as_ref().map_or(int(0), |b| (l - &budget + b).max(int(0)));
        let hi = p.a.as_ref().map_or(l.clone(), |a| (&budget - a).min(l.clone()));
        if lo <= hi {
            cuts[p.range_edge].insert(lo.clone());
            cuts[p.range_edge].insert(hi.clone());
            folds.push((p, lo, hi));
        }
    }
    let cuts: Vec<Vec<Rational>> = cuts.into_iter().map(|c| c.into_iter().collect()).collect();

    // points: domain vertices, then interior cuts of each sub-edge
    let n = dom.vertices.len();
    let mut pt_off = Vec::new();
    let mut seg_off = Vec::new();
    let (mut np, mut ns) = (n, 0);
    for e in 0..dom.edges.len() {
        let k = cuts[s.img[e].edge].len();
        pt_off.push(np);
        seg_off.push(ns);
        np += k - 2;
        ns += k - 1;
    }
    let pt = |e: usize, k: usize| -> usize {
        let last = cuts[s.img[e].edge].len() - 1;
        let (near, far) = if s.img[e].fwd {
            (dom.edges[e].from, dom.edges[e].to)
        } else {
            (dom.edges[e].to, dom.edges[e].from)
        };
        match k {
            0 => near,
            _ if k == last => far,
            _ => pt_off[e] + k - 1,
        }
    };

    let mut points = UnionFind::<usize>::new(np);
    let mut segs = UnionFind::<usize>::new(ns);
    for (p, lo, hi) in &folds {
        let c = &cuts[p.range_edge];
        let (f, g) = (p.first.edge, p.second.edge);
        for k in 0..c.len() {
            if c[k] >= *lo && c[k] <= *hi {
                points.union(pt(f, k), pt(g, k));
            }
            if k + 1 < c.len() && c[k] >= *lo && c[k + 1] <= *hi {
                segs.union(seg_off[f] + k, seg_off[g] + k);
            }
        }
    }
    for p in &fib.vertices {
        if p.height <= budget {
            points.union(p.first, p.second);
        }
    }

    // quotient graph with one piece per segment class
    let mut piece_of: HashMap<usize, usize> = HashMap::new();
    let mut pieces: Vec<Piece> = Vec::new();
    for e in 0..dom.edges.len() {
        let eps = s.img[e].edge;
        let c = &cuts[eps];
        for k in 0..c.len() - 1 {
            let root = segs.find(seg_off[e] + k);
            piece_of.entry(root).or_insert_with(|| {
                pieces.push(Piece {
                    from: points.find(pt(e, k)),
                    to: points.find(pt(e, k + 1)),
                    range_edge: eps,
                    lo: c[k].clone(),
                    hi: c[k + 1].clone(),
                });
                pieces.len() - 1
            });
        }
    }
    let mut valence: HashMap<usize, usize> = HashMap::new();
    let mut leaving: HashMap<usize, Vec<Dir>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        *valence.entry(p.from).or_default() += 1;
        *valence.entry(p.to).or_default() += 1;
        leaving.entry(p.from).or_default().push(Dir::new(i, true));
        leaving.entry(p.to).or_default().push(Dir::new(i, false));
    }
    let original: HashSet<usize> = (0..s.original_vertices).map(|v| points.find(v)).collect();
    let kept = |v: usize| original.contains(&v) || valence.get(&v) != Some(&2);
    let piece_start = |d: Dir| if d.fwd { pieces[d.edge].from } else { pieces[d.edge].to };
    let piece_end = |d: Dir| piece_start(d.rev());

    // vertices of T_t: kept classes, the base class first
    let base = points.find(0);
    let mut classes: Vec<usize> = (0..np)
        .map(|p| points.find(p))
        .filter(|&r| kept(r) && valence.contains_key(&r))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let first_member = |r: usize| (0..np).find(|&p| points.find(p) == r).unwrap();
    classes.sort_by_key(|&r| (r != base, first_member(r)));
    let vindex: HashMap<usize, usize> = classes.iter().enumerate().map(|(i, &r)| (r, i)).collect();

    // chains of pieces between kept vertices become edges
    let mut used = vec![false; pieces.len()];
    let mut chains: Vec<Vec<Dir>> = Vec::new();
    let mut chain_of = vec![(0usize, 0usize, true); pieces.len()];
    for &u in &classes {
        for &h in &leaving[&u] {
            if used[h.edge] {
                continue;
            }
            let mut chain = vec![h];
            used[h.edge] = true;
            let mut w = piece_end(h);
            while !kept(w) {
                let last = *chain.last().unwrap();
                let next = *leaving[&w]
                    .iter()
                    .find(|&&d| d != last.rev())
                    .expect("valence two");
                used[next.edge] = true;
                chain.push(next);
                w = piece_end(next);
            }
            for (i, d) in chain.iter().enumerate() {
                chain_of[d.edge] = (chains.len(), i, d.fwd);
            }
            chains.push(chain);
        }
    }
    debug_assert!(used.iter().all(|&u| u));

    // φ_0t on each original domain edge
    let mut to_time: Vec<Vec<Dir>> = Vec::new();
    for sub in &s.domain_chain {
        let mut out = Vec::new();
        for &e in sub {
            let k = cuts[s.img[e].edge].len() - 1;
            let order: Vec<usize> = if s.img[e].fwd { (0..k).collect() } else { (0..k).rev().collect() };
            for j in order {
                let piece = piece_of[&segs.find(seg_off[e] + j)];
                let (c, i, along) = chain_of[piece];
                let fwd = along == s.img[e].fwd;
                if (fwd && i == 0) || (!fwd && i + 1 == chains[c].len()) {
                    out.push(Dir::new(c, fwd));
                }
            }
        }
        to_time.push(out);
    }
    // orient edges that are a single original edge the same way
    let flipped: HashSet<usize> = to_time
        .iter()
        .filter_map(|img| match img[..] {
            [d] if !d.fwd => Some(d.edge),
            _ => None,
        })
        .collect();
    for &c in &flipped {
        chains[c].reverse();
        chains[c].iter_mut().for_each(|x| *x = x.rev());
    }
    for img in to_time.iter_mut() {
        for d in img.iter_mut() {
            if flipped.contains(&d.edge) {
                *d = d.rev();
            }
        }
    }

    // names
    let mut used_names: HashSet<String> = m
        .domain
        .vertices
        .iter()
        .map(|v| v.id.clone())
        .chain(m.domain.edges.iter().map(|e| e.id.clone()))
        .collect();
    let mut k = 0;
    let vertices: Vec<Vertex> = classes
        .iter()
        .map(|&r| {
            let id = (0..s.original_vertices)
                .find(|&v| points.find(v) == r)
                .map(|v| m.domain.vertices[v].id.clone())
                .unwrap_or_else(|| fresh("p", &mut k, &mut used_names));
            Vertex {
                id,
                group: GroupKind::Trivial,
            }
        })
        .collect();
    let mut edge_names: Vec<Option<String>> = vec![None; chains.len()];
    for (f, img) in to_time.iter().enumerate() {
        if let [d] = img[..] {
            edge_names[d.edge].get_or_insert_with(|| m.domain.edges[f].id.clone());
        }
    }
    let mut k = 0;
    let edges: Vec<Edge> = chains
        .iter()
        .enumerate()
        .map(|(c, chain)| Edge {
            id: edge_names[c]
                .clone()
                .unwrap_or_else(|| fresh("e", &mut k, &mut used_names)),
            from: vindex[&piece_start(chain[0])],
            to: vindex[&piece_end(*chain.last().unwrap())],
            index_from: 1,
            index_to: 1,
            length: chain.iter().map(|d| &pieces[d.edge].hi - &pieces[d.edge].lo).sum(),
        })
        .collect();
    let mut tree = GraphOfGroups::new(vertices, edges);
    tree.marking = None;

    let images = to_time
        .iter()
        .map(|img| img.iter().map(|d| d.span(&tree)).collect())
        .collect();
    let phi_0t = new_unanalysed(m.domain.clone(), tree, images)?;
    let tree = phi_0t.range.clone();

    // φ_t1: each chain read off in original range coordinates
    let images = chains
        .iter()
        .map(|chain| {
            tighten(chain.iter().map(|d| {
                let p = &pieces[d.edge];
                let (orig, start, _) = &s.range_parent[p.range_edge];
                let (a, b) = (start + &p.lo, start + &p.hi);
                if d.fwd {
                    Span::new(*orig, a, b)
                } else {
                    Span::new(*orig, b, a)
                }
            }))
        })
        .collect();
    let phi_t1 = new_unanalysed(tree.clone(), m.range.clone(), images)?;
    Ok(FoldStep {
        time: t.clone(),
        tree,
        to_time: phi_0t,
        from_time: phi_t1,
    })
}

/// `l_{T_t}(w)` for every word (rows) and time (columns).
pub fn length_profile(
    m: &Morphism,
    words: &[BaseWord],
    times: &[Rational],
) -> Result<Vec<Vec<Rational>>, FoldError> {
    let trees = times
        .iter()
        .map(|t| fold_at_time(m, t).map(|s| s.tree))
        .collect::<Result<Vec<_>, _>>()?;
    words
        .iter()
        .map(|w| {
            trees
                .iter()
                .map(|g| {
                    let x = g.mark(w).map_err(|e| FoldError::Word(e.to_string()))?;
                    translation_length(g, &x).map_err(|e| FoldError::Word(e.to_string()))
                })
                .collect()
        })
        .collect()
}
