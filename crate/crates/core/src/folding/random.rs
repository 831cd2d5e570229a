//! Random morphisms built from partial folds of the identity.

use super::path::{Dir, Span};
use super::{tighten, FoldError, Morphism};
use crate::corpus;
use crate::graph::{Edge, GraphOfGroups, GroupKind, Vertex};
use crate::rational::{int, rat, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

/// Direction leaving the vertex at the start of `s`, if it starts at one.
fn departure(g: &GraphOfGroups, s: &Span) -> Option<Dir> {
    let l = &g.edges[s.edge].length;
    if s.from == int(0) {
        Some(Dir::new(s.edge, true))
    } else if s.from == *l {
        Some(Dir::new(s.edge, false))
    } else {
        None
    }
}

/// Whether some image turns from `d1` to `d2` (in either order).
fn turn_used(g: &GraphOfGroups, images: &[Vec<Span>], d1: Dir, d2: Dir) -> bool {
    images.iter().any(|spans| {
        spans.windows(2).any(|w| {
            match (departure(g, &w[0].rev()), departure(g, &w[1])) {
                (Some(a), Some(b)) => (a, b) == (d1, d2) || (a, b) == (d2, d1),
                _ => false,
            }
        })
    })
}

/// Folds the initial segments of length `l` of `d1` and `d2` together.
fn partial_fold(
    g: &GraphOfGroups,
    images: &[Vec<Span>],
    d1: Dir,
    d2: Dir,
    l: &Rational,
    k: usize,
) -> (GraphOfGroups, Vec<Vec<Span>>) {
    let z = d1.start(g);
    let mut vertices = g.vertices.clone();
    let mut edges = g.edges.clone();
    let p = vertices.len();
    vertices.push(Vertex {
        id: format!("p{k}"),
        group: GroupKind::Trivial,
    });
    let c = edges.len();
    edges.push(Edge {
        id: format!("c{k}"),
        from: z,
        to: p,
        index_from: 1,
        index_to: 1,
        length: l.clone(),
    });
    for d in [d1, d2] {
        let e = &mut edges[d.edge];
        if d.fwd {
            e.from = p;
        } else {
            e.to = p;
        }
        e.length -= l;
    }
    let range = GraphOfGroups::new(vertices, edges);

    // position on a folded edge, read on `c` or on what is left of the edge
    let relocate = |d: Dir, on_c: bool, x: &Rational| -> (usize, Rational) {
        let old = &g.edges[d.edge].length;
        match (on_c, d.fwd) {
            (true, true) => (c, x.clone()),
            (true, false) => (c, old - x),
            (false, true) => (d.edge, x - l),
            (false, false) => (d.edge, x.clone()),
        }
    };
    let images = images
        .iter()
        .map(|spans| {
            let mut out = Vec::new();
            for s in spans {
                let Some(&d) = [d1, d2].iter().find(|d| d.edge == s.edge) else {
                    out.push(s.clone());
                    continue;
                };
                let old = &g.edges[d.edge].length;
                let cut = if d.fwd { l.clone() } else { old - l };
                let (lo, hi) = if s.fwd() { (&s.from, &s.to) } else { (&s.to, &s.from) };
                let parts = if *lo < cut && cut < *hi {
                    vec![
                        Span::new(s.edge, s.from.clone(), cut.clone()),
                        Span::new(s.edge, cut.clone(), s.to.clone()),
                    ]
                } else {
                    vec![s.clone()]
                };
                for part in parts {
                    let mid = (&part.from + &part.to) / int(2);
                    let on_c = if d.fwd { mid < cut } else { mid > cut };
                    let (e, a) = relocate(d, on_c, &part.from);
                    let (_, b) = relocate(d, on_c, &part.to);
                    out.push(Span::new(e, a, b));
                }
            }
            tighten(out)
        })
        .collect();
    (range, images)
}

/// A morphism from a random free graph obtained by one to three strict
/// partial folds of the identity.
pub fn random_morphism<R: Rng>(rng: &mut R) -> Result<Morphism, FoldError> {
    let domain = corpus::random_free_graph(rng);
    let mut range = domain.clone();
    range.marking = None;
    let mut images: Vec<Vec<Span>> = (0..domain.edges.len())
        .map(|e| vec![Dir::new(e, true).span(&domain)])
        .collect();
    let folds = rng.gen_range(1..=3);
    let mut done = 0;
    for _ in 0..50 {
        if done == folds {
            break;
        }
        let z = rng.gen_range(0..range.vertices.len());
        let leaving: Vec<Dir> = (0..range.edges.len())
            .flat_map(|e| [Dir::new(e, true), Dir::new(e, false)])
            .filter(|d| d.start(&range) == z)
            .collect();
        let (Some(&d1), Some(&d2)) = (leaving.choose(rng), leaving.choose(rng)) else {
            continue;
        };
        if d1.edge == d2.edge || turn_used(&range, &images, d1, d2) {
            continue;
        }
        let shorter = range.edges[d1.edge].length.clone().min(range.edges[d2.edge].length.clone());
        let frac = [rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4)].choose(rng).unwrap().clone();
        let (r, im) = partial_fold(&range, &images, d1, d2, &(shorter * frac), done);
        range = r;
        images = im;
        done += 1;
    }
    Morphism::new(domain, range, images)
}
