//! Pairs of points in the universal cover of the domain with a common image.
//!
//! Over a fixed lift of a range edge, every edge of the domain quotient has
//! exactly one lift, so the pairs to examine are pairs of quotient edges (or
//! vertices) with the same image. For each pair we walk the domain tree from
//! one lift until the other turns up, recording how far the image of the
//! connecting path strays from the image edge.

use super::path::Dir;
use super::simplicial::Simplicial;
use crate::rational::{int, Rational};
use std::collections::VecDeque;

pub const STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FibreError {
    #[error("fibre exploration exceeded {0} states")]
    TooManyStates(usize),
    #[error("morphism is not injective on fundamental groups")]
    NotInjective,
}

/// Two domain edges over the same range edge, both oriented to map forwards.
///
/// The lifts fold together on the initial segment of length `s` iff
/// `s <= D - a` and on the final segment of length `s` iff `s <= D - b`,
/// where `D` is the allowed height. `None` means that side imposes nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePair {
    pub range_edge: usize,
    pub first: Dir,
    pub second: Dir,
    pub a: Option<Rational>,
    pub b: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPair {
    pub first: usize,
    pub second: usize,
    pub height: Rational,
}

#[derive(Debug, Clone, Default)]
pub struct Fibres {
    pub edges: Vec<EdgePair>,
    pub vertices: Vec<VertexPair>,
}

struct State {
    at: usize,
    came: Option<Dir>,
    path: Vec<Dir>,
    len: Rational,
    a: Option<Rational>,
    b: Option<Rational>,
}

fn push_dir(s: &Simplicial, path: &mut Vec<Dir>, len: &mut Rational, d: Dir) {
    let l = &s.range.edges[d.edge].length;
    if path.last() == Some(&d.rev()) {
        path.pop();
        *len -= l;
    } else {
        path.push(d);
        *len += l;
    }
}

fn max_opt(x: &mut Option<Rational>, v: Rational) {
    if x.as_ref().map_or(true, |c| v > *c) {
        *x = Some(v);
    }
}

fn explore_edge(
    s: &Simplicial,
    links: &[Vec<Dir>],
    f: Dir,
    targets: &[Dir],
    out: &mut Vec<EdgePair>,
) -> Result<(), FibreError> {
    let eps = s.image(f);
    debug_assert!(eps.fwd);
    let l = s.range.edges[eps.edge].length.clone();
    let mut found = vec![false; targets.len()];
    let mut left = targets.len();
    let mut queue = VecDeque::from([
        State {
            at: f.start(&s.domain),
            came: Some(f.rev()),
            path: Vec::new(),
            len: int(0),
            a: Some(int(0)),
            b: None,
        },
        State {
            at: f.end(&s.domain),
            came: Some(f),
            path: vec![eps],
            len: l.clone(),
            a: None,
            b: Some(int(0)),
        },
    ]);
    let mut states = 0usize;
    while left > 0 {
        let Some(st) = queue.pop_front() else { break };
        states += 1;
        if states > STATE_CAP {
            return Err(FibreError::TooManyStates(STATE_CAP));
        }
        for &d in &links[st.at] {
            if Some(d.rev()) == st.came {
                continue;
            }
            let im = s.image(d);
            let partner = if im == eps && st.path.is_empty() {
                Some(d)
            } else if im == eps.rev() && st.path == [eps] {
                Some(d.rev())
            } else {
                None
            };
            if let Some(g) = partner {
                if let Some(i) = targets.iter().position(|&t| t == g) {
                    if found[i] {
                        return Err(FibreError::NotInjective);
                    }
                    found[i] = true;
                    left -= 1;
                    out.push(EdgePair {
                        range_edge: eps.edge,
                        first: f,
                        second: g,
                        a: st.a.clone(),
                        b: st.b.clone(),
                    });
                }
            }
            let mut path = st.path.clone();
            let mut len = st.len.clone();
            push_dir(s, &mut path, &mut len, im);
            let (mut a, mut b) = (st.a.clone(), st.b.clone());
            if path.first() == Some(&eps) {
                max_opt(&mut b, &len - &l);
            } else {
                max_opt(&mut a, len.clone());
            }
            queue.push_back(State {
                at: d.end(&s.domain),
                came: Some(d),
                path,
                len,
                a,
                b,
            });
        }
    }
    if left > 0 {
        return Err(FibreError::NotInjective);
    }
    Ok(())
}

fn explore_vertex(
    s: &Simplicial,
    links: &[Vec<Dir>],
    z: usize,
    targets: &[usize],
    out: &mut Vec<VertexPair>,
) -> Result<(), FibreError> {
    let mut found = vec![false; targets.len()];
    let mut left = targets.len();
    // `a` carries the running height
    let mut queue = VecDeque::from([State {
        at: z,
        came: None,
        path: Vec::new(),
        len: int(0),
        a: Some(int(0)),
        b: None,
    }]);
    let mut states = 0usize;
    while left > 0 {
        let Some(st) = queue.pop_front() else { break };
        states += 1;
        if states > STATE_CAP {
            return Err(FibreError::TooManyStates(STATE_CAP));
        }
        for &d in &links[st.at] {
            if Some(d.rev()) == st.came {
                continue;
            }
            let mut path = st.path.clone();
            let mut len = st.len.clone();
            push_dir(s, &mut path, &mut len, s.image(d));
            let mut h = st.a.clone();
            max_opt(&mut h, len.clone());
            let w = d.end(&s.domain);
            if path.is_empty() {
                if let Some(i) = targets.iter().position(|&t| t == w) {
                    if found[i] {
                        return Err(FibreError::NotInjective);
                    }
                    found[i] = true;
                    left -= 1;
                    out.push(VertexPair {
                        first: z,
                        second: w,
                        height: h.clone().unwrap(),
                    });
                }
            }
            queue.push_back(State {
                at: w,
                came: Some(d),
                path,
                len,
                a: h,
                b: None,
            });
        }
    }
    if left > 0 {
        return Err(FibreError::NotInjective);
    }
    Ok(())
}

/// All edge and vertex pairs, each unordered pair listed once.
pub fn fibres(s: &Simplicial) -> Result<Fibres, FibreError> {
    let links = s.links();
    let mut out = Fibres::default();
    let n_range = s.range.edges.len();
    let mut over: Vec<Vec<Dir>> = vec![Vec::new(); n_range];
    for e in 0..s.domain.edges.len() {
        let d = Dir::new(e, s.img[e].fwd);
        over[s.img[e].edge].push(d);
    }
    for list in &over {
        for (i, &f) in list.iter().enumerate() {
            explore_edge(s, &links, f, &list[i + 1..], &mut out.edges)?;
        }
    }
    let n = s.domain.vertices.len();
    for z in 0..n {
        let targets: Vec<usize> = (z + 1..n).filter(|&w| s.vimg[w] == s.vimg[z]).collect();
        if !targets.is_empty() {
            explore_vertex(s, &links, z, &targets, &mut out.vertices)?;
        }
    }
    Ok(out)
}

impl Fibres {
    /// The time-one height of the folding path: the smallest `D` at which
    /// every pair has been identified.
    pub fn max_height(&self, s: &Simplicial) -> Rational {
        let mut m = int(0);
        for p in &self.edges {
            let l = &s.range.edges[p.range_edge].length;
            let worst = match (&p.a, &p.b) {
                (Some(a), Some(b)) => a.max(b).clone(),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => int(0),
            };
            m = m.max(l + worst);
        }
        for p in &self.vertices {
            m = m.max(p.height.clone());
        }
        m
    }
}
