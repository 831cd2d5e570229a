//! Characteristic sets `T_g`, min-max sets `T_S` and the basepoint.
//!
//! Displacement `x -> d(x, gx)` is linear along every edge because `T_g` is a
//! subcomplex, so everything is decided by vertex values plus, for `T_S`, the
//! crossing points of the per-element lines on each edge.

use super::{Point, TreeBall, TreeError};
use crate::normal::translation_length;
use crate::rational::{fmt_rational, int, Rational};
use crate::word::Word;
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// The closed sub-interval `[lo, hi]` of the edge from `edge` toward its
/// parent, measured from `edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub edge: usize,
    pub lo: Rational,
    pub hi: Rational,
}

/// A convex subset of a ball: isolated points (vertices included) and edge pieces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Locus {
    pub points: Vec<Point>,
    pub pieces: Vec<Piece>,
}

impl Locus {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.pieces.is_empty()
    }

    pub fn contains(&self, b: &TreeBall, p: &Point) -> bool {
        if self.points.contains(p) {
            return true;
        }
        self.pieces.iter().any(|pc| {
            if p.node == pc.edge {
                pc.lo <= p.back && p.back <= pc.hi
            } else {
                p.is_vertex()
                    && b.nodes[pc.edge].parent == Some(p.node)
                    && pc.hi == b.nodes[pc.edge].len
            }
        })
    }

    /// Vertices and piece endpoints; extremes of the locus are among these.
    pub fn corners(&self, b: &TreeBall) -> Vec<Point> {
        let mut out: BTreeSet<Point> = self.points.iter().cloned().collect();
        for pc in &self.pieces {
            for s in [&pc.lo, &pc.hi] {
                if *s == b.nodes[pc.edge].len {
                    out.insert(Point::vertex(b.nodes[pc.edge].parent.unwrap()));
                } else {
                    out.insert(Point {
                        node: pc.edge,
                        back: s.clone(),
                    });
                }
            }
        }
        out.into_iter().collect()
    }

    /// Distance from `p` to the locus (the locus is convex, so the nearest
    /// point is a corner unless `p` is inside).
    pub fn dist(&self, b: &TreeBall, p: &Point) -> Option<Rational> {
        project(b, self, p).map(|q| b.dist(p, &q))
    }

    pub fn to_json(&self, b: &TreeBall) -> Value {
        let pieces: Vec<Value> = self
            .pieces
            .iter()
            .map(|pc| {
                json!({
                    "vertex": b.label(pc.edge),
                    "toward": b.label(b.nodes[pc.edge].parent.unwrap()),
                    "from": fmt_rational(&pc.lo),
                    "to": fmt_rational(&pc.hi),
                })
            })
            .collect();
        let points: Vec<Value> = self.points.iter().map(|p| b.point_json(p)).collect();
        json!({ "points": points, "pieces": pieces })
    }
}

/// Nearest point of a convex locus, or `None` if the locus is empty.
pub fn project(b: &TreeBall, locus: &Locus, p: &Point) -> Option<Point> {
    if locus.contains(b, p) {
        return Some(p.clone());
    }
    locus
        .corners(b)
        .into_iter()
        .min_by(|x, y| b.dist(p, x).cmp(&b.dist(p, y)))
}

#[derive(Debug, Clone)]
pub struct CharacteristicSet {
    pub locus: Locus,
    pub min_value: Rational,
    /// The locus reaches a vertex whose link is not fully evaluable.
    pub truncated: bool,
}

impl CharacteristicSet {
    pub fn to_json(&self, b: &TreeBall) -> Value {
        json!({
            "min_value": fmt_rational(&self.min_value),
            "truncated": self.truncated,
            "locus": self.locus.to_json(b),
        })
    }
}

fn displacements(b: &TreeBall, w: &Word) -> Vec<Rational> {
    (0..b.len()).map(|n| b.vertex_displacement(w, n)).collect()
}

/// Whether a locus vertex sits on the frontier of the ball.
fn at_boundary(b: &TreeBall, n: usize) -> bool {
    !b.nodes[n].expanded
}

/// `T_w = { x : d(x, wx) = l(w) }` restricted to the ball.
pub fn characteristic_set(b: &TreeBall, w: &Word) -> Result<CharacteristicSet, TreeError> {
    b.check_element(w)?;
    let l = translation_length(&b.graph, w).map_err(|e| TreeError::NotALoop {
        reason: e.to_string(),
    })?;
    let on: Vec<bool> = displacements(b, w).into_iter().map(|d| d == l).collect();
    let mut locus = Locus::default();
    let mut truncated = false;
    for n in 0..b.len() {
        if !on[n] {
            continue;
        }
        locus.points.push(Point::vertex(n));
        truncated |= at_boundary(b, n);
        if let Some(p) = b.nodes[n].parent {
            if on[p] {
                locus.pieces.push(Piece {
                    edge: n,
                    lo: int(0),
                    hi: b.nodes[n].len.clone(),
                });
            }
        }
    }
    if locus.is_empty() {
        truncated = true;
    }
    Ok(CharacteristicSet {
        locus,
        min_value: l,
        truncated,
    })
}

/// A line `y = a + slope * s` along an edge.
#[derive(Clone)]
struct Line {
    a: Rational,
    slope: Rational,
}

impl Line {
    fn at(&self, s: &Rational) -> Rational {
        &self.a + &self.slope * s
    }
}

fn upper(lines: &[Line], s: &Rational) -> Rational {
    lines.iter().map(|l| l.at(s)).max().unwrap()
}

/// `T_S`, the set where `max_{g in S} d(x, gx)` attains its minimum `l(S)`.
pub fn min_max_set(b: &TreeBall, s: &[Word]) -> Result<CharacteristicSet, TreeError> {
    if s.is_empty() {
        return Err(TreeError::EmptyS);
    }
    for w in s {
        b.check_element(w)?;
    }
    let per_word: Vec<Vec<Rational>> = s.iter().map(|w| displacements(b, w)).collect();
    let disp: Vec<Vec<Rational>> = (0..b.len())
        .map(|n| per_word.iter().map(|d| d[n].clone()).collect())
        .collect();
    let vmax = |n: usize| disp[n].iter().max().unwrap().clone();

    // candidate minima along each evaluable edge
    let mut edge_cands: Vec<(usize, Vec<(Rational, Rational)>)> = Vec::new();
    for n in 0..b.len() {
        let Some(p) = b.nodes[n].parent else { continue };
        let len = &b.nodes[n].len;
        let lines: Vec<Line> = (0..s.len())
            .map(|i| Line {
                a: disp[n][i].clone(),
                slope: (&disp[p][i] - &disp[n][i]) / len,
            })
            .collect();
        let mut ss: BTreeSet<Rational> = BTreeSet::from([int(0), len.clone()]);
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if lines[i].slope != lines[j].slope {
                    let x = (&lines[j].a - &lines[i].a) / (&lines[i].slope - &lines[j].slope);
                    if x > int(0) && x < *len {
                        ss.insert(x);
                    }
                }
            }
        }
        let c = ss.into_iter().map(|x| {
            let y = upper(&lines, &x);
            (x, y)
        });
        edge_cands.push((n, c.collect()));
    }

    let mut mu: Option<Rational> = None;
    let mut consider = |v: &Rational| {
        if mu.as_ref().map_or(true, |m| v < m) {
            mu = Some(v.clone());
        }
    };
    for n in 0..b.len() {
        consider(&vmax(n));
    }
    for (_, c) in &edge_cands {
        for (_, y) in c {
            consider(y);
        }
    }
    let mu = mu.unwrap();

    let mut locus = Locus::default();
    let mut truncated = false;
    for n in 0..b.len() {
        if vmax(n) == mu {
            locus.points.push(Point::vertex(n));
            truncated |= at_boundary(b, n);
        }
    }
    for (n, c) in edge_cands {
        let hits: Vec<&Rational> = c.iter().filter(|(_, y)| *y == mu).map(|(x, _)| x).collect();
        let (Some(lo), Some(hi)) = (hits.iter().min(), hits.iter().max()) else {
            continue;
        };
        if lo < hi {
            locus.pieces.push(Piece {
                edge: n,
                lo: (*lo).clone(),
                hi: (*hi).clone(),
            });
        } else if !lo.is_zero() && **lo != b.nodes[n].len {
            locus.points.push(Point {
                node: n,
                back: (*lo).clone(),
            });
        }
    }
    Ok(CharacteristicSet {
        locus,
        min_value: mu,
        truncated,
    })
}

#[derive(Debug, Clone)]
pub struct Basepoint {
    pub set: CharacteristicSet,
    /// Ends of the segment `T_S` (equal when it is a point).
    pub ends: (Point, Point),
    pub point: Point,
}

impl Basepoint {
    pub fn is_segment(&self) -> bool {
        self.ends.0 != self.ends.1
    }

    pub fn to_json(&self, b: &TreeBall) -> Value {
        json!({
            "l_S": fmt_rational(&self.set.min_value),
            "shape": if self.is_segment() { "segment" } else { "point" },
            "ends": [b.point_json(&self.ends.0), b.point_json(&self.ends.1)],
            "basepoint": b.point_json(&self.point),
            "locus": self.set.locus.to_json(b),
        })
    }
}

/// Midpoint of `T_S`. Fails rather than guess when `T_S` may leave the ball.
pub fn basepoint(b: &TreeBall, s: &[Word]) -> Result<Basepoint, TreeError> {
    let set = min_max_set(b, s)?;
    if set.truncated {
        return Err(TreeError::LocusTruncated);
    }
    let corners = set.locus.corners(b);
    let mut best = (corners[0].clone(), corners[0].clone(), int(0));
    for (i, x) in corners.iter().enumerate() {
        for y in &corners[i + 1..] {
            let d = b.dist(x, y);
            if d > best.2 {
                best = (x.clone(), y.clone(), d);
            }
        }
    }
    let (p, q, d) = best;
    for c in &corners {
        if b.dist(&p, c) + b.dist(c, &q) != d {
            return Err(TreeError::ShapeViolation);
        }
    }
    let point = b.point_along(&p, &q, &(d / int(2)));
    Ok(Basepoint {
        set,
        ends: (p, q),
        point,
    })
}
