//! Transverse section maps from a reduced base tree and sampled contraction
//! paths through the family of folded trees.
//!
//! The base is a reduced graph of groups whose marking sends each generator
//! to a single non-tree letter (or vertex generator). Its vertices are sent to
//! the basepoint `y_*` of the target, projected to the fixed set of the
//! vertex group when that group is cyclic, and edges go to geodesics.

use crate::folding::{fold_at_time, tighten, Dir, FoldError, Morphism, Span};
use crate::graph::{GraphOfGroups, GroupKind};
use crate::moves::is_reduced;
use crate::rational::{fmt_rational, int, Rational};
use crate::topology::{simplex_coords, SimplexCoords, TopologyError};
use crate::treegeom::{
    basepoint, build_ball_depth, characteristic_set, is_irreducible, project, with_growing_ball,
    Irreducibility, Point, TreeBall, TreeError,
};
use crate::word::{Letter, Word};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SectionError {
    #[error("base is not reduced: edge `{0}` can be collapsed")]
    BaseNotReduced(String),
    #[error("edge `{0}` maps to a single point")]
    DegenerateEdge(String),
    #[error("marking: {0}")]
    Marking(String),
    #[error("target action is not irreducible")]
    NotIrreducible,
    #[error("perturbed length of `{0}` is not positive")]
    BadPerturbation(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone)]
pub struct SectionMap {
    pub base: GraphOfGroups,
    pub target: GraphOfGroups,
    pub ball: TreeBall,
    pub basepoint: Point,
    /// Image of the chosen lift of each base vertex.
    pub vertex_images: Vec<Point>,
    /// Image of the lift of each base edge leaving the lift of its `from`
    /// vertex.
    pub edge_ends: Vec<(Point, Point)>,
    /// The base with each edge remetrized by the length of its image.
    pub remetrized: GraphOfGroups,
}

fn marking_err(e: impl ToString) -> SectionError {
    SectionError::Marking(e.to_string())
}

/// Target word for a loop of the base.
fn transfer(base: &GraphOfGroups, target: &GraphOfGroups, w: &Word) -> Result<Word, SectionError> {
    let b = base.unmark(w).map_err(marking_err)?;
    target.mark(&b).map_err(marking_err)
}

/// Nearest point to `p` fixed by the elliptic `g`, when the ball is large
/// enough to be sure of it.
fn project_to_fix(ball: &TreeBall, g: &Word, p: &Point) -> Result<Point, TreeError> {
    let fix = characteristic_set(ball, g)?;
    let q = project(ball, &fix.locus, p).ok_or(TreeError::LocusTruncated)?;
    let d = ball.dist(p, &q);
    for n in 0..ball.len() {
        let dn = ball.dist(p, &Point::vertex(n));
        if dn < d && !ball.nodes[n].expanded {
            return Err(TreeError::LocusTruncated);
        }
    }
    Ok(q)
}

pub fn section_map(
    base: &GraphOfGroups,
    target: &GraphOfGroups,
    radius: &Rational,
    cap: usize,
) -> Result<SectionMap, SectionError> {
    if let (false, Some(e)) = is_reduced(base) {
        return Err(SectionError::BaseNotReduced(base.edges[e].id.clone()));
    }
    if base.marking_generators() != target.marking_generators() {
        return Err(marking_err("base and target are marked by different generators"));
    }
    let paths = base.tree_paths();
    let mut stabilizers = Vec::new();
    for (v, vx) in base.vertices.iter().enumerate() {
        stabilizers.push(match vx.group {
            GroupKind::InfiniteCyclic => {
                let w = paths[v]
                    .concat(&Word::from_letters(vec![Letter::Vertex(v, 1)]))
                    .concat(&paths[v].inverse());
                Some(transfer(base, target, &w)?)
            }
            GroupKind::Trivial => None,
        });
    }
    // the lift of e from the lift of from(e) ends at g_e times the lift of to(e)
    let mut elements = Vec::new();
    for (i, e) in base.edges.iter().enumerate() {
        let w = paths[e.from]
            .concat(&Word::from_letters(vec![Letter::edge(i, true)]))
            .concat(&paths[e.to].inverse());
        elements.push(transfer(base, target, &w)?);
    }
    let s: Vec<Word> = target
        .marking
        .as_ref()
        .ok_or_else(|| marking_err("target has no marking"))?
        .values()
        .cloned()
        .collect();

    let (ball, y, vertex_images, edge_ends) = with_growing_ball(target, radius, cap, |ball| {
        let y = basepoint(ball, &s)?.point;
        let vertex_images = stabilizers
            .iter()
            .map(|g| match g {
                Some(g) => project_to_fix(ball, g, &y),
                None => Ok(y.clone()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut ends = Vec::new();
        for (i, e) in base.edges.iter().enumerate() {
            let far = ball
                .translate_point(&elements[i], &vertex_images[e.to])
                .ok_or(TreeError::ActionLeavesBall)?;
            ends.push((vertex_images[e.from].clone(), far));
        }
        Ok((ball.clone(), y, vertex_images, ends))
    })?;

    let mut lengths = Vec::new();
    for (i, (a, b)) in edge_ends.iter().enumerate() {
        let d = ball.dist(a, b);
        if d.is_zero() {
            return Err(SectionError::DegenerateEdge(base.edges[i].id.clone()));
        }
        lengths.push(d);
    }
    Ok(SectionMap {
        base: base.clone(),
        target: target.clone(),
        remetrized: base.with_lengths(&lengths),
        ball,
        basepoint: y,
        vertex_images,
        edge_ends,
    })
}

/// Direction of the quotient edge crossed from the parent of `n` to `n`.
fn parent_dir(ball: &TreeBall, n: usize) -> Dir {
    match ball.word(n).letters().last() {
        Some(&Letter::Edge { edge, inv }) => Dir::new(edge, inv),
        _ => unreachable!("non-root nodes end in an edge letter"),
    }
}

/// Span on the cell of `n` between points at distances `d1`, `d2` from `n`.
fn cell_span(ball: &TreeBall, n: usize, d1: &Rational, d2: &Rational) -> Span {
    let dir = parent_dir(ball, n);
    let len = &ball.nodes[n].len;
    // position measured from the quotient edge's `from` end
    let pos = |d: &Rational| if dir.fwd { len - d } else { d.clone() };
    Span::new(dir.edge, pos(d1), pos(d2))
}

/// The geodesic from `p` to `q` read in the quotient graph.
pub fn geodesic_spans(ball: &TreeBall, p: &Point, q: &Point) -> Vec<Span> {
    if !p.is_vertex() && !q.is_vertex() && p.node == q.node {
        return tighten([cell_span(ball, p.node, &p.back, &q.back)]);
    }
    let mut best: Option<(Rational, usize, usize)> = None;
    for (a, da) in ball.endpoints(p) {
        for (b, db) in ball.endpoints(q) {
            let d = &da + &db + ball.vertex_dist(a, b);
            if best.as_ref().map_or(true, |x| d < x.0) {
                best = Some((d, a, b));
            }
        }
    }
    let (_, a, b) = best.unwrap();
    let mut out = Vec::new();
    // from p to the vertex a along p's cell
    if !p.is_vertex() {
        let to = if a == p.node { int(0) } else { ball.nodes[p.node].len.clone() };
        out.push(cell_span(ball, p.node, &p.back, &to));
    }
    let way = ball.vertex_path(a, b);
    for w in way.windows(2) {
        let (x, y) = (w[0], w[1]);
        if ball.nodes[y].parent == Some(x) {
            out.push(cell_span(ball, y, &ball.nodes[y].len, &int(0)));
        } else {
            out.push(cell_span(ball, x, &int(0), &ball.nodes[x].len));
        }
    }
    if !q.is_vertex() {
        let from = if b == q.node { int(0) } else { ball.nodes[q.node].len.clone() };
        out.push(cell_span(ball, q.node, &from, &q.back));
    }
    tighten(out)
}

impl SectionMap {
    /// The induced map from the remetrized base onto the target.
    pub fn morphism(&self) -> Result<Morphism, SectionError> {
        let images = self
            .edge_ends
            .iter()
            .map(|(a, b)| geodesic_spans(&self.ball, a, b))
            .collect();
        Ok(Morphism::new(self.remetrized.clone(), self.target.clone(), images)?)
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edge_ends
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                json!({
                    "edge": self.base.edges[i].id,
                    "from": self.ball.point_json(a),
                    "to": self.ball.point_json(b),
                    "length": fmt_rational(&self.remetrized.edges[i].length),
                })
            })
            .collect();
        let vertices: Vec<Value> = self
            .vertex_images
            .iter()
            .enumerate()
            .map(|(i, p)| json!({"vertex": self.base.vertices[i].id, "image": self.ball.point_json(p)}))
            .collect();
        json!({
            "basepoint": self.ball.point_json(&self.basepoint),
            "vertices": vertices,
            "edges": edges,
            "remetrized": self.remetrized.to_json_value(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ContractionPath {
    pub section: SectionMap,
    pub fold_depth: Rational,
    /// `(t, T_t)`: `t = 0` is the remetrized base, `t = 1` the target.
    pub steps: Vec<(Rational, GraphOfGroups)>,
    pub terminal: SimplexCoords,
    /// Straight line in the simplex from the terminal point to the base.
    pub line: Vec<(Rational, SimplexCoords)>,
}

pub fn contraction_path(
    base: &GraphOfGroups,
    target: &GraphOfGroups,
    times: &[Rational],
    line_samples: usize,
    cap: usize,
) -> Result<ContractionPath, SectionError> {
    let radius = target.edges.iter().map(|e| e.length.clone()).max().unwrap_or(int(1));
    let section = section_map(base, target, &radius, cap)?;
    let beta = section.morphism()?;
    let steps = times
        .iter()
        .map(|t| Ok((t.clone(), fold_at_time(&beta, t)?.tree)))
        .collect::<Result<Vec<_>, FoldError>>()?;
    let terminal = simplex_coords(&section.remetrized)?;
    let home = simplex_coords(base)?;
    let line = (0..=line_samples)
        .filter(|_| line_samples > 0)
        .map(|k| {
            let s = Rational::new((k as i64).into(), (line_samples as i64).into());
            (s.clone(), terminal.lerp(&home, &s))
        })
        .collect();
    Ok(ContractionPath {
        fold_depth: beta.fold_depth()?,
        section,
        steps,
        terminal,
        line,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub depth: usize,
    pub displacement: Rational,
    pub distortion: Rational,
    pub holds: bool,
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "ball_depth": self.depth,
            "displacement": fmt_rational(&self.displacement),
            "distortion": fmt_rational(&self.distortion),
            "bound": fmt_rational(&(&self.distortion * int(4))),
            "holds": self.holds,
        })
    }
}

/// Moves the basepoint by perturbing edge lengths by `±perturbation`
/// (alternating signs) and compares with four times the distortion of the
/// identity relation between the two balls.
pub fn basepoint_stability(
    target: &GraphOfGroups,
    perturbation: &Rational,
    cap: usize,
) -> Result<StabilityReport, SectionError> {
    if !matches!(is_irreducible(target, 3), Irreducibility::Irreducible(..)) {
        return Err(SectionError::NotIrreducible);
    }
    let lengths: Vec<Rational> = target
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let l = if i % 2 == 0 { &e.length + perturbation } else { &e.length - perturbation };
            if l > int(0) {
                Ok(l)
            } else {
                Err(SectionError::BadPerturbation(e.id.clone()))
            }
        })
        .collect::<Result<_, _>>()?;
    let other = target.with_lengths(&lengths);
    let s = |g: &GraphOfGroups| -> Vec<Word> { g.marking.as_ref().unwrap().values().cloned().collect() };
    let mut last = TreeError::LocusTruncated;
    for depth in 2..=10 {
        let a = build_ball_depth(target, depth, cap);
        let b = build_ball_depth(&other, depth, cap);
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Err(last_or(last, e).into()),
        };
        let (ya, yb) = match (basepoint(&a, &s(target)), basepoint(&b, &s(&other))) {
            (Ok(x), Ok(y)) => (x.point, y.point),
            (Err(e), _) | (_, Err(e)) => {
                last = e;
                continue;
            }
        };
        let mut distortion = int(0);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let d = (a.vertex_dist(i, j) - b.vertex_dist(i, j)).abs();
                distortion = distortion.max(d);
            }
        }
        // the identity relation extended linearly over edges
        let moved = if ya.is_vertex() {
            ya.clone()
        } else {
            Point {
                node: ya.node,
                back: &ya.back * &b.nodes[ya.node].len / &a.nodes[ya.node].len,
            }
        };
        let displacement = b.dist(&moved, &yb);
        return Ok(StabilityReport {
            depth,
            holds: displacement <= &distortion * int(4),
            displacement,
            distortion,
        });
    }
    Err(last.into())
}

fn last_or(last: TreeError, e: TreeError) -> TreeError {
    match e {
        TreeError::BallTooLarge { .. } => last,
        other => other,
    }
}
