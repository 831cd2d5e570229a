//! Finite balls in the Bass–Serre tree with exact metric queries.
//!
//! Vertices of the tree are cosets `w G_v`, stored by their [`CosetPath`]
//! normal form. A ball is grown breadth first from the base coset; a node is
//! expanded (all of its link added) when it lies within the requested limit.

mod charset;
mod irreducible;

pub use charset::{
    basepoint, characteristic_set, min_max_set, project, Basepoint, CharacteristicSet, Locus,
    Piece,
};
pub use irreducible::{is_irreducible, Irreducibility, ReducibleReason};

use crate::graph::GraphOfGroups;
use crate::normal::{coset_normal_form, transversal_size, CosetPath};
use crate::rational::{fmt_rational, int, Rational};
use crate::word::{Letter, Word};
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::HashMap;

pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error")]
pub enum TreeError {
    #[error("ball exceeds {cap} vertices")]
    BallTooLarge { cap: usize },
    #[error("point is not in the ball")]
    PointOutsideBall,
    #[error("no ball point has its translate inside the ball")]
    ActionLeavesBall,
    #[error("locus meets the ball boundary; enlarge the radius")]
    LocusTruncated,
    #[error("empty element set")]
    EmptyS,
    #[error("word is not a loop at the base vertex: {reason}")]
    NotALoop { reason: String },
    #[error("locus is not a point or a segment")]
    ShapeViolation,
}

/// How far to grow a ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    /// Expand every vertex at distance `< r` from the base.
    Radius(Rational),
    /// Expand every vertex fewer than `k` edges from the base.
    Depth(usize),
}

#[derive(Debug, Clone)]
pub struct Node {
    pub path: CosetPath,
    /// Quotient vertex this coset lies over.
    pub vertex: usize,
    pub parent: Option<usize>,
    /// Quotient edge crossed from the parent, and its length.
    pub edge: Option<usize>,
    pub len: Rational,
    pub depth: Rational,
    pub level: usize,
    pub expanded: bool,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TreeBall {
    pub graph: GraphOfGroups,
    pub nodes: Vec<Node>,
    index: HashMap<CosetPath, usize>,
    /// Every vertex closer than this to the base has its full link.
    pub radius: Rational,
}

/// A point of the ball: the vertex `node`, or the point at distance `back`
/// from it on the edge toward its parent (`0 < back < len`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub node: usize,
    pub back: Rational,
}

impl Point {
    pub fn vertex(node: usize) -> Self {
        Point {
            node,
            back: int(0),
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.back.is_zero()
    }
}

pub fn build_ball(g: &GraphOfGroups, radius: &Rational, cap: usize) -> Result<TreeBall, TreeError> {
    TreeBall::build(g, Limit::Radius(radius.clone()), cap)
}

pub fn build_ball_depth(g: &GraphOfGroups, depth: usize, cap: usize) -> Result<TreeBall, TreeError> {
    TreeBall::build(g, Limit::Depth(depth), cap)
}

/// Letters leaving a vertex of the quotient: `e` for edges ending there and
/// `e^-1` for edges starting there, in edge order.
fn outgoing(g: &GraphOfGroups, v: usize) -> Vec<Letter> {
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if e.to == v {
            out.push(Letter::edge(i, false));
        }
        if e.from == v {
            out.push(Letter::edge(i, true));
        }
    }
    out
}

impl TreeBall {
    pub fn build(g: &GraphOfGroups, limit: Limit, cap: usize) -> Result<TreeBall, TreeError> {
        let root = Node {
            path: CosetPath::root(),
            vertex: g.base(),
            parent: None,
            edge: None,
            len: int(0),
            depth: int(0),
            level: 0,
            expanded: false,
            children: Vec::new(),
        };
        let mut ball = TreeBall {
            graph: g.clone(),
            nodes: vec![root],
            index: HashMap::from([(CosetPath::root(), 0)]),
            radius: int(0),
        };
        let links: Vec<Vec<Letter>> = (0..g.vertices.len()).map(|v| outgoing(g, v)).collect();
        let mut frontier: Option<Rational> = None;
        let mut i = 0;
        while i < ball.nodes.len() {
            let within = match &limit {
                Limit::Radius(r) => ball.nodes[i].depth < *r,
                Limit::Depth(k) => ball.nodes[i].level < *k,
            };
            if !within {
                let d = &ball.nodes[i].depth;
                if frontier.as_ref().map_or(true, |f| d < f) {
                    frontier = Some(d.clone());
                }
                i += 1;
                continue;
            }
            let v = ball.nodes[i].vertex;
            let back = ball.nodes[i].path.steps.last().map(|(_, l)| l.inverse());
            for &l in &links[v] {
                for j in 0..transversal_size(g, l) {
                    if j == 0 && Some(l) == back {
                        continue;
                    }
                    let mut path = ball.nodes[i].path.clone();
                    path.steps.push((j, l));
                    let Letter::Edge { edge: e, .. } = l else {
                        unreachable!("links hold edge letters")
                    };
                    let len = g.edges[e].length.clone();
                    let id = ball.nodes.len();
                    ball.index.insert(path.clone(), id);
                    ball.nodes.push(Node {
                        path,
                        vertex: l.right(g),
                        parent: Some(i),
                        edge: Some(e),
                        depth: &ball.nodes[i].depth + &len,
                        len,
                        level: ball.nodes[i].level + 1,
                        expanded: false,
                        children: Vec::new(),
                    });
                    ball.nodes[i].children.push(id);
                    if ball.nodes.len() > cap {
                        return Err(TreeError::BallTooLarge { cap });
                    }
                }
            }
            ball.nodes[i].expanded = true;
            i += 1;
        }
        ball.radius = match (limit, frontier) {
            (Limit::Radius(r), _) => r,
            (_, Some(f)) => f,
            // finite tree, everything expanded
            (Limit::Depth(_), None) => ball.nodes.iter().map(|n| n.depth.clone()).max().unwrap_or_else(|| int(0)),
        };
        Ok(ball)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn lookup(&self, path: &CosetPath) -> Option<usize> {
        self.index.get(path).copied()
    }

    /// Representative word of a node's coset.
    pub fn word(&self, n: usize) -> Word {
        self.nodes[n].path.to_word(&self.graph)
    }

    pub fn label(&self, n: usize) -> String {
        let w = self.word(n);
        if w.is_empty() {
            "1".to_string()
        } else {
            w.display(&self.graph)
        }
    }

    /// Neighbours of a node inside the ball.
    pub fn neighbours(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes[n].parent.into_iter().chain(self.nodes[n].children.iter().copied())
    }

    pub fn check_element(&self, w: &Word) -> Result<(), TreeError> {
        w.check_loop(&self.graph, Some(self.graph.base()))
            .map_err(|reason| TreeError::NotALoop { reason })
    }

    /// `w · n`, if it lies in the ball. `w` must be a loop at the base vertex.
    pub fn translate(&self, w: &Word, n: usize) -> Option<usize> {
        let cf = coset_normal_form(&self.graph, &w.concat(&self.word(n)));
        self.lookup(&cf)
    }

    pub fn translate_point(&self, w: &Word, p: &Point) -> Option<Point> {
        let a = self.translate(w, p.node)?;
        if p.is_vertex() {
            return Some(Point::vertex(a));
        }
        let b = self.translate(w, self.nodes[p.node].parent?)?;
        if self.nodes[a].parent == Some(b) {
            Some(Point {
                node: a,
                back: p.back.clone(),
            })
        } else if self.nodes[b].parent == Some(a) {
            Some(Point {
                node: b,
                back: &self.nodes[b].len - &p.back,
            })
        } else {
            None
        }
    }

    pub fn vertex_dist(&self, a: usize, b: usize) -> Rational {
        let c = &self.nodes[self.lca(a, b)].depth;
        &self.nodes[a].depth + &self.nodes[b].depth - c - c
    }

    /// Whether `b` lies in the subtree below `a`.
    fn is_below(&self, a: usize, mut b: usize) -> bool {
        while self.nodes[b].level > self.nodes[a].level {
            b = self.nodes[b].parent.unwrap();
        }
        a == b
    }

    /// The vertex a geodesic from `p` toward `other` leaves `p`'s edge by,
    /// and the distance to it.
    fn exit(&self, p: &Point, other: usize) -> (usize, Rational) {
        let n = &self.nodes[p.node];
        if p.is_vertex() {
            (p.node, int(0))
        } else if self.is_below(p.node, other) {
            (p.node, p.back.clone())
        } else {
            (n.parent.unwrap(), &n.len - &p.back)
        }
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.nodes[a].level > self.nodes[b].level {
            a = self.nodes[a].parent.unwrap();
        }
        while self.nodes[b].level > self.nodes[a].level {
            b = self.nodes[b].parent.unwrap();
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }

    /// Vertex path from `a` to `b`, both ends included.
    pub fn vertex_path(&self, a: usize, b: usize) -> Vec<usize> {
        let c = self.lca(a, b);
        let mut up = vec![a];
        let mut x = a;
        while x != c {
            x = self.nodes[x].parent.unwrap();
            up.push(x);
        }
        let mut down = Vec::new();
        let mut y = b;
        while y != c {
            down.push(y);
            y = self.nodes[y].parent.unwrap();
        }
        up.extend(down.into_iter().rev());
        up
    }

    /// The one or two vertices bounding the cell containing `p`, with distances.
    pub fn endpoints(&self, p: &Point) -> Vec<(usize, Rational)> {
        if p.is_vertex() {
            vec![(p.node, int(0))]
        } else {
            let n = &self.nodes[p.node];
            vec![
                (p.node, p.back.clone()),
                (n.parent.unwrap(), &n.len - &p.back),
            ]
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.node < self.nodes.len()
            && !p.back.is_negative()
            && (p.is_vertex() || (self.nodes[p.node].parent.is_some() && p.back < self.nodes[p.node].len))
    }

    pub fn dist(&self, p: &Point, q: &Point) -> Rational {
        if !p.is_vertex() && !q.is_vertex() && p.node == q.node {
            return (&p.back - &q.back).abs();
        }
        let (a, da) = self.exit(p, q.node);
        let (b, db) = self.exit(q, p.node);
        da + db + self.vertex_dist(a, b)
    }

    pub fn checked_dist(&self, p: &Point, q: &Point) -> Result<Rational, TreeError> {
        if self.contains(p) && self.contains(q) {
            Ok(self.dist(p, q))
        } else {
            Err(TreeError::PointOutsideBall)
        }
    }

    /// `d(p, w p)`, when `w p` is in the ball.
    pub fn displacement(&self, w: &Word, p: &Point) -> Option<Rational> {
        self.translate_point(w, p).map(|q| self.dist(p, &q))
    }

    /// `d(n, w n)` read off the two coset normal forms, so `w n` may lie
    /// outside the ball.
    pub fn vertex_displacement(&self, w: &Word, n: usize) -> Rational {
        let g = &self.graph;
        let p = coset_normal_form(g, &self.word(n));
        let q = coset_normal_form(g, &w.concat(&self.word(n)));
        let common = p.steps.iter().zip(&q.steps).take_while(|(a, b)| a == b).count();
        let tail = |c: &CosetPath| -> Rational {
            c.steps[common..]
                .iter()
                .map(|(_, l)| match l {
                    Letter::Edge { edge, .. } => g.edges[*edge].length.clone(),
                    Letter::Vertex(..) => int(0),
                })
                .sum()
        };
        tail(&p) + tail(&q)
    }

    /// The point at distance `s` from `p` along the geodesic to `q`.
    pub fn point_along(&self, p: &Point, q: &Point, s: &Rational) -> Point {
        let total = self.dist(p, q);
        assert!(!s.is_negative() && *s <= total, "offset off the geodesic");
        let mut way = vec![p.clone()];
        if !(self.same_cell(p, q)) {
            let exit = self.exit(p, q.node).0;
            let entry = self.exit(q, p.node).0;
            for v in self.vertex_path(exit, entry) {
                let v = Point::vertex(v);
                if way.last() != Some(&v) {
                    way.push(v);
                }
            }
        }
        if way.last() != Some(q) {
            way.push(q.clone());
        }
        let mut left = s.clone();
        for pair in way.windows(2) {
            let d = self.dist(&pair[0], &pair[1]);
            if left <= d {
                return self.along_edge(&pair[0], &pair[1], &left);
            }
            left -= d;
        }
        q.clone()
    }

    fn same_cell(&self, p: &Point, q: &Point) -> bool {
        if p.is_vertex() && q.is_vertex() {
            return p.node == q.node
                || self.nodes[p.node].parent == Some(q.node)
                || self.nodes[q.node].parent == Some(p.node);
        }
        let cell = |x: &Point, y: &Point| {
            // x interior: y lies in the closure of x's edge
            y.node == x.node || (y.is_vertex() && self.nodes[x.node].parent == Some(y.node))
        };
        if !p.is_vertex() {
            cell(p, q)
        } else {
            cell(q, p)
        }
    }

    /// Interpolates between two points of one closed edge.
    fn along_edge(&self, x: &Point, y: &Point, s: &Rational) -> Point {
        if s.is_zero() {
            return x.clone();
        }
        let c = if !x.is_vertex() {
            x.node
        } else if !y.is_vertex() {
            y.node
        } else if self.nodes[x.node].parent == Some(y.node) {
            x.node
        } else {
            y.node
        };
        let len = &self.nodes[c].len;
        let coord = |p: &Point| {
            if p.node == c {
                p.back.clone()
            } else {
                len.clone()
            }
        };
        let (cx, cy) = (coord(x), coord(y));
        let t = if cy > cx { cx + s } else { cx - s };
        if t.is_zero() {
            Point::vertex(c)
        } else if t == *len {
            Point::vertex(self.nodes[c].parent.unwrap())
        } else {
            Point { node: c, back: t }
        }
    }

    pub fn point_json(&self, p: &Point) -> Value {
        if p.is_vertex() {
            json!({ "vertex": self.label(p.node) })
        } else {
            json!({
                "vertex": self.label(p.node),
                "toward": self.label(self.nodes[p.node].parent.unwrap()),
                "offset": fmt_rational(&p.back),
            })
        }
    }

    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                json!({
                    "word": self.label(i),
                    "vertex": self.graph.vertices[n.vertex].id,
                    "depth": fmt_rational(&n.depth),
                })
            })
            .collect();
        let edges: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| {
                n.parent.map(|p| {
                    json!({
                        "from": self.label(p),
                        "to": self.label(i),
                        "edge": self.graph.edges[n.edge.unwrap()].id,
                        "length": fmt_rational(&n.len),
                    })
                })
            })
            .collect();
        json!({
            "radius": fmt_rational(&self.radius),
            "vertex_count": self.nodes.len(),
            "vertices": vertices,
            "edges": edges,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph ball {\n");
        for i in 0..self.nodes.len() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", self.label(i)));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                s.push_str(&format!("  n{p} -- n{i} [label=\"{}\"];\n", fmt_rational(&n.len)));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Runs `f` on balls of doubling radius until it stops reporting truncation.
///
/// When the next ball would exceed `cap`, the last truncation error is
/// returned instead of `BallTooLarge`.
pub fn with_growing_ball<T>(
    g: &GraphOfGroups,
    start: &Rational,
    cap: usize,
    mut f: impl FnMut(&TreeBall) -> Result<T, TreeError>,
) -> Result<T, TreeError> {
    let mut r = if start.is_positive() { start.clone() } else { int(1) };
    let mut last: Option<TreeError> = None;
    loop {
        let ball = match build_ball(g, &r, cap) {
            Ok(b) => b,
            Err(e) => return Err(last.unwrap_or(e)),
        };
        match f(&ball) {
            Err(e @ (TreeError::LocusTruncated | TreeError::ActionLeavesBall)) => last = Some(e),
            other => return other,
        }
        r = r * int(2);
    }
}
