//! Length vectors, simplex coordinates and verification of equivariant
//! ε-approximations between finite balls.

use crate::graph::GraphOfGroups;
use crate::normal::{translation_length, ReduceError};
use crate::rational::{fmt_rational, int, rat, Rational};
use crate::treegeom::{Point, TreeBall};
use crate::word::{BaseWord, Word};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("tree has zero volume")]
    ZeroVolume,
    #[error("edge order does not match the template")]
    EdgeOrderMismatch,
    #[error("barycentric coordinates must be positive and sum to 1")]
    BadCoordinates,
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("marking: {0}")]
    Marking(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthVector {
    pub classes: Vec<Word>,
    pub values: Vec<Rational>,
}

impl LengthVector {
    pub fn to_json(&self, g: &GraphOfGroups) -> Value {
        json!({
            "classes": self.classes.iter().map(|w| w.display(g)).collect::<Vec<_>>(),
            "values": self.values.iter().map(fmt_rational).collect::<Vec<_>>(),
        })
    }
}

pub fn length_vector(g: &GraphOfGroups, classes: &[Word]) -> Result<LengthVector, TopologyError> {
    let values = classes
        .iter()
        .map(|w| translation_length(g, w))
        .collect::<Result<_, _>>()?;
    Ok(LengthVector {
        classes: classes.to_vec(),
        values,
    })
}

/// Lengths of base-group words read through the marking.
pub fn marked_lengths(g: &GraphOfGroups, words: &[BaseWord]) -> Result<Vec<Rational>, TopologyError> {
    words
        .iter()
        .map(|w| {
            let x = g.mark(w).map_err(|e| TopologyError::Marking(e.to_string()))?;
            Ok(translation_length(g, &x)?)
        })
        .collect()
}

/// Every freely reduced base word of length `1..=depth`.
pub fn enumerate_base_words(gens: &[String], depth: usize) -> Vec<BaseWord> {
    let mut out = Vec::new();
    let mut layer = vec![(BaseWord::default(), None::<(usize, i64)>)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, last) in &layer {
            for (i, g) in gens.iter().enumerate() {
                for s in [1, -1] {
                    if *last == Some((i, -s)) {
                        continue;
                    }
                    let mut x = w.clone();
                    x.push(g, s);
                    next.push((x, Some((i, s))));
                }
            }
        }
        out.extend(next.iter().map(|(w, _)| w.clone()));
        layer = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexCoords {
    pub edge_order: Vec<String>,
    pub barycentric: Vec<Rational>,
    pub volume: Rational,
}

impl SimplexCoords {
    pub fn to_json(&self) -> Value {
        json!({
            "edge_order": self.edge_order,
            "barycentric": self.barycentric.iter().map(fmt_rational).collect::<Vec<_>>(),
            "volume": fmt_rational(&self.volume),
        })
    }

    /// Straight line to `other` in barycentric coordinates and volume.
    pub fn lerp(&self, other: &SimplexCoords, s: &Rational) -> SimplexCoords {
        let mix = |a: &Rational, b: &Rational| a + (b - a) * s;
        SimplexCoords {
            edge_order: self.edge_order.clone(),
            barycentric: self
                .barycentric
                .iter()
                .zip(&other.barycentric)
                .map(|(a, b)| mix(a, b))
                .collect(),
            volume: mix(&self.volume, &other.volume),
        }
    }
}

/// Barycentric coordinates `length / volume` together with the volume.
pub fn simplex_coords(g: &GraphOfGroups) -> Result<SimplexCoords, TopologyError> {
    let volume = g.volume();
    if !volume.is_positive() {
        return Err(TopologyError::ZeroVolume);
    }
    Ok(SimplexCoords {
        edge_order: g.edges.iter().map(|e| e.id.clone()).collect(),
        barycentric: g.edges.iter().map(|e| &e.length / &volume).collect(),
        volume,
    })
}

pub fn simplex_tree(c: &SimplexCoords, template: &GraphOfGroups) -> Result<GraphOfGroups, TopologyError> {
    let ids: Vec<&String> = template.edges.iter().map(|e| &e.id).collect();
    if ids.len() != c.edge_order.len() || ids.iter().zip(&c.edge_order).any(|(a, b)| *a != b) {
        return Err(TopologyError::EdgeOrderMismatch);
    }
    let sum: Rational = c.barycentric.iter().sum();
    if sum != int(1) || c.barycentric.iter().any(|x| !x.is_positive()) || !c.volume.is_positive() {
        return Err(TopologyError::BadCoordinates);
    }
    let lengths: Vec<Rational> = c.barycentric.iter().map(|x| x * &c.volume).collect();
    Ok(template.with_lengths(&lengths))
}

/// A finite relation between points of two balls.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub left: TreeBall,
    pub right: TreeBall,
    pub pairs: Vec<(Point, Point)>,
    pub epsilon: Rational,
    /// Group elements, read through each side's marking.
    pub p: Vec<BaseWord>,
    pub full: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("{side} point is related to nothing")]
    NotSurjective { side: Side, point: Point },
    #[error("distortion {distortion} is not below epsilon")]
    DistortionViolation {
        x: Point,
        x2: Point,
        y: Point,
        y2: Point,
        distortion: Rational,
    },
    #[error("translate of a related pair by `{g}` is not related")]
    EquivarianceViolation { g: BaseWord, x: Point, y: Point },
    #[error("{side} point on a related segment has no partner within 2ε")]
    DensityViolation { side: Side, point: Point },
    #[error("point outside its ball")]
    PointOutsideBall { side: Side, point: Point },
    #[error("marking: {0}")]
    Marking(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl Violation {
    pub fn to_json(&self, a: &Approximation) -> Value {
        let pt = |s: Side, p: &Point| match s {
            Side::Left => a.left.point_json(p),
            Side::Right => a.right.point_json(p),
        };
        match self {
            Violation::NotSurjective { side, point } => {
                json!({"violation": "NotSurjective", "side": side.to_string(), "point": pt(*side, point)})
            }
            Violation::DistortionViolation { x, x2, y, y2, distortion } => json!({
                "violation": "DistortionViolation",
                "x": pt(Side::Left, x), "x2": pt(Side::Left, x2),
                "y": pt(Side::Right, y), "y2": pt(Side::Right, y2),
                "distortion": fmt_rational(distortion),
            }),
            Violation::EquivarianceViolation { g, x, y } => json!({
                "violation": "EquivarianceViolation",
                "g": g.to_string(), "x": pt(Side::Left, x), "y": pt(Side::Right, y),
            }),
            Violation::DensityViolation { side, point } => {
                json!({"violation": "DensityViolation", "side": side.to_string(), "point": pt(*side, point)})
            }
            Violation::PointOutsideBall { side, point } => json!({
                "violation": "PointOutsideBall", "side": side.to_string(),
                "node": point.node, "offset": fmt_rational(&point.back),
            }),
            Violation::Marking(m) => json!({"violation": "Marking", "detail": m}),
        }
    }
}

fn translate(ball: &TreeBall, g: &BaseWord, p: &Point) -> Result<Option<Point>, Violation> {
    let w = ball
        .graph
        .mark(g)
        .map_err(|e| Violation::Marking(e.to_string()))?;
    Ok(ball.translate_point(&w, p))
}

impl Approximation {
    /// Ball vertices together with every related point.
    pub fn points(&self, side: Side) -> BTreeSet<Point> {
        let (ball, pick): (&TreeBall, fn(&(Point, Point)) -> &Point) = match side {
            Side::Left => (&self.left, |p| &p.0),
            Side::Right => (&self.right, |p| &p.1),
        };
        (0..ball.len())
            .map(Point::vertex)
            .chain(self.pairs.iter().map(|p| pick(p).clone()))
            .collect()
    }

    fn related(&self, side: Side) -> BTreeSet<&Point> {
        self.pairs
            .iter()
            .map(|(x, y)| if side == Side::Left { x } else { y })
            .collect()
    }

    pub fn check(&self) -> Result<(), Violation> {
        for (x, y) in &self.pairs {
            if !self.left.contains(x) {
                return Err(Violation::PointOutsideBall { side: Side::Left, point: x.clone() });
            }
            if !self.right.contains(y) {
                return Err(Violation::PointOutsideBall { side: Side::Right, point: y.clone() });
            }
        }
        for side in [Side::Left, Side::Right] {
            let related = self.related(side);
            if let Some(p) = self.points(side).into_iter().find(|p| !related.contains(p)) {
                return Err(Violation::NotSurjective { side, point: p });
            }
        }
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            for (x2, y2) in &self.pairs[i + 1..] {
                let distortion = (self.left.dist(x, x2) - self.right.dist(y, y2)).abs();
                if distortion >= self.epsilon {
                    return Err(Violation::DistortionViolation {
                        x: x.clone(),
                        x2: x2.clone(),
                        y: y.clone(),
                        y2: y2.clone(),
                        distortion,
                    });
                }
            }
        }
        let set: BTreeSet<&(Point, Point)> = self.pairs.iter().collect();
        for g in &self.p {
            for (x, y) in &self.pairs {
                let (Some(gx), Some(gy)) = (translate(&self.left, g, x)?, translate(&self.right, g, y)?) else {
                    continue;
                };
                if !set.contains(&(gx, gy)) {
                    return Err(Violation::EquivarianceViolation {
                        g: g.clone(),
                        x: x.clone(),
                        y: y.clone(),
                    });
                }
            }
        }
        if self.full {
            self.check_density()?;
        }
        Ok(())
    }

    /// Points along related segments have related points within `2ε`.
    fn check_density(&self) -> Result<(), Violation> {
        let two_eps = &self.epsilon * int(2);
        for side in [Side::Left, Side::Right] {
            let ball = if side == Side::Left { &self.left } else { &self.right };
            let related: Vec<&Point> = self.related(side).into_iter().collect();
            let near = Nearest::new(ball, &related);
            for (i, a) in related.iter().enumerate() {
                for b in &related[i + 1..] {
                    let d = ball.dist(a, b);
                    for f in [rat(1, 4), rat(1, 2), rat(3, 4)] {
                        let z = ball.point_along(a, b, &(&d * f));
                        if near.dist(ball, &z) >= two_eps {
                            return Err(Violation::DensityViolation { side, point: z });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `R_δ`: pairs within `δ` of a related pair in the `L¹` sense, over the
    /// declared point sets, with `ε` raised to `ε + 2δ`.
    pub fn thicken(&self, delta: &Rational) -> Approximation {
        let left = self.points(Side::Left);
        let right = self.points(Side::Right);
        let mut pairs = BTreeSet::new();
        for (x, y) in &self.pairs {
            for x2 in &left {
                let dx = self.left.dist(x, x2);
                if dx > *delta {
                    continue;
                }
                for y2 in &right {
                    if &dx + self.right.dist(y, y2) <= *delta {
                        pairs.insert((x2.clone(), y2.clone()));
                    }
                }
            }
        }
        Approximation {
            left: self.left.clone(),
            right: self.right.clone(),
            pairs: pairs.into_iter().collect(),
            epsilon: &self.epsilon + delta * int(2),
            p: self.p.clone(),
            full: self.full,
        }
    }

    /// The identity relation on the vertices of a ball.
    pub fn identity(ball: TreeBall, epsilon: Rational, p: Vec<BaseWord>) -> Approximation {
        let pairs = (0..ball.len()).map(|n| (Point::vertex(n), Point::vertex(n))).collect();
        Approximation {
            left: ball.clone(),
            right: ball,
            pairs,
            epsilon,
            p,
            full: false,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "epsilon": fmt_rational(&self.epsilon),
            "P": self.p.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "full": self.full,
            "pairs": self.pairs.iter().map(|(x, y)| json!([self.left.point_json(x), self.right.point_json(y)])).collect::<Vec<_>>(),
        })
    }
}

/// Distance from any ball point to the nearest of a fixed set of points.
struct Nearest {
    /// Per vertex, by multi-source Dijkstra over the ball.
    vertex: Vec<Option<Rational>>,
    /// Offsets of set points inside each edge, keyed by lower node.
    inside: BTreeMap<usize, Vec<Rational>>,
}

impl Nearest {
    fn new(ball: &TreeBall, points: &[&Point]) -> Nearest {
        let mut vertex: Vec<Option<Rational>> = vec![None; ball.len()];
        let mut inside: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
        let mut heap = BinaryHeap::new();
        for p in points {
            for (n, d) in ball.endpoints(p) {
                heap.push(Reverse((d, n)));
            }
            if !p.is_vertex() {
                inside.entry(p.node).or_default().push(p.back.clone());
            }
        }
        while let Some(Reverse((d, n))) = heap.pop() {
            if vertex[n].is_some() {
                continue;
            }
            for m in ball.neighbours(n) {
                if vertex[m].is_none() {
                    let len = if ball.nodes[m].parent == Some(n) { &ball.nodes[m].len } else { &ball.nodes[n].len };
                    heap.push(Reverse((&d + len, m)));
                }
            }
            vertex[n] = Some(d);
        }
        Nearest { vertex, inside }
    }

    fn dist(&self, ball: &TreeBall, z: &Point) -> Rational {
        let mut best: Option<Rational> = None;
        let mut offer = |d: Rational| {
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        };
        for (n, d) in ball.endpoints(z) {
            if let Some(v) = &self.vertex[n] {
                offer(d + v);
            }
        }
        if !z.is_vertex() {
            for r in self.inside.get(&z.node).into_iter().flatten() {
                offer((r - &z.back).abs());
            }
        }
        best.expect("nonempty point set")
    }
}

/// Reads `{"vertex": label}` or `{"vertex", "toward", "offset"}`.
pub fn point_from_json(ball: &TreeBall, v: &Value) -> Result<Point, String> {
    let find = |k: &str| -> Result<usize, String> {
        let label = v
            .get(k)
            .and_then(Value::as_str)
            .ok_or_else(|| format!("point needs `{k}`"))?;
        (0..ball.len())
            .find(|&n| ball.label(n) == label)
            .ok_or_else(|| format!("no ball vertex `{label}`"))
    };
    let node = find("vertex")?;
    let Some(offset) = v.get("offset") else {
        return Ok(Point::vertex(node));
    };
    let offset = offset
        .as_str()
        .ok_or("offset must be a string")
        .and_then(|s| crate::rational::parse_rational(s).map_err(|_| "bad offset"))?;
    let toward = find("toward")?;
    let point = if ball.nodes[node].parent == Some(toward) {
        Point { node, back: offset }
    } else if ball.nodes[toward].parent == Some(node) {
        Point {
            node: toward,
            back: &ball.nodes[toward].len - &offset,
        }
    } else {
        return Err("`toward` is not adjacent".into());
    };
    if !ball.contains(&point) || point.back.is_zero() {
        return Err("offset must lie strictly inside the edge".into());
    }
    Ok(point)
}
