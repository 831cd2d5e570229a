//! Britton reduction, cyclic reduction and coset normal forms.

use crate::graph::GraphOfGroups;
use crate::rational::Rational;
use crate::word::{Letter, Word};
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Elliptic,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error", content = "detail")]
pub enum ReduceError {
    #[error("word is not a closed path: {0}")]
    NotALoop(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

/// Britton-reduced and cyclically reduced form of a loop.
///
/// When hyperbolic the letters start with an edge letter and end with at most
/// one vertex power; when elliptic they are a single vertex power or empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedWord {
    pub letters: Word,
    pub classification: Classification,
    pub translation_length: Rational,
}

impl ReducedWord {
    pub fn is_elliptic(&self) -> bool {
        self.classification == Classification::Elliptic
    }
}

/// `(subgroup index, power carried through)` for moving a vertex power at
/// `left(x)` across the edge letter `x`: `a^{m s} x = x b^{carry * s}`.
fn crossing(g: &GraphOfGroups, x: Letter) -> (i64, i64) {
    match x {
        Letter::Edge { edge, inv: false } => {
            let e = &g.edges[edge];
            (e.index_to, e.index_from)
        }
        Letter::Edge { edge, inv: true } => {
            let e = &g.edges[edge];
            (e.index_from, e.index_to)
        }
        Letter::Vertex(..) => unreachable!("crossing a vertex letter"),
    }
}

/// Pinch test for `x a^c x^-1`: returns the replacement power at `left(x)`.
fn pinch(g: &GraphOfGroups, x: Letter, c: i64) -> Option<i64> {
    // the power sits at right(x); x^-1 crossing gives (index at right, index at left)
    let (m, carry) = crossing(g, x.inverse());
    if c % m == 0 {
        Some((c / m).checked_mul(carry).expect("exponent overflow"))
    } else {
        None
    }
}

fn push_power(g: &GraphOfGroups, stack: &mut Vec<Letter>, v: usize, k: i64) {
    if k == 0 || !g.is_cyclic(v) {
        return;
    }
    if let Some(Letter::Vertex(w, c)) = stack.last_mut() {
        debug_assert_eq!(*w, v);
        *c += k;
        if *c == 0 {
            stack.pop();
        }
        return;
    }
    stack.push(Letter::Vertex(v, k));
}

fn push_letter(g: &GraphOfGroups, stack: &mut Vec<Letter>, l: Letter) {
    match l {
        Letter::Vertex(v, k) => push_power(g, stack, v, k),
        Letter::Edge { .. } => {
            let (c, depth) = match stack.last() {
                Some(Letter::Vertex(_, c)) => (*c, 2),
                _ => (0, 1),
            };
            if stack.len() >= depth && stack[stack.len() - depth] == l.inverse() {
                let x = l.inverse();
                if let Some(r) = pinch(g, x, c) {
                    stack.truncate(stack.len() - depth);
                    push_power(g, stack, x.left(g), r);
                    return;
                }
            }
            stack.push(l);
        }
    }
}

/// Britton reduction; the result is independent of reduction order.
pub fn britton(g: &GraphOfGroups, w: &Word) -> Word {
    let mut stack = Vec::with_capacity(w.len());
    for &l in w.letters() {
        push_letter(g, &mut stack, l);
    }
    Word::from_letters(stack)
}

/// Cyclic reduction of a Britton-reduced loop (result is a conjugate).
fn cyclic(g: &GraphOfGroups, w: Word) -> Word {
    let mut s = w.into_letters();
    loop {
        if !s.iter().any(|l| matches!(l, Letter::Edge { .. })) {
            return Word::from_letters(s);
        }
        // rotate a leading power to the back
        if let Some(&Letter::Vertex(v, k)) = s.first() {
            s.remove(0);
            push_power(g, &mut s, v, k);
        }
        let (c, depth) = match s.last() {
            Some(Letter::Vertex(_, c)) => (*c, 2),
            _ => (0, 1),
        };
        let x = s[s.len() - depth];
        if s[0] != x.inverse() {
            return Word::from_letters(s);
        }
        match pinch(g, x, c) {
            None => return Word::from_letters(s),
            Some(r) => {
                let mut t = Vec::with_capacity(s.len());
                push_power(g, &mut t, x.left(g), r);
                for &l in &s[1..s.len() - depth] {
                    push_letter(g, &mut t, l);
                }
                s = t;
            }
        }
    }
}

pub fn reduce_word(g: &GraphOfGroups, w: &Word) -> Result<ReducedWord, ReduceError> {
    w.check_loop(g, None).map_err(ReduceError::NotALoop)?;
    let letters = cyclic(g, britton(g, w));
    let translation_length: Rational = letters
        .letters()
        .iter()
        .filter_map(|l| match l {
            Letter::Edge { edge, .. } => Some(g.edges[*edge].length.clone()),
            _ => None,
        })
        .sum();
    let classification = if translation_length.is_zero() {
        Classification::Elliptic
    } else {
        Classification::Hyperbolic
    };
    Ok(ReducedWord {
        letters,
        classification,
        translation_length,
    })
}

pub fn translation_length(g: &GraphOfGroups, w: &Word) -> Result<Rational, ReduceError> {
    reduce_word(g, w).map(|r| r.translation_length)
}

pub fn is_elliptic(g: &GraphOfGroups, w: &Word) -> Result<bool, ReduceError> {
    reduce_word(g, w).map(|r| r.is_elliptic())
}

/// Whether `w` (a loop at `v`) is an element of the vertex group `G_v`.
pub fn in_vertex_group(g: &GraphOfGroups, w: &Word) -> bool {
    britton(g, w).edge_letter_count() == 0
}

/// Normal form of a coset `w G_v`: transversal powers and edge letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetPath {
    pub steps: Vec<(i64, Letter)>,
}

impl CosetPath {
    pub fn root() -> Self {
        CosetPath { steps: Vec::new() }
    }

    /// Vertex of the quotient graph this coset lies over.
    pub fn vertex(&self, g: &GraphOfGroups) -> usize {
        self.steps
            .last()
            .map(|(_, l)| l.right(g))
            .unwrap_or_else(|| g.base())
    }

    pub fn to_word(&self, g: &GraphOfGroups) -> Word {
        let mut w = Word::identity();
        for &(j, l) in &self.steps {
            if j != 0 {
                w.push(Letter::Vertex(l.left(g), j));
            }
            w.push(l);
        }
        w
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Number of cosets crossed by `x` at `left(x)`: the transversal size.
pub fn transversal_size(g: &GraphOfGroups, x: Letter) -> i64 {
    crossing(g, x).0.abs()
}

/// Normal form of the coset `w G_v` where `w` has left end at the base.
pub fn coset_normal_form(g: &GraphOfGroups, w: &Word) -> CosetPath {
    let reduced = britton(g, w);
    let mut steps = Vec::new();
    let mut pending: i64 = 0;
    for &l in reduced.letters() {
        match l {
            Letter::Vertex(_, k) => pending += k,
            Letter::Edge { .. } => {
                let (m, carry) = crossing(g, l);
                let m_abs = m.abs();
                let j = pending.rem_euclid(m_abs);
                let s = (pending - j) / m;
                steps.push((j, l));
                pending = s.checked_mul(carry).expect("exponent overflow");
            }
        }
    }
    CosetPath { steps }
}
