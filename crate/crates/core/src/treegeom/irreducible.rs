//! Semi-decision procedure for irreducibility of the action.

use crate::graph::GraphOfGroups;
use crate::normal::translation_length;
use crate::rational::Rational;
use crate::word::Word;
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReducibleReason {
    /// No hyperbolic element up to the search depth.
    NoHyperbolic,
    /// Every pair of hyperbolics found has an elliptic commutator, the
    /// signature of a common end or an invariant line.
    CommonEndOrLine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible(Word, Word),
    Reducible(ReducibleReason),
    Unknown,
}

/// All freely reduced products of at most `depth` loop generators.
pub fn enumerate_words(g: &GraphOfGroups, depth: usize) -> Vec<Word> {
    let gens: Vec<Word> = g.loop_generators().into_iter().map(|(_, w)| w).collect();
    let mut layer: Vec<(Word, Option<(usize, bool)>)> = vec![(Word::identity(), None)];
    let mut out = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, last) in &layer {
            for (i, x) in gens.iter().enumerate() {
                for inv in [false, true] {
                    if *last == Some((i, !inv)) {
                        continue;
                    }
                    let y = if inv { x.inverse() } else { x.clone() };
                    next.push((w.concat(&y), Some((i, inv))));
                }
            }
        }
        out.extend(next.iter().map(|(w, _)| w.clone()));
        layer = next;
    }
    out
}

fn len(g: &GraphOfGroups, w: &Word) -> Rational {
    translation_length(g, w).expect("words over loop generators are loops")
}

/// Certifies irreducibility by two hyperbolic elements whose axes are
/// disjoint or meet in a compact set.
///
/// Disjoint axes show up as `l(gh) > l(g) + l(h)` (or the same for `gh^-1`).
/// Axes meeting in a compact set share no end, which is certified by a
/// hyperbolic commutator: elements fixing a common end have elliptic
/// commutators.
pub fn is_irreducible(g: &GraphOfGroups, depth: usize) -> Irreducibility {
    if depth == 0 {
        return Irreducibility::Unknown;
    }
    let hyp: Vec<(Word, Rational)> = enumerate_words(g, depth)
        .into_iter()
        .filter_map(|w| {
            let l = len(g, &w);
            (!l.is_zero()).then_some((w, l))
        })
        .collect();
    if hyp.is_empty() {
        return Irreducibility::Reducible(ReducibleReason::NoHyperbolic);
    }
    for (i, (x, lx)) in hyp.iter().enumerate() {
        for (y, ly) in &hyp[i + 1..] {
            let sum = lx + ly;
            if len(g, &x.concat(y)) > sum || len(g, &x.concat(&y.inverse())) > sum {
                return Irreducibility::Irreducible(x.clone(), y.clone());
            }
            let comm = x
                .concat(y)
                .concat(&x.inverse())
                .concat(&y.inverse());
            if !len(g, &comm).is_zero() {
                return Irreducibility::Irreducible(x.clone(), y.clone());
            }
        }
    }
    Irreducibility::Reducible(ReducibleReason::CommonEndOrLine)
}
