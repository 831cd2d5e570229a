//! Morphisms between trees with free actions, their fold depth and the
//! family of trees interpolating domain and range.
//!
//! Trees are presented by marked metric graphs with trivial vertex groups.
//! A morphism sends each domain edge isometrically onto a reduced path of
//! spans in the range.

mod fibre;
mod path;
mod quotient;
mod random;
mod simplicial;

pub use fibre::{EdgePair, FibreError, Fibres, VertexPair, STATE_CAP};
pub use path::{
    based_loop_word, closed_to_dirs, path_length, path_to_word, point_on, push_span, spans_length,
    tighten, word_to_path, Dir, GraphPoint, Span,
};
pub use quotient::{fold_at_time, length_profile, FoldStep};
pub use random::random_morphism;
pub use simplicial::Simplicial;

use crate::graph::{GraphOfGroups, GroupKind};
use crate::normal::translation_length;
use crate::rational::{fmt_rational, Rational};
use crate::word::{BaseWord, Word};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Map, Value};
use std::cell::OnceCell;
use std::collections::BTreeMap;

/// Words sampled when checking that markings agree.
const MARKING_SAMPLE: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoldError {
    #[error("vertex `{0}` has a nontrivial group")]
    NontrivialStabilizer(String),
    #[error("no image given for domain edge `{0}`")]
    MissingImage(String),
    #[error("image given for unknown domain edge `{0}`")]
    UnknownEdge(String),
    #[error("image of `{0}` is empty")]
    EmptyImage(String),
    #[error("image of `{0}` is not a connected path")]
    Discontinuous(String),
    #[error("image of `{0}` backtracks")]
    NotReduced(String),
    #[error("edge `{edge}` has length {expected} but its image has length {found}")]
    LengthMismatch {
        edge: String,
        expected: String,
        found: String,
    },
    #[error("edges at vertex `{0}` disagree on its image")]
    VertexMismatch(String),
    #[error("markings disagree on `{0}`")]
    MarkingIncompatible(String),
    #[error("time {0} is outside [0, 1]")]
    TOutOfRange(String),
    #[error("bad morphism description: {0}")]
    Parse(String),
    #[error("word: {0}")]
    Word(String),
    #[error(transparent)]
    Fibre(#[from] FibreError),
}

#[derive(Debug, Clone)]
struct Analysis {
    simplicial: Simplicial,
    fibres: Fibres,
    depth: Rational,
}

#[derive(Debug, Clone)]
pub struct Morphism {
    pub domain: GraphOfGroups,
    pub range: GraphOfGroups,
    /// Image of each domain edge, traversed from its `from` end.
    pub images: Vec<Vec<Span>>,
    analysis: OnceCell<Result<Analysis, FibreError>>,
}

fn check_trivial(g: &GraphOfGroups) -> Result<(), FoldError> {
    match g.vertices.iter().find(|v| v.group != GroupKind::Trivial) {
        Some(v) => Err(FoldError::NontrivialStabilizer(v.id.clone())),
        None => Ok(()),
    }
}

/// Spans of the image of a directed domain edge.
pub fn dir_image(images: &[Vec<Span>], d: Dir) -> Vec<Span> {
    if d.fwd {
        images[d.edge].clone()
    } else {
        images[d.edge].iter().rev().map(Span::rev).collect()
    }
}

/// Freely reduced word of a closed path at a vertex.
fn reduced_word(dirs: &[Dir]) -> Word {
    let mut out: Vec<Dir> = Vec::new();
    for &d in dirs {
        if out.last() == Some(&d.rev()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    path_to_word(&out)
}

/// Sampled base-group words over the marking generators.
fn sample_words(gens: &[String], n: usize) -> Vec<BaseWord> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out: Vec<BaseWord> = gens.iter().map(|g| BaseWord::gen(g)).collect();
    while out.len() < n {
        let len = 2 + out.len() % 6;
        out.push(crate::corpus::random_base_word(&mut rng, gens, len));
    }
    out
}

impl Morphism {
    /// Validates the data and computes the fold depth.
    pub fn new(
        domain: GraphOfGroups,
        range: GraphOfGroups,
        images: Vec<Vec<Span>>,
    ) -> Result<Morphism, FoldError> {
        let m = Morphism::checked(domain, range, images)?;
        m.analysis()?;
        Ok(m)
    }

    /// Validation only; the fold depth is computed on first use.
    fn checked(
        mut domain: GraphOfGroups,
        mut range: GraphOfGroups,
        images: Vec<Vec<Span>>,
    ) -> Result<Morphism, FoldError> {
        check_trivial(&domain)?;
        check_trivial(&range)?;
        if images.len() != domain.edges.len() {
            let e = &domain.edges[images.len().min(domain.edges.len() - 1)];
            return Err(FoldError::MissingImage(e.id.clone()));
        }
        let mut vimg: Vec<Option<GraphPoint>> = vec![None; domain.vertices.len()];
        for (e, spans) in images.iter().enumerate() {
            let de = &domain.edges[e];
            let id = || de.id.clone();
            if spans.is_empty() {
                return Err(FoldError::EmptyImage(id()));
            }
            for w in spans.windows(2) {
                if w[0].end(&range) != w[1].start(&range) {
                    return Err(FoldError::Discontinuous(id()));
                }
            }
            if tighten(spans.iter().cloned()) != *spans {
                return Err(FoldError::NotReduced(id()));
            }
            let found = spans_length(spans);
            if found != de.length {
                return Err(FoldError::LengthMismatch {
                    edge: id(),
                    expected: fmt_rational(&de.length),
                    found: fmt_rational(&found),
                });
            }
            for (v, p) in [
                (de.from, spans[0].start(&range)),
                (de.to, spans.last().unwrap().end(&range)),
            ] {
                match &vimg[v] {
                    Some(q) if *q != p => {
                        return Err(FoldError::VertexMismatch(domain.vertices[v].id.clone()))
                    }
                    _ => vimg[v] = Some(p),
                }
            }
        }
        if domain.marking.is_none() {
            let m = domain.identity_marking();
            domain.marking = Some(m);
        }
        let pushed = Morphism::pushforward(&domain, &range, &images);
        match &range.marking {
            None => range.marking = Some(pushed),
            Some(given) => {
                let gens: Vec<String> = given.keys().cloned().collect();
                if domain.marking_generators().as_ref() != Some(&gens) {
                    return Err(FoldError::MarkingIncompatible("generator sets".into()));
                }
                let via = range.clone().with_marking(pushed);
                for w in sample_words(&gens, MARKING_SAMPLE) {
                    let l = |g: &GraphOfGroups| {
                        g.mark(&w)
                            .ok()
                            .and_then(|x| translation_length(g, &x).ok())
                    };
                    let (ld, lr, lp) = (l(&domain), l(&range), l(&via));
                    if lr != lp || lr > ld {
                        return Err(FoldError::MarkingIncompatible(w.to_string()));
                    }
                }
            }
        }
        Ok(Morphism {
            domain,
            range,
            images,
            analysis: OnceCell::new(),
        })
    }

    /// Range marking induced by the domain marking.
    fn pushforward(
        domain: &GraphOfGroups,
        range: &GraphOfGroups,
        images: &[Vec<Span>],
    ) -> BTreeMap<String, Word> {
        let marking = domain.marking.as_ref().expect("domain marking set");
        marking
            .iter()
            .map(|(gen, w)| {
                let spans = tighten(word_to_path(w).into_iter().flat_map(|d| dir_image(images, d)));
                let (v, dirs) = closed_to_dirs(range, &spans);
                let word = match v {
                    None => Word::identity(),
                    Some(v) => {
                        let p = range.tree_paths()[v].clone();
                        p.concat(&reduced_word(&dirs)).concat(&p.inverse())
                    }
                };
                (gen.clone(), word)
            })
            .collect()
    }

    fn analysis(&self) -> Result<&Analysis, FibreError> {
        self.analysis
            .get_or_init(|| {
                let simplicial = Simplicial::build(&self.domain, &self.range, &self.images);
                let fibres = fibre::fibres(&simplicial)?;
                let depth = fibres.max_height(&simplicial);
                Ok(Analysis {
                    simplicial,
                    fibres,
                    depth,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// m(φ): the largest distance the image of a folded segment travels.
    pub fn fold_depth(&self) -> Result<Rational, FoldError> {
        Ok(self.analysis()?.depth.clone())
    }

    pub fn simplicial(&self) -> Result<&Simplicial, FoldError> {
        Ok(&self.analysis()?.simplicial)
    }

    pub fn fibres(&self) -> Result<&Fibres, FoldError> {
        Ok(&self.analysis()?.fibres)
    }

    /// Both graphs and all images scaled by `k`.
    pub fn scaled(&self, k: &Rational) -> Result<Morphism, FoldError> {
        let images = self
            .images
            .iter()
            .map(|spans| {
                spans
                    .iter()
                    .map(|s| Span::new(s.edge, &s.from * k, &s.to * k))
                    .collect()
            })
            .collect();
        Morphism::new(self.domain.scaled(k), self.range.scaled(k), images)
    }

    /// Composite `other ∘ self`; the range of `self` must be the domain of
    /// `other`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism, FoldError> {
        let images = self
            .images
            .iter()
            .map(|spans| {
                let (_, dirs) = closed_or_open_dirs(&self.range, spans);
                tighten(dirs.into_iter().flat_map(|d| dir_image(&other.images, d)))
            })
            .collect();
        Morphism::new(self.domain.clone(), other.range.clone(), images)
    }

    pub fn edge_images_json(&self) -> Value {
        let mut m = Map::new();
        for (e, spans) in self.images.iter().enumerate() {
            let v: Vec<Value> = spans.iter().map(|s| s.to_json(&self.range)).collect();
            m.insert(self.domain.edges[e].id.clone(), Value::Array(v));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "domain": self.domain.to_json_value(),
            "range": self.range.to_json_value(),
            "edge_images": self.edge_images_json(),
        });
        if let Ok(d) = self.fold_depth() {
            v["fold_depth"] = json!(fmt_rational(&d));
        }
        v
    }

    /// Parses `edge_images` against already loaded graphs.
    pub fn from_json_parts(
        domain: GraphOfGroups,
        range: GraphOfGroups,
        edge_images: &Value,
    ) -> Result<Morphism, FoldError> {
        let map = edge_images
            .as_object()
            .ok_or_else(|| FoldError::Parse("`edge_images` must be an object".into()))?;
        for k in map.keys() {
            if domain.edge_index(k).is_none() {
                return Err(FoldError::UnknownEdge(k.clone()));
            }
        }
        let mut images = Vec::new();
        for e in &domain.edges {
            let raw = map
                .get(&e.id)
                .ok_or_else(|| FoldError::MissingImage(e.id.clone()))?;
            let items: Vec<Value> = match raw {
                Value::Array(a) => a.clone(),
                other => vec![other.clone()],
            };
            let spans = items
                .iter()
                .map(|x| Span::from_json(&range, x))
                .collect::<Result<Vec<_>, _>>()
                .map_err(FoldError::Parse)?;
            images.push(spans);
        }
        Morphism::new(domain, range, images)
    }

    /// Parses `{"domain": graph, "range": graph, "edge_images": {...}}` with
    /// the graphs given inline.
    pub fn from_json_value(v: &Value) -> Result<Morphism, FoldError> {
        let graph = |k: &str| -> Result<GraphOfGroups, FoldError> {
            let g = v
                .get(k)
                .ok_or_else(|| FoldError::Parse(format!("missing `{k}`")))?;
            GraphOfGroups::from_json_value(g.clone()).map_err(|e| FoldError::Parse(format!("{k}: {e}")))
        };
        let images = v
            .get("edge_images")
            .ok_or_else(|| FoldError::Parse("missing `edge_images`".into()))?;
        Morphism::from_json_parts(graph("domain")?, graph("range")?, images)
    }

    /// Length of a base-group word in the domain and in the range.
    pub fn lengths(&self, w: &BaseWord) -> (Rational, Rational) {
        let l = |g: &GraphOfGroups| {
            translation_length(g, &g.mark(w).expect("word over marking generators"))
                .expect("marked words are loops")
        };
        (l(&self.domain), l(&self.range))
    }
}

/// Directed edges of a span path whose ends are vertices.
fn closed_or_open_dirs(g: &GraphOfGroups, spans: &[Span]) -> (Option<usize>, Vec<Dir>) {
    let dirs = spans
        .iter()
        .map(|s| s.full(g).expect("intermediate graph images use whole edges"))
        .collect::<Vec<_>>();
    (dirs.first().map(|d| d.start(g)), dirs)
}

/// Identity morphism of a free graph.
pub fn identity(g: &GraphOfGroups) -> Result<Morphism, FoldError> {
    let images = (0..g.edges.len()).map(|e| vec![Dir::new(e, true).span(g)]).collect();
    Morphism::new(g.clone(), g.clone(), images)
}

pub(crate) fn new_unanalysed(
    domain: GraphOfGroups,
    range: GraphOfGroups,
    images: Vec<Vec<Span>>,
) -> Result<Morphism, FoldError> {
    Morphism::checked(domain, range, images)
}
