//! Words in the fundamental groupoid of a graph of groups.
//!
//! A letter has a left and a right vertex. Vertex letters `a_v^k` sit at `v`;
//! the edge letter `e` has its left end at `to(e)` and its right end at
//! `from(e)` (so `e a_from^p e^-1 = a_to^q` is a well-formed loop at `to(e)`).
//! Juxtaposition `x y` requires `right(x) == left(y)`; a loop at `v` has both
//! ends at `v`.

use crate::graph::GraphOfGroups;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// Power of the generator of a cyclic vertex group.
    Vertex(usize, i64),
    Edge { edge: usize, inv: bool },
}

impl Letter {
    pub fn edge(edge: usize, inv: bool) -> Self {
        Letter::Edge { edge, inv }
    }

    pub fn inverse(self) -> Self {
        match self {
            Letter::Vertex(v, k) => Letter::Vertex(v, -k),
            Letter::Edge { edge, inv } => Letter::Edge { edge, inv: !inv },
        }
    }

    pub fn left(self, g: &GraphOfGroups) -> usize {
        match self {
            Letter::Vertex(v, _) => v,
            Letter::Edge { edge, inv: false } => g.edges[edge].to,
            Letter::Edge { edge, inv: true } => g.edges[edge].from,
        }
    }

    pub fn right(self, g: &GraphOfGroups) -> usize {
        self.inverse().left(g)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordParseError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed token `{0}`")]
    Malformed(String),
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Appends a letter, merging adjacent powers at the same vertex.
    pub fn push(&mut self, l: Letter) {
        if let (Some(Letter::Vertex(v, c)), Letter::Vertex(w, k)) = (self.0.last_mut(), l) {
            if *v == w {
                *c += k;
                if *c == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push(l);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `u w u^-1`
    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.concat(self).concat(&u.inverse())
    }

    pub fn edge_letter_count(&self) -> usize {
        self.0
            .iter()
            .filter(|l| matches!(l, Letter::Edge { .. }))
            .count()
    }

    /// Left and right vertices of the word, if it is a well-formed path.
    /// The empty word has no endpoints.
    pub fn endpoints(&self, g: &GraphOfGroups) -> Result<Option<(usize, usize)>, String> {
        let mut ends: Option<(usize, usize)> = None;
        for (i, l) in self.0.iter().enumerate() {
            if let Letter::Edge { edge, .. } = l {
                if *edge >= g.edges.len() {
                    return Err(format!("letter {i} references missing edge"));
                }
            }
            if let Letter::Vertex(v, _) = l {
                if *v >= g.vertices.len() || !g.is_cyclic(*v) {
                    return Err(format!("letter {i} is a power at a vertex without generator"));
                }
            }
            match ends {
                None => ends = Some((l.left(g), l.right(g))),
                Some((left, right)) => {
                    if l.left(g) != right {
                        return Err(format!(
                            "letter {i} starts at `{}` but the path is at `{}`",
                            g.vertices[l.left(g)].id, g.vertices[right].id
                        ));
                    }
                    ends = Some((left, l.right(g)));
                }
            }
        }
        Ok(ends)
    }

    /// Checks that the word is a closed path, at `at` when given.
    pub fn check_loop(&self, g: &GraphOfGroups, at: Option<usize>) -> Result<(), String> {
        match self.endpoints(g)? {
            None => Ok(()),
            Some((l, r)) if l != r => Err(format!(
                "path runs from `{}` to `{}`",
                g.vertices[l].id, g.vertices[r].id
            )),
            Some((l, _)) => match at {
                Some(v) if v != l => Err(format!(
                    "loop is based at `{}`, expected `{}`",
                    g.vertices[l].id, g.vertices[v].id
                )),
                _ => Ok(()),
            },
        }
    }

    /// Parses graph letters: edge ids and `a_<vertex id>`, each with an
    /// optional `^k` exponent.
    pub fn parse_graph(g: &GraphOfGroups, text: &str) -> Result<Word, WordParseError> {
        let mut out = Word::identity();
        for (name, k) in tokens(text)? {
            out = out.concat(&graph_letter(g, &name, k)?);
        }
        Ok(out)
    }

    /// Parses a word whose letters are marking generators (preferred) or
    /// graph letters.
    pub fn parse(g: &GraphOfGroups, text: &str) -> Result<Word, WordParseError> {
        let mut out = Word::identity();
        for (name, k) in tokens(text)? {
            if let Some(img) = g.marking.as_ref().and_then(|m| m.get(&name)) {
                out = out.concat(&img.pow(k));
            } else {
                out = out.concat(&graph_letter(g, &name, k)?);
            }
        }
        Ok(out)
    }

    pub fn display(&self, g: &GraphOfGroups) -> String {
        let mut parts: Vec<String> = Vec::new();
        // merge runs of the same edge letter into powers
        let mut i = 0;
        while i < self.0.len() {
            match self.0[i] {
                Letter::Vertex(v, k) => {
                    parts.push(power(&format!("a_{}", g.vertices[v].id), k));
                    i += 1;
                }
                Letter::Edge { edge, inv } => {
                    let mut j = i;
                    while j < self.0.len() && self.0[j] == self.0[i] {
                        j += 1;
                    }
                    let n = (j - i) as i64;
                    parts.push(power(&g.edges[edge].id, if inv { -n } else { n }));
                    i = j;
                }
            }
        }
        parts.join(" ")
    }
}

fn power(name: &str, k: i64) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{name}^{k}")
    }
}

fn graph_letter(g: &GraphOfGroups, name: &str, k: i64) -> Result<Word, WordParseError> {
    if let Some(e) = g.edge_index(name) {
        let l = Letter::edge(e, k < 0);
        return Ok(Word(vec![l; k.unsigned_abs() as usize]));
    }
    if let Some(v) = name.strip_prefix("a_").and_then(|id| g.vertex_index(id)) {
        if g.is_cyclic(v) {
            return Ok(if k == 0 {
                Word::identity()
            } else {
                Word(vec![Letter::Vertex(v, k)])
            });
        }
    }
    Err(WordParseError::UnknownGenerator(name.to_string()))
}

fn tokens(text: &str) -> Result<Vec<(String, i64)>, WordParseError> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let (name, k) = match tok.split_once('^') {
            Some((n, e)) => (
                n,
                e.parse::<i64>()
                    .map_err(|_| WordParseError::Malformed(tok.to_string()))?,
            ),
            None => (tok, 1),
        };
        if tok == "1" {
            continue;
        }
        if name.is_empty() {
            return Err(WordParseError::Malformed(tok.to_string()));
        }
        if k != 0 {
            out.push((name.to_string(), k));
        }
    }
    Ok(out)
}

/// A word in the base group's generators (names), freely reduced on push.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseWord(pub Vec<(String, i64)>);

impl BaseWord {
    pub fn parse(text: &str) -> Result<BaseWord, WordParseError> {
        let mut w = BaseWord::default();
        for (name, k) in tokens(text)? {
            w.push(&name, k);
        }
        Ok(w)
    }

    pub fn gen(name: &str) -> BaseWord {
        BaseWord(vec![(name.to_string(), 1)])
    }

    pub fn push(&mut self, name: &str, k: i64) {
        if k == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.0 == name {
                last.1 += k;
                if last.1 == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push((name.to_string(), k));
    }

    pub fn concat(&self, other: &BaseWord) -> BaseWord {
        let mut w = self.clone();
        for (n, k) in &other.0 {
            w.push(n, *k);
        }
        w
    }

    pub fn inverse(&self) -> BaseWord {
        BaseWord(self.0.iter().rev().map(|(n, k)| (n.clone(), -k)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|(_, k)| k.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Applies a substitution `generator -> word` (e.g. an automorphism).
    pub fn substitute(&self, map: &HashMap<String, BaseWord>) -> BaseWord {
        let mut out = BaseWord::default();
        for (n, k) in &self.0 {
            let img = map.get(n).cloned().unwrap_or_else(|| BaseWord::gen(n));
            let piece = if *k < 0 { img.inverse() } else { img };
            for _ in 0..k.unsigned_abs() {
                out = out.concat(&piece);
            }
        }
        out
    }
}

impl fmt::Display for BaseWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(n, k)| power(n, *k)).collect();
        write!(f, "{}", parts.join(" "))
    }
}
