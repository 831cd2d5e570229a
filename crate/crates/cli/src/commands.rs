//! One function per verb. Each returns the JSON report printed on stdout.

use crate::io::*;
use gtd::folding::{fold_at_time, length_profile, Morphism};
use gtd::moves::{collapse_edge_by_id, expand_vertex_by_id, is_reduced, same_deformation_space, Agreement, ExpansionSpec};
use gtd::normal::{reduce_word, Classification};
use gtd::rational::fmt_rational;
use gtd::section::{contraction_path, section_map, ContractionPath};
use gtd::topology::{enumerate_base_words, marked_lengths, point_from_json, simplex_coords, Approximation};
use gtd::treegeom::{basepoint, build_ball, build_ball_depth, with_growing_ball, TreeBall};
use gtd::{BaseWord, GraphOfGroups, Rational, Word};
use serde_json::{json, Value};
use std::path::Path;

fn graph_word(g: &GraphOfGroups, text: &str) -> CliResult<Word> {
    Word::parse(g, text).map_err(|e| usage(format!("word `{text}`: {e}")))
}

fn rats(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

pub fn validate(file: &Path) -> CliResult<Value> {
    let g = load_graph(file)?;
    Ok(json!({"valid": true, "vertices": g.vertices.len(), "edges": g.edges.len()}))
}

pub fn length(file: &Path, word: &str) -> CliResult<Value> {
    let g = load_graph(file)?;
    let r = reduce_word(&g, &graph_word(&g, word)?).map_err(tagged)?;
    let class = match r.classification {
        Classification::Elliptic => "elliptic",
        Classification::Hyperbolic => "hyperbolic",
    };
    Ok(json!({"classification": class, "length": fmt_rational(&r.translation_length)}))
}

pub fn ball(file: &Path, radius: Option<&str>, depth: Option<usize>, cap: usize, dot: Option<&Path>) -> CliResult<Value> {
    let g = load_graph(file)?;
    let b = match (radius, depth) {
        (_, Some(k)) => build_ball_depth(&g, k, cap),
        (r, None) => build_ball(&g, &rational(r.unwrap_or("1"))?, cap),
    }
    .map_err(tagged)?;
    if let Some(dir) = dot {
        write_file(&dir.join("ball.dot"), &b.to_dot())?;
    }
    Ok(b.to_json())
}

pub fn basepoint_cmd(file: &Path, s: &[String], radius: &str, cap: usize, dot: Option<&Path>) -> CliResult<Value> {
    let g = load_graph(file)?;
    if s.is_empty() {
        return Err(usage("-S needs at least one word"));
    }
    let words = s.iter().map(|w| graph_word(&g, w)).collect::<CliResult<Vec<_>>>()?;
    let (b, bp) = with_growing_ball(&g, &rational(radius)?, cap, |b| Ok((b.clone(), basepoint(b, &words)?)))
        .map_err(tagged)?;
    if let Some(dir) = dot {
        write_file(&dir.join("ball.dot"), &b.to_dot())?;
    }
    Ok(bp.to_json(&b))
}

pub fn collapse(file: &Path, edge: &str) -> CliResult<Value> {
    let g = load_graph(file)?;
    let (h, record) = collapse_edge_by_id(&g, edge).map_err(tagged)?;
    Ok(json!({"tree": h.to_json_value(), "move": record.to_json()}))
}

pub fn expand(file: &Path, vertex: &str, spec: &Path) -> CliResult<Value> {
    let g = load_graph(file)?;
    let spec: ExpansionSpec =
        serde_json::from_value(read_json(spec)?).map_err(|e| usage(format!("{}: {e}", spec.display())))?;
    let (h, record) = expand_vertex_by_id(&g, vertex, &spec).map_err(tagged)?;
    Ok(json!({"tree": h.to_json_value(), "move": record.to_json()}))
}

pub fn reduced(file: &Path) -> CliResult<Value> {
    let g = load_graph(file)?;
    let (ok, e) = is_reduced(&g);
    Ok(json!({"reduced": ok, "collapsible": e.map(|e| g.edges[e].id.clone())}))
}

fn generators(g: &GraphOfGroups) -> CliResult<Vec<String>> {
    g.marking_generators().ok_or_else(|| domain(gtd::graph::MarkingError::MissingMarking))
}

pub fn profile_compare(a: &Path, b: &Path, words: Option<Vec<BaseWord>>, depth: usize) -> CliResult<Value> {
    let (g1, g2) = (load_graph(a)?, load_graph(b)?);
    let words = match words {
        Some(w) => w,
        None => enumerate_base_words(&generators(&g1)?, depth),
    };
    let verdict = same_deformation_space(&g1, &g2, &words).map_err(tagged)?;
    Ok(match verdict {
        Agreement::Agree => json!({"agree": true, "words": words.len()}),
        Agreement::Disagree(w) => json!({"agree": false, "words": words.len(), "witness": w.to_string()}),
    })
}

pub fn load_morphism(file: &Path) -> CliResult<Morphism> {
    let v = read_json(file)?;
    let dir = parent_dir(file);
    let part = |k: &str| -> CliResult<GraphOfGroups> {
        let r = v.get(k).ok_or_else(|| usage(format!("morphism needs `{k}`")))?;
        graph_ref(r, &dir, k)
    };
    let images = v.get("edge_images").ok_or_else(|| usage("morphism needs `edge_images`"))?;
    Morphism::from_json_parts(part("domain")?, part("range")?, images).map_err(domain)
}

pub fn fold(file: &Path, times: &[Rational], emit: &str, profile: Option<Vec<BaseWord>>) -> CliResult<Value> {
    let m = load_morphism(file)?;
    let depth = m.fold_depth().map_err(domain)?;
    if let Some(words) = profile {
        let rows = length_profile(&m, &words, times).map_err(domain)?;
        let rows: Vec<Value> = words
            .iter()
            .zip(rows)
            .map(|(w, r)| json!({"word": w.to_string(), "lengths": rats(&r)}))
            .collect();
        return Ok(json!({"fold_depth": fmt_rational(&depth), "times": rats(times), "profile": rows}));
    }
    let mut steps = Vec::new();
    for t in times {
        let step = fold_at_time(&m, t).map_err(domain)?;
        steps.push(match emit {
            "tree" => step.tree.to_json_value(),
            _ => json!({
                "t": fmt_rational(t),
                "tree": step.tree.to_json_value(),
                "to_time": step.to_time.edge_images_json(),
                "from_time": step.from_time.edge_images_json(),
            }),
        });
    }
    if emit == "tree" && steps.len() == 1 {
        return Ok(steps.pop().unwrap());
    }
    Ok(json!({"fold_depth": fmt_rational(&depth), "steps": steps}))
}

/// `{"tree": file-or-graph, "radius": "p/q"}` or `{"tree": ..., "depth": k}`.
fn ball_ref(v: &Value, dir: &Path, what: &str, cap: usize) -> CliResult<TreeBall> {
    let g = graph_ref(v.get("tree").ok_or_else(|| usage(format!("`{what}` needs `tree`")))?, dir, what)?;
    let b = match (v.get("depth").and_then(Value::as_u64), v.get("radius").and_then(Value::as_str)) {
        (Some(k), _) => build_ball_depth(&g, k as usize, cap),
        (None, Some(r)) => build_ball(&g, &rational(r)?, cap),
        _ => return Err(usage(format!("`{what}` needs `radius` or `depth`"))),
    };
    b.map_err(tagged)
}

fn load_relation(file: &Path, cap: usize) -> CliResult<(Value, Approximation)> {
    let v = read_json(file)?;
    let dir = parent_dir(file);
    let side = |k: &str| -> CliResult<TreeBall> {
        ball_ref(v.get(k).ok_or_else(|| usage(format!("relation needs `{k}`")))?, &dir, k, cap)
    };
    let (left, right) = (side("left")?, side("right")?);
    let epsilon = rational(v.get("epsilon").and_then(Value::as_str).ok_or_else(|| usage("relation needs `epsilon`"))?)?;
    let p = match v.get("P") {
        Some(Value::Array(a)) => base_words(a.iter().filter_map(Value::as_str))?,
        _ => Vec::new(),
    };
    let mut pairs = Vec::new();
    for pair in v.get("pairs").and_then(Value::as_array).ok_or_else(|| usage("relation needs `pairs`"))? {
        let (Some(x), Some(y)) = (pair.get(0), pair.get(1)) else {
            return Err(usage("each pair is [left point, right point]"));
        };
        let x = point_from_json(&left, x).map_err(|e| usage(format!("left point: {e}")))?;
        let y = point_from_json(&right, y).map_err(|e| usage(format!("right point: {e}")))?;
        pairs.push((x, y));
    }
    let full = v.get("full").and_then(Value::as_bool).unwrap_or(false);
    Ok((v, Approximation { left, right, pairs, epsilon, p, full }))
}

pub fn approx_check(file: &Path, cap: usize) -> CliResult<Value> {
    let (_, a) = load_relation(file, cap)?;
    match a.check() {
        Ok(()) => Ok(json!({"ok": true, "epsilon": fmt_rational(&a.epsilon), "pairs": a.pairs.len()})),
        Err(v) => Err(CliError::Domain(v.to_json(&a))),
    }
}

pub fn approx_thicken(file: &Path, delta: &str, cap: usize) -> CliResult<Value> {
    let (raw, a) = load_relation(file, cap)?;
    let t = a.thicken(&rational(delta)?);
    let mut out = t.to_json();
    out["left"] = raw["left"].clone();
    out["right"] = raw["right"].clone();
    Ok(out)
}

pub fn simplex(file: &Path) -> CliResult<Value> {
    let g = load_graph(file)?;
    let c = simplex_coords(&g).map_err(domain)?;
    Ok(json!({"barycentric": rats(&c.barycentric), "volume": fmt_rational(&c.volume)}))
}

pub fn section(base: &Path, target: &Path, radius: Option<&str>, cap: usize) -> CliResult<Value> {
    let (b, y) = (load_graph(base)?, load_graph(target)?);
    let r = match radius {
        Some(r) => rational(r)?,
        None => y.lengths().into_iter().max().unwrap_or_else(|| gtd::rational::int(1)),
    };
    let s = section_map(&b, &y, &r, cap).map_err(domain)?;
    Ok(s.to_json())
}

/// Classes whose lengths are tabulated along a contraction.
fn probe_words(g: &GraphOfGroups) -> CliResult<Vec<BaseWord>> {
    let all = enumerate_base_words(&generators(g)?, 3);
    Ok(all.into_iter().filter(|w| !w.is_empty()).collect())
}

pub struct ContractOpts<'a> {
    pub times: Vec<Rational>,
    pub line: usize,
    pub cap: usize,
    pub csv: Option<&'a Path>,
    pub dot: Option<&'a Path>,
}

pub fn contract(base: &Path, target: &Path, o: &ContractOpts) -> CliResult<Value> {
    let (b, y) = (load_graph(base)?, load_graph(target)?);
    let path = contraction_path(&b, &y, &o.times, o.line, o.cap).map_err(domain)?;
    let words = probe_words(&b)?;
    let mut table = Vec::new();
    for (_, g) in &path.steps {
        table.push(marked_lengths(g, &words).map_err(domain)?);
    }
    if let Some(csv) = o.csv {
        write_file(csv, &contract_csv(&path, &words, &table))?;
    }
    if let Some(dir) = o.dot {
        for (k, (_, g)) in path.steps.iter().enumerate() {
            write_file(&dir.join(format!("step_{k}.dot")), &g.to_dot())?;
        }
    }
    let steps: Vec<Value> = path
        .steps
        .iter()
        .zip(&table)
        .map(|((t, g), lengths)| {
            let elliptic: Vec<String> = words
                .iter()
                .zip(lengths)
                .filter(|(_, l)| **l == gtd::rational::int(0))
                .map(|(w, _)| w.to_string())
                .collect();
            json!({"t": fmt_rational(t), "tree": g.to_json_value(), "lengths": rats(g.lengths().as_slice()), "elliptic": elliptic})
        })
        .collect();
    let line: Vec<Value> = path
        .line
        .iter()
        .map(|(s, c)| json!({"s": fmt_rational(s), "barycentric": rats(&c.barycentric), "volume": fmt_rational(&c.volume)}))
        .collect();
    Ok(json!({
        "fold_depth": fmt_rational(&path.fold_depth),
        "section": path.section.to_json(),
        "steps": steps,
        "terminal": path.terminal.to_json(),
        "line": line,
    }))
}

fn contract_csv(path: &ContractionPath, words: &[BaseWord], table: &[Vec<Rational>]) -> String {
    let mut out = String::from("t,volume");
    for w in words {
        out.push(',');
        out.push_str(&w.to_string());
    }
    out.push('\n');
    for ((t, g), row) in path.steps.iter().zip(table) {
        out.push_str(&format!("{},{}", fmt_rational(t), fmt_rational(&g.volume())));
        for l in row {
            out.push(',');
            out.push_str(&fmt_rational(l));
        }
        out.push('\n');
    }
    out
}
