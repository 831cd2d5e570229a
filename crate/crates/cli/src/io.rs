//! File loading, argument parsing helpers and the error type shared by all
//! verbs.

use gtd::rational::parse_rational;
use gtd::{BaseWord, GraphOfGroups, Rational};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Debug;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable input (exit 2).
    Usage(String),
    /// The operation itself failed (exit 1).
    Domain(Value),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn report(&self) -> Value {
        match self {
            CliError::Usage(msg) => json!({"error": "Usage", "message": msg}),
            CliError::Domain(v) => v.clone(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Innermost variant name of an error's `Debug` form, so wrapped errors such
/// as `Tree(LocusTruncated)` report as `LocusTruncated`.
fn variant_name(debug: &str) -> String {
    let mut s = debug;
    loop {
        let end = s
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(s.len());
        let (name, rest) = s.split_at(end);
        match rest.strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => s = inner,
            _ => return name.to_string(),
        }
    }
}

/// A domain error carrying the module error name and its message.
pub fn domain<E: Debug + std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(json!({
        "error": variant_name(&format!("{e:?}")),
        "message": e.to_string(),
    }))
}

/// A domain error for types that already serialize as `{"error": ...}`.
pub fn tagged<E: Serialize + Debug + std::fmt::Display>(e: E) -> CliError {
    match serde_json::to_value(&e) {
        Ok(Value::Object(m)) if m.contains_key("error") => CliError::Domain(Value::Object(m)),
        _ => domain(e),
    }
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Parses a graph and checks it; malformed JSON is a usage error, an
/// invalid graph a domain error.
pub fn graph_from_value(v: Value, origin: &str) -> CliResult<GraphOfGroups> {
    let g = GraphOfGroups::from_json_value(v).map_err(|e| usage(format!("{origin}: {e}")))?;
    if let Err(report) = g.validate() {
        let mut first = serde_json::to_value(&report.errors[0]).unwrap_or_else(|_| json!({}));
        if report.errors.len() > 1 {
            first["others"] = serde_json::to_value(&report.errors[1..]).unwrap_or(Value::Null);
        }
        return Err(CliError::Domain(first));
    }
    Ok(g)
}

pub fn load_graph(path: &Path) -> CliResult<GraphOfGroups> {
    graph_from_value(read_json(path)?, &path.display().to_string())
}

/// A graph given inline or as a path relative to the referring file.
pub fn graph_ref(v: &Value, dir: &Path, what: &str) -> CliResult<GraphOfGroups> {
    match v {
        Value::String(p) => load_graph(&resolve(dir, p)),
        Value::Object(_) => graph_from_value(v.clone(), what),
        _ => Err(usage(format!("`{what}` must be a file name or a graph object"))),
    }
}

pub fn resolve(dir: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

pub fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn rational(s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|_| usage(format!("`{s}` is not a rational")))
}

pub fn rationals(csv: &str) -> CliResult<Vec<Rational>> {
    csv.split(',').filter(|s| !s.trim().is_empty()).map(|s| rational(s.trim())).collect()
}

pub fn base_words<'a>(items: impl IntoIterator<Item = &'a str>) -> CliResult<Vec<BaseWord>> {
    items
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty() && !s.starts_with('#'))
        .map(|s| BaseWord::parse(s).map_err(|e| usage(format!("word `{s}`: {e}"))))
        .collect()
}

/// One word per line.
pub fn words_file(path: &Path) -> CliResult<Vec<BaseWord>> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    base_words(text.lines())
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}
