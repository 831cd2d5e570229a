//! End-to-end acceptance run. Each criterion prints one PASS or FAIL line;
//! the process exits nonzero if any fails.

use gtd::corpus;
use gtd::folding::{fold_at_time, length_profile, random_morphism, Morphism};
use gtd::moves::{collapse_edge, expand_vertex, EdgeEnd, ExpansionSpec};
use gtd::normal::{is_elliptic, translation_length};
use gtd::rational::{int, rat};
use gtd::section::{basepoint_stability, section_map, SectionError};
use gtd::topology::{enumerate_base_words, simplex_coords, simplex_tree, Approximation};
use gtd::treegeom::{build_ball_depth, characteristic_set, is_irreducible, Irreducibility, Point, TreeBall, DEFAULT_CAP};
use gtd::{BaseWord, GraphOfGroups, Rational, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gens(g: &GraphOfGroups) -> Vec<String> {
    g.marking_generators().expect("marked graph")
}

fn words(g: &GraphOfGroups, seed: u64, n: usize) -> Vec<BaseWord> {
    let mut r = rng(seed);
    let gens = gens(g);
    (0..n).map(|i| corpus::random_base_word(&mut r, &gens, 1 + i % 6)).collect()
}

fn length(g: &GraphOfGroups, w: &BaseWord) -> Rational {
    translation_length(g, &g.mark(w).unwrap()).unwrap()
}

fn lengths(g: &GraphOfGroups, ws: &[BaseWord]) -> Vec<Rational> {
    ws.iter().map(|w| length(g, w)).collect()
}

/// Graph-of-groups data with the metric forgotten.
fn combinatorics(g: &GraphOfGroups) -> GraphOfGroups {
    g.with_lengths(&vec![int(1); g.edges.len()])
}

fn displacement_identity() -> Outcome {
    let mut r = rng(1);
    let (mut trees, mut pairs, mut interior) = (0, 0, 0);
    while trees < 20 {
        let g = corpus::random_graph(&mut r, 4);
        let Ok(ball) = (2..=6).rev().find_map(|d| build_ball_depth(&g, d, 20_000).ok()).ok_or(()) else {
            continue;
        };
        trees += 1;
        let inner: Vec<usize> = (1..ball.len()).filter(|&n| ball.nodes[n].depth < ball.radius).collect();
        let mut found = 0;
        let mut attempts = 0;
        while found < 10 {
            attempts += 1;
            ensure!(attempts < 500, "tree {trees}: too few usable samples");
            let len = r.gen_range(1..4);
            let w = corpus::random_loop(&mut r, &g, len);
            let l = translation_length(&g, &w).unwrap();
            let reach = (ball.vertex_displacement(&w, 0) - &l) / int(2);
            if reach >= ball.radius {
                continue;
            }
            let Ok(set) = characteristic_set(&ball, &w) else { continue };
            let n = *inner.choose(&mut r).unwrap_or(&0);
            let x = if n > 0 && r.gen_bool(0.5) {
                interior += 1;
                Point { node: n, back: &ball.nodes[n].len * rat(r.gen_range(1..8), 8) }
            } else {
                Point::vertex(n)
            };
            // translate inside the ball when possible, else normal forms
            let moved = match ball.displacement(&w, &x) {
                Some(d) => d,
                None if x.is_vertex() => ball.vertex_displacement(&w, x.node),
                None => continue,
            };
            let to_set = set.locus.dist(&ball, &x).ok_or("empty characteristic set")?;
            ensure!(moved == &to_set * int(2) + &l, "d(x,gx) = {moved}, d(x,T) = {to_set}, l = {l}");
            found += 1;
        }
        pairs += found;
    }
    Ok(format!("{trees} trees, {pairs} pairs ({interior} edge interiors)"))
}

/// Least displacement of `w` over ball vertices; `None` when the ball is too
/// shallow to contain the axis and its translates.
fn ball_minimum(ball: &TreeBall, depth: usize, w: &Word) -> Option<Rational> {
    let k = w.edge_letter_count();
    // the midpoint of [x, wx] is a fixed vertex or the midpoint of an axis
    // edge, so T_w has a vertex within k/2 edges of the base
    let near = k / 2;
    if near + k > depth {
        return None;
    }
    (0..ball.len())
        .filter(|&n| ball.nodes[n].level <= near)
        .map(|n| ball.displacement(w, &Point::vertex(n)).expect("translate stays in the ball"))
        .min()
}

fn normal_form_oracle() -> Outcome {
    let groups = [
        ("BS(2,3)", corpus::bs(2, 3)),
        ("BS(2,5)", corpus::bs(2, 5)),
        ("F2", corpus::rose(&[int(1), rat(3, 2)])),
        ("F3", corpus::rose(&[int(1), rat(2, 3), rat(5, 4)])),
    ];
    let mut report = Vec::new();
    for (name, g) in groups {
        let (depth, ball) = (1..=8)
            .rev()
            .find_map(|d| build_ball_depth(&g, d, 400_000).ok().map(|b| (d, b)))
            .unwrap();
        let (mut checked, mut truncated) = (0, 0);
        for bw in enumerate_base_words(&gens(&g), 5) {
            let w = g.mark(&bw).unwrap();
            let Some(m) = ball_minimum(&ball, depth, &w) else {
                truncated += 1;
                continue;
            };
            let l = translation_length(&g, &w).unwrap();
            ensure!(l == m, "{name}: {bw} has length {l}, ball minimum {m}");
            checked += 1;
        }
        report.push(format!("{name} {checked}/{}", checked + truncated));
    }
    Ok(format!("untruncated words: {}", report.join(", ")))
}

fn random_expansion(r: &mut ChaCha8Rng, g: &GraphOfGroups) -> Option<(GraphOfGroups, usize)> {
    for _ in 0..20 {
        let v = r.gen_range(0..g.vertices.len());
        let k = if g.is_cyclic(v) { *[1i64, -1, 2, 3].choose(r).unwrap() } else { 1 };
        let migrate = g
            .ends_at(v)
            .into_iter()
            .filter(|_| r.gen_bool(0.5))
            .map(|(e, end)| EdgeEnd { edge: g.edges[e].id.clone(), end })
            .collect();
        let spec = ExpansionSpec { k, migrate, length: corpus::random_length(r, 4, 2), new_vertex: None, new_edge: None };
        if let Ok((h, _)) = expand_vertex(g, v, &spec) {
            let new = (0..h.edges.len()).find(|&e| g.edge_index(&h.edges[e].id).is_none()).unwrap();
            return Some((h, new));
        }
    }
    None
}

fn profile(g: &GraphOfGroups, ws: &[BaseWord]) -> Vec<bool> {
    ws.iter().map(|w| is_elliptic(g, &g.mark(w).unwrap()).unwrap()).collect()
}

fn move_invariance() -> Outcome {
    let mut r = rng(3);
    let (mut steps, mut round_trips) = (0, 0);
    for seq in 0..100 {
        let mut g = corpus::random_graph(&mut r, 3);
        let ws = words(&g, 300 + seq, 50);
        let start = profile(&g, &ws);
        for _ in 0..r.gen_range(1..=10) {
            let collapsible: Vec<usize> = (0..g.edges.len()).filter(|&e| collapse_edge(&g, e).is_ok()).collect();
            let next = if !collapsible.is_empty() && r.gen_bool(0.5) {
                collapse_edge(&g, *collapsible.choose(&mut r).unwrap()).unwrap().0
            } else if let Some((h, e)) = random_expansion(&mut r, &g) {
                let (back, _) = collapse_edge(&h, e).map_err(|e| format!("sequence {seq}: {e}"))?;
                ensure!(back == g, "sequence {seq}: collapse after expansion changed the graph");
                round_trips += 1;
                h
            } else {
                continue;
            };
            next.validate().map_err(|e| format!("sequence {seq}: {e:?}"))?;
            ensure!(profile(&next, &ws) == start, "sequence {seq}: elliptic profile changed");
            g = next;
            steps += 1;
        }
    }
    Ok(format!("100 sequences, {steps} moves, {round_trips} exact round trips"))
}

fn morphisms(seed: u64, n: usize) -> Vec<Morphism> {
    let mut r = rng(seed);
    (0..n).map(|_| random_morphism(&mut r).unwrap()).collect()
}

fn fold_endpoints() -> Outcome {
    for (i, m) in morphisms(4, 20).iter().enumerate() {
        let ws = words(&m.domain, 400 + i as u64, 50);
        let t0 = fold_at_time(m, &int(0)).map_err(|e| e.to_string())?.tree;
        let t1 = fold_at_time(m, &int(1)).map_err(|e| e.to_string())?.tree;
        ensure!(lengths(&t0, &ws) == lengths(&m.domain, &ws), "morphism {i}: T_0 differs from the domain");
        ensure!(lengths(&t1, &ws) == lengths(&m.range, &ws), "morphism {i}: T_1 differs from the range");
    }
    Ok("20 morphisms, 50 words".into())
}

fn fold_monotonicity() -> Outcome {
    let grid: Vec<Rational> = (0..=8).map(|k| rat(k, 8)).collect();
    let mut hyperbolic = 0;
    for (i, m) in morphisms(5, 20).iter().enumerate() {
        let ws = words(&m.domain, 500 + i as u64, 50);
        let rows = length_profile(m, &ws, &grid).map_err(|e| e.to_string())?;
        for (w, row) in ws.iter().zip(&rows) {
            ensure!(row.windows(2).all(|p| p[0] >= p[1]), "morphism {i}: {w} not monotone: {row:?}");
            hyperbolic += usize::from(row[0] > int(0));
        }
        for k in [int(2), rat(1, 3)] {
            let scaled = m.scaled(&k).map_err(|e| e.to_string())?;
            let srows = length_profile(&scaled, &ws, &grid).map_err(|e| e.to_string())?;
            for (a, b) in rows.iter().zip(&srows) {
                ensure!(a.iter().zip(b).all(|(x, y)| x * &k == *y), "morphism {i}: scaling by {k} fails");
            }
        }
    }
    Ok(format!("20 morphisms, {hyperbolic} hyperbolic rows over t = k/8, k in {{2, 1/3}}"))
}

fn worked_example() -> Outcome {
    let rose = |petals: &[(&str, &str)]| {
        let edges: Vec<Value> = petals
            .iter()
            .map(|(id, l)| serde_json::json!({"id": id, "from": "v", "to": "v", "length": l}))
            .collect();
        GraphOfGroups::from_json_value(serde_json::json!({"vertices": [{"id": "v", "group": "1"}], "edges": edges}))
            .unwrap()
    };
    let images = serde_json::json!({"a": ["a"], "b": ["a", "c"]});
    let m = Morphism::from_json_parts(rose(&[("a", "1"), ("b", "2")]), rose(&[("a", "1"), ("c", "1")]), &images)
        .map_err(|e| e.to_string())?;
    let mut got = fold_at_time(&m, &rat(1, 2)).map_err(|e| e.to_string())?.tree.lengths();
    got.sort();
    // half a unit of b has folded onto a, splitting a in two and leaving
    // 3/2 of b unfolded
    let want = vec![rat(1, 2), rat(1, 2), rat(3, 2)];
    ensure!(got == want, "T_1/2 lengths {got:?}");
    Ok("{1/2, 1/2, 3/2}".into())
}

/// Identity on vertices and edge midpoints, between a graph and a
/// perturbation of its lengths.
fn random_approximation(r: &mut ChaCha8Rng) -> Approximation {
    let g = corpus::random_free_graph(r);
    let bent: Vec<Rational> = g.lengths().iter().map(|l| l + rat(r.gen_range(-2..=2), 40)).collect();
    let left = build_ball_depth(&g, 2, DEFAULT_CAP).unwrap();
    let right = build_ball_depth(&g.with_lengths(&bent), 2, DEFAULT_CAP).unwrap();
    let mut pairs: Vec<(Point, Point)> = (0..left.len()).map(|n| (Point::vertex(n), Point::vertex(n))).collect();
    for n in 1..left.len() {
        pairs.push((
            Point { node: n, back: &left.nodes[n].len / int(2) },
            Point { node: n, back: &right.nodes[n].len / int(2) },
        ));
    }
    let worst = pairs
        .iter()
        .flat_map(|(x, y)| pairs.iter().map(move |(x2, y2)| (x, y, x2, y2)))
        .map(|(x, y, x2, y2)| {
            let (a, b) = (left.dist(x, x2), right.dist(y, y2));
            if a > b { a - b } else { b - a }
        })
        .max()
        .unwrap();
    let longest = g.lengths().into_iter().chain(bent).max().unwrap();
    // sampled points sit within a quarter edge of a related point
    let epsilon = worst.max(&longest / int(8)) + rat(r.gen_range(1..=10), 100);
    let p = gens(&g).iter().map(|s| BaseWord::gen(s)).collect();
    Approximation { left, right, pairs, epsilon, p, full: true }
}

fn thickening() -> Outcome {
    let mut r = rng(7);
    let mut pairs = 0;
    for i in 0..50 {
        let a = random_approximation(&mut r);
        a.check().map_err(|v| format!("approximation {i} is not certified: {v}"))?;
        let delta = rat(r.gen_range(1..=4), 40);
        let t = a.thicken(&delta);
        ensure!(t.epsilon == &a.epsilon + &delta * int(2), "approximation {i}: wrong epsilon");
        t.check().map_err(|v| format!("approximation {i} after thickening by {delta}: {v}"))?;
        pairs += t.pairs.len();
    }
    Ok(format!("50 full approximations, {pairs} thickened pairs"))
}

fn simplex_round_trip() -> Outcome {
    let mut r = rng(8);
    for i in 0..100 {
        let g = if i % 2 == 0 { corpus::random_free_graph(&mut r) } else { corpus::random_graph(&mut r, 4) };
        let c = simplex_coords(&g).map_err(|e| e.to_string())?;
        ensure!(c.barycentric.iter().sum::<Rational>() == int(1), "tree {i}: barycentric sum");
        let back = simplex_tree(&c, &g).map_err(|e| e.to_string())?;
        ensure!(back == g, "tree {i}: round trip changed the graph");
    }
    Ok("100 trees".into())
}

fn section_correctness() -> Outcome {
    let base = corpus::rose(&[int(1), int(1)]);
    let mut r = rng(9);
    for i in 0..20 {
        let target = corpus::random_marked_target(&mut r);
        let radius = target.lengths().into_iter().max().unwrap();
        let s = section_map(&base, &target, &radius, DEFAULT_CAP).map_err(|e| format!("target {i}: {e}"))?;
        let beta = s.morphism().map_err(|e| format!("target {i}: {e}"))?;
        ensure!(combinatorics(&beta.domain) == combinatorics(&base), "target {i}: T_Y is not a metric on the base");
        let ws = words(&base, 900 + i, 50);
        ensure!(lengths(&beta.range, &ws) == lengths(&target, &ws), "target {i}: range lengths differ");
    }
    let theta = corpus::theta(&[int(1), int(1), int(1)]);
    let gate = section_map(&theta, &base, &int(1), DEFAULT_CAP);
    ensure!(matches!(gate, Err(SectionError::BaseNotReduced(_))), "theta base accepted");
    Ok("20 targets; theta base rejected".into())
}

fn basepoint_stability_check() -> Outcome {
    let mut r = rng(10);
    let (mut trees, mut worst) = (0, int(0));
    while trees < 20 {
        let g = corpus::random_graph(&mut r, 4);
        if !matches!(is_irreducible(&g, 3), Irreducibility::Irreducible(..)) {
            continue;
        }
        let rep = basepoint_stability(&g, &rat(1, 100), DEFAULT_CAP).map_err(|e| format!("{e}"))?;
        ensure!(rep.holds, "moved {} with distortion {}", rep.displacement, rep.distortion);
        if rep.distortion > int(0) {
            worst = worst.max(rep.displacement / rep.distortion);
        }
        trees += 1;
    }
    Ok(format!("20 irreducible trees, largest displacement/distortion {worst}"))
}

fn gtd(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gtd")).args(args).output().map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(out.status.success(), "gtd {}: {text}", args.join(" "));
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn contraction_demo() -> Outcome {
    let dir = std::env::temp_dir().join(format!("gtd-acceptance-{}", std::process::id()));
    let base = corpus::rose(&[int(1), int(1)]);
    std::fs::create_dir_all(&dir).unwrap();
    let base_file = dir.join("base.json");
    std::fs::write(&base_file, base.to_json()).unwrap();
    let ws = words(&base, 1100, 50);
    let mut r = rng(11);
    let path = |p: &PathBuf| p.to_str().unwrap().to_string();
    for i in 0..5 {
        let target = corpus::random_marked_target(&mut r);
        let target_file = dir.join(format!("target_{i}.json"));
        std::fs::write(&target_file, target.to_json()).unwrap();
        let (csv, dot) = (dir.join(format!("path_{i}.csv")), dir.join(format!("dot_{i}")));
        let v = gtd(&[
            "contract", "--base", &path(&base_file), "--target", &path(&target_file),
            "--emit-csv", &path(&csv), "--emit-dot", &path(&dot),
        ])?;
        let steps = v["steps"].as_array().ok_or("no steps")?;
        let tree = |k: usize| GraphOfGroups::from_json_value(steps[k]["tree"].clone()).map_err(|e| e.to_string());
        let (first, last) = (tree(0)?, tree(steps.len() - 1)?);
        ensure!(steps[0]["t"] == "0" && steps[steps.len() - 1]["t"] == "1", "target {i}: times");
        ensure!(lengths(&last, &ws) == lengths(&target, &ws), "target {i}: t = 1 differs from the target");
        ensure!(combinatorics(&first) == combinatorics(&base), "target {i}: t = 0 is not a metric on the base");
        for s in steps {
            ensure!(s["elliptic"].as_array().is_some_and(Vec::is_empty), "target {i}: elliptic words at t = {}", s["t"]);
            let g = GraphOfGroups::from_json_value(s["tree"].clone()).map_err(|e| e.to_string())?;
            ensure!(profile(&g, &ws).iter().all(|e| !e), "target {i}: elliptic profile at t = {}", s["t"]);
        }
        let rows = std::fs::read_to_string(&csv).map_err(|e| e.to_string())?.lines().count();
        ensure!(rows == steps.len() + 1, "target {i}: csv has {rows} lines");
        for k in 0..steps.len() {
            let file = dot.join(format!("step_{k}.dot"));
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            ensure!(text.contains("graph"), "target {i}: empty dot file");
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok("5 targets; csv and dot written".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("displacement identity", displacement_identity, 30),
        ("normal form vs ball oracle", normal_form_oracle, 120),
        ("move invariance", move_invariance, 60),
        ("fold endpoints", fold_endpoints, 120),
        ("fold monotonicity and scaling", fold_monotonicity, 120),
        ("T_1/2 worked example", worked_example, 60),
        ("thickening", thickening, 60),
        ("simplex round trip", simplex_round_trip, 60),
        ("section correctness", section_correctness, 60),
        ("basepoint stability", basepoint_stability_check, 60),
        ("contraction demo", contraction_demo, 120),
    ];
    // ACCEPTANCE_ONLY=2,7 runs a subset
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|k| k.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(limit) => Err(format!("over the {limit} s limit")),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
