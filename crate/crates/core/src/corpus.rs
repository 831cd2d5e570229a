//! Named example graphs and random generators used by tests, the CLI demos
//! and the acceptance suite.

use crate::graph::{Edge, GraphOfGroups, GroupKind, Vertex};
use crate::rational::{int, rat, Rational};
use crate::word::{BaseWord, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::{BTreeMap, HashMap};

fn vertex(id: &str, group: GroupKind) -> Vertex {
    Vertex {
        id: id.to_string(),
        group,
    }
}

fn edge(id: &str, from: usize, to: usize, p: i64, q: i64, length: Rational) -> Edge {
    Edge {
        id: id.to_string(),
        from,
        to,
        index_from: p,
        index_to: q,
        length,
    }
}

/// BS(m,n): one cyclic vertex `v` with generator `a_v`, loop `t` of length 1,
/// marked by `a -> a_v`, `t -> t`.
pub fn bs(m: i64, n: i64) -> GraphOfGroups {
    bs_with_length(m, n, int(1))
}

pub fn bs_with_length(m: i64, n: i64, length: Rational) -> GraphOfGroups {
    let g = GraphOfGroups::new(
        vec![vertex("v", GroupKind::InfiniteCyclic)],
        vec![edge("t", 0, 0, m, n, length)],
    );
    let marking = BTreeMap::from([
        ("a".to_string(), Word::parse_graph(&g, "a_v").unwrap()),
        ("t".to_string(), Word::parse_graph(&g, "t").unwrap()),
    ]);
    g.with_marking(marking)
}

/// Rose with trivial vertex `v`; petals are named `x`, `y`, `z`, `w`, then
/// `p4`, `p5`, ... and each petal marks itself.
pub fn rose(lengths: &[Rational]) -> GraphOfGroups {
    let edges = lengths
        .iter()
        .enumerate()
        .map(|(i, l)| edge(&petal_name(i), 0, 0, 1, 1, l.clone()))
        .collect();
    let g = GraphOfGroups::new(vec![vertex("v", GroupKind::Trivial)], edges);
    let m = g.identity_marking();
    g.with_marking(m)
}

pub fn petal_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        _ => format!("p{i}"),
    }
}

/// Theta graph: trivial vertices `u`, `v`, three edges `e0..e2` from `u` to `v`,
/// spanning tree `{e0}`.
pub fn theta(lengths: &[Rational]) -> GraphOfGroups {
    assert_eq!(lengths.len(), 3);
    let edges = (0..3)
        .map(|i| edge(&format!("e{i}"), 0, 1, 1, 1, lengths[i].clone()))
        .collect();
    let g = GraphOfGroups::new(
        vec![vertex("u", GroupKind::Trivial), vertex("v", GroupKind::Trivial)],
        edges,
    );
    let m = g.identity_marking();
    g.with_marking(m)
}

/// Two cyclic vertices `u`, `v` joined by `e1` with indices (1,2) and `e2`
/// with indices (3,5), unit lengths.
pub fn two_vertex_gbs() -> GraphOfGroups {
    let g = GraphOfGroups::new(
        vec![
            vertex("u", GroupKind::InfiniteCyclic),
            vertex("v", GroupKind::InfiniteCyclic),
        ],
        vec![edge("e1", 0, 1, 1, 2, int(1)), edge("e2", 0, 1, 3, 5, int(1))],
    );
    let m = g.identity_marking();
    g.with_marking(m)
}

/// Barbell: two loops joined by a bridge; trivial vertex groups, rank 2.
pub fn barbell(lengths: &[Rational; 3]) -> GraphOfGroups {
    let g = GraphOfGroups::new(
        vec![vertex("u", GroupKind::Trivial), vertex("v", GroupKind::Trivial)],
        vec![
            edge("x", 0, 0, 1, 1, lengths[0].clone()),
            edge("b", 0, 1, 1, 1, lengths[1].clone()),
            edge("y", 1, 1, 1, 1, lengths[2].clone()),
        ],
    );
    let m = g.identity_marking();
    g.with_marking(m)
}

/// A random positive rational with denominator dividing `den`, in `(0, max]`.
pub fn random_length<R: Rng>(rng: &mut R, den: i64, max: i64) -> Rational {
    rat(rng.gen_range(1..=den * max), den)
}

fn random_lengths<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| random_length(rng, 4, 2)).collect()
}

/// A random free marked metric graph of rank 2 or 3 with at most 4 edges.
pub fn random_free_graph<R: Rng>(rng: &mut R) -> GraphOfGroups {
    match rng.gen_range(0..5) {
        0 => rose(&random_lengths(rng, 2)),
        1 => rose(&random_lengths(rng, 3)),
        2 => theta(&random_lengths(rng, 3)),
        3 => {
            let l = random_lengths(rng, 3);
            barbell(&[l[0].clone(), l[1].clone(), l[2].clone()])
        }
        _ => {
            // theta with an extra petal at u: rank 3, 4 edges
            let mut g = theta(&random_lengths(rng, 3));
            g.edges.push(edge("f", 0, 0, 1, 1, random_length(rng, 4, 2)));
            g.reset_spanning_tree();
            let m = g.identity_marking();
            g.with_marking(m)
        }
    }
}

/// A random graph of groups with at most `max_edges` edges: free graphs,
/// Baumslag–Solitar loops and two-vertex GBS graphs.
pub fn random_graph<R: Rng>(rng: &mut R, max_edges: usize) -> GraphOfGroups {
    let choice = rng.gen_range(0..4);
    match choice {
        0 if max_edges >= 2 => random_free_graph_bounded(rng, max_edges),
        1 => {
            let m = *[1i64, 2, 3, -2].choose(rng).unwrap();
            let n = *[2i64, 3, 5, -3].choose(rng).unwrap();
            bs_with_length(m, n, random_length(rng, 4, 2))
        }
        2 if max_edges >= 2 => {
            let mut g = two_vertex_gbs();
            g.edges[0].index_to = *[2i64, 3, -2].choose(rng).unwrap();
            g.edges[1].index_from = *[2i64, 3].choose(rng).unwrap();
            g.edges[1].index_to = *[2i64, 5, -3].choose(rng).unwrap();
            for e in &mut g.edges {
                e.length = random_length(rng, 4, 2);
            }
            g
        }
        _ => {
            if max_edges >= 2 {
                rose(&random_lengths(rng, 2))
            } else {
                bs_with_length(2, 3, random_length(rng, 4, 2))
            }
        }
    }
}

fn random_free_graph_bounded<R: Rng>(rng: &mut R, max_edges: usize) -> GraphOfGroups {
    loop {
        let g = random_free_graph(rng);
        if g.edges.len() <= max_edges {
            return g;
        }
    }
}

/// Random freely reduced base word of the given length over `gens`.
pub fn random_base_word<R: Rng>(rng: &mut R, gens: &[String], len: usize) -> BaseWord {
    let mut w = BaseWord::default();
    let mut last: Option<(usize, i64)> = None;
    while w.len() < len {
        let i = rng.gen_range(0..gens.len());
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        if last == Some((i, -s)) {
            continue;
        }
        w.push(&gens[i], s);
        last = Some((i, s));
    }
    w
}

/// Random loop word in the graph's own generators.
pub fn random_loop<R: Rng>(rng: &mut R, g: &GraphOfGroups, len: usize) -> Word {
    let gens = g.loop_generators();
    let mut w = Word::identity();
    for _ in 0..len {
        let (_, x) = gens.choose(rng).unwrap();
        w = if rng.gen_bool(0.5) {
            w.concat(x)
        } else {
            w.concat(&x.inverse())
        };
    }
    w
}

/// Random automorphism of the free group on `gens` as a product of Nielsen
/// moves.
pub fn random_automorphism<R: Rng>(
    rng: &mut R,
    gens: &[String],
    moves: usize,
) -> HashMap<String, BaseWord> {
    let mut map: HashMap<String, BaseWord> =
        gens.iter().map(|g| (g.clone(), BaseWord::gen(g))).collect();
    for _ in 0..moves {
        let i = rng.gen_range(0..gens.len());
        let mut j = rng.gen_range(0..gens.len());
        while j == i && gens.len() > 1 {
            j = rng.gen_range(0..gens.len());
        }
        let gi = map[&gens[i]].clone();
        let gj = map[&gens[j]].clone();
        let new = match rng.gen_range(0..3) {
            0 => gi.concat(&gj),
            1 => gj.concat(&gi),
            _ => gi.inverse(),
        };
        map.insert(gens[i].clone(), new);
    }
    map
}

/// Re-marks a graph: generator `x` goes to the image of `phi(x)` under the
/// graph's current marking.
pub fn remark(g: &GraphOfGroups, phi: &HashMap<String, BaseWord>) -> GraphOfGroups {
    let mut out = g.clone();
    let marking = g
        .marking
        .as_ref()
        .expect("remark needs a marking")
        .keys()
        .map(|k| {
            let img = phi.get(k).cloned().unwrap_or_else(|| BaseWord::gen(k));
            (k.clone(), g.mark(&img).expect("generator in marking"))
        })
        .collect();
    out.marking = Some(marking);
    out
}

/// A random rank-2 marked metric graph with generators `x`, `y`, its marking
/// twisted by a few Nielsen moves.
pub fn random_marked_target<R: Rng>(rng: &mut R) -> GraphOfGroups {
    let g = match rng.gen_range(0..3) {
        0 => rose(&random_lengths(rng, 2)),
        1 => theta(&random_lengths(rng, 3)),
        _ => {
            let l = random_lengths(rng, 3);
            barbell(&[l[0].clone(), l[1].clone(), l[2].clone()])
        }
    };
    let own = g.identity_marking();
    let renamed: BTreeMap<String, Word> =
        own.into_values().zip(["x", "y"]).map(|(w, k)| (k.to_string(), w)).collect();
    let g = g.with_marking(renamed);
    let gens = vec!["x".to_string(), "y".to_string()];
    let moves = rng.gen_range(0..3);
    let phi = random_automorphism(rng, &gens, moves);
    let twisted = gens
        .iter()
        .map(|k| (k.clone(), g.mark(&phi[k]).expect("marking covers x and y")))
        .collect();
    g.with_marking(twisted)
}
