use gtd::folding::{self, fold_at_time, length_profile, random_morphism, FoldError, Morphism, Span};
use gtd::normal::translation_length;
use gtd::rational::{int, rat};
use gtd::treegeom::{build_ball_depth, Point};
use gtd::{BaseWord, GraphOfGroups, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn rose(petals: &[(&str, &str)]) -> GraphOfGroups {
    let edges: Vec<_> = petals
        .iter()
        .map(|(id, l)| json!({"id": id, "from": "v", "to": "v", "length": l}))
        .collect();
    GraphOfGroups::from_json_value(json!({
        "vertices": [{"id": "v", "group": "1"}],
        "edges": edges,
    }))
    .unwrap()
}

/// Domain petals a (1), b (2); range petals a, c (1, 1); b runs over a then c.
fn worked_example() -> Morphism {
    let images = json!({"a": ["a"], "b": ["a", "c"]});
    Morphism::from_json_parts(rose(&[("a", "1"), ("b", "2")]), rose(&[("a", "1"), ("c", "1")]), &images)
        .unwrap()
}

fn sorted_lengths(g: &GraphOfGroups) -> Vec<Rational> {
    let mut l = g.lengths();
    l.sort();
    l
}

fn sample(gens: &[String], seed: u64, n: usize) -> Vec<BaseWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| gtd::corpus::random_base_word(&mut rng, gens, 1 + i % 7))
        .collect()
}

fn length(g: &GraphOfGroups, w: &BaseWord) -> Rational {
    translation_length(g, &g.mark(w).unwrap()).unwrap()
}

/// Translation length read off the tree: least displacement over a ball.
fn ball_length(g: &GraphOfGroups, w: &BaseWord) -> Rational {
    let x = g.mark(w).unwrap();
    // the axis passes within half the word of the base
    let near = x.len() / 2 + 1;
    let ball = build_ball_depth(g, x.len() + near, 200_000).unwrap();
    (0..ball.len())
        .filter(|&n| ball.nodes[n].level <= near)
        .filter_map(|n| ball.displacement(&x, &Point::vertex(n)))
        .min()
        .unwrap()
}

#[test]
fn identity_has_depth_zero() {
    let g = gtd::corpus::rose(&[int(1), int(1)]);
    assert_eq!(folding::identity(&g).unwrap().fold_depth().unwrap(), int(0));
}

#[test]
fn worked_example_depth() {
    assert_eq!(worked_example().fold_depth().unwrap(), int(1));
}

#[test]
fn worked_example_half_way() {
    let m = worked_example();
    let step = fold_at_time(&m, &rat(1, 2)).unwrap();
    assert_eq!(sorted_lengths(&step.tree), vec![rat(1, 2), rat(1, 2), rat(3, 2)]);
    // the shared half of a shortens b by exactly one half
    let b = BaseWord::gen("b");
    assert_eq!(length(&step.tree, &b), rat(3, 2) + rat(1, 2));
    for w in sample(&["a".into(), "b".into()], 1, 12).iter().filter(|w| w.len() <= 3) {
        assert_eq!(length(&step.tree, &w), ball_length(&step.tree, &w), "{w}");
    }
}

#[test]
fn length_mismatch() {
    let images = json!({"a": ["a"], "b": ["a", "c", "a"]});
    let err = Morphism::from_json_parts(rose(&[("a", "1"), ("b", "2")]), rose(&[("a", "1"), ("c", "1")]), &images)
        .unwrap_err();
    assert!(matches!(err, FoldError::LengthMismatch { .. }));
}

#[test]
fn time_out_of_range() {
    assert!(matches!(
        fold_at_time(&worked_example(), &rat(3, 2)),
        Err(FoldError::TOutOfRange(_))
    ));
}

#[test]
fn partial_span_images() {
    // b ends halfway along c and comes back: not reduced
    let images = json!({"a": ["a"], "b": ["a", {"edge": "c", "from": "0", "to": "1/2"}, {"edge": "c", "from": "1/2", "to": "0"}]});
    let err = Morphism::from_json_parts(rose(&[("a", "1"), ("b", "2")]), rose(&[("a", "1"), ("c", "1")]), &images)
        .unwrap_err();
    assert!(matches!(err, FoldError::NotReduced(_)));
}

#[test]
fn endpoints_of_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let m = random_morphism(&mut rng).unwrap();
        let gens = m.domain.marking_generators().unwrap();
        let words = sample(&gens, 2, 30);
        let t0 = fold_at_time(&m, &int(0)).unwrap().tree;
        let t1 = fold_at_time(&m, &int(1)).unwrap().tree;
        for w in &words {
            let (ld, lr) = m.lengths(w);
            assert_eq!(length(&t0, w), ld);
            assert_eq!(length(&t1, w), lr);
        }
    }
}

#[test]
fn lengths_decrease_along_the_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let times: Vec<Rational> = (0..=8).map(|k| rat(k, 8)).collect();
    for _ in 0..6 {
        let m = random_morphism(&mut rng).unwrap();
        let words = sample(&m.domain.marking_generators().unwrap(), 3, 20);
        for row in length_profile(&m, &words, &times).unwrap() {
            assert!(row.windows(2).all(|w| w[0] >= w[1]), "{row:?}");
        }
    }
}

#[test]
fn composite_recovers_the_morphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..6 {
        let m = random_morphism(&mut rng).unwrap();
        for t in [rat(1, 3), rat(1, 2), rat(5, 6)] {
            let step = fold_at_time(&m, &t).unwrap();
            let c = step.to_time.then(&step.from_time).unwrap();
            assert_eq!(c.images, m.images);
        }
    }
}

#[test]
fn scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..4 {
        let m = random_morphism(&mut rng).unwrap();
        let words = sample(&m.domain.marking_generators().unwrap(), 4, 15);
        for k in [int(2), rat(1, 3)] {
            let mk = m.scaled(&k).unwrap();
            for t in [rat(1, 4), rat(2, 3)] {
                let a = fold_at_time(&m, &t).unwrap().tree;
                let b = fold_at_time(&mk, &t).unwrap().tree;
                for w in &words {
                    assert_eq!(length(&b, w), &k * length(&a, w));
                }
            }
        }
    }
}

#[test]
fn later_folds_of_the_remaining_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..4 {
        let m = random_morphism(&mut rng).unwrap();
        let words = sample(&m.domain.marking_generators().unwrap(), 5, 15);
        let s = rat(1, 4);
        let rest = fold_at_time(&m, &s).unwrap().from_time;
        let rest = Morphism::new(rest.domain, rest.range, rest.images).unwrap();
        for t in [rat(1, 2), rat(3, 4)] {
            // the remaining map has the rest of the depth budget
            let direct = fold_at_time(&m, &t).unwrap().tree;
            let spent = (&t - &s) * m.fold_depth().unwrap();
            let later = fold_at_time(&rest, &(spent / rest.fold_depth().unwrap()))
                .unwrap()
                .tree;
            for w in &words {
                assert_eq!(length(&direct, w), length(&later, w));
            }
        }
    }
}

#[test]
fn span_json_round_trip() {
    let g = rose(&[("a", "2")]);
    let s = Span::new(0, rat(1, 2), int(2));
    assert_eq!(Span::from_json(&g, &s.to_json(&g)).unwrap(), s);
}
