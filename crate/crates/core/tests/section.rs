use gtd::corpus;
use gtd::folding::{fold_at_time, length_profile};
use gtd::normal::translation_length;
use gtd::rational::{int, rat};
use gtd::section::{basepoint_stability, contraction_path, section_map, SectionError};
use gtd::treegeom::DEFAULT_CAP;
use gtd::{BaseWord, GraphOfGroups, Rational, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn xy() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn sample(seed: u64, n: usize) -> Vec<BaseWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| corpus::random_base_word(&mut rng, &xy(), 1 + i % 6)).collect()
}

fn length(g: &GraphOfGroups, w: &BaseWord) -> Rational {
    translation_length(g, &g.mark(w).unwrap()).unwrap()
}

fn base() -> GraphOfGroups {
    corpus::rose(&[int(1), int(1)])
}

#[test]
fn identity_section() {
    let g = corpus::rose(&[rat(1, 2), rat(1, 2)]);
    let s = section_map(&g, &g, &int(1), DEFAULT_CAP).unwrap();
    assert_eq!(s.remetrized.lengths(), g.lengths());
    assert_eq!(s.morphism().unwrap().fold_depth().unwrap(), int(0));
}

#[test]
fn petals_pull_back_loop_lengths() {
    let target = corpus::rose(&[int(2), int(3)]);
    let s = section_map(&base(), &target, &int(3), DEFAULT_CAP).unwrap();
    assert_eq!(s.remetrized.lengths(), vec![int(2), int(3)]);
    assert!(s.vertex_images.iter().all(|p| *p == s.basepoint));
}

#[test]
fn theta_is_not_reduced() {
    let theta = corpus::theta(&[int(1), int(1), int(1)]);
    let err = section_map(&theta, &base(), &int(1), DEFAULT_CAP).unwrap_err();
    assert!(matches!(err, SectionError::BaseNotReduced(_)));
}

#[test]
fn section_property_on_random_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let words = sample(32, 30);
    for _ in 0..10 {
        let target = corpus::random_marked_target(&mut rng);
        let radius = target.lengths().into_iter().max().unwrap();
        let s = section_map(&base(), &target, &radius, DEFAULT_CAP).unwrap();
        let beta = s.morphism().unwrap();
        let top = fold_at_time(&beta, &int(1)).unwrap().tree;
        for w in &words {
            assert_eq!(length(&top, w), length(&target, w), "{w}");
            // a morphism never lengthens a loop
            assert!(length(&s.remetrized, w) >= length(&target, w));
        }
        // same marked graph as the base, new lengths
        let b = base();
        assert_eq!(s.remetrized.marking, b.marking);
        assert!(s.remetrized.edges.iter().zip(&b.edges).all(|(e, f)| (e.from, e.to) == (f.from, f.to)));
    }
}

#[test]
fn contraction_endpoints() {
    let target = corpus::rose(&[int(2), int(3)]);
    let path = contraction_path(&base(), &target, &[int(0), int(1)], 0, DEFAULT_CAP).unwrap();
    assert_eq!(path.steps[0].1.lengths(), path.section.remetrized.lengths());
    for w in sample(33, 20) {
        assert_eq!(length(&path.steps[1].1, &w), length(&target, &w));
    }
    assert!(path.line.is_empty());
}

#[test]
fn targets_in_the_base_stratum_do_not_move() {
    let target = corpus::rose(&[int(1), int(2)]);
    let times = [int(0), rat(1, 2), int(1)];
    let path = contraction_path(&base(), &target, &times, 4, DEFAULT_CAP).unwrap();
    assert_eq!(path.fold_depth, int(0));
    assert_eq!(path.section.remetrized.lengths(), target.lengths());
    for (_, g) in &path.steps {
        assert_eq!(g.lengths(), target.lengths());
    }
    assert_eq!(path.line.len(), 5);
    assert_eq!(path.line[0].1, path.terminal);
}

#[test]
fn twisted_target_stays_free() {
    let mut target = corpus::rose(&[int(1), int(1)]);
    let x = target.marking.as_ref().unwrap()["x"].clone();
    let y = target.marking.as_ref().unwrap()["y"].clone();
    let twisted = [("x".to_string(), x.clone()), ("y".to_string(), x.concat(&y))];
    target = target.with_marking(twisted.into_iter().collect());
    let times: Vec<Rational> = (0..=4).map(|k| rat(k, 4)).collect();
    let path = contraction_path(&base(), &target, &times, 0, DEFAULT_CAP).unwrap();
    let beta = path.section.morphism().unwrap();
    // nontrivial words stay hyperbolic along the whole path
    for row in length_profile(&beta, &sample(34, 25), &times).unwrap() {
        assert!(row.iter().all(|l| *l > int(0)), "{row:?}");
    }
}

#[test]
fn scaling_the_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let times = [int(0), rat(1, 3), int(1)];
    let words = sample(36, 15);
    for _ in 0..4 {
        let target = corpus::random_marked_target(&mut rng);
        let a = contraction_path(&base(), &target, &times, 0, DEFAULT_CAP).unwrap();
        for k in [int(2), rat(1, 3)] {
            let b = contraction_path(&base(), &target.scaled(&k), &times, 0, DEFAULT_CAP).unwrap();
            for ((_, ga), (_, gb)) in a.steps.iter().zip(&b.steps) {
                for w in &words {
                    assert_eq!(length(gb, w), &k * length(ga, w));
                }
            }
        }
    }
}

#[test]
fn zero_perturbation() {
    let r = basepoint_stability(&corpus::rose(&[int(1), int(1)]), &int(0), DEFAULT_CAP).unwrap();
    assert_eq!(r.displacement, int(0));
    assert!(r.holds);
}

#[test]
fn rose_perturbation() {
    let r = basepoint_stability(&corpus::rose(&[int(1), int(1)]), &rat(1, 100), DEFAULT_CAP).unwrap();
    assert!(r.displacement <= rat(4, 25), "{r:?}");
    assert!(r.holds, "{r:?}");
}

#[test]
fn bs23_perturbation() {
    let r = basepoint_stability(&corpus::bs(2, 3), &rat(1, 100), DEFAULT_CAP).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn marked_words_agree() {
    // the helper's marking really is a twist of the graph's own
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let g = corpus::random_marked_target(&mut rng);
    let m = g.marking.as_ref().unwrap();
    assert!(m.values().all(|w: &Word| w.check_loop(&g, Some(g.base())).is_ok()));
}
