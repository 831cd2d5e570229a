mod path {
    use gtd::folding::*;
    use gtd::rational::{int, rat};
    use gtd::Word;
    use gtd::corpus;

    #[test]
    fn word_path_round_trip() {
        let g = corpus::theta(&[int(1), int(1), int(1)]);
        let w = Word::parse_graph(&g, "e0^-1 e1").unwrap();
        let p = word_to_path(&w);
        assert_eq!(p, vec![Dir::new(1, true), Dir::new(0, false)]);
        assert_eq!(p[0].start(&g), 0);
        assert_eq!(p[1].end(&g), 0);
        assert_eq!(path_to_word(&p), w);
    }

    #[test]
    fn spans_merge_and_cancel() {
        let s = tighten([
            Span::new(0, int(0), rat(1, 2)),
            Span::new(0, rat(1, 2), int(1)),
            Span::new(1, int(0), int(1)),
            Span::new(1, int(1), rat(1, 4)),
        ]);
        assert_eq!(s, vec![Span::new(0, int(0), int(1)), Span::new(1, int(0), rat(1, 4))]);
    }

    #[test]
    fn loop_through_interior_point() {
        let g = corpus::rose(&[int(1), int(1)]);
        // start halfway along x, finish x, go round y, come back to the start
        let spans = [
            Span::new(0, rat(1, 2), int(1)),
            Span::new(1, int(0), int(1)),
            Span::new(0, int(0), rat(1, 2)),
        ];
        let (v, dirs) = closed_to_dirs(&g, &spans);
        assert_eq!(v, Some(0));
        assert_eq!(dirs, vec![Dir::new(0, true), Dir::new(1, true)]);
    }
}

mod random {
    use gtd::folding::*;
    use gtd::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_morphisms_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let m = random_morphism(&mut rng).unwrap();
            assert!(m.fold_depth().unwrap() > int(0));
        }
    }
}
