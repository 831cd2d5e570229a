mod graph {
    use gtd::graph::*;
    use gtd::GraphOfGroups;
    use gtd::corpus;

    #[test]
    fn bs23_is_valid() {
        corpus::bs(2, 3).validate().unwrap();
    }

    #[test]
    fn zero_index_reported() {
        let mut g = corpus::bs(2, 3);
        g.edges[0].index_from = 0;
        let r = g.validate().unwrap_err();
        assert_eq!(r.errors, vec![GraphError::ZeroIndex { edge: "t".into() }]);
        let v = serde_json::to_value(&r.errors[0]).unwrap();
        assert_eq!(v, serde_json::json!({"error":"ZeroIndex","edge":"t"}));
    }

    #[test]
    fn two_vertices_no_edges_disconnected() {
        let g = GraphOfGroups::new(
            vec![
                Vertex { id: "u".into(), group: GroupKind::Trivial },
                Vertex { id: "v".into(), group: GroupKind::Trivial },
            ],
            vec![],
        );
        let r = g.validate().unwrap_err();
        assert!(r.errors.contains(&GraphError::Disconnected { vertex: "v".into() }));
    }

    #[test]
    fn other_violations() {
        let mut g = corpus::theta(&vec![gtd::rational::int(1); 3]);
        g.edges[1].length = gtd::rational::int(0);
        g.edges[2].index_to = 2;
        g.spanning_tree = vec![0, 1];
        let errs = g.validate().unwrap_err().errors;
        assert!(errs.contains(&GraphError::NonpositiveLength { edge: "e1".into() }));
        assert!(errs
            .iter()
            .any(|e| matches!(e, GraphError::TrivialVertexWithIndex { edge, .. } if edge == "e2")));
        assert!(errs.iter().any(|e| matches!(e, GraphError::BadSpanningTree { .. })));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"vertices":[{"id":"v","group":"Z"}],"edges":[{"id":"t","from":"v","to":"v","index_from":2,"index_to":3,"length":"1"}],"spanning_tree":[],"marking":{"a":"a_v","t":"t"}}"#;
        let g = GraphOfGroups::from_json(text).unwrap();
        g.validate().unwrap();
        assert_eq!(g.edges[0].index_to, 3);
        let back = GraphOfGroups::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn loop_generators_of_theta() {
        let g = corpus::theta(&vec![gtd::rational::int(1); 3]);
        let gens = g.loop_generators();
        assert_eq!(gens.len(), 2);
        for (_, w) in &gens {
            w.check_loop(&g, Some(0)).unwrap();
        }
    }
}

mod word {
    use gtd::{BaseWord, Word};
    use gtd::corpus;

    #[test]
    fn parse_and_display() {
        let g = corpus::bs(2, 3);
        let w = Word::parse_graph(&g, "t a_v^2 t^-1").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.display(&g), "t a_v^2 t^-1");
        w.check_loop(&g, Some(0)).unwrap();
        assert!(Word::parse_graph(&g, "q").is_err());
        // marking letters
        let w2 = Word::parse(&g, "t a^2 t^-1").unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn not_a_loop_detected() {
        let g = corpus::theta(&vec![gtd::rational::int(1); 3]);
        let w = Word::parse_graph(&g, "e0").unwrap();
        assert!(w.check_loop(&g, None).is_err());
        let w = Word::parse_graph(&g, "e0 e1^-1").unwrap();
        w.check_loop(&g, None).unwrap();
    }

    #[test]
    fn base_word_reduces() {
        let w = BaseWord::parse("x y y^-1 x").unwrap();
        assert_eq!(w.to_string(), "x^2");
        assert_eq!(w.concat(&w.inverse()), BaseWord::default());
    }
}

mod rational {
    use gtd::rational::*;
    

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), int(4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(fmt_rational(&rat(6, 4)), "3/2");
        assert_eq!(fmt_rational(&int(-2)), "-2");
    }
}
