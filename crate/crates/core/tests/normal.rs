use gtd::normal::*;
use gtd::word::Letter;
use gtd::{GraphOfGroups, Word};
use gtd::corpus;
use gtd::rational::{int, rat};

fn w(g: &GraphOfGroups, s: &str) -> Word {
    Word::parse(g, s).unwrap()
}

#[test]
fn bs23_relation_pinches() {
    let g = corpus::bs(2, 3);
    let r = reduce_word(&g, &w(&g, "t a^2 t^-1")).unwrap();
    assert_eq!(r.letters, w(&g, "a^3"));
    assert!(r.is_elliptic());
    assert_eq!(r.translation_length, int(0));
}

#[test]
fn cyclic_reduction_is_conjugation() {
    let g = corpus::bs(2, 3);
    let r = reduce_word(&g, &w(&g, "t a t^-1")).unwrap();
    assert_eq!(r.letters, w(&g, "a"));
    assert!(r.is_elliptic());
}

#[test]
fn odd_exponent_blocks_pinch() {
    let g = corpus::bs(2, 3);
    let r = reduce_word(&g, &w(&g, "t a t a^-1")).unwrap();
    assert_eq!(r.classification, Classification::Hyperbolic);
    assert_eq!(r.translation_length, int(2));
}

#[test]
fn inverse_relation_uses_index_to() {
    let g = corpus::bs(2, 3);
    let r = reduce_word(&g, &w(&g, "t^-1 a^3 t")).unwrap();
    assert_eq!(r.letters, w(&g, "a^2"));
    // a conjugate of a^2, elliptic but outside the vertex group
    assert!(is_elliptic(&g, &w(&g, "t^-1 a^2 t")).unwrap());
    assert!(!in_vertex_group(&g, &w(&g, "t^-1 a^2 t")));
    assert!(in_vertex_group(&g, &w(&g, "t^-1 a^3 t")));
}

#[test]
fn translation_lengths() {
    let g = corpus::bs(2, 3);
    assert_eq!(translation_length(&g, &w(&g, "a")).unwrap(), int(0));
    assert_eq!(translation_length(&g, &w(&g, "t")).unwrap(), int(1));
    let f2 = corpus::rose(&[rat(1, 2), rat(1, 2)]);
    assert_eq!(translation_length(&f2, &w(&f2, "x y")).unwrap(), int(1));
    assert_eq!(translation_length(&f2, &w(&f2, "x y x^-1")).unwrap(), rat(1, 2));
}

#[test]
fn not_a_loop() {
    let g = corpus::theta(&[int(1), int(1), int(1)]);
    let e = reduce_word(&g, &Word::parse_graph(&g, "e0").unwrap()).unwrap_err();
    assert!(matches!(e, ReduceError::NotALoop(_)));
}

#[test]
fn coset_forms_agree_on_equal_cosets() {
    let g = corpus::bs(2, 3);
    // a^3 t = t a^2, so a^4 t = a t a^2 and a^3 t lies in t G_v
    let a = coset_normal_form(&g, &w(&g, "a^4 t"));
    let b = coset_normal_form(&g, &w(&g, "a t a^2"));
    assert_eq!(a, b);
    assert_eq!(a.steps, vec![(1, Letter::edge(0, false))]);
    assert_eq!(
        coset_normal_form(&g, &w(&g, "a^3 t")),
        coset_normal_form(&g, &w(&g, "t"))
    );
    assert_ne!(a, coset_normal_form(&g, &w(&g, "t")));
}
