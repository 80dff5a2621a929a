use super::*;
use crate::presentation::parse_presentation;

#[test]
fn every_preset_loads_and_round_trips() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        let text = preset_text(name).unwrap();
        assert_eq!(p.presentation.to_text(), text, "{name}");
        assert_eq!(parse_presentation(&text).unwrap(), p.presentation);
    }
    assert!(matches!(preset("nope"), Err(ZooError::Unknown(_))));
}

#[test]
fn stallings_shape() {
    let p = preset("stallings").unwrap();
    assert_eq!(p.presentation.alphabet.len(), 24);
    assert_eq!(p.presentation.relators.len(), 16);
    let w = p.word("aCcEeA");
    assert!(p.solver.is_identity_word(&w));
    assert!(p.solver.is_identity_word(&p.word("aCeAcE")));
    assert_eq!(eval_stallings(&p.word("aC")).to_string(), "(a, C, 1)");
    assert!(eval_stallings(&p.word("aCcA")).is_identity());
}

#[test]
fn stallings_alpha_image_has_the_lemma_shape() {
    for n in 1..=3 {
        let p = preset("stallings").unwrap();
        let w = stallings_alpha(n).concat(&p.word("aC"));
        let t = eval_stallings(&w);
        let target = lemma_bb_target(n, 'c').unwrap();
        assert_eq!(t.0, target.to_vec());
        assert_eq!(t.0[1], format!("{}{}", "d".repeat(n), "C".repeat(n)));
        assert_eq!(t.0[2], format!("{}{}", "f".repeat(n), "E".repeat(n)));
    }
}

#[test]
fn witness_lengths() {
    for n in 1..=6 {
        assert_eq!(gersten_loop(n).len(), 8 * n + 8);
        assert_eq!(stallings_alpha(n).len(), 3 * n - 1);
        assert_eq!(stallings_beta(n).len(), 3 * n - 1);
    }
    assert_eq!(stallings_gamma().len(), 2);
}

#[test]
fn wise_relations_from_the_definition() {
    let p = preset("wise").unwrap();
    let s = &p.solver;
    assert_eq!(s.eval(&p.word("c")), s.eval(&p.word("ab")));
    assert_eq!(s.eval(&p.word("c")), s.eval(&p.word("ba")));
    assert_eq!(s.eval(&p.word("d")), s.eval(&p.word("cc")));
    assert!(s.is_identity_word(&p.word("SasD")));
}

#[test]
fn gersten_and_bridson_relations() {
    let g = preset("gersten").unwrap();
    assert_eq!(g.solver.eval(&g.word("d")), g.solver.eval(&g.word("aB")));
    let b = preset("bridson").unwrap();
    assert_eq!(b.solver.eval(&b.word("gaG")), b.solver.eval(&b.word("A")));
    assert_eq!(b.solver.eval(&b.word("saS")), b.solver.eval(&b.word("abAB")));
    assert_eq!(b.solver.eval(&b.word("tbT")), b.solver.eval(&b.word("c")));
    assert_ne!(b.solver.eval(&b.word("gs")), b.solver.eval(&b.word("sg")));
}

#[test]
fn lemma_bb_small_cases() {
    let p = preset("stallings").unwrap();
    for z in ['c', 'e', 'f'] {
        let r = lemma_bb_min_length(1, z, 1_000_000).unwrap();
        assert!(r.min_length >= 3, "{z}: {}", r.min_length);
        assert_eq!(eval_stallings(&r.witness).0, lemma_bb_target(1, z).unwrap().to_vec());
        assert_eq!(r.witness.len(), r.min_length);
    }
    // With n = 1 the d and D cancel, leaving (1, 1, fE), two letters away.
    let r = lemma_bb_min_length(1, 'd', 1_000_000).unwrap();
    assert_eq!(lemma_bb_target(1, 'd').unwrap(), [String::new(), String::new(), "fE".to_string()]);
    assert_eq!(r.min_length, 2);
    assert_eq!(eval_stallings(&r.witness).to_string(), "(1, 1, fE)");
    assert!(!p.solver.is_identity_word(&r.witness));
    assert!(lemma_bb_target(1, 'a').is_err());
}

#[test]
fn astar_agrees_with_bfs() {
    for z in ['c', 'd', 'e', 'f'] {
        let a = lemma_bb_min_length(1, z, 1_000_000).unwrap().min_length;
        assert_eq!(lemma_bb_min_length_bfs(1, z, 8).unwrap(), Some(a), "{z}");
    }
}

#[test]
fn gersten_loops_close_up() {
    let p = preset("gersten").unwrap();
    for n in 1..=6 {
        let w = gersten_loop(n);
        assert_eq!(w.len(), 8 * n + 8);
        assert!(p.solver.is_identity_word(&w), "n = {n}");
        assert!(!p.solver.is_identity_word(&gersten_word_as_printed(n)), "n = {n}");
    }
}
