use std::sync::Arc;

use super::*;
use crate::cayley::{Ball, BallOptions};
use crate::fellow::{sync_ft_from, Search};
use crate::zoo::{gersten_loop, preset, Preset};

fn frame(p: &Preset, k: usize, r: usize) -> Frame {
    Frame::new(p.solver.clone(), k, r).unwrap()
}

fn fmt(p: &Preset, w: &[Letter]) -> String {
    p.presentation.alphabet.format_word(w)
}

#[test]
fn commutator_shortens_at_one() {
    let p = preset("z2-wise-base").unwrap();
    let f = frame(&p, 1, 2);
    let w = p.word("abAB");
    let s = shorten_loop(&f, &w, false, &mut Budget::unlimited()).unwrap().unwrap();
    assert!(s.u.len() < 4);
    assert!(p.solver.is_identity_word(&s.u));
    let m = Search(p.solver.as_ref());
    let start = p.solver.eval(&s.offset);
    assert!(sync_ft_from(&m, &p.solver.identity(), &w, &start, &s.u, 1).holds);
    // Basepoint version too.
    let b = shorten_loop(&f, &w, true, &mut Budget::unlimited()).unwrap().unwrap();
    assert!(b.offset.is_empty());
    // ab = c is one step from the identity, so the trivial loop suffices.
    assert!(b.u.is_empty());
}

#[test]
fn backtrack_shortens_to_empty() {
    let p = preset("wise").unwrap();
    let f = frame(&p, 1, 1);
    let s = shorten_loop(&f, &p.word("sS"), true, &mut Budget::unlimited()).unwrap().unwrap();
    assert!(s.u.is_empty());
}

#[test]
fn non_loop_is_rejected() {
    let p = preset("z2").unwrap();
    let f = frame(&p, 1, 2);
    assert!(matches!(
        shorten_loop(&f, &p.word("ab"), false, &mut Budget::unlimited()),
        Err(PropertyError::NotALoop(_))
    ));
}

#[test]
fn gersten_loop_resists_at_one() {
    let p = preset("gersten").unwrap();
    let f = frame(&p, 1, 2);
    for n in 1..=2 {
        let w = gersten_loop(n);
        assert!(shorten_loop(&f, &w, false, &mut Budget::unlimited()).unwrap().is_none(), "n = {n}");
    }
}

#[test]
fn budget_cuts_off() {
    let p = preset("gersten").unwrap();
    let f = frame(&p, 1, 2);
    let r = shorten_loop(&f, &gersten_loop(2), false, &mut Budget::new(10));
    assert_eq!(r, Err(PropertyError::Budget { limit: 10 }));
}

#[test]
fn lsp_on_short_loops() {
    let p = preset("z2").unwrap();
    let f = frame(&p, 1, 3);
    let v = check_lsp(&f, 6, false, &LoopFamily::All, &mut Budget::unlimited()).unwrap();
    assert!(v.holds());
    // Closed walks of length 2n in Z^2: binom(2n, n)^2.
    assert_eq!(v.stats.checked, 4 + 36 + 400);
    let f0 = frame(&p, 0, 3);
    let v = check_lsp(&f0, 6, false, &LoopFamily::All, &mut Budget::unlimited()).unwrap();
    assert_eq!(v.outcome, Outcome::Counterexample);
    assert_eq!(fmt(&p, v.witness.unwrap().word("loop").unwrap()), "aA");
}

#[test]
fn lsp_needs_radius() {
    let p = preset("z2").unwrap();
    let f = frame(&p, 1, 2);
    assert!(matches!(
        check_lsp(&f, 8, false, &LoopFamily::All, &mut Budget::unlimited()),
        Err(PropertyError::Invalid(_))
    ));
}

#[test]
fn gersten_family_fails_lsp() {
    let p = preset("gersten").unwrap();
    let f = frame(&p, 1, 2);
    let family = LoopFamily::Listed { name: "gersten-loop".into(), loops: (1..=3).map(gersten_loop).collect() };
    let v = check_lsp(&f, 24, false, &family, &mut Budget::unlimited()).unwrap();
    assert_eq!(v.outcome, Outcome::Counterexample);
    assert_eq!(v.witness.unwrap().word("loop").unwrap(), &gersten_loop(1));
    assert_eq!(v.stats.checked, 1);
}

#[test]
fn blsp_fails_in_wise_at_one() {
    let p = preset("wise").unwrap();
    let f = frame(&p, 1, 2);
    let v = check_lsp(&f, 4, true, &LoopFamily::All, &mut Budget::unlimited()).unwrap();
    assert_eq!(v.property, Property::Blsp);
    assert_eq!(v.outcome, Outcome::Counterexample);
    assert_eq!(fmt(&p, v.witness.unwrap().word("loop").unwrap()), "saAS");
}

#[test]
fn fftp_free_group() {
    let p = preset("f2").unwrap();
    // aAA: the only shorter path is A, which is 2 from a.
    let f = frame(&p, 1, 6);
    let v = check_fftp(&f, 6, FftpMode::AllWords, &mut Budget::unlimited()).unwrap();
    assert_eq!(fmt(&p, v.witness.unwrap().word("word").unwrap()), "aAA");
    let f = frame(&p, 2, 6);
    assert!(check_fftp(&f, 6, FftpMode::AllWords, &mut Budget::unlimited()).unwrap().holds());
    let f0 = frame(&p, 0, 6);
    let v = check_fftp(&f0, 6, FftpMode::AllWords, &mut Budget::unlimited()).unwrap();
    assert_eq!(v.outcome, Outcome::Counterexample);
    assert_eq!(fmt(&p, v.witness.unwrap().word("word").unwrap()), "aA");
}

#[test]
fn fftp_z2_constants() {
    let p = preset("z2-wise-base").unwrap();
    let f = frame(&p, 1, 6);
    let v = check_fftp(&f, 6, FftpMode::AllWords, &mut Budget::unlimited()).unwrap();
    assert_eq!(v.outcome, Outcome::Counterexample);
    assert_eq!(fmt(&p, v.witness.unwrap().word("word").unwrap()), "aAA");
    let f = frame(&p, 2, 6);
    assert!(check_fftp(&f, 6, FftpMode::AllWords, &mut Budget::unlimited()).unwrap().holds());
    let g = check_fftp(&f, 6, FftpMode::GeodesicPrefix, &mut Budget::unlimited()).unwrap();
    assert!(g.holds());
    assert!(g.stats.checked < check_fftp(&f, 6, FftpMode::AllWords, &mut Budget::unlimited()).unwrap().stats.checked);
}

/// Brute force: every shorter word from every start within `k`.
fn naive_shortens(p: &Preset, ball: &Ball, w: &[Letter], k: usize, basepoint: bool) -> bool {
    let s = p.solver.as_ref();
    let m = Search(s);
    let id = s.identity();
    let letters: Vec<Letter> = p.presentation.alphabet.letters().collect();
    let starts: Vec<usize> = if basepoint { vec![0] } else { (0..ball.layer(k).end).collect() };
    for st in starts {
        let sk = ball.key(st);
        let mut stack = vec![Word::empty()];
        while let Some(u) = stack.pop() {
            if s.mul_word(&sk, &u) == sk && sync_ft_from(&m, &id, w, &sk, &u, k).holds {
                return true;
            }
            if u.len() + 1 < w.len() {
                for &x in &letters {
                    let mut v = u.clone();
                    v.push(x);
                    stack.push(v);
                }
            }
        }
    }
    false
}

#[test]
fn dp_matches_brute_force_on_short_loops() {
    let p = preset("z2").unwrap();
    let ball = Ball::build(p.solver.clone(), 3).unwrap();
    let loops: Vec<Word> = ["aA", "abAB", "aabAAB", "abBA", "aaAA", "abABab", "aBAb"]
        .iter()
        .map(|w| p.word(w))
        .filter(|w| p.solver.is_identity_word(w))
        .collect();
    for k in 0..=2 {
        let f = frame(&p, k, 3);
        for w in &loops {
            for bp in [false, true] {
                let dp = shorten_loop(&f, w, bp, &mut Budget::unlimited()).unwrap().is_some();
                assert_eq!(dp, naive_shortens(&p, &ball, w, k, bp), "{} k={k} bp={bp}", fmt(&p, w));
            }
        }
    }
}

#[test]
fn almost_convexity_of_z2() {
    let p = preset("z2").unwrap();
    let opts = BallOptions { adjacency: true, ..BallOptions::default() };
    let ball = Ball::build_with(p.solver.clone(), 5, &opts).unwrap();
    assert!(check_ac(&ball, 2, false).unwrap().holds());
    let b0 = Ball::build_with(p.solver.clone(), 0, &opts).unwrap();
    assert!(check_ac(&b0, 0, false).unwrap().holds());
    // On the sphere alone, aaaaa and aaaab are 2 apart but not adjacent.
    let v = check_ac(&ball, 1, true).unwrap();
    assert_eq!(v.outcome, Outcome::Counterexample);
    let w = v.witness.unwrap();
    assert_eq!(fmt(&p, w.word("x").unwrap()), "aaaaa");
}

#[test]
fn ac_is_monotone_in_c() {
    let p = preset("z2-gersten-base").unwrap();
    let opts = BallOptions { adjacency: true, ..BallOptions::default() };
    let ball = Ball::build_with(p.solver.clone(), 3, &opts).unwrap();
    let mut held = false;
    for c in 0..=6 {
        let h = check_ac(&ball, c, false).unwrap().holds();
        assert!(!held || h, "c = {c}");
        held = h;
    }
    assert!(held);
}

#[test]
fn ac_pairs_skip_out_of_range() {
    let p = preset("z2").unwrap();
    let opts = BallOptions { adjacency: true, ..BallOptions::default() };
    let ball = Ball::build_with(p.solver.clone(), 2, &opts).unwrap();
    let pairs = vec![(p.word("aa"), p.word("bb")), (p.word("aaa"), p.word("a")), (p.word("ab"), p.word("ba"))];
    let v = check_ac_pairs(&ball, 2, "test", &pairs).unwrap();
    // Only (ab, ba) qualifies, and it is the same element.
    assert_eq!(v.stats.checked, 1);
    assert!(v.holds());
}

#[test]
fn fill_certificates() {
    let p = preset("z2-wise-base").unwrap();
    let f = frame(&p, 1, 3);
    let c = fill(&f, &p.word("aA"), &mut Budget::unlimited()).unwrap();
    assert_eq!(c.total_relators, 0);
    assert!(c.verify(p.solver.as_ref()).is_ok());
    for w in ["abAB", "aabbAABB", "cBAcBA", "dCCdCC"] {
        let w = p.word(w);
        if !p.solver.is_identity_word(&w) {
            continue;
        }
        let c = fill(&f, &w, &mut Budget::unlimited()).unwrap();
        assert!(c.total_relators <= w.len() * w.len());
        assert!(c.max_relator_len <= 4);
        c.verify(p.solver.as_ref()).unwrap();
    }
}

#[test]
fn fill_stuck_on_gersten() {
    let p = preset("gersten").unwrap();
    let f = frame(&p, 1, 2);
    assert!(matches!(fill(&f, &gersten_loop(1), &mut Budget::unlimited()), Err(PropertyError::Stuck { .. })));
}

#[test]
fn sweep_agrees_with_fill() {
    let p = preset("wise").unwrap();
    let f = frame(&p, 1, 3);
    let s = fill_sweep(&f, 6, &mut Budget::unlimited()).unwrap();
    assert!(s.within_bounds());
    assert_eq!(s.loops_by_len, vec![1, 0, 12, 18, 388, 1420, 18078]);
    // Per-length worst areas from full certificates of a few loops never
    // exceed the sweep's bounds.
    for w in ["sS", "cBA", "SasD", "abAB", "SasDdSAs", "cABcBA"] {
        let w = p.word(w);
        if w.len() > 6 || !p.solver.is_identity_word(&w) {
            continue;
        }
        let c = fill(&f, &w, &mut Budget::unlimited()).unwrap();
        c.verify(p.solver.as_ref()).unwrap();
        assert!(c.total_relators <= s.area_by_len[w.len()]);
    }
}

#[test]
fn connector_for_equal_endpoints() {
    let p = preset("z2").unwrap();
    let f = frame(&p, 2, 3);
    let opts = BallOptions { adjacency: true, ..BallOptions::default() };
    let ball = Ball::build_with(p.solver.clone(), 2, &opts).unwrap();
    let (w, u) = (p.word("ab"), p.word("ba"));
    let c = blsp_to_ac_path(&f, &ball, &w, &u, &[], &mut Budget::unlimited()).unwrap();
    assert!(c.path.len() <= 6 * 2 + 2);
    assert_eq!(p.solver.mul_word(&p.solver.eval(&w), &c.path), p.solver.eval(&u));
    let c = blsp_to_ac_path(&f, &ball, &p.word("aa"), &p.word("ab"), &p.word("Ab"), &mut Budget::unlimited());
    let c = c.unwrap();
    assert!(c.path.len() <= 14);
    let f1 = frame(&p, 1, 3);
    assert!(matches!(
        blsp_to_ac_path(&f1, &ball, &w, &u, &[], &mut Budget::unlimited()),
        Err(PropertyError::Invalid(_))
    ));
}

#[test]
fn frame_from_small_ball_is_rejected() {
    let p = preset("z2").unwrap();
    let ball = Arc::new(Ball::build(p.solver.clone(), 3).unwrap());
    assert!(matches!(Frame::from_ball(ball, 1), Err(PropertyError::Invalid(_))));
}
