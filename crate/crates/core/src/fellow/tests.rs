use std::sync::Arc;

use super::*;
use crate::cayley::Ball;
use crate::zoo::preset;

fn oracle(name: &str, r: usize) -> DistanceOracle {
    let p = preset(name).unwrap();
    DistanceOracle::new(Arc::new(Ball::build(p.solver.clone(), r).unwrap()))
}

#[test]
fn identical_paths_travel_at_zero() {
    let p = preset("wise").unwrap();
    let m = Search(p.solver.as_ref());
    let w = p.word("aSbsT");
    let r = sync_ft(&m, &w, &w, 0);
    assert!(r.holds);
    assert_eq!(r.max_distance, 0);
    assert_eq!(r.continuous_constant, 1);
    let phi = async_ft(&m, &w, &w, 0).unwrap();
    assert_eq!(phi.as_slice(), &[0, 1, 2, 3, 4, 5]);
}

#[test]
fn pinch_and_its_image_travel_at_two() {
    let p = preset("wise").unwrap();
    let m = Search(p.solver.as_ref());
    let r = sync_ft(&m, &p.word("Sas"), &p.word("d"), 2);
    assert!(r.holds);
    assert_eq!(r.max_distance, 2);
    assert!(!sync_ft(&m, &p.word("Sas"), &p.word("d"), 0).holds);
    // Asynchronously the pair is even 1-close: 1, S, Sa, d against 1, d.
    let phi = async_ft(&m, &p.word("Sas"), &p.word("d"), 1).unwrap();
    assert_eq!(phi.as_slice(), &[0, 0, 1, 1]);
    assert!(async_ft(&m, &p.word("Sas"), &p.word("d"), 0).is_none());
}

#[test]
fn commutator_and_short_loop() {
    let p = preset("z2-wise-base").unwrap();
    let m = Search(p.solver.as_ref());
    let r = sync_ft(&m, &p.word("abAB"), &p.word("cC"), 1);
    assert!(r.holds);
    assert_eq!(r.max_distance, 1);
    let o = oracle("z2-wise-base", 3);
    assert_eq!(sync_ft(&o, &p.word("abAB"), &p.word("cC"), 1), r);
}

#[test]
fn violation_reports_first_time() {
    let p = preset("z2").unwrap();
    let m = Search(p.solver.as_ref());
    let r = sync_ft(&m, &p.word("aaaa"), &p.word("bbbb"), 3);
    assert!(!r.holds);
    assert_eq!(r.first_violation, Some(2));
    assert_eq!(r.max_distance, 2);
}

#[test]
fn sync_implies_async_and_async_is_monotone() {
    let p = preset("z2-gersten-base").unwrap();
    let m = Search(p.solver.as_ref());
    let words = ["abAB", "cdCD", "aaBBAAbb", "cC", "adCb", "dDaA"];
    for w in words {
        for u in words {
            let (w, u) = (p.word(w), p.word(u));
            for k in 0..4 {
                if sync_ft(&m, &w, &u, k).holds {
                    assert!(async_ft(&m, &w, &u, k).is_some());
                }
                if async_ft(&m, &w, &u, k).is_some() {
                    assert!(async_ft(&m, &w, &u, k + 1).is_some());
                }
            }
        }
    }
}

#[test]
fn reparameterization_shape() {
    assert!(Reparameterization::new(vec![0, 2, 1]).is_err());
    assert!(Reparameterization::new(vec![1, 2]).is_err());
    let r = Reparameterization::normalized(&[3, 1, 5, 2], 4, 3);
    assert_eq!(r.as_slice(), &[0, 1, 3, 3, 3]);
    assert_eq!(Reparameterization::frozen_identity(5, 2).as_slice(), &[0, 1, 2, 2, 2, 2]);
}

#[test]
fn case_one_keeps_u() {
    let p = preset("z2-wise-base").unwrap();
    let m = Search(p.solver.as_ref());
    let id = p.solver.identity();
    let (w, u) = (p.word("abAB"), p.word("cC"));
    let phi = Reparameterization::frozen_identity(4, 2);
    let s = synchronize(&m, &m, &id, &w, &id, &u, &phi, 1).unwrap();
    assert_eq!(s.case, 1);
    assert_eq!(s.v, u);
    assert_eq!(s.constant, 4);
}

#[test]
fn case_two_when_u_dawdles() {
    let p = preset("z2-wise-base").unwrap();
    let m = Search(p.solver.as_ref());
    let id = p.solver.identity();
    let w = p.word("aAaAaA");
    let phi = Reparameterization::new(vec![0; 7]).unwrap();
    let s = synchronize(&m, &m, &id, &w, &id, &Word::empty(), &phi, 1).unwrap();
    assert_eq!(s.case, 2);
    assert_eq!((s.j, s.l), (Some(3), Some(0)));
    assert_eq!(p.presentation.alphabet.format_word(&s.v), "aAaA");
    assert_eq!(s.constant, 7);
    assert!(s.report.holds);
}

#[test]
fn case_three_when_u_runs_ahead() {
    let p = preset("z2-wise-base").unwrap();
    let m = Search(p.solver.as_ref());
    let id = p.solver.identity();
    let (w, u) = (p.word("bBbBbB"), p.word("aaAA"));
    let phi = Reparameterization::new(vec![0, 4, 4, 4, 4, 4, 4]).unwrap();
    let s = synchronize(&m, &m, &id, &w, &id, &u, &phi, 1).unwrap();
    assert_eq!(s.case, 3);
    assert_eq!(s.j, Some(1));
    assert_eq!(p.presentation.alphabet.format_word(&s.v), "bB");
    assert_eq!(s.constant, 7);
}

#[test]
fn premise_and_length_errors() {
    let p = preset("z2").unwrap();
    let m = Search(p.solver.as_ref());
    let id = p.solver.identity();
    let phi = Reparameterization::frozen_identity(2, 2);
    assert!(matches!(
        synchronize(&m, &m, &id, &p.word("aA"), &id, &p.word("bB"), &phi, 1),
        Err(FellowError::NotShorter { .. })
    ));
    let phi = Reparameterization::new(vec![0, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
    assert!(matches!(
        synchronize(&m, &m, &id, &p.word("aaaaAAAA"), &id, &Word::empty(), &phi, 1),
        Err(FellowError::Premise { t: 2, k: 1 })
    ));
}

#[test]
fn generated_suite_covers_all_cases() {
    let p = preset("z2-gersten-base").unwrap();
    let m = Search(p.solver.as_ref());
    let id = p.solver.identity();
    let pairs = async_pairs(&m, 1, 100, 8, 7);
    assert_eq!(pairs.len(), 100);
    assert_eq!(pairs, async_pairs(&m, 1, 100, 8, 7));
    let mut cases = [0usize; 4];
    for pr in &pairs {
        assert!(pr.u.len() < pr.w.len());
        let s = synchronize(&m, &m, &id, &pr.w, &id, &pr.u, &pr.phi, 1).unwrap();
        assert!(s.report.holds);
        assert!(s.v.len() < pr.w.len());
        cases[s.case as usize] += 1;
    }
    eprintln!("cases {cases:?}");
    assert!(cases[1] > 0 && cases[2] > 0 && cases[3] > 0, "{cases:?}");
}

