use std::path::Path;

use loopshort::hnn::britton_reduce;
use loopshort::zoo::{preset, preset_text, PRESET_NAMES};
use loopshort::{parse_presentation, Letter, Word};
use proptest::prelude::*;

fn groups_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../groups"))
}

#[test]
fn shipped_files_match_presets() {
    for name in PRESET_NAMES {
        let path = groups_dir().join(format!("{name}.pres"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, preset_text(name).unwrap(), "{name}.pres drifted");
        let p = parse_presentation(&text).unwrap();
        assert_eq!(p.to_text(), text, "{name} does not round-trip");
    }
}

#[test]
fn relators_are_trivial() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        for r in &p.presentation.relators {
            assert!(p.solver.is_identity_word(r), "{name}: relator {} is not trivial", p.presentation.alphabet.show(r));
        }
    }
}

fn word(n_letters: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..n_letters as u8, 0..=max_len).prop_map(|v| Word(v.into_iter().map(Letter).collect()))
}

fn named_word(max_len: usize) -> impl Strategy<Value = (&'static str, Word)> {
    prop::sample::select(PRESET_NAMES.to_vec()).prop_flat_map(move |name| {
        let n = preset(name).unwrap().presentation.alphabet.len();
        (Just(name), word(n, max_len))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_is_a_group_action((name, u) in named_word(16), seed in any::<u64>()) {
        let p = preset(name).unwrap();
        let s = &p.solver;
        let al = &p.presentation.alphabet;
        let split = (seed as usize) % (u.len() + 1);
        let (x, y) = u.0.split_at(split);
        prop_assert_eq!(s.eval(&u), s.multiply(&s.eval(x), &s.eval(y)));
        prop_assert!(s.is_identity_word(&u.concat(&al.invert(&u))));
        prop_assert_eq!(s.inverse(&s.eval(&u)), s.eval(&al.invert(&u)));
        prop_assert_eq!(s.eval(&u), s.eval(&al.free_reduce(&u)));
        if let Some(nf) = s.word_of(&s.eval(&u)) {
            prop_assert_eq!(s.eval(&nf), s.eval(&u));
        }
    }

    #[test]
    fn britton_agrees_with_normal_forms(
        name in prop::sample::select(vec!["wise", "gersten", "bridson"]),
        seed in any::<u64>(),
        w in word(12, 10),
    ) {
        let p = preset(name).unwrap();
        let h = p.hnn.clone().unwrap();
        let al = &p.presentation.alphabet;
        // Half the cases are loops w w^-1 conjugated by a letter.
        let w = if seed % 2 == 0 {
            let c = Letter((seed / 2 % al.len() as u64) as u8);
            Word(vec![c]).concat(&w).concat(&al.invert(&w)).concat(&[al.inv(c)])
        } else {
            w
        };
        // Britton's lemma: trivial iff no stable letters survive and the
        // base remainder is trivial.
        let r = britton_reduce(h.as_ref(), &w).unwrap();
        let trivial = p.presentation.hnn().unwrap().base_word(&r).is_some_and(|b| h.base_solver().is_identity_word(&b));
        prop_assert_eq!(trivial, p.solver.is_identity_word(&w), "{}", al.show(&w));
    }
}
