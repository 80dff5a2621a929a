use super::preset_text;
use crate::presentation::{parse_presentation, Alphabet, Word};

fn alphabet(name: &str) -> Alphabet {
    let text = preset_text(name).expect("built-in preset");
    parse_presentation(&text).expect("built-in preset parses").alphabet
}

fn spell(al: &Alphabet, parts: &[(&str, usize)]) -> Word {
    let mut out = Word::empty();
    for &(s, n) in parts {
        let w = al.parse_word(s).expect("built-in letters");
        out = out.concat(&w.power(n));
    }
    out
}

/// `d^n s t^-1 c^n d^n t s^-1 c^-n d^-n s t^-1 c^-n d^-n t s^-1 c^n` over
/// the Gersten preset's alphabet; a loop of length `8n + 8`.
///
/// The stable pairs alternate between `s t^-1` and `t s^-1`: with four
/// copies of `s t^-1` the exponent sum of `s` would be 4, and `s` survives
/// in the abelianization, so that word is not a loop (see
/// [`gersten_word_as_printed`]).
pub fn gersten_loop(n: usize) -> Word {
    let al = alphabet("gersten");
    spell(
        &al,
        &[
            ("d", n),
            ("sT", 1),
            ("c", n),
            ("d", n),
            ("tS", 1),
            ("C", n),
            ("D", n),
            ("sT", 1),
            ("C", n),
            ("D", n),
            ("tS", 1),
            ("c", n),
        ],
    )
}

/// The same shape with `s t^-1` in all four places. Not the identity.
pub fn gersten_word_as_printed(n: usize) -> Word {
    let al = alphabet("gersten");
    spell(
        &al,
        &[
            ("d", n),
            ("sT", 1),
            ("c", n),
            ("d", n),
            ("sT", 1),
            ("C", n),
            ("D", n),
            ("sT", 1),
            ("C", n),
            ("D", n),
            ("sT", 1),
            ("c", n),
        ],
    )
}

/// `(fA)^n (dE)^n (aC)^(n-1)` over the Stallings alphabet.
pub fn stallings_alpha(n: usize) -> Word {
    let al = alphabet("stallings");
    spell(&al, &[("fA", n), ("dE", n), ("aC", n.saturating_sub(1))])
}

/// `(fB)^n (dE)^n (bC)^(n-1)` over the Stallings alphabet.
pub fn stallings_beta(n: usize) -> Word {
    let al = alphabet("stallings");
    spell(&al, &[("fB", n), ("dE", n), ("bC", n.saturating_sub(1))])
}

/// `aC cB`, joining the endpoints of alpha and beta.
pub fn stallings_gamma() -> Word {
    let al = alphabet("stallings");
    spell(&al, &[("aCcB", 1)])
}
