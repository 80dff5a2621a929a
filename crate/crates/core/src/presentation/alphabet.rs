use std::fmt;

use super::{PresentationError, Word};

/// Index of a letter inside its [`Alphabet`]. The index order is the
/// shortlex order used everywhere for tie-breaking.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An involutive alphabet: every letter has a distinct formal inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
    inv: Vec<Letter>,
    /// `true` for the left-hand side of each declared `x=X` pair.
    positive: Vec<bool>,
}

/// Formal inverse of a letter name under the case convention:
/// reverse the symbols and swap their case, so `a -> A` and `aC -> cA`.
pub fn formal_inverse(name: &str) -> String {
    name.chars()
        .rev()
        .map(|c| {
            if c.is_lowercase() {
                c.to_uppercase().next().unwrap_or(c)
            } else {
                c.to_lowercase().next().unwrap_or(c)
            }
        })
        .collect()
}

impl Alphabet {
    /// Builds an alphabet from the ordered letter list and explicit
    /// `(generator, inverse)` pairs.
    pub fn new(names: Vec<String>, pairs: &[(String, String)]) -> Result<Self, PresentationError> {
        if names.len() > 255 {
            return Err(PresentationError::Invalid(format!(
                "alphabet has {} letters, at most 255 supported",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || "()=,#".contains(c)) {
                return Err(PresentationError::Invalid(format!("bad letter name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(PresentationError::DuplicateLetter(n.clone()));
            }
        }
        let find = |s: &str| names.iter().position(|n| n == s);
        let mut inv: Vec<Option<Letter>> = vec![None; names.len()];
        let mut positive = vec![false; names.len()];
        for (x, y) in pairs {
            let xi = find(x).ok_or_else(|| PresentationError::UnknownLetter(x.clone()))?;
            let yi = find(y).ok_or_else(|| PresentationError::UnknownLetter(y.clone()))?;
            if xi == yi {
                return Err(PresentationError::Invalid(format!("letter {x} declared self-inverse")));
            }
            if inv[xi].is_some() || inv[yi].is_some() {
                return Err(PresentationError::Invalid(format!("inverse of {x} or {y} declared twice")));
            }
            inv[xi] = Some(Letter(yi as u8));
            inv[yi] = Some(Letter(xi as u8));
            positive[xi] = true;
        }
        let inv = inv
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| PresentationError::Invalid(format!("letter {} has no inverse", names[i]))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Alphabet { names, inv, positive })
    }

    /// Alphabet for the given generator names, with inverses formed by
    /// [`formal_inverse`] and listed right after each generator.
    pub fn from_generators(gens: &[&str]) -> Result<Self, PresentationError> {
        let mut names = Vec::new();
        let mut pairs = Vec::new();
        for g in gens {
            let gi = formal_inverse(g);
            names.push(g.to_string());
            names.push(gi.clone());
            pairs.push((g.to_string(), gi));
        }
        Alphabet::new(names, &pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| Letter(i as u8))
    }

    /// The generator side of every inverse pair, in declaration order.
    pub fn generators(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters().filter(|l| self.positive[l.index()])
    }

    pub fn is_positive(&self, l: Letter) -> bool {
        self.positive[l.index()]
    }

    #[inline]
    pub fn inv(&self, l: Letter) -> Letter {
        self.inv[l.index()]
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| Letter(i as u8))
    }

    /// Parses a word by greedy longest match against the letter names.
    /// Whitespace is ignored and `1` denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "1" {
            return Ok(Word::empty());
        }
        let mut out = Vec::new();
        let mut rest = text.as_str();
        while !rest.is_empty() {
            let best = self
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            match best {
                Some((i, n)) => {
                    out.push(Letter(i as u8));
                    rest = &rest[n.len()..];
                }
                None => return Err(PresentationError::UnknownLetter(rest.to_string())),
            }
        }
        Ok(Word(out))
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return String::new();
        }
        w.iter().map(|&l| self.name(l)).collect()
    }

    /// Reverses `w` and replaces each letter by its inverse.
    pub fn invert(&self, w: &[Letter]) -> Word {
        Word(w.iter().rev().map(|&l| self.inv(l)).collect())
    }

    /// Cancels adjacent `x inv(x)` pairs until none remain.
    pub fn free_reduce(&self, w: &[Letter]) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &l in w {
            if out.last().is_some_and(|&p| self.inv(p) == l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self, w: &[Letter]) -> bool {
        w.windows(2).all(|p| self.inv(p[0]) != p[1])
    }

    /// Displays a word with this alphabet's letter names.
    pub fn show<'a>(&'a self, w: &'a [Letter]) -> ShowWord<'a> {
        ShowWord { alphabet: self, word: w }
    }
}

pub struct ShowWord<'a> {
    alphabet: &'a Alphabet,
    word: &'a [Letter],
}

impl fmt::Display for ShowWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for &l in self.word {
            f.write_str(self.alphabet.name(l))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_generators(&["a", "b", "c"]).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        let al = ab();
        let r = |s: &str| al.format_word(&al.free_reduce(&al.parse_word(s).unwrap()));
        assert_eq!(r("aA"), "");
        assert_eq!(r("abBA"), "");
        assert_eq!(r("abBc"), "ac");
    }

    #[test]
    fn invert_examples() {
        let al = ab();
        let w = al.parse_word("ab").unwrap();
        assert_eq!(al.format_word(&al.invert(&w)), "BA");
        assert!(al.invert(&Word::empty()).is_empty());
    }

    #[test]
    fn two_symbol_letters_tokenize() {
        let al = Alphabet::from_generators(&["aC", "cE", "eA"]).unwrap();
        assert_eq!(al.name(al.inv(al.letter("aC").unwrap())), "cA");
        let w = al.parse_word("aCcEeA").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(al.format_word(&al.invert(&w)), "aEeCcA");
    }

    #[test]
    fn rejects_duplicates_and_self_inverse() {
        let names = vec!["a".to_string(), "a".to_string()];
        assert!(matches!(Alphabet::new(names, &[]), Err(PresentationError::DuplicateLetter(_))));
        let names = vec!["a".to_string(), "A".to_string()];
        assert!(Alphabet::new(names, &[("a".into(), "a".into())]).is_err());
    }

    #[test]
    fn unknown_letter_in_word() {
        assert!(matches!(ab().parse_word("ax"), Err(PresentationError::UnknownLetter(_))));
    }
}
