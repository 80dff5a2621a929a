//! Alphabets, words, finite presentations and HNN structure descriptions.

mod alphabet;
mod text;
mod word;

pub use alphabet::{formal_inverse, Alphabet, Letter, ShowWord};
pub use text::parse_presentation;
pub use word::{shortlex_cmp, Word};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("duplicate letter {0:?}")]
    DuplicateLetter(String),
    #[error("unknown letter in {0:?}")]
    UnknownLetter(String),
    #[error("stable letter {0:?} collides with a base letter")]
    StableCollision(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

/// Which solver family a presentation is evaluated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Free,
    FreeAbelian,
    DirectProductFree,
    Hnn,
}

/// Free group backend. Generators without a `map` entry form the free
/// basis; mapped generators are abbreviations for basis words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreeSpec {
    pub map: Vec<(Letter, Word)>,
}

/// Free abelian group `Z^dim`; each generator is sent to a vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSpec {
    pub dim: usize,
    pub map: Vec<(Letter, Vec<i64>)>,
}

/// Direct product of free groups. Each factor is named by its basis
/// symbols (lowercase; uppercase is the inverse) and each generator is
/// sent to one word per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec {
    pub factors: Vec<Vec<char>>,
    pub map: Vec<(Letter, Vec<String>)>,
}

/// How membership in an associated subgroup is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// Cyclic subgroup generated by the single pair's source word.
    Cyclic,
    /// The whole base group; the pairs give the automorphism on generators.
    Full,
}

/// One stable letter `s` with relations `s^-1 u s = v` for each pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableLetter {
    /// The stable letter in the full alphabet.
    pub letter: Letter,
    /// `(u, v)` words over the base alphabet, meaning `phi(u) = v`.
    pub pairs: Vec<(Word, Word)>,
    pub oracle: OracleKind,
}

/// A multiple HNN extension of a base presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnnStructure {
    pub base: Box<Presentation>,
    pub stable: Vec<StableLetter>,
    /// Full-alphabet letter to base-alphabet letter (`None` for stable letters).
    pub to_base: Vec<Option<Letter>>,
    /// Base-alphabet letter to full-alphabet letter.
    pub from_base: Vec<Letter>,
}

impl HnnStructure {
    /// Index of the stable letter owning `l` and the sign of `l`
    /// (`+1` for the declared letter, `-1` for its inverse).
    pub fn stable_index(&self, alphabet: &Alphabet, l: Letter) -> Option<(usize, i8)> {
        self.stable.iter().enumerate().find_map(|(i, s)| {
            if s.letter == l {
                Some((i, 1))
            } else if alphabet.inv(s.letter) == l {
                Some((i, -1))
            } else {
                None
            }
        })
    }

    pub fn is_stable(&self, l: Letter) -> bool {
        self.to_base[l.index()].is_none()
    }

    /// Maps a word with no stable letters into the base alphabet.
    pub fn base_word(&self, w: &[Letter]) -> Option<Word> {
        w.iter().map(|l| self.to_base[l.index()]).collect::<Option<Vec<_>>>().map(Word)
    }

    pub fn lift_word(&self, w: &[Letter]) -> Word {
        w.iter().map(|l| self.from_base[l.index()]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendSpec {
    Free(FreeSpec),
    FreeAbelian(AbelianSpec),
    DirectProductFree(ProductSpec),
    Hnn(HnnStructure),
}

impl BackendSpec {
    pub fn kind(&self) -> BackendKind {
        match self {
            BackendSpec::Free(_) => BackendKind::Free,
            BackendSpec::FreeAbelian(_) => BackendKind::FreeAbelian,
            BackendSpec::DirectProductFree(_) => BackendKind::DirectProductFree,
            BackendSpec::Hnn(_) => BackendKind::Hnn,
        }
    }
}

/// A finite presentation `<X | R>` together with the backend used to
/// solve its word problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
    pub backend: BackendSpec,
}

impl Presentation {
    pub fn hnn(&self) -> Option<&HnnStructure> {
        match &self.backend {
            BackendSpec::Hnn(h) => Some(h),
            _ => None,
        }
    }

    /// Canonical text form; [`parse_presentation`] of the result yields
    /// an equal presentation.
    pub fn to_text(&self) -> String {
        text::serialize(self)
    }

    pub fn word(&self, s: &str) -> Result<Word, PresentationError> {
        self.alphabet.parse_word(s)
    }
}
