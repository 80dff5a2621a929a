//! Word problem solvers: canonical element keys for free, free abelian,
//! direct-product-of-free and multiple HNN extension groups.

mod abelian;
mod britton;
pub(crate) mod codec;
mod free;
mod hnn;
pub mod product;

pub use abelian::{cyclic_membership_lattice, FreeAbelian};
pub use britton::{britton_reduce, find_pinch, Pinch};
pub use free::{cyclic_membership_free, CyclicFreeOracle, FreeGroup};
pub use hnn::{HnnGroup, Membership, Side};
pub use product::{ProductOfFree, Triple};

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::presentation::{Alphabet, BackendKind, BackendSpec, HnnStructure, Letter, Presentation, Word};

pub type KeyBytes = SmallVec<[u8; 24]>;

/// Canonical identifier of a group element: a backend tag byte followed
/// by the encoded normal form. Two words evaluate to equal elements iff
/// their keys are byte-equal (within one solver instance).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey(pub KeyBytes);

impl ElementKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn from_bytes(b: &[u8]) -> Self {
        ElementKey(KeyBytes::from_slice(b))
    }
}

impl fmt::Debug for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key(")?;
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("letter {0} outside the solver alphabet")]
    LetterOutsideAlphabet(u8),
    #[error("bad subgroup configuration: {0}")]
    Subgroup(String),
    #[error("unsupported backend combination: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Invalid(String),
}

/// A group given by typed normal forms. Implementations keep elements
/// canonical after every operation.
pub trait GroupBackend: Clone + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn alphabet(&self) -> &Alphabet;
    fn kind(&self) -> BackendKind;
    fn identity(&self) -> Self::Elem;
    fn mul_letter(&self, e: &mut Self::Elem, x: Letter);
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    /// Self-delimiting canonical encoding.
    fn encode(&self, e: &Self::Elem, out: &mut KeyBytes);
    fn decode(&self, b: &[u8], pos: &mut usize) -> Self::Elem;
    /// A word over the alphabet evaluating to `e`, if the backend can spell one.
    fn word_of(&self, e: &Self::Elem) -> Option<Word>;
    fn describe(&self, e: &Self::Elem) -> String;

    fn pow(&self, g: &Self::Elem, m: i64) -> Self::Elem {
        let base = if m < 0 { self.inverse(g) } else { g.clone() };
        let mut out = self.identity();
        for _ in 0..m.unsigned_abs() {
            out = self.multiply(&out, &base);
        }
        out
    }

    /// `Some(m)` with `e = g^m`, when the backend supports cyclic subgroups.
    fn cyclic_exponent(&self, _e: &Self::Elem, _g: &Self::Elem) -> Option<i64> {
        None
    }

    /// Canonical representative `r` of the left coset `e<g>` and the `m`
    /// with `e = r g^m`. The representative of `<g>` itself is the identity.
    fn cyclic_coset(&self, _e: &Self::Elem, _g: &Self::Elem) -> Option<(Self::Elem, i64)> {
        None
    }

    /// Rejects generators the cyclic oracle cannot handle exactly.
    fn check_cyclic_generator(&self, _g: &Self::Elem) -> Result<(), SolverError> {
        Err(SolverError::Unsupported(format!("{:?} base has no cyclic subgroup oracle", self.kind())))
    }

    fn eval(&self, w: &[Letter]) -> Self::Elem {
        let mut e = self.identity();
        for &x in w {
            self.mul_letter(&mut e, x);
        }
        e
    }
}

/// Key-level view of a solver, shared by every metric and property module.
pub trait WordProblem: Send + Sync {
    fn alphabet(&self) -> &Alphabet;
    fn kind(&self) -> BackendKind;
    fn identity(&self) -> ElementKey;
    fn mul_letter(&self, k: &ElementKey, x: Letter) -> ElementKey;
    fn mul_word(&self, k: &ElementKey, w: &[Letter]) -> ElementKey;
    fn multiply(&self, a: &ElementKey, b: &ElementKey) -> ElementKey;
    fn inverse(&self, a: &ElementKey) -> ElementKey;
    fn word_of(&self, a: &ElementKey) -> Option<Word>;
    fn describe(&self, a: &ElementKey) -> String;
    /// All `k x` for letters `x` in alphabet order, appended to `out`.
    fn neighbors(&self, k: &ElementKey, out: &mut Vec<ElementKey>);

    fn eval(&self, w: &[Letter]) -> ElementKey {
        self.mul_word(&self.identity(), w)
    }

    fn is_identity_word(&self, w: &[Letter]) -> bool {
        self.eval(w) == self.identity()
    }

    /// `a^-1 b`, the displacement from `a` to `b`.
    fn between(&self, a: &ElementKey, b: &ElementKey) -> ElementKey {
        self.multiply(&self.inverse(a), b)
    }

    /// Checks that every letter belongs to the alphabet before evaluating.
    fn try_eval(&self, w: &[Letter]) -> Result<ElementKey, SolverError> {
        if let Some(bad) = w.iter().find(|l| l.index() >= self.alphabet().len()) {
            return Err(SolverError::LetterOutsideAlphabet(bad.0));
        }
        Ok(self.eval(w))
    }
}

pub type Solver = Arc<dyn WordProblem>;

/// Adapts a typed backend to the key-level interface.
#[derive(Clone)]
pub struct Keyed<G: GroupBackend>(pub G);

impl<G: GroupBackend> Keyed<G> {
    pub fn to_key(&self, e: &G::Elem) -> ElementKey {
        let mut out = KeyBytes::new();
        out.push(self.0.kind() as u8);
        self.0.encode(e, &mut out);
        ElementKey(out)
    }

    pub fn from_key(&self, k: &ElementKey) -> G::Elem {
        let mut pos = 1;
        self.0.decode(&k.0, &mut pos)
    }
}

impl<G: GroupBackend> WordProblem for Keyed<G> {
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn kind(&self) -> BackendKind {
        self.0.kind()
    }
    fn identity(&self) -> ElementKey {
        self.to_key(&self.0.identity())
    }
    fn mul_letter(&self, k: &ElementKey, x: Letter) -> ElementKey {
        let mut e = self.from_key(k);
        self.0.mul_letter(&mut e, x);
        self.to_key(&e)
    }
    fn mul_word(&self, k: &ElementKey, w: &[Letter]) -> ElementKey {
        let mut e = self.from_key(k);
        for &x in w {
            self.0.mul_letter(&mut e, x);
        }
        self.to_key(&e)
    }
    fn multiply(&self, a: &ElementKey, b: &ElementKey) -> ElementKey {
        self.to_key(&self.0.multiply(&self.from_key(a), &self.from_key(b)))
    }
    fn inverse(&self, a: &ElementKey) -> ElementKey {
        self.to_key(&self.0.inverse(&self.from_key(a)))
    }
    fn word_of(&self, a: &ElementKey) -> Option<Word> {
        self.0.word_of(&self.from_key(a))
    }
    fn describe(&self, a: &ElementKey) -> String {
        self.0.describe(&self.from_key(a))
    }
    fn neighbors(&self, k: &ElementKey, out: &mut Vec<ElementKey>) {
        let e = self.from_key(k);
        for x in self.0.alphabet().letters() {
            let mut f = e.clone();
            self.0.mul_letter(&mut f, x);
            out.push(self.to_key(&f));
        }
    }
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Free => "free",
            BackendKind::FreeAbelian => "free-abelian",
            BackendKind::DirectProductFree => "direct-product-free",
            BackendKind::Hnn => "hnn",
        }
    }
}

/// Operations specific to multiple HNN extensions.
pub trait HnnOps: WordProblem {
    fn structure(&self) -> &HnnStructure;
    /// Solver for the base group over the base alphabet.
    fn base_solver(&self) -> Solver;
    /// Membership of a base word in `U_i` (side `U`) or `V_i` (side `V`).
    fn membership(&self, stable: usize, side: Side, base_word: &[Letter]) -> Membership;
    /// A base word for `phi_i(u)` (side `U`) or `phi_i^-1(v)` (side `V`);
    /// `None` when the word is not in that subgroup.
    fn image_word(&self, stable: usize, side: Side, base_word: &[Letter]) -> Option<Word>;
    /// `Some(m)` when `key` is the base element `x^m` for the base word `x`.
    fn base_cyclic_exponent(&self, key: &ElementKey, base_word: &[Letter]) -> Option<i64>;
}

pub type HnnSolver = Arc<dyn HnnOps>;

/// Builds the solver for a presentation.
pub fn build_solver(p: &Presentation) -> Result<Solver, SolverError> {
    Ok(match &p.backend {
        BackendSpec::Free(spec) => Arc::new(Keyed(FreeGroup::new(p.alphabet.clone(), spec)?)),
        BackendSpec::FreeAbelian(spec) => Arc::new(Keyed(FreeAbelian::new(p.alphabet.clone(), spec)?)),
        BackendSpec::DirectProductFree(spec) => Arc::new(Keyed(ProductOfFree::new(p.alphabet.clone(), spec)?)),
        BackendSpec::Hnn(_) => {
            let h: Arc<dyn HnnOps> = build_hnn_solver(p)?;
            h
        }
    })
}

/// Builds the HNN solver; errors when the presentation is not an HNN extension.
pub fn build_hnn_solver(p: &Presentation) -> Result<HnnSolver, SolverError> {
    let h = p
        .hnn()
        .ok_or_else(|| SolverError::Invalid(format!("{} is not an HNN presentation", p.name)))?;
    let al = p.alphabet.clone();
    Ok(match &h.base.backend {
        BackendSpec::Free(spec) => {
            let base = FreeGroup::new(h.base.alphabet.clone(), spec)?;
            Arc::new(Keyed(HnnGroup::new(al, h.clone(), base)?))
        }
        BackendSpec::FreeAbelian(spec) => {
            let base = FreeAbelian::new(h.base.alphabet.clone(), spec)?;
            Arc::new(Keyed(HnnGroup::new(al, h.clone(), base)?))
        }
        other => {
            return Err(SolverError::Unsupported(format!(
                "HNN extension over a {} base",
                other.kind().name()
            )))
        }
    })
}
