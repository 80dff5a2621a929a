use std::fmt;

use super::codec::{get_bytes, put_bytes};
use super::{GroupBackend, KeyBytes, SolverError};
use crate::presentation::{Alphabet, BackendKind, Letter, ProductSpec, Word};

/// An element of a product of free groups, one reduced code word per
/// factor (basis symbol `i` is coded `2i`, its inverse `2i + 1`).
pub type Parts = Vec<Vec<u8>>;

fn push_reduced(out: &mut Vec<u8>, c: u8) {
    if out.last() == Some(&(c ^ 1)) {
        out.pop();
    } else {
        out.push(c);
    }
}

/// Direct product of free groups, e.g. `(F_2)^3` as the target of the
/// Stallings representation.
#[derive(Clone, Debug)]
pub struct ProductOfFree {
    alphabet: Alphabet,
    factors: Vec<Vec<char>>,
    images: Vec<Parts>,
}

impl ProductOfFree {
    pub fn new(alphabet: Alphabet, spec: &ProductSpec) -> Result<Self, SolverError> {
        let factors = spec.factors.clone();
        let mut images: Vec<Option<Parts>> = vec![None; alphabet.len()];
        for (l, comps) in &spec.map {
            if comps.len() != factors.len() {
                return Err(SolverError::Invalid(format!("image of {} has wrong arity", alphabet.name(*l))));
            }
            let mut parts = Vec::with_capacity(factors.len());
            for (c, basis) in comps.iter().zip(&factors) {
                let mut out = Vec::new();
                for ch in c.chars() {
                    let i = basis
                        .iter()
                        .position(|b| *b == ch.to_ascii_lowercase())
                        .ok_or_else(|| SolverError::Invalid(format!("symbol {ch:?} outside its factor")))?;
                    push_reduced(&mut out, (2 * i) as u8 | ch.is_uppercase() as u8);
                }
                parts.push(out);
            }
            let inv = invert_parts(&parts);
            images[l.index()] = Some(parts);
            images[alphabet.inv(*l).index()] = Some(inv);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| im.ok_or_else(|| SolverError::Invalid(format!("letter {} has no image", alphabet.names()[i]))))
            .collect::<Result<_, _>>()?;
        Ok(ProductOfFree { alphabet, factors, images })
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Componentwise reduced image of a word, in readable form.
    pub fn triple(&self, w: &[Letter]) -> Triple {
        self.spell(&self.eval(w))
    }

    pub fn spell(&self, e: &Parts) -> Triple {
        Triple(
            e.iter()
                .zip(&self.factors)
                .map(|(p, basis)| {
                    p.iter()
                        .map(|&c| {
                            let ch = basis[(c >> 1) as usize];
                            if c & 1 == 1 {
                                ch.to_ascii_uppercase()
                            } else {
                                ch
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// Parses one string per factor (same symbol convention as the spec file).
    pub fn parts_of(&self, comps: &[&str]) -> Result<Parts, SolverError> {
        if comps.len() != self.factors.len() {
            return Err(SolverError::Invalid("wrong number of components".into()));
        }
        comps
            .iter()
            .zip(&self.factors)
            .map(|(c, basis)| {
                let mut out = Vec::new();
                for ch in c.chars() {
                    let i = basis
                        .iter()
                        .position(|b| *b == ch.to_ascii_lowercase())
                        .ok_or_else(|| SolverError::Invalid(format!("symbol {ch:?} outside its factor")))?;
                    push_reduced(&mut out, (2 * i) as u8 | ch.is_uppercase() as u8);
                }
                Ok(out)
            })
            .collect()
    }

    /// Image of a single letter.
    pub fn letter_image(&self, l: Letter) -> &Parts {
        &self.images[l.index()]
    }
}

fn invert_parts(p: &Parts) -> Parts {
    p.iter().map(|w| w.iter().rev().map(|c| c ^ 1).collect()).collect()
}

/// Componentwise reduced words, one per factor; `1` marks the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple(pub Vec<String>);

impl Triple {
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(String::is_empty)
    }

    pub fn total_len(&self) -> usize {
        self.0.iter().map(String::len).sum()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|s| if s.is_empty() { "1" } else { s.as_str() }).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl GroupBackend for ProductOfFree {
    type Elem = Parts;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn kind(&self) -> BackendKind {
        BackendKind::DirectProductFree
    }
    fn identity(&self) -> Parts {
        vec![Vec::new(); self.factors.len()]
    }
    fn mul_letter(&self, e: &mut Parts, x: Letter) {
        for (p, img) in e.iter_mut().zip(&self.images[x.index()]) {
            for &c in img {
                push_reduced(p, c);
            }
        }
    }
    fn multiply(&self, a: &Parts, b: &Parts) -> Parts {
        let mut out = a.clone();
        for (p, q) in out.iter_mut().zip(b) {
            for &c in q {
                push_reduced(p, c);
            }
        }
        out
    }
    fn inverse(&self, a: &Parts) -> Parts {
        invert_parts(a)
    }
    fn encode(&self, e: &Parts, out: &mut KeyBytes) {
        for p in e {
            put_bytes(out, p);
        }
    }
    fn decode(&self, b: &[u8], pos: &mut usize) -> Parts {
        (0..self.factors.len()).map(|_| get_bytes(b, pos).to_vec()).collect()
    }
    fn word_of(&self, _e: &Parts) -> Option<Word> {
        // Spelling an element of the image needs a search; callers use
        // ball parents instead.
        None
    }
    fn describe(&self, e: &Parts) -> String {
        self.spell(e).to_string()
    }
}
