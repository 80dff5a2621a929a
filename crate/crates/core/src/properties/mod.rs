//! Finite-radius checkers for the fellow traveler properties, almost
//! convexity and quadratic filling.
//!
//! Every verdict is relative to its parameters: "holds up to bound" means
//! the exhaustive search at these constants found nothing, never that the
//! group has the property.

mod ac;
mod engine;
mod fill;

pub use ac::{blsp_to_ac_path, check_ac, check_ac_pairs, AcConnector};
pub use engine::{Budget, Frame};
pub use fill::{fill, fill_sweep, FillStep, FillSweep, FillingCertificate};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cayley::CayleyError;
use crate::presentation::{Alphabet, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropertyError {
    #[error("search budget of {limit} steps exceeded")]
    Budget { limit: u64 },
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error("word {0} is not a loop")]
    NotALoop(String),
    #[error("no shorter loop fellow travels {word} at k = {k}")]
    Stuck { word: String, k: usize },
    #[error("{0}")]
    Unavailable(String),
    #[error("{0}")]
    Invalid(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Fftp,
    Lsp,
    Blsp,
    AlmostConvex,
    StripEquidistant,
    TotallyGeodesic,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Fftp => "fftp",
            Property::Lsp => "lsp",
            Property::Blsp => "blsp",
            Property::AlmostConvex => "almost-convex",
            Property::StripEquidistant => "strip-equidistant",
            Property::TotallyGeodesic => "totally-geodesic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    HoldsUpToBound,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub role: String,
    pub word: String,
    #[serde(skip)]
    pub letters: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct Witness {
    pub entries: Vec<WitnessEntry>,
    pub detail: String,
}

impl Witness {
    pub fn new(detail: impl Into<String>) -> Self {
        Witness { entries: Vec::new(), detail: detail.into() }
    }

    pub fn with(mut self, al: &Alphabet, role: &str, w: &[Letter]) -> Self {
        self.entries.push(WitnessEntry { role: role.into(), word: al.format_word(w), letters: Word::from_letters(w) });
        self
    }

    pub fn word(&self, role: &str) -> Option<&Word> {
        self.entries.iter().find(|e| e.role == role).map(|e| &e.letters)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub struct SearchStats {
    /// Words, loops or pairs examined.
    pub checked: u64,
    /// Inner search steps.
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: Property,
    pub group: String,
    pub k: Option<usize>,
    pub c: Option<usize>,
    /// Length or radius bound of the enumeration.
    pub bound: usize,
    /// What was actually quantified over.
    pub quantifier: String,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub stats: SearchStats,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::HoldsUpToBound
    }

    pub fn for_group(mut self, name: &str) -> Self {
        self.group = name.to_string();
        self
    }
}

/// A shorter loop: `u` read from `w(0) * offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shortening {
    pub offset: Word,
    pub offset_index: usize,
    pub u: Word,
}

/// A loop `u` with `|u| < |w|` synchronously `k`-fellow traveling `w`, with
/// `u(0) = w(0)` if `basepoint`, else `u(0)` anywhere within `k` of it.
/// `None` is an exhaustive answer.
pub fn shorten_loop(frame: &Frame, w: &[Letter], basepoint: bool, budget: &mut Budget) -> Result<Option<Shortening>, PropertyError> {
    let solver = frame.solver();
    if !solver.is_identity_word(w) {
        return Err(PropertyError::NotALoop(solver.alphabet().format_word(w)));
    }
    if w.is_empty() {
        return Ok(None);
    }
    let starts = if basepoint { 1 } else { frame.offsets() };
    for sigma in 0..starts {
        if let Some(u) = frame.solve(w, sigma, sigma, w.len() - 1, budget)? {
            return Ok(Some(Shortening { offset: frame.offset_word(sigma), offset_index: sigma, u }));
        }
    }
    Ok(None)
}

/// Whether [`shorten_loop`] would succeed, for a word already known to be
/// a loop.
pub(crate) fn loop_shortens(frame: &Frame, w: &[Letter], basepoint: bool, budget: &mut Budget) -> Result<bool, PropertyError> {
    if w.is_empty() {
        return Ok(false);
    }
    let starts = if basepoint { 1 } else { frame.offsets() };
    for sigma in 0..starts {
        if frame.reachable(w, sigma, sigma, w.len() - 1, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A strictly shorter path with the same endpoints as `w` that
/// `k`-fellow travels it; `None` is exhaustive.
pub fn falsify(frame: &Frame, w: &[Letter], budget: &mut Budget) -> Result<Option<Word>, PropertyError> {
    if w.is_empty() {
        return Ok(None);
    }
    frame.solve(w, 0, 0, w.len() - 1, budget)
}

/// Which loops `check_lsp` quantifies over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoopFamily {
    /// Every loop up to the length bound.
    All,
    /// Only the listed loops (those within the bound).
    Listed { name: String, loops: Vec<Word> },
}

fn lsp_property(basepoint: bool) -> Property {
    if basepoint {
        Property::Blsp
    } else {
        Property::Lsp
    }
}

/// Runs the shortening search on every loop of length at most `max_len`
/// (or on a family). The counterexample is the shortlex-first failure.
pub fn check_lsp(
    frame: &Frame,
    max_len: usize,
    basepoint: bool,
    family: &LoopFamily,
    budget: &mut Budget,
) -> Result<Verdict, PropertyError> {
    let al = frame.solver().alphabet().clone();
    let mut stats = SearchStats::default();
    let mut failure = None;
    let quantifier;
    match family {
        LoopFamily::Listed { name, loops } => {
            quantifier = format!("loops of the {name} family of length <= {max_len}");
            let mut ls: Vec<&Word> = loops.iter().filter(|l| l.len() <= max_len).collect();
            ls.sort();
            for l in ls {
                stats.checked += 1;
                if shorten_loop(frame, l, basepoint, budget)?.is_none() {
                    failure = Some(l.clone());
                    break;
                }
            }
        }
        LoopFamily::All => {
            quantifier = format!("all loops of length <= {max_len}");
            if frame.ball().radius() < max_len / 2 {
                return Err(PropertyError::Invalid(format!(
                    "enumerating loops of length {max_len} needs a ball of radius {}",
                    max_len / 2
                )));
            }
            for len in 1..=max_len {
                let (found, s) = scan_loops(frame, len, basepoint, budget.limit.saturating_sub(budget.used))?;
                stats.checked += s.checked;
                budget.spend(s.steps)?;
                if let Some(l) = found {
                    failure = Some(l);
                    break;
                }
            }
        }
    }
    stats.steps = budget.used;
    let (outcome, witness) = match failure {
        Some(l) => (
            Outcome::Counterexample,
            Some(Witness::new(format!("no loop shorter than {} fellow travels it at k = {}", l.len(), frame.k())).with(
                &al,
                "loop",
                &l,
            )),
        ),
        None => (Outcome::HoldsUpToBound, None),
    };
    Ok(Verdict {
        property: lsp_property(basepoint),
        group: String::new(),
        k: Some(frame.k()),
        c: None,
        bound: max_len,
        quantifier,
        outcome,
        witness,
        stats,
    })
}

/// Depth-first enumeration of words of length exactly `len`, in
/// lexicographic order, pruned by `keep(depth, position)`. Calls `leaf`
/// on each surviving word; stops at the first `Some`.
pub(crate) fn scan_words<T: Send>(
    frame: &Frame,
    len: usize,
    keep: &(dyn Fn(usize, usize) -> bool + Sync),
    leaf: &(dyn Fn(&[Letter], usize, &mut SearchStats) -> Result<Option<T>, PropertyError> + Sync),
) -> Result<(Option<T>, SearchStats), PropertyError> {
    let ball = frame.ball();
    let letters: Vec<Letter> = frame.solver().alphabet().letters().collect();
    let results: Vec<Result<(Option<T>, SearchStats), PropertyError>> = letters
        .par_iter()
        .map(|&first| {
            let mut stats = SearchStats::default();
            let mut word = Vec::with_capacity(len);
            let mut pos = vec![0usize];
            // next[d]: next letter to try at depth d.
            let mut next = vec![0usize; len + 1];
            if len == 0 {
                return Ok((None, stats));
            }
            let Some(p) = ball.neighbor(0, first) else { return Ok((None, stats)) };
            if !keep(1, p) {
                return Ok((None, stats));
            }
            word.push(first);
            pos.push(p);
            loop {
                let d = word.len();
                if d == len {
                    if let Some(x) = leaf(&word, pos[d], &mut stats)? {
                        return Ok((Some(x), stats));
                    }
                } else if next[d] < letters.len() {
                    let x = letters[next[d]];
                    next[d] += 1;
                    if let Some(p) = ball.neighbor(pos[d], x) {
                        if keep(d + 1, p) {
                            word.push(x);
                            pos.push(p);
                            next[d + 1] = 0;
                        }
                    }
                    continue;
                }
                // Backtrack.
                if d == 1 {
                    return Ok((None, stats));
                }
                word.pop();
                pos.pop();
            }
        })
        .collect();
    let mut total = SearchStats::default();
    for r in results {
        let (found, s) = r?;
        total.checked += s.checked;
        total.steps += s.steps;
        if found.is_some() {
            return Ok((found, total));
        }
    }
    Ok((None, total))
}

fn scan_loops(frame: &Frame, len: usize, basepoint: bool, limit: u64) -> Result<(Option<Word>, SearchStats), PropertyError> {
    let ball = frame.ball();
    let keep = move |d: usize, p: usize| ball.dist_at(p) <= len - d;
    let leaf = move |w: &[Letter], p: usize, stats: &mut SearchStats| -> Result<Option<Word>, PropertyError> {
        if p != 0 {
            return Ok(None);
        }
        stats.checked += 1;
        let mut b = Budget::new(limit);
        let r = loop_shortens(frame, w, basepoint, &mut b)?;
        stats.steps += b.used;
        Ok((!r).then(|| Word::from_letters(w)))
    };
    scan_words(frame, len, &keep, &leaf)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FftpMode {
    /// Every non-geodesic word.
    AllWords,
    /// Only non-geodesic words `v x` with `v` geodesic.
    GeodesicPrefix,
}

/// For every non-geodesic word of length at most `max_len`, searches for a
/// shorter path with the same endpoints that `k`-fellow travels it.
pub fn check_fftp(frame: &Frame, max_len: usize, mode: FftpMode, budget: &mut Budget) -> Result<Verdict, PropertyError> {
    if frame.ball().radius() < max_len {
        return Err(PropertyError::Invalid(format!("words of length {max_len} need a ball of that radius")));
    }
    let al = frame.solver().alphabet().clone();
    let mut stats = SearchStats::default();
    let mut failure = None;
    for len in 1..=max_len {
        let (found, s) = scan_fftp(frame, len, mode, budget.limit.saturating_sub(budget.used))?;
        stats.checked += s.checked;
        budget.spend(s.steps)?;
        if let Some(w) = found {
            failure = Some(w);
            break;
        }
    }
    stats.steps = budget.used;
    let quantifier = match mode {
        FftpMode::AllWords => format!("all non-geodesic words of length <= {max_len}"),
        FftpMode::GeodesicPrefix => {
            format!("non-geodesic words v x of length <= {max_len} with v geodesic (narrower than the property)")
        }
    };
    let (outcome, witness) = match failure {
        Some(w) => (
            Outcome::Counterexample,
            Some(
                Witness::new(format!("no shorter path with the same endpoints fellow travels it at k = {}", frame.k()))
                    .with(&al, "word", &w),
            ),
        ),
        None => (Outcome::HoldsUpToBound, None),
    };
    Ok(Verdict {
        property: Property::Fftp,
        group: String::new(),
        k: Some(frame.k()),
        c: None,
        bound: max_len,
        quantifier,
        outcome,
        witness,
        stats,
    })
}

/// Words of one length, sharing the forward offset layers along the
/// enumeration: layer `t` only depends on `w[..t]`.
fn scan_fftp(frame: &Frame, len: usize, mode: FftpMode, limit: u64) -> Result<(Option<Word>, SearchStats), PropertyError> {
    let ball = frame.ball();
    let letters: Vec<Letter> = frame.solver().alphabet().letters().collect();
    let results: Vec<Result<(Option<Word>, SearchStats), PropertyError>> = letters
        .par_iter()
        .map(|&first| {
            let mut stats = SearchStats::default();
            let mut budget = Budget::new(limit);
            let mut word = vec![first];
            let mut pos = vec![0usize, ball.neighbor(0, first).expect("radius >= 1")];
            let mut layers: Vec<engine::Bits> = vec![frame.singleton(0)];
            let mut next = vec![0usize; len + 1];
            loop {
                let d = word.len();
                if d == len {
                    if ball.dist_at(pos[d]) < d {
                        stats.checked += 1;
                        if !fftp_leaf(frame, &word, &layers) {
                            stats.steps = budget.used;
                            return Ok((Some(Word(word)), stats));
                        }
                    }
                } else if next[d] < letters.len() {
                    let geodesic_prefix = ball.dist_at(pos[d]) == d;
                    if mode == FftpMode::GeodesicPrefix && !geodesic_prefix {
                        next[d] = letters.len();
                        continue;
                    }
                    let x = letters[next[d]];
                    next[d] += 1;
                    if next[d] == 1 {
                        // First child: extend the layers by w[d - 1].
                        let mut nb = frame.empty_bits();
                        frame.advance(&layers[d - 1], word[d - 1], &mut nb, &mut budget)?;
                        layers.push(nb);
                    }
                    let p = ball.neighbor(pos[d], x).expect("inside the ball");
                    word.push(x);
                    pos.push(p);
                    next[d + 1] = 0;
                    continue;
                }
                if d == 1 {
                    stats.steps = budget.used;
                    return Ok((None, stats));
                }
                word.pop();
                pos.pop();
                // Leaving depth d: drop the layer that was built for its children.
                if layers.len() > d {
                    layers.truncate(d);
                }
            }
        })
        .collect();
    let mut total = SearchStats::default();
    for r in results {
        let (found, s) = r?;
        total.checked += s.checked;
        total.steps += s.steps;
        if found.is_some() {
            return Ok((found, total));
        }
    }
    Ok((None, total))
}

/// Whether some `m < |w|` has the endpoint offset in layer `m` and stays
/// within `k` of `w`'s tail.
fn fftp_leaf(frame: &Frame, w: &[Letter], layers: &[engine::Bits]) -> bool {
    let beta = frame.tail(w, 0);
    (0..w.len()).any(|m| layers.get(m).is_some_and(|l| beta[m].is_some_and(|b| Frame::contains(l, b))))
}

#[cfg(test)]
mod tests;
