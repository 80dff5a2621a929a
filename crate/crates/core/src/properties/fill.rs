//! Quadratic filling by repeated loop shortening: the annulus between a
//! loop and its shortening is tiled by at most `|w_i|` rectangles of
//! perimeter at most `2k + 2`.

use serde::Serialize;
use smallvec::SmallVec;

use std::sync::atomic::{AtomicUsize, Ordering};

use super::{scan_words, shorten_loop, Budget, Frame, PropertyError, SearchStats};
use crate::fellow::{positions, sync_ft_from, Search};
use crate::presentation::{Alphabet, Letter, Word};
use crate::solver::WordProblem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillStep {
    /// The loop `w_i`, read from its own start.
    pub word: Word,
    /// Path from `w_i(0)` to `w_{i+1}(0)`.
    pub offset: Word,
    /// Non-degenerate rectangles between `w_i` and `w_{i+1}`.
    pub relators: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingCertificate {
    pub k: usize,
    /// `w_0 = w, w_1, ...`; the last step's successor is the empty loop.
    pub steps: Vec<FillStep>,
    pub total_relators: usize,
    pub max_relator_len: usize,
}

#[derive(Serialize)]
pub struct CertificateSummary {
    pub k: usize,
    pub loop_lengths: Vec<usize>,
    pub relators_per_step: Vec<usize>,
    pub total_relators: usize,
    pub area_bound: usize,
    pub max_relator_len: usize,
    pub relator_len_bound: usize,
    pub loops: Vec<String>,
}

impl FillingCertificate {
    pub fn original_len(&self) -> usize {
        self.steps.first().map_or(0, |s| s.word.len())
    }

    pub fn summary(&self, al: &Alphabet) -> CertificateSummary {
        CertificateSummary {
            k: self.k,
            loop_lengths: self.steps.iter().map(|s| s.word.len()).collect(),
            relators_per_step: self.steps.iter().map(|s| s.relators.len()).collect(),
            total_relators: self.total_relators,
            area_bound: self.original_len().pow(2),
            max_relator_len: self.max_relator_len,
            relator_len_bound: 2 * self.k + 2,
            loops: self.steps.iter().map(|s| al.format_word(&s.word)).collect(),
        }
    }

    /// Recounts every bound from scratch: relators are identities of
    /// length at most `2k + 2`, loops strictly shrink and fellow travel,
    /// and the total is at most `|w|^2`.
    pub fn verify(&self, solver: &dyn WordProblem) -> Result<(), String> {
        let m = Search(solver);
        let mut start = solver.identity();
        let mut total = 0;
        for (i, s) in self.steps.iter().enumerate() {
            if !solver.is_identity_word(&s.word) {
                return Err(format!("step {i} is not a loop"));
            }
            let next_word = self.steps.get(i + 1).map_or(Word::empty(), |n| n.word.clone());
            if next_word.len() >= s.word.len() {
                return Err(format!("step {i} does not shrink"));
            }
            let next_start = solver.mul_word(&start, &s.offset);
            if !sync_ft_from(&m, &start, &s.word, &next_start, &next_word, self.k).holds {
                return Err(format!("step {i} does not fellow travel at {}", self.k));
            }
            if s.relators.len() > s.word.len() {
                return Err(format!("step {i} uses {} relators", s.relators.len()));
            }
            for r in &s.relators {
                if r.len() > 2 * self.k + 2 || !solver.is_identity_word(r) {
                    return Err(format!("step {i} has a bad relator"));
                }
            }
            total += s.relators.len();
            start = next_start;
        }
        if total != self.total_relators || total > self.original_len().pow(2) {
            return Err(format!("area {total} exceeds the bound"));
        }
        Ok(())
    }
}

/// Shortens `w` to the empty loop, recording the rectangles of each
/// annulus. A loop that cannot be shortened stops the run with
/// [`PropertyError::Stuck`], which is itself a counterexample to the
/// loop shortening property at this `k`.
pub fn fill(frame: &Frame, w: &[Letter], budget: &mut Budget) -> Result<FillingCertificate, PropertyError> {
    let solver = frame.solver().clone();
    let al = solver.alphabet().clone();
    let k = frame.k();
    let mut cur = Word::from_letters(w);
    let mut steps = Vec::new();
    let mut total = 0;
    let mut max_len = 0;
    while !cur.is_empty() {
        let Some(s) = shorten_loop(frame, &cur, false, budget)? else {
            return Err(PropertyError::Stuck { word: al.format_word(&cur), k });
        };
        // Rectangles in coordinates relative to w_i(0).
        let id = solver.identity();
        let pw = positions(solver.as_ref(), &id, &cur);
        let pu = positions(solver.as_ref(), &solver.eval(&s.offset), &s.u);
        let side = |t: usize| -> Result<Word, PropertyError> {
            let key = solver.between(&pw[t.min(cur.len())], &pu[t.min(s.u.len())]);
            let o = frame.ball().index_of(&key).filter(|&o| frame.ball().dist_at(o) <= k);
            o.map(|o| frame.offset_word(o))
                .ok_or_else(|| PropertyError::Internal("shortening does not fellow travel".into()))
        };
        let mut relators = Vec::new();
        let mut left = side(0)?;
        for t in 0..cur.len() {
            let right = side(t + 1)?;
            let mut r = left.clone();
            if t < s.u.len() {
                r.push(s.u[t]);
            }
            r = r.concat(&al.invert(&right));
            r.push(al.inv(cur[t]));
            let r = al.free_reduce(&r);
            if !r.is_empty() {
                max_len = max_len.max(r.len());
                relators.push(r);
            }
            left = right;
        }
        total += relators.len();
        steps.push(FillStep { word: cur.clone(), offset: s.offset.clone(), relators });
        cur = s.u;
    }
    Ok(FillingCertificate { k, steps, total_relators: total, max_relator_len: max_len })
}

/// Result of [`fill_sweep`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillSweep {
    pub k: usize,
    pub max_len: usize,
    /// Identity words examined, by length.
    pub loops_by_len: Vec<u64>,
    /// Upper bound on the certificate area over all words of each length.
    pub area_by_len: Vec<usize>,
    pub max_relator_len: usize,
    /// First identity word (by length, then lexicographically) that `fill`
    /// cannot shorten.
    pub stuck: Option<String>,
}

impl FillSweep {
    /// Area at most `n^2` and relators at most `2k + 2` long, everywhere.
    pub fn within_bounds(&self) -> bool {
        self.stuck.is_none()
            && self.max_relator_len <= 2 * self.k + 2
            && self.area_by_len.iter().enumerate().all(|(n, &a)| a <= n * n)
    }
}

/// Runs the first step of [`fill`] on every identity word of length at
/// most `max_len`, shortest first. A certificate for `w` is its first
/// annulus followed by the certificate for the shorter identity word `u`,
/// which an earlier length already covered, so the per-length maxima
/// bound the area of every certificate exactly as [`fill`] would build it.
/// Each rectangle is checked by tracing it around the ball.
pub fn fill_sweep(frame: &Frame, max_len: usize, budget: &mut Budget) -> Result<FillSweep, PropertyError> {
    if frame.ball().radius() < max_len / 2 {
        return Err(PropertyError::Invalid(format!(
            "enumerating loops of length {max_len} needs a ball of radius {}",
            max_len / 2
        )));
    }
    let k = frame.k();
    let al = frame.solver().alphabet().clone();
    let ball = frame.ball();
    let mut sweep = FillSweep {
        k,
        max_len,
        loops_by_len: vec![0; max_len + 1],
        area_by_len: vec![0; max_len + 1],
        max_relator_len: 0,
        stuck: None,
    };
    sweep.loops_by_len[0] = 1;
    let sides: Vec<(Word, Word)> = (0..frame.offsets())
        .map(|o| {
            let s = frame.offset_word(o);
            let inv = al.invert(&s);
            (s, inv)
        })
        .collect();
    for len in 1..=max_len {
        let area = AtomicUsize::new(0);
        let rel_len = AtomicUsize::new(0);
        let known = &sweep.area_by_len;
        let keep = move |d: usize, p: usize| ball.dist_at(p) <= len - d;
        let leaf = |w: &[Letter], p: usize, stats: &mut SearchStats| -> Result<Option<String>, PropertyError> {
            if p != 0 {
                return Ok(None);
            }
            stats.checked += 1;
            let mut b = Budget::unlimited();
            let Some((sigma, u)) = first_shortening(frame, w, &mut b)? else {
                return Ok(Some(al.format_word(w)));
            };
            stats.steps += b.used;
            let (count, longest) = annulus_by_offsets(frame, &sides, w, sigma, &u)?;
            area.fetch_max(count + known[u.len()], Ordering::Relaxed);
            rel_len.fetch_max(longest, Ordering::Relaxed);
            Ok(None)
        };
        let (stuck, stats) = scan_words(frame, len, &keep, &leaf)?;
        budget.spend(stats.steps)?;
        sweep.loops_by_len[len] = stats.checked;
        sweep.area_by_len[len] = area.into_inner();
        sweep.max_relator_len = sweep.max_relator_len.max(rel_len.into_inner());
        if stuck.is_some() {
            sweep.stuck = stuck;
            break;
        }
    }
    Ok(sweep)
}

/// The shortening [`shorten_loop`] picks, without re-solving the word problem.
fn first_shortening(frame: &Frame, w: &[Letter], budget: &mut Budget) -> Result<Option<(usize, Word)>, PropertyError> {
    for sigma in 0..frame.offsets() {
        if frame.reachable(w, sigma, sigma, w.len() - 1, budget)? {
            let u = frame.solve(w, sigma, sigma, w.len() - 1, budget)?.expect("reachable");
            return Ok(Some((sigma, u)));
        }
    }
    Ok(None)
}

/// Rectangle count and longest rectangle of the annulus between loop `w`
/// and its shortening `u` from offset `sigma`, as [`fill`] builds them.
fn annulus_by_offsets(
    frame: &Frame,
    sides: &[(Word, Word)],
    w: &[Letter],
    sigma: usize,
    u: &[Letter],
) -> Result<(usize, usize), PropertyError> {
    let al = frame.solver().alphabet();
    let ball = frame.ball();
    let bad = || PropertyError::Internal("shortening does not fellow travel".into());
    let mut o = sigma;
    let mut count = 0;
    let mut longest = 0;
    let mut r: SmallVec<[Letter; 16]> = SmallVec::new();
    for t in 0..w.len() {
        let next = match u.get(t) {
            Some(&y) => frame.step_raw(o, w[t], y),
            None => frame.left_mul(al.inv(w[t]), o),
        }
        .ok_or_else(bad)?;
        // Free reduction on the fly.
        r.clear();
        let back = al.inv(w[t]);
        let letters = sides[o].0.iter().chain(u.get(t)).chain(sides[next].1.iter()).chain(std::iter::once(&back));
        for &x in letters {
            if r.last() == Some(&al.inv(x)) {
                r.pop();
            } else {
                r.push(x);
            }
        }
        if !r.is_empty() {
            // The rectangle must close up in the Cayley graph.
            let end = r.iter().try_fold(0usize, |v, &x| ball.neighbor(v, x));
            if end != Some(0) {
                return Err(PropertyError::Internal(format!("rectangle {} is not a relation", al.format_word(&r))));
            }
            count += 1;
            longest = longest.max(r.len());
        }
        o = next;
    }
    if o != sigma {
        return Err(bad());
    }
    Ok((count, longest))
}
