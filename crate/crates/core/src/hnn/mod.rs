//! Machinery specific to multiple HNN extensions: pinches, the
//! strip-equidistance and total-geodesicity hypotheses, strips and their
//! sides, and the pinch-driven shortening of loops.

use serde::Serialize;
use thiserror::Error;

use crate::cayley::{bounded_distance, bounded_geodesic, geodesics_to, Ball, CayleyError};
use crate::fellow::{sync_ft, Search, SyncReport};
use crate::presentation::{Alphabet, Letter, OracleKind, Word};
use crate::properties::{Budget, Frame, Outcome, Property, PropertyError, SearchStats, Verdict, Witness};
use crate::solver::{ElementKey, HnnOps, Side};

pub use crate::solver::{britton_reduce, find_pinch, Pinch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HnnError {
    #[error("word {0} is not a loop")]
    NotALoop(String),
    #[error("{0}")]
    Invalid(String),
    #[error("the base search at k = {k} cannot shorten {word}; the base fails FFTP at this constant")]
    BaseStuck { word: String, k: usize },
    #[error("{word} has stable letters but no pinch")]
    NoPinch { word: String },
    #[error("pinch inner word {inner} is geodesic but not in the associated subgroup's generators")]
    NotTotallyGeodesic { inner: String },
    #[error("no base word of length {len} spells the image of {inner}")]
    NotEquidistant { inner: String, len: usize },
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

/// Base-group distances of subgroup elements and their images agree for
/// every element of `U_i` and `V_i` in the base ball of radius `r`.
pub fn check_strip_equidistant(h: &dyn HnnOps, r: usize) -> Result<Verdict, HnnError> {
    let base = h.base_solver();
    let ball = Ball::build(base.clone(), r)?;
    let bal = base.alphabet().clone();
    let mut stats = SearchStats::default();
    for i in 0..h.structure().stable.len() {
        for side in [Side::U, Side::V] {
            for g in 0..ball.len() {
                let w = ball.word_to(g);
                if !h.membership(i, side, &w).is_member() {
                    continue;
                }
                stats.checked += 1;
                let image = h.image_word(i, side, &w).expect("member has an image");
                let d = ball.dist_at(g);
                let di = ball.distance(&base.eval(&image));
                if di != Some(d) {
                    let letter = h.alphabet().format_word(&[h.structure().stable[i].letter]);
                    let witness = Witness::new(format!(
                        "|g| = {d} but |image| {} (stable letter {letter}, side {side:?})",
                        di.map_or(format!("> {r}"), |x| format!("= {x}"))
                    ))
                    .with(&bal, "g", &w)
                    .with(&bal, "image", &image);
                    return Ok(hyp_verdict(Property::StripEquidistant, r, equidistant_q(r), Some(witness), stats));
                }
            }
        }
    }
    Ok(hyp_verdict(Property::StripEquidistant, r, equidistant_q(r), None, stats))
}

fn equidistant_q(r: usize) -> String {
    format!("associated subgroup elements in the base ball B({r})")
}

fn hyp_verdict(property: Property, r: usize, quantifier: String, witness: Option<Witness>, stats: SearchStats) -> Verdict {
    let outcome = if witness.is_some() { Outcome::Counterexample } else { Outcome::HoldsUpToBound };
    Verdict { property, group: String::new(), k: None, c: None, bound: r, quantifier, outcome, witness, stats }
}

/// Every geodesic to every element of `<Y>` in `ball` is a word in `Y`
/// and its inverses. Subgroup elements are reached by `Y`-words of length
/// at most `2 r`, where `r` is the ball's radius.
pub fn check_totally_geodesic(ball: &Ball, y: &[Letter]) -> Verdict {
    let solver = ball.solver();
    let al = solver.alphabet().clone();
    let r = ball.radius();
    let mut ys: Vec<Letter> = y.iter().flat_map(|&l| [l, al.inv(l)]).collect();
    ys.sort();
    ys.dedup();
    let quantifier = format!(
        "geodesics in B({r}) to elements of <{}> reached by words of length <= {}",
        al.format_word(y),
        2 * r
    );
    // BFS over the subgroup's own word graph.
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![solver.identity()];
    seen.insert(solver.identity());
    let mut members = Vec::new();
    for _ in 0..=2 * r {
        let mut next = Vec::new();
        for g in frontier {
            if let Some(i) = ball.index_of(&g) {
                members.push(i);
            }
            for &l in &ys {
                let h = solver.mul_letter(&g, l);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    members.sort_unstable();
    let mut stats = SearchStats::default();
    for g in members {
        for geo in geodesics_to(ball, g) {
            stats.checked += 1;
            if let Some(bad) = geo.iter().find(|l| !ys.contains(l)) {
                let witness = Witness::new(format!(
                    "geodesic of length {} uses {}, outside <{}>",
                    geo.len(),
                    al.name(*bad),
                    al.format_word(y)
                ))
                .with(&al, "element", &ball.word_to(g))
                .with(&al, "geodesic", &geo);
                return hyp_verdict(Property::TotallyGeodesic, r, quantifier, Some(witness), stats);
            }
        }
    }
    hyp_verdict(Property::TotallyGeodesic, r, quantifier, None, stats)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortenCase {
    /// No stable letters: base FFTP on the whole loop.
    Base,
    /// Non-geodesic pinch interior: base FFTP on the interior.
    PinchInterior,
    /// Geodesic pinch interior: replace the pinch by the image.
    PinchImage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnnShortening {
    pub case: ShortenCase,
    pub u: Word,
    pub pinch: Option<Pinch>,
    /// How far the tail after the replaced subword runs ahead of `w`.
    pub shift: usize,
    /// `max(k_base, shift)`, the synchronous constant that was verified.
    pub constant: usize,
    pub report: SyncReport,
}

/// One step of the pinch-driven strategy: with no stable letters, the
/// base search shortens the loop directly; otherwise the leftmost
/// innermost pinch `x w2 x^-1` either has a non-geodesic interior, which
/// the base search shortens (preferring the smallest loss of length), or
/// a geodesic one, which is replaced by its image. The result is
/// re-checked by synchronous fellow traveling at `max(k_base, shift)`.
///
/// `base` is a frame over the base group. Returns `None` for the empty
/// loop.
pub fn hnn_shorten(h: &dyn HnnOps, base: &Frame, w: &[Letter], budget: &mut Budget) -> Result<Option<HnnShortening>, HnnError> {
    let al = h.alphabet().clone();
    let st = h.structure();
    if !h.is_identity_word(w) {
        return Err(HnnError::NotALoop(al.format_word(w)));
    }
    if w.is_empty() {
        return Ok(None);
    }
    let k = base.k();
    let (case, u, pinch, shift) = match st.base_word(w) {
        Some(bw) => {
            let v = shorten_base(base, &bw, bw.len() - 1, budget)?
                .ok_or_else(|| HnnError::BaseStuck { word: al.format_word(w), k })?;
            (ShortenCase::Base, st.lift_word(&v), None, 0)
        }
        None => {
            let p = find_pinch(h, w).ok_or_else(|| HnnError::NoPinch { word: al.format_word(w) })?;
            let inner = &p.inner;
            let bsolver = h.base_solver();
            let id = bsolver.identity();
            let g = bsolver.eval(inner);
            let geodesic = bounded_distance(bsolver.as_ref(), &id, &g, inner.len()) == Some(inner.len());
            let (case, replacement) = if !geodesic {
                let v = shorten_base(base, inner, inner.len() - 1, budget)?
                    .ok_or_else(|| HnnError::BaseStuck { word: bsolver.alphabet().format_word(inner), k })?;
                // The stable letters stay; only the interior shrinks.
                let opening = w[p.start];
                let mut r = Word::from_letters(&[opening]);
                r = r.concat(&st.lift_word(&v));
                r.push(al.inv(opening));
                (ShortenCase::PinchInterior, r)
            } else {
                // Total geodesicity: a geodesic interior must spell a power
                // of the subgroup generator.
                let gens = &st.stable[p.stable].pairs;
                let full = st.stable[p.stable].oracle == OracleKind::Full;
                let in_y = full
                    || gens.len() == 1 && {
                        let y = if p.side == Side::U { &gens[0].0 } else { &gens[0].1 };
                        is_power_word(bsolver.alphabet(), inner, y)
                    };
                if !in_y {
                    return Err(HnnError::NotTotallyGeodesic { inner: bsolver.alphabet().format_word(inner) });
                }
                let image = h.image_word(p.stable, p.side, inner).expect("pinch interior is a member");
                let image = if image.len() == inner.len() {
                    image
                } else {
                    bounded_geodesic(bsolver.as_ref(), &id, &bsolver.eval(&image), inner.len()).ok_or_else(|| {
                        HnnError::NotEquidistant { inner: bsolver.alphabet().format_word(inner), len: inner.len() }
                    })?
                };
                (ShortenCase::PinchImage, st.lift_word(&image))
            };
            let mut u = Word::from_letters(&w[..p.start]);
            u = u.concat(&replacement);
            u = u.concat(&w[p.end + 1..]);
            let shift = (p.end + 1 - p.start) - replacement.len();
            (case, u, Some(p), shift)
        }
    };
    let constant = k.max(shift);
    let m = Search(h);
    let report = sync_ft(&m, w, &u, constant);
    Ok(Some(HnnShortening { case, u, pinch, shift, constant, report }))
}

/// Whether `w` spells a power of `y` letter by letter (`y` or `y^-1`
/// repeated).
fn is_power_word(al: &Alphabet, w: &[Letter], y: &[Letter]) -> bool {
    if w.is_empty() {
        return true;
    }
    if y.is_empty() {
        return false;
    }
    let yi = al.invert(y);
    [y, yi.letters()].iter().any(|z| w.len() % z.len() == 0 && w.chunks(z.len()).all(|c| c == *z))
}

/// A shorter base path with the same endpoints as `w` within `k`,
/// losing as little length as possible.
fn shorten_base(frame: &Frame, w: &[Letter], max_len: usize, budget: &mut Budget) -> Result<Option<Word>, HnnError> {
    for len in (0..=max_len).rev() {
        if let Some(u) = frame.solve_range(w, 0, 0, len, len, budget)? {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Which half-space of a strip a vertex lies in. The anchor's side is
/// `Minus`; every vertex, including the endpoints of strip edges, lies
/// in exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StripSide {
    Minus,
    Plus,
}

/// The edges `(w x^i, w x^i r)`, `i` in `Z`, for a stable letter `r`
/// and a generator `x` of the matching associated subgroup (`U` when `r`
/// is the declared stable letter, `V` for its inverse).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strip {
    pub anchor: Word,
    pub x: Word,
    pub r: Letter,
    anchor_key: ElementKey,
    x_base: Word,
}

impl Strip {
    pub fn new(h: &dyn HnnOps, anchor: Word, x: Word, r: Letter) -> Result<Strip, HnnError> {
        let al = h.alphabet();
        let st = h.structure();
        let (i, sign) = st
            .stable_index(al, r)
            .ok_or_else(|| HnnError::Invalid(format!("{} is not a stable letter", al.name(r))))?;
        let x_base = st
            .base_word(&x)
            .ok_or_else(|| HnnError::Invalid(format!("strip direction {} has stable letters", al.format_word(&x))))?;
        let side = if sign > 0 { Side::U } else { Side::V };
        if x_base.is_empty() || !h.membership(i, side, &x_base).is_member() {
            return Err(HnnError::Invalid(format!(
                "{} is not in the subgroup that {} conjugates",
                al.format_word(&x),
                al.name(r)
            )));
        }
        let anchor_key = h.eval(&anchor);
        Ok(Strip { anchor, x, r, anchor_key, x_base })
    }

    /// Whether `(p, p y)` is an edge of the strip, for `p` given relative
    /// to the anchor.
    fn crosses(&self, h: &dyn HnnOps, rel: &ElementKey, y: Letter) -> bool {
        let al = h.alphabet();
        if y == self.r {
            h.base_cyclic_exponent(rel, &self.x_base).is_some()
        } else if y == al.inv(self.r) {
            h.base_cyclic_exponent(&h.mul_letter(rel, y), &self.x_base).is_some()
        } else {
            false
        }
    }

    /// Side of a vertex reached from the anchor along `path`, by parity of
    /// strip crossings.
    pub fn side_along(&self, h: &dyn HnnOps, path: &[Letter]) -> StripSide {
        let mut rel = h.identity();
        let mut crossings = 0;
        for &y in path {
            if self.crosses(h, &rel, y) {
                crossings += 1;
            }
            rel = h.mul_letter(&rel, y);
        }
        if crossings % 2 == 0 {
            StripSide::Minus
        } else {
            StripSide::Plus
        }
    }
}

/// Side of `v` relative to `strip`, along the shortlex-first geodesic from
/// the anchor; `v` must be within `radius` of the anchor.
pub fn strip_side(h: &dyn HnnOps, v: &ElementKey, strip: &Strip, radius: usize) -> Result<StripSide, HnnError> {
    let path = bounded_geodesic(h, &strip.anchor_key, v, radius).ok_or(CayleyError::RadiusShortfall {
        len: radius + 1,
        radius,
    })?;
    Ok(strip.side_along(h, &path))
}

/// Sides of every ball element relative to a strip anchored at the
/// identity, along the ball's shortlex geodesics.
pub fn strip_sides(h: &dyn HnnOps, ball: &Ball, strip: &Strip) -> Result<Vec<StripSide>, HnnError> {
    if !strip.anchor.is_empty() && h.eval(&strip.anchor) != h.identity() {
        return Err(HnnError::Invalid("ball sides need a strip anchored at the identity".into()));
    }
    let mut sides: Vec<StripSide> = Vec::with_capacity(ball.len());
    for i in 0..ball.len() {
        let s = match (ball.parent(i), ball.parent_letter(i)) {
            (Some(p), Some(y)) => {
                let flip = strip.crosses(h, &ball.key(p), y);
                match (sides[p], flip) {
                    (s, false) => s,
                    (StripSide::Minus, true) => StripSide::Plus,
                    (StripSide::Plus, true) => StripSide::Minus,
                }
            }
            _ => StripSide::Minus,
        };
        sides.push(s);
    }
    Ok(sides)
}

/// Whether `(ball[i], ball[i] y)` is a strip edge, for a strip anchored at
/// the identity.
pub fn is_strip_edge(h: &dyn HnnOps, ball: &Ball, strip: &Strip, i: usize, y: Letter) -> bool {
    strip.crosses(h, &ball.key(i), y)
}
