//! Almost convexity: pairs at distance at most 2 in `B(N)` joined inside
//! the ball by short paths.

use super::{shorten_loop, Budget, Frame, Outcome, Property, PropertyError, SearchStats, Verdict, Witness};
use crate::cayley::{bounded_distance, restricted_distance, Ball};
use crate::fellow::positions;
use crate::presentation::{Letter, Word};

/// Checks every pair `x, y` of `B(N)` (or of `S(N)`) with `d(x, y) <= 2`
/// for an in-ball path of length at most `c`. `ball` needs adjacency.
pub fn check_ac(ball: &Ball, c: usize, sphere_only: bool) -> Result<Verdict, PropertyError> {
    if !ball.has_adjacency() {
        return Err(PropertyError::Invalid("almost convexity needs a ball with adjacency".into()));
    }
    let n = ball.radius();
    let solver = ball.solver();
    let al = solver.alphabet().clone();
    let letters: Vec<Letter> = al.letters().collect();
    let xs = if sphere_only { ball.layer(n) } else { 0..ball.len() };
    let mut stamp = vec![u32::MAX; ball.len()];
    let mut stats = SearchStats::default();
    let mut frontier = Vec::new();
    let mut next = Vec::new();
    for x in xs {
        // Everything within 2 of x that lies in the ball.
        let mut near = Vec::new();
        for &a in &letters {
            match ball.neighbor(x, a) {
                Some(i) => {
                    near.push(i);
                    near.extend(letters.iter().filter_map(|&b| ball.neighbor(i, b)));
                }
                None => {
                    let k = solver.mul_letter(&ball.key(x), a);
                    near.extend(letters.iter().filter_map(|&b| ball.index_of(&solver.mul_letter(&k, b))));
                }
            }
        }
        near.retain(|&y| y > x && (!sphere_only || ball.dist_at(y) == n));
        if near.is_empty() {
            continue;
        }
        // In-ball BFS from x to depth c.
        let tag = x as u32;
        stamp[x] = tag;
        frontier.clear();
        frontier.push(x);
        for _ in 0..c {
            next.clear();
            for &v in &frontier {
                for &a in &letters {
                    if let Some(i) = ball.neighbor(v, a) {
                        if stamp[i] != tag {
                            stamp[i] = tag;
                            next.push(i);
                        }
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        near.sort_unstable();
        near.dedup();
        stats.checked += near.len() as u64;
        if let Some(&y) = near.iter().find(|&&y| stamp[y] != tag) {
            let d = bounded_distance(solver.as_ref(), &ball.key(x), &ball.key(y), 2).expect("within 2");
            let r = restricted_distance(ball, x, y, None);
            let witness = Witness::new(format!(
                "d(x, y) = {d}, shortest path inside B({n}) {}",
                r.map_or("does not exist".to_string(), |r| format!("has length {r}"))
            ))
            .with(&al, "x", &ball.word_to(x))
            .with(&al, "y", &ball.word_to(y));
            return Ok(ac_verdict(n, c, sphere_only, Outcome::Counterexample, Some(witness), stats));
        }
    }
    Ok(ac_verdict(n, c, sphere_only, Outcome::HoldsUpToBound, None, stats))
}

fn ac_verdict(n: usize, c: usize, sphere_only: bool, outcome: Outcome, witness: Option<Witness>, stats: SearchStats) -> Verdict {
    let quantifier = if sphere_only {
        format!("pairs in S({n}) at distance <= 2")
    } else {
        format!("pairs in B({n}) at distance <= 2")
    };
    Verdict { property: Property::AlmostConvex, group: String::new(), k: None, c: Some(c), bound: n, quantifier, outcome, witness, stats }
}

/// The same check restricted to given pairs of words (a witness family).
/// Pairs whose endpoints are not both in the ball, or are more than 2
/// apart, are outside the quantifier and skipped.
pub fn check_ac_pairs(ball: &Ball, c: usize, family: &str, pairs: &[(Word, Word)]) -> Result<Verdict, PropertyError> {
    if !ball.has_adjacency() {
        return Err(PropertyError::Invalid("almost convexity needs a ball with adjacency".into()));
    }
    let n = ball.radius();
    let solver = ball.solver();
    let al = solver.alphabet().clone();
    let mut stats = SearchStats::default();
    for (wx, wy) in pairs {
        let (kx, ky) = (solver.eval(wx), solver.eval(wy));
        let (Some(x), Some(y)) = (ball.index_of(&kx), ball.index_of(&ky)) else { continue };
        let Some(d) = bounded_distance(solver.as_ref(), &kx, &ky, 2) else { continue };
        stats.checked += 1;
        let r = restricted_distance(ball, x, y, None);
        if r.is_none_or(|r| r > c) {
            let witness = Witness::new(format!(
                "d(x, y) = {d}, shortest path inside B({n}) {}",
                r.map_or("does not exist".to_string(), |r| format!("has length {r}"))
            ))
            .with(&al, "x", wx)
            .with(&al, "y", wy);
            let mut v = ac_verdict(n, c, false, Outcome::Counterexample, Some(witness), stats);
            v.quantifier = format!("{family} pairs in B({n}) at distance <= 2");
            return Ok(v);
        }
    }
    let mut v = ac_verdict(n, c, false, Outcome::HoldsUpToBound, None, stats);
    v.quantifier = format!("{family} pairs in B({n}) at distance <= 2");
    Ok(v)
}

/// An in-ball connector built from two basepoint shortenings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcConnector {
    pub path: Word,
    /// The shortening constant actually used (rounded up to even).
    pub k: usize,
    /// First shortening of `w gamma u^-1`.
    pub y: Word,
    /// Shortening of `y`; a loop inside `B(N)`.
    pub v: Word,
}

/// Given geodesics `w`, `u` of length `N` whose endpoints are joined by
/// `gamma` (`|gamma| <= 2`), shortens the loop `L = w gamma u^-1` twice at
/// the basepoint to `y` and then `v`, and returns the path
///
/// back along `w` to `L(t1)`, across to `y(t1)` and `v(t1)`, along `v` to
/// `v(t2)`, across to `y(t2)` and `L(t2)`, and along `u` to its end,
///
/// with `t1 = N - k/2` and `t2 = N + |gamma| + k/2`. Its length is at most
/// `6k + |gamma|` and every vertex is checked to lie in `B(N)`.
/// `frame` must be built for the even constant; `ball` has radius `N`.
pub fn blsp_to_ac_path(
    frame: &Frame,
    ball: &Ball,
    w: &[Letter],
    u: &[Letter],
    gamma: &[Letter],
    budget: &mut Budget,
) -> Result<AcConnector, PropertyError> {
    let k = frame.k();
    if k % 2 == 1 {
        return Err(PropertyError::Invalid(format!("the connector needs an even constant, got {k}")));
    }
    let solver = frame.solver().clone();
    let al = solver.alphabet().clone();
    let n = ball.radius();
    if w.len() != n || u.len() != n || gamma.len() > 2 {
        return Err(PropertyError::Invalid(format!(
            "need |w| = |u| = {n} and |gamma| <= 2, got {}, {}, {}",
            w.len(),
            u.len(),
            gamma.len()
        )));
    }
    let (ew, eu) = (solver.eval(w), solver.eval(u));
    if solver.mul_word(&ew, gamma) != eu {
        return Err(PropertyError::Invalid("gamma does not join the endpoints".into()));
    }
    if ball.distance(&ew) != Some(n) || ball.distance(&eu) != Some(n) {
        return Err(PropertyError::Invalid("w and u must be geodesics of length N".into()));
    }
    let lp = Word::from_letters(w).concat(gamma).concat(&al.invert(u));
    let shorten = |l: &[Letter], budget: &mut Budget| -> Result<Word, PropertyError> {
        if l.is_empty() {
            return Ok(Word::empty());
        }
        match shorten_loop(frame, l, true, budget)? {
            Some(s) => Ok(s.u),
            None => Err(PropertyError::Unavailable(format!(
                "no basepoint shortening of {} at k = {k}",
                al.format_word(l)
            ))),
        }
    };
    let y = shorten(&lp, budget)?;
    let v = shorten(&y, budget)?;

    let id = solver.identity();
    let (pl, py, pv) = (positions(solver.as_ref(), &id, &lp), positions(solver.as_ref(), &id, &y), positions(solver.as_ref(), &id, &v));
    let at = |p: &[crate::solver::ElementKey], t: usize| p[t.min(p.len() - 1)].clone();
    let t1 = n.saturating_sub(k / 2);
    let t2 = (n + gamma.len() + k / 2).min(lp.len());
    let across = |a: &crate::solver::ElementKey, b: &crate::solver::ElementKey| -> Result<Word, PropertyError> {
        let key = solver.between(a, b);
        let o = frame.ball().index_of(&key).filter(|&o| frame.ball().dist_at(o) <= k);
        o.map(|o| frame.offset_word(o))
            .ok_or_else(|| PropertyError::Internal("shortening does not fellow travel".into()))
    };
    let mut path = al.invert(&w[t1..]);
    path = path.concat(&across(&at(&pl, t1), &at(&py, t1))?);
    path = path.concat(&across(&at(&py, t1), &at(&pv, t1))?);
    path = path.concat(&v[t1.min(v.len())..t2.min(v.len())]);
    path = path.concat(&across(&at(&pv, t2), &at(&py, t2))?);
    path = path.concat(&across(&at(&py, t2), &at(&pl, t2))?);
    // L(t2) = u(N - (t2 - N - |gamma|)); finish along u.
    let back = t2 - n - gamma.len();
    path = path.concat(&u[n - back..]);

    let bound = 6 * k + 2;
    if path.len() > bound {
        return Err(PropertyError::Internal(format!("connector has length {} > {bound}", path.len())));
    }
    for (t, p) in positions(solver.as_ref(), &ew, &path).iter().enumerate() {
        if !ball.contains(p) {
            return Err(PropertyError::Internal(format!("connector leaves B({n}) at step {t}")));
        }
    }
    if solver.mul_word(&ew, &path) != eu {
        return Err(PropertyError::Internal("connector does not end at u".into()));
    }
    Ok(AcConnector { path, k, y, v })
}
