//! Synchronous and asynchronous fellow traveling on the integer grid, and
//! the conversion of an asynchronous shortening into a synchronous one.
//!
//! Paths are read from a start vertex and frozen at their endpoint, so
//! `w(t) = start * w[0..min(t, |w|)]`.

mod suite;

pub use suite::{async_pairs, AsyncPair};

use serde::Serialize;
use thiserror::Error;

use crate::cayley::{bounded_distance, bounded_geodesic, DistanceOracle};
use crate::presentation::{Letter, Word};
use crate::solver::{ElementKey, WordProblem};

/// Source of (bounded) distances and connecting geodesics.
pub trait Metric: Sync {
    fn solver(&self) -> &dyn WordProblem;
    /// `d(x, y)` if it is at most `cutoff`.
    fn distance_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<usize>;
    /// A geodesic word from `x` to `y` if `d(x, y) <= cutoff`.
    fn geodesic_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<Word>;
}

/// Uncached bidirectional search on the solver; the independent check.
pub struct Search<'a>(pub &'a dyn WordProblem);

impl Metric for Search<'_> {
    fn solver(&self) -> &dyn WordProblem {
        self.0
    }

    fn distance_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<usize> {
        bounded_distance(self.0, x, y, cutoff)
    }

    fn geodesic_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<Word> {
        bounded_geodesic(self.0, x, y, cutoff)
    }
}

impl Metric for DistanceOracle {
    fn solver(&self) -> &dyn WordProblem {
        DistanceOracle::solver(self)
    }

    fn distance_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<usize> {
        DistanceOracle::distance_within(self, x, y, cutoff)
    }

    fn geodesic_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<Word> {
        if cutoff <= self.ball().radius() {
            self.geodesic(x, y).filter(|g| g.len() <= cutoff)
        } else {
            bounded_geodesic(DistanceOracle::solver(self), x, y, cutoff)
        }
    }
}

/// Vertices `w(0), ..., w(|w|)` of the path `w` read from `start`.
pub fn positions(solver: &dyn WordProblem, start: &ElementKey, w: &[Letter]) -> Vec<ElementKey> {
    let mut out = Vec::with_capacity(w.len() + 1);
    out.push(start.clone());
    for &x in w {
        let next = solver.mul_letter(out.last().expect("nonempty"), x);
        out.push(next);
    }
    out
}

fn at(p: &[ElementKey], t: usize) -> &ElementKey {
    &p[t.min(p.len() - 1)]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyncReport {
    pub holds: bool,
    /// The integer bound that was checked.
    pub k: usize,
    /// Largest distance seen at the integer times that were checked.
    pub max_distance: usize,
    pub first_violation: Option<usize>,
    /// Bound for all real times, `k + 1`.
    pub continuous_constant: usize,
}

/// Checks `d(w(t), u(t)) <= k` at every integer `t`, starting both paths
/// at the identity.
pub fn sync_ft(m: &dyn Metric, w: &[Letter], u: &[Letter], k: usize) -> SyncReport {
    let id = m.solver().identity();
    sync_ft_from(m, &id, w, &id, u, k)
}

pub fn sync_ft_from(
    m: &dyn Metric,
    w_start: &ElementKey,
    w: &[Letter],
    u_start: &ElementKey,
    u: &[Letter],
    k: usize,
) -> SyncReport {
    let pw = positions(m.solver(), w_start, w);
    let pu = positions(m.solver(), u_start, u);
    let mut max_distance = 0;
    for t in 0..=w.len().max(u.len()) {
        match m.distance_within(at(&pw, t), at(&pu, t), k) {
            Some(d) => max_distance = max_distance.max(d),
            None => {
                return SyncReport {
                    holds: false,
                    k,
                    max_distance,
                    first_violation: Some(t),
                    continuous_constant: k + 1,
                }
            }
        }
    }
    SyncReport { holds: true, k, max_distance, first_violation: None, continuous_constant: k + 1 }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FellowError {
    #[error("reparameterization is not monotone with phi(0) = 0 and phi(n) = m: {0}")]
    BadReparameterization(String),
    #[error("premise fails: d(w({t}), u(phi({t}))) > {k}")]
    Premise { t: usize, k: usize },
    #[error("u must be strictly shorter than w (|u| = {u}, |w| = {w})")]
    NotShorter { u: usize, w: usize },
    #[error("case {case}: output does not fellow travel at {constant} (first failure at t = {t})")]
    Constant { case: u8, constant: usize, t: usize },
    #[error("case {case}: output has length {len}, not below {bound}")]
    Length { case: u8, len: usize, bound: usize },
}

/// A monotone map `{0..n} -> {0..m}` with `phi(0) = 0` and `phi(n) = m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reparameterization {
    map: Vec<usize>,
}

impl Reparameterization {
    pub fn new(map: Vec<usize>) -> Result<Self, FellowError> {
        if map.is_empty() || map[0] != 0 {
            return Err(FellowError::BadReparameterization(format!("{map:?}")));
        }
        if map.windows(2).any(|p| p[1] < p[0]) {
            return Err(FellowError::BadReparameterization(format!("{map:?}")));
        }
        Ok(Reparameterization { map })
    }

    /// Clamps an arbitrary map into shape: values capped at `m`, running
    /// maximum taken, first value 0 and last value `m`.
    pub fn normalized(raw: &[usize], n: usize, m: usize) -> Self {
        let mut map = vec![0; n + 1];
        let mut hi = 0;
        for (t, slot) in map.iter_mut().enumerate().skip(1) {
            hi = hi.max(raw.get(t).copied().unwrap_or(m).min(m));
            *slot = hi;
        }
        map[n] = m;
        Reparameterization { map }
    }

    /// `phi(t) = min(t, m)`: the identity with the shorter path frozen.
    pub fn frozen_identity(n: usize, m: usize) -> Self {
        Self::normalized(&(0..=n).map(|t| t.min(m)).collect::<Vec<_>>(), n, m)
    }

    pub fn n(&self) -> usize {
        self.map.len() - 1
    }

    pub fn m(&self) -> usize {
        *self.map.last().expect("nonempty")
    }

    pub fn get(&self, t: usize) -> usize {
        self.map[t]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }
}

/// Discrete Fréchet-style search for a monotone pairing of `w`'s and `u`'s
/// vertices staying within `k`. Moves advance `w`, `u`, or both.
pub fn async_ft(m: &dyn Metric, w: &[Letter], u: &[Letter], k: usize) -> Option<Reparameterization> {
    let id = m.solver().identity();
    async_ft_from(m, &id, w, &id, u, k)
}

pub fn async_ft_from(
    m: &dyn Metric,
    w_start: &ElementKey,
    w: &[Letter],
    u_start: &ElementKey,
    u: &[Letter],
    k: usize,
) -> Option<Reparameterization> {
    // Walk back from (n, m), preferring diagonal moves.
    walk_back(&Reach::new(m, w_start, w, u_start, u, k)?, |moves| moves[0])
}

/// `reach[i * cols + j]`: the pair `(w(i), u(j))` is reachable from
/// `(0, 0)` through pairs within `k`.
pub(crate) struct Reach {
    reach: Vec<bool>,
    n: usize,
    cols: usize,
}

impl Reach {
    pub(crate) fn new(
        m: &dyn Metric,
        w_start: &ElementKey,
        w: &[Letter],
        u_start: &ElementKey,
        u: &[Letter],
        k: usize,
    ) -> Option<Reach> {
        let pw = positions(m.solver(), w_start, w);
        let pu = positions(m.solver(), u_start, u);
        let (n, mm) = (w.len(), u.len());
        let cols = mm + 1;
        let mut reach = vec![false; (n + 1) * cols];
        for i in 0..=n {
            for j in 0..=mm {
                let c = i * cols + j;
                if m.distance_within(&pw[i], &pu[j], k).is_none() {
                    continue;
                }
                reach[c] = (i == 0 && j == 0)
                    || (i > 0 && reach[c - cols])
                    || (j > 0 && reach[c - 1])
                    || (i > 0 && j > 0 && reach[c - cols - 1]);
            }
        }
        reach[n * cols + mm].then_some(Reach { reach, n, cols })
    }
}

/// Walks back from the far corner; `pick` chooses among the feasible
/// predecessor moves, listed diagonal, up, left. Keeps the largest `j`
/// seen in each row.
pub(crate) fn walk_back(r: &Reach, mut pick: impl FnMut(&[(usize, usize)]) -> (usize, usize)) -> Option<Reparameterization> {
    let (n, cols) = (r.n, r.cols);
    let mut map = vec![0usize; n + 1];
    let (mut i, mut j) = (n, cols - 1);
    map[n] = j;
    let mut moves = Vec::with_capacity(3);
    while i > 0 || j > 0 {
        moves.clear();
        if i > 0 && j > 0 && r.reach[(i - 1) * cols + j - 1] {
            moves.push((i - 1, j - 1));
        }
        if i > 0 && r.reach[(i - 1) * cols + j] {
            moves.push((i - 1, j));
        }
        if j > 0 && r.reach[i * cols + j - 1] {
            moves.push((i, j - 1));
        }
        (i, j) = pick(&moves);
        map[i] = map[i].max(j);
    }
    map[0] = 0;
    Some(Reparameterization { map })
}

/// Output of [`synchronize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synchronized {
    pub case: u8,
    /// The new loop, read from `start`.
    pub v: Word,
    pub start: ElementKey,
    /// Claimed continuous constant: `3k+1`, `6k+1` or `5k+2`.
    pub constant: usize,
    pub j: Option<usize>,
    pub l: Option<usize>,
    pub p1: Option<Word>,
    pub p2: Option<Word>,
    pub report: SyncReport,
}

/// Turns an asynchronous `k`-fellow traveling pair (`u` shorter than `w`)
/// into a synchronously fellow traveling pair with `v` no longer than
/// `u`, following the three-case construction. The result is re-checked
/// against `verify` before it is returned.
#[allow(clippy::too_many_arguments)]
pub fn synchronize(
    m: &dyn Metric,
    verify: &dyn Metric,
    w_start: &ElementKey,
    w: &[Letter],
    u_start: &ElementKey,
    u: &[Letter],
    phi: &Reparameterization,
    k: usize,
) -> Result<Synchronized, FellowError> {
    let (n, mu) = (w.len(), u.len());
    if mu >= n {
        return Err(FellowError::NotShorter { u: mu, w: n });
    }
    if phi.n() != n || phi.m() != mu {
        return Err(FellowError::BadReparameterization(format!(
            "domain {} and range {} do not match |w| = {n}, |u| = {mu}",
            phi.n(),
            phi.m()
        )));
    }
    let s = m.solver();
    let pw = positions(s, w_start, w);
    let pu = positions(s, u_start, u);
    for t in 0..=n {
        if m.distance_within(&pw[t], &pu[phi.get(t)], k).is_none() {
            return Err(FellowError::Premise { t, k });
        }
    }
    let f = |t: usize| phi.get(t) as i64;
    let lag = |t: usize| t as i64 - f(t);
    let kk = 2 * k as i64;
    let connector = |x: &ElementKey, y: &ElementKey| m.geodesic_within(x, y, k).expect("premise bounds the gap by k");

    let out = if let Some(j) = (0..=n).find(|&t| lag(t) > kk) {
        // Case 2: u dawdles; cut across from w(l) to u(phi(l)) and back
        // from u(phi(j)) to w(j).
        let l = (0..j)
            .rev()
            .find(|&l| (j - l) as i64 > f(j) - f(l) + kk)
            .expect("l = 0 qualifies");
        let p1 = connector(&pw[l], &pu[phi.get(l)]);
        let p2 = connector(&pu[phi.get(j)], &pw[j]);
        let v = Word::from_letters(&w[..l])
            .concat(&p1)
            .concat(&u[phi.get(l)..phi.get(j)])
            .concat(&p2)
            .concat(&w[j..]);
        if v.len() >= n {
            return Err(FellowError::Length { case: 2, len: v.len(), bound: n });
        }
        (2, v, w_start.clone(), 6 * k + 1, Some(j), Some(l), Some(p1), Some(p2))
    } else if let Some(j) = (0..=n).rev().find(|&t| -lag(t) > kk) {
        // Case 3: u runs ahead; follow w to time j, cross to u(phi(j)),
        // finish u and come back to w's endpoint.
        let p1 = connector(&pw[j], &pu[phi.get(j)]);
        let p2 = connector(&pu[mu], &pw[n]);
        let v = Word::from_letters(&w[..j]).concat(&p1).concat(&u[phi.get(j)..]).concat(&p2);
        if v.len() >= mu {
            return Err(FellowError::Length { case: 3, len: v.len(), bound: mu });
        }
        (3, v, w_start.clone(), 5 * k + 2, Some(j), None, Some(p1), Some(p2))
    } else {
        (1, Word::from_letters(u), u_start.clone(), 3 * k + 1, None, None, None, None)
    };
    let (case, v, start, constant, j, l, p1, p2) = out;
    let report = sync_ft_from(verify, w_start, w, &start, &v, constant - 1);
    if !report.holds {
        return Err(FellowError::Constant { case, constant, t: report.first_violation.unwrap_or(0) });
    }
    Ok(Synchronized { case, v, start, constant, j, l, p1, p2, report })
}

#[cfg(test)]
mod tests;
