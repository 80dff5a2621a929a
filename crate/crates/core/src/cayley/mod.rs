//! Metric structure of Cayley graphs: balls, distances, geodesic tests
//! and geodesic enumeration.

mod ball;
mod table;

pub use ball::{Ball, BallElement, BallOptions, BallReport, DEFAULT_MEMORY_BUDGET};
pub use table::{stable_hash, KeyHasher, KeyTable};

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::presentation::{Letter, Word};
use crate::solver::{ElementKey, WordProblem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error("memory budget of {budget} bytes exceeded; largest completed radius {completed_radius}")]
    MemoryBudget { budget: usize, completed_radius: usize },
    #[error("word of length {len} is beyond what a radius-{radius} ball can decide")]
    RadiusShortfall { len: usize, radius: usize },
    #[error("{0}")]
    Invalid(String),
}

/// `d(x, y)` if it is at most `cutoff`, by bidirectional BFS on lazily
/// generated neighbors.
pub fn bounded_distance(solver: &dyn WordProblem, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<usize> {
    if x == y {
        return Some(0);
    }
    let mut seen = [HashMap::from([(x.clone(), 0usize)]), HashMap::from([(y.clone(), 0usize)])];
    let mut frontier = [vec![x.clone()], vec![y.clone()]];
    let mut radius = [0usize; 2];
    let mut buf = Vec::new();
    while radius[0] + radius[1] < cutoff {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            return None;
        }
        let mut next = Vec::new();
        for k in std::mem::take(&mut frontier[side]) {
            buf.clear();
            solver.neighbors(&k, &mut buf);
            for n in buf.drain(..) {
                if let Some(&d) = seen[1 - side].get(&n) {
                    return Some(radius[side] + 1 + d);
                }
                if !seen[side].contains_key(&n) {
                    seen[side].insert(n.clone(), radius[side] + 1);
                    next.push(n);
                }
            }
        }
        frontier[side] = next;
        radius[side] += 1;
    }
    None
}

/// The shortlex-first geodesic word from `x` to `y`, if `d(x, y) <= cutoff`.
/// Plain BFS: fine for the short connectors it is used for.
pub fn bounded_geodesic(solver: &dyn WordProblem, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<Word> {
    if x == y {
        return Some(Word::empty());
    }
    let mut parent: HashMap<ElementKey, (usize, Letter)> = HashMap::new();
    let mut order = vec![x.clone()];
    parent.insert(x.clone(), (usize::MAX, Letter(0)));
    let mut start = 0;
    let mut buf = Vec::new();
    for _ in 0..cutoff {
        let end = order.len();
        for i in start..end {
            buf.clear();
            solver.neighbors(&order[i], &mut buf);
            for (l, n) in buf.drain(..).enumerate() {
                if parent.contains_key(&n) {
                    continue;
                }
                parent.insert(n.clone(), (i, Letter(l as u8)));
                if &n == y {
                    let mut letters = vec![Letter(l as u8)];
                    let mut cur = i;
                    while cur != 0 {
                        let (p, x) = parent[&order[cur]];
                        letters.push(x);
                        cur = p;
                    }
                    letters.reverse();
                    return Some(Word(letters));
                }
                order.push(n);
            }
        }
        start = end;
    }
    None
}

/// Whether `w` is geodesic, decided from the ball when it can be.
pub fn is_geodesic(ball: &Ball, w: &[Letter]) -> Result<bool, CayleyError> {
    let k = ball.solver().eval(w);
    match ball.distance(&k) {
        Some(d) => Ok(d == w.len()),
        // Outside B(N) means distance > N.
        None if w.len() == ball.radius() + 1 => Ok(true),
        None => Err(CayleyError::RadiusShortfall { len: w.len(), radius: ball.radius() }),
    }
}

/// Whether `w` is geodesic, by searching for anything shorter.
pub fn is_geodesic_by_search(solver: &dyn WordProblem, w: &[Letter]) -> bool {
    if w.is_empty() {
        return true;
    }
    bounded_distance(solver, &solver.identity(), &solver.eval(w), w.len() - 1).is_none()
}

/// All geodesic words from the identity to ball element `target`, in
/// shortlex order.
pub fn geodesics_to(ball: &Ball, target: usize) -> Geodesics<'_> {
    let al = ball.solver().alphabet();
    let mut ancestors = HashSet::from([target]);
    let mut layer = vec![target];
    while !layer.is_empty() {
        let mut prev = Vec::new();
        for &v in &layer {
            let dv = ball.dist_at(v);
            for x in al.letters() {
                if let Some(p) = ball.neighbor(v, al.inv(x)) {
                    if ball.dist_at(p) + 1 == dv && ancestors.insert(p) {
                        prev.push(p);
                    }
                }
            }
        }
        layer = prev;
    }
    Geodesics { ball, target, ancestors, stack: vec![(0, 0)], word: Vec::new() }
}

pub struct Geodesics<'a> {
    ball: &'a Ball,
    target: usize,
    ancestors: HashSet<usize>,
    /// `(node, next letter to try)` along the current prefix.
    stack: Vec<(usize, usize)>,
    word: Vec<Letter>,
}

impl Iterator for Geodesics<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let n = self.ball.solver().alphabet().len();
        loop {
            let top = self.stack.last_mut()?;
            let node = top.0;
            if node == self.target && top.1 == 0 {
                top.1 = n;
                return Some(Word(self.word.clone()));
            }
            if top.1 >= n {
                self.stack.pop();
                self.word.pop();
                continue;
            }
            let x = Letter(top.1 as u8);
            top.1 += 1;
            if let Some(u) = self.ball.neighbor(node, x) {
                if self.ball.dist_at(u) == self.ball.dist_at(node) + 1 && self.ancestors.contains(&u) {
                    self.stack.push((u, 0));
                    self.word.push(x);
                }
            }
        }
    }
}

/// Length of a shortest path from `x` to `y` using only vertices of the
/// ball (indices into it), optionally giving up beyond `cutoff`.
pub fn restricted_distance(ball: &Ball, x: usize, y: usize, cutoff: Option<usize>) -> Option<usize> {
    if x == y {
        return Some(0);
    }
    let al = ball.solver().alphabet();
    let mut seen = [HashMap::from([(x, 0usize)]), HashMap::from([(y, 0usize)])];
    let mut frontier = [vec![x], vec![y]];
    let mut radius = [0usize; 2];
    loop {
        if cutoff.is_some_and(|c| radius[0] + radius[1] >= c) {
            return None;
        }
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            return None;
        }
        let mut next = Vec::new();
        for v in std::mem::take(&mut frontier[side]) {
            for l in al.letters() {
                let Some(u) = ball.neighbor(v, l) else { continue };
                if let Some(&d) = seen[1 - side].get(&u) {
                    return Some(radius[side] + 1 + d);
                }
                if let std::collections::hash_map::Entry::Vacant(e) = seen[side].entry(u) {
                    e.insert(radius[side] + 1);
                    next.push(u);
                }
            }
        }
        frontier[side] = next;
        radius[side] += 1;
    }
}

/// Distances between arbitrary elements through a shared ball:
/// `d(x, y) = |x^-1 y|`, falling back to bidirectional search beyond the
/// ball's radius.
#[derive(Clone)]
pub struct DistanceOracle {
    ball: Arc<Ball>,
}

impl DistanceOracle {
    pub fn new(ball: Arc<Ball>) -> Self {
        DistanceOracle { ball }
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn solver(&self) -> &dyn WordProblem {
        self.ball.solver().as_ref()
    }

    /// Exact `d(x, y)` when it is at most the ball radius.
    pub fn distance(&self, x: &ElementKey, y: &ElementKey) -> Option<usize> {
        self.ball.distance(&self.solver().between(x, y))
    }

    /// `d(x, y)` if at most `cutoff`.
    pub fn distance_within(&self, x: &ElementKey, y: &ElementKey, cutoff: usize) -> Option<usize> {
        if cutoff <= self.ball.radius() {
            self.distance(x, y).filter(|&d| d <= cutoff)
        } else {
            bounded_distance(self.solver(), x, y, cutoff)
        }
    }

    pub fn within(&self, x: &ElementKey, y: &ElementKey, k: usize) -> bool {
        self.distance_within(x, y, k).is_some()
    }

    /// Shortlex-first geodesic word from `x` to `y`, when `d(x, y)` is
    /// within the ball radius.
    pub fn geodesic(&self, x: &ElementKey, y: &ElementKey) -> Option<Word> {
        let i = self.ball.index_of(&self.solver().between(x, y))?;
        Some(self.ball.word_to(i))
    }
}
