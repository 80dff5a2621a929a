//! The shortening search. A candidate path `u` fellow traveling `w` is
//! tracked by its offset `w(t)^-1 u(t)`, an element of `B(k)`; moving one
//! step along both paths sends offset `o` to `x_t^-1 o y`. Sets of
//! reachable offsets are bitsets over the ball's index order, so the
//! search is complete and costs `O(|w| * |B(k)| * |X|)` per start offset.

use std::sync::Arc;

use smallvec::SmallVec;

use super::PropertyError;
use crate::cayley::{Ball, BallOptions, DEFAULT_MEMORY_BUDGET};
use crate::presentation::{Letter, Word};
use crate::solver::Solver;

const NONE: u32 = u32::MAX;
/// Above this many offsets transitions are stored as lists, not bitsets.
const DENSE_LIMIT: usize = 2048;

pub(crate) type Bits = Vec<u64>;

fn has(b: &[u64], i: usize) -> bool {
    b[i >> 6] >> (i & 63) & 1 == 1
}

fn set(b: &mut [u64], i: usize) {
    b[i >> 6] |= 1 << (i & 63);
}

fn ones(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(wi, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let tz = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(wi * 64 + tz)
        })
    })
}

enum Trans {
    /// `rows[(xt * nk + o) * words ..]`: successors of offset `o` under `w`-letter `xt`.
    Dense { rows: Vec<u64> },
    /// CSR lists of successors.
    Sparse { start: Vec<u32>, succ: Vec<u32> },
}

/// Counts work so long searches can be cut off.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub limit: u64,
    pub used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub(crate) fn spend(&mut self, n: u64) -> Result<(), PropertyError> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            return Err(PropertyError::Budget { limit: self.limit });
        }
        Ok(())
    }
}

/// The ball, neighborhoods and transition tables for one constant `k`.
pub struct Frame {
    ball: Arc<Ball>,
    k: usize,
    nk: usize,
    words: usize,
    letters: usize,
    /// `left[a * n1 + i]`: index of `a * elem(i)` for `i` in `B(k+1)`.
    left: Vec<u32>,
    n1: usize,
    trans: Trans,
}

impl Frame {
    /// Builds a ball of radius `max(k + 1, radius)` with adjacency.
    pub fn new(solver: Solver, k: usize, radius: usize) -> Result<Frame, PropertyError> {
        let opts = BallOptions { memory_budget: DEFAULT_MEMORY_BUDGET, adjacency: true };
        Self::with_options(solver, k, radius, &opts)
    }

    pub fn with_options(solver: Solver, k: usize, radius: usize, opts: &BallOptions) -> Result<Frame, PropertyError> {
        let opts = BallOptions { adjacency: true, ..*opts };
        let ball = Ball::build_with(solver, radius.max(k + 1), &opts)?;
        Self::from_ball(Arc::new(ball), k)
    }

    pub fn from_ball(ball: Arc<Ball>, k: usize) -> Result<Frame, PropertyError> {
        if ball.radius() < k + 1 || !ball.has_adjacency() {
            return Err(PropertyError::Invalid(format!(
                "shortening at k = {k} needs a ball of radius {} with adjacency",
                k + 1
            )));
        }
        let solver = ball.solver().clone();
        let al = solver.alphabet().clone();
        let letters = al.len();
        let nk = ball.layer(k).end;
        let n1 = ball.layer(k + 1).end;
        let mut left = vec![NONE; letters * n1];
        for a in al.letters() {
            let ka = solver.eval(&[a]);
            for i in 0..n1 {
                // Left multiplication is not a ball edge; ask the solver.
                let key = solver.multiply(&ka, &ball.key(i));
                if let Some(j) = ball.index_of(&key) {
                    left[a.index() * n1 + i] = j as u32;
                }
            }
        }
        let mut frame = Frame {
            ball,
            k,
            nk,
            words: nk.div_ceil(64),
            letters,
            left,
            n1,
            trans: Trans::Sparse { start: Vec::new(), succ: Vec::new() },
        };
        frame.trans = frame.build_trans();
        Ok(frame)
    }

    pub(crate) fn step_raw(&self, o: usize, xt: Letter, y: Letter) -> Option<usize> {
        let al = self.ball.solver().alphabet();
        let r = self.ball.neighbor(o, y)?;
        let j = self.left[al.inv(xt).index() * self.n1 + r];
        (j != NONE && (j as usize) < self.nk).then_some(j as usize)
    }

    fn build_trans(&self) -> Trans {
        let al = self.ball.solver().alphabet().clone();
        if self.nk <= DENSE_LIMIT {
            let mut rows = vec![0u64; self.letters * self.nk * self.words];
            for xt in al.letters() {
                for o in 0..self.nk {
                    let base = (xt.index() * self.nk + o) * self.words;
                    for y in al.letters() {
                        if let Some(j) = self.step_raw(o, xt, y) {
                            set(&mut rows[base..base + self.words], j);
                        }
                    }
                }
            }
            Trans::Dense { rows }
        } else {
            let mut start = Vec::with_capacity(self.letters * self.nk + 1);
            let mut succ = Vec::new();
            for xt in al.letters() {
                for o in 0..self.nk {
                    start.push(succ.len() as u32);
                    let mut s: Vec<u32> = al.letters().filter_map(|y| self.step_raw(o, xt, y)).map(|j| j as u32).collect();
                    s.sort_unstable();
                    s.dedup();
                    succ.extend(s);
                }
            }
            start.push(succ.len() as u32);
            Trans::Sparse { start, succ }
        }
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn solver(&self) -> &Solver {
        self.ball.solver()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of offsets, `|B(k)|`.
    pub fn offsets(&self) -> usize {
        self.nk
    }

    pub(crate) fn empty_bits(&self) -> Bits {
        vec![0; self.words]
    }

    pub(crate) fn singleton(&self, o: usize) -> Bits {
        let mut b = self.empty_bits();
        set(&mut b, o);
        b
    }

    /// Offsets reachable in one step from `cur` while `w` reads `xt`.
    pub(crate) fn advance(&self, cur: &[u64], xt: Letter, out: &mut Bits, budget: &mut Budget) -> Result<(), PropertyError> {
        out.clear();
        out.resize(self.words, 0);
        let mut n = 0u64;
        match &self.trans {
            Trans::Dense { rows } => {
                for o in ones(cur) {
                    n += 1;
                    let base = (xt.index() * self.nk + o) * self.words;
                    for (d, s) in out.iter_mut().zip(&rows[base..base + self.words]) {
                        *d |= s;
                    }
                }
            }
            Trans::Sparse { start, succ } => {
                for o in ones(cur) {
                    let r = xt.index() * self.nk + o;
                    let (a, b) = (start[r] as usize, start[r + 1] as usize);
                    n += (b - a) as u64;
                    for &j in &succ[a..b] {
                        set(out, j as usize);
                    }
                }
            }
        }
        budget.spend(n.max(1))
    }

    /// `x * o` for an offset `o` in `B(k)`, if the product is in `B(k)`.
    pub(crate) fn left_mul(&self, x: Letter, o: usize) -> Option<usize> {
        let j = self.left[x.index() * self.n1 + o];
        (j != NONE && (j as usize) < self.nk).then_some(j as usize)
    }

    /// `beta[t] = w(t)^-1 e` for the endpoint `e = w(n) * beta_n`, going
    /// back from `t = n` while it stays in `B(k)`; `None` beyond.
    pub(crate) fn tail(&self, w: &[Letter], beta_n: usize) -> Vec<Option<usize>> {
        let n = w.len();
        let mut beta = vec![None; n + 1];
        beta[n] = Some(beta_n);
        for t in (0..n).rev() {
            match self.left_mul(w[t], beta[t + 1].expect("checked")) {
                Some(b) => beta[t] = Some(b),
                None => break,
            }
        }
        beta
    }

    /// A path `u` with `u(0) = w(0) * sigma`, ending at `w(n) * beta_n`,
    /// `|u| <= max_len`, and `d(w(t), u(t)) <= k` at every integer time
    /// (both paths frozen at their ends). Shortest such `u`, and among
    /// those the lexicographically least.
    pub fn solve(
        &self,
        w: &[Letter],
        sigma: usize,
        beta_n: usize,
        max_len: usize,
        budget: &mut Budget,
    ) -> Result<Option<Word>, PropertyError> {
        self.solve_range(w, sigma, beta_n, 0, max_len, budget)
    }

    /// [`Frame::solve`] restricted to `min_len <= |u| <= max_len`.
    pub fn solve_range(
        &self,
        w: &[Letter],
        sigma: usize,
        beta_n: usize,
        min_len: usize,
        max_len: usize,
        budget: &mut Budget,
    ) -> Result<Option<Word>, PropertyError> {
        if sigma >= self.nk || beta_n >= self.nk || min_len > max_len {
            return Ok(None);
        }
        let beta = self.tail(w, beta_n);
        let limit = max_len.min(w.len());
        if let (1, Trans::Dense { rows }) = (self.words, &self.trans) {
            return self.solve_small(rows, w, sigma, &beta, min_len, limit, budget);
        }
        let mut layers: Vec<Bits> = vec![self.singleton(sigma)];
        for m in 0..=limit {
            if let Some(b) = beta[m].filter(|_| m >= min_len) {
                if has(&layers[m], b) {
                    return Ok(Some(self.trace_back(w, &layers, b, m)));
                }
            }
            if m == limit {
                break;
            }
            let mut next = self.empty_bits();
            self.advance(&layers[m], w[m], &mut next, budget)?;
            layers.push(next);
        }
        Ok(None)
    }

    /// [`Frame::solve`] with one-word bitsets kept on the stack.
    fn solve_small(
        &self,
        rows: &[u64],
        w: &[Letter],
        sigma: usize,
        beta: &[Option<usize>],
        min_len: usize,
        limit: usize,
        budget: &mut Budget,
    ) -> Result<Option<Word>, PropertyError> {
        let al = self.ball.solver().alphabet();
        let mut layers: SmallVec<[u64; 32]> = SmallVec::new();
        layers.push(1 << sigma);
        let mut steps = 0u64;
        let mut hit = None;
        for m in 0..=limit {
            if let Some(b) = beta[m].filter(|_| m >= min_len) {
                if layers[m] >> b & 1 == 1 {
                    hit = Some((m, b));
                    break;
                }
            }
            if m == limit {
                break;
            }
            let mut next = 0u64;
            let mut x = layers[m];
            let base = w[m].index() * self.nk;
            while x != 0 {
                let o = x.trailing_zeros() as usize;
                x &= x - 1;
                next |= rows[base + o];
                steps += 1;
            }
            layers.push(next);
        }
        budget.spend(steps.max(1))?;
        let Some((m, target)) = hit else { return Ok(None) };
        let mut back: SmallVec<[u64; 32]> = SmallVec::from_elem(0, m + 1);
        back[m] = 1 << target;
        for t in (0..m).rev() {
            let mut x = layers[t];
            let base = w[t].index() * self.nk;
            while x != 0 {
                let o = x.trailing_zeros() as usize;
                x &= x - 1;
                if rows[base + o] & back[t + 1] != 0 {
                    back[t] |= 1 << o;
                }
            }
        }
        let mut o = sigma;
        let mut u = Word::empty();
        for t in 0..m {
            let (y, j) = al
                .letters()
                .find_map(|y| self.step_raw(o, w[t], y).filter(|&j| back[t + 1] >> j & 1 == 1).map(|j| (y, j)))
                .expect("layer is backward reachable");
            o = j;
            u.push(y);
        }
        Ok(Some(u))
    }

    /// Whether [`Frame::solve`] would find a path; no reconstruction and,
    /// for small neighborhoods, no allocation.
    pub(crate) fn reachable(
        &self,
        w: &[Letter],
        sigma: usize,
        beta_n: usize,
        max_len: usize,
        budget: &mut Budget,
    ) -> Result<bool, PropertyError> {
        if sigma >= self.nk || beta_n >= self.nk {
            return Ok(false);
        }
        let n = w.len();
        // First time from which the endpoint stays within k of w.
        let mut beta: SmallVec<[u32; 32]> = SmallVec::from_elem(NONE, n + 1);
        beta[n] = beta_n as u32;
        for t in (0..n).rev() {
            match self.left_mul(w[t], beta[t + 1] as usize) {
                Some(b) => beta[t] = b as u32,
                None => break,
            }
        }
        let limit = max_len.min(n);
        if let (1, Trans::Dense { rows }) = (self.words, &self.trans) {
            let mut cur: u64 = 1 << sigma;
            let mut steps = 0u64;
            for m in 0..=limit {
                if beta[m] != NONE && cur >> beta[m] & 1 == 1 {
                    budget.spend(steps.max(1))?;
                    return Ok(true);
                }
                if m == limit {
                    break;
                }
                let mut next = 0u64;
                let mut x = cur;
                let base = w[m].index() * self.nk;
                while x != 0 {
                    let o = x.trailing_zeros() as usize;
                    x &= x - 1;
                    next |= rows[base + o];
                    steps += 1;
                }
                cur = next;
            }
            budget.spend(steps.max(1))?;
            return Ok(false);
        }
        let mut cur = self.singleton(sigma);
        let mut next = self.empty_bits();
        for m in 0..=limit {
            if beta[m] != NONE && has(&cur, beta[m] as usize) {
                return Ok(true);
            }
            if m == limit {
                break;
            }
            self.advance(&cur, w[m], &mut next, budget)?;
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(false)
    }

    /// Lexicographically least letters along reachable layers ending at
    /// `target` in layer `m`.
    fn trace_back(&self, w: &[Letter], layers: &[Bits], target: usize, m: usize) -> Word {
        let al = self.ball.solver().alphabet();
        // back[t]: offsets in layer t that can still reach the target.
        let mut back = vec![self.empty_bits(); m + 1];
        set(&mut back[m], target);
        for t in (0..m).rev() {
            let mut b = self.empty_bits();
            for o in ones(&layers[t]) {
                if al.letters().any(|y| self.step_raw(o, w[t], y).is_some_and(|j| has(&back[t + 1], j))) {
                    set(&mut b, o);
                }
            }
            back[t] = b;
        }
        let mut o = ones(&back[0]).next().expect("start is on a path");
        let mut u = Word::empty();
        for t in 0..m {
            let y = al
                .letters()
                .find(|&y| self.step_raw(o, w[t], y).is_some_and(|j| has(&back[t + 1], j)))
                .expect("layer is backward reachable");
            o = self.step_raw(o, w[t], y).expect("checked");
            u.push(y);
        }
        u
    }

    /// Shortlex-least word for an offset.
    pub fn offset_word(&self, o: usize) -> Word {
        self.ball.word_to(o)
    }

    pub(crate) fn contains(b: &[u64], i: usize) -> bool {
        has(b, i)
    }
}
