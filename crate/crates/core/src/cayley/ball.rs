use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use super::table::KeyTable;
use super::CayleyError;
use crate::presentation::{Letter, Word};
use crate::solver::{ElementKey, Solver};

pub const DEFAULT_MEMORY_BUDGET: usize = 8 << 30;
const NO_PARENT: u8 = u8::MAX;
pub(crate) const OUTSIDE: u32 = u32::MAX;
/// Frontier elements expanded per parallel batch.
const BLOCK: usize = 1 << 15;

#[derive(Clone, Debug)]
pub struct BallOptions {
    /// Abort once the index would use more than this many bytes.
    pub memory_budget: usize,
    /// Store the full neighbor table (needed by ball tracing and fast
    /// in-ball searches).
    pub adjacency: bool,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { memory_budget: DEFAULT_MEMORY_BUDGET, adjacency: false }
    }
}

/// The ball `B(N)` around the identity: every element within distance
/// `N`, its exact distance and the last letter of its shortlex-first
/// geodesic.
///
/// Elements are numbered in BFS order. Because each layer is expanded in
/// the order of its elements and letters are tried in alphabet order, the
/// first discovery of an element extends the shortlex-least geodesic of
/// its predecessor, so parent pointers spell shortlex-first geodesics.
pub struct Ball {
    solver: Solver,
    radius: usize,
    table: KeyTable,
    dist: Vec<u8>,
    parent: Vec<u8>,
    up: Vec<u32>,
    layers: Vec<usize>,
    adjacency: Option<Vec<u32>>,
}

impl Ball {
    pub fn build(solver: Solver, radius: usize) -> Result<Ball, CayleyError> {
        Ball::build_with(solver, radius, &BallOptions::default())
    }

    pub fn build_with(solver: Solver, radius: usize, opts: &BallOptions) -> Result<Ball, CayleyError> {
        if radius > 250 {
            return Err(CayleyError::Invalid(format!("radius {radius} too large")));
        }
        let nletters = solver.alphabet().len();
        let mut ball = Ball {
            table: KeyTable::new(),
            dist: vec![0],
            parent: vec![NO_PARENT],
            up: vec![0],
            layers: vec![0, 1],
            adjacency: opts.adjacency.then(Vec::new),
            radius: 0,
            solver,
        };
        ball.table.insert(ball.solver.identity().as_bytes());
        for r in 0..radius {
            let (start, end) = (ball.layers[r], ball.layers[r + 1]);
            for block in (start..end).step_by(BLOCK) {
                let frontier = block..(block + BLOCK).min(end);
                let neighbors = ball.expand(frontier.clone());
                for (i, nbrs) in frontier.zip(neighbors) {
                    for (x, k) in nbrs.iter().enumerate() {
                        let (j, fresh) = ball.table.insert(k.as_bytes());
                        if fresh {
                            ball.dist.push((r + 1) as u8);
                            ball.parent.push(x as u8);
                            ball.up.push(i as u32);
                        }
                        if let Some(adj) = ball.adjacency.as_mut() {
                            debug_assert_eq!(adj.len(), i * nletters + x);
                            adj.push(j as u32);
                        }
                    }
                }
                if ball.memory() > opts.memory_budget {
                    return Err(CayleyError::MemoryBudget { budget: opts.memory_budget, completed_radius: r });
                }
            }
            ball.layers.push(ball.table.len());
            ball.radius = r + 1;
        }
        if ball.adjacency.is_some() {
            // The outer sphere's edges may leave the ball.
            let (start, end) = (ball.layers[radius], ball.layers[radius + 1]);
            for block in (start..end).step_by(BLOCK) {
                let neighbors = ball.expand(block..(block + BLOCK).min(end));
                let table = &ball.table;
                let adj = ball.adjacency.as_mut().expect("checked");
                for nbrs in neighbors {
                    adj.extend(nbrs.iter().map(|k| table.get(k.as_bytes()).map_or(OUTSIDE, |j| j as u32)));
                }
            }
            if ball.memory() > opts.memory_budget {
                return Err(CayleyError::MemoryBudget {
                    budget: opts.memory_budget,
                    completed_radius: radius.saturating_sub(1),
                });
            }
        }
        Ok(ball)
    }

    /// Neighbor keys of a range of elements, computed in parallel and
    /// returned in element order.
    fn expand(&self, range: Range<usize>) -> Vec<Vec<ElementKey>> {
        let idx: Vec<usize> = range.collect();
        idx.par_chunks(256)
            .flat_map_iter(|chunk| {
                chunk.iter().map(|&i| {
                    let mut out = Vec::with_capacity(self.solver.alphabet().len());
                    self.solver.neighbors(&self.key(i), &mut out);
                    out
                })
            })
            .collect()
    }

    pub fn memory(&self) -> usize {
        self.table.bytes_used()
            + self.dist.capacity()
            + self.parent.capacity()
            + 4 * self.up.capacity()
            + self.adjacency.as_ref().map_or(0, |a| 4 * a.capacity())
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn key(&self, i: usize) -> ElementKey {
        ElementKey::from_bytes(self.table.key(i))
    }

    pub fn index_of(&self, k: &ElementKey) -> Option<usize> {
        self.table.get(k.as_bytes())
    }

    pub fn contains(&self, k: &ElementKey) -> bool {
        self.index_of(k).is_some()
    }

    /// Exact distance from the identity, if `k` lies in the ball.
    pub fn distance(&self, k: &ElementKey) -> Option<usize> {
        self.index_of(k).map(|i| self.dist[i] as usize)
    }

    pub fn dist_at(&self, i: usize) -> usize {
        self.dist[i] as usize
    }

    /// Predecessor of `i` on its shortlex-first geodesic.
    pub fn parent(&self, i: usize) -> Option<usize> {
        (self.parent[i] != NO_PARENT).then_some(self.up[i] as usize)
    }

    pub fn parent_letter(&self, i: usize) -> Option<Letter> {
        (self.parent[i] != NO_PARENT).then_some(Letter(self.parent[i]))
    }

    /// Indices of the sphere `S(r)`.
    pub fn layer(&self, r: usize) -> Range<usize> {
        self.layers[r]..self.layers[r + 1]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.layers.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_adjacency(&self) -> bool {
        self.adjacency.is_some()
    }

    /// Index of `element(i) * x`, or `None` when it leaves the ball.
    pub fn neighbor(&self, i: usize, x: Letter) -> Option<usize> {
        match &self.adjacency {
            Some(adj) => {
                let j = adj[i * self.solver.alphabet().len() + x.index()];
                (j != OUTSIDE).then_some(j as usize)
            }
            None => self.index_of(&self.solver.mul_letter(&self.key(i), x)),
        }
    }

    /// The shortlex-first geodesic to element `i`, read off parent letters.
    pub fn word_to(&self, mut i: usize) -> Word {
        let mut letters = Vec::with_capacity(self.dist[i] as usize);
        while let Some(x) = self.parent_letter(i) {
            letters.push(x);
            i = self.up[i] as usize;
        }
        letters.reverse();
        Word(letters)
    }

    /// Follows `w` from the identity along stored edges; `None` when the
    /// path leaves the ball. Independent of the solver's multiplication
    /// once the adjacency table exists.
    pub fn trace(&self, w: &[Letter]) -> Option<usize> {
        let mut i = 0;
        for &x in w {
            i = self.neighbor(i, x)?;
        }
        Some(i)
    }

    pub fn report(&self, with_elements: bool) -> BallReport {
        BallReport {
            radius: self.radius,
            size: self.len(),
            sphere_sizes: self.sphere_sizes(),
            elements: with_elements.then(|| {
                let al = self.solver.alphabet();
                (0..self.len())
                    .map(|i| BallElement { word: al.show(&self.word_to(i)).to_string(), distance: self.dist_at(i) })
                    .collect()
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BallReport {
    pub radius: usize,
    pub size: usize,
    pub sphere_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<BallElement>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallElement {
    pub word: String,
    pub distance: usize,
}
