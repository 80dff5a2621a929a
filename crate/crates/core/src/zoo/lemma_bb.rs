//! Minimal word length over the Stallings generators reaching a given
//! `rho`-image, by A* search in `(F_2)^3`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use super::{stallings_keyed, stallings_rho};
use crate::cayley::bounded_distance;
use crate::presentation::Word;
use crate::solver::product::Parts;
use crate::solver::{GroupBackend, WordProblem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZooSearchError {
    #[error("search budget of {budget} expansions exceeded; proven lower bound {lower_bound}")]
    Budget { budget: usize, lower_bound: usize },
    #[error("{0}")]
    BadTarget(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbSearch {
    pub n: usize,
    pub z: char,
    /// Minimal length of a word whose image is the target.
    pub min_length: usize,
    /// A shortest word found.
    pub witness: Word,
    pub expanded: usize,
}

/// `f^n d^n E^n C^(n-1) v Z` as an element of `(F_2)^3`; `v` is given by its image.
fn target_parts(n: usize, z: char, v: Option<&Parts>) -> Result<Parts, ZooSearchError> {
    if n == 0 {
        return Err(ZooSearchError::BadTarget("n must be at least 1".into()));
    }
    let zi = match z {
        'c' | 'd' => 1,
        'e' | 'f' => 2,
        _ => return Err(ZooSearchError::BadTarget(format!("z must be one of c,d,e,f, got {z:?}"))),
    };
    let rho = stallings_rho();
    let f2 = format!("{}{}", "d".repeat(n), "C".repeat(n - 1));
    let f3 = format!("{}{}", "f".repeat(n), "E".repeat(n));
    let mut head = rho.parts_of(&["", &f2, &f3]).expect("valid symbols");
    if let Some(v) = v {
        head = rho.multiply(&head, v);
    }
    let mut zc = [String::new(), String::new(), String::new()];
    zc[zi].push(z.to_ascii_uppercase());
    let zp = rho.parts_of(&[&zc[0], &zc[1], &zc[2]]).expect("valid symbols");
    Ok(rho.multiply(&head, &zp))
}

/// The target of the first length lemma, one reduced word per factor.
pub fn lemma_bb_target(n: usize, z: char) -> Result<[String; 3], ZooSearchError> {
    let t = stallings_rho().spell(&target_parts(n, z, None)?);
    Ok([t.0[0].clone(), t.0[1].clone(), t.0[2].clone()])
}

fn total_len(p: &Parts) -> usize {
    p.iter().map(Vec::len).sum()
}

/// A* from the identity to `target`. Each generator changes the total
/// reduced length of `x^-1 target` by at most 2, so half of it (rounded
/// up) is a consistent heuristic and the first time the target is popped
/// its distance is exact.
fn astar(target: &Parts, budget: usize) -> Result<(usize, Word, usize), ZooSearchError> {
    let rho = stallings_rho();
    let al = rho.alphabet().clone();
    let h = |e: &Parts| total_len(&rho.multiply(&rho.inverse(e), target)).div_ceil(2);
    let start = rho.identity();
    let mut nodes: Vec<(Parts, usize, Option<(usize, u8)>)> = vec![(start.clone(), 0, None)];
    let mut best: HashMap<Parts, usize> = HashMap::from([(start.clone(), 0)]);
    let mut heap = BinaryHeap::from([Reverse((h(&start), 0usize, 0usize))]);
    let mut expanded = 0;
    let mut lower = 0;
    while let Some(Reverse((f, g, id))) = heap.pop() {
        lower = lower.max(f);
        let e = nodes[id].0.clone();
        if best.get(&e).is_some_and(|&b| b < g) {
            continue;
        }
        if &e == target {
            let mut letters = Vec::new();
            let mut cur = id;
            while let Some((p, x)) = nodes[cur].2 {
                letters.push(crate::presentation::Letter(x));
                cur = p;
            }
            letters.reverse();
            return Ok((g, Word(letters), expanded));
        }
        expanded += 1;
        if expanded > budget {
            return Err(ZooSearchError::Budget { budget, lower_bound: lower });
        }
        for x in al.letters() {
            let mut next = e.clone();
            rho.mul_letter(&mut next, x);
            let ng = g + 1;
            if best.get(&next).is_some_and(|&b| b <= ng) {
                continue;
            }
            best.insert(next.clone(), ng);
            let nf = ng + h(&next);
            nodes.push((next, ng, Some((id, x.0))));
            heap.push(Reverse((nf, ng, nodes.len() - 1)));
        }
    }
    Err(ZooSearchError::BadTarget("target is not in the image of rho".into()))
}

/// Minimal `|w|` with `rho(w) = f^n d^n E^n C^(n-1) Z`.
pub fn lemma_bb_min_length(n: usize, z: char, budget: usize) -> Result<BbSearch, ZooSearchError> {
    let target = target_parts(n, z, None)?;
    let (min_length, witness, expanded) = astar(&target, budget)?;
    Ok(BbSearch { n, z, min_length, witness, expanded })
}

/// The same with a word `v` inserted before `Z`; `v` must have trivial
/// image in the first factor and length below `n - 1`.
pub fn lemma_bb2_min_length(n: usize, z: char, v: &Word, budget: usize) -> Result<BbSearch, ZooSearchError> {
    let rho = stallings_rho();
    let pv = rho.eval(v);
    if !pv[0].is_empty() {
        return Err(ZooSearchError::BadTarget("v must have trivial image in <a,b>".into()));
    }
    if v.len() + 1 >= n {
        return Err(ZooSearchError::BadTarget(format!("v must be shorter than n - 1 = {}", n.saturating_sub(1))));
    }
    let target = target_parts(n, z, Some(&pv))?;
    let (min_length, witness, expanded) = astar(&target, budget)?;
    Ok(BbSearch { n, z, min_length, witness, expanded })
}

/// Exact distance to the first lemma's target by plain bidirectional BFS,
/// if it is at most `cutoff`. Independent of the A* heuristic.
pub fn lemma_bb_min_length_bfs(n: usize, z: char, cutoff: usize) -> Result<Option<usize>, ZooSearchError> {
    let target = target_parts(n, z, None)?;
    let keyed = stallings_keyed();
    let t = keyed.to_key(&target);
    Ok(bounded_distance(&keyed, &keyed.identity(), &t, cutoff))
}
