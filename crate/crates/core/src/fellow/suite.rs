//! Seeded generation of asynchronously fellow traveling loop pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{walk_back, Metric, Reach, Reparameterization};
use crate::cayley::bounded_geodesic;
use crate::presentation::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsyncPair {
    pub w: Word,
    pub u: Word,
    pub phi: Reparameterization,
}

/// A random loop: a random walk of `out` letters closed by the
/// shortlex-first geodesic home.
fn random_loop(m: &dyn Metric, rng: &mut ChaCha8Rng, out: usize, close: usize) -> Option<Word> {
    let s = m.solver();
    let letters: Vec<Letter> = s.alphabet().letters().collect();
    let walk: Word = (0..out).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
    let back = bounded_geodesic(s, &s.eval(&walk), &s.identity(), close)?;
    Some(walk.concat(&back))
}

/// `count` pairs `(w, u)` of loops at the identity with `|u| < |w| <=
/// max_len` that asynchronously `k`-fellow travel, each with the
/// reparameterization read off a random monotone pairing. The shorter loop is a random
/// loop, a prefix-retracing loop or the empty loop; a quarter of the pairs
/// are strings of backtracks `x x^-1`, where the shorter one runs ahead.
/// Together these make all three cases of the synchronization arise.
pub fn async_pairs(m: &dyn Metric, k: usize, count: usize, max_len: usize, seed: u64) -> Vec<AsyncPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = m.solver();
    let al = s.alphabet().clone();
    let letters: Vec<Letter> = al.letters().collect();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 10_000 * count.max(1) {
        attempts += 1;
        let backtracks = |r: usize, rng: &mut ChaCha8Rng| -> Word {
            (0..r)
                .flat_map(|_| {
                    let x = letters[rng.gen_range(0..letters.len())];
                    [x, al.inv(x)]
                })
                .collect()
        };
        if rng.gen_range(0..4) == 0 {
            // Both loops dawdle at the identity; u finishes early.
            // With one backtrack fewer, u never lags by more than 2k.
            let r = rng.gen_range(2..=max_len / 2);
            let w = backtracks(r, &mut rng);
            let fewer = if rng.gen_bool(0.5) { r - 1 } else { rng.gen_range(1..r) };
            let u = backtracks(fewer, &mut rng);
            if let Some(phi) = random_phi(m, &w, &u, k, &mut rng) {
                out.push(AsyncPair { w, u, phi });
            }
            continue;
        }
        let half = rng.gen_range(1..=max_len / 2);
        let Some(w) = random_loop(m, &mut rng, half, max_len - half) else { continue };
        if w.len() < 2 || w.len() > max_len {
            continue;
        }
        let u = match rng.gen_range(0..3) {
            0 => Word::empty(),
            1 => {
                // Walk out along a prefix of w and straight back.
                let p = rng.gen_range(0..w.len() / 2 + 1);
                Word::from_letters(&w[..p]).concat(&al.invert(&w[..p]))
            }
            _ => {
                let h = rng.gen_range(0..=(w.len() - 1) / 2);
                match random_loop(m, &mut rng, h, w.len() - 1 - h) {
                    Some(u) => u,
                    None => continue,
                }
            }
        };
        if u.len() >= w.len() {
            continue;
        }
        if let Some(phi) = random_phi(m, &w, &u, k, &mut rng) {
            out.push(AsyncPair { w, u, phi });
        }
    }
    out
}

/// A uniformly random walk back through the monotone pairings within `k`.
fn random_phi(m: &dyn Metric, w: &[Letter], u: &[Letter], k: usize, rng: &mut ChaCha8Rng) -> Option<Reparameterization> {
    let id = m.solver().identity();
    let r = Reach::new(m, &id, w, &id, u, k)?;
    walk_back(&r, |moves| moves[rng.gen_range(0..moves.len())])
}
