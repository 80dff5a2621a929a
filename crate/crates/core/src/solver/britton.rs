//! Word-level Britton reduction: repeatedly remove innermost pinches.

use super::{HnnOps, Membership, Side, SolverError};
use crate::presentation::{Letter, Word};

/// A subword `s^-1 u s` (`side = U`) or `s v s^-1` (`side = V`) whose
/// inner word lies in the associated subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pinch {
    /// Index of the opening stable letter.
    pub start: usize,
    /// Index of the closing stable letter.
    pub end: usize,
    pub stable: usize,
    /// Inner word over the base alphabet.
    pub inner: Word,
    pub side: Side,
    pub membership: Membership,
}

impl Pinch {
    pub fn exponent(&self) -> Option<i64> {
        self.membership.exponent()
    }
}

/// The leftmost innermost pinch: consecutive stable letters `x ... y`
/// with a stable-free inner word, `y = x^-1`, and the inner word in the
/// matching subgroup.
pub fn find_pinch(h: &dyn HnnOps, w: &[Letter]) -> Option<Pinch> {
    let st = h.structure();
    let al = h.alphabet();
    let stables: Vec<usize> = (0..w.len()).filter(|&i| st.is_stable(w[i])).collect();
    for pair in stables.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if w[b] != al.inv(w[a]) {
            continue;
        }
        let (i, sign) = st.stable_index(al, w[a])?;
        let side = if sign < 0 { Side::U } else { Side::V };
        let inner = st.base_word(&w[a + 1..b])?;
        let membership = h.membership(i, side, &inner);
        if membership.is_member() {
            return Some(Pinch { start: a, end: b, stable: i, inner, side, membership });
        }
    }
    None
}

/// Removes pinches until none is left, then freely reduces. The result
/// equals `w` in the group and is stable letter reduced.
pub fn britton_reduce(h: &dyn HnnOps, w: &[Letter]) -> Result<Word, SolverError> {
    let st = h.structure();
    let mut cur = h.alphabet().free_reduce(w);
    while let Some(p) = find_pinch(h, &cur) {
        let image = h.image_word(p.stable, p.side, &p.inner).ok_or_else(|| {
            SolverError::Subgroup(format!(
                "membership oracle accepted {} but gave no image",
                h.structure().base.alphabet.show(&p.inner)
            ))
        })?;
        let mut next = Word::from_letters(&cur[..p.start]);
        next = next.concat(&st.lift_word(&image));
        next = next.concat(&cur[p.end + 1..]);
        cur = h.alphabet().free_reduce(&next);
    }
    Ok(cur)
}
