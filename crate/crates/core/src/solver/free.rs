use super::codec::{get_varint, put_varint};
use super::{GroupBackend, KeyBytes, SolverError};
use crate::presentation::{Alphabet, BackendKind, FreeSpec, Letter, Word};

/// Basis letters are coded `2i` and their inverses `2i + 1`.
type Code = u8;

#[inline]
fn inv_code(c: Code) -> Code {
    c ^ 1
}

fn reduce_into(out: &mut Vec<Code>, codes: &[Code]) {
    for &c in codes {
        if out.last() == Some(&inv_code(c)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
}

fn invert_codes(w: &[Code]) -> Vec<Code> {
    w.iter().rev().map(|&c| inv_code(c)).collect()
}

/// Free group on the unmapped generators; mapped generators abbreviate
/// basis words (`c = abAB` in the Bridson base).
#[derive(Clone, Debug)]
pub struct FreeGroup {
    alphabet: Alphabet,
    rank: usize,
    images: Vec<Vec<Code>>,
    /// Alphabet letter spelling each basis code.
    code_letter: Vec<Letter>,
}

impl FreeGroup {
    pub fn new(alphabet: Alphabet, spec: &FreeSpec) -> Result<Self, SolverError> {
        let mapped = |l: Letter| spec.map.iter().any(|(m, _)| *m == l || alphabet.inv(*m) == l);
        let mut images: Vec<Option<Vec<Code>>> = vec![None; alphabet.len()];
        let mut code_letter = Vec::new();
        let mut rank = 0;
        for g in alphabet.generators() {
            if !mapped(g) {
                let c = (2 * rank) as Code;
                images[g.index()] = Some(vec![c]);
                images[alphabet.inv(g).index()] = Some(vec![inv_code(c)]);
                code_letter.push(g);
                code_letter.push(alphabet.inv(g));
                rank += 1;
            }
        }
        if 2 * rank > 255 {
            return Err(SolverError::Invalid("free rank too large".into()));
        }
        for (l, w) in &spec.map {
            let mut img = Vec::new();
            for x in w.iter() {
                let part = images[x.index()]
                    .as_ref()
                    .ok_or_else(|| SolverError::Invalid(format!("image of {} is not over the basis", alphabet.name(*l))))?;
                reduce_into(&mut img, part);
            }
            images[alphabet.inv(*l).index()] = Some(invert_codes(&img));
            images[l.index()] = Some(img);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| im.ok_or_else(|| SolverError::Invalid(format!("letter {} has no image", alphabet.names()[i]))))
            .collect::<Result<_, _>>()?;
        Ok(FreeGroup { alphabet, rank, images, code_letter })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduced basis-code image of a word.
    pub fn reduce_word(&self, w: &[Letter]) -> Vec<u8> {
        let mut out = Vec::new();
        for &x in w {
            reduce_into(&mut out, &self.images[x.index()]);
        }
        out
    }
}

fn shortlex_codes(a: &[Code], b: &[Code]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl GroupBackend for FreeGroup {
    type Elem = Vec<Code>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn kind(&self) -> BackendKind {
        BackendKind::Free
    }
    fn identity(&self) -> Vec<Code> {
        Vec::new()
    }
    fn mul_letter(&self, e: &mut Vec<Code>, x: Letter) {
        reduce_into(e, &self.images[x.index()]);
    }
    fn multiply(&self, a: &Vec<Code>, b: &Vec<Code>) -> Vec<Code> {
        let mut out = a.clone();
        reduce_into(&mut out, b);
        out
    }
    fn inverse(&self, a: &Vec<Code>) -> Vec<Code> {
        invert_codes(a)
    }
    fn encode(&self, e: &Vec<Code>, out: &mut KeyBytes) {
        put_varint(out, e.len() as u64);
        out.extend_from_slice(e);
    }
    fn decode(&self, b: &[u8], pos: &mut usize) -> Vec<Code> {
        let n = get_varint(b, pos) as usize;
        let v = b[*pos..*pos + n].to_vec();
        *pos += n;
        v
    }
    fn word_of(&self, e: &Vec<Code>) -> Option<Word> {
        Some(e.iter().map(|&c| self.code_letter[c as usize]).collect())
    }
    fn describe(&self, e: &Vec<Code>) -> String {
        let w = self.word_of(e).unwrap_or_default();
        self.alphabet.show(&w).to_string()
    }
    fn cyclic_exponent(&self, e: &Vec<Code>, g: &Vec<Code>) -> Option<i64> {
        // Conjugate g = c h c^-1 down to its cyclic core h; powers of h
        // concatenate literally.
        let mut k = 0;
        while 2 * k + 2 <= g.len() && g[g.len() - 1 - k] == inv_code(g[k]) {
            k += 1;
        }
        let (c, h) = (&g[..k], &g[k..g.len() - k]);
        let mut conj = invert_codes(c);
        reduce_into(&mut conj, e);
        reduce_into(&mut conj, c);
        CyclicFreeOracle { gen: h.to_vec() }.exponent(&conj)
    }
    fn cyclic_coset(&self, e: &Vec<Code>, g: &Vec<Code>) -> Option<(Vec<Code>, i64)> {
        // |e g^-m| >= |m||g| - |e|, so only |m| <= 2|e|/|g| can beat m = 0.
        let bound = (2 * e.len() / g.len().max(1)) as i64 + 1;
        let mut best: Option<(Vec<Code>, i64)> = None;
        for m in -bound..=bound {
            let r = self.multiply(e, &self.pow(g, -m));
            let better = match &best {
                None => true,
                Some((b, _)) => shortlex_codes(&r, b).is_lt(),
            };
            if better {
                best = Some((r, m));
            }
        }
        best
    }
    fn check_cyclic_generator(&self, g: &Vec<Code>) -> Result<(), SolverError> {
        CyclicFreeOracle::new(g.clone()).map(|_| ())
    }
    fn pow(&self, g: &Vec<Code>, m: i64) -> Vec<Code> {
        let base = if m < 0 { invert_codes(g) } else { g.clone() };
        let mut out = Vec::with_capacity(base.len() * m.unsigned_abs() as usize);
        for _ in 0..m.unsigned_abs() {
            reduce_into(&mut out, &base);
        }
        out
    }
}

/// Exact membership in `<g>` for a cyclically reduced `g` that is not a
/// proper power: then powers of `g` concatenate without cancellation and
/// `w` lies in `<g>` iff its reduced form is literally `g^m`.
#[derive(Clone, Debug)]
pub struct CyclicFreeOracle {
    gen: Vec<u8>,
}

impl CyclicFreeOracle {
    pub fn new(gen: Vec<u8>) -> Result<Self, SolverError> {
        let n = gen.len();
        if n == 0 {
            return Err(SolverError::Subgroup("cyclic generator is trivial".into()));
        }
        if gen.windows(2).any(|p| p[1] == inv_code(p[0])) || (n > 1 && gen[n - 1] == inv_code(gen[0])) {
            return Err(SolverError::Subgroup("cyclic generator is not cyclically reduced".into()));
        }
        for d in 1..n {
            if n % d == 0 && gen.chunks(d).all(|c| c == &gen[..d]) {
                return Err(SolverError::Subgroup("cyclic generator is a proper power".into()));
            }
        }
        Ok(CyclicFreeOracle { gen })
    }

    /// `m` with `w = g^m` for a reduced code word `w`.
    pub fn exponent(&self, w: &[u8]) -> Option<i64> {
        let n = self.gen.len();
        if w.is_empty() {
            return Some(0);
        }
        if n == 0 || w.len() % n != 0 {
            return None;
        }
        let reps = w.len() / n;
        if w.chunks(n).all(|c| c == self.gen.as_slice()) {
            return Some(reps as i64);
        }
        let inv = invert_codes(&self.gen);
        if w.chunks(n).all(|c| c == inv.as_slice()) {
            return Some(-(reps as i64));
        }
        None
    }
}

/// `m` with `free_reduce(w) = g^m`, for words over a free alphabet whose
/// generators are all basis letters.
pub fn cyclic_membership_free(alphabet: &Alphabet, w: &[Letter], g: &[Letter]) -> Result<Option<i64>, SolverError> {
    let f = FreeGroup::new(alphabet.clone(), &FreeSpec::default())?;
    let oracle = CyclicFreeOracle::new(f.reduce_word(g))?;
    Ok(oracle.exponent(&f.reduce_word(w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Alphabet {
        Alphabet::from_generators(&["a", "b"]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let al = f2();
        let w = |s: &str| al.parse_word(s).unwrap();
        assert_eq!(cyclic_membership_free(&al, &w("abABabAB"), &w("abAB")).unwrap(), Some(2));
        assert_eq!(cyclic_membership_free(&al, &w("ab"), &w("abAB")).unwrap(), None);
        assert_eq!(cyclic_membership_free(&al, &w(""), &w("abAB")).unwrap(), Some(0));
        assert_eq!(cyclic_membership_free(&al, &w("baBA"), &w("abAB")).unwrap(), Some(-1));
    }

    #[test]
    fn constructor_rejects_bad_generators() {
        let al = f2();
        let w = |s: &str| al.parse_word(s).unwrap();
        assert!(cyclic_membership_free(&al, &w("a"), &w("abab")).is_err());
        assert!(cyclic_membership_free(&al, &w("a"), &w("abA")).is_err());
        assert!(cyclic_membership_free(&al, &w("a"), &w("")).is_err());
    }

    #[test]
    fn coset_representative_is_shortest() {
        let al = f2();
        let f = FreeGroup::new(al.clone(), &FreeSpec::default()).unwrap();
        let g = f.reduce_word(&al.parse_word("ab").unwrap());
        let e = f.reduce_word(&al.parse_word("Bab").unwrap());
        let (r, m) = f.cyclic_coset(&e, &g).unwrap();
        assert_eq!(f.multiply(&r, &f.pow(&g, m)), e);
        assert!(r.len() <= e.len());
        let (r0, m0) = f.cyclic_coset(&f.pow(&g, 3), &g).unwrap();
        assert!(r0.is_empty());
        assert_eq!(m0, 3);
    }

    #[test]
    fn abbreviation_letters() {
        let al = Alphabet::from_generators(&["a", "b", "c"]).unwrap();
        let spec = FreeSpec { map: vec![(al.letter("c").unwrap(), al.parse_word("abAB").unwrap())] };
        let f = FreeGroup::new(al.clone(), &spec).unwrap();
        assert_eq!(f.rank(), 2);
        assert!(f.eval(&al.parse_word("cbaBA").unwrap()).is_empty());
        assert!(f.eval(&al.parse_word("cC").unwrap()).is_empty());
    }
}
