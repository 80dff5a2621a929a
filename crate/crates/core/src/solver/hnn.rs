//! Multiple HNN extensions over a free or free abelian base.
//!
//! Elements are kept in the reduced form `g0 s1^e1 g1 ... sn^en gn` in
//! which every `g_{i-1}` is the chosen representative of its left coset
//! of `U_i` (when `e_i = +1`) or `V_i` (when `e_i = -1`), and no pinch
//! `s^-e 1 s^e` survives. This form is unique, so it doubles as the key.

use std::sync::Arc;

use super::codec::{get_varint, put_varint};
use super::{ElementKey, GroupBackend, HnnOps, KeyBytes, Keyed, Solver, SolverError};
use crate::presentation::{Alphabet, BackendKind, HnnStructure, Letter, OracleKind, Word};

/// Which associated subgroup of a stable letter: `U` (domain of `phi`)
/// or `V` (its image).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    U,
    V,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::V,
            Side::V => Side::U,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// In a cyclic subgroup as the `m`-th power of its generator.
    Power(i64),
    /// The subgroup is the whole base group.
    Whole,
    Outside,
}

impl Membership {
    pub fn is_member(self) -> bool {
        !matches!(self, Membership::Outside)
    }

    pub fn exponent(self) -> Option<i64> {
        match self {
            Membership::Power(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Assoc<E> {
    Cyclic {
        gens: [E; 2],
        words: [Word; 2],
    },
    /// Whole base group; `phi` and its inverse as per-letter images.
    Full {
        words: [Vec<Word>; 2],
        elems: [Vec<E>; 2],
    },
}

fn side_index(side: Side) -> usize {
    match side {
        Side::U => 0,
        Side::V => 1,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HnnElem<E> {
    pub head: E,
    /// `(stable index, sign, base part after the letter)`.
    pub tail: Vec<(u8, i8, E)>,
}

#[derive(Clone, Debug)]
pub struct HnnGroup<B: GroupBackend> {
    alphabet: Alphabet,
    structure: HnnStructure,
    base: B,
    assoc: Vec<Assoc<B::Elem>>,
}

impl<B: GroupBackend> HnnGroup<B> {
    pub fn new(alphabet: Alphabet, structure: HnnStructure, base: B) -> Result<Self, SolverError> {
        if structure.stable.len() > 255 {
            return Err(SolverError::Invalid("too many stable letters".into()));
        }
        let mut assoc = Vec::new();
        for s in &structure.stable {
            let name = alphabet.name(s.letter).to_string();
            assoc.push(match s.oracle {
                OracleKind::Cyclic => {
                    let (u, v) = s
                        .pairs
                        .first()
                        .ok_or_else(|| SolverError::Subgroup(format!("{name}: no pairs")))?;
                    let gens = [base.eval(u), base.eval(v)];
                    for g in &gens {
                        base.check_cyclic_generator(g)
                            .map_err(|e| SolverError::Subgroup(format!("{name}: {e}")))?;
                    }
                    Assoc::Cyclic { gens, words: [u.clone(), v.clone()] }
                }
                OracleKind::Full => full_tables(&base, &s.pairs).map_err(|e| SolverError::Subgroup(format!("{name}: {e}")))?,
            });
        }
        Ok(HnnGroup { alphabet, structure, base, assoc })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn structure(&self) -> &HnnStructure {
        &self.structure
    }

    fn last_mut<'a>(&self, e: &'a mut HnnElem<B::Elem>) -> &'a mut B::Elem {
        match e.tail.last_mut() {
            Some((_, _, g)) => g,
            None => &mut e.head,
        }
    }

    /// Splits `g = r h` with `r` the coset representative and `h` in the
    /// subgroup on `side`.
    fn decompose(&self, i: usize, side: Side, g: &B::Elem) -> (B::Elem, B::Elem) {
        match &self.assoc[i] {
            Assoc::Cyclic { gens, .. } => {
                let gen = &gens[side_index(side)];
                let (r, m) = self
                    .base
                    .cyclic_coset(g, gen)
                    .expect("cyclic coset oracle checked at construction");
                (r, self.base.pow(gen, m))
            }
            Assoc::Full { .. } => (self.base.identity(), g.clone()),
        }
    }

    /// `phi(h)` for `h` in `U` (side `U`), `phi^-1(h)` for `h` in `V`.
    fn image(&self, i: usize, side: Side, h: &B::Elem) -> B::Elem {
        match &self.assoc[i] {
            Assoc::Cyclic { gens, .. } => {
                let m = self
                    .base
                    .cyclic_exponent(h, &gens[side_index(side)])
                    .expect("image taken of a subgroup element");
                self.base.pow(&gens[side_index(side.other())], m)
            }
            Assoc::Full { elems, .. } => {
                let w = self.base.word_of(h).expect("full oracle base spells its elements");
                let table = &elems[side_index(side)];
                let mut out = self.base.identity();
                for x in w.iter() {
                    out = self.base.multiply(&out, &table[x.index()]);
                }
                out
            }
        }
    }

    pub fn mul_stable(&self, e: &mut HnnElem<B::Elem>, i: usize, sign: i8) {
        // g s = r u s = r s phi(u);  g s^-1 = r v s^-1 = r s^-1 phi^-1(v).
        let side = if sign > 0 { Side::U } else { Side::V };
        let g = self.last_mut(e).clone();
        let (r, h) = self.decompose(i, side, &g);
        let image = self.image(i, side, &h);
        let pinch = matches!(e.tail.last(), Some(&(j, s, _)) if j as usize == i && s == -sign)
            && r == self.base.identity();
        if pinch {
            e.tail.pop();
            let last = self.last_mut(e);
            *last = self.base.multiply(last, &image);
        } else {
            *self.last_mut(e) = r;
            e.tail.push((i as u8, sign, image));
        }
    }

    pub fn mul_base(&self, e: &mut HnnElem<B::Elem>, g: &B::Elem) {
        let last = self.last_mut(e);
        *last = self.base.multiply(last, g);
    }

    fn stable_letter(&self, i: u8, sign: i8) -> Letter {
        let l = self.structure.stable[i as usize].letter;
        if sign > 0 {
            l
        } else {
            self.alphabet.inv(l)
        }
    }

    pub fn membership(&self, i: usize, side: Side, g: &B::Elem) -> Membership {
        match &self.assoc[i] {
            Assoc::Cyclic { gens, .. } => match self.base.cyclic_exponent(g, &gens[side_index(side)]) {
                Some(m) => Membership::Power(m),
                None => Membership::Outside,
            },
            Assoc::Full { .. } => Membership::Whole,
        }
    }
}

/// Letter tables for `phi` and `phi^-1` when the subgroup is the whole
/// base. Letters without a pair are spelled through the base's own words;
/// the inverse is read off pairs whose image is a single letter, so `phi`
/// must permute the generators up to inversion.
fn full_tables<B: GroupBackend>(base: &B, pairs: &[(Word, Word)]) -> Result<Assoc<B::Elem>, SolverError> {
    let al = base.alphabet().clone();
    let n = al.len();
    let mut fwd: Vec<Option<Word>> = vec![None; n];
    let mut bwd: Vec<Option<Word>> = vec![None; n];
    for (u, v) in pairs {
        if u.len() == 1 {
            fwd[u[0].index()] = Some(v.clone());
            fwd[al.inv(u[0]).index()] = Some(al.invert(v));
        }
        if v.len() == 1 {
            bwd[v[0].index()] = Some(u.clone());
            bwd[al.inv(v[0]).index()] = Some(al.invert(u));
        }
    }
    let complete = |table: &mut Vec<Option<Word>>| -> Result<(), SolverError> {
        for x in al.letters() {
            if table[x.index()].is_some() {
                continue;
            }
            let w = base
                .word_of(&base.eval(&[x]))
                .ok_or_else(|| SolverError::Unsupported("base cannot spell its elements".into()))?;
            let mut img = Word::empty();
            for y in w.iter() {
                let part = table[y.index()].as_ref().ok_or_else(|| {
                    SolverError::Unsupported(format!(
                        "automorphism is not given on letter {} (generators must be permuted up to inversion)",
                        al.name(*y)
                    ))
                })?;
                img = img.concat(part);
            }
            table[x.index()] = Some(img);
        }
        Ok(())
    };
    complete(&mut fwd)?;
    complete(&mut bwd)?;
    let fwd: Vec<Word> = fwd.into_iter().map(Option::unwrap).collect();
    let bwd: Vec<Word> = bwd.into_iter().map(Option::unwrap).collect();
    let elems = [
        fwd.iter().map(|w| base.eval(w)).collect::<Vec<_>>(),
        bwd.iter().map(|w| base.eval(w)).collect::<Vec<_>>(),
    ];
    // phi^-1 phi must fix every letter.
    for x in al.letters() {
        let round: Word = fwd[x.index()].iter().flat_map(|y| bwd[y.index()].iter().copied()).collect();
        if base.eval(&round) != base.eval(&[x]) {
            return Err(SolverError::Subgroup(format!(
                "pairs do not define an automorphism on letter {}",
                al.name(x)
            )));
        }
    }
    Ok(Assoc::Full { words: [fwd, bwd], elems })
}

impl<B: GroupBackend> GroupBackend for HnnGroup<B> {
    type Elem = HnnElem<B::Elem>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn kind(&self) -> BackendKind {
        BackendKind::Hnn
    }
    fn identity(&self) -> Self::Elem {
        HnnElem { head: self.base.identity(), tail: Vec::new() }
    }
    fn mul_letter(&self, e: &mut Self::Elem, x: Letter) {
        match self.structure.to_base[x.index()] {
            Some(b) => self.base.mul_letter(self.last_mut(e), b),
            None => {
                let (i, sign) = self
                    .structure
                    .stable_index(&self.alphabet, x)
                    .expect("non-base letters are stable");
                self.mul_stable(e, i, sign);
            }
        }
    }
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = a.clone();
        self.mul_base(&mut out, &b.head);
        for (i, sign, g) in &b.tail {
            self.mul_stable(&mut out, *i as usize, *sign);
            self.mul_base(&mut out, g);
        }
        out
    }
    fn inverse(&self, a: &Self::Elem) -> Self::Elem {
        let mut out = self.identity();
        for (i, sign, g) in a.tail.iter().rev() {
            self.mul_base(&mut out, &self.base.inverse(g));
            self.mul_stable(&mut out, *i as usize, -sign);
        }
        self.mul_base(&mut out, &self.base.inverse(&a.head));
        out
    }
    fn encode(&self, e: &Self::Elem, out: &mut KeyBytes) {
        put_varint(out, e.tail.len() as u64);
        self.base.encode(&e.head, out);
        for (i, sign, g) in &e.tail {
            out.push(*i);
            out.push((*sign > 0) as u8);
            self.base.encode(g, out);
        }
    }
    fn decode(&self, b: &[u8], pos: &mut usize) -> Self::Elem {
        let n = get_varint(b, pos) as usize;
        let head = self.base.decode(b, pos);
        let mut tail = Vec::with_capacity(n);
        for _ in 0..n {
            let i = b[*pos];
            let sign = if b[*pos + 1] == 1 { 1 } else { -1 };
            *pos += 2;
            tail.push((i, sign, self.base.decode(b, pos)));
        }
        HnnElem { head, tail }
    }
    fn word_of(&self, e: &Self::Elem) -> Option<Word> {
        let mut out = self.structure.lift_word(&self.base.word_of(&e.head)?);
        for (i, sign, g) in &e.tail {
            out.push(self.stable_letter(*i, *sign));
            out = out.concat(&self.structure.lift_word(&self.base.word_of(g)?));
        }
        Some(out)
    }
    fn describe(&self, e: &Self::Elem) -> String {
        match self.word_of(e) {
            Some(w) => self.alphabet.show(&w).to_string(),
            None => format!("{e:?}"),
        }
    }
}

impl<B: GroupBackend> HnnOps for Keyed<HnnGroup<B>> {
    fn structure(&self) -> &HnnStructure {
        &self.0.structure
    }

    fn base_solver(&self) -> Solver {
        Arc::new(Keyed(self.0.base.clone()))
    }

    fn membership(&self, stable: usize, side: Side, base_word: &[Letter]) -> Membership {
        self.0.membership(stable, side, &self.0.base.eval(base_word))
    }

    fn image_word(&self, stable: usize, side: Side, base_word: &[Letter]) -> Option<Word> {
        let g = &self.0;
        match &g.assoc[stable] {
            Assoc::Cyclic { gens, words } => {
                let m = g.base.cyclic_exponent(&g.base.eval(base_word), &gens[side_index(side)])?;
                let w = &words[side_index(side.other())];
                let step = if m < 0 { g.base.alphabet().invert(w) } else { w.clone() };
                Some(step.power(m.unsigned_abs() as usize))
            }
            Assoc::Full { words, .. } => {
                let table = &words[side_index(side)];
                Some(base_word.iter().flat_map(|x| table[x.index()].iter().copied()).collect())
            }
        }
    }

    fn base_cyclic_exponent(&self, key: &ElementKey, base_word: &[Letter]) -> Option<i64> {
        let e = self.from_key(key);
        if !e.tail.is_empty() {
            return None;
        }
        let g = self.0.base.eval(base_word);
        if g == self.0.base.identity() {
            return (e.head == g).then_some(0);
        }
        self.0.base.cyclic_exponent(&e.head, &g)
    }
}

impl<B: GroupBackend> Keyed<HnnGroup<B>> {
    /// Number of stable letters in the reduced form of `key`.
    pub fn stable_length(&self, key: &ElementKey) -> usize {
        self.from_key(key).tail.len()
    }
}
