use std::collections::{HashMap, VecDeque};

use smallvec::SmallVec;

use super::codec::{get_signed, get_varint, put_signed, put_varint};
use super::{GroupBackend, KeyBytes, SolverError};
use crate::presentation::{AbelianSpec, Alphabet, BackendKind, Letter, Word};

pub type Vector = SmallVec<[i64; 4]>;

/// `Z^dim` with each letter sent to an integer vector.
#[derive(Clone, Debug)]
pub struct FreeAbelian {
    alphabet: Alphabet,
    dim: usize,
    images: Vec<Vector>,
    /// A word for each unit vector `e_i`, when the letters reach it.
    units: Vec<Option<Word>>,
}

impl FreeAbelian {
    pub fn new(alphabet: Alphabet, spec: &AbelianSpec) -> Result<Self, SolverError> {
        let dim = spec.dim;
        let mut images: Vec<Option<Vector>> = vec![None; alphabet.len()];
        for (l, v) in &spec.map {
            if v.len() != dim {
                return Err(SolverError::Invalid(format!(
                    "image of {} has {} coordinates, expected {dim}",
                    alphabet.name(*l),
                    v.len()
                )));
            }
            images[l.index()] = Some(v.iter().copied().collect());
            images[alphabet.inv(*l).index()] = Some(v.iter().map(|x| -x).collect());
        }
        let images: Vec<Vector> = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| im.ok_or_else(|| SolverError::Invalid(format!("letter {} has no image", alphabet.names()[i]))))
            .collect::<Result<_, _>>()?;
        let units = unit_words(&alphabet, &images, dim, 8);
        Ok(FreeAbelian { alphabet, dim, images, units })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image(&self, l: Letter) -> &[i64] {
        &self.images[l.index()]
    }
}

/// Shortest words reaching each unit vector, by BFS up to `radius`.
fn unit_words(alphabet: &Alphabet, images: &[Vector], dim: usize, radius: usize) -> Vec<Option<Word>> {
    let mut units: Vec<Option<Word>> = vec![None; dim];
    let origin: Vector = SmallVec::from_elem(0, dim);
    let mut seen: HashMap<Vector, Word> = HashMap::new();
    seen.insert(origin.clone(), Word::empty());
    let mut queue = VecDeque::from([origin]);
    while let Some(v) = queue.pop_front() {
        let w = seen[&v].clone();
        if w.len() >= radius {
            break;
        }
        for x in alphabet.letters() {
            let u: Vector = v.iter().zip(&images[x.index()]).map(|(a, b)| a + b).collect();
            if seen.contains_key(&u) {
                continue;
            }
            let mut wu = w.clone();
            wu.push(x);
            if let Some(i) = unit_index(&u) {
                units[i].get_or_insert_with(|| wu.clone());
            }
            seen.insert(u.clone(), wu);
            queue.push_back(u);
        }
        if units.iter().all(Option::is_some) {
            break;
        }
    }
    units
}

fn unit_index(v: &[i64]) -> Option<usize> {
    let mut idx = None;
    for (i, &x) in v.iter().enumerate() {
        match x {
            0 => {}
            1 if idx.is_none() => idx = Some(i),
            _ => return None,
        }
    }
    idx
}

impl GroupBackend for FreeAbelian {
    type Elem = Vector;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn kind(&self) -> BackendKind {
        BackendKind::FreeAbelian
    }
    fn identity(&self) -> Vector {
        SmallVec::from_elem(0, self.dim)
    }
    fn mul_letter(&self, e: &mut Vector, x: Letter) {
        for (a, b) in e.iter_mut().zip(&self.images[x.index()]) {
            *a += b;
        }
    }
    fn multiply(&self, a: &Vector, b: &Vector) -> Vector {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn inverse(&self, a: &Vector) -> Vector {
        a.iter().map(|x| -x).collect()
    }
    fn encode(&self, e: &Vector, out: &mut KeyBytes) {
        put_varint(out, e.len() as u64);
        for &x in e {
            put_signed(out, x);
        }
    }
    fn decode(&self, b: &[u8], pos: &mut usize) -> Vector {
        let n = get_varint(b, pos) as usize;
        (0..n).map(|_| get_signed(b, pos)).collect()
    }
    fn word_of(&self, e: &Vector) -> Option<Word> {
        let mut out = Word::empty();
        for (i, &x) in e.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let unit = self.units[i].as_ref()?;
            let step = if x > 0 { unit.clone() } else { self.alphabet.invert(unit) };
            for _ in 0..x.unsigned_abs() {
                out = out.concat(&step);
            }
        }
        Some(out)
    }
    fn describe(&self, e: &Vector) -> String {
        let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
    fn pow(&self, g: &Vector, m: i64) -> Vector {
        g.iter().map(|x| x * m).collect()
    }
    fn cyclic_exponent(&self, e: &Vector, g: &Vector) -> Option<i64> {
        cyclic_membership_lattice(e, g)
    }
    fn cyclic_coset(&self, e: &Vector, g: &Vector) -> Option<(Vector, i64)> {
        // Normalize the first coordinate where g is nonzero into [0, |g_i|).
        let i = g.iter().position(|&x| x != 0)?;
        let m = e[i].div_euclid(g[i]);
        let r = e.iter().zip(g).map(|(a, b)| a - m * b).collect();
        Some((r, m))
    }
    fn check_cyclic_generator(&self, g: &Vector) -> Result<(), SolverError> {
        if g.iter().all(|&x| x == 0) {
            Err(SolverError::Subgroup("cyclic generator is the zero vector".into()))
        } else {
            Ok(())
        }
    }
}

/// `m` with `v = m g`, if any. `g` must be nonzero.
pub fn cyclic_membership_lattice(v: &[i64], g: &[i64]) -> Option<i64> {
    let i = g.iter().position(|&x| x != 0)?;
    if v[i] % g[i] != 0 {
        return None;
    }
    let m = v[i] / g[i];
    v.iter().zip(g).all(|(a, b)| *a == m * b).then_some(m)
}
