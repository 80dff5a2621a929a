//! Built-in presentations and witness families.

mod lemma_bb;
mod witness;

pub use lemma_bb::{
    lemma_bb2_min_length, lemma_bb_min_length, lemma_bb_min_length_bfs, lemma_bb_target, BbSearch, ZooSearchError,
};
pub use witness::{gersten_loop, gersten_word_as_printed, stallings_alpha, stallings_beta, stallings_gamma};

use thiserror::Error;

use crate::presentation::{parse_presentation, BackendSpec, Letter, Presentation, PresentationError, Word};
use crate::solver::{build_hnn_solver, build_solver, HnnSolver, Keyed, ProductOfFree, Solver, SolverError, Triple};

pub const PRESET_NAMES: [&str; 9] = [
    "f2",
    "z2",
    "z2-wise-base",
    "z2-gersten-base",
    "f2c-bridson-base",
    "wise",
    "bridson",
    "gersten",
    "stallings",
];

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("unknown preset {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("preset {name}: relator {relator} does not evaluate to the identity")]
    Relator { name: String, relator: String },
    #[error("preset {0}: {1}")]
    Sanity(String, String),
}

/// A fully wired preset group.
#[derive(Clone)]
pub struct Preset {
    pub name: String,
    pub presentation: Presentation,
    pub solver: Solver,
    pub hnn: Option<HnnSolver>,
    pub notes: &'static str,
}

impl Preset {
    pub fn word(&self, s: &str) -> Word {
        self.presentation
            .word(s)
            .unwrap_or_else(|e| panic!("bad word {s:?} for {}: {e}", self.name))
    }
}

const F2: &str = "\
name f2
generators a A b B
inverses a=A b=B
backend free
";

const Z2: &str = "\
name z2
generators a A b B
inverses a=A b=B
relator abAB
backend free-abelian dim 2 map a=(1,0) b=(0,1)
";

const Z2_WISE_BASE: &str = "\
name z2-wise-base
generators a A b B c C d D
inverses a=A b=B c=C d=D
relator cBA
relator cAB
relator dCC
backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(2,2)
";

const Z2_GERSTEN_BASE: &str = "\
name z2-gersten-base
generators a A b B c C d D
inverses a=A b=B c=C d=D
relator cBA
relator cAB
relator dbA
backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(1,-1)
";

const F2C_BRIDSON_BASE: &str = "\
name f2c-bridson-base
generators a A b B c C
inverses a=A b=B c=C
relator cbaBA
backend free map c=abAB
";

const WISE: &str = "\
name wise
generators a A b B c C d D s S t T
inverses a=A b=B c=C d=D s=S t=T
relator cBA
relator cAB
relator dCC
relator SasD
relator TbtD
backend hnn
base-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(2,2)
stable s pair a -> d
stable t pair b -> d
";

const BRIDSON: &str = "\
name bridson
generators a A b B c C g G s S t T
inverses a=A b=B c=C g=G s=S t=T
relator cbaBA
relator gaGa
relator gbGb
relator saSC
relator tbTC
backend hnn
base-backend free map c=abAB
stable g pair a -> A pair b -> B
stable s pair c -> a
stable t pair c -> b
";

const GERSTEN: &str = "\
name gersten
generators a A b B c C d D s S t T
inverses a=A b=B c=C d=D s=S t=T
relator cBA
relator cAB
relator dbA
relator SasC
relator TatD
backend hnn
base-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(1,-1)
stable s pair a -> c
stable t pair a -> d
";

const NOTES_F2: &str = "free group of rank 2";
const NOTES_Z2: &str = "Z^2 with the standard basis";
const NOTES_WISE_BASE: &str = "Z^2 with a=(1,0), b=(0,1), c=ab, d=c^2";
const NOTES_GERSTEN_BASE: &str = "Z^2 with a=(1,0), b=(0,1), c=ab, d=ab^-1";
const NOTES_BRIDSON_BASE: &str = "F_2 on a,b with c=aba^-1b^-1 as an extra generator";
const NOTES_WISE: &str = "Wise's group: double HNN extension of Z^2 along <a>,<b> -> <d>";
const NOTES_BRIDSON: &str =
    "Bridson's group: triple HNN extension of F_2; g plays gamma, acting by a->a^-1, b->b^-1";
const NOTES_GERSTEN: &str = "Gersten's group: double HNN extension of Z^2 along <a> -> <c>, <a> -> <d>";
const NOTES_STALLINGS: &str =
    "Stallings' group: kernel of the exponent sum (F_2)^3 -> Z, Dicks-Leary presentation, solved through rho";

/// Canonical presentation text for a preset, byte-identical to the files
/// under `groups/`.
pub fn preset_text(name: &str) -> Option<String> {
    Some(match name {
        "f2" => F2.to_string(),
        "z2" => Z2.to_string(),
        "z2-wise-base" => Z2_WISE_BASE.to_string(),
        "z2-gersten-base" => Z2_GERSTEN_BASE.to_string(),
        "f2c-bridson-base" => F2C_BRIDSON_BASE.to_string(),
        "wise" => WISE.to_string(),
        "bridson" => BRIDSON.to_string(),
        "gersten" => GERSTEN.to_string(),
        "stallings" => stallings_text(),
        _ => return None,
    })
}

fn notes(name: &str) -> &'static str {
    match name {
        "f2" => NOTES_F2,
        "z2" => NOTES_Z2,
        "z2-wise-base" => NOTES_WISE_BASE,
        "z2-gersten-base" => NOTES_GERSTEN_BASE,
        "f2c-bridson-base" => NOTES_BRIDSON_BASE,
        "wise" => NOTES_WISE,
        "bridson" => NOTES_BRIDSON,
        "gersten" => NOTES_GERSTEN,
        _ => NOTES_STALLINGS,
    }
}

pub fn preset(name: &str) -> Result<Preset, ZooError> {
    let text = preset_text(name).ok_or_else(|| ZooError::Unknown(name.to_string()))?;
    let presentation = parse_presentation(&text)?;
    let preset = wire(presentation, notes(name))?;
    if name == "stallings" {
        check_stallings(&preset)?;
    }
    Ok(preset)
}

/// Wires an arbitrary presentation (e.g. loaded from a file) and checks
/// that every relator evaluates to the identity.
pub fn wire(presentation: Presentation, notes: &'static str) -> Result<Preset, ZooError> {
    let (solver, hnn): (Solver, Option<HnnSolver>) = if presentation.hnn().is_some() {
        let h = build_hnn_solver(&presentation)?;
        let s: Solver = h.clone();
        (s, Some(h))
    } else {
        (build_solver(&presentation)?, None)
    };
    for r in &presentation.relators {
        if !solver.is_identity_word(r) {
            return Err(ZooError::Relator {
                name: presentation.name.clone(),
                relator: presentation.alphabet.show(r).to_string(),
            });
        }
    }
    Ok(Preset { name: presentation.name.clone(), presentation, solver, hnn, notes })
}

/// Opposite octahedron vertices; each pair generates one free factor.
const OPPOSITE: [(char, char); 3] = [('a', 'b'), ('c', 'd'), ('e', 'f')];

fn factor_of(v: char) -> usize {
    OPPOSITE.iter().position(|&(x, y)| v == x || v == y).expect("octahedron vertex")
}

/// Positive orientation of the edge between vertices in factors `i` and
/// `j`: from the `{a,b}` side to `{c,d}`, `{c,d}` to `{e,f}`, `{e,f}` to `{a,b}`.
fn positive_edge(y: char, z: char) -> bool {
    (factor_of(z) + 3 - factor_of(y)) % 3 == 1
}

fn edge_name(y: char, z: char) -> String {
    format!("{y}{}", z.to_ascii_uppercase())
}

/// The Dicks-Leary presentation: one generator `yZ` per directed edge of
/// the octahedron, two relators per triangular face.
pub fn stallings_text() -> String {
    let verts = ['a', 'b', 'c', 'd', 'e', 'f'];
    let mut letters = Vec::new();
    let mut inverses = Vec::new();
    for (i, &y) in verts.iter().enumerate() {
        for &z in &verts[i + 1..] {
            if factor_of(y) == factor_of(z) {
                continue;
            }
            letters.push(edge_name(y, z));
            letters.push(edge_name(z, y));
            let (p, q) = if positive_edge(y, z) { (y, z) } else { (z, y) };
            inverses.push(format!("{}={}", edge_name(p, q), edge_name(q, p)));
        }
    }
    let mut relators = Vec::new();
    for x in ['a', 'b'] {
        for y in ['c', 'd'] {
            for z in ['e', 'f'] {
                let (xy, yz, zx) = (edge_name(x, y), edge_name(y, z), edge_name(z, x));
                relators.push(format!("{xy}{yz}{zx}"));
                relators.push(format!("{xy}{zx}{yz}"));
            }
        }
    }
    let mut map = Vec::new();
    for pair in &inverses {
        let (g, _) = pair.split_once('=').expect("pair");
        let mut ch = g.chars();
        let (y, z) = (ch.next().expect("edge"), ch.next().expect("edge").to_ascii_lowercase());
        let mut comps = [String::new(), String::new(), String::new()];
        comps[factor_of(y)].push(y);
        comps[factor_of(z)].push(z.to_ascii_uppercase());
        map.push(format!("{g}=({})", comps.join(",")));
    }
    let mut out = String::new();
    out.push_str("name stallings\n");
    out.push_str(&format!("generators {}\n", letters.join(" ")));
    out.push_str(&format!("inverses {}\n", inverses.join(" ")));
    for r in relators {
        out.push_str(&format!("relator {r}\n"));
    }
    out.push_str(&format!("backend direct-product-free factors ab cd ef map {}\n", map.join(" ")));
    out
}

fn check_stallings(p: &Preset) -> Result<(), ZooError> {
    let al = &p.presentation.alphabet;
    for name in ["aC", "cE", "eA", "fA", "dE", "bC", "fB", "cB"] {
        if al.letter(name).is_none() {
            return Err(ZooError::Sanity(p.name.clone(), format!("missing generator {name}")));
        }
    }
    let rho = stallings_rho();
    for l in al.letters() {
        let t = rho.triple(&[l]);
        let sum: i64 = t.0.iter().flat_map(|s| s.chars()).map(|c| if c.is_lowercase() { 1 } else { -1 }).sum();
        if sum != 0 {
            return Err(ZooError::Sanity(p.name.clone(), format!("{} has exponent sum {sum}", al.name(l))));
        }
    }
    if al.len() != 24 || p.presentation.relators.len() != 16 {
        return Err(ZooError::Sanity(p.name.clone(), "expected 12 generators and 16 relators".into()));
    }
    Ok(())
}

/// The representation `rho` of the Stallings group into `(F_2)^3`.
pub fn stallings_rho() -> ProductOfFree {
    let p = parse_presentation(&stallings_text()).expect("generated presentation parses");
    match &p.backend {
        BackendSpec::DirectProductFree(spec) => ProductOfFree::new(p.alphabet.clone(), spec).expect("valid product"),
        _ => unreachable!("stallings uses the product backend"),
    }
}

/// `rho(w)` as one reduced word per factor.
pub fn eval_stallings(w: &[Letter]) -> Triple {
    stallings_rho().triple(w)
}

/// Keyed view of the Stallings solver (shares keys with `preset("stallings")`).
pub fn stallings_keyed() -> Keyed<ProductOfFree> {
    Keyed(stallings_rho())
}

#[cfg(test)]
mod tests;
