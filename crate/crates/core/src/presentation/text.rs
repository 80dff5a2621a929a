//! Line-based presentation file format.
//!
//! ```text
//! name wise
//! generators a A b B c C d D s S t T
//! inverses a=A b=B c=C d=D s=S t=T
//! relator cBA
//! backend hnn
//! base-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(2,2)
//! stable s pair a -> d
//! stable t pair b -> d
//! ```

use super::{
    AbelianSpec, Alphabet, BackendSpec, FreeSpec, HnnStructure, Letter, OracleKind, Presentation,
    PresentationError, ProductSpec, StableLetter, Word,
};

fn syntax(line: usize, msg: impl Into<String>) -> PresentationError {
    PresentationError::Syntax { line, msg: msg.into() }
}

struct Raw {
    name: Option<String>,
    generators: Option<(usize, Vec<String>)>,
    inverses: Vec<(String, String)>,
    relators: Vec<(usize, String)>,
    backend: Option<(usize, Vec<String>)>,
    base_backend: Option<(usize, Vec<String>)>,
    stable: Vec<(usize, Vec<String>)>,
}

/// Parses the contents of a presentation file.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut raw = Raw {
        name: None,
        generators: None,
        inverses: Vec::new(),
        relators: Vec::new(),
        backend: None,
        base_backend: None,
        stable: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        let toks = || rest.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        match key {
            "name" => {
                if raw.name.is_some() {
                    return Err(syntax(lineno, "name declared twice"));
                }
                raw.name = Some(rest.to_string());
            }
            "generators" => {
                if raw.generators.is_some() {
                    return Err(syntax(lineno, "generators declared twice"));
                }
                raw.generators = Some((lineno, toks()));
            }
            "inverses" => {
                for t in toks() {
                    let (x, y) = t
                        .split_once('=')
                        .ok_or_else(|| syntax(lineno, format!("expected x=X, found {t:?}")))?;
                    raw.inverses.push((x.to_string(), y.to_string()));
                }
            }
            "relator" => raw.relators.push((lineno, rest.to_string())),
            "backend" => {
                if raw.backend.is_some() {
                    return Err(syntax(lineno, "backend declared twice"));
                }
                raw.backend = Some((lineno, toks()));
            }
            "base-backend" => {
                if raw.base_backend.is_some() {
                    return Err(syntax(lineno, "base-backend declared twice"));
                }
                raw.base_backend = Some((lineno, toks()));
            }
            "stable" => raw.stable.push((lineno, toks())),
            other => return Err(syntax(lineno, format!("unknown key {other:?}"))),
        }
    }
    build(raw)
}

fn build(raw: Raw) -> Result<Presentation, PresentationError> {
    let name = raw.name.ok_or_else(|| PresentationError::Invalid("missing name".into()))?;
    let (_, gens) = raw
        .generators
        .ok_or_else(|| PresentationError::Invalid("missing generators".into()))?;
    let alphabet = Alphabet::new(gens, &raw.inverses)?;
    let mut relators = Vec::new();
    for (_, r) in &raw.relators {
        relators.push(alphabet.parse_word(r)?);
    }
    let (bline, btoks) = raw
        .backend
        .ok_or_else(|| PresentationError::Invalid("missing backend".into()))?;
    let backend = if btoks.first().map(String::as_str) == Some("hnn") {
        if btoks.len() != 1 {
            return Err(syntax(bline, "backend hnn takes no arguments; use base-backend"));
        }
        let (line, base_toks) = raw
            .base_backend
            .ok_or_else(|| PresentationError::Invalid("hnn backend needs a base-backend line".into()))?;
        BackendSpec::Hnn(build_hnn(&name, &alphabet, &relators, line, &base_toks, &raw.stable)?)
    } else {
        if raw.base_backend.is_some() || !raw.stable.is_empty() {
            return Err(PresentationError::Invalid(
                "base-backend and stable lines require backend hnn".into(),
            ));
        }
        parse_backend(&alphabet, bline, &btoks)?
    };
    Ok(Presentation { name, alphabet, relators, backend })
}

fn parse_backend(al: &Alphabet, line: usize, toks: &[String]) -> Result<BackendSpec, PresentationError> {
    let kind = toks.first().ok_or_else(|| syntax(line, "empty backend"))?;
    let mut it = toks[1..].iter().peekable();
    match kind.as_str() {
        "free" => {
            let mut map = Vec::new();
            if let Some(t) = it.next() {
                if t != "map" {
                    return Err(syntax(line, format!("unexpected {t:?}")));
                }
                for e in it {
                    let (x, w) = e.split_once('=').ok_or_else(|| syntax(line, format!("bad map entry {e:?}")))?;
                    let l = al.letter(x).ok_or_else(|| PresentationError::UnknownLetter(x.to_string()))?;
                    map.push((l, al.parse_word(w)?));
                }
            }
            let spec = FreeSpec { map };
            validate_free(al, &spec)?;
            Ok(BackendSpec::Free(spec))
        }
        "free-abelian" => {
            if it.next().map(String::as_str) != Some("dim") {
                return Err(syntax(line, "expected dim"));
            }
            let dim: usize = it
                .next()
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| syntax(line, "bad dim"))?;
            if it.next().map(String::as_str) != Some("map") {
                return Err(syntax(line, "expected map"));
            }
            let mut map = Vec::new();
            for e in it {
                let (x, v) = e.split_once('=').ok_or_else(|| syntax(line, format!("bad map entry {e:?}")))?;
                let l = al.letter(x).ok_or_else(|| PresentationError::UnknownLetter(x.to_string()))?;
                let comps = tuple(line, v)?;
                if comps.len() != dim {
                    return Err(syntax(line, format!("vector {v} does not have {dim} entries")));
                }
                let vec = comps
                    .iter()
                    .map(|c| c.trim().parse::<i64>().map_err(|_| syntax(line, format!("bad integer {c:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                map.push((l, vec));
            }
            check_every_pair_mapped(al, map.iter().map(|(l, _)| *l))?;
            Ok(BackendSpec::FreeAbelian(AbelianSpec { dim, map }))
        }
        "direct-product-free" => {
            if it.next().map(String::as_str) != Some("factors") {
                return Err(syntax(line, "expected factors"));
            }
            let mut factors = Vec::new();
            while let Some(t) = it.peek() {
                if t.as_str() == "map" {
                    break;
                }
                let f: Vec<char> = t.chars().collect();
                if f.iter().any(|c| !c.is_lowercase()) {
                    return Err(syntax(line, format!("factor basis {t:?} must be lowercase symbols")));
                }
                factors.push(f);
                it.next();
            }
            if it.next().map(String::as_str) != Some("map") {
                return Err(syntax(line, "expected map"));
            }
            let mut map = Vec::new();
            for e in it {
                let (x, v) = e.split_once('=').ok_or_else(|| syntax(line, format!("bad map entry {e:?}")))?;
                let l = al.letter(x).ok_or_else(|| PresentationError::UnknownLetter(x.to_string()))?;
                let comps = tuple(line, v)?;
                if comps.len() != factors.len() {
                    return Err(syntax(line, format!("image {v} does not have {} components", factors.len())));
                }
                for (c, f) in comps.iter().zip(&factors) {
                    if let Some(bad) = c.chars().find(|ch| !f.contains(&ch.to_ascii_lowercase())) {
                        return Err(syntax(line, format!("symbol {bad:?} not in factor {:?}", f)));
                    }
                }
                map.push((l, comps));
            }
            check_every_pair_mapped(al, map.iter().map(|(l, _)| *l))?;
            Ok(BackendSpec::DirectProductFree(ProductSpec { factors, map }))
        }
        other => Err(syntax(line, format!("unknown backend {other:?}"))),
    }
}

fn tuple(line: usize, v: &str) -> Result<Vec<String>, PresentationError> {
    let inner = v
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("expected (..), found {v:?}")))?;
    Ok(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn check_every_pair_mapped(al: &Alphabet, mapped: impl Iterator<Item = Letter>) -> Result<(), PresentationError> {
    let mut seen = vec![false; al.len()];
    for l in mapped {
        if seen[l.index()] || seen[al.inv(l).index()] {
            return Err(PresentationError::Invalid(format!("letter {} mapped twice", al.name(l))));
        }
        seen[l.index()] = true;
    }
    for g in al.generators() {
        if !seen[g.index()] && !seen[al.inv(g).index()] {
            return Err(PresentationError::Invalid(format!("generator {} has no image", al.name(g))));
        }
    }
    Ok(())
}

fn validate_free(al: &Alphabet, spec: &FreeSpec) -> Result<(), PresentationError> {
    let mut mapped = vec![false; al.len()];
    for (l, _) in &spec.map {
        if mapped[l.index()] || mapped[al.inv(*l).index()] {
            return Err(PresentationError::Invalid(format!("letter {} mapped twice", al.name(*l))));
        }
        mapped[l.index()] = true;
    }
    for (l, w) in &spec.map {
        for x in w.iter() {
            if mapped[x.index()] || mapped[al.inv(*x).index()] {
                return Err(PresentationError::Invalid(format!(
                    "image of {} uses non-basis letter {}",
                    al.name(*l),
                    al.name(*x)
                )));
            }
        }
    }
    Ok(())
}

fn build_hnn(
    name: &str,
    al: &Alphabet,
    relators: &[Word],
    base_line: usize,
    base_toks: &[String],
    stable_lines: &[(usize, Vec<String>)],
) -> Result<HnnStructure, PresentationError> {
    // Stable letters first, so the base alphabet is everything else.
    let mut stable_letters = Vec::new();
    for (line, toks) in stable_lines {
        let s = toks.first().ok_or_else(|| syntax(*line, "stable needs a letter"))?;
        let l = al.letter(s).ok_or_else(|| PresentationError::UnknownLetter(s.clone()))?;
        if stable_letters.contains(&l) || stable_letters.contains(&al.inv(l)) {
            return Err(syntax(*line, format!("stable letter {s} declared twice")));
        }
        stable_letters.push(l);
    }
    if stable_letters.is_empty() {
        return Err(PresentationError::Invalid("hnn backend without stable letters".into()));
    }
    let is_stable = |l: Letter| stable_letters.contains(&l) || stable_letters.contains(&al.inv(l));

    let mut to_base = vec![None; al.len()];
    let mut from_base = Vec::new();
    let mut base_names = Vec::new();
    for l in al.letters() {
        if !is_stable(l) {
            to_base[l.index()] = Some(Letter(from_base.len() as u8));
            from_base.push(l);
            base_names.push(al.name(l).to_string());
        }
    }
    let base_pairs: Vec<(String, String)> = al
        .generators()
        .filter(|&g| !is_stable(g))
        .map(|g| (al.name(g).to_string(), al.name(al.inv(g)).to_string()))
        .collect();
    let base_alphabet = Alphabet::new(base_names, &base_pairs)?;

    // A stable letter appearing in the base backend's map is a collision.
    for t in base_toks {
        if let Some((x, _)) = t.split_once('=') {
            if let Some(l) = al.letter(x) {
                if is_stable(l) {
                    return Err(PresentationError::StableCollision(x.to_string()));
                }
            }
        }
    }
    let base_backend = parse_backend(&base_alphabet, base_line, base_toks)?;
    let base_relators = relators
        .iter()
        .filter(|r| r.iter().all(|&l| !is_stable(l)))
        .map(|r| r.iter().map(|l| to_base[l.index()].unwrap()).collect())
        .collect();
    let base = Presentation {
        name: format!("{name}-base"),
        alphabet: base_alphabet,
        relators: base_relators,
        backend: base_backend,
    };

    let base_word = |line: usize, s: &str| -> Result<Word, PresentationError> {
        let w = al.parse_word(s)?;
        w.iter()
            .map(|&l| {
                to_base[l.index()].ok_or_else(|| {
                    syntax(line, format!("associated subgroup word {s:?} uses a stable letter"))
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    };

    let mut stable = Vec::new();
    for ((line, toks), &letter) in stable_lines.iter().zip(&stable_letters) {
        let mut i = 1;
        let mut oracle = None;
        if toks.get(i).map(String::as_str) == Some("oracle") {
            oracle = Some(match toks.get(i + 1).map(String::as_str) {
                Some("full") => OracleKind::Full,
                Some("cyclic") => OracleKind::Cyclic,
                other => return Err(syntax(*line, format!("unknown oracle {other:?}"))),
            });
            i += 2;
        }
        let mut pairs = Vec::new();
        while i < toks.len() {
            if toks[i] != "pair" || toks.get(i + 2).map(String::as_str) != Some("->") || i + 3 >= toks.len() {
                return Err(syntax(*line, "expected `pair <word> -> <word>`"));
            }
            pairs.push((base_word(*line, &toks[i + 1])?, base_word(*line, &toks[i + 3])?));
            i += 4;
        }
        if pairs.is_empty() {
            return Err(syntax(*line, "stable letter needs at least one pair"));
        }
        let oracle = oracle.unwrap_or(if pairs.len() == 1 { OracleKind::Cyclic } else { OracleKind::Full });
        if oracle == OracleKind::Cyclic && pairs.len() != 1 {
            return Err(syntax(*line, "cyclic oracle takes exactly one pair"));
        }
        stable.push(StableLetter { letter, pairs, oracle });
    }
    Ok(HnnStructure { base: Box::new(base), stable, to_base, from_base })
}

fn backend_body(al: &Alphabet, b: &BackendSpec) -> String {
    match b {
        BackendSpec::Free(f) => {
            let mut s = "free".to_string();
            if !f.map.is_empty() {
                s.push_str(" map");
                for (l, w) in &f.map {
                    s.push_str(&format!(" {}={}", al.name(*l), al.show(w)));
                }
            }
            s
        }
        BackendSpec::FreeAbelian(a) => {
            let mut s = format!("free-abelian dim {} map", a.dim);
            for (l, v) in &a.map {
                let v: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!(" {}=({})", al.name(*l), v.join(",")));
            }
            s
        }
        BackendSpec::DirectProductFree(p) => {
            let mut s = "direct-product-free factors".to_string();
            for f in &p.factors {
                s.push(' ');
                s.extend(f.iter());
            }
            s.push_str(" map");
            for (l, comps) in &p.map {
                s.push_str(&format!(" {}=({})", al.name(*l), comps.join(",")));
            }
            s
        }
        BackendSpec::Hnn(_) => "hnn".to_string(),
    }
}

pub(super) fn serialize(p: &Presentation) -> String {
    let al = &p.alphabet;
    let mut out = String::new();
    out.push_str(&format!("name {}\n", p.name));
    out.push_str(&format!("generators {}\n", al.names().join(" ")));
    let pairs: Vec<String> = al
        .generators()
        .map(|g| format!("{}={}", al.name(g), al.name(al.inv(g))))
        .collect();
    out.push_str(&format!("inverses {}\n", pairs.join(" ")));
    for r in &p.relators {
        out.push_str(&format!("relator {}\n", al.show(r)));
    }
    out.push_str(&format!("backend {}\n", backend_body(al, &p.backend)));
    if let BackendSpec::Hnn(h) = &p.backend {
        let bal = &h.base.alphabet;
        out.push_str(&format!("base-backend {}\n", backend_body(bal, &h.base.backend)));
        for s in &h.stable {
            out.push_str(&format!("stable {}", al.name(s.letter)));
            let default = if s.pairs.len() == 1 { OracleKind::Cyclic } else { OracleKind::Full };
            if s.oracle != default {
                out.push_str(match s.oracle {
                    OracleKind::Full => " oracle full",
                    OracleKind::Cyclic => " oracle cyclic",
                });
            }
            for (u, v) in &s.pairs {
                out.push_str(&format!(" pair {} -> {}", bal.show(u), bal.show(v)));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn free_rank_two() {
        let p = parse_presentation("name f2\ngenerators a A b B\ninverses a=A b=B\nbackend free\n").unwrap();
        assert!(p.relators.is_empty());
        assert_eq!(p.alphabet.generators().count(), 2);
        assert!(matches!(p.backend, BackendSpec::Free(_)));
    }

    #[test]
    fn wise_has_two_stable_letters() {
        let p = parse_presentation(WISE).unwrap();
        let h = p.hnn().unwrap();
        assert_eq!(h.stable.len(), 2);
        assert_eq!(h.base.alphabet.len(), 8);
        assert_eq!(h.base.relators.len(), 3);
        assert_eq!(p.to_text(), WISE);
    }

    #[test]
    fn gersten_pairs() {
        let text = "name gersten\ngenerators a A b B c C d D s S t T\ninverses a=A b=B c=C d=D s=S t=T\n\
                    backend hnn\nbase-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(1,-1)\n\
                    stable s pair a -> c\nstable t pair a -> d\n";
        let p = parse_presentation(text).unwrap();
        let h = p.hnn().unwrap();
        assert_eq!(h.stable.len(), 2);
        let bal = &h.base.alphabet;
        assert_eq!(bal.format_word(&h.stable[1].pairs[0].1), "d");
    }

    #[test]
    fn errors() {
        let dup = "name x\ngenerators a A a\ninverses a=A\nbackend free\n";
        assert!(matches!(parse_presentation(dup), Err(PresentationError::DuplicateLetter(_))));
        let unknown = "name x\ngenerators a A\ninverses a=A\nrelator ab\nbackend free\n";
        assert!(matches!(parse_presentation(unknown), Err(PresentationError::UnknownLetter(_))));
        let collide = "name x\ngenerators a A s S\ninverses a=A s=S\nbackend hnn\n\
                       base-backend free-abelian dim 1 map a=(1) s=(2)\nstable s pair a -> a\n";
        assert!(matches!(parse_presentation(collide), Err(PresentationError::StableCollision(_))));
        let key = "name x\ngenerators a A\ninverses a=A\nbackend free\nweights 1\n";
        assert!(matches!(parse_presentation(key), Err(PresentationError::Syntax { line: 5, .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a comment\n\nname z\ngenerators a A   # trailing\ninverses a=A\nbackend free-abelian dim 1 map a=(1)\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.name, "z");
        assert_eq!(parse_presentation(&p.to_text()).unwrap(), p);
    }
}
