use std::path::Path;

use loopshort::cayley::{bounded_distance, geodesics_to, Ball, BallOptions, CayleyError, DEFAULT_MEMORY_BUDGET};
use loopshort::fellow::{async_ft, async_pairs, synchronize as sync_pair, FellowError, Reparameterization, Search, Synchronized};
use loopshort::hnn::{check_strip_equidistant, check_totally_geodesic, hnn_shorten, HnnError};
use loopshort::presentation::{OracleKind, PresentationError};
use loopshort::properties::{
    check_ac as ac, check_ac_pairs, check_fftp as fftp, check_lsp as lsp, fill as fill_word, fill_sweep, Budget,
    FftpMode, Frame, LoopFamily, PropertyError, Verdict,
};
use loopshort::zoo::{
    gersten_loop, gersten_word_as_printed, lemma_bb_min_length, lemma_bb_target, preset, stallings_alpha,
    stallings_beta, stallings_gamma, wire, Preset, ZooError, ZooSearchError, PRESET_NAMES,
};
use loopshort::{parse_presentation, Word};
use serde_json::{json, Value};
use thiserror::Error;

use crate::report::{status_name, Row, Run, Status};
use crate::{
    AcArgs, BallArgs, FftpArgs, FftpModeArg, FillArgs, GeodesicsArgs, HnnArgs, LoopFamilyArg, LspArgs, PairFamilyArg,
    SyncArgs, WitnessArgs, WitnessFamily,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Hnn(#[from] HnnError),
    #[error(transparent)]
    Fellow(#[from] FellowError),
    #[error(transparent)]
    Search(#[from] ZooSearchError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Settings shared by every command.
pub struct Ctx {
    pub ball: BallOptions,
    pub step_limit: Option<u64>,
    pub seed: u64,
}

impl Ctx {
    pub fn new(memory_budget: Option<usize>, step_limit: Option<u64>, seed: u64) -> Ctx {
        let ball = BallOptions { memory_budget: memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET), adjacency: false };
        Ctx { ball, step_limit, seed }
    }

    pub fn budget(&self) -> Budget {
        self.step_limit.map_or_else(Budget::unlimited, Budget::new)
    }

    pub fn adjacency(&self) -> BallOptions {
        BallOptions { adjacency: true, ..self.ball.clone() }
    }

    pub fn frame(&self, p: &Preset, k: usize, radius: usize) -> Result<Frame, CliError> {
        Ok(Frame::with_options(p.solver.clone(), k, radius, &self.ball)?)
    }
}

/// A preset by name, or a presentation file.
pub fn load_group(spec: Option<&str>) -> Result<Preset, CliError> {
    let spec = spec.ok_or_else(|| config(format!("--group is required (a preset: {})", PRESET_NAMES.join(", "))))?;
    if PRESET_NAMES.contains(&spec) {
        return Ok(preset(spec)?);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(config(format!(
            "{spec:?} is neither a preset ({}) nor a presentation file",
            PRESET_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)?;
    Ok(wire(parse_presentation(&text)?, "loaded from a presentation file")?)
}

fn word(p: &Preset, s: &str) -> Result<Word, CliError> {
    Ok(p.presentation.word(s)?)
}

fn fmt(p: &Preset, w: &[loopshort::Letter]) -> String {
    p.presentation.alphabet.format_word(w)
}

fn require(p: &Preset, name: &str, what: &str) -> Result<(), CliError> {
    if p.name != name {
        return Err(config(format!("{what} is defined for the {name} preset, not {}", p.name)));
    }
    Ok(())
}

pub fn ball(ctx: &Ctx, group: Option<&str>, a: &BallArgs) -> Result<Run, CliError> {
    let p = load_group(group)?;
    let ball = Ball::build_with(p.solver.clone(), a.radius, &ctx.ball)?;
    let report = ball.report(a.elements);
    let row = Row {
        command: "ball".into(),
        group: p.name.clone(),
        bound: Some(a.radius),
        outcome: "ok".into(),
        checked: Some(ball.len() as u64),
        ..Row::default()
    };
    Ok(Run {
        group: Some(p.name.clone()),
        outcome: Status::Ok,
        result: serde_json::to_value(report).expect("ball reports serialize"),
        rows: vec![row],
    })
}

pub fn geodesics(ctx: &Ctx, group: Option<&str>, a: &GeodesicsArgs) -> Result<Run, CliError> {
    let p = load_group(group)?;
    let w = word(&p, &a.word)?;
    let ball = Ball::build_with(p.solver.clone(), a.radius, &ctx.adjacency())?;
    let target = ball
        .index_of(&p.solver.eval(&w))
        .ok_or_else(|| config(format!("{} lies outside B({})", a.word, a.radius)))?;
    let mut listed = Vec::new();
    let mut count = 0usize;
    for g in geodesics_to(&ball, target) {
        if listed.len() < a.limit {
            listed.push(fmt(&p, &g));
        }
        count += 1;
    }
    let result = json!({
        "word": fmt(&p, &w),
        "distance": ball.dist_at(target),
        "is_geodesic": ball.dist_at(target) == w.len(),
        "count": count,
        "geodesics": listed,
        "truncated": count > a.limit,
    });
    let row = Row {
        command: "geodesics".into(),
        group: p.name.clone(),
        bound: Some(a.radius),
        outcome: "ok".into(),
        witness: fmt(&p, &w),
        checked: Some(count as u64),
        ..Row::default()
    };
    Ok(Run { group: Some(p.name.clone()), outcome: Status::Ok, result, rows: vec![row] })
}

pub fn check_fftp(ctx: &Ctx, group: Option<&str>, a: &FftpArgs) -> Result<Run, CliError> {
    if a.max_len == 0 {
        return Err(config("--max-len must be positive"));
    }
    let p = load_group(group)?;
    let frame = ctx.frame(&p, a.k, a.max_len)?;
    let mode = match a.mode {
        FftpModeArg::AllWords => FftpMode::AllWords,
        FftpModeArg::GeodesicPrefix => FftpMode::GeodesicPrefix,
    };
    let v = fftp(&frame, a.max_len, mode, &mut ctx.budget())?.for_group(&p.name);
    Ok(Run::verdict("check-fftp", v))
}

/// `gersten_loop(n)` for `n > k` within the length bound.
pub fn gersten_family(k: usize, max_len: usize) -> LoopFamily {
    let loops = (k + 1..).map(gersten_loop).take_while(|l| l.len() <= max_len).collect();
    LoopFamily::Listed { name: "gersten-loop (n > k)".into(), loops }
}

pub fn check_lsp(ctx: &Ctx, group: Option<&str>, a: &LspArgs, basepoint: bool) -> Result<Run, CliError> {
    if a.max_loop_len == 0 {
        return Err(config("--max-loop-len must be positive"));
    }
    let p = load_group(group)?;
    let (family, radius) = match a.family {
        LoopFamilyArg::All => (LoopFamily::All, a.max_loop_len / 2),
        LoopFamilyArg::GerstenLoop => {
            require(&p, "gersten", "the gersten-loop family")?;
            let f = gersten_family(a.k, a.max_loop_len);
            if matches!(&f, LoopFamily::Listed { loops, .. } if loops.is_empty()) {
                return Err(config(format!(
                    "no gersten_loop(n) with n > {} has length <= {} (gersten_loop(n) has length 8n + 8)",
                    a.k, a.max_loop_len
                )));
            }
            (f, a.k + 1)
        }
    };
    let frame = ctx.frame(&p, a.k, radius)?;
    let v = lsp(&frame, a.max_loop_len, basepoint, &family, &mut ctx.budget())?.for_group(&p.name);
    Ok(Run::verdict(if basepoint { "check-blsp" } else { "check-lsp" }, v))
}

/// `(alpha(n), beta(n))` for every `n` with `3n - 1 <= radius`.
pub fn stallings_pairs(radius: usize) -> Vec<(Word, Word)> {
    (1..).take_while(|n| 3 * n - 1 <= radius).map(|n| (stallings_alpha(n), stallings_beta(n))).collect()
}

pub fn check_ac(ctx: &Ctx, group: Option<&str>, a: &AcArgs) -> Result<Run, CliError> {
    let p = load_group(group)?;
    if a.family == PairFamilyArg::StallingsAlphaBeta {
        require(&p, "stallings", "the stallings-alpha-beta family")?;
        if a.sphere {
            return Err(config("--sphere does not combine with a pair family"));
        }
        if a.n < 2 {
            return Err(config("the stallings-alpha-beta family needs N >= 2"));
        }
    }
    let ball = Ball::build_with(p.solver.clone(), a.n, &ctx.adjacency())?;
    let v = match a.family {
        PairFamilyArg::All => ac(&ball, a.c, a.sphere)?,
        PairFamilyArg::StallingsAlphaBeta => check_ac_pairs(&ball, a.c, "stallings-alpha-beta", &stallings_pairs(a.n))?,
    }
    .for_group(&p.name);
    let mut run = Run::verdict("check-ac", v);
    // The full search reports the shortlex-first pair; for the Stallings
    // group also report the named witness family on the same ball.
    if a.family == PairFamilyArg::All && !a.sphere && p.name == "stallings" && a.n >= 2 {
        let f = check_ac_pairs(&ball, a.c, "stallings-alpha-beta", &stallings_pairs(a.n))?.for_group(&p.name);
        run.rows.push(Row::from_verdict("check-ac", &f));
        run.result = json!({ "verdict": run.result, "family_check": f });
    } else {
        run.result = json!({ "verdict": run.result });
    }
    Ok(run)
}

pub fn fill(ctx: &Ctx, group: Option<&str>, a: &FillArgs) -> Result<Run, CliError> {
    let p = load_group(group)?;
    let mut row = Row { command: "fill".into(), group: p.name.clone(), property: "quadratic-fill".into(), k: Some(a.k), ..Row::default() };
    if let Some(s) = &a.word {
        let w = word(&p, s)?;
        if !p.solver.is_identity_word(&w) {
            return Err(config(format!("{s} does not represent the identity")));
        }
        let frame = ctx.frame(&p, a.k, a.k + 1)?;
        row.bound = Some(w.len());
        row.quantifier = format!("the loop {}", fmt(&p, &w));
        return match fill_word(&frame, &w, &mut ctx.budget()) {
            Ok(cert) => {
                cert.verify(p.solver.as_ref()).map_err(|e| config(format!("certificate failed its recount: {e}")))?;
                let summary = cert.summary(&p.presentation.alphabet);
                row.outcome = status_name(Status::HoldsUpToBound).into();
                row.checked = Some(cert.steps.len() as u64);
                let relators: Vec<Vec<String>> =
                    cert.steps.iter().map(|s| s.relators.iter().map(|r| fmt(&p, r)).collect()).collect();
                let offsets: Vec<String> = cert.steps.iter().map(|s| fmt(&p, &s.offset)).collect();
                Ok(Run {
                    group: Some(p.name.clone()),
                    outcome: Status::HoldsUpToBound,
                    result: json!({ "certificate": summary, "offsets": offsets, "relators": relators, "verified": true }),
                    rows: vec![row],
                })
            }
            Err(PropertyError::Stuck { word, k }) => {
                row.outcome = status_name(Status::Counterexample).into();
                row.witness = format!("stuck={word}");
                Ok(Run {
                    group: Some(p.name.clone()),
                    outcome: Status::Counterexample,
                    result: json!({ "stuck": word, "k": k, "detail": "this loop has no shorter k-fellow traveler, so it is also a counterexample to the loop shortening property" }),
                    rows: vec![row],
                })
            }
            Err(e) => Err(e.into()),
        };
    }
    let max_len = a.max_len.expect("clap enforces one target");
    let frame = ctx.frame(&p, a.k, max_len / 2)?;
    let sweep = fill_sweep(&frame, max_len, &mut ctx.budget())?;
    let status = if sweep.within_bounds() { Status::HoldsUpToBound } else { Status::Counterexample };
    row.bound = Some(max_len);
    row.quantifier = format!("all identity words of length <= {max_len}");
    row.outcome = status_name(status).into();
    row.witness = sweep.stuck.clone().map(|s| format!("stuck={s}")).unwrap_or_default();
    row.checked = Some(sweep.loops_by_len.iter().sum());
    Ok(Run {
        group: Some(p.name.clone()),
        outcome: status,
        result: json!({ "sweep": sweep, "within_bounds": sweep.within_bounds() }),
        rows: vec![row],
    })
}

fn sync_json(p: &Preset, s: &Synchronized, phi: &Reparameterization) -> Value {
    json!({
        "case": s.case,
        "j": s.j,
        "l": s.l,
        "phi": phi.as_slice(),
        "p1": s.p1.as_ref().map(|w| fmt(p, w)),
        "p2": s.p2.as_ref().map(|w| fmt(p, w)),
        "v": fmt(p, &s.v),
        "v_starts_at_w0": s.start == p.solver.identity(),
        "constant": s.constant,
        "report": s.report,
    })
}

pub fn synchronize(ctx: &Ctx, group: Option<&str>, a: &SyncArgs) -> Result<Run, CliError> {
    let p = load_group(group)?;
    let m = Search(p.solver.as_ref());
    let id = p.solver.identity();
    let mut row = Row { command: "synchronize".into(), group: p.name.clone(), property: "synchronize".into(), k: Some(a.k), ..Row::default() };
    if let Some(count) = a.suite {
        if a.max_len < 4 {
            return Err(config("--max-len must be at least 4 for a suite"));
        }
        let pairs = async_pairs(&m, a.k, count, a.max_len, ctx.seed);
        let mut cases = [0usize; 4];
        let mut failures = Vec::new();
        let mut out = Vec::new();
        for pair in &pairs {
            match sync_pair(&m, &m, &id, &pair.w, &id, &pair.u, &pair.phi, a.k) {
                Ok(s) => {
                    cases[s.case as usize] += 1;
                    out.push(json!({
                        "w": fmt(&p, &pair.w), "u": fmt(&p, &pair.u), "case": s.case,
                        "v": fmt(&p, &s.v), "constant": s.constant, "max_distance": s.report.max_distance,
                    }));
                }
                Err(e) => failures.push(json!({ "w": fmt(&p, &pair.w), "u": fmt(&p, &pair.u), "phi": pair.phi.as_slice(), "error": e.to_string() })),
            }
        }
        let status = if failures.is_empty() { Status::HoldsUpToBound } else { Status::Counterexample };
        row.bound = Some(a.max_len);
        row.quantifier = format!("{} generated pairs (seed {})", pairs.len(), ctx.seed);
        row.outcome = status_name(status).into();
        row.checked = Some(pairs.len() as u64);
        return Ok(Run {
            group: Some(p.name.clone()),
            outcome: status,
            result: json!({
                "generated": pairs.len(),
                "cases": { "1": cases[1], "2": cases[2], "3": cases[3] },
                "failures": failures,
                "pairs": out,
            }),
            rows: vec![row],
        });
    }
    let (Some(ws), Some(us)) = (&a.w, &a.u) else {
        return Err(config("give --w and --u, or --suite"));
    };
    let (w, u) = (word(&p, ws)?, word(&p, us)?);
    let phi = match &a.phi {
        Some(s) => {
            let map = s
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| config(format!("bad --phi entry {x:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Reparameterization::new(map)?
        }
        None => async_ft(&m, &w, &u, a.k)
            .ok_or_else(|| config(format!("{ws} and {us} do not asynchronously {}-fellow travel", a.k)))?,
    };
    let s = sync_pair(&m, &m, &id, &w, &id, &u, &phi, a.k)?;
    row.bound = Some(w.len());
    row.outcome = "ok".into();
    row.witness = format!("case={};v={}", s.case, fmt(&p, &s.v));
    Ok(Run { group: Some(p.name.clone()), outcome: Status::Ok, result: sync_json(&p, &s, &phi), rows: vec![row] })
}

pub fn witness(_ctx: &Ctx, a: &WitnessArgs) -> Result<Run, CliError> {
    if a.n == 0 {
        return Err(config("--n must be at least 1"));
    }
    let (group, result) = match a.family {
        WitnessFamily::GerstenLoop | WitnessFamily::GerstenAsPrinted => {
            let p = preset("gersten")?;
            let w = if a.family == WitnessFamily::GerstenLoop { gersten_loop(a.n) } else { gersten_word_as_printed(a.n) };
            let r = json!({ "word": fmt(&p, &w), "length": w.len(), "is_loop": p.solver.is_identity_word(&w) });
            (p.name, r)
        }
        WitnessFamily::StallingsAlpha | WitnessFamily::StallingsBeta | WitnessFamily::StallingsGamma => {
            let p = preset("stallings")?;
            let w = match a.family {
                WitnessFamily::StallingsAlpha => stallings_alpha(a.n),
                WitnessFamily::StallingsBeta => stallings_beta(a.n),
                _ => stallings_gamma(),
            };
            let mut r = json!({ "word": fmt(&p, &w), "length": w.len() });
            if a.family != WitnessFamily::StallingsGamma {
                let (x, y) = (p.solver.eval(&stallings_alpha(a.n)), p.solver.eval(&stallings_beta(a.n)));
                r["alpha_beta_distance"] = json!(bounded_distance(p.solver.as_ref(), &x, &y, 2));
            }
            (p.name, r)
        }
        WitnessFamily::LemmaBb => {
            let target = lemma_bb_target(a.n, a.z)?;
            let s = lemma_bb_min_length(a.n, a.z, a.search_budget)?;
            let p = preset("stallings")?;
            let r = json!({
                "target": target,
                "min_length": s.min_length,
                "witness": fmt(&p, &s.witness),
                "lower_bound_claimed": 3 * a.n,
                "expanded": s.expanded,
            });
            (p.name, r)
        }
    };
    let row = Row {
        command: "witness".into(),
        group: group.clone(),
        property: serde_json::to_value(a.family).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        outcome: "ok".into(),
        witness: result.get("word").or(result.get("witness")).and_then(|v| v.as_str()).unwrap_or("").into(),
        ..Row::default()
    };
    Ok(Run { group: Some(group), outcome: Status::Ok, result, rows: vec![row] })
}

pub fn hnn_verify(ctx: &Ctx, group: Option<&str>, a: &HnnArgs) -> Result<Run, CliError> {
    let p = load_group(group)?;
    let h = p.hnn.clone().ok_or_else(|| config(format!("{} is not an HNN extension", p.name)))?;
    let mut verdicts: Vec<Verdict> = vec![check_strip_equidistant(h.as_ref(), a.radius)?.for_group(&p.name)];
    let st = h.structure();
    let base = h.base_solver();
    let bal = base.alphabet().clone();
    let ball = Ball::build_with(base.clone(), a.radius, &ctx.adjacency())?;
    let mut subgroups: Vec<Word> = Vec::new();
    let mut skipped = Vec::new();
    for s in &st.stable {
        if s.oracle == OracleKind::Full {
            continue;
        }
        for (u, v) in &s.pairs {
            for g in [u, v] {
                // Only subgroups generated by letters are checked letterwise.
                if g.len() == 1 {
                    if !subgroups.contains(g) {
                        subgroups.push(g.clone());
                    }
                } else {
                    skipped.push(bal.format_word(g));
                }
            }
        }
    }
    for g in &subgroups {
        verdicts.push(check_totally_geodesic(&ball, g).for_group(&p.name));
    }
    let mut status = if verdicts.iter().all(Verdict::holds) { Status::HoldsUpToBound } else { Status::Counterexample };
    let mut rows: Vec<Row> = verdicts.iter().map(|v| Row::from_verdict("hnn-verify", v)).collect();
    let mut result = json!({ "verdicts": verdicts, "skipped_subgroups": skipped });
    if let Some(s) = &a.shorten {
        let mut w = word(&p, s)?;
        let frame = Frame::with_options(base.clone(), a.k_base, a.k_base + 1, &ctx.ball)?;
        let mut budget = ctx.budget();
        let mut steps = Vec::new();
        let mut all_hold = true;
        while let Some(step) = hnn_shorten(h.as_ref(), &frame, &w, &mut budget)? {
            all_hold &= step.report.holds;
            steps.push(json!({
                "from": fmt(&p, &w),
                "case": step.case,
                "to": fmt(&p, &step.u),
                "shift": step.shift,
                "constant": step.constant,
                "fellow_travels": step.report.holds,
            }));
            w = step.u;
        }
        if !all_hold {
            status = Status::Counterexample;
        }
        rows.push(Row {
            command: "hnn-verify".into(),
            group: p.name.clone(),
            property: "hnn-shorten".into(),
            k: Some(a.k_base),
            quantifier: format!("the loop {s}"),
            outcome: status_name(if all_hold { Status::HoldsUpToBound } else { Status::Counterexample }).into(),
            checked: Some(steps.len() as u64),
            ..Row::default()
        });
        result["shortening"] = json!(steps);
    }
    Ok(Run { group: Some(p.name.clone()), outcome: status, result, rows })
}
