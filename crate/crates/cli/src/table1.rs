//! The examples table at desk scale: each computable column is checked at
//! fixed constants and bounds and set beside the published entry.
//!
//! A finite run never settles an entry. "holds up to bound" at some k is
//! evidence for "yes"; a counterexample at every k tried is evidence for
//! "no". The agreement column says only whether the finite outcome points
//! the same way.

use loopshort::cayley::Ball;
use loopshort::properties::{
    check_ac, check_ac_pairs, check_fftp, check_lsp, fill_sweep, FftpMode, LoopFamily, Verdict,
};
use loopshort::zoo::{preset, Preset};
use serde::Serialize;
use serde_json::json;

use crate::commands::{gersten_family, stallings_pairs, CliError, Ctx};
use crate::report::{status_name, witness_text, Row, Run, Status};
use crate::Table1Args;

const COLUMNS: [&str; 7] = ["fftp", "blsp", "lsp", "almost-convex", "automatic", "cat0", "quadratic-dehn"];

/// Published entries, in `COLUMNS` order.
fn published(group: &str) -> Option<[&'static str; 7]> {
    Some(match group {
        "bridson" => ["?", "yes", "yes", "yes", "yes", "yes", "yes"],
        "wise" => ["no", "yes", "yes", "yes", "?", "yes", "yes"],
        "gersten" => ["no", "no", "no", "yes", "no", "no", "yes"],
        "stallings" => ["no", "no", "?", "no", "no", "no", "yes"],
        _ => return None,
    })
}

fn label(group: &str) -> &'static str {
    match group {
        "bridson" => "G_B",
        "wise" => "G_W",
        "gersten" => "G_G",
        _ => "G_S",
    }
}

#[derive(Serialize)]
struct Cell {
    group: String,
    column: &'static str,
    published: &'static str,
    /// `holds-up-to-bound`, `counterexample` or `not-checked`.
    finite: String,
    /// The constant at which the finite check held, if any.
    constant: Option<usize>,
    agreement: &'static str,
    runs: Vec<Verdict>,
    note: String,
}

fn agreement(published: &str, finite: Option<Status>) -> &'static str {
    match (published, finite) {
        (_, None) => "not-checked",
        ("?", _) => "open",
        ("yes", Some(Status::HoldsUpToBound)) | ("no", Some(Status::Counterexample)) => "consistent",
        _ => "inconclusive",
    }
}

fn cell(p: &Preset, column: &'static str, finite: Option<Status>, constant: Option<usize>, runs: Vec<Verdict>, note: String) -> Cell {
    let published = published(&p.name).expect("checked group")[COLUMNS.iter().position(|&c| c == column).expect("column")];
    Cell {
        group: label(&p.name).into(),
        column,
        published,
        finite: finite.map_or("not-checked", status_name).into(),
        constant,
        agreement: agreement(published, finite),
        runs,
        note,
    }
}

/// Tries `k = 1, 2, ...` until a run holds.
fn first_holding(
    max_k: usize,
    mut run: impl FnMut(usize) -> Result<Vec<Verdict>, CliError>,
) -> Result<(Status, Option<usize>, Vec<Verdict>), CliError> {
    let mut all = Vec::new();
    for k in 1..=max_k {
        let vs = run(k)?;
        let holds = vs.iter().all(Verdict::holds);
        all.extend(vs);
        if holds {
            return Ok((Status::HoldsUpToBound, Some(k), all));
        }
    }
    Ok((Status::Counterexample, None, all))
}

fn group_cells(ctx: &Ctx, a: &Table1Args, p: &Preset) -> Result<Vec<Cell>, CliError> {
    let mut cells = Vec::new();

    let (s, k, runs) = first_holding(a.max_k, |k| {
        let frame = ctx.frame(p, k, a.fftp_len)?;
        Ok(vec![check_fftp(&frame, a.fftp_len, FftpMode::AllWords, &mut ctx.budget())?.for_group(&p.name)])
    })?;
    cells.push(cell(p, "fftp", Some(s), k, runs, format!("all words of length <= {}, k <= {}", a.fftp_len, a.max_k)));

    let family_len = a.family_loop_len.unwrap_or(8 * (a.max_k + 1) + 8);
    let mut lsp_k = None;
    for (column, basepoint) in [("blsp", true), ("lsp", false)] {
        let (s, k, runs) = first_holding(a.max_k, |k| {
            let frame = ctx.frame(p, k, a.loop_len / 2)?;
            let mut vs = vec![check_lsp(&frame, a.loop_len, basepoint, &LoopFamily::All, &mut ctx.budget())?.for_group(&p.name)];
            if p.name == "gersten" {
                let fam = gersten_family(k, family_len);
                if matches!(&fam, LoopFamily::Listed { loops, .. } if !loops.is_empty()) {
                    vs.push(check_lsp(&frame, family_len, basepoint, &fam, &mut ctx.budget())?.for_group(&p.name));
                }
            }
            Ok(vs)
        })?;
        if !basepoint {
            lsp_k = k;
        }
        let mut note = format!("all loops of length <= {}, k <= {}", a.loop_len, a.max_k);
        if p.name == "gersten" {
            note.push_str(&format!("; plus gersten_loop(n), n > k, of length <= {family_len}"));
        }
        cells.push(cell(p, column, Some(s), k, runs, note));
    }

    // Smallest C <= ac_max_c that works in B(ac_radius).
    let ball = Ball::build_with(p.solver.clone(), a.ac_radius, &ctx.adjacency())?;
    let mut runs = Vec::new();
    let mut ac_c = None;
    for c in 2..=a.ac_max_c.max(2) {
        let v = check_ac(&ball, c, false)?.for_group(&p.name);
        let holds = v.holds();
        runs.push(v);
        if holds {
            ac_c = Some(c);
            break;
        }
    }
    if p.name == "stallings" {
        let c = ac_c.unwrap_or(a.ac_max_c.max(2));
        runs.push(check_ac_pairs(&ball, c, "stallings-alpha-beta", &stallings_pairs(a.ac_radius))?.for_group(&p.name));
    }
    let s = if runs.last().is_some_and(Verdict::holds) { Status::HoldsUpToBound } else { Status::Counterexample };
    let note = format!("pairs in B({}) at distance <= 2, 2 <= C <= {}", a.ac_radius, a.ac_max_c.max(2));
    cells.push(cell(p, "almost-convex", Some(s), ac_c, runs, note));

    cells.push(cell(p, "automatic", None, None, Vec::new(), "no finite check".into()));
    cells.push(cell(p, "cat0", None, None, Vec::new(), "no finite check".into()));

    // Quadratic filling by iterated shortening, at the first constant
    // where the loop shortening check held.
    match lsp_k {
        Some(k) => {
            let frame = ctx.frame(p, k, a.loop_len / 2)?;
            let sweep = fill_sweep(&frame, a.loop_len, &mut ctx.budget())?;
            let s = if sweep.within_bounds() { Status::HoldsUpToBound } else { Status::Counterexample };
            let note = format!(
                "every identity word of length <= {} filled with area <= n^2 at k = {k} (area by length {:?})",
                a.loop_len, sweep.area_by_len
            );
            cells.push(cell(p, "quadratic-dehn", Some(s), Some(k), Vec::new(), note));
        }
        None => cells.push(cell(p, "quadratic-dehn", None, None, Vec::new(), "loop shortening failed at every k tried".into())),
    }
    Ok(cells)
}

pub fn run(ctx: &Ctx, a: &Table1Args) -> Result<Run, CliError> {
    if a.max_k == 0 || a.fftp_len == 0 || a.loop_len == 0 {
        return Err(CliError::Config("--max-k, --fftp-len and --loop-len must be positive".into()));
    }
    let mut groups = Vec::new();
    for g in &a.groups {
        if published(g).is_none() {
            return Err(CliError::Config(format!("{g:?} is not in the table (bridson, wise, gersten, stallings)")));
        }
        groups.push(preset(g)?);
    }
    let mut cells = Vec::new();
    for p in &groups {
        cells.extend(group_cells(ctx, a, p)?);
    }
    let grid: Vec<Vec<String>> = groups
        .iter()
        .map(|p| {
            let mut row = vec![label(&p.name).to_string()];
            for c in cells.iter().filter(|c| c.group == label(&p.name)) {
                let finite = match (c.finite.as_str(), c.constant) {
                    ("holds-up-to-bound", Some(k)) => format!("holds@{k}"),
                    ("holds-up-to-bound", None) => "holds".into(),
                    ("counterexample", _) => "fails".into(),
                    _ => "-".into(),
                };
                row.push(format!("{} / {}", c.published, finite));
            }
            row
        })
        .collect();
    let rows = cells
        .iter()
        .map(|c| Row {
            command: "table1".into(),
            group: c.group.clone(),
            property: c.column.into(),
            k: c.constant,
            quantifier: c.note.clone(),
            outcome: c.finite.clone(),
            witness: c.runs.iter().map(witness_text).filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" | "),
            checked: Some(c.runs.iter().map(|v| v.stats.checked).sum()),
            published: c.published.into(),
            agreement: c.agreement.into(),
            ..Row::default()
        })
        .collect();
    Ok(Run {
        group: None,
        outcome: Status::Ok,
        result: json!({ "columns": COLUMNS, "grid": grid, "cells": cells }),
        rows,
    })
}
