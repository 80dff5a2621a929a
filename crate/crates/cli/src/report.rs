//! Report header, JSON emission and CSV summaries.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use loopshort::properties::{Outcome, Verdict};
use serde::Serialize;
use serde_json::Value;

use crate::commands::Ctx;

/// Bumped whenever a field changes meaning or moves.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    HoldsUpToBound,
    Counterexample,
    Error,
}

impl From<Outcome> for Status {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::HoldsUpToBound => Status::HoldsUpToBound,
            Outcome::Counterexample => Status::Counterexample,
        }
    }
}

/// One line of the CSV summary. Columns that do not apply stay empty.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Row {
    pub command: String,
    pub group: String,
    pub property: String,
    pub k: Option<usize>,
    pub c: Option<usize>,
    pub bound: Option<usize>,
    pub quantifier: String,
    pub outcome: String,
    pub witness: String,
    pub checked: Option<u64>,
    pub steps: Option<u64>,
    pub published: String,
    pub agreement: String,
}

impl Row {
    pub fn from_verdict(command: &str, v: &Verdict) -> Row {
        Row {
            command: command.into(),
            group: v.group.clone(),
            property: v.property.name().into(),
            k: v.k,
            c: v.c,
            bound: Some(v.bound),
            quantifier: v.quantifier.clone(),
            outcome: status_name(v.outcome.into()).into(),
            witness: witness_text(v),
            checked: Some(v.stats.checked),
            steps: Some(v.stats.steps),
            ..Row::default()
        }
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::HoldsUpToBound => "holds-up-to-bound",
        Status::Counterexample => "counterexample",
        Status::Error => "error",
    }
}

pub fn witness_text(v: &Verdict) -> String {
    v.witness
        .as_ref()
        .map(|w| w.entries.iter().map(|e| format!("{}={}", e.role, e.word)).collect::<Vec<_>>().join(";"))
        .unwrap_or_default()
}

/// What a command hands back to the report writer.
pub struct Run {
    pub group: Option<String>,
    pub outcome: Status,
    pub result: Value,
    pub rows: Vec<Row>,
}

impl Run {
    pub fn verdict(command: &str, v: Verdict) -> Run {
        let row = Row::from_verdict(command, &v);
        Run {
            group: Some(v.group.clone()),
            outcome: v.outcome.into(),
            result: serde_json::to_value(&v).expect("verdicts serialize"),
            rows: vec![row],
        }
    }
}

#[derive(Serialize)]
struct Config {
    seed: u64,
    budget: Option<u64>,
    memory_budget: usize,
}

/// Wall-clock data, kept in one field so reruns can be compared by
/// dropping it.
#[derive(Serialize)]
pub struct Timestamps {
    started_unix_ms: u128,
    wall_time_ms: u128,
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub group: Option<String>,
    params: Value,
    config: Config,
    pub outcome: Status,
    result: Value,
    timestamps: Timestamps,
    #[serde(skip)]
    rows: Vec<Row>,
}

pub fn params<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).expect("arguments serialize")
}

fn timestamps(started: SystemTime, elapsed: Duration) -> Timestamps {
    Timestamps {
        started_unix_ms: started.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis()),
        wall_time_ms: elapsed.as_millis(),
    }
}

fn config(ctx: &Ctx) -> Config {
    Config { seed: ctx.seed, budget: ctx.step_limit, memory_budget: ctx.ball.memory_budget }
}

impl Report {
    pub fn new(command: &str, params: Value, ctx: &Ctx, run: Run, started: SystemTime, elapsed: Duration) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            group: run.group,
            params,
            config: config(ctx),
            outcome: run.outcome,
            result: run.result,
            timestamps: timestamps(started, elapsed),
            rows: run.rows,
        }
    }

    pub fn error(
        command: &str,
        group: Option<String>,
        params: Value,
        ctx: &Ctx,
        message: &str,
        started: SystemTime,
        elapsed: Duration,
    ) -> Report {
        let row = Row {
            command: command.into(),
            group: group.clone().unwrap_or_default(),
            outcome: "error".into(),
            witness: message.into(),
            ..Row::default()
        };
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            group,
            params,
            config: config(ctx),
            outcome: Status::Error,
            result: serde_json::json!({ "error": message }),
            timestamps: timestamps(started, elapsed),
            rows: vec![row],
        }
    }

    pub fn emit(&self, stdout: bool, json: Option<&Path>, csv_path: Option<&Path>) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        if stdout {
            io::stdout().lock().write_all(text.as_bytes())?;
        }
        if let Some(p) = json {
            File::create(p)?.write_all(text.as_bytes())?;
        }
        if let Some(p) = csv_path {
            let mut w = csv::Writer::from_path(p)?;
            for r in &self.rows {
                w.serialize(r).map_err(io::Error::other)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}
