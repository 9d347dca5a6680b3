//! CSV and JSON rendering. CSV output starts with `# key=value` metadata
//! lines; hit-ratio tables add one `# cell ...` line before each cell's rows.
//! Floats use Rust's shortest round-trip formatting.

use anyhow::Result;
use serde::Serialize;
use serde_json::json;

use lru_chartime::simulator::{RNG_ALGORITHM, SAMPLER_ALGORITHM};

use crate::compute::{ChartimeCell, HitCell, ProfileSource, Thresholds, ValidateCell};
use crate::spec::{OutputFormat, RunSpec};

pub const HITRATIO_HEADER: [&str; 6] = ["rank", "p", "pi_analytic", "pi_normalized", "pi_simulated", "pi_oracle"];
pub const CHARTIME_HEADER: [&str; 8] = ["a", "C", "r_exact", "r_method", "method", "status", "r_fallback", "error"];
pub const VALIDATE_HEADER: [&str; 10] = [
    "a", "C", "left", "right", "mae", "max_abs", "mass_gap_left", "mass_gap_right", "status", "error",
];

/// Run-level metadata embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub objects: usize,
    pub skew: Vec<f64>,
    pub capacity: Vec<usize>,
    pub method: &'static str,
    pub normalize: bool,
    pub fallback: bool,
    pub seed: u64,
    pub requests: u64,
    /// `None` means the default (C requests per cell).
    pub warmup: Option<u64>,
    pub oracle: bool,
    pub rng: &'static str,
    pub sampler: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<ProfileSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<ProfileSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

impl Metadata {
    pub fn new(command: &'static str, spec: &RunSpec) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            objects: spec.n_objects,
            skew: spec.skewness.clone(),
            capacity: spec.capacity.clone(),
            method: spec.method.as_str(),
            normalize: spec.normalize,
            fallback: spec.fallback(),
            seed: spec.seed,
            requests: spec.n_requests,
            warmup: spec.warmup,
            oracle: spec.oracle,
            rng: RNG_ALGORITHM,
            sampler: SAMPLER_ALGORITHM,
            left: None,
            right: None,
            thresholds: None,
        }
    }

    fn comment_lines(&self) -> String {
        let list = |v: &[String]| v.join(";");
        let mut pairs = vec![
            ("tool", self.tool.to_string()),
            ("version", self.version.to_string()),
            ("command", self.command.to_string()),
            ("objects", self.objects.to_string()),
            ("skew", list(&self.skew.iter().map(f64::to_string).collect::<Vec<_>>())),
            ("capacity", list(&self.capacity.iter().map(usize::to_string).collect::<Vec<_>>())),
            ("method", self.method.to_string()),
            ("normalize", self.normalize.to_string()),
            ("fallback", self.fallback.to_string()),
            ("seed", self.seed.to_string()),
            ("requests", self.requests.to_string()),
            ("warmup", self.warmup.map_or("default".into(), |w| w.to_string())),
            ("oracle", self.oracle.to_string()),
            ("rng", self.rng.to_string()),
            ("sampler", self.sampler.to_string()),
        ];
        if let Some(l) = self.left {
            pairs.push(("left", l.as_str().into()));
        }
        if let Some(r) = self.right {
            pairs.push(("right", r.as_str().into()));
        }
        if let Some(t) = &self.thresholds {
            pairs.push(("max_mae", opt(t.max_mae)));
            pairs.push(("max_abs", opt(t.max_abs)));
            pairs.push(("max_mass_gap", opt(t.max_mass_gap)));
        }
        pairs.into_iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_block<I, R>(header: Option<&[&str]>, rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_document(meta: &Metadata, cells: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&json!({ "metadata": meta, "cells": cells }))?;
    s.push('\n');
    Ok(s)
}

pub fn render_chartime(meta: &Metadata, cells: &[ChartimeCell], format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json_document(meta, &cells);
    }
    let rows = cells.iter().map(|c| {
        vec![
            c.skew.to_string(),
            c.capacity.to_string(),
            opt(c.r_exact),
            opt(c.r_method),
            meta.method.to_string(),
            c.status.to_string(),
            opt(c.r_fallback),
            c.error.as_ref().map(|e| e.message.clone()).unwrap_or_default(),
        ]
    });
    Ok(meta.comment_lines() + &csv_block(Some(&CHARTIME_HEADER), rows)?)
}

pub fn render_hitratio(meta: &Metadata, cells: &[HitCell], format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json_document(meta, &cells);
    }
    let mut out = meta.comment_lines();
    out += &csv_block(Some(&HITRATIO_HEADER), std::iter::empty::<Vec<String>>())?;
    for cell in cells {
        let mut line = format!("# cell a={} C={} seed={} warmup={}", cell.skew, cell.capacity, cell.seed, cell.warmup);
        match (&cell.time, &cell.error) {
            (Some(t), _) => {
                line += &format!(" r={} method_used={} fallback={}", t.r, t.method_used, t.no_admissible_root)
            }
            (None, Some(e)) => line += &format!(" error={}", e.message.replace('\n', " ")),
            (None, None) => {}
        }
        out += &line;
        out.push('\n');
        let rows = cell.rows.iter().map(|r| {
            vec![
                r.rank.to_string(),
                r.p.to_string(),
                opt(r.pi_analytic),
                opt(r.pi_normalized),
                opt(r.pi_simulated),
                opt(r.pi_oracle),
            ]
        });
        out += &csv_block(None, rows)?;
    }
    Ok(out)
}

pub fn render_validate(meta: &Metadata, cells: &[ValidateCell], format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json_document(meta, &cells);
    }
    let rows = cells.iter().map(|c| {
        let m = c.metrics;
        vec![
            c.skew.to_string(),
            c.capacity.to_string(),
            c.left.as_str().to_string(),
            c.right.as_str().to_string(),
            opt(m.map(|m| m.mae)),
            opt(m.map(|m| m.max_abs)),
            opt(m.map(|m| m.mass_gap_left)),
            opt(m.map(|m| m.mass_gap_right)),
            c.status.to_string(),
            c.error.as_ref().map(|e| e.message.clone()).unwrap_or_default(),
        ]
    });
    Ok(meta.comment_lines() + &csv_block(Some(&VALIDATE_HEADER), rows)?)
}

/// Output of this tool read back: metadata pairs plus the header and data
/// records (cell comment lines are skipped).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl ParsedCsv {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let metadata = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .filter(|(k, _)| !k.contains(' '))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let records = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(ParsedCsv {
        metadata,
        header,
        records,
    })
}
