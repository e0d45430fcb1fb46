//! Family sweeps persisted as append-only JSONL.
//!
//! Cells are evaluated on a thread pool but written by one writer in
//! ascending parameter order. A rerun skips every cell whose
//! `(family, command)` pair already has a record.

use std::collections::{BTreeMap, HashMap};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use charp_core::criteria::{is_ordinary_curve, ulrich_check_curve, fedder_is_split};
use charp_core::families::{
    cartier_manin_hyperelliptic, deuring_hasse, is_smooth, legendre_hyperelliptic_coefficients,
    FamilySpec,
};
use charp_core::cohom::hasse_witt;
use charp_core::verdict::{Evidence, OracleEvidence, Verdict, VerdictKind, VerdictValue};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{parse_values, Format, ScanArgs, ScanFamily};
use crate::commands::require_smooth_curve;
use crate::error::{CliError, Result, EXIT_POSITIVE};
use crate::report::{kind_name, SCHEMA_VERSION, TOOL_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRecord {
    pub schema_version: u32,
    /// RFC 3339; the only field allowed to differ between identical runs.
    pub timestamp: String,
    pub family: FamilySpec,
    pub command: String,
    pub verdicts: Vec<Verdict>,
    /// SHA-256 of the canonical JSON of `verdicts`.
    pub evidence_digest: String,
    pub tool_version: String,
}

impl ScanRecord {
    pub fn new(family: FamilySpec, command: &str, verdicts: Vec<Verdict>, timestamp: String) -> Self {
        let evidence_digest = digest(&verdicts);
        ScanRecord {
            schema_version: SCHEMA_VERSION,
            timestamp,
            family,
            command: command.to_string(),
            verdicts,
            evidence_digest,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    /// Parses one JSONL line.
    pub fn parse_line(line: &str) -> serde_json::Result<ScanRecord> {
        serde_json::from_str(line)
    }

    pub fn digest_matches(&self) -> bool {
        digest(&self.verdicts) == self.evidence_digest
    }
}

pub fn digest(verdicts: &[Verdict]) -> String {
    let bytes = serde_json::to_vec(verdicts).expect("verdicts serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// `SOURCE_DATE_EPOCH` pins the clock for reproducible logs.
fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct KindCount {
    pub positive: usize,
    pub negative: usize,
    pub positive_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub family: String,
    pub command: String,
    pub p: u64,
    pub cells: usize,
    pub counts: BTreeMap<String, KindCount>,
    /// Members with a negative verdict, by verdict kind, in parameter order.
    pub negative_members: BTreeMap<String, Vec<FamilySpec>>,
}

impl ScanSummary {
    fn from_records<'a>(args: &ScanArgs, command: &str, records: impl Iterator<Item = &'a ScanRecord>) -> Self {
        let mut counts: BTreeMap<String, KindCount> = BTreeMap::new();
        let mut negative_members: BTreeMap<String, Vec<FamilySpec>> = BTreeMap::new();
        let mut cells = 0;
        for r in records {
            cells += 1;
            for v in &r.verdicts {
                let kind = kind_name(v.kind).to_string();
                let c = counts.entry(kind.clone()).or_default();
                if v.is_positive() {
                    c.positive += 1;
                } else {
                    c.negative += 1;
                    negative_members.entry(kind).or_default().push(r.family.clone());
                }
            }
        }
        for c in counts.values_mut() {
            c.positive_fraction = c.positive as f64 / (c.positive + c.negative).max(1) as f64;
        }
        ScanSummary {
            family: scan_family_name(args.family).into(),
            command: command.into(),
            p: args.p,
            cells,
            counts,
            negative_members,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["family", "command", "p", "kind", "positive", "negative", "positive_fraction"])?;
                for (kind, c) in &self.counts {
                    w.write_record([
                        self.family.clone(),
                        self.command.clone(),
                        self.p.to_string(),
                        kind.clone(),
                        c.positive.to_string(),
                        c.negative.to_string(),
                        format!("{:.4}", c.positive_fraction),
                    ])?;
                }
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
            }
            Format::Md => {
                let mut out = format!(
                    "## scan {} ({}), p = {}, {} cells\n\n| kind | positive | negative | fraction |\n|---|---|---|---|\n",
                    self.family, self.command, self.p, self.cells
                );
                for (kind, c) in &self.counts {
                    out += &format!(
                        "| {kind} | {} | {} | {:.4} |\n",
                        c.positive, c.negative, c.positive_fraction
                    );
                }
                for (kind, members) in &self.negative_members {
                    let list: Vec<String> = members.iter().map(ToString::to_string).collect();
                    out += &format!("\nnegative {kind}: {}\n", list.join("; "));
                }
                Ok(out)
            }
        }
    }
}

fn scan_family_name(f: ScanFamily) -> &'static str {
    match f {
        ScanFamily::Dwork => "dwork",
        ScanFamily::Legendre => "legendre-cubic",
        ScanFamily::RandomPlaneCurve => "random-plane-curve",
    }
}

fn scan_command(f: ScanFamily) -> &'static str {
    match f {
        ScanFamily::Dwork => "fedder",
        ScanFamily::Legendre => "oracle",
        ScanFamily::RandomPlaneCurve => "ordinary",
    }
}

/// The cells of a scan in ascending parameter order.
pub fn scan_cells(args: &ScanArgs) -> Result<Vec<FamilySpec>> {
    let p = args.p;
    Ok(match args.family {
        ScanFamily::Dwork => parse_values(&args.lambda, 0..p)?
            .into_iter()
            .map(|lambda| FamilySpec::Dwork { p, n: args.n, lambda })
            .collect(),
        ScanFamily::Legendre => parse_values(&args.lambda, 2..p)?
            .into_iter()
            .map(|lambda| FamilySpec::LegendreCubic { p, lambda })
            .collect(),
        ScanFamily::RandomPlaneCurve => parse_values(&args.seeds, 0..10)?
            .into_iter()
            .map(|seed| FamilySpec::RandomPlaneCurve { p, d: args.d, seed })
            .collect(),
    })
}

/// Verdicts for one cell. Pure: the same spec always gives the same result.
pub fn evaluate_cell(spec: &FamilySpec) -> charp_core::Result<Vec<Verdict>> {
    let x = spec.build()?;
    match spec {
        FamilySpec::Dwork { .. } => Ok(vec![is_smooth(&x), fedder_is_split(&x)?]),
        FamilySpec::LegendreCubic { p, lambda } => {
            let ordinary = is_ordinary_curve(&x)?;
            let hw = hasse_witt(&x)?.get(0, 0);
            let deuring = deuring_hasse(*p, *lambda)?.value;
            let cm = cartier_manin_hyperelliptic(*p, &legendre_hyperelliptic_coefficients(*lambda), 1)?
                .get(0, 0);
            let agree = (hw != 0) == (deuring != 0) && (cm != 0) == (deuring != 0);
            let oracle = Verdict::new(
                VerdictKind::Equivalence,
                if agree {
                    VerdictValue::Consistent
                } else {
                    VerdictValue::Inconsistent
                },
                Evidence::Oracle(OracleEvidence {
                    lambda: *lambda,
                    hasse_witt: hw,
                    deuring,
                    cartier_manin: cm,
                }),
            );
            Ok(vec![ordinary, oracle])
        }
        _ => {
            require_smooth_curve(&x)?;
            Ok(vec![is_ordinary_curve(&x)?, ulrich_check_curve(&x)?])
        }
    }
}

fn read_existing(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => {
            return Err(CliError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            ScanRecord::parse_line(l).map_err(|source| CliError::Record {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

pub fn run_scan(args: &ScanArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let command = scan_command(args.family);
    let cells = scan_cells(args)?;
    let existing = match &args.out {
        Some(path) => read_existing(path)?,
        None => Vec::new(),
    };
    let mut known: HashMap<FamilySpec, ScanRecord> = existing
        .into_iter()
        .filter(|r| r.command == command)
        .map(|r| (r.family.clone(), r))
        .collect();
    let todo: Vec<&FamilySpec> = cells.iter().filter(|c| !known.contains_key(*c)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let mut file = match &args.out {
        Some(path) => Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?,
        ),
        None => None,
    };
    let mut written = 0usize;
    for chunk in todo.chunks(args.jobs.max(1) * 4) {
        let results: Vec<charp_core::Result<Vec<Verdict>>> =
            pool.install(|| chunk.par_iter().map(|spec| evaluate_cell(spec)).collect());
        for (spec, result) in chunk.iter().zip(results) {
            let verdicts = result.map_err(|e| {
                CliError::Usage(format!("{spec}: {e}"))
            })?;
            let record = ScanRecord::new((*spec).clone(), command, verdicts, timestamp());
            let line = serde_json::to_string(&record)? + "\n";
            match file.as_mut() {
                Some(f) => f.write_all(line.as_bytes())?,
                None => stdout.write_all(line.as_bytes())?,
            }
            written += 1;
            known.insert((*spec).clone(), record);
        }
        if let Some(f) = file.as_mut() {
            f.flush()?;
        }
    }
    writeln!(
        stderr,
        "{written} new records, {} already present",
        cells.len() - todo.len()
    )?;
    let summary = ScanSummary::from_records(args, command, cells.iter().map(|c| &known[c]));
    let text = summary.render(args.format)?;
    if args.out.is_some() {
        stdout.write_all(text.as_bytes())?;
    } else {
        stderr.write_all(text.as_bytes())?;
    }
    Ok(EXIT_POSITIVE)
}
