//! Result files: `summary.csv`, `trials.csv`, and `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use screenant_core::{ScenarioConfig, SweepResult, TrialRecord};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRIALS_FILE: &str = "trials.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const SUMMARY_HEADER: [&str; 13] = [
    "param",
    "value",
    "se_screenant_mean",
    "se_screenant_std",
    "se_screenant_ci95",
    "se_oracle_mean",
    "se_oracle_std",
    "se_oracle_ci95",
    "se_edgeant_mean",
    "se_edgeant_std",
    "se_edgeant_ci95",
    "relative_gain",
    "trials",
];

pub const TRIALS_HEADER: [&str; 9] = [
    "param",
    "value",
    "trial_index",
    "se_screenant",
    "se_oracle",
    "se_edgeant",
    "optimizer_iters",
    "optimizer_converged",
    "mask_popcount",
];

/// Nine significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ascii output")
}

pub fn summary_csv(param: &str, result: &SweepResult) -> String {
    let mut w = csv_writer();
    w.write_record(SUMMARY_HEADER).expect("in-memory write");
    for p in &result.points {
        let s = &p.stats;
        let mut row = vec![param.to_string(), fmt_num(p.value)];
        for m in [&s.screenant, &s.oracle, &s.edgeant] {
            row.extend([fmt_num(m.mean), fmt_num(m.std), fmt_num(m.ci95)]);
        }
        row.push(fmt_num(s.relative_gain));
        row.push(s.trials.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

pub fn trials_csv(param: &str, result: &SweepResult, records: &[Vec<TrialRecord>]) -> String {
    let mut w = csv_writer();
    w.write_record(TRIALS_HEADER).expect("in-memory write");
    for (p, recs) in result.points.iter().zip(records) {
        for r in recs {
            w.write_record([
                param.to_string(),
                fmt_num(p.value),
                r.trial_index.to_string(),
                fmt_num(r.se_screenant),
                fmt_num(r.se_oracle),
                fmt_num(r.se_edgeant),
                r.optimizer_iters.to_string(),
                r.optimizer_converged.to_string(),
                r.mask_popcount.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub name: String,
    pub values: Vec<f64>,
}

/// Everything needed to regenerate an output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ScenarioConfig,
    pub sweep: Option<SweepSpec>,
    pub base_seed: u64,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &ScenarioConfig, sweep: Option<SweepSpec>, outputs: Vec<String>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            sweep,
            base_seed: config.run.base_seed,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            outputs,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Target files for one output directory.
pub fn planned_files(out_dir: &Path, with_trials: bool) -> Vec<PathBuf> {
    let mut files = vec![out_dir.join(SUMMARY_FILE)];
    if with_trials {
        files.push(out_dir.join(TRIALS_FILE));
    }
    files.push(out_dir.join(MANIFEST_FILE));
    files
}

/// Fails if any planned file exists and `force` is off.
pub fn check_writable(out_dir: &Path, with_trials: bool, force: bool) -> CliResult<()> {
    if force {
        return Ok(());
    }
    match planned_files(out_dir, with_trials)
        .into_iter()
        .find(|p| p.exists())
    {
        Some(p) => Err(CliError::Exists(p)),
        None => Ok(()),
    }
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes the summary, optional per-trial table, and manifest into `out_dir`.
pub fn write_results(
    out_dir: &Path,
    config: &ScenarioConfig,
    param: &str,
    sweep: Option<SweepSpec>,
    result: &SweepResult,
    records: Option<&[Vec<TrialRecord>]>,
    force: bool,
) -> CliResult<Vec<PathBuf>> {
    check_writable(out_dir, records.is_some(), force)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let files = planned_files(out_dir, records.is_some());
    write(&files[0], &summary_csv(param, result))?;
    if let Some(records) = records {
        write(&files[1], &trials_csv(param, result, records))?;
    }
    let names = files
        .iter()
        .map(|p| {
            p.file_name()
                .expect("file name")
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    let manifest = RunManifest::new(config, sweep, names);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(files.last().expect("manifest path"), &(json + "\n"))?;
    Ok(files)
}
