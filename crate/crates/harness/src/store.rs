//! On-disk layout of an experiment directory.
//!
//! ```text
//! <out>/records/c0000-t0003.json   one TrialRecord per trial, written atomically
//! <out>/instances/c0000-t0003.json instances from `generate`
//! <out>/trials.csv                 one row per trial (reproducible)
//! <out>/summary.csv                one row per cell (reproducible)
//! <out>/separation.csv             edge-cut comparison (hn-separation only)
//! <out>/timings.csv                wall-clock seconds per stage
//! <out>/meta.json                  timestamps and run settings
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Cell, ExperimentConfig};
use crate::trial::TrialRecord;

pub const TRIALS_SCHEMA: &str = "vbm-trials/1";
pub const SUMMARY_SCHEMA: &str = "vbm-summary/1";
pub const SEPARATION_SCHEMA: &str = "vbm-separation/1";
pub const TIMINGS_SCHEMA: &str = "vbm-timings/1";

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(value)?;
    text.push(b'\n');
    write_atomic(path, &text)
}

pub fn trial_stem(cell: usize, trial: usize) -> String {
    format!("c{cell:04}-t{trial:04}")
}

pub fn record_path(out: &Path, cell: usize, trial: usize) -> PathBuf {
    out.join("records").join(format!("{}.json", trial_stem(cell, trial)))
}

pub fn instance_path(out: &Path, cell: usize, trial: usize) -> PathBuf {
    out.join("instances").join(format!("{}.json", trial_stem(cell, trial)))
}

/// A stored record if it exists, parses and belongs to this cell and seed.
pub fn load_record(out: &Path, cell: &Cell, trial: usize, seed: u64) -> Option<TrialRecord> {
    let text = fs::read_to_string(record_path(out, cell.index, trial)).ok()?;
    let rec: TrialRecord = serde_json::from_str(&text).ok()?;
    (rec.cell == *cell && rec.trial == trial && rec.seed == seed).then_some(rec)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

fn cell_columns(c: &Cell) -> Vec<String> {
    vec![
        c.index.to_string(),
        c.regime.name().to_string(),
        c.n.to_string(),
        c.eps.to_string(),
        c.p.to_string(),
        c.lambda.to_string(),
        c.q.to_string(),
        c.alpha.to_string(),
    ]
}

const CELL_HEADER: [&str; 8] = ["cell", "regime", "n", "eps", "p", "lambda", "q", "alpha"];

pub fn trials_csv(records: &[TrialRecord]) -> Result<Vec<u8>> {
    let mut header = vec![TRIALS_SCHEMA];
    header.extend(CELL_HEADER);
    header.extend([
        "trial",
        "seed",
        "sdpObjective",
        "integralValue",
        "plantedPhi",
        "certified",
        "failedChecks",
        "recovered",
        "roundPhi",
        "roundSize",
        "phiRatio",
        "phiScaled",
        "success",
        "converged",
        "iterations",
        "residualMax",
        "error",
    ]);
    let rows = records.iter().map(|r| {
        let o = &r.outcomes;
        let mut row = vec!["trial".to_string()];
        row.extend(cell_columns(&r.cell));
        row.extend([
            r.trial.to_string(),
            r.seed.to_string(),
            opt(&o.sdp_objective),
            o.integral_value.to_string(),
            o.planted_phi.to_string(),
            opt(&o.certified),
            o.failed_checks.iter().map(u8::to_string).collect::<Vec<_>>().join(" "),
            o.recovered.to_string(),
            opt(&o.round_phi),
            opt(&o.round_size),
            opt(&o.phi_ratio),
            opt(&o.phi_scaled),
            o.success.to_string(),
            opt(&o.converged),
            opt(&o.iterations),
            opt(&o.residual_max),
            o.error.clone().unwrap_or_default(),
        ]);
        row
    });
    csv_bytes(&header, rows)
}

/// Per-cell aggregates, recomputable from the trial records.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CellSummary {
    pub cell: Cell,
    pub trials: usize,
    pub errors: usize,
    pub success_rate: f64,
    pub recovery_rate: f64,
    /// `None` when no trial ran the certificate.
    pub certification_rate: Option<f64>,
    pub mean_phi_ratio: Option<f64>,
    pub mean_phi_scaled: Option<f64>,
    pub mean_sdp_objective: Option<f64>,
    pub converged_rate: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn rate(values: impl Iterator<Item = bool>) -> Option<f64> {
    mean(values.map(|b| if b { 1.0 } else { 0.0 }))
}

pub fn summarize(cells: &[Cell], records: &[TrialRecord]) -> Vec<CellSummary> {
    cells
        .iter()
        .map(|cell| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.cell.index == cell.index).collect();
            let o = || rs.iter().map(|r| &r.outcomes);
            CellSummary {
                cell: cell.clone(),
                trials: rs.len(),
                errors: o().filter(|o| o.error.is_some()).count(),
                success_rate: rate(o().map(|o| o.success)).unwrap_or(0.0),
                recovery_rate: rate(o().map(|o| o.recovered)).unwrap_or(0.0),
                certification_rate: rate(o().filter_map(|o| o.certified)),
                mean_phi_ratio: mean(o().filter_map(|o| o.phi_ratio)),
                mean_phi_scaled: mean(o().filter_map(|o| o.phi_scaled)),
                mean_sdp_objective: mean(o().filter_map(|o| o.sdp_objective)),
                converged_rate: rate(o().filter_map(|o| o.converged)),
            }
        })
        .collect()
}

pub fn summary_csv(summaries: &[CellSummary]) -> Result<Vec<u8>> {
    let mut header = vec![SUMMARY_SCHEMA];
    header.extend(CELL_HEADER);
    header.extend([
        "trials",
        "errors",
        "successRate",
        "recoveryRate",
        "certificationRate",
        "meanPhiRatio",
        "meanPhiScaled",
        "meanSdpObjective",
        "convergedRate",
    ]);
    let rows = summaries.iter().map(|s| {
        let mut row = vec!["cell".to_string()];
        row.extend(cell_columns(&s.cell));
        row.extend([
            s.trials.to_string(),
            s.errors.to_string(),
            s.success_rate.to_string(),
            s.recovery_rate.to_string(),
            opt(&s.certification_rate),
            opt(&s.mean_phi_ratio),
            opt(&s.mean_phi_scaled),
            opt(&s.mean_sdp_objective),
            opt(&s.converged_rate),
        ]);
        row
    });
    csv_bytes(&header, rows)
}

/// The edge-cut versus vertex-cut table.
pub fn separation_csv(records: &[TrialRecord]) -> Result<Vec<u8>> {
    let header = [
        SEPARATION_SCHEMA,
        "cell",
        "trial",
        "n",
        "eps",
        "plantedBoundary",
        "sdpBoundary",
        "sdpMatchesPlanted",
        "sweepVertexBoundary",
        "sweepEdgeCut",
        "sweepSize",
        "sweepBoundaryOverN",
    ];
    let rows = records.iter().filter_map(|r| {
        let s = r.outcomes.separation.as_ref()?;
        Some(vec![
            "trial".to_string(),
            r.cell.index.to_string(),
            r.trial.to_string(),
            r.cell.n.to_string(),
            r.cell.eps.to_string(),
            s.planted_boundary.to_string(),
            s.sdp_boundary.to_string(),
            s.sdp_matches_planted.to_string(),
            s.sweep_vertex_boundary.to_string(),
            s.sweep_edge_cut.to_string(),
            s.sweep_size.to_string(),
            (s.sweep_vertex_boundary as f64 / r.cell.n as f64).to_string(),
        ])
    });
    csv_bytes(&header, rows)
}

pub fn timings_csv(records: &[TrialRecord]) -> Result<Vec<u8>> {
    let header = [TIMINGS_SCHEMA, "cell", "trial", "generate", "certify", "solve", "round"];
    let rows = records.iter().map(|r| {
        let w = &r.outcomes.wall_times;
        vec![
            "trial".to_string(),
            r.cell.index.to_string(),
            r.trial.to_string(),
            w.generate.to_string(),
            w.certify.to_string(),
            w.solve.to_string(),
            w.round.to_string(),
        ]
    });
    csv_bytes(&header, rows)
}

/// Run metadata; the only place timestamps appear.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Meta<'a> {
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub threads: usize,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub trials_run: usize,
    pub trials_resumed: usize,
    pub version: &'a str,
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}
