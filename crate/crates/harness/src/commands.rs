//! Subcommand implementations, kept free of argument parsing so tests can
//! drive them directly.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use vbm_core::cert::{build_certificate, verify_certificate, CertReport, DualCertificate};
use vbm_core::gen::PlantedInstance;
use vbm_core::graph::{balanced_vertex_expansion_bruteforce, vertex_expansion, DEFAULT_BRUTE_FORCE_CAP};
use vbm_core::rounding::{
    algorithm1_round, algorithm2_planted, cluster_to_embedding, line_sweep, round_exact, sq_distances,
};
use vbm_core::sdp::{build_primal, residuals, solve, strengthen_triangle, SdpSolution, SolutionFile, SolverOptions};
use vbm_core::{CutReport, Graph};

use crate::config::ExperimentConfig;
use crate::store::{self, Meta};
use crate::trial::{generate, run_trial, trial_seed, TrialRecord, CERT_TOL};

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_instance(path: &Path) -> Result<PlantedInstance> {
    read_json(path)
}

/// Writes one instance per `(cell, trial)`; returns the paths written.
pub fn cmd_generate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for cell in cfg.cells() {
        for trial in 0..cfg.trials {
            let inst = generate(&cell, trial_seed(cfg.seed_base, &cell, trial))
                .with_context(|| format!("cell {} trial {trial}", cell.index))?;
            let path = store::instance_path(out, cell.index, trial);
            store::write_json(&path, &inst)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Result of a pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<store::CellSummary>,
    pub resumed: usize,
}

/// Runs every trial (skipping those with a matching stored record) on a
/// pool of `threads` workers and writes the CSV outputs.
pub fn cmd_pipeline(cfg: &ExperimentConfig, out: &Path, threads: Option<usize>) -> Result<PipelineRun> {
    let started = store::unix_now();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build()?;
    let results: Vec<Result<(TrialRecord, bool)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let cell = &cells[c];
                let seed = trial_seed(cfg.seed_base, cell, t);
                if let Some(rec) = store::load_record(out, cell, t, seed) {
                    return Ok((rec, true));
                }
                let rec = run_trial(cell, t, cfg.seed_base, &cfg.solver);
                store::write_json(&store::record_path(out, cell.index, t), &rec)?;
                Ok((rec, false))
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut resumed = 0;
    for r in results {
        let (rec, was_resumed) = r?;
        resumed += was_resumed as usize;
        records.push(rec);
    }
    let summaries = store::summarize(&cells, &records);
    store::write_atomic(&out.join("trials.csv"), &store::trials_csv(&records)?)?;
    store::write_atomic(&out.join("summary.csv"), &store::summary_csv(&summaries)?)?;
    store::write_atomic(&out.join("timings.csv"), &store::timings_csv(&records)?)?;
    if cfg.regime == crate::config::Regime::HnSeparation {
        store::write_atomic(&out.join("separation.csv"), &store::separation_csv(&records)?)?;
    }
    let meta = Meta {
        command: "pipeline",
        config: cfg,
        threads: pool.current_num_threads(),
        started_unix: started,
        finished_unix: store::unix_now(),
        trials_run: records.len() - resumed,
        trials_resumed: resumed,
        version: env!("CARGO_PKG_VERSION"),
    };
    store::write_json(&out.join("meta.json"), &meta)?;
    Ok(PipelineRun { records, summaries, resumed })
}

pub fn cmd_solve(inst: &PlantedInstance, options: SolverOptions) -> Result<SdpSolution> {
    let triangles = options.triangle.enabled;
    let mut problem = build_primal(&inst.graph, options);
    let sol = solve(&problem)?;
    Ok(if triangles { strengthen_triangle(&mut problem, sol)? } else { sol })
}

pub fn cmd_certify(inst: &PlantedInstance) -> Result<(DualCertificate, CertReport)> {
    let cert = build_certificate(inst)?;
    let report = verify_certificate(inst, &cert, CERT_TOL);
    Ok((cert, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RoundMethod {
    Exact,
    Algorithm1,
    Algorithm2,
    /// Sweep of `y_i = d(i, L′)` with `L′` the fullest `1/10`-ball.
    Line,
}

pub fn cmd_round(inst: &PlantedInstance, sol: &SdpSolution, method: RoundMethod, alpha: Option<f64>) -> Result<Value> {
    let g = &inst.graph;
    let n = g.n();
    Ok(match method {
        RoundMethod::Exact => serde_json::to_value(round_exact(g, sol)?)?,
        RoundMethod::Algorithm1 => {
            let alpha = alpha.unwrap_or_else(|| 0.5 - inst.t.len() as f64 / n as f64);
            serde_json::to_value(algorithm1_round(g, &sol.vectors()?, alpha)?)?
        }
        RoundMethod::Algorithm2 => serde_json::to_value(algorithm2_planted(g, sol, sol.objective / n as f64)?)?,
        RoundMethod::Line => {
            let d = sq_distances(&sol.vectors()?);
            let center = (0..n)
                .max_by_key(|&i| ((0..n).filter(|&j| d[(i, j)] <= 0.1).count(), std::cmp::Reverse(i)))
                .context("empty graph")?;
            let ball: Vec<usize> = (0..n).filter(|&j| d[(center, j)] <= 0.1).collect();
            let emb = cluster_to_embedding(&d, &ball, &[])?;
            serde_json::to_value(line_sweep(g, &emb)?)?
        }
    })
}

pub fn cmd_expand(g: &Graph, set: Option<&[usize]>) -> Result<CutReport> {
    Ok(match set {
        Some(s) => vertex_expansion(g, s)?,
        None => balanced_vertex_expansion_bruteforce(g, DEFAULT_BRUTE_FORCE_CAP)?,
    })
}

/// Loads a graph from an instance JSON file or a plain edge list.
pub fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let inst: PlantedInstance =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(inst.graph)
    } else {
        Ok(Graph::from_edge_list(&text)?)
    }
}

/// Named check and whether it passed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub kind: &'static str,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Entrywise tolerance for solution files.
pub const SOLUTION_TOL: f64 = 1e-4;

/// Verifies a certificate (`"Y"` key) or a solution (`"U"` key) against an
/// instance. Parse failures are errors; failing checks are not.
pub fn cmd_verify(instance: &Path, artifact: &Path) -> Result<VerifyReport> {
    let inst = load_instance(instance)?;
    let value: Value = read_json(artifact)?;
    if value.get("Y").is_some() {
        let cert: DualCertificate =
            serde_json::from_value(value).with_context(|| format!("parsing certificate {}", artifact.display()))?;
        let r = verify_certificate(&inst, &cert, CERT_TOL);
        let check = |k: u8, name: &str, passed: bool, detail: String| Check {
            name: format!("check ({k}) {name}"),
            passed,
            detail,
        };
        let checks = vec![
            check(1, "dual feasibility", r.feasible, r.violations.join("; ")),
            check(
                2,
                "planted null vector",
                r.planted_null,
                format!("|M 1_S|max = {:e}, exact = {}", r.eigen_zero_on_planted, r.eigen_zero_exact),
            ),
            check(
                3,
                "rank n-1",
                r.rank_condition,
                format!("min eig of shifted M = {:e}, tol = {:e}", r.min_eig_shifted, r.tol_eig),
            ),
            check(
                4,
                "objective matches",
                r.objective_matches,
                format!("dual {} vs integral {}", r.dual_objective, r.integral_value),
            ),
        ];
        Ok(VerifyReport { kind: "certificate", checks })
    } else if value.get("U").is_some() {
        let file: SolutionFile =
            serde_json::from_value(value).with_context(|| format!("parsing solution {}", artifact.display()))?;
        let sol = file.into_solution()?;
        let n = inst.n();
        if sol.u.nrows() != n {
            bail!("solution has dimension {} but the instance has {n} vertices", sol.u.nrows());
        }
        let problem = build_primal(&inst.graph, SolverOptions::default());
        let r = residuals(&problem, &sol.u, &sol.eta)?;
        let eta_sum: f64 = sol.eta.iter().sum();
        let planted = 4 * inst.planted_boundary();
        let checks = vec![
            Check {
                name: "unit diagonal".into(),
                passed: r.max_diag_dev <= SOLUTION_TOL,
                detail: format!("{:e}", r.max_diag_dev),
            },
            Check {
                name: "balance".into(),
                passed: r.balance_dev <= SOLUTION_TOL * (n * n) as f64,
                detail: format!("|sum U| = {:e}", r.balance_dev),
            },
            Check {
                name: "edge constraints".into(),
                passed: r.max_edge_violation <= SOLUTION_TOL,
                detail: format!("{:e}", r.max_edge_violation),
            },
            Check { name: "psd".into(), passed: r.min_eig_u >= -SOLUTION_TOL, detail: format!("{:e}", r.min_eig_u) },
            Check {
                name: "objective".into(),
                passed: (eta_sum - sol.objective).abs() <= SOLUTION_TOL * n as f64,
                detail: format!("sum eta = {eta_sum}, recorded {}", sol.objective),
            },
            Check {
                name: "below planted value".into(),
                passed: sol.objective <= planted as f64 * (1.0 + 1e-3) + SOLUTION_TOL,
                detail: format!("{} vs {planted}", sol.objective),
            },
        ];
        Ok(VerifyReport { kind: "solution", checks })
    } else {
        bail!("{} is neither a certificate nor a solution", artifact.display())
    }
}
