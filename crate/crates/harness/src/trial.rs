//! One trial: generate, solve, certify and round a single instance.

use std::time::Instant;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use vbm_core::cert::{build_certificate, verify_certificate};
use vbm_core::gen::{gen_hn, gen_lr14, gen_vbm, PlantedInstance};
use vbm_core::graph::{ratio_f64, vertex_expansion};
use vbm_core::rounding::{algorithm1_round, algorithm2_planted, round_exact};
use vbm_core::sdp::{build_primal, solve, SolverOptions};
use vbm_core::spectral::fiedler_sweep_edge_cut;
use vbm_core::{rng, CutReport};

use crate::config::{Cell, ModelInput, Regime};

/// Relative tolerance for certificate check (2).
pub const CERT_TOL: f64 = 1e-9;
/// Harness threshold on `φ^V(A)/(ε₁+ε₂)` for the cluster-rounding regimes.
pub const CLUSTER_RATIO_MAX: f64 = 100.0;
/// Harness threshold on `φ^V(W*)/√ε` for the ball rounding.
pub const BALL_RATIO_MAX: f64 = 50.0;
/// Minimum vertex boundary of the spectral edge cut, as a fraction of `n`.
pub const SWEEP_BOUNDARY_MIN_FRAC: f64 = 0.05;
/// Size window for the balanced sweep in the separation experiment.
pub const SWEEP_MIN_FRAC: f64 = 0.25;

pub fn generate(cell: &Cell, seed: u64) -> Result<PlantedInstance> {
    Ok(match cell.model(seed) {
        ModelInput::Vbm(p) => gen_vbm(&p)?,
        ModelInput::Lr14(p) => gen_lr14(&p)?,
        ModelInput::Hn(p) => gen_hn(&p)?,
    })
}

pub fn trial_seed(seed_base: u64, cell: &Cell, trial: usize) -> u64 {
    rng::trial_seed(seed_base, cell.index as u64, trial as u64)
}

/// Wall-clock seconds per stage. Not reproducible, so kept out of the
/// results CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WallTimes {
    pub generate: f64,
    pub certify: f64,
    pub solve: f64,
    pub round: f64,
}

/// Outcome of the edge-cut comparison in the separation regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Separation {
    pub planted_boundary: usize,
    pub sdp_boundary: usize,
    pub sdp_matches_planted: bool,
    pub sweep_vertex_boundary: usize,
    pub sweep_edge_cut: usize,
    pub sweep_size: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Outcomes {
    pub sdp_objective: Option<f64>,
    /// `4·|boundary of the planted cut|`.
    pub integral_value: usize,
    pub planted_phi: f64,
    /// `None` outside the exact-recovery regime.
    pub certified: Option<bool>,
    pub failed_checks: Vec<u8>,
    /// The rounded set is exactly one planted side.
    pub recovered: bool,
    pub round_phi: Option<f64>,
    pub round_size: Option<usize>,
    /// `round_phi / planted_phi`.
    pub phi_ratio: Option<f64>,
    /// `round_phi` over `ε₁+ε₂` (cluster regimes) or `√ε` (ball rounding).
    pub phi_scaled: Option<f64>,
    /// The regime's pass criterion.
    pub success: bool,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
    pub residual_max: Option<f64>,
    pub separation: Option<Separation>,
    pub wall_times: WallTimes,
    /// Message of a non-fatal failure (generation, solve or rounding).
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub cell: Cell,
    pub trial: usize,
    pub seed: u64,
    pub outcomes: Outcomes,
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn is_planted_side(inst: &PlantedInstance, set: &[usize]) -> bool {
    let sorted = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v
    };
    set == sorted(&inst.s) || set == sorted(&inst.sp)
}

/// Runs one trial; failures after generation are recorded, not returned.
pub fn run_trial(cell: &Cell, trial: usize, seed_base: u64, solver: &SolverOptions) -> TrialRecord {
    let seed = trial_seed(seed_base, cell, trial);
    let mut out = Outcomes::default();
    if let Err(e) = run_into(cell, seed, solver, &mut out) {
        out.error = Some(format!("{e:#}"));
        out.success = false;
    }
    TrialRecord { cell: cell.clone(), trial, seed, outcomes: out }
}

fn record_cut(out: &mut Outcomes, inst: &PlantedInstance, cut: &CutReport, scale: f64) {
    let phi = cut.phi_f64();
    out.round_phi = Some(phi);
    out.round_size = Some(cut.size);
    out.phi_ratio = Some(phi / out.planted_phi);
    out.phi_scaled = Some(phi / scale);
    out.recovered = is_planted_side(inst, &cut.set);
}

fn run_into(cell: &Cell, seed: u64, solver: &SolverOptions, out: &mut Outcomes) -> Result<()> {
    let t = Instant::now();
    let inst = generate(cell, seed)?;
    out.wall_times.generate = secs(t);
    let g = &inst.graph;
    let n = inst.n();
    out.integral_value = 4 * inst.planted_boundary();
    out.planted_phi = ratio_f64(&vertex_expansion(g, &inst.s)?.phi);

    let mut sweep = None;
    if cell.regime == Regime::ExactRecovery {
        let t = Instant::now();
        match build_certificate(&inst) {
            Ok(cert) => {
                let rep = verify_certificate(&inst, &cert, CERT_TOL);
                out.certified = Some(rep.integrality_certified);
                out.failed_checks = rep.failed_checks;
            }
            Err(e) => {
                out.certified = Some(false);
                out.error = Some(format!("certificate: {e}"));
            }
        }
        out.wall_times.certify = secs(t);
    }
    if cell.regime == Regime::HnSeparation {
        sweep = Some(fiedler_sweep_edge_cut(g, SWEEP_MIN_FRAC)?);
    }

    let t = Instant::now();
    let sol = solve(&build_primal(g, solver.clone()))?;
    out.wall_times.solve = secs(t);
    out.sdp_objective = Some(sol.objective);
    out.converged = Some(sol.converged);
    out.iterations = Some(sol.iterations);
    let r = &sol.residuals;
    out.residual_max = Some(r.max_diag_dev.max(r.balance_dev / (n * n) as f64).max(r.max_edge_violation));

    let t = Instant::now();
    let eps_sum = 2.0 * cell.eps;
    match cell.regime {
        Regime::ExactRecovery => {
            let ex = round_exact(g, &sol)?;
            if let Some(cut) = &ex.cut {
                record_cut(out, &inst, cut, eps_sum);
            }
            out.recovered &= ex.recovered;
            out.success = out.recovered;
        }
        Regime::LambdaZero | Regime::PZero => {
            let cut = algorithm1_round(g, &sol.vectors()?, 0.5 - cell.eps)?;
            record_cut(out, &inst, &cut, eps_sum);
            let size_ok = 10 * cut.size >= n && 10 * cut.size <= 9 * n;
            out.success = size_ok && cut.phi_f64() / eps_sum <= CLUSTER_RATIO_MAX;
        }
        Regime::Lr14 => {
            let res = algorithm2_planted(g, &sol, sol.objective / n as f64)?;
            record_cut(out, &inst, &res.cut, cell.eps.sqrt());
            out.success = res.cut.phi_f64() / cell.eps.sqrt() <= BALL_RATIO_MAX && 20 * res.cut.size >= n;
        }
        Regime::HnSeparation => {
            let ex = round_exact(g, &sol)?;
            let sw = sweep.expect("computed above");
            let cut = ex.cut.ok_or_else(|| anyhow::anyhow!("sign rounding does not split V"))?;
            record_cut(out, &inst, &cut, eps_sum);
            let sep = Separation {
                planted_boundary: inst.planted_boundary(),
                sdp_boundary: cut.boundary,
                sdp_matches_planted: out.recovered && cut.boundary == inst.planted_boundary(),
                sweep_vertex_boundary: sw.cut.boundary,
                sweep_edge_cut: sw.edge_cut,
                sweep_size: sw.cut.size,
            };
            out.success =
                sep.sdp_matches_planted && sep.sweep_vertex_boundary as f64 >= SWEEP_BOUNDARY_MIN_FRAC * n as f64;
            out.separation = Some(sep);
        }
    }
    out.wall_times.round = secs(t);
    Ok(())
}
