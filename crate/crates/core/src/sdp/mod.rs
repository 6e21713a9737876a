//! The balanced vertex-expansion SDP:
//!
//! ```text
//! minimize   Σ_i η_i
//! subject to U_ii + U_jj − 2U_ij ≤ η_i   for every i and j ∈ N(i)
//!            U_ii = 1,  Σ_ij U_ij = 0,  U ⪰ 0
//! ```
//!
//! An integral point `U = s sᵀ` with `s = 1_S − 1_{V\S}` has objective
//! `4(|N(S)| + |N(V\S)|)`. The optional ℓ₂² triangle inequalities
//! `‖u_i−u_j‖² + ‖u_j−u_k‖² ≥ ‖u_i−u_k‖²` are added lazily as cutting planes.

mod admm;
mod factor;
mod triangle;

use std::time::Duration;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;

pub use admm::solve;
pub use factor::factorize;
pub use triangle::{max_triangle_violation, most_violated_triangles, strengthen_triangle, Triangle};

/// Stopping rules and knobs for the ADMM solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SolverOptions {
    /// Absolute tolerance on every consensus constraint (entrywise).
    pub tol_feas: f64,
    /// Relative objective change allowed over `window` iterations.
    pub tol_obj: f64,
    pub window: usize,
    pub max_iter: usize,
    /// Initial penalty.
    pub rho: f64,
    /// Over-relaxation factor in `(0, 2)`.
    pub relax: f64,
    /// Re-balance the penalty every this many iterations (0 disables).
    pub adapt_every: usize,
    /// Anderson acceleration memory (0 disables).
    pub anderson: usize,
    pub triangle: TriangleOptions,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_feas: 1e-6,
            tol_obj: 1e-5,
            window: 50,
            max_iter: 20_000,
            rho: 1.0,
            relax: 1.6,
            adapt_every: 25,
            anderson: 10,
            triangle: TriangleOptions::default(),
            seed: 0,
        }
    }
}

/// Cutting-plane settings for the ℓ₂² triangle inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TriangleOptions {
    pub enabled: bool,
    /// Cuts added per round; `None` means `5n`.
    pub per_round: Option<usize>,
    pub max_rounds: usize,
    /// Target maximum violation.
    pub tol: f64,
}

impl Default for TriangleOptions {
    fn default() -> Self {
        TriangleOptions { enabled: false, per_round: None, max_rounds: 20, tol: 1e-4 }
    }
}

/// One SDP instance: the neighbor structure of a graph plus options.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub n: usize,
    pub neighbors: Vec<Vec<usize>>,
    /// Vertices without neighbors; their `η_i` is fixed to 0.
    pub isolated: Vec<usize>,
    pub options: SolverOptions,
    /// Active triangle cuts (grown by [`strengthen_triangle`]).
    pub triangles: Vec<Triangle>,
}

impl SdpProblem {
    /// Number of edge constraints, `Σ_i |N(i)|`.
    pub fn num_edge_constraints(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }
}

pub fn build_primal(g: &Graph, options: SolverOptions) -> SdpProblem {
    SdpProblem {
        n: g.n(),
        neighbors: (0..g.n()).map(|i| g.neighbors(i).to_vec()).collect(),
        isolated: g.isolated_vertices(),
        options,
        triangles: Vec::new(),
    }
}

/// Constraint residuals of a candidate `(U, η)`, computed from scratch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    /// `max_i |U_ii − 1|`
    pub max_diag_dev: f64,
    /// `|Σ_ij U_ij|`
    pub balance_dev: f64,
    /// `max_{i, j∈N(i)} (U_ii + U_jj − 2U_ij − η_i)⁺`
    pub max_edge_violation: f64,
    pub min_eig_u: f64,
    /// `max_{i,j,k} (d_ik − d_ij − d_jk)⁺` with `d_ij = U_ii + U_jj − 2U_ij`.
    pub triangle_violation: f64,
}

pub fn residuals(problem: &SdpProblem, u: &Mat<f64>, eta: &[f64]) -> Result<Residuals> {
    let n = problem.n;
    if u.nrows() != n || eta.len() != n {
        return Err(Error::Dimension { expected: n, got: u.nrows().min(eta.len()) });
    }
    let mut r = Residuals::default();
    let mut total = 0.0;
    for i in 0..n {
        r.max_diag_dev = r.max_diag_dev.max((u[(i, i)] - 1.0).abs());
        for j in 0..n {
            total += u[(i, j)];
        }
        for &j in &problem.neighbors[i] {
            let d = u[(i, i)] + u[(j, j)] - 2.0 * u[(i, j)];
            r.max_edge_violation = r.max_edge_violation.max(d - eta[i]);
        }
    }
    r.balance_dev = total.abs();
    r.min_eig_u = linalg::sym_eigenvalues(u)?.first().copied().unwrap_or(0.0);
    r.triangle_violation = max_triangle_violation(&distance_matrix(u));
    Ok(r)
}

/// `η_i = max_{j∈N(i)} (U_ii + U_jj − 2U_ij)`, 0 for isolated vertices.
pub fn eta_from_u(neighbors: &[Vec<usize>], u: &Mat<f64>) -> Vec<f64> {
    neighbors
        .iter()
        .enumerate()
        .map(|(i, nb)| nb.iter().map(|&j| u[(i, i)] + u[(j, j)] - 2.0 * u[(i, j)]).fold(f64::NEG_INFINITY, f64::max))
        .map(|v| if v.is_finite() { v } else { 0.0 })
        .collect()
}

/// Squared distances `d_ij = U_ii + U_jj − 2U_ij`.
pub fn distance_matrix(u: &Mat<f64>) -> Mat<f64> {
    let n = u.nrows();
    Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { u[(i, i)] + u[(j, j)] - 2.0 * u[(i, j)] })
}

/// Summary of a solver run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverTrace {
    pub final_rho: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Accepted Anderson steps.
    pub accelerated_steps: usize,
    /// Objective every `window` iterations.
    pub objective_history: Vec<f64>,
    pub triangle_rounds: usize,
    pub triangle_cuts: usize,
    /// Maximum violation before each cutting-plane round.
    pub triangle_history: Vec<f64>,
    pub triangle_capped: bool,
}

/// Solver output. `u` satisfies the diagonal and balance constraints to
/// rounding error; PSD-ness holds up to the primal residual, reported in
/// `residuals.min_eig_u`.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub u: Mat<f64>,
    pub eta: Vec<f64>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub wall_time: Duration,
    pub converged: bool,
    pub trace: SolverTrace,
    pub(crate) state: Option<admm::State>,
}

impl SdpSolution {
    /// Rows of a factorization `U ≈ V Vᵀ` (see [`factorize`]).
    pub fn vectors(&self) -> Result<Mat<f64>> {
        factorize(&self.u)
    }

    /// Solution from a given `U` (no solver state). `η` is taken tight.
    pub fn from_matrix(problem: &SdpProblem, u: Mat<f64>) -> Result<SdpSolution> {
        let eta = eta_from_u(&problem.neighbors, &u);
        let residuals = residuals(problem, &u, &eta)?;
        Ok(SdpSolution {
            objective: eta.iter().sum(),
            u,
            eta,
            residuals,
            iterations: 0,
            wall_time: Duration::ZERO,
            converged: true,
            trace: SolverTrace::default(),
            state: None,
        })
    }

    pub fn to_file(&self) -> SolutionFile {
        SolutionFile {
            n: self.u.nrows(),
            u: linalg::to_row_major(&self.u).into_iter().map(Sig17).collect(),
            eta: self.eta.clone(),
            objective: self.objective,
            residuals: self.residuals.clone(),
            iterations: self.iterations,
            wall_time_secs: self.wall_time.as_secs_f64(),
            converged: self.converged,
            trace: self.trace.clone(),
        }
    }
}

/// Serialized solution. `U` is row-major with 17 significant digits so a
/// parse recovers every `f64` bit-exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionFile {
    pub n: usize,
    #[serde(rename = "U")]
    pub u: Vec<Sig17>,
    pub eta: Vec<f64>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub wall_time_secs: f64,
    pub converged: bool,
    pub trace: SolverTrace,
}

impl SolutionFile {
    pub fn into_solution(self) -> Result<SdpSolution> {
        let u = linalg::from_row_major(self.n, &self.u.iter().map(|x| x.0).collect::<Vec<_>>())?;
        if self.eta.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: self.eta.len() });
        }
        Ok(SdpSolution {
            u,
            eta: self.eta,
            objective: self.objective,
            residuals: self.residuals,
            iterations: self.iterations,
            wall_time: Duration::from_secs_f64(self.wall_time_secs.max(0.0)),
            converged: self.converged,
            trace: self.trace,
            state: None,
        })
    }
}

/// `f64` written in `%.16e` form (17 significant digits).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text = format!("{:.16e}", self.0);
        let raw = serde_json::value::RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Sig17)
    }
}
