use std::collections::BTreeMap;

use faer::Mat;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::admm::solve_from;
use super::{distance_matrix, SdpProblem, SdpSolution};
use crate::error::Result;
use crate::rng;

/// The cut `d_ij + d_jk ≥ d_ik` with middle vertex `j`, stored with `i < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triangle {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Triangle {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        Triangle { i: i.min(k), j, k: i.max(k) }
    }

    pub fn violation(&self, d: &Mat<f64>) -> f64 {
        d[(self.i, self.k)] - d[(self.i, self.j)] - d[(self.j, self.k)]
    }
}

/// `max_{i,j,k} (d_ik − d_ij − d_jk)⁺` by exhaustive search.
pub fn max_triangle_violation(d: &Mat<f64>) -> f64 {
    let n = d.nrows();
    let mut worst = 0.0f64;
    for k in 0..n {
        let ck = d.col_as_slice(k);
        for i in 0..k {
            let ci = d.col_as_slice(i);
            let best = ci.iter().zip(ck).map(|(a, b)| a + b).fold(f64::INFINITY, f64::min);
            worst = worst.max(d[(i, k)] - best);
        }
    }
    worst
}

/// Up to `count` violated triangles (violation above `tol`), found by local
/// search from random endpoint pairs: alternately pick the best middle
/// vertex, then the best endpoints, until nothing improves. Sorted by
/// violation, largest first.
pub fn most_violated_triangles(d: &Mat<f64>, count: usize, tol: f64, seed: u64) -> Vec<(Triangle, f64)> {
    let n = d.nrows();
    if n < 3 || count == 0 {
        return Vec::new();
    }
    let mut rng = rng::stream(seed, "triangle-separation");
    let samples = (4 * count).max(n);
    let mut found: BTreeMap<Triangle, f64> = BTreeMap::new();
    let argbest = |f: &dyn Fn(usize) -> f64, skip: [usize; 2]| -> usize {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for v in 0..n {
            if v == skip[0] || v == skip[1] {
                continue;
            }
            let val = f(v);
            if val > best.0 {
                best = (val, v);
            }
        }
        best.1
    };
    for _ in 0..samples {
        let mut i = rng.gen_range(0..n);
        let mut k = rng.gen_range(0..n - 1);
        if k >= i {
            k += 1;
        }
        let mut j = argbest(&|v| -(d[(i, v)] + d[(v, k)]), [i, k]);
        for _ in 0..8 {
            let before = (i, j, k);
            k = argbest(&|v| d[(i, v)] - d[(j, v)], [i, j]);
            i = argbest(&|v| d[(v, k)] - d[(v, j)], [j, k]);
            j = argbest(&|v| -(d[(i, v)] + d[(v, k)]), [i, k]);
            if (i, j, k) == before {
                break;
            }
        }
        let t = Triangle::new(i, j, k);
        let v = t.violation(d);
        if v > tol {
            found.insert(t, v);
        }
    }
    let mut out: Vec<(Triangle, f64)> = found.into_iter().collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out.truncate(count);
    out
}

/// Cutting-plane loop: add the most violated triangles, re-solve from the
/// previous iterate, and repeat until the maximum violation is within
/// tolerance or the round cap is hit (flagged in the trace).
pub fn strengthen_triangle(problem: &mut SdpProblem, solution: SdpSolution) -> Result<SdpSolution> {
    let opts = problem.options.triangle.clone();
    let per_round = opts.per_round.unwrap_or(5 * problem.n);
    let mut sol = solution;
    if per_round == 0 {
        return Ok(sol);
    }
    let mut rounds = 0;
    let mut history = Vec::new();
    let mut capped = false;
    let mut iterations = sol.iterations;
    let mut wall = sol.wall_time;
    loop {
        let worst = sol.residuals.triangle_violation;
        history.push(worst);
        if worst <= opts.tol {
            break;
        }
        if rounds == opts.max_rounds {
            capped = true;
            break;
        }
        let d = distance_matrix(&sol.u);
        let seed = rng::child_seed(problem.options.seed, &format!("round-{rounds}"));
        let present: std::collections::HashSet<Triangle> = problem.triangles.iter().copied().collect();
        let fresh: Vec<Triangle> = most_violated_triangles(&d, per_round, opts.tol, seed)
            .into_iter()
            .map(|(t, _)| t)
            .filter(|t| !present.contains(t))
            .collect();
        if fresh.is_empty() {
            capped = true;
            break;
        }
        problem.triangles.extend(fresh);
        let warm = sol.state.take();
        sol = solve_from(problem, warm)?;
        iterations += sol.iterations;
        wall += sol.wall_time;
        rounds += 1;
    }
    sol.iterations = iterations;
    sol.wall_time = wall;
    sol.trace.triangle_rounds = rounds;
    sol.trace.triangle_cuts = problem.triangles.len();
    sol.trace.triangle_history = history;
    sol.trace.triangle_capped = capped;
    Ok(sol)
}
