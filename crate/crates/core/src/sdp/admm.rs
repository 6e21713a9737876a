//! Two-block ADMM on the consensus splitting
//!
//! ```text
//!   x-block:  X ⪰ 0,   (w_i·, η_i) with w_ij ≥ 1 − η_i/2,   triangle copies in their half-spaces
//!   z-block:  Z symmetric, diag(Z) = 1, Σ_ij Z_ij = 0
//!   coupling: X = Z,  w_ij = Z_ij,  copy = Z_pair
//! ```
//!
//! With `diag(Z) = 1` the edge form `U_ii + U_jj − 2U_ij` is `2 − 2Z_ij`, so
//! each vertex's epigraph block is a one-dimensional water-filling problem.

use std::collections::VecDeque;
use std::time::Instant;

use faer::Mat;

use super::{eta_from_u, residuals, SdpProblem, SdpSolution, SolverTrace};
use crate::error::Result;
use crate::linalg;

#[derive(Clone, Debug)]
pub(crate) struct State {
    z: Mat<f64>,
    lam: Mat<f64>,
    mu: Vec<f64>,
    nu: Vec<[f64; 3]>,
    rho: f64,
}

impl State {
    fn init(problem: &SdpProblem, slots: usize) -> State {
        let n = problem.n;
        let off = if n > 1 { -1.0 / (n as f64 - 1.0) } else { 0.0 };
        State {
            z: Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { off }),
            lam: Mat::zeros(n, n),
            mu: vec![0.0; slots],
            nu: Vec::new(),
            rho: problem.options.rho,
        }
    }
}

/// Solves the problem from the spread starting point.
pub fn solve(problem: &SdpProblem) -> Result<SdpSolution> {
    solve_from(problem, None)
}

/// Index bookkeeping shared by every iteration.
struct Layout {
    n: usize,
    offsets: Vec<usize>,
    tri_pairs: Vec<[(usize, usize); 3]>,
    /// Number of copies of each off-diagonal entry in the z-update.
    omega: Mat<f64>,
    inv_omega_sum: f64,
}

impl Layout {
    fn new(problem: &SdpProblem) -> Layout {
        let n = problem.n;
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for nb in &problem.neighbors {
            offsets.push(offsets.last().unwrap() + nb.len());
        }
        let tri_pairs: Vec<[(usize, usize); 3]> =
            problem.triangles.iter().map(|t| [(t.i, t.j), (t.j, t.k), (t.i, t.k)]).collect();
        // 2 from the PSD copy, one per directed edge copy, one per triangle copy
        let mut omega = Mat::<f64>::from_fn(n, n, |i, j| if i == j { 0.0 } else { 2.0 });
        for (i, nb) in problem.neighbors.iter().enumerate() {
            for &j in nb {
                omega[(i, j)] += 1.0;
                omega[(j, i)] += 1.0;
            }
        }
        for pairs in &tri_pairs {
            for &(a, b) in pairs {
                omega[(a, b)] += 1.0;
                omega[(b, a)] += 1.0;
            }
        }
        let mut inv_omega_sum = 0.0;
        for j in 0..n {
            for i in 0..j {
                inv_omega_sum += 1.0 / omega[(i, j)];
            }
        }
        Layout { n, offsets, tri_pairs, omega, inv_omega_sum }
    }

    fn slots(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Length of the flattened state: strict upper `Z`, upper `Λ`, `μ`, `ν`.
    fn dim(&self) -> usize {
        let n = self.n;
        n * (n - 1) / 2 + n * (n + 1) / 2 + self.slots() + 3 * self.tri_pairs.len()
    }
}

fn flatten(st: &State, out: &mut Vec<f64>) {
    out.clear();
    let n = st.z.nrows();
    for j in 0..n {
        out.extend((0..j).map(|i| st.z[(i, j)]));
    }
    for j in 0..n {
        out.extend((0..=j).map(|i| st.lam[(i, j)]));
    }
    out.extend_from_slice(&st.mu);
    out.extend(st.nu.iter().flatten());
}

fn unflatten(v: &[f64], st: &mut State) {
    let n = st.z.nrows();
    let mut p = 0;
    for j in 0..n {
        st.z[(j, j)] = 1.0;
        for i in 0..j {
            st.z[(i, j)] = v[p];
            st.z[(j, i)] = v[p];
            p += 1;
        }
    }
    for j in 0..n {
        for i in 0..=j {
            st.lam[(i, j)] = v[p];
            st.lam[(j, i)] = v[p];
            p += 1;
        }
    }
    let m = st.mu.len();
    st.mu.copy_from_slice(&v[p..p + m]);
    p += m;
    for c in st.nu.iter_mut() {
        c.copy_from_slice(&v[p..p + 3]);
        p += 3;
    }
}

/// Per-iteration scratch space.
struct Work {
    w: Vec<f64>,
    tri: Vec<[f64; 3]>,
    eta: Vec<f64>,
    num: Mat<f64>,
    scratch: Vec<f64>,
}

struct StepStats {
    r_max: f64,
    s_max: f64,
    r_norm: f64,
    s_norm: f64,
    obj: f64,
}

/// One over-relaxed ADMM iteration from `cur`, written into `next`.
fn step(lay: &Layout, problem: &SdpProblem, cur: &State, next: &mut State, wk: &mut Work) -> Result<StepStats> {
    let n = lay.n;
    let alpha = problem.options.relax;
    let rho = cur.rho;
    next.rho = rho;

    let v = Mat::from_fn(n, n, |i, j| cur.z[(i, j)] - cur.lam[(i, j)]);
    let x = linalg::psd_project(&v)?.0;
    for (i, nb) in problem.neighbors.iter().enumerate() {
        if nb.is_empty() {
            wk.eta[i] = 0.0;
            continue;
        }
        let base = lay.offsets[i];
        wk.scratch.clear();
        wk.scratch.extend(nb.iter().enumerate().map(|(k, &j)| cur.z[(i, j)] - cur.mu[base + k]));
        wk.eta[i] = epigraph_prox(&wk.scratch, rho, &mut wk.w[base..base + nb.len()]);
    }
    for (c, pairs) in lay.tri_pairs.iter().enumerate() {
        let mut p = [0.0; 3];
        for q in 0..3 {
            p[q] = cur.z[pairs[q]] - cur.nu[c][q];
        }
        let viol = p[0] + p[1] - p[2] - 1.0;
        if viol > 0.0 {
            p[0] -= viol / 3.0;
            p[1] -= viol / 3.0;
            p[2] += viol / 3.0;
        }
        wk.tri[c] = p;
    }

    // z-update: weighted average of the relaxed copies plus duals
    let num = &mut wk.num;
    for j in 0..n {
        for i in 0..n {
            num[(i, j)] = alpha * x[(i, j)] + (1.0 - alpha) * cur.z[(i, j)] + cur.lam[(i, j)];
        }
    }
    for j in 0..n {
        for i in 0..j {
            let s = num[(i, j)] + num[(j, i)];
            num[(i, j)] = s;
            num[(j, i)] = s;
        }
    }
    for (i, nb) in problem.neighbors.iter().enumerate() {
        for (k, &j) in nb.iter().enumerate() {
            let slot = lay.offsets[i] + k;
            let add = alpha * wk.w[slot] + (1.0 - alpha) * cur.z[(i, j)] + cur.mu[slot];
            num[(i, j)] += add;
            num[(j, i)] += add;
        }
    }
    for (c, pairs) in lay.tri_pairs.iter().enumerate() {
        for q in 0..3 {
            let (a, b) = pairs[q];
            let add = alpha * wk.tri[c][q] + (1.0 - alpha) * cur.z[(a, b)] + cur.nu[c][q];
            num[(a, b)] += add;
            num[(b, a)] += add;
        }
    }
    let mut t_sum = 0.0;
    for j in 0..n {
        for i in 0..j {
            t_sum += num[(i, j)] / lay.omega[(i, j)];
        }
    }
    let shift = (t_sum + n as f64 / 2.0) / lay.inv_omega_sum;
    for j in 0..n {
        next.z[(j, j)] = 1.0;
        for i in 0..j {
            let val = (num[(i, j)] - shift) / lay.omega[(i, j)];
            next.z[(i, j)] = val;
            next.z[(j, i)] = val;
        }
    }

    // dual updates and residuals
    let (mut r_max, mut s_max, mut r2, mut s2) = (0.0f64, 0.0f64, 0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            let z = next.z[(i, j)];
            let xh = alpha * x[(i, j)] + (1.0 - alpha) * cur.z[(i, j)];
            next.lam[(i, j)] = cur.lam[(i, j)] + xh - z;
            let r = x[(i, j)] - z;
            r_max = r_max.max(r.abs());
            r2 += r * r;
            let dz = z - cur.z[(i, j)];
            s_max = s_max.max(dz.abs());
            s2 += lay.omega[(i, j)] * dz * dz;
        }
    }
    for (i, nb) in problem.neighbors.iter().enumerate() {
        for (k, &j) in nb.iter().enumerate() {
            let slot = lay.offsets[i] + k;
            let z = next.z[(i, j)];
            let wh = alpha * wk.w[slot] + (1.0 - alpha) * cur.z[(i, j)];
            next.mu[slot] = cur.mu[slot] + wh - z;
            let r = wk.w[slot] - z;
            r_max = r_max.max(r.abs());
            r2 += r * r;
        }
    }
    for (c, pairs) in lay.tri_pairs.iter().enumerate() {
        for q in 0..3 {
            let z = next.z[pairs[q]];
            let th = alpha * wk.tri[c][q] + (1.0 - alpha) * cur.z[pairs[q]];
            next.nu[c][q] = cur.nu[c][q] + th - z;
            let r = wk.tri[c][q] - z;
            r_max = r_max.max(r.abs());
            r2 += r * r;
        }
    }
    Ok(StepStats { r_max, s_max: rho * s_max, r_norm: r2.sqrt(), s_norm: rho * s2.sqrt(), obj: wk.eta.iter().sum() })
}

/// Type-II Anderson acceleration of the fixed-point map `x ↦ T(x)` with a
/// sliding window of differences.
struct Anderson {
    mem: usize,
    dx: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
    /// Gram matrix of the `dg` columns.
    gram: Vec<Vec<f64>>,
    prev: Option<(Vec<f64>, Vec<f64>)>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Anderson {
    fn new(mem: usize) -> Self {
        Anderson { mem, dx: VecDeque::new(), dg: VecDeque::new(), gram: Vec::new(), prev: None }
    }

    fn clear(&mut self) {
        self.dx.clear();
        self.dg.clear();
        self.gram.clear();
        self.prev = None;
    }

    /// Records iterate `x` with residual `g = T(x) − x`.
    fn push(&mut self, x: &[f64], g: &[f64]) {
        if let Some((mut px, mut pg)) = self.prev.take() {
            px.iter_mut().zip(x).for_each(|(p, v)| *p = v - *p);
            pg.iter_mut().zip(g).for_each(|(p, v)| *p = v - *p);
            if self.dg.len() == self.mem {
                self.dx.pop_front();
                self.dg.pop_front();
                self.gram.remove(0);
                self.gram.iter_mut().for_each(|row| {
                    row.remove(0);
                });
            }
            let mut row: Vec<f64> = self.dg.iter().map(|c| dot(c, &pg)).collect();
            for (r, &d) in self.gram.iter_mut().zip(&row) {
                r.push(d);
            }
            row.push(dot(&pg, &pg));
            self.gram.push(row);
            self.dx.push_back(px);
            self.dg.push_back(pg);
        }
        self.prev = Some((x.to_vec(), g.to_vec()));
    }

    /// `x + g − (ΔX + ΔG)γ` with `γ` the regularized least-squares fit of
    /// `g` by `ΔG`; `false` when there is no history yet.
    fn propose(&self, x: &[f64], g: &[f64], out: &mut Vec<f64>) -> bool {
        let m = self.dg.len();
        if m == 0 {
            return false;
        }
        let trace: f64 = (0..m).map(|k| self.gram[k][k]).sum();
        let reg = 1e-10 * trace / m as f64 + f64::MIN_POSITIVE;
        let mut a: Vec<Vec<f64>> = self.gram.clone();
        for (k, row) in a.iter_mut().enumerate() {
            row[k] += reg;
        }
        let mut rhs: Vec<f64> = self.dg.iter().map(|c| dot(c, g)).collect();
        let Some(gamma) = solve_dense(&mut a, &mut rhs) else {
            return false;
        };
        out.clear();
        out.extend(x.iter().zip(g).map(|(a, b)| a + b));
        for k in 0..m {
            let (dx, dg, gk) = (&self.dx[k], &self.dg[k], gamma[k]);
            for ((o, a), b) in out.iter_mut().zip(dx).zip(dg) {
                *o -= gk * (a + b);
            }
        }
        out.iter().all(|v| v.is_finite())
    }
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            for c in col..m {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn residual(f: &[f64], x: &[f64], g: &mut Vec<f64>) {
    g.clear();
    g.extend(f.iter().zip(x).map(|(a, b)| a - b));
}

pub(crate) fn solve_from(problem: &SdpProblem, warm: Option<State>) -> Result<SdpSolution> {
    let start = Instant::now();
    let opts = &problem.options;
    let lay = Layout::new(problem);
    let n = lay.n;
    let mut cur = warm.unwrap_or_else(|| State::init(problem, lay.slots()));
    cur.nu.resize(lay.tri_pairs.len(), [0.0; 3]);
    let mut next = cur.clone();
    let mut trial = cur.clone();
    let mut trial_next = cur.clone();
    let mut wk = Work {
        w: vec![0.0; lay.slots()],
        tri: vec![[0.0; 3]; lay.tri_pairs.len()],
        eta: vec![0.0; n],
        num: Mat::zeros(n, n),
        scratch: Vec::new(),
    };
    let mut aa = Anderson::new(opts.anderson);
    let dim = lay.dim();
    let (mut xv, mut fv, mut gv) = (Vec::with_capacity(dim), Vec::with_capacity(dim), Vec::with_capacity(dim));
    let (mut cand, mut fv2, mut gv2) = (Vec::new(), Vec::new(), Vec::new());

    let mut stats = step(&lay, problem, &cur, &mut next, &mut wk)?;
    let mut evals = 1;
    flatten(&cur, &mut xv);
    flatten(&next, &mut fv);
    residual(&fv, &xv, &mut gv);

    let mut history = Vec::new();
    let mut window_obj: VecDeque<f64> = VecDeque::new();
    let mut converged = false;
    let mut accepted_aa = 0usize;
    let mut outer = 0usize;
    let debug = std::env::var_os("VBM_ADMM_DEBUG").is_some();
    loop {
        outer += 1;
        window_obj.push_back(stats.obj);
        if window_obj.len() > opts.window + 1 {
            window_obj.pop_front();
        }
        if outer % opts.window.max(1) == 0 {
            history.push(stats.obj);
        }
        if debug && outer % 25 == 0 {
            eprintln!(
                "admm k={outer} evals={evals} r={:.3e} s={:.3e} obj={:.6} rho={} aa={accepted_aa}",
                stats.r_max, stats.s_max, stats.obj, cur.rho
            );
        }
        let stationary = window_obj.len() == opts.window + 1
            && (stats.obj - window_obj[0]).abs() <= opts.tol_obj * stats.obj.abs().max(1.0);
        if stats.r_max <= opts.tol_feas && stats.s_max <= 10.0 * opts.tol_feas && stationary {
            converged = true;
            break;
        }
        if evals >= opts.max_iter {
            break;
        }

        if opts.adapt_every > 0 && outer % opts.adapt_every == 0 {
            let factor = if stats.r_norm > 10.0 * stats.s_norm {
                2.0
            } else if stats.s_norm > 10.0 * stats.r_norm {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                next.rho *= factor;
                let inv = 1.0 / factor;
                for j in 0..n {
                    for i in 0..n {
                        next.lam[(i, j)] *= inv;
                    }
                }
                next.mu.iter_mut().for_each(|m| *m *= inv);
                next.nu.iter_mut().flatten().for_each(|m| *m *= inv);
                aa.clear();
                std::mem::swap(&mut cur, &mut next);
                stats = step(&lay, problem, &cur, &mut next, &mut wk)?;
                evals += 1;
                flatten(&cur, &mut xv);
                flatten(&next, &mut fv);
                residual(&fv, &xv, &mut gv);
                continue;
            }
        }

        let mut accepted = false;
        if opts.anderson > 0 {
            aa.push(&xv, &gv);
            if aa.propose(&xv, &gv, &mut cand) {
                trial.rho = cur.rho;
                unflatten(&cand, &mut trial);
                let s2 = step(&lay, problem, &trial, &mut trial_next, &mut wk)?;
                evals += 1;
                flatten(&trial_next, &mut fv2);
                residual(&fv2, &cand, &mut gv2);
                if norm(&gv2) <= norm(&gv) {
                    std::mem::swap(&mut cur, &mut trial);
                    std::mem::swap(&mut next, &mut trial_next);
                    std::mem::swap(&mut xv, &mut cand);
                    std::mem::swap(&mut fv, &mut fv2);
                    std::mem::swap(&mut gv, &mut gv2);
                    stats = s2;
                    accepted = true;
                    accepted_aa += 1;
                }
            }
        }
        if !accepted {
            std::mem::swap(&mut cur, &mut next);
            std::mem::swap(&mut xv, &mut fv);
            stats = step(&lay, problem, &cur, &mut next, &mut wk)?;
            evals += 1;
            flatten(&next, &mut fv);
            residual(&fv, &xv, &mut gv);
        }
    }

    let u = next.z.clone();
    let eta = eta_from_u(&problem.neighbors, &u);
    let residuals = residuals(problem, &u, &eta)?;
    Ok(SdpSolution {
        objective: eta.iter().sum(),
        u,
        eta,
        residuals,
        iterations: evals,
        wall_time: start.elapsed(),
        converged,
        trace: SolverTrace {
            final_rho: next.rho,
            primal_residual: stats.r_max,
            dual_residual: stats.s_max,
            objective_history: history,
            accelerated_steps: accepted_aa,
            ..SolverTrace::default()
        },
        state: Some(next),
    })
}

/// Minimizes `η + (ρ/2)·Σ_j (w_j − v_j)²` subject to `w_j ≥ 1 − η/2`,
/// writing the optimal `w` and returning the optimal `η`.
///
/// For fixed `η` the best `w_j` is `max(v_j, 1 − η/2)`. With `s = η/2` and
/// `c_j = 1 − v_j` stationarity reads `Σ_j (c_j − s)⁺ = 2/ρ`.
fn epigraph_prox(v: &[f64], rho: f64, w: &mut [f64]) -> f64 {
    let mut c: Vec<f64> = v.iter().map(|x| 1.0 - x).collect();
    c.sort_by(|a, b| b.total_cmp(a));
    let target = 2.0 / rho;
    let mut cum = 0.0;
    let mut s = 0.0;
    for m in 1..=c.len() {
        cum += c[m - 1];
        s = (cum - target) / m as f64;
        if m == c.len() || s >= c[m] {
            break;
        }
    }
    for (wj, &vj) in w.iter_mut().zip(v) {
        *wj = vj.max(1.0 - s);
    }
    2.0 * s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_prox(v: &[f64], rho: f64) -> f64 {
        // golden-section on the convex 1-D objective
        let f = |eta: f64| eta + 0.5 * rho * v.iter().map(|&x| (1.0 - eta / 2.0 - x).max(0.0).powi(2)).sum::<f64>();
        let (mut a, mut b) = (-20.0, 20.0);
        for _ in 0..300 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if f(m1) < f(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn prox_matches_ternary_search() {
        let cases: [(&[f64], f64); 4] =
            [(&[0.3, -0.2, 0.9], 1.0), (&[1.0, 1.0], 0.1), (&[-1.0], 5.0), (&[0.5, 0.4, 0.3, 0.2, -0.9], 3.0)];
        for (v, rho) in cases {
            let mut w = vec![0.0; v.len()];
            let eta = epigraph_prox(v, rho, &mut w);
            assert!((eta - brute_prox(v, rho)).abs() < 1e-6, "v={v:?}");
            for (&wj, &vj) in w.iter().zip(v) {
                assert!(wj >= vj && 2.0 - 2.0 * wj <= eta + 1e-12);
            }
        }
    }
}
