//! Turning SDP solutions into cuts.

use faer::Mat;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{phi_from_counts, report_from_membership, vertex_expansion, CutReport, Graph};
use crate::linalg;
use crate::sdp::{max_triangle_violation, SdpSolution};

/// Squared distances `‖u_i − u_j‖²` between the rows of `vectors`.
pub fn sq_distances(vectors: &Mat<f64>) -> Mat<f64> {
    let n = vectors.nrows();
    let g = linalg::gram(vectors);
    Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { (g[(i, i)] + g[(j, j)] - 2.0 * g[(i, j)]).max(0.0) })
}

/// Largest `|{j : d(i, j) ≤ radius}|` over all `i` in `among`.
pub fn max_ball_size(d: &Mat<f64>, among: &[usize], radius: f64) -> usize {
    among.iter().map(|&i| among.iter().filter(|&&j| d[(i, j)] <= radius).count()).max().unwrap_or(0)
}

/// Incremental vertex boundary of a growing set.
struct Sweeper<'g> {
    g: &'g Graph,
    inside: Vec<bool>,
    /// Neighbors of each vertex currently inside.
    in_count: Vec<usize>,
    size: usize,
    /// `|N(S)|`: outside vertices with a neighbor inside.
    outer: usize,
    /// `|N(V\S)|`: inside vertices with a neighbor outside.
    inner: usize,
}

impl<'g> Sweeper<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.n();
        Sweeper { g, inside: vec![false; n], in_count: vec![0; n], size: 0, outer: 0, inner: 0 }
    }

    fn insert(&mut self, v: usize) {
        debug_assert!(!self.inside[v]);
        let deg = self.g.degree(v);
        if self.in_count[v] > 0 {
            self.outer -= 1;
        }
        self.inside[v] = true;
        self.size += 1;
        if self.in_count[v] < deg {
            self.inner += 1;
        }
        for &w in self.g.neighbors(v) {
            self.in_count[w] += 1;
            if self.inside[w] {
                if self.in_count[w] == self.g.degree(w) {
                    self.inner -= 1;
                }
            } else if self.in_count[w] == 1 {
                self.outer += 1;
            }
        }
    }

    /// `φ^V` of the current set, `None` unless it is proper and nonempty.
    fn phi(&self) -> Option<Ratio<u64>> {
        let n = self.g.n();
        (self.size > 0 && self.size < n).then(|| phi_from_counts(n, self.size, self.outer + self.inner))
    }
}

/// Sign split along the top eigenvector of `U`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactRound {
    /// The side containing vertex 0; `None` when the split is not proper.
    pub cut: Option<CutReport>,
    /// `‖U − ssᵀ‖_max ≤ 1e-3`.
    pub recovered: bool,
    pub deviation: f64,
}

pub const RECOVERY_TOL: f64 = 1e-3;

pub fn round_exact(g: &Graph, solution: &SdpSolution) -> Result<ExactRound> {
    let u = &solution.u;
    let n = u.nrows();
    if n != g.n() {
        return Err(Error::Dimension { expected: g.n(), got: n });
    }
    let eig = linalg::sym_eigen(u)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    let v: Vec<f64> = (0..n).map(|i| eig.vectors[(i, n - 1)]).collect();
    let side0 = if v[0] < 0.0 { -1.0 } else { 1.0 };
    let s: Vec<f64> = v
        .iter()
        .map(|&x| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                side0
            }
        })
        .collect();
    let mut deviation = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            deviation = deviation.max((u[(i, j)] - s[i] * s[j]).abs());
        }
    }
    let set: Vec<usize> = (0..n).filter(|&i| s[i] == s[0]).collect();
    let cut = if set.len() < n {
        Some(vertex_expansion(g, &set)?.with_method("exact", json!({ "topEigenvalue": top, "deviation": deviation })))
    } else {
        None
    };
    Ok(ExactRound { cut, recovered: top > 1e-12 && deviation <= RECOVERY_TOL, deviation })
}

/// Algorithm 1: for every center `i` whose ball `L′_i = B(i, 1/10)` holds
/// more than `3αn/4` points, order all vertices by `d(j, L′_i)` and sweep
/// the prefixes that contain `L′_i` and stop before the first vertex
/// outside `B(i, 1/8)` (all proper prefixes when there is none). The best
/// `φ^V` over all centers wins; ties go to the smaller center, then the
/// shorter prefix.
///
/// The maximum ℓ₂² triangle violation of the input is recorded in
/// `params.triangleViolation`.
pub fn algorithm1_round(g: &Graph, vectors: &Mat<f64>, alpha: f64) -> Result<CutReport> {
    let n = g.n();
    if vectors.nrows() != n {
        return Err(Error::Dimension { expected: n, got: vectors.nrows() });
    }
    let d = sq_distances(vectors);
    let violation = max_triangle_violation(&d);
    let mut best: Option<(Ratio<u64>, usize, usize, Vec<usize>)> = None;
    let mut centers = 0;
    for i in 0..n {
        let ball: Vec<usize> = (0..n).filter(|&j| d[(i, j)] <= 0.1).collect();
        if ball.len() as f64 <= 0.75 * alpha * n as f64 {
            continue;
        }
        centers += 1;
        let dist_to_ball: Vec<f64> =
            (0..n).map(|j| ball.iter().map(|&k| d[(j, k)]).fold(f64::INFINITY, f64::min)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| dist_to_ball[a].total_cmp(&dist_to_ball[b]).then(a.cmp(&b)));
        let stop = order.iter().position(|&j| d[(i, j)] > 0.125).unwrap_or(n);
        let lo = ball.len().max(1);
        let hi = stop.min(n - 1);
        let mut sw = Sweeper::new(g);
        for (pos, &v) in order.iter().enumerate() {
            let l = pos + 1;
            if l > hi {
                break;
            }
            sw.insert(v);
            if l < lo {
                continue;
            }
            let phi = sw.phi().expect("proper prefix");
            if best.as_ref().is_none_or(|b| phi < b.0) {
                best = Some((phi, i, l, order[..l].to_vec()));
            }
        }
    }
    let (_, center, prefix, mut set) = best.ok_or(Error::NoDenseCluster)?;
    set.sort_unstable();
    Ok(vertex_expansion(g, &set)?.with_method(
        "algorithm1",
        json!({ "alpha": alpha, "center": center, "prefix": prefix, "centers": centers, "triangleViolation": violation }),
    ))
}

/// A map `V → ℝ` and the rounding that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineEmbedding {
    pub y: Vec<f64>,
    pub provenance: String,
}

/// Result of sweeping a line embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineSweep {
    pub cut: CutReport,
    /// `δ₀ = n·Σ_i max_{j∈N(i)} |y_i − y_j| / Σ_{i<j} |y_i − y_j|`.
    pub delta0: f64,
}

/// `δ₀` of an embedding; the pair sum runs over unordered pairs.
pub fn line_delta0(g: &Graph, y: &[f64]) -> Result<f64> {
    let n = g.n();
    if y.len() != n {
        return Err(Error::Dimension { expected: n, got: y.len() });
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Σ_{i<j} |y_i − y_j| = Σ_k y_(k)·(2k − n + 1) over the sorted order
    let pair_sum: f64 = sorted.iter().enumerate().map(|(k, v)| v * (2.0 * k as f64 - n as f64 + 1.0)).sum();
    if !(pair_sum > 0.0) {
        return Err(Error::DegenerateEmbedding("all coordinates are equal".into()));
    }
    let stretch: f64 = (0..n).map(|i| g.neighbors(i).iter().map(|&j| (y[i] - y[j]).abs()).fold(0.0, f64::max)).sum();
    Ok(n as f64 * stretch / pair_sum)
}

/// Best level cut `{j : y_j ≤ y_(k)}` of the order by `(y, index)`.
pub fn line_sweep(g: &Graph, emb: &LineEmbedding) -> Result<LineSweep> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Domain("line sweep needs n ≥ 2".into()));
    }
    let delta0 = line_delta0(g, &emb.y)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| emb.y[a].total_cmp(&emb.y[b]).then(a.cmp(&b)));
    let mut sw = Sweeper::new(g);
    let mut best: Option<(Ratio<u64>, usize)> = None;
    for (pos, &v) in order.iter().take(n - 1).enumerate() {
        sw.insert(v);
        let phi = sw.phi().expect("proper prefix");
        if best.is_none_or(|b| phi < b.0) {
            best = Some((phi, pos + 1));
        }
    }
    let (_, k) = best.expect("n ≥ 2");
    let mut set = order[..k].to_vec();
    set.sort_unstable();
    let cut = vertex_expansion(g, &set)?
        .with_method("line-sweep", json!({ "provenance": emb.provenance, "delta0": delta0, "prefix": k }));
    Ok(LineSweep { cut, delta0 })
}

/// `y_i = d(i, L′)` off `R′` and `y_i = d(R′, L′)` on `R′`, from the squared
/// distance matrix `d`. Requires disjoint nonempty `L′`, `R′` with
/// `d(L′, R′) ≥ 1/50`.
pub fn cluster_to_embedding(d: &Mat<f64>, l: &[usize], r: &[usize]) -> Result<LineEmbedding> {
    let n = d.nrows();
    if l.is_empty() || l.iter().chain(r).any(|&v| v >= n) {
        return Err(Error::Domain("L′ must be nonempty and in range".into()));
    }
    let in_r = crate::graph::membership(n, r)?;
    if l.iter().any(|&v| in_r[v]) {
        return Err(Error::Domain("L′ and R′ overlap".into()));
    }
    let to_l: Vec<f64> = (0..n).map(|i| l.iter().map(|&k| d[(i, k)]).fold(f64::INFINITY, f64::min)).collect();
    let gap = r.iter().map(|&i| to_l[i]).fold(f64::INFINITY, f64::min);
    if !r.is_empty() && gap < 0.02 {
        return Err(Error::Domain(format!("d(L′, R′) = {gap:.4} is below 1/50")));
    }
    let y = (0..n).map(|i| if in_r[i] { gap } else { to_l[i] }).collect();
    Ok(LineEmbedding { y, provenance: "cluster".into() })
}

/// Algorithm 2 output with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlantedRound {
    pub cut: CutReport,
    pub delta: f64,
    /// `|B|` for `B = {i : η_i ≥ √δ}`.
    pub removed: usize,
    /// `|B| ≤ √δ·n`.
    pub removed_bound_ok: bool,
    /// `max_{i∈V′} |B_{V′}(i, 1/50)|`.
    pub max_small_ball: usize,
    /// `max_small_ball ≤ 9n/10`.
    pub small_ball_ok: bool,
    /// Radius multipliers `t` that were tried.
    pub t_range: (usize, usize),
    /// The nominal range `50..=⌈1/(50√δ)⌉+1` was empty.
    pub t_fallback: bool,
    /// `δ` was numerically zero and the exact rounding was used.
    pub exact: bool,
}

/// Below this `δ` the solution is treated as a perfect cut.
pub const DELTA_ZERO: f64 = 1e-8;

/// Algorithm 2: drop the high-`η` vertices `B`, grow `ℓ₂²` balls of radius
/// `t√δ` around every remaining center, and return the best `W*_t ∪ B`.
/// When the nominal range of `t` is empty the sweep uses
/// `t = 1..=⌈2/√δ⌉`, which covers every radius up to 2.
pub fn algorithm2_planted(g: &Graph, solution: &SdpSolution, delta: f64) -> Result<PlantedRound> {
    let n = g.n();
    if solution.u.nrows() != n || solution.eta.len() != n {
        return Err(Error::Dimension { expected: n, got: solution.u.nrows() });
    }
    let d = crate::sdp::distance_matrix(&solution.u);
    let base = |cut: CutReport, removed, max_small_ball, t_range, t_fallback, exact| PlantedRound {
        cut,
        delta,
        removed,
        removed_bound_ok: removed as f64 <= delta.max(0.0).sqrt() * n as f64 + 1e-9,
        max_small_ball,
        small_ball_ok: 10 * max_small_ball <= 9 * n,
        t_range,
        t_fallback,
        exact,
    };
    if delta < DELTA_ZERO {
        let all: Vec<usize> = (0..n).collect();
        let ex = round_exact(g, solution)?;
        let cut = ex.cut.ok_or_else(|| Error::DegenerateEmbedding("top eigenvector does not split V".into()))?;
        return Ok(base(cut, 0, max_ball_size(&d, &all, 0.02), (0, 0), false, true));
    }
    let sq = delta.sqrt();
    let removed: Vec<usize> = (0..n).filter(|&i| solution.eta[i] >= sq).collect();
    let mut in_b = vec![false; n];
    removed.iter().for_each(|&i| in_b[i] = true);
    let kept: Vec<usize> = (0..n).filter(|&i| !in_b[i]).collect();
    let max_small_ball = max_ball_size(&d, &kept, 0.02);

    let hi_nominal = (1.0 / (50.0 * sq)).ceil() as usize + 1;
    let (t_lo, t_hi, fallback) =
        if hi_nominal >= 50 { (50, hi_nominal, false) } else { (1, (2.0 / sq).ceil() as usize, true) };

    // best ball per t: (phi, center, members)
    let steps = t_hi - t_lo + 1;
    let mut best_t: Vec<Option<(Ratio<u64>, usize, usize)>> = vec![None; steps];
    for &i in &kept {
        let mut order = kept.clone();
        order.sort_by(|&a, &b| d[(i, a)].total_cmp(&d[(i, b)]).then(a.cmp(&b)));
        let mut sw = Sweeper::new(g);
        let mut pos = 0;
        for (k, slot) in best_t.iter_mut().enumerate() {
            let radius = (t_lo + k) as f64 * sq;
            while pos < order.len() && d[(i, order[pos])] <= radius {
                sw.insert(order[pos]);
                pos += 1;
            }
            if let Some(phi) = sw.phi() {
                if slot.is_none_or(|b| phi < b.0) {
                    *slot = Some((phi, i, pos));
                }
            }
        }
    }
    let mut best: Option<(Ratio<u64>, usize, Vec<bool>)> = None;
    for (k, slot) in best_t.iter().enumerate() {
        let Some((_, center, count)) = *slot else { continue };
        let mut order = kept.clone();
        order.sort_by(|&a, &b| d[(center, a)].total_cmp(&d[(center, b)]).then(a.cmp(&b)));
        let mut inside = in_b.clone();
        order[..count].iter().for_each(|&v| inside[v] = true);
        let size = inside.iter().filter(|&&x| x).count();
        if size == 0 || size == n {
            continue;
        }
        let rep = report_from_membership(g, &inside);
        if best.as_ref().is_none_or(|b| rep.phi < b.0) {
            best = Some((rep.phi, t_lo + k, inside));
        }
    }
    let (_, t, inside) = best.ok_or_else(|| Error::DegenerateEmbedding("no ball gives a proper cut".into()))?;
    let cut = report_from_membership(g, &inside)
        .with_method("algorithm2", json!({ "delta": delta, "t": t, "removed": removed.len(), "tFallback": fallback }));
    Ok(base(cut, removed.len(), max_small_ball, (t_lo, t_hi), fallback, false))
}
