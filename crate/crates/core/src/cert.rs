//! Dual certificates of integrality for planted instances.
//!
//! The dual of the vertex-expansion SDP asks for directed edge weights `Y`
//! with unit out-weight at every vertex, a diagonal `B` and a scalar `α`
//! such that `M = L(Y) + α·11ᵀ − B ⪰ 0`; its value is `Σ_i B_ii`. For a
//! planted instance the weights are set from the labels:
//!
//! * `a = 1/(2·d_max)` on expander edges inside `S\T` (and `S′\T′`),
//! * `b_i = 1/(2Δ_T(i))` on edges from `i ∈ S\T` into `T`,
//! * `1/Δ_F(i)` on the crossing edges of `F`,
//! * zero on adversary edges,
//!
//! and any missing out-weight is put on the lowest-index base neighbor on
//! the same side. `B_ii = 2·d_{T′}(i)` on `T` (symmetrically on `T′`) makes
//! `1_S` a null vector of `M`, and the certificate proves integrality when
//! `M + l·1_S1_Sᵀ ≻ 0`.

use std::collections::{BTreeMap, HashSet};

use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::digraph::{qstr, qvec, WeightedDigraph};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::gen::{Label, ModelParams, PlantedInstance};
use crate::graph::EdgeTag;
use crate::linalg;
use crate::rng;
use crate::sdp::SdpSolution;

/// Weights used on one side of the bisection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SideWeights {
    /// Weight on each interior expander edge.
    #[serde(with = "qstr")]
    pub a: BigRational,
    /// Minimum expander degree `d`.
    pub d: usize,
    /// Measured degree ratio `r = d_max/d_min`.
    #[serde(with = "qstr")]
    pub r: BigRational,
    /// `(i, b_i)` for interior vertices with a neighbor in the boundary set.
    pub b: Vec<BWeight>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BWeight {
    pub vertex: usize,
    #[serde(with = "qstr")]
    pub value: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DualCertificate {
    #[serde(rename = "Y")]
    pub y: WeightedDigraph,
    /// Diagonal of `B`.
    #[serde(rename = "B", with = "qvec")]
    pub b_diag: Vec<BigRational>,
    #[serde(with = "qstr")]
    pub alpha: BigRational,
    /// Shift in the witness `M + l·1_S1_Sᵀ`.
    #[serde(with = "qstr")]
    pub l: BigRational,
    #[serde(with = "qstr")]
    pub c_prime: BigRational,
    pub sides: [SideWeights; 2],
}

impl DualCertificate {
    pub fn dual_objective(&self) -> BigRational {
        self.b_diag.iter().fold(BigRational::zero(), |acc, b| acc + b)
    }

    /// `M = L(Y) + α·11ᵀ − B` in floating point.
    pub fn dual_matrix(&self) -> Mat<f64> {
        let n = self.y.n();
        let alpha = self.alpha.to_f64().unwrap_or(f64::NAN);
        let mut m = self.y.laplacian();
        for j in 0..n {
            for i in 0..n {
                m[(i, j)] += alpha;
            }
            m[(j, j)] -= self.b_diag[j].to_f64().unwrap_or(f64::NAN);
        }
        m
    }
}

fn rat(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Base-graph view used throughout: neighbor lists without adversary edges.
fn base_neighbors(inst: &PlantedInstance) -> Vec<Vec<usize>> {
    let mut nb = vec![Vec::new(); inst.n()];
    for (i, j, tag) in inst.graph.tagged_edges() {
        if tag == EdgeTag::Base {
            nb[i].push(j);
            nb[j].push(i);
        }
    }
    nb.iter_mut().for_each(|v| v.sort_unstable());
    nb
}

/// `Δ_B(i)`: number of base neighbors of `i` in the boundary set of the
/// side `side_of_i` selects (`T` for `S`-vertices read with `boundary`).
fn boundary_degree(nb: &[Vec<usize>], labels: &[Label], i: usize, boundary: Label) -> usize {
    nb[i].iter().filter(|&&j| labels[j] == boundary).count()
}

const SIDES: [(Label, Label); 2] = [(Label::Inner, Label::Boundary), (Label::InnerP, Label::BoundaryP)];

/// Maximum `F`-degree parameter of the model, or the realized maximum when
/// the model has none.
fn model_c(inst: &PlantedInstance, deg_f: &[usize]) -> usize {
    match &inst.params {
        ModelParams::Vbm(p) => p.c,
        _ => deg_f.iter().copied().max().unwrap_or(0),
    }
}

/// `c′ = 8c/(1−ε)` and `l = 2·max(1, ε·c′²/(4n·((1−ε)c′/2 − 2c)))` with `ε`
/// the larger realized boundary fraction.
fn shift_parameters(n: usize, eps: &BigRational, c: usize) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let c_r = rat(c, 1);
    let c_prime = rat(8 * c, 1) / (&one - eps);
    let denom = (&one - eps) * &c_prime / rat(2, 1) - rat(2, 1) * &c_r;
    let bound =
        if denom.is_positive() { eps * &c_prime * &c_prime / (rat(4 * n, 1) * denom) } else { BigRational::zero() };
    let l = rat(2, 1) * if bound > one { bound } else { one };
    (c_prime, l)
}

pub fn build_certificate(inst: &PlantedInstance) -> Result<DualCertificate> {
    let n = inst.n();
    let labels = inst.labels();
    let nb = base_neighbors(inst);
    let mut y = WeightedDigraph::new(n);

    let mut deg_f = vec![0usize; n];
    for &(t, tp) in &inst.f {
        deg_f[t] += 1;
        deg_f[tp] += 1;
    }
    for &v in inst.t.iter().chain(&inst.tp) {
        if deg_f[v] == 0 {
            return Err(Error::Certificate(format!("boundary vertex {v} has no F-edge")));
        }
    }
    for &(t, tp) in &inst.f {
        y.set(t, tp, rat(1, deg_f[t]));
        y.set(tp, t, rat(1, deg_f[tp]));
    }

    let mut sides = Vec::with_capacity(2);
    for (side, &(inner, boundary)) in SIDES.iter().enumerate() {
        let (d_min, d_max) = inst.expander_degree_range[side];
        let a = if d_max > 0 { rat(1, 2 * d_max) } else { BigRational::zero() };
        let r = if d_min > 0 { rat(d_max, d_min) } else { BigRational::one() };
        let mut bw = Vec::new();
        for i in (0..n).filter(|&i| labels[i] == inner) {
            let dt = boundary_degree(&nb, &labels, i, boundary);
            let b_i = if dt > 0 { rat(1, 2 * dt) } else { BigRational::zero() };
            for &j in &nb[i] {
                if labels[j] == inner {
                    y.set(i, j, a.clone());
                } else if labels[j] == boundary {
                    y.set(i, j, b_i.clone());
                }
            }
            if dt > 0 {
                bw.push(BWeight { vertex: i, value: b_i });
            }
        }
        sides.push(SideWeights { a, d: d_min, r, b: bw });
    }

    // pad every row up to one on a same-side base neighbor
    let sums = y.row_sums();
    let one = BigRational::one();
    for i in 0..n {
        if sums[i] < one {
            let same = labels[i].in_s();
            if let Some(&j) = nb[i].iter().find(|&&j| labels[j].in_s() == same) {
                y.add(i, j, &(&one - &sums[i]));
            }
        }
    }

    let mut b_diag = vec![BigRational::zero(); n];
    for (i, b) in b_diag.iter_mut().enumerate() {
        let across = match labels[i] {
            Label::Boundary => Label::BoundaryP,
            Label::BoundaryP => Label::Boundary,
            _ => continue,
        };
        let mut d = BigRational::zero();
        for &j in inst.graph.neighbors(i) {
            if labels[j] == across {
                d += y.get(i, j) + y.get(j, i);
            }
        }
        *b = rat(2, 1) * d;
    }

    let eps = rat(inst.t.len().max(inst.tp.len()), n);
    let (c_prime, l) = shift_parameters(n, &eps, model_c(inst, &deg_f));
    let sides: [SideWeights; 2] = sides.try_into().expect("two sides");
    Ok(DualCertificate { y, b_diag, alpha: l.clone(), l, c_prime, sides })
}

/// Outcome of the four integrality checks plus diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertReport {
    #[serde(with = "qstr")]
    pub dual_objective: BigRational,
    /// `4(|T| + |T′|)`, the value of the planted integral solution.
    pub integral_value: usize,
    /// Check (1): dual feasibility in exact arithmetic.
    pub feasible: bool,
    pub violations: Vec<String>,
    /// `‖M·1_S‖∞`.
    pub eigen_zero_on_planted: f64,
    /// `M·1_S = 0` holds exactly in rationals.
    pub eigen_zero_exact: bool,
    pub m_norm: f64,
    /// Check (2): `‖M·1_S‖∞ ≤ tol·‖M‖`.
    pub planted_null: bool,
    /// `λ_min(M + l·1_S1_Sᵀ)`.
    pub min_eig_shifted: f64,
    pub tol_eig: f64,
    /// Check (3): `λ_min(M + l·1_S1_Sᵀ) > tol_eig`, so `M ⪰ 0` with rank `n−1`.
    pub rank_condition: bool,
    /// Check (4): dual objective equals the integral value exactly.
    pub objective_matches: bool,
    pub integrality_certified: bool,
    /// Numbers of the failed checks, in order.
    pub failed_checks: Vec<u8>,
    pub harmonic_sums: HarmonicReport,
    pub flow_check: FlowReport,
}

/// Runs checks (1)–(4) and attaches the flow and harmonic-sum diagnostics.
/// `tol` is relative to `‖M‖` for check (2).
pub fn verify_certificate(inst: &PlantedInstance, cert: &DualCertificate, tol: f64) -> CertReport {
    let n = inst.n();
    let labels = inst.labels();
    let mut violations = Vec::new();

    // (1) exact feasibility
    if cert.y.n() != n || cert.b_diag.len() != n {
        violations.push(format!(
            "dimension mismatch: graph has {n} vertices, Y has {}, B has {}",
            cert.y.n(),
            cert.b_diag.len()
        ));
    }
    for (i, j, w) in cert.y.iter() {
        if w.is_negative() {
            violations.push(format!("Y[{i},{j}] = {w} is negative"));
        }
        if !inst.graph.has_edge(i, j) {
            violations.push(format!("Y[{i},{j}] sits on a non-edge"));
        }
    }
    let one = BigRational::one();
    for (i, s) in cert.y.row_sums().iter().enumerate().take(n) {
        if *s != one {
            violations.push(format!("row {i} sums to {s}"));
        }
    }
    let feasible = violations.is_empty();
    if violations.len() > 20 {
        let extra = violations.len() - 20;
        violations.truncate(20);
        violations.push(format!("... and {extra} more"));
    }

    let dims_ok = cert.y.n() == n && cert.b_diag.len() == n;
    let sign: Vec<f64> = inst.sign_vector();

    // (2) 1_S is a null vector
    let (mut residual, mut exact, mut m_norm, mut min_eig, mut tol_eig) =
        (f64::INFINITY, false, f64::NAN, f64::NAN, f64::NAN);
    if dims_ok {
        let m = cert.dual_matrix();
        residual = (0..n).map(|i| (0..n).map(|j| m[(i, j)] * sign[j]).sum::<f64>().abs()).fold(0.0, f64::max);
        exact = planted_null_exact(inst, cert, &labels);
        m_norm = linalg::sym_spectral_norm(&m).unwrap_or(f64::NAN);
        tol_eig = (1e-8 * m_norm).max(1e-10);
        // (3) shifted witness
        let l = to_f64(&cert.l);
        let shifted = Mat::from_fn(n, n, |i, j| m[(i, j)] + l * sign[i] * sign[j]);
        min_eig = linalg::sym_eigenvalues(&shifted).ok().and_then(|v| v.first().copied()).unwrap_or(f64::NAN);
    }
    let planted_null = residual <= tol * m_norm;
    let rank_condition = min_eig > tol_eig;

    // (4) objective
    let integral_value = 4 * inst.planted_boundary();
    let dual_objective = cert.dual_objective();
    let objective_matches = dual_objective == rat(integral_value, 1);

    let failed_checks: Vec<u8> = [feasible, planted_null, rank_condition, objective_matches]
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(k, _)| k as u8 + 1)
        .collect();
    let harmonic_sums = harmonic_condition(inst, 1.0);
    let flow_check = flow_check(inst, &cert.y, &cert.c_prime);
    CertReport {
        dual_objective,
        integral_value,
        feasible,
        violations,
        eigen_zero_on_planted: residual,
        eigen_zero_exact: exact,
        m_norm,
        planted_null,
        min_eig_shifted: min_eig,
        tol_eig,
        rank_condition,
        objective_matches,
        integrality_certified: failed_checks.is_empty(),
        failed_checks,
        harmonic_sums,
        flow_check,
    }
}

/// `M·1_S = 0` in exact arithmetic: since `1_S ⊥ 1`, this is
/// `(L(Y)·1_S)_i = B_ii·1_S(i)` for every `i`.
fn planted_null_exact(inst: &PlantedInstance, cert: &DualCertificate, labels: &[Label]) -> bool {
    if inst.s.len() * 2 != inst.n() {
        return false;
    }
    let n = inst.n();
    let mut ly = vec![BigRational::zero(); n];
    let s = |v: usize| if labels[v].in_s() { 1 } else { -1 };
    for (i, j, w) in cert.y.iter() {
        // w·(e_i − e_j)(e_i − e_j)ᵀ applied to 1_S
        let diff = s(i) - s(j);
        if diff != 0 {
            let d = w * BigRational::from_integer(BigInt::from(diff));
            ly[i] += &d;
            ly[j] -= &d;
        }
    }
    (0..n).all(|i| ly[i] == &cert.b_diag[i] * BigRational::from_integer(BigInt::from(s(i))))
}

/// Internal and external harmonic degree sums at one boundary vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HarmonicEntry {
    pub vertex: usize,
    pub h_int: f64,
    pub h_ext: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HarmonicReport {
    pub alpha_const: f64,
    pub entries: Vec<HarmonicEntry>,
    /// `H_int ≥ alpha_const·H_ext` at every boundary vertex.
    pub holds: bool,
    /// `min_t H_int(t)/H_ext(t)` over vertices with `H_ext > 0`.
    pub min_ratio: Option<f64>,
}

/// For `t ∈ T`: `H_int(t) = Σ_{j ∈ N_{S\T}(t)} 1/Δ_T(j)` and
/// `H_ext(t) = Σ_{t′ ∈ N_{T′}(t)} 1/Δ_T(t′)`, on base edges; mirrored for `T′`.
pub fn harmonic_condition(inst: &PlantedInstance, alpha_const: f64) -> HarmonicReport {
    let labels = inst.labels();
    let nb = base_neighbors(inst);
    let mut entries = Vec::new();
    for &(inner, boundary) in &SIDES {
        let across = if boundary == Label::Boundary { Label::BoundaryP } else { Label::Boundary };
        let mut ts: Vec<usize> = (0..inst.n()).filter(|&v| labels[v] == boundary).collect();
        ts.sort_unstable();
        for t in ts {
            let mut h_int = 0.0;
            let mut h_ext = 0.0;
            for &j in &nb[t] {
                if labels[j] == inner {
                    h_int += 1.0 / boundary_degree(&nb, &labels, j, boundary) as f64;
                } else if labels[j] == across {
                    h_ext += 1.0 / boundary_degree(&nb, &labels, j, boundary) as f64;
                }
            }
            entries.push(HarmonicEntry { vertex: t, h_int, h_ext });
        }
    }
    let holds = entries.iter().all(|e| e.h_int >= alpha_const * e.h_ext);
    let min_ratio = entries
        .iter()
        .filter(|e| e.h_ext > 0.0)
        .map(|e| e.h_int / e.h_ext)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))));
    HarmonicReport { alpha_const, entries, holds, min_ratio }
}

/// Cross-check of the closed-form routed flow against a max-flow
/// computation for one `(i, t)` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowSample {
    pub i: usize,
    pub t: usize,
    pub closed_form: f64,
    pub max_flow: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowReport {
    /// `2c′/n`.
    pub threshold: f64,
    /// `min_{(i,t)} f(i→t)` over both sides (0 when a side has no boundary).
    pub min_flow: f64,
    pub argmin: Option<usize>,
    pub passes: bool,
    pub samples: Vec<FlowSample>,
    /// `max |f(i→t) − maxflow(i→t)/2|` over the samples.
    pub max_discrepancy: f64,
}

/// Two-hop flow from `S\T` to `T` on the expander-completed graph, where
/// every interior pair carries `a·d·λ/(r²n)` in each direction.
///
/// Each `j ∈ N_{S\T}(t)` forwards `κ_j = a·d·λ/(2r²n·Δ_T(j))` from every
/// source to every `t ∈ N_T(j)`. Since a path of length two only counts
/// half, `f(i→t) = ½·Σ_j κ_j`. The max-flow cross-check routes `i → j → t`
/// with the per-pair capacity shares `κ_j` and `Y_jt/|S\T|`, so it equals
/// `2f` exactly when no `j → t` edge is over-subscribed. `a` is read back
/// from `Y` as the smallest weight on an interior base edge.
pub fn flow_check(inst: &PlantedInstance, y: &WeightedDigraph, c_prime: &BigRational) -> FlowReport {
    let n = inst.n();
    let labels = inst.labels();
    let nb = base_neighbors(inst);
    let threshold = 2.0 * to_f64(c_prime) / n as f64;
    let mut min_flow = f64::INFINITY;
    let mut argmin = None;
    let mut samples = Vec::new();
    let mut rng = rng::stream(inst.seed, "flow-samples");

    for (side, &(inner, boundary)) in SIDES.iter().enumerate() {
        let interior: Vec<usize> = (0..n).filter(|&v| labels[v] == inner).collect();
        let ts: Vec<usize> = (0..n).filter(|&v| labels[v] == boundary).collect();
        if ts.is_empty() {
            continue;
        }
        let mut a = f64::INFINITY;
        let mut any = false;
        for &i in &interior {
            for &j in &nb[i] {
                if labels[j] == inner {
                    any = true;
                    a = a.min(to_f64(&y.get(i, j)));
                }
            }
        }
        let a = if any { a } else { 0.0 };
        let (d_min, d_max) = inst.expander_degree_range[side];
        let r = if d_min > 0 { d_max as f64 / d_min as f64 } else { 1.0 };
        let cap = a * d_min as f64 * inst.measured_gaps[side] / (r * r * n as f64);
        let kappa = |j: usize| cap / (2.0 * boundary_degree(&nb, &labels, j, boundary) as f64);
        let feeders = |t: usize| nb[t].iter().copied().filter(|&j| labels[j] == inner).collect::<Vec<_>>();
        for &t in &ts {
            let f: f64 = 0.5 * feeders(t).iter().map(|&j| kappa(j)).sum::<f64>();
            if f < min_flow {
                min_flow = f;
                argmin = Some(t);
            }
        }

        // 5 sampled pairs per side
        let mut pairs = Vec::new();
        for _ in 0..50 {
            if pairs.len() == 5 || interior.is_empty() {
                break;
            }
            let t = *ts.choose(&mut rng).expect("nonempty");
            let i = *interior.choose(&mut rng).expect("nonempty");
            if !nb[t].contains(&i) && !pairs.contains(&(i, t)) {
                pairs.push((i, t));
            }
        }
        for (i, t) in pairs {
            let js = feeders(t);
            let closed = 0.5 * js.iter().map(|&j| kappa(j)).sum::<f64>();
            let mut net = FlowNetwork::new(js.len() + 2);
            for (k, &j) in js.iter().enumerate() {
                net.add_arc(0, k + 2, kappa(j));
                net.add_arc(k + 2, 1, to_f64(&y.get(j, t)) / interior.len() as f64);
            }
            samples.push(FlowSample { i, t, closed_form: closed, max_flow: net.max_flow(0, 1) });
        }
    }
    if !min_flow.is_finite() {
        min_flow = 0.0;
    }
    let max_discrepancy = samples.iter().map(|s| (s.closed_form - 0.5 * s.max_flow).abs()).fold(0.0, f64::max);
    FlowReport { threshold, min_flow, argmin, passes: min_flow >= threshold, samples, max_discrepancy }
}

/// Complementary slackness between a primal solution and a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SlacknessReport {
    /// `⟨M, U⟩`.
    pub inner_product: f64,
    /// `Σ_i η_i (1 − Σ_j Y_ij)`.
    pub eta_slack: f64,
    /// `tol·n`.
    pub bound: f64,
    pub holds: bool,
}

pub fn complementary_slackness(solution: &SdpSolution, cert: &DualCertificate, tol: f64) -> Result<SlacknessReport> {
    let n = cert.y.n();
    if solution.u.nrows() != n || solution.eta.len() != n {
        return Err(Error::Dimension { expected: n, got: solution.u.nrows() });
    }
    let m = cert.dual_matrix();
    let inner_product = linalg::frob_dot(&m, &solution.u);
    let sums = cert.y.row_sums();
    let eta_slack: f64 = (0..n).map(|i| solution.eta[i] * (1.0 - to_f64(&sums[i]))).sum();
    let bound = tol * n as f64;
    Ok(SlacknessReport {
        inner_product,
        eta_slack,
        bound,
        holds: inner_product.abs() <= bound && eta_slack.abs() <= bound,
    })
}

/// Nonzero weights of `Y` keyed by edge, for comparing certificates.
pub fn weights_on(y: &WeightedDigraph, edges: &HashSet<(usize, usize)>) -> BTreeMap<(usize, usize), BigRational> {
    y.iter()
        .filter(|(i, j, _)| edges.contains(&((*i).min(*j), (*i).max(*j))))
        .map(|(i, j, w)| ((i, j), w.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_parameters_match_hand_computation() {
        // ε = 1/10, c = 3: c′ = 24/0.9 = 80/3, (1−ε)c′/2 − 2c = 6, bound = 0.1·(80/3)²/(4·200·6) < 1
        let (cp, l) = shift_parameters(200, &rat(1, 10), 3);
        assert_eq!(cp, rat(80, 3));
        assert_eq!(l, rat(2, 1));
        // tiny n pushes the bound above one: n = 1
        let (_, l) = shift_parameters(1, &rat(1, 10), 3);
        assert_eq!(l, rat(2, 1) * rat(1, 10) * rat(6400, 9) / rat(24, 1));
    }
}
