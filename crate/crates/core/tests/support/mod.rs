//! Shared test helpers: an independent brute-force oracle, random inputs,
//! and the randomized property checks. Each check takes a seed and returns
//! `Err(description)` on a violation.

#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::OnceLock;

use faer::Mat;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng as _;
use vbm_core::cert::{build_certificate, weights_on};
use vbm_core::digraph::{laplacian_quadform, WeightedDigraph};
use vbm_core::gen::{apply_adversary, gen_expander, gen_vbm, Label, PlantedInstance, Strategy, VbmParams};
use vbm_core::graph::{vertex_expansion, EdgeTag};
use vbm_core::rng::{self, Rng};
use vbm_core::rounding::{line_sweep, LineEmbedding};
use vbm_core::spectral::spectral_gap;
use vbm_core::{linalg, Graph};

pub fn rng_for(seed: u64, label: &str) -> Rng {
    rng::stream(seed, label)
}

/// Erdős–Rényi graph.
pub fn random_graph(n: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random spanning tree plus independent extra edges with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let v = order[k];
        edges.insert((parent.min(v), parent.max(v)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.insert((i, j));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    Graph::from_edges(n, edges).unwrap()
}

/// Minimum `φ^V` over all balanced subsets by plain bitmask enumeration over
/// an adjacency matrix; ties go to the lexicographically smallest sorted set.
pub fn oracle_balanced(g: &Graph) -> (Ratio<u64>, Vec<usize>) {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in g.edges() {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let mut best: Option<(Ratio<u64>, Vec<usize>)> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n / 2 {
            continue;
        }
        let inside = |v: usize| mask >> v & 1 == 1;
        let boundary = (0..n).filter(|&v| (0..n).any(|w| adj[v][w] && inside(w) != inside(v))).count();
        let phi = Ratio::new((n * boundary) as u64, ((n / 2) * (n / 2)) as u64);
        let set: Vec<usize> = (0..n).filter(|&v| inside(v)).collect();
        let better = match &best {
            None => true,
            Some((b, s)) => phi < *b || (phi == *b && set < *s),
        };
        if better {
            best = Some((phi, set));
        }
    }
    best.unwrap()
}

/// `Σ_{i<j} (x_i − x_j)²`.
pub fn pair_sum_sq(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            s += (x[i] - x[j]).powi(2);
        }
    }
    s
}

fn gaussian_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0) * rng.gen_range(0.0..3.0f64)).collect()
}

pub fn check_l_triangle(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "l-triangle");
    let len = rng.gen_range(2..=10);
    let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-100.0..100.0)).collect();
    let l = (len - 1) as f64;
    let lhs: f64 = x.windows(2).map(|w| (w[0] - w[1]).powi(2)).sum();
    let rhs = (x[0] - x[len - 1]).powi(2) / l;
    if lhs + 1e-9 * rhs.abs().max(1.0) >= rhs {
        Ok(())
    } else {
        Err(format!("{x:?}: {lhs} < {rhs}"))
    }
}

struct ExpanderFixture {
    g: Graph,
    gap: f64,
    d: usize,
    r: f64,
}

fn expanders() -> &'static Vec<ExpanderFixture> {
    static CELL: OnceLock<Vec<ExpanderFixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        [(30, 4), (40, 6), (60, 8), (51, 6)]
            .iter()
            .enumerate()
            .map(|(k, &(m, d))| {
                let g = gen_expander(m, d, 0.1, 2.0, 900 + k as u64).unwrap();
                let d_min = g.min_degree();
                ExpanderFixture { gap: spectral_gap(&g), d: d_min, r: g.max_degree() as f64 / d_min as f64, g }
            })
            .collect()
    })
}

/// Edge sum against `(1/r²)(λd/n)` times the sum over unordered pairs.
pub fn check_expansion_property(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "expansion-property");
    let fx = &expanders()[rng.gen_range(0..expanders().len())];
    let n = fx.g.n();
    let x = gaussian_vec(n, &mut rng);
    let lhs: f64 = fx.g.edges().iter().map(|&(i, j)| (x[i] - x[j]).powi(2)).sum();
    let rhs = fx.gap * fx.d as f64 / (fx.r * fx.r * n as f64) * pair_sum_sq(&x);
    if lhs >= rhs * (1.0 - 1e-9) {
        Ok(())
    } else {
        Err(format!("n={n}: edge sum {lhs} < {rhs}"))
    }
}

/// Both the general and the bipartite forms.
pub fn check_min_max_degree(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "min-max-degree");
    let n = rng.gen_range(4..=30);
    let bipartite = rng.gen_bool(0.5);
    let split = n / 2;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let allowed = !bipartite || (i < split) != (j < split);
            if allowed && rng.gen_bool(0.3) {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::from_edges(n, edges).unwrap();
    let vs: Vec<usize> = if bipartite { (0..split).collect() } else { (0..n).collect() };
    if g.num_edges() == 0 || vs.iter().any(|&v| g.degree(v) == 0) {
        return Ok(());
    }
    let f = |i: usize, j: usize| {
        let (a, b) = (i.min(j), i.max(j));
        let h = rng::mix64(seed ^ rng::mix64((a * 1000 + b) as u64));
        (h % 10_000) as f64 / 100.0
    };
    let lhs =
        vs.iter().map(|&i| g.neighbors(i).iter().map(|&j| f(i, j)).fold(0.0, f64::max)).sum::<f64>() / vs.len() as f64;
    let mean_edge = g.edges().iter().map(|&(i, j)| f(i, j)).sum::<f64>() / g.num_edges() as f64;
    let dmin = vs.iter().map(|&v| g.degree(v)).min().unwrap() as f64;
    let dmax = vs.iter().map(|&v| g.degree(v)).max().unwrap() as f64;
    let rhs = dmin / dmax * mean_edge;
    if lhs >= rhs * (1.0 - 1e-12) {
        Ok(())
    } else {
        Err(format!("n={n} bipartite={bipartite}: {lhs} < {rhs}"))
    }
}

/// Points on a scaled hypercube, whose squared distances are normalized
/// Hamming distances and so satisfy the ℓ₂² triangle inequality.
pub fn check_setdistance(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "setdistance");
    let n = rng.gen_range(3..=25);
    let k = rng.gen_range(1..=12);
    let pts: Vec<Vec<f64>> =
        (0..n).map(|_| (0..k).map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 }).collect()).collect();
    let d = |a: usize, b: usize| pts[a].iter().zip(&pts[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    let lsize = rng.gen_range(1..=n);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    let l = &all[..lsize];
    let dl = |i: usize| l.iter().map(|&m| d(i, m)).fold(f64::INFINITY, f64::min);
    for i in 0..n {
        for j in 0..n {
            if (dl(i) - dl(j)).abs() > d(i, j) + 1e-12 {
                return Err(format!("|d({i},L) − d({j},L)| > d({i},{j})"));
            }
        }
    }
    Ok(())
}

fn random_orthogonal(n: usize, rng: &mut Rng) -> Mat<f64> {
    let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let sym = Mat::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)]);
    linalg::sym_eigen(&sym).unwrap().vectors
}

/// `M ⪰ 0` with rank `n−1` iff `M + l·vvᵀ ≻ 0`, on 6×6 matrices with kernel
/// vector `v` and a random spectrum that is positive, indefinite, or has a
/// second zero.
pub fn check_matrix_trick(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "matrix-trick");
    let n = 6;
    let q = random_orthogonal(n, &mut rng);
    let kind = rng.gen_range(0..3);
    let mut spec: Vec<f64> = (1..n).map(|_| rng.gen_range(0.1..5.0)).collect();
    match kind {
        1 => spec[rng.gen_range(0..n - 1)] = -rng.gen_range(0.1..5.0),
        2 => spec[rng.gen_range(0..n - 1)] = 0.0,
        _ => {}
    }
    let mut lam = vec![0.0];
    lam.extend(&spec);
    let m = Mat::from_fn(n, n, |i, j| (0..n).map(|k| q[(i, k)] * lam[k] * q[(j, k)]).sum::<f64>());
    let v: Vec<f64> = (0..n).map(|i| q[(i, 0)]).collect();
    let psd_rank = kind == 0;
    for l in [0.01, 1.0, 100.0] {
        let shifted = Mat::from_fn(n, n, |i, j| m[(i, j)] + l * v[i] * v[j]);
        let lo = linalg::sym_eigenvalues(&shifted).unwrap()[0];
        let pd = lo > 1e-9;
        if pd != psd_rank {
            return Err(format!("spectrum {lam:?}, l={l}: min eig {lo}"));
        }
    }
    Ok(())
}

fn small_vbm(seed: u64, adversary: Vec<Strategy>) -> PlantedInstance {
    gen_vbm(&VbmParams {
        n: 80,
        eps1: 0.05,
        eps2: 0.05,
        p1: 0.5,
        p2: 0.5,
        c: 2,
        r: 2.0,
        lambda1: 0.1,
        lambda2: 0.1,
        expander_degree: 6,
        adversary,
        seed,
    })
    .unwrap()
}

/// Adding adversary edges leaves `Y` on base edges and the dual objective
/// unchanged.
pub fn check_monotone_nullity(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "nullity");
    let base = small_vbm(seed, Vec::new());
    let strategy = match rng.gen_range(0..3) {
        0 => Strategy::RandomWithinSides { q: rng.gen_range(0.01..0.3) },
        1 => Strategy::CliqueTTprime,
        _ => Strategy::DegreeBalancer { target: rng.gen_range(5..20) },
    };
    let adv = apply_adversary(&base, &strategy, seed).map_err(|e| e.to_string())?;
    let c0 = build_certificate(&base).map_err(|e| e.to_string())?;
    let c1 = build_certificate(&adv).map_err(|e| e.to_string())?;
    let base_edges: HashSet<(usize, usize)> =
        adv.graph.tagged_edges().filter(|e| e.2 == EdgeTag::Base).map(|(i, j, _)| (i, j)).collect();
    if weights_on(&c0.y, &base_edges) != weights_on(&c1.y, &base_edges) {
        return Err(format!("{strategy}: Y changed on base edges"));
    }
    let on_adv = adv.adversary_edges.iter().any(|&(i, j)| {
        use num_traits::Zero;
        !c1.y.get(i, j).is_zero() || !c1.y.get(j, i).is_zero()
    });
    if on_adv {
        return Err(format!("{strategy}: weight on an adversary edge"));
    }
    if c0.dual_objective() != c1.dual_objective() {
        return Err(format!("{strategy}: objective {} vs {}", c0.dual_objective(), c1.dual_objective()));
    }
    Ok(())
}

struct DenseFixture {
    inst: PlantedInstance,
    y: WeightedDigraph,
    c_prime: f64,
}

fn dense_instances() -> &'static Vec<DenseFixture> {
    static CELL: OnceLock<Vec<DenseFixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        (0..3)
            .map(|seed| {
                let inst = gen_vbm(&VbmParams {
                    n: 100,
                    eps1: 0.05,
                    eps2: 0.05,
                    p1: 1.0,
                    p2: 1.0,
                    c: 1,
                    r: 2.0,
                    lambda1: 0.3,
                    lambda2: 0.3,
                    expander_degree: 8,
                    adversary: vec![Strategy::RandomWithinSides { q: 0.05 }],
                    seed,
                })
                .unwrap();
                let cert = build_certificate(&inst).unwrap();
                DenseFixture { c_prime: cert.c_prime.to_f64().unwrap(), y: cert.y, inst }
            })
            .collect()
    })
}

/// `Xᵀ L(Y) X ≥ (c′/n)·(Σ_{S\T × T} + Σ_{S′\T′ × T′}) (X_i − X_t)²` for the
/// built certificate on dense instances (`p = 1`, `c = 1`).
pub fn check_condition_c(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "condition-c");
    let fx = &dense_instances()[rng.gen_range(0..dense_instances().len())];
    let n = fx.inst.n();
    let labels = fx.inst.labels();
    let mut x = gaussian_vec(n, &mut rng);
    if rng.gen_bool(0.5) {
        // concentrate mass on one boundary vertex, the hardest direction
        let t = fx.inst.t[rng.gen_range(0..fx.inst.t.len())];
        x[t] += rng.gen_range(1.0..20.0);
    }
    let lhs = laplacian_quadform(&fx.y, &x).unwrap();
    let mut q = 0.0;
    for i in 0..n {
        for t in 0..n {
            let pair = (labels[i] == Label::Inner && labels[t] == Label::Boundary)
                || (labels[i] == Label::InnerP && labels[t] == Label::BoundaryP);
            if pair {
                q += (x[i] - x[t]).powi(2);
            }
        }
    }
    let rhs = fx.c_prime / n as f64 * q;
    if lhs >= rhs - 1e-9 * rhs.max(1.0) {
        Ok(())
    } else {
        Err(format!("seed {}: {lhs} < {rhs}", fx.inst.seed))
    }
}

/// Random embedding on a random connected graph with `n = 50`:
/// `φ^V(line_sweep) ≤ 2δ₀`.
pub fn check_line_sweep(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "line-sweep");
    let g = random_connected_graph(50, rng.gen_range(0.0..0.2), &mut rng);
    let y: Vec<f64> = match rng.gen_range(0..3) {
        0 => (0..50).map(|_| rng.gen_range(0.0..1.0)).collect(),
        1 => (0..50).map(|_| rng.gen_range(0..4) as f64).collect(),
        _ => (0..50).map(|_| rng.gen_range(0.0f64..1.0).powi(4)).collect(),
    };
    if y.iter().all(|&v| v == y[0]) {
        return Ok(());
    }
    let res = line_sweep(&g, &LineEmbedding { y, provenance: "random".into() }).map_err(|e| e.to_string())?;
    if res.cut.phi_f64() <= 2.0 * res.delta0 + 1e-12 {
        Ok(())
    } else {
        Err(format!("phi {} > 2·δ₀ = {}", res.cut.phi_f64(), 2.0 * res.delta0))
    }
}

/// `φ^V(S) = φ^V(V\S)` and agreement with a direct count.
pub fn check_expansion_symmetry(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed, "symmetry");
    let n = rng.gen_range(2..=20);
    let g = random_graph(n, rng.gen_range(0.0..0.6), &mut rng);
    let k = rng.gen_range(1..n);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    let s: Vec<usize> = all[..k].to_vec();
    let rest: Vec<usize> = all[k..].to_vec();
    let a = vertex_expansion(&g, &s).unwrap();
    let b = vertex_expansion(&g, &rest).unwrap();
    let inside: Vec<bool> = (0..n).map(|v| s.contains(&v)).collect();
    let direct = (0..n).filter(|&v| g.neighbors(v).iter().any(|&w| inside[w] != inside[v])).count();
    if a.phi != b.phi || a.boundary != direct {
        return Err(format!("n={n}: {} vs {} (direct boundary {direct})", a.phi, b.phi));
    }
    Ok(())
}

/// The randomized suites, by name.
pub const PROPERTY_CHECKS: [(&str, fn(u64) -> Result<(), String>); 9] = [
    ("l-triangle inequality", check_l_triangle),
    ("expansion property", check_expansion_property),
    ("min-max degree", check_min_max_degree),
    ("set distance", check_setdistance),
    ("matrix trick", check_matrix_trick),
    ("monotone nullity", check_monotone_nullity),
    ("condition (c)", check_condition_c),
    ("line sweep bound", check_line_sweep),
    ("expansion symmetry", check_expansion_symmetry),
];
