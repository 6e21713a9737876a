use serde::{Deserialize, Serialize};

use super::adversary::balance_degrees;
use super::bipartite::add_bipartite;
use super::expander::{gen_expander_with, DEFAULT_MAX_ATTEMPTS};
use super::{boundary_size, minus, random_split, ModelParams, PlantedInstance};
use crate::error::{Error, Result};
use crate::graph::{EdgeTag, GraphBuilder};
use crate::rng;

fn default_degree() -> usize {
    6
}

/// Family where spectral edge partitioning is fooled: each side splits into
/// halves that are internally dense and joined only sparsely, while the
/// planted bisection has a small vertex boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HnParams {
    pub n: usize,
    pub eps: f64,
    /// Target degree is `round(alpha·n)`.
    pub alpha: f64,
    #[serde(default = "default_degree")]
    pub expander_degree: usize,
    pub seed: u64,
    /// `A₁ ∪ B₁ ∪ T₁ ∪ T′₁`, filled in by the generator.
    #[serde(default)]
    pub first_half: Vec<usize>,
}

pub fn gen_hn(params: &HnParams) -> Result<PlantedInstance> {
    let n = params.n;
    if n < 8 || n % 4 != 0 {
        return Err(Error::InvalidParams(format!("n={n} must be a multiple of 4, at least 8")));
    }
    let floor = 0.5 * (n as f64).powf(-1.0 / 3.0);
    if params.eps < floor || params.eps >= 0.5 {
        return Err(Error::InvalidParams(format!("eps={} outside [n^(-1/3)/2, 1/2) = [{floor:.4}, 0.5)", params.eps)));
    }
    if !(params.alpha > 0.0 && params.alpha < 0.5) {
        return Err(Error::InvalidParams(format!("alpha={} outside (0, 1/2)", params.alpha)));
    }
    let seed = params.seed;
    let k = boundary_size(params.eps, n);
    let (s, t, sp, tp) = random_split(n, k, k, &mut rng::stream(seed, "split"));
    let inner = minus(&s, &t);
    let inner_p = minus(&sp, &tp);
    let halves = |v: &[usize]| (v[..v.len() / 2].to_vec(), v[v.len() / 2..].to_vec());
    let (a1, a2) = halves(&inner);
    let (b1, b2) = halves(&inner_p);
    let (t1, t2) = halves(&t);
    let (tp1, tp2) = halves(&tp);

    let mut b = GraphBuilder::new(n);
    let mut gaps = [0.0; 2];
    let mut ranges = [(0, 0); 2];
    for (idx, (verts, name)) in [(&inner, "S"), (&inner_p, "S'")].into_iter().enumerate() {
        let out = gen_expander_with(
            verts.len(),
            params.expander_degree,
            0.0,
            2.0,
            rng::child_seed(seed, &format!("expander-{name}")),
            DEFAULT_MAX_ATTEMPTS,
            name,
        )?;
        for &(i, j) in out.graph.edges() {
            b.add(verts[i], verts[j], EdgeTag::Base);
        }
        gaps[idx] = out.gap;
        ranges[idx] = (out.d_min, out.d_max);
    }
    let p = (n as f64).ln() / n as f64;
    add_bipartite(&mut b, &inner, &t, p, rng::child_seed(seed, "bipartite-S"), EdgeTag::Base);
    add_bipartite(&mut b, &inner_p, &tp, p, rng::child_seed(seed, "bipartite-S'"), EdgeTag::Base);
    let mut f = Vec::new();
    for (x, y) in [(&t1, &tp1), (&t2, &tp2)] {
        for &i in x.iter() {
            for &j in y.iter() {
                b.add(i, j, EdgeTag::Base);
                f.push((i, j));
            }
        }
    }
    f.sort_unstable();

    // allowed balancing partners: A_i–A_i, B_i–B_i, A_i–T_i, B_i–T′_i
    let mut partners = vec![Vec::new(); n];
    let groups = [(&a1, &t1), (&a2, &t2), (&b1, &tp1), (&b2, &tp2)];
    for (core, bd) in groups {
        let both: Vec<usize> = core.iter().chain(bd.iter()).copied().collect();
        for &v in core.iter() {
            partners[v] = both.clone();
        }
        for &v in bd.iter() {
            partners[v] = core.clone();
        }
    }
    let mut deg = vec![0usize; n];
    for &(i, j) in b.clone().build().edges() {
        deg[i] += 1;
        deg[j] += 1;
    }
    let target = (params.alpha * n as f64).round() as usize;
    let all: Vec<usize> = (0..n).collect();
    let slack = (n as f64).powf(0.9).floor() as usize;
    let adversary_edges = balance_degrees(&mut b, &mut deg, target, slack, &partners, &all, EdgeTag::Adversary)?;

    let mut first_half: Vec<usize> = a1.iter().chain(&b1).chain(&t1).chain(&tp1).copied().collect();
    first_half.sort_unstable();
    let mut stored = params.clone();
    stored.first_half = first_half;
    Ok(PlantedInstance {
        graph: b.build(),
        s,
        t,
        sp,
        tp,
        f,
        params: ModelParams::Hn(stored),
        adversary_edges,
        measured_gaps: gaps,
        expander_degree_range: ranges,
        seed,
        warnings: Vec::new(),
    })
}
