use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{membership, EdgeTag, Graph, GraphBuilder};
use crate::rng;
use crate::spectral::spectral_gap;

/// Lower bound `1/(2·12²)` on the spectral gap of the random bipartite
/// building block.
pub const GAP_CONSTANT: f64 = 1.0 / 288.0;

/// Random bipartite graph: each pair in `L × R` is present independently
/// with probability `p`. The vertex count is one more than the largest id.
pub fn gen_bipartite_random(l: &[usize], r: &[usize], p: f64, seed: u64) -> Result<Graph> {
    let n = l.iter().chain(r).max().map_or(0, |m| m + 1);
    let in_l = membership(n, l)?;
    if r.iter().any(|&v| in_l[v]) {
        return Err(Error::InvalidParams("L and R must be disjoint".into()));
    }
    membership(n, r)?;
    let mut b = GraphBuilder::new(n);
    add_bipartite(&mut b, l, r, p, seed, EdgeTag::Base);
    Ok(b.build())
}

/// Adds each `L × R` pair with probability `p`; returns the edges added.
pub(crate) fn add_bipartite(
    b: &mut GraphBuilder,
    l: &[usize],
    r: &[usize],
    p: f64,
    seed: u64,
    tag: EdgeTag,
) -> Vec<(usize, usize)> {
    let mut added = Vec::new();
    if p <= 0.0 {
        return added;
    }
    let mut rng = rng::stream(seed, "bipartite");
    for &i in l {
        for &j in r {
            if (p >= 1.0 || rng.gen::<f64>() < p) && b.add(i, j, tag) {
                added.push((i, j));
            }
        }
    }
    added
}

/// Degree and spectral statistics of a bipartite graph on `L ∪ R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BipartiteReport {
    pub min_degree_l: usize,
    pub max_degree_l: usize,
    pub min_degree_r: usize,
    pub max_degree_r: usize,
    /// `Δ_max(L) / Δ_min(L)`; infinite when some `L` vertex is isolated.
    pub degree_ratio_l: f64,
    pub spectral_gap: f64,
    pub ratio_ok: bool,
    pub gap_ok: bool,
}

/// Degree ratio on `L` (bounded by 3) and spectral gap (bounded below by
/// [`GAP_CONSTANT`]) of the subgraph induced on `L ∪ R`.
pub fn verify_bipartite_properties(g: &Graph, l: &[usize], r: &[usize]) -> Result<BipartiteReport> {
    let in_l = membership(g.n(), l)?;
    let in_r = membership(g.n(), r)?;
    let mut local = vec![usize::MAX; g.n()];
    for (k, &v) in l.iter().chain(r).enumerate() {
        local[v] = k;
    }
    let mut sub = GraphBuilder::new(l.len() + r.len());
    for &(i, j) in g.edges() {
        let cross = (in_l[i] && in_r[j]) || (in_r[i] && in_l[j]);
        if cross {
            sub.add(local[i], local[j], EdgeTag::Base);
        }
    }
    let sub = sub.build();
    let deg = |v: usize| sub.degree(local[v]);
    let (min_l, max_l) = min_max(l.iter().map(|&v| deg(v)));
    let (min_r, max_r) = min_max(r.iter().map(|&v| deg(v)));
    let ratio = if min_l == 0 { f64::INFINITY } else { max_l as f64 / min_l as f64 };
    let gap = spectral_gap(&sub);
    Ok(BipartiteReport {
        min_degree_l: min_l,
        max_degree_l: max_l,
        min_degree_r: min_r,
        max_degree_r: max_r,
        degree_ratio_l: ratio,
        spectral_gap: gap,
        ratio_ok: ratio <= 3.0,
        gap_ok: gap >= GAP_CONSTANT,
    })
}

fn min_max(it: impl Iterator<Item = usize>) -> (usize, usize) {
    it.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)))
}
