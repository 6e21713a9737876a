use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::{EdgeTag, Graph, GraphBuilder};
use crate::rng;
use crate::spectral::spectral_gap;

pub const DEFAULT_MAX_ATTEMPTS: usize = 50;

/// An accepted expander draw with its measured statistics.
#[derive(Clone, Debug)]
pub struct ExpanderOutcome {
    pub graph: Graph,
    pub gap: f64,
    pub d_min: usize,
    pub d_max: usize,
    pub attempts: usize,
}

/// Near-`d`-regular expander on `m` vertices: the union of `⌊d/2⌋` random
/// Hamiltonian cycles (plus one random perfect matching when `d` is odd),
/// with repeated edges merged. Draws are rejected until the degree ratio is
/// at most `r` and the normalized spectral gap is at least `lambda_target`
/// (or the graph is connected, when the target is 0).
pub fn gen_expander(m: usize, d: usize, lambda_target: f64, r: f64, seed: u64) -> Result<Graph> {
    gen_expander_with(m, d, lambda_target, r, seed, DEFAULT_MAX_ATTEMPTS, "expander").map(|o| o.graph)
}

pub(crate) fn gen_expander_with(
    m: usize,
    d: usize,
    lambda_target: f64,
    r: f64,
    seed: u64,
    max_attempts: usize,
    side: &str,
) -> Result<ExpanderOutcome> {
    if d < 3 {
        return Err(Error::InvalidParams(format!("expander degree {d} < 3")));
    }
    if (d * m) % 2 != 0 {
        return Err(Error::InvalidParams(format!("d·m = {d}·{m} is odd")));
    }
    if m <= d {
        return Err(Error::InvalidParams(format!("expander needs m > d (m={m}, d={d})")));
    }
    if r < 1.0 {
        return Err(Error::InvalidParams(format!("degree ratio bound r={r} < 1")));
    }
    let mut rng = rng::stream(seed, "expander");
    let mut best_gap = 0.0f64;
    for attempt in 1..=max_attempts {
        let mut b = GraphBuilder::new(m);
        let mut perm: Vec<usize> = (0..m).collect();
        for _ in 0..d / 2 {
            perm.shuffle(&mut rng);
            for k in 0..m {
                b.add(perm[k], perm[(k + 1) % m], EdgeTag::Base);
            }
        }
        if d % 2 == 1 {
            perm.shuffle(&mut rng);
            for pair in perm.chunks_exact(2) {
                b.add(pair[0], pair[1], EdgeTag::Base);
            }
        }
        let g = b.build();
        let (d_min, d_max) = (g.min_degree(), g.max_degree());
        if d_min == 0 || d_max as f64 > r * d_min as f64 {
            continue;
        }
        let gap = spectral_gap(&g);
        best_gap = best_gap.max(gap);
        let ok = if lambda_target > 0.0 { gap >= lambda_target } else { gap > 1e-9 };
        if ok {
            return Ok(ExpanderOutcome { graph: g, gap, d_min, d_max, attempts: attempt });
        }
    }
    Err(Error::ExpanderTarget { side: side.to_string(), best_gap, target: lambda_target, attempts: max_attempts })
}
