use serde::{Deserialize, Serialize};

use super::adversary::{add_adversary_edges, Strategy};
use super::expander::{gen_expander_with, DEFAULT_MAX_ATTEMPTS};
use super::{boundary_size, random_split, ModelParams, PlantedInstance, DEFAULT_EXPANDER_DEGREE};
use crate::error::{Error, Result};
use crate::graph::{EdgeTag, GraphBuilder};
use crate::rng;

/// How the `T × T′` crossing edges are placed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossing {
    /// `t_k — t′_k` for each `k`.
    Matching,
    /// All of `T × T′`.
    Complete,
}

fn default_degree() -> usize {
    DEFAULT_EXPANDER_DEGREE
}

fn default_r() -> f64 {
    2.0
}

/// Planted model with an expander on each whole side and `εn` boundary
/// vertices per side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Lr14Params {
    pub n: usize,
    pub eps: f64,
    pub lambda: f64,
    #[serde(default = "default_degree")]
    pub expander_degree: usize,
    #[serde(default = "default_r")]
    pub r: f64,
    pub crossing: Crossing,
    #[serde(default)]
    pub adversary: Vec<Strategy>,
    pub seed: u64,
}

pub fn gen_lr14(params: &Lr14Params) -> Result<PlantedInstance> {
    let n = params.n;
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidParams(format!("n={n} must be even and at least 4")));
    }
    if params.eps * (n as f64) < 1.0 - 1e-9 || params.eps >= 0.5 {
        return Err(Error::InvalidParams(format!("eps={} outside [1/n, 1/2)", params.eps)));
    }
    let seed = params.seed;
    let k = boundary_size(params.eps, n);
    let (s, t, sp, tp) = random_split(n, k, k, &mut rng::stream(seed, "split"));
    let mut b = GraphBuilder::new(n);
    let mut gaps = [0.0; 2];
    let mut ranges = [(0, 0); 2];
    for (idx, (side, name)) in [(&s, "S"), (&sp, "S'")].into_iter().enumerate() {
        let out = gen_expander_with(
            side.len(),
            params.expander_degree,
            params.lambda,
            params.r,
            rng::child_seed(seed, &format!("expander-{name}")),
            DEFAULT_MAX_ATTEMPTS,
            name,
        )?;
        for &(i, j) in out.graph.edges() {
            b.add(side[i], side[j], EdgeTag::Base);
        }
        gaps[idx] = out.gap;
        ranges[idx] = (out.d_min, out.d_max);
    }
    let mut f = Vec::new();
    match params.crossing {
        Crossing::Matching => f.extend(t.iter().copied().zip(tp.iter().copied())),
        Crossing::Complete => {
            for &a in &t {
                f.extend(tp.iter().map(|&c| (a, c)));
            }
        }
    }
    for &(i, j) in &f {
        b.add(i, j, EdgeTag::Base);
    }
    let mut inst = PlantedInstance {
        graph: GraphBuilder::new(n).build(),
        s,
        t,
        sp,
        tp,
        f,
        params: ModelParams::Lr14(params.clone()),
        adversary_edges: Vec::new(),
        measured_gaps: gaps,
        expander_degree_range: ranges,
        seed,
        warnings: Vec::new(),
    };
    for (idx, strategy) in params.adversary.iter().enumerate() {
        let sub = rng::child_seed(seed, &format!("adversary-{idx}"));
        let added = add_adversary_edges(&mut b, &inst, strategy, sub)?;
        inst.adversary_edges.extend(added);
    }
    inst.graph = b.build();
    Ok(inst)
}
