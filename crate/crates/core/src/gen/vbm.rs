use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adversary::{add_adversary_edges, Strategy};
use super::bipartite::add_bipartite;
use super::expander::{gen_expander_with, DEFAULT_MAX_ATTEMPTS};
use super::{boundary_size, minus, random_split, ModelParams, PlantedInstance};
use crate::error::{Error, Result};
use crate::graph::{EdgeTag, GraphBuilder};
use crate::rng;

pub const DEFAULT_EXPANDER_DEGREE: usize = 8;

fn default_expander_degree() -> usize {
    DEFAULT_EXPANDER_DEGREE
}

/// Block-model parameters. Any of `p1, p2, c, lambda1, lambda2` may be zero
/// to switch the corresponding ingredient off; `lambda_k = 0` places no
/// expander on that side's interior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VbmParams {
    pub n: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub p1: f64,
    pub p2: f64,
    /// Maximum `F`-degree.
    pub c: usize,
    /// Bound on the expander degree ratio `d_max/d_min`.
    pub r: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default = "default_expander_degree")]
    pub expander_degree: usize,
    #[serde(default)]
    pub adversary: Vec<Strategy>,
    pub seed: u64,
}

impl VbmParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n < 4 || self.n % 2 != 0 {
            return bad(format!("n={} must be even and at least 4", self.n));
        }
        for (name, e) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if e != 0.0 && !(e * self.n as f64 >= 1.0 - 1e-9 && e < 0.5) {
                return bad(format!("{name}={e} outside [1/n, 1/2)"));
            }
        }
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name}={p} is not a probability"));
            }
        }
        for (name, l) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(0.0..=2.0).contains(&l) {
                return bad(format!("{name}={l} outside [0, 2]"));
            }
        }
        if (self.lambda1 > 0.0 || self.lambda2 > 0.0) && self.r < 1.0 {
            return bad(format!("r={} must be at least 1 when an expander is requested", self.r));
        }
        Ok(())
    }
}

/// Samples a block-model instance. Deterministic in `params.seed`.
pub fn gen_vbm(params: &VbmParams) -> Result<PlantedInstance> {
    params.validate()?;
    let n = params.n;
    let seed = params.seed;
    let t_size = boundary_size(params.eps1, n);
    let tp_size = boundary_size(params.eps2, n);
    let (s, t, sp, tp) = random_split(n, t_size, tp_size, &mut rng::stream(seed, "split"));
    let inner = minus(&s, &t);
    let inner_p = minus(&sp, &tp);

    let mut b = GraphBuilder::new(n);
    let mut gaps = [0.0; 2];
    let mut ranges = [(0, 0); 2];
    let sides = [(&inner, params.lambda1, "S", "expander-S"), (&inner_p, params.lambda2, "S'", "expander-S'")];
    for (k, (verts, lambda, side, label)) in sides.into_iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let out = gen_expander_with(
            verts.len(),
            params.expander_degree,
            lambda,
            params.r,
            rng::child_seed(seed, label),
            DEFAULT_MAX_ATTEMPTS,
            side,
        )?;
        for &(i, j) in out.graph.edges() {
            b.add(verts[i], verts[j], EdgeTag::Base);
        }
        gaps[k] = out.gap;
        ranges[k] = (out.d_min, out.d_max);
    }

    add_bipartite(&mut b, &inner, &t, params.p1, rng::child_seed(seed, "bipartite-S"), EdgeTag::Base);
    add_bipartite(&mut b, &inner_p, &tp, params.p2, rng::child_seed(seed, "bipartite-S'"), EdgeTag::Base);

    let f = sample_f(&t, &tp, params.c, rng::child_seed(seed, "F"))?;
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
        params: ModelParams::Vbm(params.clone()),
        adversary_edges: Vec::new(),
        measured_gaps: gaps,
        expander_degree_range: ranges,
        seed,
        warnings: Vec::new(),
    };
    for (k, strategy) in params.adversary.iter().enumerate() {
        let sub = rng::child_seed(seed, &format!("adversary-{k}"));
        let added = add_adversary_edges(&mut b, &inst, strategy, sub)?;
        inst.adversary_edges.extend(added);
    }
    inst.graph = b.build();
    let isolated = inst.graph.isolated_vertices();
    if !isolated.is_empty() {
        inst.warnings.push(format!("{} isolated vertices (first: {})", isolated.len(), isolated[0]));
    }
    Ok(inst)
}

/// `F` on `T × T′`: `c` rounds of random partial matchings (each round
/// matches a random subset of the larger side against the whole smaller
/// side), merged, then a repair pass giving every still-uncovered vertex one
/// partner of degree below `c`. All degrees end in `[1, c]`.
pub(crate) fn sample_f(t: &[usize], tp: &[usize], c: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if c == 0 || t.is_empty() || tp.is_empty() {
        return Ok(Vec::new());
    }
    let (small, large, swapped) = if t.len() <= tp.len() { (t, tp, false) } else { (tp, t, true) };
    if small.len() * c < large.len() {
        return Err(Error::InvalidParams(format!(
            "F cannot cover {} vertices with {} partners of degree ≤ {c}",
            large.len(),
            small.len()
        )));
    }
    let mut rng = rng::stream(seed, "F");
    let mut edges = std::collections::BTreeSet::new();
    let mut a: Vec<usize> = (0..small.len()).collect();
    let mut bb: Vec<usize> = (0..large.len()).collect();
    for _ in 0..c {
        a.shuffle(&mut rng);
        bb.shuffle(&mut rng);
        for (&x, &y) in a.iter().zip(&bb) {
            edges.insert((x, y));
        }
    }
    let mut deg_small = vec![0usize; small.len()];
    let mut deg_large = vec![0usize; large.len()];
    for &(x, y) in &edges {
        deg_small[x] += 1;
        deg_large[y] += 1;
    }
    for y in 0..large.len() {
        if deg_large[y] == 0 {
            let x = (0..small.len())
                .filter(|&x| deg_small[x] < c)
                .min_by_key(|&x| (deg_small[x], x))
                .expect("capacity checked above");
            edges.insert((x, y));
            deg_small[x] += 1;
            deg_large[y] += 1;
        }
    }
    let mut out: Vec<(usize, usize)> =
        edges.into_iter().map(|(x, y)| if swapped { (large[y], small[x]) } else { (small[x], large[y]) }).collect();
    out.sort_unstable();
    Ok(out)
}
