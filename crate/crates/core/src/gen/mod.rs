//! Instance generators.
//!
//! [`gen_vbm`] follows the block-model recipe: a random balanced split into
//! sides `S`, `S′` with boundary sets `T ⊆ S`, `T′ ⊆ S′`; near-regular
//! expanders on `S\T` and `S′\T′`; random bipartite edges between each
//! interior and its boundary set; a low-degree bipartite graph `F` on
//! `T × T′`; and finally a list of monotone adversary strategies.
//! [`gen_lr14`] and [`gen_hn`] build the two comparison families.

mod adversary;
mod bipartite;
mod expander;
mod hn;
mod lr14;
mod vbm;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

pub use adversary::{apply_adversary, balance_degrees, is_monotone, Strategy};
pub use bipartite::{gen_bipartite_random, verify_bipartite_properties, BipartiteReport, GAP_CONSTANT};
pub use expander::{gen_expander, ExpanderOutcome, DEFAULT_MAX_ATTEMPTS};
pub use hn::{gen_hn, HnParams};
pub use lr14::{gen_lr14, Crossing, Lr14Params};
pub use vbm::{gen_vbm, VbmParams, DEFAULT_EXPANDER_DEGREE};

/// Which side of the planted bisection a vertex sits on, and whether it is
/// a boundary vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// `S \ T`
    Inner,
    /// `T`
    Boundary,
    /// `S′ \ T′`
    InnerP,
    /// `T′`
    BoundaryP,
}

impl Label {
    pub fn in_s(self) -> bool {
        matches!(self, Label::Inner | Label::Boundary)
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, Label::Boundary | Label::BoundaryP)
    }
}

/// Parameters of whichever model produced an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Vbm(VbmParams),
    Lr14(Lr14Params),
    Hn(HnParams),
}

/// A graph with its planted bisection `(S, S′)` and boundary sets `(T, T′)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlantedInstance {
    pub graph: Graph,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub sp: Vec<usize>,
    pub tp: Vec<usize>,
    /// Base `T × T′` edges as `(t, t′)`.
    pub f: Vec<(usize, usize)>,
    pub params: ModelParams,
    pub adversary_edges: Vec<(usize, usize)>,
    /// Spectral gaps of the expanders placed on the two sides (0 when absent).
    pub measured_gaps: [f64; 2],
    /// `(d_min, d_max)` of the two expanders (`(0, 0)` when absent).
    pub expander_degree_range: [(usize, usize); 2],
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PlantedInstance {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn labels(&self) -> Vec<Label> {
        let n = self.n();
        let mut lab = vec![Label::InnerP; n];
        for &v in &self.s {
            lab[v] = Label::Inner;
        }
        for &v in &self.t {
            lab[v] = Label::Boundary;
        }
        for &v in &self.tp {
            lab[v] = Label::BoundaryP;
        }
        lab
    }

    /// `1_S − 1_{S′}`.
    pub fn sign_vector(&self) -> Vec<f64> {
        let mut s = vec![-1.0; self.n()];
        for &v in &self.s {
            s[v] = 1.0;
        }
        s
    }

    /// Boundary size of the planted cut, `|T| + |T′|` by construction.
    pub fn planted_boundary(&self) -> usize {
        self.t.len() + self.tp.len()
    }

    /// Base-graph view with adversary edges dropped.
    pub fn base_graph(&self) -> Graph {
        self.graph.filter_tag(crate::graph::EdgeTag::Base)
    }
}

/// `⌊ε n⌋` with a small guard against representation error, at least 1
/// when `ε > 0`.
pub fn boundary_size(eps: f64, n: usize) -> usize {
    if eps <= 0.0 {
        return 0;
    }
    ((eps * n as f64 + 1e-9).floor() as usize).max(1)
}

/// Helper shared by the generators: random labelling of `0..n` into
/// `(S, T, S′, T′)` with `|S| = |S′| = n/2`.
pub(crate) fn random_split(
    n: usize,
    t_size: usize,
    tp_size: usize,
    rng: &mut crate::rng::Rng,
) -> (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let half = n / 2;
    let sorted = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v
    };
    let s = sorted(&perm[..half]);
    let t = sorted(&perm[..t_size]);
    let sp = sorted(&perm[half..]);
    let tp = sorted(&perm[half..half + tp_size]);
    (s, t, sp, tp)
}

pub(crate) fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    let drop: std::collections::HashSet<usize> = b.iter().copied().collect();
    a.iter().copied().filter(|v| !drop.contains(v)).collect()
}
