use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Label, PlantedInstance};
use crate::error::{Error, Result};
use crate::graph::{EdgeTag, GraphBuilder};
use crate::rng;

/// Monotone adversary: adds edges only inside `S`, inside `S′`, or across
/// `T × T′`, so the planted boundary `T ∪ T′` never changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Strategy {
    #[serde(rename = "none")]
    None,
    /// Each absent same-side pair is added with probability `q`.
    #[serde(rename = "random-within-sides")]
    RandomWithinSides { q: f64 },
    /// Every `T × T′` pair.
    #[serde(rename = "clique-TTprime")]
    CliqueTTprime,
    /// Greedily raises every vertex to degree `target` using same-side edges.
    #[serde(rename = "degree-balancer")]
    DegreeBalancer { target: usize },
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::None => write!(f, "none"),
            Strategy::RandomWithinSides { q } => write!(f, "random-within-sides({q})"),
            Strategy::CliqueTTprime => write!(f, "clique-TTprime"),
            Strategy::DegreeBalancer { target } => write!(f, "degree-balancer({target})"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Parses `none`, `random-within-sides(q)`, `clique-TTprime`, `degree-balancer(k)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.find('(') {
            Some(k) if s.ends_with(')') => (&s[..k], Some(&s[k + 1..s.len() - 1])),
            _ => (s, None),
        };
        let bad = || Error::UnknownStrategy(s.to_string());
        match (name, arg) {
            ("none", None) => Ok(Strategy::None),
            ("clique-TTprime", None) => Ok(Strategy::CliqueTTprime),
            ("random-within-sides", Some(a)) => {
                let q: f64 = a.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&q) {
                    return Err(bad());
                }
                Ok(Strategy::RandomWithinSides { q })
            }
            ("degree-balancer", Some(a)) => {
                Ok(Strategy::DegreeBalancer { target: a.trim().parse().map_err(|_| bad())? })
            }
            _ => Err(bad()),
        }
    }
}

/// Applies one strategy and returns the updated instance; the new edges are
/// tagged [`EdgeTag::Adversary`] and appended to `adversary_edges`.
pub fn apply_adversary(inst: &PlantedInstance, strategy: &Strategy, seed: u64) -> Result<PlantedInstance> {
    let mut b = GraphBuilder::from_graph(&inst.graph);
    let added = add_adversary_edges(&mut b, inst, strategy, seed)?;
    let mut out = inst.clone();
    out.graph = b.build();
    out.adversary_edges.extend(added);
    Ok(out)
}

pub(crate) fn add_adversary_edges(
    b: &mut GraphBuilder,
    inst: &PlantedInstance,
    strategy: &Strategy,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    let mut added = Vec::new();
    match strategy {
        Strategy::None => {}
        Strategy::RandomWithinSides { q } => {
            let mut rng = rng::stream(seed, "random-within-sides");
            for side in [&inst.s, &inst.sp] {
                for (k, &i) in side.iter().enumerate() {
                    for &j in &side[k + 1..] {
                        if !b.contains(i, j) && rng.gen::<f64>() < *q {
                            b.add(i, j, EdgeTag::Adversary);
                            added.push((i, j));
                        }
                    }
                }
            }
        }
        Strategy::CliqueTTprime => {
            for &t in &inst.t {
                for &tp in &inst.tp {
                    if b.add(t, tp, EdgeTag::Adversary) {
                        added.push((t, tp));
                    }
                }
            }
        }
        Strategy::DegreeBalancer { target } => {
            let labels = inst.labels();
            let n = inst.n();
            let mut deg = vec![0usize; n];
            for &(i, j) in b.clone().build().edges() {
                deg[i] += 1;
                deg[j] += 1;
            }
            let partners: Vec<Vec<usize>> =
                (0..n).map(|v| if labels[v].in_s() { inst.s.clone() } else { inst.sp.clone() }).collect();
            let all: Vec<usize> = (0..n).collect();
            added = balance_degrees(b, &mut deg, *target, 0, &partners, &all, EdgeTag::Adversary)?;
        }
    }
    Ok(added)
}

/// Greedy degree balancing: repeatedly take the lowest-degree vertex of
/// `vertices` still below `target` (ties by index) and join it to its
/// lowest-degree allowed non-neighbor. A vertex with no allowed partner
/// left is set aside; this fails only if it is more than `slack` below
/// `target`.
pub fn balance_degrees(
    b: &mut GraphBuilder,
    deg: &mut [usize],
    target: usize,
    slack: usize,
    partners: &[Vec<usize>],
    vertices: &[usize],
    tag: EdgeTag,
) -> Result<Vec<(usize, usize)>> {
    let mut queue: BTreeSet<(usize, usize)> =
        vertices.iter().filter(|&&v| deg[v] < target).map(|&v| (deg[v], v)).collect();
    let tracked: std::collections::HashSet<usize> = vertices.iter().copied().collect();
    let mut added = Vec::new();
    while let Some(&(d, v)) = queue.first() {
        let Some(w) = partners[v].iter().copied().filter(|&w| w != v && !b.contains(v, w)).min_by_key(|&w| (deg[w], w))
        else {
            if d + slack < target {
                return Err(Error::BalancingInfeasible { vertex: v, degree: d, target });
            }
            queue.remove(&(d, v));
            continue;
        };
        b.add(v, w, tag);
        added.push((v.min(w), v.max(w)));
        for x in [v, w] {
            queue.remove(&(deg[x], x));
            deg[x] += 1;
            if tracked.contains(&x) && deg[x] < target {
                queue.insert((deg[x], x));
            }
        }
    }
    Ok(added)
}

/// True when an edge `{i, j}` is allowed for a monotone adversary.
pub fn is_monotone(labels: &[Label], i: usize, j: usize) -> bool {
    let (a, b) = (labels[i], labels[j]);
    a.in_s() == b.in_s() || (a.is_boundary() && b.is_boundary())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["none", "random-within-sides(0.05)", "clique-TTprime", "degree-balancer(12)"] {
            let st: Strategy = s.parse().unwrap();
            assert_eq!(st.to_string(), s);
        }
        assert!("shuffle".parse::<Strategy>().is_err());
        assert!("random-within-sides(2)".parse::<Strategy>().is_err());
    }
}
