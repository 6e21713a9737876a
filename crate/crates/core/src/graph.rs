//! Undirected simple graphs and vertex-expansion metrics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance of an edge: part of the random/base construction, or added by
/// a monotone adversary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTag {
    Base,
    Adversary,
}

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted lexicographically.
/// Adjacency lists are sorted, so neighbor iteration order is deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    tags: Vec<EdgeTag>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    tags: Vec<EdgeTag>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        if !f.tags.is_empty() && f.tags.len() != f.edges.len() {
            return Err(Error::InvalidGraph(format!("{} tags for {} edges", f.tags.len(), f.edges.len())));
        }
        let tags = if f.tags.is_empty() { vec![EdgeTag::Base; f.edges.len()] } else { f.tags };
        Graph::from_tagged_edges(f.n, f.edges.iter().zip(tags).map(|(e, t)| (e[0], e[1], t)))
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile { n: g.n, edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(), tags: g.tags }
    }
}

impl Graph {
    /// Builds a graph from untagged edges. Rejects self-loops, duplicates
    /// (in either orientation) and out-of-range ids.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_tagged_edges(n, edges.into_iter().map(|(i, j)| (i, j, EdgeTag::Base)))
    }

    pub fn from_tagged_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, EdgeTag)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j, tag) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range for n={n}")));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
            if map.insert((i.min(j), i.max(j)), tag).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i},{j})")));
            }
        }
        Ok(Self::from_map(n, map))
    }

    fn from_map(n: usize, map: BTreeMap<(usize, usize), EdgeTag>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(map.len());
        let mut tags = Vec::with_capacity(map.len());
        for ((i, j), tag) in map {
            adj[i].push(j);
            adj[j].push(i);
            edges.push((i, j));
            tags.push(tag);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Graph { n, edges, tags, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_map(n, BTreeMap::new())
    }

    pub fn complete(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for i in 0..n {
            for j in i + 1..n {
                b.add(i, j, EdgeTag::Base);
            }
        }
        b.build()
    }

    pub fn cycle(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for i in 0..n {
            b.add(i, (i + 1) % n, EdgeTag::Base);
        }
        b.build()
    }

    pub fn path(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for i in 1..n {
            b.add(i - 1, i, EdgeTag::Base);
        }
        b.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn tags(&self) -> &[EdgeTag] {
        &self.tags
    }

    pub fn tagged_edges(&self) -> impl Iterator<Item = (usize, usize, EdgeTag)> + '_ {
        self.edges.iter().zip(&self.tags).map(|(&(i, j), &t)| (i, j, t))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.adj[i].binary_search(&j).is_ok()
    }

    pub fn edge_tag(&self, i: usize, j: usize) -> Option<EdgeTag> {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).ok().map(|k| self.tags[k])
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.adj[i].is_empty()).collect()
    }

    /// Copy of this graph with every edge of `other` added (tags from `other`
    /// win only for edges not already present).
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        let mut b = GraphBuilder::from_graph(self);
        for (i, j, t) in other.tagged_edges() {
            b.add(i, j, t);
        }
        Ok(b.build())
    }

    /// Subgraph keeping only edges with the given tag.
    pub fn filter_tag(&self, tag: EdgeTag) -> Graph {
        let map = self.tagged_edges().filter(|e| e.2 == tag).map(|(i, j, t)| ((i, j), t)).collect();
        Self::from_map(self.n, map)
    }

    /// Edge-list text: a `# n <n>` header line (so isolated trailing vertices
    /// survive), then one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::with_capacity(12 * (self.edges.len() + 1));
        let _ = writeln!(s, "# n {}", self.n);
        for &(i, j) in &self.edges {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Parses edge-list text. Without a `# n` header the vertex count is one
    /// more than the largest id seen.
    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_id = None::<usize>;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("n") {
                    let v = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("line {}: bad header", lineno + 1)))?;
                    n = Some(v);
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `i j`", lineno + 1)))
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing tokens", lineno + 1)));
            }
            max_id = Some(max_id.map_or(i.max(j), |m| m.max(i).max(j)));
            edges.push((i, j));
        }
        let n = n.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
        Graph::from_edges(n, edges)
    }
}

/// Incremental edge-set builder that silently skips self-loops and duplicates.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    edges: BTreeMap<(usize, usize), EdgeTag>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder { n, edges: BTreeMap::new() }
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphBuilder { n: g.n, edges: g.tagged_edges().map(|(i, j, t)| ((i, j), t)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `{i, j}`; returns false if it was a self-loop or already present.
    pub fn add(&mut self, i: usize, j: usize, tag: EdgeTag) -> bool {
        assert!(i < self.n && j < self.n, "vertex id out of range");
        if i == j {
            return false;
        }
        let key = (i.min(j), i.max(j));
        if self.edges.contains_key(&key) {
            return false;
        }
        self.edges.insert(key, tag);
        true
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn build(self) -> Graph {
        Graph::from_map(self.n, self.edges)
    }
}

/// Membership vector for `set`, rejecting out-of-range and repeated ids.
pub fn membership(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::Domain(format!("vertex {v} out of range for n={n}")));
        }
        if inside[v] {
            return Err(Error::Domain(format!("vertex {v} repeated")));
        }
        inside[v] = true;
    }
    Ok(inside)
}

fn proper_membership(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let inside = membership(n, set)?;
    if set.is_empty() || set.len() == n {
        return Err(Error::Domain(format!("subset must be nonempty and proper (|S|={}, n={n})", set.len())));
    }
    Ok(inside)
}

/// `N(S)`: vertices outside `S` with at least one neighbor in `S`, sorted.
pub fn vertex_boundary(g: &Graph, set: &[usize]) -> Result<Vec<usize>> {
    let inside = proper_membership(g.n, set)?;
    Ok(outer_boundary(g, &inside))
}

fn outer_boundary(g: &Graph, inside: &[bool]) -> Vec<usize> {
    (0..g.n).filter(|&v| !inside[v] && g.adj[v].iter().any(|&w| inside[w])).collect()
}

/// `(|N(S)|, |N(V\S)|)` for a membership vector.
pub fn boundary_counts(g: &Graph, inside: &[bool]) -> (usize, usize) {
    let mut out = 0;
    let mut inn = 0;
    for v in 0..g.n {
        if g.adj[v].iter().any(|&w| inside[w] != inside[v]) {
            if inside[v] {
                inn += 1;
            } else {
                out += 1;
            }
        }
    }
    (out, inn)
}

/// Number of edges with exactly one endpoint inside.
pub fn edge_cut(g: &Graph, inside: &[bool]) -> usize {
    g.edges.iter().filter(|&&(i, j)| inside[i] != inside[j]).count()
}

/// A cut together with its exact vertex-expansion values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CutReport {
    #[serde(rename = "A")]
    pub set: Vec<usize>,
    pub size: usize,
    /// `|N(A)| + |N(V\A)|`.
    pub boundary: usize,
    #[serde(with = "frac")]
    pub phi: Ratio<u64>,
    #[serde(with = "frac")]
    pub phi_asym: Ratio<u64>,
    #[serde(default)]
    pub method: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

impl CutReport {
    pub fn phi_f64(&self) -> f64 {
        ratio_f64(&self.phi)
    }

    pub fn with_method(mut self, method: &str, params: serde_json::Value) -> Self {
        self.method = method.to_string();
        self.params = params;
        self
    }
}

pub fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `φ^V = n(|N(S)|+|N(V\S)|)/(|S||V\S|)` as an exact rational.
pub fn phi_from_counts(n: usize, size: usize, boundary: usize) -> Ratio<u64> {
    Ratio::new((n * boundary) as u64, (size * (n - size)) as u64)
}

/// Vertex expansion `φ^V(S)` and its asymmetric variant `n|N(S)|/(|S||V\S|)`.
pub fn vertex_expansion(g: &Graph, set: &[usize]) -> Result<CutReport> {
    let inside = proper_membership(g.n, set)?;
    Ok(report_from_membership(g, &inside))
}

pub(crate) fn report_from_membership(g: &Graph, inside: &[bool]) -> CutReport {
    let (out, inn) = boundary_counts(g, inside);
    let set: Vec<usize> = (0..g.n).filter(|&v| inside[v]).collect();
    let size = set.len();
    let den = (size * (g.n - size)) as u64;
    CutReport {
        size,
        boundary: out + inn,
        phi: Ratio::new((g.n * (out + inn)) as u64, den),
        phi_asym: Ratio::new((g.n * out) as u64, den),
        set,
        method: String::new(),
        params: serde_json::Value::Null,
    }
}

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 16;

/// Exact `φ^{V-bal}` by enumerating every subset of size `n/2` in
/// lexicographic order; the first minimizer wins ties.
pub fn balanced_vertex_expansion_bruteforce(g: &Graph, cap: usize) -> Result<CutReport> {
    let n = g.n;
    if n % 2 != 0 || n == 0 {
        return Err(Error::Domain(format!("brute force needs positive even n, got {n}")));
    }
    if n > cap || n > 63 {
        return Err(Error::Domain(format!("n={n} exceeds brute-force cap {}", cap.min(63))));
    }
    let nbr: Vec<u64> = (0..n).map(|i| g.adj[i].iter().fold(0u64, |m, &j| m | (1 << j))).collect();
    let k = n / 2;
    let mut comb: Vec<usize> = (0..k).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    loop {
        let s = comb.iter().fold(0u64, |m, &i| m | (1 << i));
        let mut reach_in = 0u64;
        let mut reach_out = 0u64;
        for (i, &m) in nbr.iter().enumerate() {
            if s >> i & 1 == 1 {
                reach_in |= m;
            } else {
                reach_out |= m;
            }
        }
        let bd = (reach_in & !s).count_ones() + (reach_out & s).count_ones();
        if best.as_ref().is_none_or(|(b, _)| (bd as usize) < *b) {
            best = Some((bd as usize, comb.clone()));
        }
        // next k-combination of 0..n in lexicographic order
        let mut pos = k;
        while pos > 0 && comb[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        comb[pos - 1] += 1;
        for q in pos..k {
            comb[q] = comb[q - 1] + 1;
        }
    }
    let (_, set) = best.expect("at least one balanced subset");
    Ok(vertex_expansion(g, &set)?.with_method("bruteforce", serde_json::Value::Null))
}

/// Serializes `Ratio<u64>` as `{num, den}`.
pub mod frac {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Frac {
        num: u64,
        den: u64,
    }

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        Frac { num: *r.numer(), den: *r.denom() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let f = Frac::deserialize(d)?;
        if f.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(f.num, f.den))
    }
}
