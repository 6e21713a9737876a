//! Spectral utilities: normalized Laplacian gap, stationary distribution,
//! and Fiedler-vector sweep cuts.

use faer::Mat;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::{self, CutReport, Graph};
use crate::linalg;

/// `I − D^{-1/2} A D^{-1/2}`; rows of isolated vertices are left as the identity row.
pub fn normalized_laplacian(g: &Graph) -> Mat<f64> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| match g.degree(i) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut l = Mat::<f64>::identity(n, n);
    for &(i, j) in g.edges() {
        let v = -inv_sqrt[i] * inv_sqrt[j];
        l[(i, j)] = v;
        l[(j, i)] = v;
    }
    l
}

/// Second-smallest eigenvalue of the normalized Laplacian. Graphs with an
/// isolated vertex or fewer than two vertices get 0.
pub fn spectral_gap(g: &Graph) -> f64 {
    if g.n() < 2 || g.min_degree() == 0 {
        return 0.0;
    }
    match linalg::sym_eigenvalues(&normalized_laplacian(g)) {
        Ok(v) => v[1].max(0.0),
        Err(_) => 0.0,
    }
}

/// `μ(i) = Δ(i) / Σ_j Δ(j)`, exact.
pub fn stationary_distribution(g: &Graph) -> Result<Vec<Ratio<u64>>> {
    if g.num_edges() == 0 {
        return Err(Error::InvalidGraph("stationary distribution of an edgeless graph".into()));
    }
    let total = 2 * g.num_edges() as u64;
    Ok((0..g.n()).map(|i| Ratio::new(g.degree(i) as u64, total)).collect())
}

/// Best balanced sweep cut of the degree-normalized Fiedler vector.
#[derive(Clone, Debug)]
pub struct SweepEdgeCut {
    /// Vertex-expansion view of the chosen cut.
    pub cut: CutReport,
    /// Number of crossing edges.
    pub edge_cut: usize,
}

/// Sorts vertices by `D^{-1/2} v₂` (ties by index) and returns the prefix
/// with the fewest crossing edges per separated pair,
/// `n·|E(S, V\S)| / (|S||V\S|)`, among prefixes whose size lies in
/// `[⌈min_frac·n⌉, n − ⌈min_frac·n⌉]`.
pub fn fiedler_sweep_edge_cut(g: &Graph, min_frac: f64) -> Result<SweepEdgeCut> {
    let n = g.n();
    if n < 2 || g.min_degree() == 0 {
        return Err(Error::InvalidGraph("sweep needs a graph without isolated vertices".into()));
    }
    let eig = linalg::sym_eigen(&normalized_laplacian(g))?;
    let x: Vec<f64> = (0..n).map(|i| eig.vectors[(i, 1)] / (g.degree(i) as f64).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let lo = ((min_frac * n as f64).ceil() as usize).max(1);
    let hi = n.saturating_sub(lo);
    if lo > hi {
        return Err(Error::Domain(format!("no prefix size in [{lo}, {hi}]")));
    }
    let mut inside = vec![false; n];
    let mut crossing = 0usize;
    let mut best: Option<(Ratio<u64>, usize)> = None;
    for (k, &v) in order.iter().enumerate().take(hi) {
        for &w in g.neighbors(v) {
            if inside[w] {
                crossing -= 1;
            } else {
                crossing += 1;
            }
        }
        inside[v] = true;
        let size = k + 1;
        if size < lo {
            continue;
        }
        let score = Ratio::new((n * crossing) as u64, (size * (n - size)) as u64);
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, size));
        }
    }
    let (_, size) = best.expect("nonempty prefix range");
    let mut member = vec![false; n];
    for &v in &order[..size] {
        member[v] = true;
    }
    let cut = graph::report_from_membership(g, &member)
        .with_method("fiedler-sweep", serde_json::json!({ "minFrac": min_frac }));
    Ok(SweepEdgeCut { edge_cut: graph::edge_cut(g, &member), cut })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_gap() {
        for n in 4..=8 {
            let gap = spectral_gap(&Graph::complete(n));
            assert!((gap - n as f64 / (n as f64 - 1.0)).abs() < 1e-8, "n={n} gap={gap}");
        }
    }

    #[test]
    fn cycle_and_disconnected() {
        assert!((spectral_gap(&Graph::cycle(4)) - 1.0).abs() < 1e-8);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(spectral_gap(&g).abs() < 1e-8);
        assert_eq!(spectral_gap(&Graph::empty(3)), 0.0);
    }

    #[test]
    fn stationary_examples() {
        let k3 = stationary_distribution(&Graph::complete(3)).unwrap();
        assert!(k3.iter().all(|&p| p == Ratio::new(1, 3)));
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let mu = stationary_distribution(&star).unwrap();
        assert_eq!(mu[0], Ratio::new(1, 2));
        assert!(mu[1..].iter().all(|&p| p == Ratio::new(1, 6)));
        assert!(stationary_distribution(&Graph::empty(2)).is_err());
    }

    #[test]
    fn sweep_finds_bridge() {
        // two K5's joined by one edge
        let mut edges = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                edges.push((a, b));
                edges.push((a + 5, b + 5));
            }
        }
        edges.push((4, 5));
        let g = Graph::from_edges(10, edges).unwrap();
        let s = fiedler_sweep_edge_cut(&g, 0.25).unwrap();
        assert_eq!(s.edge_cut, 1);
        assert_eq!(s.cut.size, 5);
    }
}
