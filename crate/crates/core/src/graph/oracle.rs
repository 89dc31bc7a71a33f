//! Exact offline quantities used as ground truth.

use std::collections::BTreeSet;

use super::{compensated_sum, Graph, GraphError, VertexId};

/// Default vertex limit for [`alpha_exact`].
pub const ALPHA_EXACT_LIMIT: usize = 24;

/// Caro-Wei bound `sum_v 1 / (deg(v) + 1)`.
pub fn beta_exact(g: &Graph) -> f64 {
    // Group by degree so the sum has at most max_degree + 1 terms.
    let mut histogram = vec![0usize; g.max_degree() + 1];
    for d in g.degrees() {
        histogram[d] += 1;
    }
    compensated_sum(
        histogram
            .iter()
            .enumerate()
            .filter(|(_, &count)| count > 0)
            .map(|(d, &count)| count as f64 / (d as f64 + 1.0)),
    )
}

/// Turán bound `n / (d̄ + 1)` with `d̄ = 2m / n`.
pub fn turan_bound(g: &Graph) -> f64 {
    let n = g.n() as f64;
    if n == 0.0 {
        return 0.0;
    }
    n / (g.average_degree() + 1.0)
}

/// Independence number by branch and bound, for graphs with at most
/// [`ALPHA_EXACT_LIMIT`] vertices.
pub fn alpha_exact(g: &Graph) -> Result<usize, GraphError> {
    alpha_exact_with_limit(g, ALPHA_EXACT_LIMIT)
}

/// Like [`alpha_exact`] with a caller-chosen limit (at most 64).
pub fn alpha_exact_with_limit(g: &Graph, limit: usize) -> Result<usize, GraphError> {
    let limit = limit.min(64);
    if g.n() > limit {
        return Err(GraphError::OracleOutOfRange { n: g.n(), limit });
    }
    let adj: Vec<u64> = (0..g.n() as VertexId)
        .map(|v| g.neighbors(v).iter().fold(0u64, |acc, &u| acc | 1 << u))
        .collect();
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut best = 0;
    branch(&adj, all, 0, &mut best);
    Ok(best as usize)
}

fn branch(adj: &[u64], cand: u64, size: u32, best: &mut u32) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() <= *best {
        return;
    }
    let mut min_v = 0;
    let mut min_deg = u32::MAX;
    let mut max_v = 0;
    let mut max_deg = 0;
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & cand).count_ones();
        if d < min_deg {
            (min_v, min_deg) = (v, d);
        }
        if d >= max_deg {
            (max_v, max_deg) = (v, d);
        }
    }
    // A vertex of degree <= 1 belongs to some maximum independent set.
    if min_deg <= 1 {
        branch(adj, cand & !(adj[min_v] | 1 << min_v), size + 1, best);
        return;
    }
    branch(adj, cand & !(adj[max_v] | 1 << max_v), size + 1, best);
    branch(adj, cand & !(1 << max_v), size, best);
}

/// Greedy independent set: repeatedly take a vertex of minimum residual
/// degree (smallest id on ties) and delete its closed neighborhood.
///
/// The result is sorted and has size at least [`beta_exact`].
pub fn greedy_min_degree_is(g: &Graph) -> Vec<VertexId> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = g.degrees().collect();
    let mut queue: BTreeSet<(usize, VertexId)> = (0..n as VertexId)
        .map(|v| (degree[v as usize], v))
        .collect();
    let mut chosen = Vec::new();
    while let Some((_, v)) = queue.pop_first() {
        chosen.push(v);
        alive[v as usize] = false;
        let removed: Vec<VertexId> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| alive[w as usize])
            .collect();
        for &w in &removed {
            alive[w as usize] = false;
            queue.remove(&(degree[w as usize], w));
        }
        for &w in &removed {
            for &x in g.neighbors(w) {
                if alive[x as usize] {
                    let d = &mut degree[x as usize];
                    queue.remove(&(*d, x));
                    *d -= 1;
                    queue.insert((*d, x));
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// True when no edge of `g` joins two members of `set`.
pub fn is_independent(g: &Graph, set: &[VertexId]) -> bool {
    let mut member = vec![false; g.n()];
    for &v in set {
        member[v as usize] = true;
    }
    set.iter()
        .all(|&v| g.neighbors(v).iter().all(|&u| !member[u as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn beta_small_cases() {
        assert!(close(beta_exact(&Graph::complete(4)), 1.0));
        assert!(close(beta_exact(&Graph::path(3)), 4.0 / 3.0));
        assert!(close(beta_exact(&Graph::star(5)), 8.0 / 3.0));
        assert!(close(beta_exact(&Graph::edgeless(7)), 7.0));
        assert_eq!(beta_exact(&Graph::edgeless(0)), 0.0);
    }

    #[test]
    fn alpha_small_cases() {
        assert_eq!(alpha_exact(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(alpha_exact(&Graph::edgeless(7)).unwrap(), 7);
        assert_eq!(alpha_exact(&Graph::complete(4)).unwrap(), 1);
        assert_eq!(alpha_exact(&Graph::path(9)).unwrap(), 5);
        assert_eq!(alpha_exact(&Graph::edgeless(0)).unwrap(), 0);
    }

    #[test]
    fn alpha_rejects_large_graphs() {
        assert_eq!(
            alpha_exact(&Graph::edgeless(25)),
            Err(GraphError::OracleOutOfRange { n: 25, limit: 24 })
        );
        assert_eq!(alpha_exact_with_limit(&Graph::cycle(40), 64).unwrap(), 20);
    }

    #[test]
    fn alpha_matches_subset_enumeration() {
        // Petersen graph: alpha = 4.
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap();
        let brute = (0u32..1 << 10)
            .filter(|mask| {
                let set: Vec<VertexId> = (0..10).filter(|v| mask >> v & 1 == 1).collect();
                is_independent(&g, &set)
            })
            .map(u32::count_ones)
            .max()
            .unwrap();
        assert_eq!(brute, 4);
        assert_eq!(alpha_exact(&g).unwrap(), 4);
    }

    #[test]
    fn greedy_small_cases() {
        assert_eq!(greedy_min_degree_is(&Graph::star(5)), vec![1, 2, 3, 4, 5]);
        assert_eq!(greedy_min_degree_is(&Graph::complete(4)), vec![0]);
        let p = greedy_min_degree_is(&Graph::path(5));
        assert_eq!(p, vec![0, 2, 4]);
    }

    #[test]
    fn turan_small_cases() {
        assert!(close(turan_bound(&Graph::complete(4)), 1.0));
        assert!(close(turan_bound(&Graph::edgeless(7)), 7.0));
        assert!(close(turan_bound(&Graph::star(5)), 2.25));
    }
}
