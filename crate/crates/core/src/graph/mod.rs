//! Simple undirected graphs over dense vertex ids, their stream encodings,
//! and the exact offline oracles used as ground truth.

mod format;
mod oracle;
mod stream;

pub use format::{parse_stream, write_stream, ParseError};
pub use oracle::{
    alpha_exact, alpha_exact_with_limit, beta_exact, greedy_min_degree_is, is_independent,
    turan_bound, ALPHA_EXACT_LIMIT,
};
pub use stream::{materialize, GraphStream, StreamEvent, StreamMode};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Dense vertex index in `[0, n)`.
pub type VertexId = u32;

/// Errors raised while building a [`Graph`] or validating a [`GraphStream`].
///
/// `event` fields are zero-based positions in the event sequence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {vertex} at event {event}")]
    SelfLoop { vertex: VertexId, event: usize },
    #[error("duplicate edge {{{u}, {v}}} at event {event}")]
    DuplicateEdge { u: VertexId, v: VertexId, event: usize },
    #[error("vertex {vertex} at event {event} is out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize, event: usize },
    #[error("vertex {vertex} references {neighbor} before it has arrived (event {event})")]
    ArrivalOrder { vertex: VertexId, neighbor: VertexId, event: usize },
    #[error("vertex {vertex} arrives twice (event {event})")]
    RepeatedArrival { vertex: VertexId, event: usize },
    #[error("{found} event at position {event} in a {expected} stream")]
    ModeMismatch { expected: StreamMode, found: StreamMode, event: usize },
    #[error("graph has {n} vertices; exact oracle limited to {limit}")]
    OracleOutOfRange { n: usize, limit: usize },
}

/// An undirected edge, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    /// Canonicalizes `{a, b}`. Returns `None` for a self-loop.
    pub fn new(a: VertexId, b: VertexId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn u(&self) -> VertexId {
        self.u
    }

    pub fn v(&self) -> VertexId {
        self.v
    }

    pub fn endpoints(&self) -> [VertexId; 2] {
        [self.u, self.v]
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.u, self.v)
    }
}

/// Immutable simple graph with sorted, duplicate-free adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    m: usize,
}

impl Graph {
    /// The graph on `n` vertices with no edges.
    pub fn edgeless(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates
    /// and ids outside `[0, n)`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (event, (a, b)) in edges.into_iter().enumerate() {
            for x in [a, b] {
                if x as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n, event });
                }
            }
            let e = Edge::new(a, b).ok_or(GraphError::SelfLoop { vertex: a, event })?;
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge { u: e.u, v: e.v, event });
            }
            adjacency[e.u as usize].push(e.v);
            adjacency[e.v as usize].push(e.u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        let m = seen.len();
        Ok(Graph { adjacency, m })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    /// Average degree `2m / n`, zero for the empty graph.
    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m as f64 / self.n() as f64
        }
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency
            .get(a as usize)
            .is_some_and(|list| list.binary_search(&b).is_ok())
    }

    /// Edges in canonical order (sorted by smaller endpoint, then larger).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as VertexId;
            list.iter()
                .filter(move |&&v| v > u)
                .map(move |&v| Edge { u, v })
        })
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n() as VertexId;
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|list| list.iter().map(|&v| v + shift).collect()),
        );
        Graph {
            adjacency,
            m: self.m + other.m,
        }
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let n32 = n as VertexId;
        let edges = (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges = (1..n as VertexId).map(|v| (v - 1, v));
        Graph::from_edges(n, edges).expect("path is simple")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let n32 = n as VertexId;
        let edges = (0..n32).map(|v| (v, (v + 1) % n32));
        Graph::from_edges(n, edges).expect("cycle is simple")
    }

    /// Star with center `0` and `leaves` leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves as VertexId).map(|v| (0, v));
        Graph::from_edges(leaves + 1, edges).expect("star is simple")
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_is_canonical() {
        let e = Edge::new(5, 2).unwrap();
        assert_eq!((e.u(), e.v()), (2, 5));
        assert_eq!(Edge::new(3, 3), None);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(matches!(
            Graph::from_edges(3, [(0, 0)]),
            Err(GraphError::SelfLoop { vertex: 0, .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { u: 0, v: 1, .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3, .. })
        ));
    }

    #[test]
    fn handshake_and_symmetry() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        assert_eq!(g.degrees().sum::<usize>(), 2 * g.m());
        for e in g.edges() {
            assert!(g.has_edge(e.u(), e.v()) && g.has_edge(e.v(), e.u()));
        }
        assert_eq!(g.edges().count(), 4);
        assert_eq!(g.degree(5), 0);
    }

    #[test]
    fn named_families() {
        assert_eq!(Graph::complete(4).m(), 6);
        assert_eq!(Graph::path(3).m(), 2);
        assert_eq!(Graph::cycle(5).max_degree(), 2);
        let s = Graph::star(5);
        assert_eq!((s.n(), s.degree(0), s.degree(3)), (6, 5, 1));
    }

    #[test]
    fn union_shifts_ids() {
        let g = Graph::path(2).disjoint_union(&Graph::path(3));
        assert_eq!(g.n(), 5);
        assert!(g.has_edge(2, 3) && g.has_edge(3, 4) && !g.has_edge(1, 2));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs = std::iter::once(1e16).chain(std::iter::repeat_n(1.0, 10_000));
        assert_eq!(compensated_sum(xs), 1e16 + 10_000.0);
    }
}
