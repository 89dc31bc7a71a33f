//! Random graphs, arrival orders and the set-disjointness gadget.

use std::collections::{BTreeSet, HashSet};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphStream, StreamEvent, StreamMode, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{m} edges do not fit in a simple graph on {n} vertices")]
    TooManyEdges { n: usize, m: usize },
    #[error("graph too large: {0} vertices")]
    TooManyVertices(usize),
    #[error("invalid gadget: {0}")]
    Gadget(String),
    #[error("order is not a permutation of 0..{n}")]
    NotPermutation { n: usize },
}

fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Uniform simple graph with exactly `m` edges (Erdős–Rényi `G(n, m)`).
pub fn gen_gnm(n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    if n > VertexId::MAX as usize {
        return Err(GenError::TooManyVertices(n));
    }
    let total = max_edges(n);
    if m > total {
        return Err(GenError::TooManyEdges { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m);
    if 2 * m > total {
        // Dense: choose which pair indices to keep.
        let all: Vec<(VertexId, VertexId)> = (0..n as VertexId)
            .flat_map(|u| (u + 1..n as VertexId).map(move |v| (u, v)))
            .collect();
        edges.extend(index::sample(&mut rng, total, m).into_iter().map(|i| all[i]));
    } else {
        let mut seen = HashSet::with_capacity(m);
        while edges.len() < m {
            let u = rng.random_range(0..n as VertexId);
            let v = rng.random_range(0..n as VertexId);
            if u != v && seen.insert((u.min(v), u.max(v))) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(n, edges).expect("generated edges are simple"))
}

/// Instance of the two-party disjointness reduction.
///
/// Vertex layout is `[A | B | C | U_0 .. U_{k-1}]` with `|A| = |B| = a = k q`,
/// `|C| = z` and `|U_i| = q = 2 z c^2`. `A ∪ B` is a clique, `U_i` is joined
/// to all of `A` unless `i ∈ x`, and to all of `B` unless `i ∈ y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetSpec {
    pub k: usize,
    pub z: usize,
    pub c: usize,
    pub x: BTreeSet<usize>,
    pub y: BTreeSet<usize>,
}

impl GadgetSpec {
    pub fn new(
        k: usize,
        z: usize,
        c: usize,
        x: impl IntoIterator<Item = usize>,
        y: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GenError> {
        let spec = GadgetSpec {
            k,
            z,
            c,
            x: x.into_iter().collect(),
            y: y.into_iter().collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let fail = |msg: String| Err(GenError::Gadget(msg));
        if self.k == 0 {
            return fail("k must be at least 1".into());
        }
        if self.z < 2 {
            return fail(format!("z must be at least 2, got {}", self.z));
        }
        if self.c < 2 {
            return fail(format!("c must be at least 2, got {}", self.c));
        }
        if let Some(&i) = self.x.iter().chain(&self.y).find(|&&i| i >= self.k) {
            return fail(format!("set element {i} outside 0..{}", self.k));
        }
        let n = self
            .z
            .checked_mul(self.c)
            .and_then(|v| v.checked_mul(self.c))
            .and_then(|zc2| zc2.checked_mul(6)?.checked_mul(self.k)?.checked_add(self.z));
        match n {
            Some(n) if n <= VertexId::MAX as usize => Ok(()),
            _ => fail("gadget too large".into()),
        }
    }

    pub fn q(&self) -> usize {
        2 * self.z * self.c * self.c
    }

    pub fn a(&self) -> usize {
        self.k * self.q()
    }

    pub fn n(&self) -> usize {
        3 * self.a() + self.z
    }

    pub fn is_disjoint(&self) -> bool {
        self.x.is_disjoint(&self.y)
    }

    pub fn a_block(&self) -> std::ops::Range<usize> {
        0..self.a()
    }

    pub fn b_block(&self) -> std::ops::Range<usize> {
        self.a()..2 * self.a()
    }

    pub fn c_block(&self) -> std::ops::Range<usize> {
        2 * self.a()..2 * self.a() + self.z
    }

    pub fn u_block(&self, i: usize) -> std::ops::Range<usize> {
        let start = 2 * self.a() + self.z + i * self.q();
        start..start + self.q()
    }
}

fn ids(range: std::ops::Range<usize>) -> impl Iterator<Item = VertexId> + Clone {
    range.start as VertexId..range.end as VertexId
}

pub fn gen_gadget(spec: &GadgetSpec) -> Result<Graph, GenError> {
    spec.validate()?;
    let (a_ids, b_ids) = (ids(spec.a_block()), ids(spec.b_block()));
    let clique = ids(0..2 * spec.a()).flat_map(|u| ids(u as usize + 1..2 * spec.a()).map(move |v| (u, v)));
    let mut edges: Vec<(VertexId, VertexId)> = clique.collect();
    for i in 0..spec.k {
        for u in ids(spec.u_block(i)) {
            if !spec.x.contains(&i) {
                edges.extend(a_ids.clone().map(|w| (u, w)));
            }
            if !spec.y.contains(&i) {
                edges.extend(b_ids.clone().map(|w| (u, w)));
            }
        }
    }
    Ok(Graph::from_edges(spec.n(), edges).expect("gadget edges are simple"))
}

/// Where Alice's part of a gadget stream ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetMeta {
    pub spec: GadgetSpec,
    pub n: usize,
    pub q: usize,
    pub a: usize,
    /// Index of the last event of Alice's prefix.
    pub cut_index: usize,
    pub seed: u64,
}

impl GadgetMeta {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }
}

/// Vertex-arrival stream of the gadget: `A`, `C` and every `U_i` first
/// (Alice), then `B` (Bob). Within each part the order is shuffled by
/// `seed`; blocks keep their relative order.
pub fn gen_gadget_stream(spec: &GadgetSpec, seed: u64) -> Result<(GraphStream, GadgetMeta), GenError> {
    let g = gen_gadget(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alice: Vec<VertexId> = ids(spec.a_block())
        .chain(ids(spec.c_block()))
        .chain((0..spec.k).flat_map(|i| ids(spec.u_block(i))))
        .collect();
    let mut bob: Vec<VertexId> = ids(spec.b_block()).collect();
    alice.shuffle(&mut rng);
    bob.shuffle(&mut rng);
    let cut_index = alice.len() - 1;
    alice.extend(bob);
    let stream = vertex_stream(&g, &alice);
    let meta = GadgetMeta {
        spec: spec.clone(),
        n: spec.n(),
        q: spec.q(),
        a: spec.a(),
        cut_index,
        seed,
    };
    Ok((stream, meta))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderPolicy {
    UniformShuffle(u64),
    ByDegreeAscending,
    ByDegreeDescending,
    GivenPermutation(Vec<VertexId>),
}

/// Arranges `g` as a stream. Edge mode lists each edge once with edges
/// ordered by the later endpoint in the vertex order; uniform shuffling
/// permutes the edge list itself.
pub fn to_stream(g: &Graph, mode: StreamMode, policy: &OrderPolicy) -> Result<GraphStream, GenError> {
    let n = g.n();
    if mode == StreamMode::Edge {
        if let OrderPolicy::UniformShuffle(seed) = policy {
            let mut edges: Vec<_> = g.edges().collect();
            edges.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            let events = edges
                .into_iter()
                .map(|e| {
                    let [u, v] = e.endpoints();
                    StreamEvent::Edge(u, v)
                })
                .collect();
            return Ok(GraphStream::new(mode, n, events));
        }
    }
    let order = vertex_order(g, policy)?;
    Ok(match mode {
        StreamMode::Vertex => vertex_stream(g, &order),
        StreamMode::Edge => {
            let events = vertex_stream(g, &order)
                .events
                .into_iter()
                .flat_map(|ev| match ev {
                    StreamEvent::Vertex { v, back } => back.into_iter().map(move |u| StreamEvent::Edge(u, v)),
                    StreamEvent::Edge(..) => unreachable!("vertex_stream emits vertex events"),
                })
                .collect();
            GraphStream::new(mode, n, events)
        }
    })
}

fn vertex_order(g: &Graph, policy: &OrderPolicy) -> Result<Vec<VertexId>, GenError> {
    let n = g.n();
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    match policy {
        OrderPolicy::UniformShuffle(seed) => order.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed)),
        OrderPolicy::ByDegreeAscending => order.sort_by_key(|&v| g.degree(v)),
        OrderPolicy::ByDegreeDescending => order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v))),
        OrderPolicy::GivenPermutation(perm) => {
            let mut seen = vec![false; n];
            let ok = perm.len() == n
                && perm
                    .iter()
                    .all(|&v| (v as usize) < n && !std::mem::replace(&mut seen[v as usize], true));
            if !ok {
                return Err(GenError::NotPermutation { n });
            }
            order.clone_from(perm);
        }
    }
    Ok(order)
}

fn vertex_stream(g: &Graph, order: &[VertexId]) -> GraphStream {
    let mut arrived = vec![false; g.n()];
    let events = order
        .iter()
        .map(|&v| {
            let back = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&u| arrived[u as usize])
                .collect();
            arrived[v as usize] = true;
            StreamEvent::Vertex { v, back }
        })
        .collect();
    GraphStream::new(StreamMode::Vertex, g.n(), events)
}
