//! Independent-set lower bounds in the vertex-arrival model.
//!
//! Let `G_i` be the graph induced by the first `i` arriving vertices and
//! `n_{d,i}` the number of its vertices with degree at most `d`. [`DegTest`]
//! estimates `n_d = max_i n_{d,i}` in `O(log n / eps^2)` words: it keeps a
//! uniform `p`-sample `S` of the current low-degree vertices, evicts members
//! whose degree passes `d`, and whenever `|S|` hits the capacity
//! `cap = ceil(28 / eps'^2 * ln n)` (with `eps' = eps / 2`) it records
//! `m = cap / p`, keeps each member with probability `1 / (1 + eps')` and
//! divides `p` by `1 + eps'`. Before the first downsampling it tracks
//! `m = max |S|` directly, which is exact.
//!
//! [`VertexArrivalEstimator`] runs one `DegTest(2^i, 1/2)` per
//! `i = 0..=ceil(log2 n)` over the same pass and returns
//! `max_i n~_{2^i} / (2 (2^i + 1))`, which with high probability is at most
//! `alpha(G)` and at least `Omega(beta(G) / log n)`.

use std::collections::HashMap;

use serde::Serialize;

use crate::coin::KeyedCoin;
use crate::edge_arrival::{log_n, BITS_PER_SAMPLE};
use crate::error::{require, require_mode, EstimatorError};
use crate::graph::{Graph, GraphError, GraphStream, StreamEvent, StreamMode, VertexId};

/// Numerator of the capacity constant `28 / eps'^2`.
pub const CAPACITY_NUMERATOR: f64 = 28.0;

/// Accuracy used by every instance inside [`VertexArrivalEstimator`].
pub const VERTEX_ARRIVAL_EPS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegTestConfig {
    pub degree_bound: u64,
    pub eps: f64,
    pub n: usize,
    pub seed: u64,
    /// Separates the random draws of instances sharing a seed.
    pub instance: u64,
    /// Sample capacity; `ceil(28 / (eps/2)^2 * ln n)` unless overridden.
    pub capacity: usize,
}

impl DegTestConfig {
    pub fn new(degree_bound: u64, eps: f64, n: usize, seed: u64) -> Result<Self, EstimatorError> {
        require(eps > 0.0 && eps <= 1.0, "eps", "in (0, 1]", eps)?;
        let eps_prime = eps / 2.0;
        let capacity = (CAPACITY_NUMERATOR / (eps_prime * eps_prime) * log_n(n)).ceil() as usize;
        Ok(DegTestConfig {
            degree_bound,
            eps,
            n,
            seed,
            instance: 0,
            capacity,
        })
    }

    pub fn with_instance(mut self, instance: u64) -> Self {
        self.instance = instance;
        self
    }

    /// Overrides the capacity. A capacity above `n` never downsamples, so
    /// the output is exactly `n_d`.
    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity.max(1);
        self
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps / 2.0
    }
}

/// Streaming estimator of `n_d`.
#[derive(Debug, Clone)]
pub struct DegTest {
    config: DegTestConfig,
    growth: f64,
    phase: i32,
    p: f64,
    sample: HashMap<VertexId, u64>,
    m: f64,
    admit: KeyedCoin,
    retain: KeyedCoin,
    peak: usize,
}

impl DegTest {
    pub fn new(config: DegTestConfig) -> Self {
        let admit = KeyedCoin::new(config.seed, 2 * config.instance + 1);
        let retain = KeyedCoin::new(config.seed, 2 * config.instance + 2);
        DegTest {
            growth: 1.0 + config.eps_prime(),
            config,
            phase: 0,
            p: 1.0,
            sample: HashMap::new(),
            m: 0.0,
            admit,
            retain,
            peak: 0,
        }
    }

    pub fn config(&self) -> &DegTestConfig {
        &self.config
    }

    /// Current sampling probability, `(1 + eps')^-phase`.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn phase(&self) -> i32 {
        self.phase
    }

    /// Current running estimate `m`.
    pub fn estimate(&self) -> f64 {
        self.m
    }

    pub fn sample_len(&self) -> usize {
        self.sample.len()
    }

    /// Largest `|S|` held at any point.
    pub fn peak_sample(&self) -> usize {
        self.peak
    }

    pub fn sampled_degree(&self, v: VertexId) -> Option<u64> {
        self.sample.get(&v).copied()
    }

    /// Vertex `v` arrives with its edges to the earlier vertices `back`.
    ///
    /// Only local checks are made (range and self-reference); arrival order
    /// is the stream's responsibility, see [`GraphStream::validate`].
    pub fn process(&mut self, v: VertexId, back: &[VertexId]) -> Result<(), GraphError> {
        let n = self.config.n;
        for &x in std::iter::once(&v).chain(back) {
            if x as usize >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n, event: 0 });
            }
        }
        if back.contains(&v) {
            return Err(GraphError::SelfLoop { vertex: v, event: 0 });
        }

        let d = self.config.degree_bound;
        if self.admit.flip(u64::from(v), self.p) {
            self.sample.insert(v, back.len() as u64);
        }
        self.peak = self.peak.max(self.sample.len());

        // Only v and its back-neighbors changed degree.
        for &u in back {
            if let Some(deg) = self.sample.get_mut(&u) {
                *deg += 1;
                if *deg > d {
                    self.sample.remove(&u);
                }
            }
        }
        if self.sample.get(&v).is_some_and(|&deg| deg > d) {
            self.sample.remove(&v);
        }

        if self.phase == 0 {
            self.m = self.m.max(self.sample.len() as f64);
        }
        let cap = self.config.capacity;
        while self.sample.len() >= cap {
            self.m = cap as f64 / self.p;
            let keep = 1.0 / self.growth;
            let key_base = (self.phase as u64) << 32;
            let retain = &mut self.retain;
            self.sample
                .retain(|&u, _| retain.flip(key_base | u64::from(u), keep));
            self.phase += 1;
            self.p = self.growth.powi(-self.phase);
        }
        Ok(())
    }

    pub fn process_event(&mut self, event: &StreamEvent) -> Result<(), EstimatorError> {
        match event {
            StreamEvent::Vertex { v, back } => Ok(self.process(*v, back)?),
            StreamEvent::Edge(..) => Err(EstimatorError::WrongMode {
                expected: StreamMode::Vertex,
                found: StreamMode::Edge,
            }),
        }
    }

    /// The estimate `n~_d`.
    pub fn finalize(self) -> f64 {
        self.m
    }
}

/// Runs a single [`DegTest`] over a vertex-arrival stream.
pub fn degtest(stream: &GraphStream, config: DegTestConfig) -> Result<DegTestReport, EstimatorError> {
    require_mode(StreamMode::Vertex, stream.mode)?;
    let mut test = DegTest::new(config);
    for (event, ev) in stream.events.iter().enumerate() {
        test.process_event(ev).map_err(|err| with_event(err, event))?;
    }
    Ok(DegTestReport::from(test))
}

fn with_event(err: EstimatorError, position: usize) -> EstimatorError {
    match err {
        EstimatorError::Stream(GraphError::VertexOutOfRange { vertex, n, .. }) => {
            GraphError::VertexOutOfRange { vertex, n, event: position }.into()
        }
        EstimatorError::Stream(GraphError::SelfLoop { vertex, .. }) => {
            GraphError::SelfLoop { vertex, event: position }.into()
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegTestReport {
    pub degree_bound: u64,
    pub estimate: f64,
    pub capacity: usize,
    pub peak_sample: usize,
    pub phases: i32,
}

impl From<DegTest> for DegTestReport {
    fn from(test: DegTest) -> Self {
        DegTestReport {
            degree_bound: test.config.degree_bound,
            estimate: test.m,
            capacity: test.config.capacity,
            peak_sample: test.peak,
            phases: test.phase,
        }
    }
}

/// Output of [`VertexArrivalEstimator`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexEstimate {
    pub gamma_hat: f64,
    /// One entry per degree bound `2^i`.
    pub per_degree: Vec<DegTestReport>,
    /// Sum over instances of `peak_sample * 128` bits.
    pub peak_bits: u64,
}

/// `ceil(log2 n)`, zero for `n <= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// One pass, fanned out to `ceil(log2 n) + 1` independent [`DegTest`]s.
#[derive(Debug, Clone)]
pub struct VertexArrivalEstimator {
    tests: Vec<DegTest>,
}

impl VertexArrivalEstimator {
    pub fn new(n: usize, seed: u64) -> Self {
        Self::build(n, seed, None)
    }

    /// Every instance gets the given capacity; `capacity >= n` makes all of
    /// them exact.
    pub fn with_capacity(n: usize, seed: u64, capacity: usize) -> Self {
        Self::build(n, seed, Some(capacity))
    }

    fn build(n: usize, seed: u64, capacity: Option<usize>) -> Self {
        let tests = (0..=ceil_log2(n))
            .map(|i| {
                let mut config = DegTestConfig::new(1 << i, VERTEX_ARRIVAL_EPS, n, seed)
                    .expect("fixed eps is valid")
                    .with_instance(u64::from(i));
                if let Some(cap) = capacity {
                    config = config.with_capacity(cap);
                }
                DegTest::new(config)
            })
            .collect();
        VertexArrivalEstimator { tests }
    }

    pub fn instances(&self) -> &[DegTest] {
        &self.tests
    }

    pub fn process(&mut self, v: VertexId, back: &[VertexId]) -> Result<(), GraphError> {
        self.tests.iter_mut().try_for_each(|t| t.process(v, back))
    }

    pub fn process_event(&mut self, event: &StreamEvent) -> Result<(), EstimatorError> {
        self.tests.iter_mut().try_for_each(|t| t.process_event(event))
    }

    pub fn finalize(self) -> VertexEstimate {
        let per_degree: Vec<DegTestReport> = self.tests.into_iter().map(DegTestReport::from).collect();
        let gamma_hat = per_degree
            .iter()
            .map(|r| r.estimate / (2.0 * (r.degree_bound as f64 + 1.0)))
            .fold(0.0, f64::max);
        let peak_bits = per_degree
            .iter()
            .map(|r| r.peak_sample as u64 * BITS_PER_SAMPLE)
            .sum();
        VertexEstimate {
            gamma_hat,
            per_degree,
            peak_bits,
        }
    }
}

fn run_estimator(
    stream: &GraphStream,
    mut estimator: VertexArrivalEstimator,
) -> Result<VertexEstimate, EstimatorError> {
    require_mode(StreamMode::Vertex, stream.mode)?;
    for (event, ev) in stream.events.iter().enumerate() {
        estimator
            .process_event(ev)
            .map_err(|err| with_event(err, event))?;
    }
    Ok(estimator.finalize())
}

pub fn estimate_vertex_arrival(stream: &GraphStream, seed: u64) -> Result<VertexEstimate, EstimatorError> {
    run_estimator(stream, VertexArrivalEstimator::new(stream.declared_n, seed))
}

/// As [`estimate_vertex_arrival`] with every instance's capacity overridden.
pub fn estimate_vertex_arrival_with_capacity(
    stream: &GraphStream,
    seed: u64,
    capacity: usize,
) -> Result<VertexEstimate, EstimatorError> {
    run_estimator(
        stream,
        VertexArrivalEstimator::with_capacity(stream.declared_n, seed, capacity),
    )
}

/// Exact `n_d` for the arrival order `order` by replaying every prefix.
pub fn n_d_oracle(g: &Graph, order: &[VertexId], d: u64) -> usize {
    let mut position = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }
    let mut prefix_degree = vec![0u64; g.n()];
    let mut low = 0usize;
    let mut best = 0usize;
    for (i, &v) in order.iter().enumerate() {
        let mut back = 0u64;
        for &u in g.neighbors(v) {
            if position[u as usize] < i {
                back += 1;
                let du = &mut prefix_degree[u as usize];
                *du += 1;
                if *du == d + 1 {
                    low -= 1;
                }
            }
        }
        prefix_degree[v as usize] = back;
        if back <= d {
            low += 1;
        }
        best = best.max(low);
    }
    best
}

/// [`n_d_oracle`] evaluated directly on a vertex-arrival stream.
pub fn n_d_of_stream(stream: &GraphStream, d: u64) -> Result<usize, EstimatorError> {
    require_mode(StreamMode::Vertex, stream.mode)?;
    let mut prefix_degree = vec![0u64; stream.declared_n];
    let (mut low, mut best) = (0usize, 0usize);
    for ev in &stream.events {
        if let StreamEvent::Vertex { v, back } = ev {
            for &u in back {
                let du = &mut prefix_degree[u as usize];
                *du += 1;
                if *du == d + 1 {
                    low -= 1;
                }
            }
            prefix_degree[*v as usize] = back.len() as u64;
            if back.len() as u64 <= d {
                low += 1;
            }
            best = best.max(low);
        }
    }
    Ok(best)
}
