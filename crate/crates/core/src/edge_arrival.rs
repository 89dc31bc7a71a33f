//! Caro-Wei estimation in the edge-arrival model.
//!
//! Each vertex joins the sample `S` independently with probability `p`, and
//! the estimator tracks the exact degree of every sampled vertex while the
//! edges go by. After the pass, `S` is split into geometric degree classes
//! `S_i`; a class whose sample is large enough, `|S_i| >= v0 * p / (1 + delta)`,
//! contributes `|S_i| / ((c^(i+1) + 1) * p)` to the estimate.
//!
//! With `C = 24 / delta^2`, `v0 = gamma / (ceil(log_c n) * g)` and
//! `p = min(1, C ln n / v0)`, the output lies in
//! `[sum_{heavy} beta'_i / (1 + delta), (1 + delta) * beta(G)]` with high
//! probability whenever `gamma <= beta(G)`; the upper end holds for any `gamma`.
//!
//! Membership in `S` is a keyed coin on `(seed, vertex id)`, decided the
//! first time the vertex shows up. That is distributed exactly like sampling
//! `S` up front, and it makes the final report independent of edge order.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use crate::coin::KeyedCoin;
use crate::degree_classes::{ClassKey, GeometricClasses};
use crate::error::{require, require_mode, EstimatorError};
use crate::graph::{Edge, GraphStream, StreamEvent, StreamMode, VertexId};

/// Bits charged per sampled vertex: a 64-bit id and a 64-bit degree counter.
pub const BITS_PER_SAMPLE: u64 = 128;

/// Default numerator of the Chernoff constant `C = 24 / delta^2`.
pub const DEFAULT_CHERNOFF_NUMERATOR: f64 = 24.0;

const COIN_STREAM: u64 = 0;

/// `ln n`, floored at 1 so that `n <= 2` still gets a positive rate.
pub(crate) fn log_n(n: usize) -> f64 {
    (n as f64).ln().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeEstimatorConfig {
    /// Accuracy of the per-class sample sizes.
    pub delta: f64,
    /// Growth factor of the degree classes.
    pub c: f64,
    /// Heaviness parameter: classes below a `1/(L g)` share of beta are ignored.
    pub g: f64,
    /// Assumed lower bound on beta(G).
    pub gamma: f64,
    /// Declared vertex count.
    pub n: usize,
    pub seed: u64,
    /// `C = chernoff_numerator / delta^2`.
    pub chernoff_numerator: f64,
}

impl EdgeEstimatorConfig {
    pub fn new(delta: f64, c: f64, g: f64, gamma: f64, n: usize, seed: u64) -> Self {
        EdgeEstimatorConfig {
            delta,
            c,
            g,
            gamma,
            n,
            seed,
            chernoff_numerator: DEFAULT_CHERNOFF_NUMERATOR,
        }
    }

    /// Parameters for a `(1 + eps)`-approximation: `g = 10/eps`,
    /// `c = 1 + eps/10`, `delta = eps/10`.
    pub fn for_epsilon(eps: f64, gamma: f64, n: usize, seed: u64) -> Self {
        Self::new(eps / 10.0, 1.0 + eps / 10.0, 10.0 / eps, gamma, n, seed)
    }

    pub fn with_chernoff_numerator(mut self, numerator: f64) -> Self {
        self.chernoff_numerator = numerator;
        self
    }

    pub fn derive(&self) -> Result<DerivedParams, EstimatorError> {
        require(self.delta > 0.0 && self.delta.is_finite(), "delta", "a finite real > 0", self.delta)?;
        require(self.g > 1.0, "g", "a real > 1", self.g)?;
        require(self.gamma > 0.0 && self.gamma.is_finite(), "gamma", "a finite real > 0", self.gamma)?;
        require(
            self.chernoff_numerator > 0.0 && self.chernoff_numerator.is_finite(),
            "chernoff_numerator",
            "a finite real > 0",
            self.chernoff_numerator,
        )?;
        let classes = GeometricClasses::new(self.c, self.n)?;
        let chernoff = self.chernoff_numerator / (self.delta * self.delta);
        let v0 = self.gamma / (classes.count() as f64 * self.g);
        let rate = chernoff * log_n(self.n) / v0;
        Ok(DerivedParams {
            chernoff,
            num_classes: classes.count(),
            v0,
            unclamped_p: rate,
            p: rate.min(1.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// `C`.
    pub chernoff: f64,
    /// `ceil(log_c n)`.
    pub num_classes: usize,
    pub v0: f64,
    pub unclamped_p: f64,
    /// Sampling probability, `min(1, C ln n / v0)`.
    pub p: f64,
}

/// Output of a finished pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub beta_hat: f64,
    pub sample_size: usize,
    pub space_bits: u64,
    /// `|S_i|` for every nonempty sampled bucket.
    pub class_counts: BTreeMap<ClassKey, usize>,
    /// Contribution of every bucket that passed the size test.
    pub contributions: BTreeMap<ClassKey, f64>,
    pub params: DerivedParams,
}

/// One pass of the sampling estimator.
#[derive(Debug, Clone)]
pub struct EdgeArrivalEstimator {
    config: EdgeEstimatorConfig,
    params: DerivedParams,
    classes: GeometricClasses,
    coin: KeyedCoin,
    sampled: HashMap<VertexId, u64>,
    events_seen: u64,
}

impl EdgeArrivalEstimator {
    pub fn new(config: EdgeEstimatorConfig) -> Result<Self, EstimatorError> {
        let params = config.derive()?;
        let classes = GeometricClasses::new(config.c, config.n)?;
        let coin = KeyedCoin::new(config.seed, COIN_STREAM);
        Ok(EdgeArrivalEstimator {
            config,
            params,
            classes,
            coin,
            sampled: HashMap::new(),
            events_seen: 0,
        })
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    pub fn config(&self) -> &EdgeEstimatorConfig {
        &self.config
    }

    /// Whether `v` belongs to `S`. Same answer on every call.
    pub fn is_sampled(&mut self, v: VertexId) -> bool {
        self.coin.flip(u64::from(v), self.params.p)
    }

    /// Current degree of a sampled vertex (`None` if unsampled or unseen).
    pub fn tracked_degree(&self, v: VertexId) -> Option<u64> {
        self.sampled.get(&v).copied()
    }

    pub fn events_seen(&self) -> u64 {
        self.events_seen
    }

    pub fn process_edge(&mut self, e: Edge) {
        self.events_seen += 1;
        for x in e.endpoints() {
            if self.is_sampled(x) {
                *self.sampled.entry(x).or_insert(0) += 1;
            }
        }
    }

    /// Feeds one event. A vertex-arrival event is treated as its group of
    /// edges, which is a valid edge-arrival order.
    ///
    /// Self-loops are ignored; validate the stream beforehand.
    pub fn process(&mut self, event: &StreamEvent) {
        match event {
            StreamEvent::Edge(u, v) => {
                if let Some(e) = Edge::new(*u, *v) {
                    self.process_edge(e);
                }
            }
            StreamEvent::Vertex { v, back } => {
                for &u in back {
                    if let Some(e) = Edge::new(u, *v) {
                        self.process_edge(e);
                    }
                }
            }
        }
    }

    pub fn finalize(mut self) -> EstimateReport {
        let p = self.params.p;
        let mut class_counts: BTreeMap<ClassKey, usize> = BTreeMap::new();
        for &deg in self.sampled.values() {
            *class_counts.entry(self.classes.key(deg)).or_insert(0) += 1;
        }
        // Sampled vertices that never appeared in an edge have degree 0.
        let seen = self.sampled.len();
        let isolated = if p >= 1.0 {
            self.config.n.saturating_sub(seen)
        } else {
            let sampled = &self.sampled;
            let coin = &mut self.coin;
            (0..self.config.n as VertexId)
                .filter(|v| !sampled.contains_key(v) && coin.flip(u64::from(*v), p))
                .count()
        };
        if isolated > 0 {
            class_counts.insert(ClassKey::Isolated, isolated);
        }

        let threshold = self.params.v0 * p / (1.0 + self.config.delta);
        let mut contributions = BTreeMap::new();
        let mut beta_hat = 0.0;
        for (&key, &count) in &class_counts {
            let denominator = match key {
                ClassKey::Isolated => 1.0,
                ClassKey::Degree(i) if i < self.params.num_classes => {
                    self.classes.upper_denominator(i)
                }
                ClassKey::Degree(_) => continue,
            };
            if count as f64 >= threshold {
                let contribution = count as f64 / (denominator * p);
                contributions.insert(key, contribution);
                beta_hat += contribution;
            }
        }

        let sample_size = seen + isolated;
        EstimateReport {
            beta_hat,
            sample_size,
            space_bits: sample_size as u64 * BITS_PER_SAMPLE,
            class_counts,
            contributions,
            params: self.params,
        }
    }
}

/// Runs a full pass with the given configuration.
pub fn run(stream: &GraphStream, config: EdgeEstimatorConfig) -> Result<EstimateReport, EstimatorError> {
    let mut estimator = EdgeArrivalEstimator::new(config)?;
    for event in &stream.events {
        estimator.process(event);
    }
    Ok(estimator.finalize())
}

/// `(1 + eps)`-approximation of beta(G) given `gamma <= beta(G)`.
pub fn estimate_eps(
    stream: &GraphStream,
    eps: f64,
    gamma: f64,
    seed: u64,
) -> Result<EstimateReport, EstimatorError> {
    require_mode(StreamMode::Edge, stream.mode)?;
    require(eps > 0.0 && eps < 1.0, "eps", "in (0, 1)", eps)?;
    run(
        stream,
        EdgeEstimatorConfig::for_epsilon(eps, gamma, stream.declared_n, seed),
    )
}

/// Result of the `phi`-approximation wrapper.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiEstimate {
    pub value: f64,
    /// `true` when the inner `(1 + 1/4)` estimate was returned, `false` when
    /// the fallback `gamma' * phi` was.
    pub used_inner: bool,
    /// The `gamma = gamma' * phi^2` handed to the inner estimator.
    pub inner_gamma: f64,
    pub inner: EstimateReport,
}

pub const PHI_INNER_EPS: f64 = 0.25;

/// `phi`-approximation of beta(G) for `phi > 2` given `gamma' <= beta(G)`.
///
/// Runs the `(1 + 1/4)` estimator with `gamma = gamma' phi^2` and returns its
/// output `b` if `b >= gamma / (1 + 1/4)`, else `gamma' phi`.
pub fn estimate_phi(
    stream: &GraphStream,
    phi: f64,
    gamma_prime: f64,
    seed: u64,
) -> Result<PhiEstimate, EstimatorError> {
    require(phi > 2.0 && phi.is_finite(), "phi", "a finite real > 2", phi)?;
    require(
        gamma_prime > 0.0 && gamma_prime.is_finite(),
        "gamma'",
        "a finite real > 0",
        gamma_prime,
    )?;
    let inner_gamma = gamma_prime * phi * phi;
    let inner = estimate_eps(stream, PHI_INNER_EPS, inner_gamma, seed)?;
    let used_inner = inner.beta_hat >= inner_gamma / (1.0 + PHI_INNER_EPS);
    let value = if used_inner {
        inner.beta_hat
    } else {
        gamma_prime * phi
    };
    Ok(PhiEstimate {
        value,
        used_inner,
        inner_gamma,
        inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn edge_stream(g: &Graph) -> GraphStream {
        GraphStream::new(
            StreamMode::Edge,
            g.n(),
            g.edges().map(|e| StreamEvent::Edge(e.u(), e.v())).collect(),
        )
    }

    #[test]
    fn init_formula() {
        let n = 100;
        let cfg = EdgeEstimatorConfig::new(0.1, 1.1, 10.0, n as f64, n, 1);
        let params = cfg.derive().unwrap();
        let classes = (100f64.ln() / 1.1f64.ln()).ceil();
        assert_eq!(params.num_classes as f64, classes);
        let v0 = 100.0 / (classes * 10.0);
        let expected = 2400.0 * 100f64.ln() / v0;
        assert!((params.chernoff - 2400.0).abs() < 1e-9);
        assert!((params.unclamped_p - expected).abs() < 1e-9 * expected);
        assert_eq!(params.p, 1.0);
    }

    #[test]
    fn config_rejects_bad_values() {
        let ok = EdgeEstimatorConfig::new(0.1, 2.0, 10.0, 5.0, 10, 0);
        assert!(ok.derive().is_ok());
        for bad in [
            EdgeEstimatorConfig { delta: 0.0, ..ok.clone() },
            EdgeEstimatorConfig { c: 1.0, ..ok.clone() },
            EdgeEstimatorConfig { g: 1.0, ..ok.clone() },
            EdgeEstimatorConfig { gamma: -1.0, ..ok.clone() },
            EdgeEstimatorConfig { gamma: f64::NAN, ..ok.clone() },
        ] {
            assert!(bad.derive().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn membership_is_deterministic() {
        let cfg = EdgeEstimatorConfig::new(1.0, 2.0, 2.0, 1e6, 1_000_000, 42);
        let mut est = EdgeArrivalEstimator::new(cfg).unwrap();
        assert!(est.params().p < 1.0);
        let first: Vec<bool> = (0..500).map(|v| est.is_sampled(v)).collect();
        let again: Vec<bool> = (0..500).rev().map(|v| est.is_sampled(v)).collect();
        assert!(first.iter().eq(again.iter().rev()));
    }

    #[test]
    fn full_sampling_tracks_every_degree() {
        let g = Graph::star(4);
        let cfg = EdgeEstimatorConfig::new(0.1, 2.0, 2.0, 1.0, g.n(), 0);
        let mut est = EdgeArrivalEstimator::new(cfg).unwrap();
        est.process_edge(Edge::new(0, 1).unwrap());
        assert_eq!(est.tracked_degree(0), Some(1));
        assert_eq!(est.tracked_degree(1), Some(1));
        assert_eq!(est.tracked_degree(2), None);
        for v in 2..=4 {
            est.process_edge(Edge::new(0, v).unwrap());
        }
        assert_eq!(est.tracked_degree(0), Some(4));
        assert_eq!(est.events_seen(), 4);
    }

    #[test]
    fn unsampled_endpoints_are_ignored() {
        // p tiny: almost no vertex is sampled.
        let cfg = EdgeEstimatorConfig::new(1.0, 2.0, 2.0, 1e12, 1000, 3)
            .with_chernoff_numerator(1e-6);
        let mut est = EdgeArrivalEstimator::new(cfg).unwrap();
        let p = est.params().p;
        assert!(p < 1e-6);
        let (u, v) = (0..1000)
            .flat_map(|u| (u + 1..1000).map(move |v| (u, v)))
            .find(|&(u, v)| !est.clone().is_sampled(u) && !est.clone().is_sampled(v))
            .unwrap();
        est.process_edge(Edge::new(u, v).unwrap());
        assert!(est.sampled.is_empty());
    }

    #[test]
    fn clique_with_full_sampling() {
        let g = Graph::complete(4);
        let cfg = EdgeEstimatorConfig::new(1e-9, 2.0, 10.0, 4.0, 4, 0);
        let report = run(&edge_stream(&g), cfg).unwrap();
        assert_eq!(report.params.p, 1.0);
        assert!(report.params.v0 <= 4.0);
        assert_eq!(report.beta_hat, 0.8);
        assert_eq!(report.sample_size, 4);
        assert_eq!(report.space_bits, 4 * BITS_PER_SAMPLE);
    }

    #[test]
    fn empty_stream_counts_isolated_vertices() {
        // gamma chosen so v0 = 1: ceil(log_2 10) = 4 classes, g = 2.
        let cfg = EdgeEstimatorConfig::new(0.1, 2.0, 2.0, 8.0, 10, 0);
        let report = run(&GraphStream::new(StreamMode::Edge, 10, vec![]), cfg).unwrap();
        assert_eq!(report.params.v0, 1.0);
        assert_eq!(report.beta_hat, 10.0);
        assert_eq!(report.class_counts[&ClassKey::Isolated], 10);
    }

    #[test]
    fn star_with_full_sampling() {
        // 6 vertices, c = 2: ceil(log_2 6) = 3 classes; gamma = 6 with g = 2
        // gives v0 = 1.
        let g = Graph::star(5);
        let cfg = EdgeEstimatorConfig::new(0.1, 2.0, 2.0, 6.0, 6, 0);
        let report = run(&edge_stream(&g), cfg).unwrap();
        assert_eq!(report.params.v0, 1.0);
        assert_eq!(report.contributions[&ClassKey::Degree(0)], 5.0 / 3.0);
        assert_eq!(report.contributions[&ClassKey::Degree(2)], 1.0 / 9.0);
        assert!((report.beta_hat - 16.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_drops_small_classes() {
        // One hub of degree 4 (class 2 for c = 2) among 4 leaves; with
        // v0 * p / (1 + delta) > 1 the lone hub is dropped.
        let g = Graph::star(4);
        let cfg = EdgeEstimatorConfig::new(0.1, 2.0, 1.5, 10.0, 5, 0);
        let report = run(&edge_stream(&g), cfg).unwrap();
        let v0 = report.params.v0;
        assert!(v0 / 1.1 > 1.0 && v0 / 1.1 <= 4.0, "v0 = {v0}");
        assert!(!report.contributions.contains_key(&ClassKey::Degree(2)));
        assert_eq!(report.beta_hat, 4.0 / 3.0);
    }

    #[test]
    fn phi_rejects_bad_inputs() {
        let s = edge_stream(&Graph::path(3));
        assert!(estimate_phi(&s, 2.0, 1.0, 0).is_err());
        assert!(estimate_phi(&s, 3.0, 0.0, 0).is_err());
        assert!(estimate_eps(&s, 1.0, 1.0, 0).is_err());
        let v = GraphStream::new(StreamMode::Vertex, 1, vec![]);
        assert!(matches!(
            estimate_eps(&v, 0.5, 1.0, 0),
            Err(EstimatorError::WrongMode { .. })
        ));
    }
}
