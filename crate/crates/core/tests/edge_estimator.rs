use proptest::prelude::*;
use rayon::prelude::*;

use betastream::degree_classes::{heavy_classes, partition};
use betastream::edge_arrival::{estimate_eps, estimate_phi, run, EdgeArrivalEstimator, EdgeEstimatorConfig};
use betastream::graph::{beta_exact, materialize, Graph, GraphStream, StreamMode};
use betastream::harness::flatten_to_edges;
use betastream::stream_gen::{gen_gadget_stream, gen_gnm, to_stream, GadgetSpec, OrderPolicy};

fn shuffled(g: &Graph, seed: u64) -> GraphStream {
    to_stream(g, StreamMode::Edge, &OrderPolicy::UniformShuffle(seed)).unwrap()
}

/// Sparse instance where the default constants already give `p < 1`.
fn sampling_instance() -> (Graph, GraphStream, EdgeEstimatorConfig) {
    let g = gen_gnm(100_000, 50_000, 17).unwrap();
    let stream = shuffled(&g, 17);
    let cfg = EdgeEstimatorConfig::new(1.0, 2.0, 2.0, beta_exact(&g), g.n(), 0);
    (g, stream, cfg)
}

#[test]
fn sampled_degrees_match_graph() {
    let (g, stream, cfg) = sampling_instance();
    let mut est = EdgeArrivalEstimator::new(cfg).unwrap();
    assert!(est.params().p < 0.5, "p = {}", est.params().p);
    for ev in &stream.events {
        est.process(ev);
    }
    let mut checked = 0;
    for v in 0..g.n() as u32 {
        let tracked = est.tracked_degree(v);
        if est.is_sampled(v) && g.degree(v) > 0 {
            assert_eq!(tracked, Some(g.degree(v) as u64));
            checked += 1;
        } else if !est.is_sampled(v) {
            assert_eq!(tracked, None);
        }
    }
    assert!(checked > 1000);
}

#[test]
fn concentration_and_sample_size() {
    let (g, stream, cfg) = sampling_instance();
    let beta = beta_exact(&g);
    let (_, stats) = partition(&g, cfg.c).unwrap();
    let heavy = heavy_classes(&stats, cfg.g, beta);
    let floor: f64 = heavy.iter().map(|&k| stats.beta_prime_of(k)).sum::<f64>() / (1.0 + cfg.delta);
    let ceiling = (1.0 + cfg.delta) * beta;

    let reports: Vec<_> = (0..100u64)
        .into_par_iter()
        .map(|seed| run(&stream, EdgeEstimatorConfig { seed, ..cfg.clone() }).unwrap())
        .collect();
    let inside = reports
        .iter()
        .filter(|r| floor <= r.beta_hat && r.beta_hat <= ceiling)
        .count();
    assert!(inside >= 90, "{inside}/100 in [{floor}, {ceiling}]");

    let p = reports[0].params.p;
    let n = g.n() as f64;
    let mean = reports.iter().map(|r| r.sample_size as f64).sum::<f64>() / 100.0;
    let sigma = (n * p * (1.0 - p) / 100.0).sqrt();
    assert!((mean - n * p).abs() <= 3.0 * sigma, "mean {mean}, n p {}, sigma {sigma}", n * p);
    for r in &reports {
        assert!(r.space_bits >= r.sample_size as u64 * 128);
        let total: f64 = r.contributions.values().sum();
        assert_eq!(r.beta_hat, total);
    }
}

#[test]
fn edge_order_does_not_matter() {
    let (g, _, cfg) = sampling_instance();
    let a = run(&shuffled(&g, 1), cfg.clone()).unwrap();
    let b = run(&shuffled(&g, 2), cfg.clone()).unwrap();
    let c = run(&to_stream(&g, StreamMode::Edge, &OrderPolicy::ByDegreeDescending).unwrap(), cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn oracle_fed_gamma() {
    let g = gen_gnm(10_000, 40_000, 5).unwrap();
    let stream = shuffled(&g, 5);
    let beta = beta_exact(&g);
    let good = (0..20u64)
        .into_par_iter()
        .filter(|&seed| {
            let r = estimate_eps(&stream, 0.25, beta, seed).unwrap();
            r.beta_hat <= 1.25 * beta && beta <= 1.25 * r.beta_hat
        })
        .count();
    assert!(good >= 18, "{good}/20");
}

#[test]
fn edgeless_graph_is_concentrated() {
    let n = 50_000;
    let stream = GraphStream::new(StreamMode::Edge, n, Vec::new());
    // Loose constants so that p < 1 and the isolated bucket is sampled.
    let cfg = EdgeEstimatorConfig::new(0.5, 2.0, 2.0, n as f64, n, 3);
    let r = run(&stream, cfg.clone()).unwrap();
    assert!(r.params.p < 1.0);
    let (lo, hi) = (n as f64 / (1.0 + cfg.delta), n as f64 * (1.0 + cfg.delta));
    assert!(lo <= r.beta_hat && r.beta_hat <= hi, "{}", r.beta_hat);
    let r = estimate_eps(&stream, 0.5, 10.0, 0).unwrap();
    assert_eq!(r.beta_hat, n as f64);
}

#[test]
fn phi_takes_inner_branch_when_beta_is_large() {
    // Mostly isolated vertices: beta ~ 1900.
    let g = gen_gnm(2000, 300, 2).unwrap();
    let beta = beta_exact(&g);
    let phi = 3.0;
    let gamma_prime = beta / (phi * phi);
    let r = estimate_phi(&shuffled(&g, 2), phi, gamma_prime, 0).unwrap();
    assert!(r.used_inner);
    assert!(r.value <= 1.25 * beta && beta <= 1.25 * r.value);
}

#[test]
fn phi_falls_back_on_dense_instances() {
    let spec = GadgetSpec::new(4, 2, 2, [0, 1], [2, 3]).unwrap();
    let (stream, _) = gen_gadget_stream(&spec, 0).unwrap();
    let stream = flatten_to_edges(&stream);
    let beta = beta_exact(&materialize(&stream).unwrap());
    let phi = 3.0;
    // beta <= gamma' phi^2 / 2 with gamma' <= beta.
    let gamma_prime = beta;
    let r = estimate_phi(&stream, phi, gamma_prime, 0).unwrap();
    assert!(beta <= gamma_prime * phi * phi / 2.0);
    assert!(!r.used_inner);
    assert_eq!(r.value, gamma_prime * phi);
    assert!(r.value / beta <= phi);
}

#[test]
fn phi_three_with_exact_gamma() {
    let g = gen_gnm(3000, 6000, 9).unwrap();
    let stream = shuffled(&g, 9);
    let beta = beta_exact(&g);
    for seed in 0..50 {
        let v = estimate_phi(&stream, 3.0, beta, seed).unwrap().value;
        assert!(v <= 3.0 * beta && beta <= 3.0 * v, "seed {seed}: {v} vs {beta}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reports_are_deterministic(n in 2usize..300, density in 0.0f64..1.0, seed in any::<u64>()) {
        let m = ((n * (n - 1) / 2) as f64 * density * 0.2) as usize;
        let g = gen_gnm(n, m, seed).unwrap();
        let stream = shuffled(&g, seed);
        let cfg = EdgeEstimatorConfig::new(0.5, 1.5, 3.0, 1.0 + beta_exact(&g) / 2.0, n, seed)
            .with_chernoff_numerator(0.05);
        let a = run(&stream, cfg.clone()).unwrap();
        let b = run(&stream, cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn upper_bound_with_full_sampling(n in 1usize..200, density in 0.0f64..1.0, seed in any::<u64>()) {
        let m = ((n * n.saturating_sub(1) / 2) as f64 * density) as usize;
        let g = gen_gnm(n, m, seed).unwrap();
        let beta = beta_exact(&g);
        let r = estimate_eps(&shuffled(&g, seed), 0.5, beta * 7.0, seed).unwrap();
        prop_assert_eq!(r.params.p, 1.0);
        prop_assert!(r.beta_hat <= beta);
    }
}
