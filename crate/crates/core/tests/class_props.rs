use proptest::prelude::*;

use betastream::degree_classes::{heavy_classes, partition, GeometricClasses};
use betastream::graph::{beta_exact, Graph};
use betastream::stream_gen::gen_gnm;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let max_m = n * (n - 1) / 2;
        (Just(n), 0..=max_m, any::<u64>()).prop_map(|(n, m, seed)| gen_gnm(n, m, seed).unwrap())
    })
}

fn growth() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.1), Just(1.5), Just(2.0), 1.01f64..4.0]
}

proptest! {
    #[test]
    fn per_class_sandwich(g in graph(120), c in growth()) {
        let (_, stats) = partition(&g, c).unwrap();
        for key in stats.keys() {
            let (b, bp) = (stats.beta_of(key), stats.beta_prime_of(key));
            prop_assert!(bp <= b && b <= c * bp, "{key:?}: {bp} {b}");
        }
    }

    #[test]
    fn classes_cover_every_vertex(g in graph(120), c in growth()) {
        let (part, stats) = partition(&g, c).unwrap();
        prop_assert_eq!(part.class_sizes.iter().sum::<usize>() + part.isolated_count, g.n());
        let classes = GeometricClasses::new(c, g.n()).unwrap();
        for d in g.degrees().filter(|&d| d > 0) {
            let i = classes.index(d as u64).unwrap();
            prop_assert!(c.powi(i as i32) <= d as f64 * (1.0 + 1e-12));
            prop_assert!((d as f64) < c.powi(i as i32 + 1) * (1.0 + 1e-12));
        }
        let beta = beta_exact(&g);
        prop_assert!((stats.total_beta() - beta).abs() <= 1e-12 * beta);
    }

    #[test]
    fn heavy_light_accounting(g in graph(120), c in growth(), gg in prop_oneof![Just(2.0), Just(10.0), 1.5f64..50.0]) {
        let beta = beta_exact(&g);
        let (part, stats) = partition(&g, c).unwrap();
        let heavy = heavy_classes(&stats, gg, beta);
        let heavy_prime: f64 = heavy.iter().map(|&k| stats.beta_prime_of(k)).sum();
        prop_assert!(heavy_prime <= beta);
        prop_assert!(beta <= gg * c / (gg - 1.0) * heavy_prime);
        let light: f64 = stats.keys().filter(|k| !heavy.contains(k)).map(|k| stats.beta_of(k)).sum();
        prop_assert!(light <= beta / gg);
        let floor = beta / (stats.num_classes() as f64 * gg);
        for &k in &heavy {
            prop_assert!(part.size(k) as f64 >= floor);
        }
    }
}

#[test]
fn sandwich_on_sparse_random_graphs() {
    for seed in 0..50 {
        let g = gen_gnm(50, 120, seed).unwrap();
        for c in [1.1, 1.5, 2.0] {
            let (_, stats) = partition(&g, c).unwrap();
            for key in stats.keys() {
                assert!(stats.beta_prime_of(key) <= stats.beta_of(key));
                assert!(stats.beta_of(key) <= c * stats.beta_prime_of(key));
            }
        }
    }
}

#[test]
fn huge_g_makes_every_class_heavy() {
    let g = gen_gnm(200, 900, 3).unwrap();
    let (part, stats) = partition(&g, 1.5).unwrap();
    let heavy = heavy_classes(&stats, 1e12, beta_exact(&g));
    let nonempty = stats.keys().filter(|&k| part.size(k) > 0).count();
    assert_eq!(heavy.len(), nonempty);
}
