mod common;

use proptest::prelude::*;
use rainham::matching::{hopcroft_karp, matching_size};
use rainham::rainbow::{matching_spread_probe, sample_rainbow_matching, RainbowParams, RainbowSampler};
use rainham::rng;
use rainham::{ColoredFamily, Graph, VertexSet};
use rand::Rng as _;

/// Colors on `0..2t` that are random bipartite graphs between `0..t` and `t..2t`.
fn random_bipartite_family(t: usize, colors: usize, p: f64, seed: u64) -> ColoredFamily {
    let mut r = rng::rng(seed);
    let gs = (0..colors)
        .map(|_| {
            let mut g = Graph::new(2 * t);
            for u in 0..t {
                for v in t..2 * t {
                    if r.gen::<f64>() < p {
                        g.add_edge(u, v);
                    }
                }
            }
            g
        })
        .collect();
    ColoredFamily::new(2 * t, gs).unwrap()
}

fn check_rainbow(f: &ColoredFamily, left: &[usize], right: &[usize], edges: &[(usize, usize, usize)]) {
    let mut cols = std::collections::HashSet::new();
    let mut verts = std::collections::HashSet::new();
    for &(u, v, c) in edges {
        assert!(left.contains(&u) && right.contains(&v));
        assert!(f.has(c, u, v), "edge {u}-{v} not in color {c}");
        assert!(cols.insert(c), "color {c} twice");
        assert!(verts.insert(u) && verts.insert(v), "not a matching");
    }
}

#[test]
fn matchings_are_rainbow_and_record_sigma() {
    for s in 0..100u64 {
        let t = 6 + (s % 20) as usize;
        let f = random_bipartite_family(t, 2 * t, 0.7, s);
        let left: Vec<usize> = (0..t).collect();
        let right: Vec<usize> = (t..2 * t).collect();
        let colors: Vec<usize> = (0..2 * t).collect();
        let p = RainbowParams { eps: 0.2, strict: false, retries: 1, record: true };
        let sampler = RainbowSampler::new(&f, &left, &right, &colors, p).unwrap();
        let m = sampler.sample_once(s);
        check_rainbow(&f, &left, &right, &m.edges);
        let sigma: std::collections::HashMap<usize, usize> = m.sigma.iter().copied().collect();
        // σ is injective into the pool
        let mut img: Vec<usize> = sigma.values().copied().collect();
        img.sort_unstable();
        img.dedup();
        assert_eq!(img.len(), sigma.len());
        let samples: std::collections::HashMap<usize, Vec<usize>> = m.samples.iter().cloned().collect();
        for &(u, v, c) in &m.edges {
            // the color comes from an endpoint and the edge from that endpoint's sample
            let from_u = sigma.get(&u) == Some(&c) && samples.get(&u).is_some_and(|e| e.contains(&v));
            let from_v = sigma.get(&v) == Some(&c) && samples.get(&v).is_some_and(|e| e.contains(&u));
            assert!(from_u || from_v, "edge {u}-{v} color {c} not explained by σ and E");
        }
        for (w, e) in &samples {
            assert!(e.len() <= p.sample_size());
            for &x in e {
                assert!(f.has(sigma[w], *w, x));
            }
        }
    }
}

#[test]
fn large_matchings_on_dense_inputs() {
    let t = 60;
    let a = VertexSet::from_iter(2 * t, 0..t);
    let f = ColoredFamily::uniform(&Graph::complete_bipartite(2 * t, &a), 2 * t);
    let left: Vec<usize> = (0..t).collect();
    let right: Vec<usize> = (t..2 * t).collect();
    let colors: Vec<usize> = (0..2 * t).collect();
    let p = RainbowParams { eps: 0.1, strict: true, retries: 20, record: false };
    for s in 0..20 {
        let m = sample_rainbow_matching(&f, &left, &right, &colors, p, s).unwrap();
        assert!(m.edges.len() as f64 >= 0.6 * t as f64);
        check_rainbow(&f, &left, &right, &m.edges);
    }
}

#[test]
fn strict_mode_rejects_sparse_colors() {
    let f = random_bipartite_family(10, 20, 0.2, 1);
    let left: Vec<usize> = (0..10).collect();
    let right: Vec<usize> = (10..20).collect();
    let colors: Vec<usize> = (0..20).collect();
    let p = RainbowParams { eps: 0.1, strict: true, retries: 5, record: false };
    assert!(RainbowSampler::new(&f, &left, &right, &colors, p).is_err());
    assert!(RainbowSampler::new(&f, &left, &left, &colors, RainbowParams::default()).is_err());
}

#[test]
fn probe_of_impossible_edge_never_hits() {
    let t = 8;
    let f = random_bipartite_family(t, 2 * t, 0.9, 3);
    let left: Vec<usize> = (0..t).collect();
    let right: Vec<usize> = (t..2 * t).collect();
    let colors: Vec<usize> = (0..2 * t).collect();
    let s = RainbowSampler::new(&f, &left, &right, &colors, RainbowParams { eps: 0.2, ..Default::default() }).unwrap();
    // an edge inside the left side is never matched
    let rep = matching_spread_probe(&s, &[(0, 1, 0)], 500, 1);
    assert_eq!(rep.hits, 0);
    assert!(rep.interval.hi < 0.01);
}

#[test]
fn hopcroft_karp_matches_kuhn() {
    let mut r = rng::rng(99);
    for _ in 0..100 {
        let left = r.gen_range(1..30);
        let right = r.gen_range(1..30);
        let p: f64 = r.gen_range(0.02..0.5);
        let adj: Vec<Vec<usize>> = (0..left).map(|_| (0..right).filter(|_| r.gen::<f64>() < p).collect()).collect();
        let mate = hopcroft_karp(&adj, right);
        assert_eq!(matching_size(&mate), common::kuhn(&adj, right));
        let mut used = vec![false; right];
        for (u, m) in mate.iter().enumerate() {
            if let Some(v) = *m {
                assert!(adj[u].contains(&v));
                assert!(!used[v]);
                used[v] = true;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_matchings_are_rainbow(seed in any::<u64>(), t in 2usize..16, pool in 0usize..3) {
        let f = random_bipartite_family(t, 2 * t, 0.6, seed);
        let left: Vec<usize> = (0..t).collect();
        let right: Vec<usize> = (t..2 * t).collect();
        // pools smaller, equal to and larger than the vertex count
        let ncol = [t, 2 * t, 2 * t][pool];
        let colors: Vec<usize> = (0..ncol).collect();
        let s = RainbowSampler::new(&f, &left, &right, &colors, RainbowParams { eps: 0.25, ..Default::default() }).unwrap();
        let m = s.sample_once(seed);
        check_rainbow(&f, &left, &right, &m.edges);
    }
}
