use proptest::prelude::*;
use rand::Rng as _;

use rainham::exact::all_transversals;
use rainham::family::{generate, FamilyGenerator, GeneratorKind};
use rainham::rng;
use rainham::spread::*;
use rainham::{validate_transversal, ColoredFamily, Graph, Transversal};

fn clique(n: usize) -> ColoredFamily {
    ColoredFamily::uniform(&Graph::complete(n), n)
}

/// Counts (vertex order, color order) pairs by brute force over permutations,
/// each undirected cycle counted once.
fn brute_containing(f: &ColoredFamily, e: ColoredEdge) -> (u64, u64) {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(k - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, k - 1);
                out.push(q);
            }
        }
        out
    }
    let n = f.n();
    let (mut total, mut hit) = (0, 0);
    for rest in perms(n - 1) {
        let order: Vec<usize> = std::iter::once(0).chain(rest.iter().map(|x| x + 1)).collect();
        if order[1] > order[n - 1] {
            continue;
        }
        for cols in perms(n) {
            let ok = (0..n).all(|i| f.has(cols[i], order[i], order[(i + 1) % n]));
            if !ok {
                continue;
            }
            total += 1;
            let has = (0..n).any(|i| colored_edge(order[i], order[(i + 1) % n], cols[i]) == e);
            hit += has as u64;
        }
    }
    (total, hit)
}

#[test]
fn uniform_all_clique_five_matches_enumeration() {
    let f = clique(5);
    let dist = uniform_distribution(&f, 6).unwrap();
    assert_eq!(dist.len(), 1440);
    let probes = singleton_probes(&f);
    assert_eq!(probes.len(), 10 * 5);
    let sp = exact_spread(&dist, &probes).unwrap();
    assert!(sp.exact);
    for pr in &sp.probes {
        let (total, hit) = brute_containing(&f, pr.set[0]);
        assert_eq!(total, 1440);
        assert!((pr.frequency - hit as f64 / total as f64).abs() < 1e-12);
        // each edge lies in half of the 12 cycles, each color equally likely
        assert!((pr.frequency - 0.1).abs() < 1e-12);
    }
    assert!((sp.q_hat - 0.1).abs() < 1e-12);
}

#[test]
fn uniform_on_an_irregular_family_matches_enumeration() {
    let f = generate(&FamilyGenerator::new(GeneratorKind::RandomDirac { n: 5, p0: 0.5, m: None, max_rejections: 10_000 }, 7)).unwrap();
    let dist = uniform_distribution(&f, 6).unwrap();
    for (t, _) in &dist {
        validate_transversal(&f, t).unwrap();
    }
    let sp = exact_spread(&dist, &singleton_probes(&f)).unwrap();
    for pr in &sp.probes {
        let (total, hit) = brute_containing(&f, pr.set[0]);
        assert_eq!(total as usize, dist.len());
        assert!((pr.frequency - hit as f64 / total as f64).abs() < 1e-12);
    }
}

#[test]
fn absent_edge_has_frequency_zero() {
    let f = clique(5);
    let dist = uniform_distribution(&f, 6).unwrap();
    let sp = exact_spread(&dist, &[vec![(0, 1, 7)]]).unwrap();
    assert_eq!(sp.probes[0].frequency, 0.0);
    let sampler = |s: u64| Ok(dist[(s % 1440) as usize].0.clone());
    let mc = estimate_spread(&sampler, &[vec![(0, 1, 9)]], 200, 1).unwrap();
    assert_eq!(mc.probes[0].hits, 0);
}

#[test]
fn empty_probe_list_is_rejected() {
    let sampler = |_: u64| -> rainham::Result<Transversal> { unreachable!() };
    assert!(estimate_spread(&sampler, &[], 10, 0).is_err());
}

#[test]
fn failed_draws_are_counted_not_sampled() {
    let t = all_transversals(&clique(4), 6).unwrap();
    let sampler = |s: u64| {
        if s % 3 == 0 {
            Err(rainham::Error::Precondition("x".into()))
        } else {
            Ok(t[0].clone())
        }
    };
    let sp = estimate_spread(&sampler, &[vec![(0, 1, 0)]], 300, 2).unwrap();
    assert_eq!(sp.trials + sp.failures, 300);
    assert!(sp.failures > 0);
}

#[test]
fn quadrupling_trials_halves_interval_width() {
    let f = clique(5);
    let dist = uniform_distribution(&f, 6).unwrap();
    let sampler = |s: u64| {
        let mut r = rng::rng(s);
        Ok(dist[r.gen_range(0..dist.len())].0.clone())
    };
    let probes = singleton_probes(&f);
    let w = |trials| {
        let sp = estimate_spread(&sampler, &probes, trials, 5).unwrap();
        let ws: Vec<f64> = sp.probes.iter().map(|p| p.interval.unwrap().hi - p.interval.unwrap().lo).collect();
        ws.iter().sum::<f64>() / ws.len() as f64
    };
    let (a, b) = (w(2000), w(8000));
    let ratio = b / a;
    assert!((ratio - 0.5).abs() <= 0.1, "ratio {ratio}");
}

#[test]
fn estimate_is_deterministic_per_seed() {
    let dist = uniform_distribution(&clique(5), 6).unwrap();
    let sampler = |s: u64| Ok(dist[(s % 1440) as usize].0.clone());
    let probes = stratified_probes(&clique(5), 20, 5, 3);
    assert_eq!(estimate_spread(&sampler, &probes, 500, 9).unwrap(), estimate_spread(&sampler, &probes, 500, 9).unwrap());
}

#[test]
fn zp_curve_endpoints_and_monotonicity() {
    let f = clique(8);
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let curve = zp_experiment(&f, &grid, 40, 4, 2_000_000).unwrap();
    assert_eq!(curve[0].frequency, Some(0.0));
    assert_eq!(curve[10].frequency, Some(1.0));
    for w in curve.windows(2) {
        let (a, b) = (w[0].interval.unwrap(), w[1].interval.unwrap());
        // nondecreasing within interval overlap
        assert!(b.hi >= a.lo, "{w:?}");
    }
}

#[test]
fn stratified_probe_sizes() {
    let f = clique(12);
    let ps = stratified_probes(&f, 1000, 100, 0);
    assert_eq!(ps.iter().filter(|s| s.len() == 1).count(), 1000);
    assert_eq!(ps.iter().filter(|s| s.len() == 2).count(), 100);
    for s in &ps {
        for &(u, v, c) in s {
            assert!(u < v && f.has(c, u, v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frequencies_in_unit_interval_and_q_monotone(seed in any::<u64>(), k in 1usize..30) {
        let f = clique(5);
        let dist = uniform_distribution(&f, 6).unwrap();
        let sampler = |s: u64| Ok(dist[(s % 1440) as usize].0.clone());
        let probes = stratified_probes(&f, k, k / 2, seed);
        let sp = estimate_spread(&sampler, &probes, 100, seed).unwrap();
        for p in &sp.probes {
            prop_assert!((0.0..=1.0).contains(&p.frequency));
            let i = p.interval.unwrap();
            prop_assert!(i.lo <= p.frequency + 1e-12 && p.frequency <= i.hi + 1e-12);
        }
        let mut more = probes.clone();
        more.extend(stratified_probes(&f, 5, 5, seed ^ 1));
        let sp2 = estimate_spread(&sampler, &more, 100, seed).unwrap();
        prop_assert!(sp2.q_hat >= sp.q_hat);
    }

    #[test]
    fn sparsify_keeps_a_subfamily(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let f = clique(7);
        let mut r = rng::rng(seed);
        let g = sparsify(&f, p, &mut r);
        let h = intersect_random(&f, p, &mut r);
        for c in 0..7 {
            for (u, v) in g.color(c).edges() { prop_assert!(f.has(c, u, v)); }
            for (u, v) in h.color(c).edges() { prop_assert!(f.has(c, u, v)); }
        }
        // shared sparsification: all colors agree on the kept graph
        for c in 1..7 { prop_assert_eq!(h.color(c), h.color(0)); }
    }
}
