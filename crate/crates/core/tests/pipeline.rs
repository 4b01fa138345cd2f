use std::collections::HashSet;

use rainham::extremal::{compute_r, Mode};
use rainham::family::{extremal_construction, generate, FamilyGenerator, GeneratorKind};
use rainham::graph::{Graph, VertexSet};
use rainham::pipeline::*;
use rainham::transversal::validate_transversal;
use rainham::{ColoredFamily, Error, Transversal};

fn gen(kind: GeneratorKind, seed: u64) -> ColoredFamily {
    generate(&FamilyGenerator::new(kind, seed)).unwrap()
}

fn bip(n: usize, noise: usize, cc: usize) -> ColoredFamily {
    gen(GeneratorKind::RandomBipartiteNearComplete { n, noise, clique_colors: cc }, 3)
}

fn cliques(n: usize, noise: usize) -> ColoredFamily {
    gen(GeneratorKind::RandomTwoCliques { n, noise }, 3)
}

fn params() -> PipelineParams {
    PipelineParams { fallback_n: 0, ..PipelineParams::default() }
}

/// Rainbow path whose edges lie in their colors.
fn assert_rainbow_path(f: &ColoredFamily, t: &Transversal) {
    assert!(!t.closed);
    assert_eq!(t.colors.len() + 1, t.vertices.len());
    let vs: HashSet<usize> = t.vertices.iter().copied().collect();
    assert_eq!(vs.len(), t.vertices.len(), "repeated vertex");
    let cs: HashSet<usize> = t.colors.iter().copied().collect();
    assert_eq!(cs.len(), t.colors.len(), "repeated color");
    for (w, &c) in t.vertices.windows(2).zip(&t.colors) {
        assert!(f.has(c, w[0], w[1]), "edge {w:?} not in color {c}");
    }
}

#[test]
fn case_one_cleanup_passes_frame_checks() {
    let f = bip(60, 10, 2);
    let p = params();
    let c = cleanup_bipartite(&f, &p, 5).unwrap();
    assert!(validate_bipartite_frame(&f, &c.frame, &p.extremal).is_empty());
    assert_rainbow_path(&f, &c.prefix);
    assert_eq!(c.prefix.vertices[0], c.frame.v1);
    assert_eq!(*c.prefix.vertices.last().unwrap(), c.frame.v2);
    // prefix and residual colors partition the palette
    let mut all: Vec<usize> = c.prefix.colors.iter().chain(&c.frame.colors).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..60).collect::<Vec<_>>());
}

#[test]
fn case_one_rejects_other_classes() {
    let p = params();
    let exc = extremal_construction(40).unwrap();
    assert!(matches!(cleanup_bipartite(&exc, &p, 1), Err(Error::Precondition(_))));
    let k = gen(GeneratorKind::AllClique { n: 40, m: None }, 0);
    assert!(matches!(cleanup_bipartite(&k, &p, 1), Err(Error::Precondition(_))));
}

#[test]
fn case_two_cleanup_passes_frame_checks() {
    let f = cliques(60, 8);
    let p = params();
    let c = cleanup_cliques(&f, &p, 2).unwrap();
    let ends = [c.p1.vertices[0], *c.p1.vertices.last().unwrap(), c.p2.vertices[0], c.p2.vertices[1]];
    assert!(validate_clique_frame(&f, &c.frame, ends, &p.extremal).is_empty());
    assert_eq!(c.frame.a.len() % 2, 0);
    assert_eq!(c.frame.b.len() % 2, 0);
    assert_rainbow_path(&f, &c.p1);
    assert_rainbow_path(&f, &c.p2);
    assert_eq!(c.p2.vertices.len(), 2);
}

#[test]
fn case_two_rejects_bipartite_families() {
    assert!(matches!(cleanup_cliques(&bip(40, 4, 0), &params(), 1), Err(Error::Precondition(_))));
}

#[test]
fn case_two_parity_edge_follows_class_sizes() {
    let p = params();
    // no near-bipartite colors: |C_1 ∪ C_2| = 0 is even
    let c = cleanup_cliques(&cliques(40, 4), &p, 1).unwrap();
    assert_eq!(c.class_sizes[0] + c.class_sizes[1], 0);
    assert!(c.parity_edge);
    // five bipartite colors: odd, no parity edge
    let c = cleanup_cliques(&bip(40, 2, 35), &p, 1).unwrap();
    assert_eq!(c.class_sizes[0] + c.class_sizes[1], 5);
    assert!(!c.parity_edge);
}

#[test]
fn exceptional_path_on_the_construction() {
    let f = extremal_construction(6).unwrap();
    let cert = compute_r(&f, Mode::Exact, &Default::default()).unwrap();
    let w = Witness { edge: (0, 3), color: 5 };
    assert!(witness_valid(&f, &cert, &w));
    let ep = sample_exceptional_path(&f, &cert, w, &ExtremalParams::default(), 4).unwrap();
    let t = &ep.path;
    assert_eq!((t.vertices[0], *t.vertices.last().unwrap()), (0, 3));
    assert_rainbow_path(&f, t);
    assert!(!t.colors.contains(&5));
    let mut colors = t.colors.clone();
    colors.push(5);
    validate_transversal(&f, &Transversal::cycle(t.vertices.clone(), colors)).unwrap();
}

#[test]
fn exceptional_path_rejects_bad_witnesses() {
    let f = extremal_construction(6).unwrap();
    let cert = compute_r(&f, Mode::Exact, &Default::default()).unwrap();
    let p = ExtremalParams::default();
    // a crossing edge of a bipartite color in C
    let bad = Witness { edge: (0, 3), color: 0 };
    assert!(matches!(sample_exceptional_path(&f, &cert, bad, &p, 1), Err(Error::InvalidWitness(_))));
    // color 5 has no edge 0-4
    let bad = Witness { edge: (0, 4), color: 5 };
    assert!(matches!(sample_exceptional_path(&f, &cert, bad, &p, 1), Err(Error::InvalidWitness(_))));
}

#[test]
fn no_witness_without_the_matching() {
    let n = 6;
    let a = VertexSet::from_iter(n, 0..3);
    let mut colors = vec![Graph::complete_bipartite(n, &a); 5];
    colors.push(Graph::from_edges(n, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]));
    let f = ColoredFamily::new(n, colors).unwrap();
    let cert = compute_r(&f, Mode::Exact, &Default::default()).unwrap();
    assert_eq!(cert.value, 0);
    assert!(witnesses(&f, &cert).is_empty());
}

#[test]
fn exceptional_route_at_forty() {
    let f = extremal_construction(40).unwrap();
    let out = sample_transversal(&f, &params(), 9).unwrap();
    assert_eq!(out.route, Route::Exceptional);
    assert!(!out.fallback);
    validate_transversal(&f, &out.transversal).unwrap();
}

#[test]
fn dispatcher_small_families_use_the_exact_solver() {
    for n in [4, 6, 8, 10] {
        for (i, kind) in [
            GeneratorKind::AllClique { n, m: None },
            GeneratorKind::ExtremalConstruction { n },
            GeneratorKind::RandomDirac { n, p0: 0.6, m: None, max_rejections: 10_000 },
        ]
        .into_iter()
        .enumerate()
        {
            let f = gen(kind, i as u64);
            let out = sample_transversal(&f, &PipelineParams::default(), 1).unwrap();
            assert_eq!(out.route, Route::Exact);
            assert!(out.fallback);
            validate_transversal(&f, &out.transversal).unwrap();
        }
    }
}

#[test]
fn dispatcher_routes_match_classification() {
    let p = params();
    let cases = [
        (bip(40, 6, 2), Route::Bipartite),
        (bip(60, 4, 20), Route::Cliques),
        (cliques(40, 6), Route::Cliques),
        (bip(40, 0, 1), Route::Exceptional),
    ];
    for (f, want) in cases {
        assert_eq!(classify(&f, &p).unwrap().route, want);
        let out = sample_transversal(&f, &p, 11).unwrap();
        assert_eq!(out.route, want);
        assert_eq!(out.class, Some(want));
        assert_eq!(out.preset, "desk");
        validate_transversal(&f, &out.transversal).unwrap();
    }
}

#[test]
fn dispatcher_all_clique_400_takes_the_pipeline() {
    let f = gen(GeneratorKind::AllClique { n: 400, m: None }, 0);
    let out = sample_transversal(&f, &params(), 3).unwrap();
    assert_eq!(out.route, Route::Nonextremal);
    assert!(!out.fallback);
    validate_transversal(&f, &out.transversal).unwrap();
}

#[test]
fn dispatcher_rejects_non_dirac_colors() {
    let n = 12;
    let mut colors = vec![Graph::complete(n); n - 1];
    colors.push(Graph::from_edges(n, &[(0, 1)]));
    let f = ColoredFamily::new(n, colors).unwrap();
    assert!(matches!(sample_transversal(&f, &params(), 0), Err(Error::Precondition(_))));
}

#[test]
fn forced_route_must_match_the_class() {
    let f = cliques(40, 4);
    let p = params();
    assert!(matches!(sample_transversal_route(&f, &p, RouteRequest::Exceptional, 0), Err(Error::Precondition(_))));
    let out = sample_transversal_route(&f, &p, RouteRequest::Extremal, 0).unwrap();
    assert_eq!(out.route, Route::Cliques);
}

#[test]
fn same_seed_same_cycle_and_seeds_vary() {
    let f = bip(40, 6, 2);
    let p = params();
    let a = sample_transversal(&f, &p, 21).unwrap();
    let b = sample_transversal(&f, &p, 21).unwrap();
    assert_eq!(a, b);
    let distinct: HashSet<Transversal> = (0..8).map(|s| sample_transversal(&f, &p, s).unwrap().transversal).collect();
    assert!(distinct.len() > 4);
}
