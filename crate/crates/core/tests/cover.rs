use rainham::cover::*;
use rainham::family::{generate, FamilyGenerator, GeneratorKind};
use rainham::Error;

fn clique(n: usize) -> rainham::ColoredFamily {
    generate(&FamilyGenerator::new(GeneratorKind::AllClique { n, m: None }, 0)).unwrap()
}

fn frame() -> (Vec<usize>, Vec<usize>) {
    ((0..300).collect(), (300..390).collect())
}

#[test]
fn clique_300_into_90() {
    let f = clique(400);
    let (u, v) = frame();
    let colors: Vec<usize> = (0..305).collect();
    let pc = cover_down(&f, &u, &v, &[], &colors, &CoverParams::default(), 1).unwrap();
    let rep = validate_path_cover(&pc, &f);
    assert!(rep.ok, "{:?}", rep.violations);
    assert_eq!(pc.paths.len(), 5);
}

#[test]
fn forced_matching_is_absorbed() {
    let f = clique(400);
    let (u, v) = frame();
    let m: Vec<(usize, usize)> = (0..40).map(|i| (2 * i, 2 * i + 1)).collect();
    // |C| + |M| - |U| = 4
    let colors: Vec<usize> = (0..264).collect();
    let pc = cover_down(&f, &u, &v, &m, &colors, &CoverParams::default(), 2).unwrap();
    let rep = validate_path_cover(&pc, &f);
    assert!(rep.ok, "{:?}", rep.violations);
    assert_eq!(pc.paths.len(), 4);
    let uncolored: usize = pc.paths.iter().map(|p| p.colors.iter().filter(|c| c.is_none()).count()).sum();
    assert_eq!(uncolored, 40);
}

#[test]
fn single_path_when_balance_is_one() {
    let f = clique(60);
    let u: Vec<usize> = (0..36).collect();
    let v: Vec<usize> = (36..47).collect();
    let m = vec![(0, 1), (2, 3)];
    let colors: Vec<usize> = (0..35).collect();
    let pc = cover_down(&f, &u, &v, &m, &colors, &CoverParams::default(), 3).unwrap();
    assert!(validate_path_cover(&pc, &f).ok);
    assert_eq!(pc.paths.len(), 1);
    assert_eq!(pc.paths[0].vertices.len(), 38);
}

#[test]
fn length_zero_paths_get_two_ends() {
    let f = clique(400);
    let (u, v) = frame();
    let colors: Vec<usize> = (0..306).collect();
    for seed in 0..4 {
        let pc = cover_down(&f, &u, &v, &[], &colors, &CoverParams::default(), seed).unwrap();
        assert!(validate_path_cover(&pc, &f).ok);
        for p in &pc.paths {
            if p.vertices.len() == 3 {
                assert!(u.contains(&p.vertices[1]));
                assert_ne!(p.vertices[0], p.vertices[2]);
            }
        }
    }
}

#[test]
fn preconditions() {
    let f = clique(400);
    let (u, v) = frame();
    let p = CoverParams::default();
    let colors: Vec<usize> = (0..305).collect();
    let e = cover_down(&f, &u, &v, &[(0, 350)], &colors, &p, 0);
    assert!(matches!(e, Err(Error::Precondition(_))));
    let e = cover_down(&f, &u, &v, &[], &(0..300).collect::<Vec<_>>(), &p, 0);
    assert!(matches!(e, Err(Error::Precondition(s)) if s.contains("below 1")));
    let e = cover_down(&f, &u, &v[..40], &[], &colors, &p, 0);
    assert!(matches!(e, Err(Error::Precondition(_))));
    let e = cover_down(&f, &u, &v, &[], &(0..320).collect::<Vec<_>>(), &p, 0);
    assert!(matches!(e, Err(Error::Precondition(s)) if s.contains("0.1|V|")));
}

#[test]
fn validator_rejects_broken_covers() {
    let f = clique(400);
    let (u, v) = frame();
    let colors: Vec<usize> = (0..305).collect();
    let pc = cover_down(&f, &u, &v, &[], &colors, &CoverParams::default(), 5).unwrap();

    let mut shared = pc.clone();
    let x = shared.paths[0].vertices[1];
    shared.paths[1].vertices[1] = x;
    assert!(validate_path_cover(&shared, &f).violations.iter().any(|s| s == "paths are not disjoint"));

    let mut inner = pc.clone();
    let w = inner.paths[0].vertices[0];
    let idx = inner.paths[1].vertices.len() / 2;
    inner.paths[1].vertices[idx] = w;
    inner.paths[0].vertices[0] = 395;
    let rep = validate_path_cover(&inner, &f);
    assert!(rep.violations.iter().any(|s| s == "interior outside U"));

    let mut dup = pc.clone();
    let c = dup.paths[0].colors[0];
    dup.paths[1].colors[0] = c;
    assert!(validate_path_cover(&dup, &f).violations.iter().any(|s| s.contains("rainbow")));
}
