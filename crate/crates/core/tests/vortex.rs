use rainham::family::{generate, FamilyGenerator, GeneratorKind};
use rainham::vortex::*;
use rainham::Error;

fn clique(n: usize) -> rainham::ColoredFamily {
    generate(&FamilyGenerator::new(GeneratorKind::AllClique { n, m: None }, 0)).unwrap()
}

#[test]
fn clique_400_vortex_and_absorber() {
    let f = clique(400);
    let p = VortexParams::default();
    let s = sample_vortex_absorber(&f, &p, 11).unwrap();
    let v = &s.vortex;
    assert_eq!(v.levels(), 4);
    let sizes: Vec<usize> = v.v_parts.iter().map(Vec::len).collect();
    assert_eq!(sizes, vec![233, 120, 36, 11]);
    assert!(verify_vortex(v, &f).ok);

    let a = &s.absorber;
    assert_eq!((a.m_abs.len(), a.c_abs.len()), (42, 40));
    let mut seen = std::collections::HashSet::new();
    for &(x, y) in &a.m_abs {
        assert!(seen.insert(x) && seen.insert(y), "M_abs is not a matching");
        assert!(v.v_parts[0].contains(&x) && v.v_parts[0].contains(&y));
    }
    assert!(a.c_abs.iter().all(|c| v.c_parts[0].contains(c)));

    let cn = v.c_parts[3].clone();
    let vn = v.v_parts[3].clone();
    let rep = verify_absorber(a, &f, &cn, &vn, AbsorberMode::Exhaustive, 0);
    assert!(rep.ok);
    assert_eq!(rep.tested as u64, binomial(12, 10));

    // a missing gadget edge leaves one color without an edge for every A
    let e = a.gadgets[0].e1;
    let broken = a.without_edge(e);
    let rep = verify_absorber(&broken, &f, &cn, &vn, AbsorberMode::Exhaustive, 0);
    assert!(!rep.ok);
    assert_eq!(rep.failed, rep.tested);
}

#[test]
fn sampled_absorber_check() {
    let f = clique(400);
    let s = sample_vortex_absorber(&f, &VortexParams::default(), 3).unwrap();
    let cn = s.vortex.c_parts.last().unwrap().clone();
    let vn = s.vortex.v_parts.last().unwrap().clone();
    let rep = verify_absorber(&s.absorber, &f, &cn, &vn, AbsorberMode::Sampled(40), 9);
    assert!(rep.ok);
    assert_eq!(rep.tested, 40);
}

#[test]
fn deterministic_for_seed() {
    let f = clique(400);
    let p = VortexParams::default();
    assert_eq!(sample_vortex_absorber(&f, &p, 5).unwrap(), sample_vortex_absorber(&f, &p, 5).unwrap());
}

#[test]
fn vortex_violations_are_reported() {
    let f = clique(400);
    let mut s = sample_vortex_absorber(&f, &VortexParams::default(), 1).unwrap();
    let moved = s.vortex.v_parts[1].split_off(100);
    s.vortex.v_parts[0].extend(moved);
    let rep = verify_vortex(&s.vortex, &f);
    assert!(!rep.ok);
    assert!(rep.violations.iter().any(|v| v.starts_with("(i)")));
}

#[test]
fn preconditions() {
    let p = VortexParams::default();
    let f = generate(&FamilyGenerator::new(GeneratorKind::AllClique { n: 400, m: Some(399) }, 0)).unwrap();
    assert!(matches!(sample_vortex_absorber(&f, &p, 0), Err(Error::Precondition(_))));
    let f = clique(12);
    assert!(matches!(sample_vortex_absorber(&f, &p, 0), Err(Error::InfeasibleParams(_))));
    let ex = generate(&FamilyGenerator::new(GeneratorKind::ExtremalConstruction { n: 400 }, 0)).unwrap();
    assert!(matches!(sample_vortex_absorber(&ex, &p, 0), Err(Error::Precondition(_))));
}
