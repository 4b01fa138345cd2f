//! Empirical spread: containment frequencies of colored-edge sets under a sampler.
//!
//! Reported `q̂` values are lower bounds on the true spread parameter; sampling
//! can refute a claimed bound but never certify one.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::find_transversal;
use crate::family::ColoredFamily;
use crate::graph::Graph;
use crate::rng::{self, derive_seed, Rng};
use crate::stats::{wilson95, Interval};
use crate::transversal::Transversal;

/// `(u, v, color)` with `u < v`.
pub type ColoredEdge = (usize, usize, usize);

pub fn colored_edge(u: usize, v: usize, c: usize) -> ColoredEdge {
    (u.min(v), u.max(v), c)
}

fn edge_set(t: &Transversal) -> HashSet<ColoredEdge> {
    t.colored_edges().into_iter().map(|((u, v), c)| (u, v, c)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub set: Vec<ColoredEdge>,
    pub hits: u64,
    pub frequency: f64,
    /// `None` for exact distributions.
    pub interval: Option<Interval>,
    /// `frequency^{1/|S|}`.
    pub implied_q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadProbe {
    /// Successful samples (or support size for exact distributions).
    pub trials: u64,
    pub failures: u64,
    pub exact: bool,
    pub probes: Vec<ProbeResult>,
    /// `max_S freq(S)^{1/|S|}`: a lower bound on `q`.
    pub q_hat: f64,
    /// Same with each frequency replaced by its upper interval end.
    pub q_hat_upper: Option<f64>,
}

impl SpreadProbe {
    /// Largest singleton frequency.
    pub fn max_singleton(&self) -> f64 {
        self.probes.iter().filter(|p| p.set.len() == 1).map(|p| p.frequency).fold(0.0, f64::max)
    }
}

fn implied(freq: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        freq.powf(1.0 / k as f64)
    }
}

fn finish(trials: u64, failures: u64, exact: bool, sets: &[Vec<ColoredEdge>], hits: &[f64]) -> SpreadProbe {
    let probes: Vec<ProbeResult> = sets
        .iter()
        .zip(hits)
        .map(|(s, &h)| {
            let frequency = if trials == 0 { 0.0 } else { h / trials as f64 };
            let interval = (!exact).then(|| wilson95(h as u64, trials));
            ProbeResult { set: s.clone(), hits: h.round() as u64, frequency, interval, implied_q: implied(frequency, s.len()) }
        })
        .collect();
    let q_hat = probes.iter().map(|p| p.implied_q).fold(0.0, f64::max);
    let q_hat_upper = (!exact).then(|| {
        probes.iter().map(|p| implied(p.interval.map_or(p.frequency, |i| i.hi), p.set.len())).fold(0.0, f64::max)
    });
    SpreadProbe { trials, failures, exact, probes, q_hat, q_hat_upper }
}

/// Monte Carlo containment frequencies over `trials` seeded draws.
pub fn estimate_spread(
    sampler: &(dyn Fn(u64) -> Result<Transversal> + Sync),
    probes: &[Vec<ColoredEdge>],
    trials: usize,
    seed: u64,
) -> Result<SpreadProbe> {
    if probes.is_empty() {
        return Err(Error::Precondition("no probe sets".into()));
    }
    let sets: Vec<Vec<ColoredEdge>> = probes.iter().map(|s| s.iter().map(|&(u, v, c)| colored_edge(u, v, c)).collect()).collect();
    let draws: Vec<Option<Vec<bool>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = sampler(derive_seed(seed, "spread", i as u64)).ok()?;
            let es = edge_set(&t);
            Some(sets.iter().map(|s| s.iter().all(|e| es.contains(e))).collect())
        })
        .collect();
    let mut hits = vec![0.0; sets.len()];
    let mut ok = 0u64;
    for d in draws.iter().flatten() {
        ok += 1;
        for (h, &x) in hits.iter_mut().zip(d) {
            if x {
                *h += 1.0;
            }
        }
    }
    Ok(finish(ok, trials as u64 - ok, false, &sets, &hits))
}

/// Exact containment probabilities under an explicit distribution.
pub fn exact_spread(dist: &[(Transversal, f64)], probes: &[Vec<ColoredEdge>]) -> Result<SpreadProbe> {
    if probes.is_empty() {
        return Err(Error::Precondition("no probe sets".into()));
    }
    let total: f64 = dist.iter().map(|d| d.1).sum();
    if dist.is_empty() || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("weights sum to {total}")));
    }
    let sets: Vec<Vec<ColoredEdge>> = probes.iter().map(|s| s.iter().map(|&(u, v, c)| colored_edge(u, v, c)).collect()).collect();
    let mut mass = vec![0.0; sets.len()];
    for (t, w) in dist {
        let es = edge_set(t);
        for (m, s) in mass.iter_mut().zip(&sets) {
            if s.iter().all(|e| es.contains(e)) {
                *m += w;
            }
        }
    }
    // frequencies are the masses themselves: report them against a unit trial count
    let mut out = finish(1, 0, true, &sets, &mass);
    out.trials = dist.len() as u64;
    for p in &mut out.probes {
        p.hits = 0;
    }
    Ok(out)
}

/// Uniform distribution over every transversal (full enumeration).
pub fn uniform_distribution(f: &ColoredFamily, cap: usize) -> Result<Vec<(Transversal, f64)>> {
    let all = crate::exact::all_transversals(f, cap)?;
    let w = 1.0 / all.len().max(1) as f64;
    Ok(all.into_iter().map(|t| (t, w)).collect())
}

/// Every colored edge of the family as a singleton probe.
pub fn singleton_probes(f: &ColoredFamily) -> Vec<Vec<ColoredEdge>> {
    (0..f.m()).flat_map(|c| f.color(c).edges().into_iter().map(move |(u, v)| vec![colored_edge(u, v, c)])).collect()
}

/// Random singletons plus random pairs of colored edges with distinct colors and
/// vertex-disjoint edges.
pub fn stratified_probes(f: &ColoredFamily, singles: usize, pairs: usize, seed: u64) -> Vec<Vec<ColoredEdge>> {
    let mut r = rng::rng(derive_seed(seed, "probes", 0));
    let pick = |r: &mut Rng| -> Option<ColoredEdge> {
        for _ in 0..64 {
            let c = r.gen_range(0..f.m());
            let u = r.gen_range(0..f.n());
            let nb: Vec<usize> = f.color(c).neighbors(u).collect();
            if let Some(&v) = nb.choose(r) {
                return Some(colored_edge(u, v, c));
            }
        }
        None
    };
    let mut out = Vec::new();
    for _ in 0..singles {
        if let Some(e) = pick(&mut r) {
            out.push(vec![e]);
        }
    }
    let mut made = 0;
    let mut tries = 0;
    while made < pairs && tries < 64 * pairs.max(1) {
        tries += 1;
        let (Some(a), Some(b)) = (pick(&mut r), pick(&mut r)) else { continue };
        if a.2 != b.2 && a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1 {
            out.push(vec![a, b]);
            made += 1;
        }
    }
    out
}

/// Keeps each colored edge independently with probability `p`.
pub fn sparsify(f: &ColoredFamily, p: f64, r: &mut Rng) -> ColoredFamily {
    let colors: Vec<Graph> = f
        .colors()
        .iter()
        .map(|g| {
            let kept: Vec<(usize, usize)> = g.edges().into_iter().filter(|_| r.gen::<f64>() < p).collect();
            Graph::from_edges(f.n(), &kept)
        })
        .collect();
    ColoredFamily::new(f.n(), colors).expect("same vertex count")
}

/// Intersects every color with one shared `G(n, p)`.
pub fn intersect_random(f: &ColoredFamily, p: f64, r: &mut Rng) -> ColoredFamily {
    let n = f.n();
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    f.map_colors(|_, c| {
        let mut h = c.clone();
        h.intersect_with(&g);
        h
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZpPoint {
    pub p: f64,
    pub trials: u64,
    pub decided: u64,
    pub successes: u64,
    pub frequency: Option<f64>,
    pub interval: Option<Interval>,
}

/// Success probability of "the `p`-random subset of colored edges contains a transversal".
pub fn zp_experiment(f: &ColoredFamily, p_grid: &[f64], trials: usize, seed: u64, budget: u64) -> Result<Vec<ZpPoint>> {
    p_grid
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Precondition(format!("p = {p} outside [0, 1]")));
            }
            let outcomes: Vec<Result<Option<bool>>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng::rng(derive_seed(derive_seed(seed, "zp", k as u64), "trial", t as u64));
                    let sub = sparsify(f, p, &mut r);
                    let res = find_transversal(&sub, budget)?;
                    Ok(res.outcome.is_decided().then(|| res.outcome.found().is_some()))
                })
                .collect();
            let mut decided = 0;
            let mut successes = 0;
            for o in outcomes {
                if let Some(s) = o? {
                    decided += 1;
                    successes += s as u64;
                }
            }
            Ok(ZpPoint {
                p,
                trials: trials as u64,
                decided,
                successes,
                frequency: (decided > 0).then(|| successes as f64 / decided as f64),
                interval: (decided > 0).then(|| wilson95(successes, decided)),
            })
        })
        .collect()
}
