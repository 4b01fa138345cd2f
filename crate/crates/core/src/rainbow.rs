//! Random rainbow matchings in bipartite families with a color surplus.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{retries, Error, Result};
use crate::family::ColoredFamily;
use crate::graph::{iter_bits, VertexSet};
use crate::matching::hopcroft_karp;
use crate::rng::{self, derive_seed, Rng};
use crate::stats::{wilson95, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RainbowParams {
    pub eps: f64,
    /// Enforce the minimum-degree and sample-size preconditions.
    pub strict: bool,
    pub retries: usize,
    /// Keep `σ` and the sampled edge lists in the output.
    pub record: bool,
}

impl Default for RainbowParams {
    fn default() -> Self {
        RainbowParams { eps: 0.01, strict: false, retries: 20, record: false }
    }
}

impl RainbowParams {
    pub fn sample_size(&self) -> usize {
        (2.0 / self.eps).ceil() as usize
    }
}

/// A colored matching: `(u, v, color)` with `u` on the left side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowMatching {
    pub edges: Vec<(usize, usize, usize)>,
    pub attempts: usize,
    /// `(vertex, σ(vertex))`, present in record mode.
    pub sigma: Vec<(usize, usize)>,
    /// `(vertex, E(vertex))`, present in record mode.
    pub samples: Vec<(usize, Vec<usize>)>,
}

/// A bipartite family on `left ∪ right` with a pool of colors.
pub struct RainbowSampler<'a> {
    f: &'a ColoredFamily,
    left: Vec<usize>,
    right: Vec<usize>,
    colors: Vec<usize>,
    left_set: VertexSet,
    right_set: VertexSet,
    lpos: Vec<usize>,
    rpos: Vec<usize>,
    params: RainbowParams,
}

impl<'a> RainbowSampler<'a> {
    pub fn new(
        f: &'a ColoredFamily,
        left: &[usize],
        right: &[usize],
        colors: &[usize],
        params: RainbowParams,
    ) -> Result<Self> {
        let n = f.n();
        let left_set = VertexSet::from_iter(n, left.iter().copied());
        let right_set = VertexSet::from_iter(n, right.iter().copied());
        if left.iter().any(|&v| right_set.contains(v)) {
            return Err(Error::Precondition("sides overlap".into()));
        }
        if params.eps <= 0.0 {
            return Err(Error::Precondition("eps must be positive".into()));
        }
        if params.strict {
            let t = left.len().min(right.len());
            if left.len() != right.len() || colors.len() < 2 * t {
                return Err(Error::Precondition("need |U| = |V| = t and 2t colors".into()));
            }
            let need = params.sample_size();
            let min_deg = (0.5 - params.eps) * t as f64;
            for &c in colors {
                let g = f.color(c);
                for (side, other) in [(left, &right_set), (right, &left_set)] {
                    for &v in side {
                        let d = g.degree_into(v, other);
                        if (d as f64) < min_deg {
                            return Err(Error::Precondition(format!("color {c}: vertex {v} has degree {d} < (1/2-eps)t")));
                        }
                        if d < need {
                            return Err(Error::Precondition(format!("color {c}: vertex {v} has degree {d} < {need}")));
                        }
                    }
                }
            }
        }
        let mut lpos = vec![usize::MAX; n];
        let mut rpos = vec![usize::MAX; n];
        for (i, &v) in left.iter().enumerate() {
            lpos[v] = i;
        }
        for (i, &v) in right.iter().enumerate() {
            rpos[v] = i;
        }
        Ok(RainbowSampler {
            f,
            lpos,
            rpos,
            left: left.to_vec(),
            right: right.to_vec(),
            colors: colors.to_vec(),
            left_set,
            right_set,
            params,
        })
    }

    fn once(&self, r: &mut Rng) -> RainbowMatching {
        let (verts, sigma) = self.draw_sigma(r);
        self.complete(verts, sigma, r)
    }

    /// Uniform injection of (a random subset of) the vertices into the colors.
    fn draw_sigma(&self, r: &mut Rng) -> (Vec<usize>, Vec<usize>) {
        let n = self.f.n();
        let mut verts: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        let mut pool = self.colors.clone();
        pool.shuffle(r);
        if pool.len() < verts.len() {
            verts.shuffle(r);
            verts.truncate(pool.len());
        }
        let mut sigma = vec![usize::MAX; n];
        for (&v, &c) in verts.iter().zip(&pool) {
            sigma[v] = c;
        }
        (verts, sigma)
    }

    fn complete(&self, verts: Vec<usize>, sigma: Vec<usize>, r: &mut Rng) -> RainbowMatching {
        let k = self.params.sample_size();
        let (lpos, rpos) = (&self.lpos, &self.rpos);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.left.len()];
        let mut samples = Vec::new();
        let mut origin: HashMap<(usize, usize), usize> = HashMap::new();
        for &w in &verts {
            let g = self.f.color(sigma[w]);
            let other = if self.left_set.contains(w) { &self.right_set } else { &self.left_set };
            let masked: Vec<u64> = g.row(w).iter().zip(other.words()).map(|(a, b)| a & b).collect();
            let nbrs: Vec<usize> = iter_bits(&masked).collect();
            let chosen = rng::sample_k(&nbrs, k, r);
            for &x in &chosen {
                let (i, j) = if lpos[w] != usize::MAX { (lpos[w], rpos[x]) } else { (lpos[x], rpos[w]) };
                adj[i].push(j);
                origin.entry((i, j)).or_insert(sigma[w]);
            }
            if self.params.record {
                samples.push((w, chosen));
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let mate = hopcroft_karp(&adj, self.right.len());
        let mut edges = Vec::new();
        for (i, m) in mate.iter().enumerate() {
            if let Some(j) = *m {
                edges.push((self.left[i], self.right[j], origin[&(i, j)]));
            }
        }
        let sigma_out = if self.params.record { verts.iter().map(|&v| (v, sigma[v])).collect() } else { Vec::new() };
        RainbowMatching { edges, attempts: 1, sigma: sigma_out, samples }
    }

    /// Retries until the matching has at least `(1-4ε)t` edges.
    pub fn sample(&self, seed: u64) -> Result<RainbowMatching> {
        let mut r = rng::rng(seed);
        self.sample_with(&mut r)
    }

    pub fn sample_with(&self, r: &mut Rng) -> Result<RainbowMatching> {
        let t = self.left.len().min(self.right.len());
        let need = ((1.0 - 4.0 * self.params.eps) * t as f64).ceil().max(0.0) as usize;
        let mut best: Option<RainbowMatching> = None;
        for attempt in 1..=self.params.retries.max(1) {
            let mut m = self.once(r);
            m.attempts = attempt;
            if m.edges.len() >= need {
                return Ok(m);
            }
            if best.as_ref().is_none_or(|b| b.edges.len() < m.edges.len()) {
                best = Some(m);
            }
        }
        Err(retries(
            "rainbow-matching",
            format!("largest matching {} below {need}", best.map_or(0, |b| b.edges.len())),
        ))
    }

    /// Single draw without the size retry.
    pub fn sample_once(&self, seed: u64) -> RainbowMatching {
        self.once(&mut rng::rng(seed))
    }
}

/// One-shot convenience wrapper.
pub fn sample_rainbow_matching(
    f: &ColoredFamily,
    left: &[usize],
    right: &[usize],
    colors: &[usize],
    params: RainbowParams,
    seed: u64,
) -> Result<RainbowMatching> {
    RainbowSampler::new(f, left, right, colors, params)?.sample(seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub hits: usize,
    pub frequency: f64,
    pub interval: Interval,
}

/// Frequency with which every `(u, v, color)` in `target` appears in a draw.
pub fn matching_spread_probe(
    sampler: &RainbowSampler,
    target: &[(usize, usize, usize)],
    trials: usize,
    seed: u64,
) -> ProbeReport {
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng::rng(derive_seed(seed, "matching-probe", i as u64));
            let (verts, sigma) = sampler.draw_sigma(&mut r);
            // an edge can only carry the color of one of its endpoints
            if !target.iter().all(|&(u, v, c)| sigma[u] == c || sigma[v] == c) {
                return false;
            }
            let m = sampler.complete(verts, sigma, &mut r);
            target.iter().all(|&(u, v, c)| {
                m.edges.iter().any(|&(a, b, col)| col == c && ((a, b) == (u, v) || (a, b) == (v, u)))
            })
        })
        .count();
    ProbeReport {
        trials,
        hits,
        frequency: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
        interval: wilson95(hits as u64, trials as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn kt(t: usize) -> (ColoredFamily, Vec<usize>, Vec<usize>) {
        let a = VertexSet::from_iter(2 * t, 0..t);
        let f = ColoredFamily::uniform(&Graph::complete_bipartite(2 * t, &a), 2 * t);
        (f, (0..t).collect(), (t..2 * t).collect())
    }

    #[test]
    fn complete_bipartite_t50() {
        let (f, l, r) = kt(50);
        let cols: Vec<usize> = (0..100).collect();
        let p = RainbowParams { eps: 0.2, strict: true, retries: 20, record: true };
        let m = sample_rainbow_matching(&f, &l, &r, &cols, p, 7).unwrap();
        assert!(m.edges.len() >= 40);
        let mut used = std::collections::HashSet::new();
        for &(u, v, c) in &m.edges {
            assert!(f.has(c, u, v) && used.insert(c));
        }
    }

    #[test]
    fn single_edge() {
        let f = ColoredFamily::uniform(&Graph::from_edges(2, &[(0, 1)]), 2);
        let p = RainbowParams { eps: 0.2, strict: false, retries: 20, record: true };
        let m = sample_rainbow_matching(&f, &[0], &[1], &[0, 1], p, 1).unwrap();
        assert_eq!(m.edges.len(), 1);
        let sig: std::collections::HashMap<_, _> = m.sigma.iter().copied().collect();
        let (u, v, c) = m.edges[0];
        assert!(c == sig[&u] || c == sig[&v]);
    }

    #[test]
    fn strict_degree_precondition() {
        let (mut f, l, r) = kt(4);
        let mut g = f.color(0).clone();
        g.remove_edge(0, 4);
        g.remove_edge(0, 5);
        let mut colors = f.colors().to_vec();
        colors[0] = g;
        f = ColoredFamily::new(8, colors).unwrap();
        let p = RainbowParams { eps: 0.2, strict: true, retries: 1, record: false };
        assert!(matches!(RainbowSampler::new(&f, &l, &r, &(0..8).collect::<Vec<_>>(), p), Err(Error::Precondition(_))));
    }

    #[test]
    fn probe_absent_edge_is_zero() {
        let (f, l, r) = kt(6);
        let cols: Vec<usize> = (0..12).collect();
        let s = RainbowSampler::new(&f, &l, &r, &cols, RainbowParams { eps: 0.5, ..Default::default() }).unwrap();
        let rep = matching_spread_probe(&s, &[(0, 1, 0)], 50, 3);
        assert_eq!(rep.hits, 0);
    }
}
