//! Level-by-level assembly over a vortex: cover-down, final Hamilton cycle, absorber coloring.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::PipelineParams;
use crate::cover::{cover_down, CoverParams};
use crate::error::{retries, Error, Result};
use crate::family::ColoredFamily;
use crate::matching::{hopcroft_karp, matching_size};
use crate::posa::{final_step_graph, robust_hamilton};
use crate::rng::{self, derive_seed};
use crate::transversal::{validate_transversal, Transversal};
use crate::vortex::{sample_vortex_absorber, VortexSample};

/// A path with per-edge colors; `None` marks absorber edges colored last.
#[derive(Clone, Debug)]
struct Chain {
    vertices: Vec<usize>,
    colors: Vec<Option<usize>>,
}

impl Chain {
    fn ends(&self) -> (usize, usize) {
        (self.vertices[0], *self.vertices.last().unwrap())
    }

    fn reversed(&self) -> Chain {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let mut colors = self.colors.clone();
        colors.reverse();
        Chain { vertices, colors }
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Replaces each uncolored step `a→b` of `vertices` by the chain joining `a` and `b`.
fn splice(vertices: &[usize], colors: &[Option<usize>], chains: &HashMap<(usize, usize), Chain>) -> Chain {
    let mut out = Chain { vertices: vec![vertices[0]], colors: Vec::new() };
    for (i, c) in colors.iter().enumerate() {
        let (a, b) = (vertices[i], vertices[i + 1]);
        match c {
            Some(_) => {
                out.vertices.push(b);
                out.colors.push(*c);
            }
            None => {
                let ch = &chains[&key(a, b)];
                let ch = if ch.vertices[0] == a { ch.clone() } else { ch.reversed() };
                out.vertices.extend_from_slice(&ch.vertices[1..]);
                out.colors.extend_from_slice(&ch.colors);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub forced_in: usize,
    pub paths_out: usize,
    pub cover_attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonextremalRun {
    pub transversal: Transversal,
    pub levels: Vec<LevelStats>,
    pub attempts: usize,
    pub vortex_attempts: usize,
    pub heuristic_core: bool,
}

fn attempt(f: &ColoredFamily, p: &PipelineParams, vs: &VortexSample, seed: u64) -> Result<(Transversal, Vec<LevelStats>)> {
    let v = &vs.vortex;
    let a = &vs.absorber;
    let big_n = v.levels();
    let mut chains: HashMap<(usize, usize), Chain> =
        a.m_abs.iter().map(|&(x, y)| (key(x, y), Chain { vertices: vec![x, y], colors: vec![None] })).collect();
    let identity = a.m_abs.len() as i64 - a.c_abs.len() as i64;
    let mut balance = identity;
    let mut stats = Vec::new();
    for i in 0..big_n - 1 {
        let m_i: Vec<(usize, usize)> = chains.values().map(Chain::ends).collect();
        let colors: Vec<usize> = if i == 0 {
            v.c_parts[0].iter().copied().filter(|c| a.c_abs.binary_search(c).is_err()).collect()
        } else {
            v.c_parts[i].clone()
        };
        let cp = CoverParams { check_ratio: i > 0, ..p.cover };
        let pc = cover_down(f, &v.v_parts[i], &v.v_parts[i + 1], &m_i, &colors, &cp, derive_seed(seed, "level", i as u64))?;
        let mut next = HashMap::new();
        for path in &pc.paths {
            let ch = splice(&path.vertices, &path.colors, &chains);
            next.insert(key(ch.vertices[0], *ch.vertices.last().unwrap()), ch);
        }
        balance += v.c_parts[i].len() as i64 - v.v_parts[i].len() as i64;
        if next.len() as i64 != balance {
            return Err(Error::Inconsistent(format!("level {}: {} paths, accounting gives {balance}", i + 1, next.len())));
        }
        stats.push(LevelStats { level: i + 1, forced_in: m_i.len(), paths_out: next.len(), cover_attempts: pc.stats.attempts });
        chains = next;
    }

    // last level: Hamilton cycle through the forced pairs
    let vn = &v.v_parts[big_n - 1];
    let cn = &v.c_parts[big_n - 1];
    let pos: HashMap<usize, usize> = vn.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let g = final_step_graph(f, vn, cn)?;
    let m_local: Vec<(usize, usize)> = chains.values().map(|c| (pos[&c.ends().0], pos[&c.ends().1])).collect();
    let cyc = robust_hamilton(&g, &m_local, p.posa_restarts, derive_seed(seed, "final", 0))?;
    let k = cyc.len();
    let mut r = rng::rng(derive_seed(seed, "final-colors", 0));
    let mut free: Vec<usize> = cn.clone();
    let mut verts = Vec::with_capacity(k);
    let mut cols = Vec::with_capacity(k);
    for i in 0..k {
        let (x, y) = (vn[cyc[i]], vn[cyc[(i + 1) % k]]);
        verts.push(x);
        if chains.contains_key(&key(x, y)) {
            cols.push(None);
            continue;
        }
        let opts: Vec<usize> = free.iter().copied().filter(|&c| f.has(c, x, y)).collect();
        let &c = opts.choose(&mut r).ok_or_else(|| retries("final-coloring", format!("no free color for {x}-{y}")))?;
        free.retain(|&d| d != c);
        cols.push(Some(c));
    }
    // close the cycle as a path from verts[0] back to itself, then drop the repeat
    let mut closed = verts.clone();
    closed.push(verts[0]);
    let full = splice(&closed, &cols, &chains);
    let mut vertices = full.vertices;
    vertices.pop();

    // absorber edges take C_abs plus the unused colors of C_N
    let mut rest: Vec<usize> = a.c_abs.clone();
    rest.extend(free.iter().copied());
    if rest.len() != a.m_abs.len() {
        return Err(Error::Inconsistent(format!("{} absorber edges but {} colors left", a.m_abs.len(), rest.len())));
    }
    let adj: Vec<Vec<usize>> =
        a.m_abs.iter().map(|&(x, y)| (0..rest.len()).filter(|&j| f.has(rest[j], x, y)).collect()).collect();
    let mate = hopcroft_karp(&adj, rest.len());
    if matching_size(&mate) != rest.len() {
        return Err(retries("absorber-coloring", "no bijection onto the leftover colors"));
    }
    let abs_color: HashMap<(usize, usize), usize> =
        a.m_abs.iter().zip(&mate).map(|(&(x, y), m)| (key(x, y), rest[m.unwrap()])).collect();
    let n = vertices.len();
    let colors: Vec<usize> = full
        .colors
        .iter()
        .enumerate()
        .map(|(i, c)| c.unwrap_or_else(|| abs_color[&key(vertices[i], vertices[(i + 1) % n])]))
        .collect();
    let t = Transversal::cycle(vertices, colors);
    validate_transversal(f, &t).map_err(|e| Error::Inconsistent(format!("assembled cycle invalid: {e}")))?;
    Ok((t, stats))
}

/// Vortex, cover-down through every level, final cycle and absorber coloring,
/// with whole-pipeline retries.
pub fn sample_transversal_nonextremal(f: &ColoredFamily, p: &PipelineParams, seed: u64) -> Result<NonextremalRun> {
    let mut last = String::new();
    for a in 0..p.retries.max(1) {
        let s = derive_seed(seed, "nonextremal", a as u64);
        let vs = sample_vortex_absorber(f, &p.vortex, derive_seed(s, "vortex", 0))?;
        match attempt(f, p, &vs, s) {
            Ok((transversal, levels)) => {
                return Ok(NonextremalRun {
                    transversal,
                    levels,
                    attempts: a + 1,
                    vortex_attempts: vs.attempts,
                    heuristic_core: vs.heuristic_core,
                })
            }
            Err(e @ (Error::Precondition(_) | Error::InfeasibleParams(_))) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    Err(retries("nonextremal-pipeline", last))
}
