//! Rotation-extension search for Hamilton cycles through a forced matching.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::family::ColoredFamily;
use crate::graph::Graph;
use crate::rng::{self, derive_seed, Rng};

pub const MAX_DEPTH: usize = 3;

/// Partner lookup for a matching on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forced {
    partner: Vec<Option<usize>>,
}

impl Forced {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> std::result::Result<Self, PosaError> {
        let mut partner = vec![None; n];
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(PosaError::Obstruction(format!("invalid forced edge {u}-{v}")));
            }
            if partner[u].is_some() || partner[v].is_some() {
                return Err(PosaError::Obstruction("M is not a matching".into()));
            }
            partner[u] = Some(v);
            partner[v] = Some(u);
        }
        Ok(Forced { partner })
    }

    pub fn empty(n: usize) -> Self {
        Forced { partner: vec![None; n] }
    }

    pub fn partner(&self, v: usize) -> Option<usize> {
        self.partner[v]
    }

    pub fn is_forced(&self, u: usize, v: usize) -> bool {
        self.partner[u] == Some(v)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosaError {
    #[error("obstruction: {0}")]
    Obstruction(String),
    #[error("no Hamilton cycle found after {0} restarts")]
    Exhausted(usize),
}

impl From<PosaError> for Error {
    fn from(e: PosaError) -> Self {
        match e {
            PosaError::Obstruction(s) => Error::Obstruction(s),
            PosaError::Exhausted(r) => Error::RetriesExhausted { stage: "robust-hamilton".into(), reason: format!("{r} restarts") },
        }
    }
}

/// A path that carries the forced edge of every matched vertex it visits.
pub fn is_good_path(g: &Graph, m: &Forced, path: &[usize]) -> bool {
    let n = g.n();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in path.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    for w in path.windows(2) {
        if !g.has_edge(w[0], w[1]) && !m.is_forced(w[0], w[1]) {
            return false;
        }
    }
    path.iter().enumerate().all(|(i, &v)| match m.partner(v) {
        None => true,
        Some(p) => pos[p] != usize::MAX && pos[p].abs_diff(i) == 1,
    })
}

/// Rotation with fixed `path[0]`: pivot `v_i`, new edge `v_i v_l`, broken edge `v_i v_{i+1}`.
pub fn rotate(g: &Graph, m: &Forced, path: &[usize], pivot: usize) -> Result<Vec<usize>> {
    let l = path.len() - 1;
    let i = path
        .iter()
        .position(|&v| v == pivot)
        .ok_or_else(|| Error::InvalidRotation(format!("pivot {pivot} not on path")))?;
    if i + 1 >= l {
        return Err(Error::InvalidRotation("pivot must precede the last edge".into()));
    }
    if !g.has_edge(pivot, path[l]) {
        return Err(Error::InvalidRotation(format!("pivot edge {}-{} absent", pivot, path[l])));
    }
    if m.is_forced(pivot, path[i + 1]) {
        return Err(Error::InvalidRotation(format!("broken edge {}-{} is forced", pivot, path[i + 1])));
    }
    Ok(rotated(path, i))
}

fn rotated(path: &[usize], i: usize) -> Vec<usize> {
    let mut out = path[..=i].to_vec();
    out.extend(path[i + 1..].iter().rev());
    out
}

/// Endpoints reachable from a good path by at most `t` rotations, each with the
/// pivot sequence that produces it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoosterState {
    pub path: Vec<usize>,
    pub fixed_endpoint: usize,
    pub reachable_ends: Vec<(usize, Vec<usize>)>,
    pub t: usize,
}

pub fn booster_state(g: &Graph, m: &Forced, path: &[usize], t: usize) -> BoosterState {
    let mut seen = vec![false; g.n()];
    let end = *path.last().expect("non-empty path");
    seen[end] = true;
    let mut reachable = vec![(end, Vec::new())];
    let mut frontier = vec![(path.to_vec(), Vec::new())];
    for _ in 0..t {
        let mut next = Vec::new();
        for (q, pivots) in &frontier {
            for (j, piv) in rotation_options(g, m, q) {
                let r = rotated(q, j);
                let e = *r.last().expect("non-empty");
                if !seen[e] {
                    seen[e] = true;
                    let mut ps: Vec<usize> = pivots.clone();
                    ps.push(piv);
                    reachable.push((e, ps.clone()));
                    next.push((r, ps));
                }
            }
        }
        frontier = next;
    }
    BoosterState { path: path.to_vec(), fixed_endpoint: path[0], reachable_ends: reachable, t }
}

/// Applies a pivot sequence to a path.
pub fn replay(g: &Graph, m: &Forced, path: &[usize], pivots: &[usize]) -> Result<Vec<usize>> {
    let mut p = path.to_vec();
    for &piv in pivots {
        p = rotate(g, m, &p, piv)?;
    }
    Ok(p)
}

/// `(index, pivot)` pairs admissible for rotating `q` at its last vertex.
fn rotation_options(g: &Graph, m: &Forced, q: &[usize]) -> Vec<(usize, usize)> {
    let l = q.len() - 1;
    let end = q[l];
    let mut out = Vec::new();
    for i in 0..l.saturating_sub(1) {
        if g.has_edge(q[i], end) && !m.is_forced(q[i], q[i + 1]) {
            out.push((i, q[i]));
        }
    }
    out
}

struct Attempt<'a> {
    g: &'a Graph,
    m: &'a Forced,
    path: Vec<usize>,
    on: Vec<bool>,
    r: Rng,
}

impl<'a> Attempt<'a> {
    fn add(&mut self, v: usize) {
        self.path.push(v);
        self.on[v] = true;
    }

    /// Extends at the end with an off-path neighbour; enters M-vertices with their partner.
    fn extend_end(&mut self) -> bool {
        let end = *self.path.last().expect("non-empty");
        let mut cands: Vec<usize> = self.g.neighbors(end).filter(|&w| !self.on[w]).collect();
        if cands.is_empty() {
            return false;
        }
        cands.shuffle(&mut self.r);
        cands.sort_by_key(|&w| self.m.partner(w).is_some());
        let w = cands[0];
        self.add(w);
        if let Some(p) = self.m.partner(w) {
            self.add(p);
        }
        true
    }

    fn extend_greedy(&mut self) {
        loop {
            if self.extend_end() {
                continue;
            }
            self.path.reverse();
            if self.extend_end() {
                continue;
            }
            self.path.reverse();
            break;
        }
    }

    fn closes(&self, q: &[usize]) -> bool {
        q.len() >= 3 && self.g.has_edge(q[0], *q.last().expect("non-empty"))
    }

    /// Searches rotations of depth at most 3 for a path that extends or closes.
    fn rotate_search(&mut self) -> Option<Vec<usize>> {
        let mut seen = vec![false; self.g.n()];
        seen[*self.path.last().expect("non-empty")] = true;
        let mut frontier = vec![self.path.clone()];
        for _ in 0..MAX_DEPTH {
            let mut next = Vec::new();
            let mut hits: Vec<Vec<usize>> = Vec::new();
            for q in &frontier {
                let mut opts = rotation_options(self.g, self.m, q);
                opts.shuffle(&mut self.r);
                for (j, _) in opts {
                    let r = rotated(q, j);
                    let e = *r.last().expect("non-empty");
                    if seen[e] {
                        continue;
                    }
                    seen[e] = true;
                    let extends = self.g.neighbors(e).any(|w| !self.on[w]);
                    if extends || self.closes(&r) {
                        hits.push(r.clone());
                    }
                    next.push(r);
                }
            }
            if !hits.is_empty() {
                let k = self.r.gen_range(0..hits.len());
                return Some(hits.swap_remove(k));
            }
            frontier = next;
        }
        None
    }

    /// Closes a cycle and reopens it through an off-cycle neighbour.
    fn absorb_via_cycle(&mut self) -> bool {
        let c = self.path.clone();
        let k = c.len();
        let mut options = Vec::new();
        for (idx, &u) in c.iter().enumerate() {
            for w in self.g.neighbors(u) {
                if !self.on[w] {
                    options.push((idx, w));
                }
            }
        }
        if options.is_empty() {
            return false;
        }
        let (idx, w) = options[self.r.gen_range(0..options.len())];
        // break a cycle edge at u that is not forced
        let prev = c[(idx + k - 1) % k];
        let next = c[(idx + 1) % k];
        let u = c[idx];
        let mut order: Vec<usize> = Vec::with_capacity(k + 2);
        if let Some(p) = self.m.partner(w) {
            order.push(p);
        }
        order.push(w);
        if !self.m.is_forced(u, next) {
            // u, prev, prev-1, ..., next
            for s in 0..k {
                order.push(c[(idx + k - s) % k]);
            }
        } else if !self.m.is_forced(u, prev) {
            for s in 0..k {
                order.push(c[(idx + s) % k]);
            }
        } else {
            return false;
        }
        for &v in &order {
            self.on[v] = true;
        }
        self.path = order;
        true
    }

    fn run(&mut self) -> Option<Vec<usize>> {
        let n = self.g.n();
        let start = self.r.gen_range(0..n);
        self.add(start);
        if let Some(p) = self.m.partner(start) {
            self.add(p);
        }
        let mut guard = 0;
        while guard < 4 * n + 8 {
            guard += 1;
            self.extend_greedy();
            if self.path.len() == n && self.closes(&self.path) {
                return Some(self.path.clone());
            }
            if self.path.len() >= 3 && self.closes(&self.path) && self.absorb_via_cycle() {
                continue;
            }
            let mut progressed = false;
            for _ in 0..2 {
                if let Some(q) = self.rotate_search() {
                    self.path = q;
                    progressed = true;
                    break;
                }
                self.path.reverse();
            }
            if !progressed {
                return None;
            }
            if self.path.len() == n && self.closes(&self.path) {
                return Some(self.path.clone());
            }
            if self.closes(&self.path) && self.path.len() < n && !self.g.neighbors(*self.path.last().expect("non-empty")).any(|w| !self.on[w]) {
                if !self.absorb_via_cycle() {
                    return None;
                }
            }
        }
        None
    }
}

/// Checks a Hamilton cycle that spans `m` with all other edges in `g`.
pub fn is_valid_cycle(g: &Graph, m: &Forced, cycle: &[usize]) -> bool {
    let n = g.n();
    if cycle.len() != n || n < 3 {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    let mut forced_seen = 0;
    for i in 0..n {
        let (u, v) = (cycle[i], cycle[(i + 1) % n]);
        if m.is_forced(u, v) {
            forced_seen += 1;
        } else if !g.has_edge(u, v) {
            return false;
        }
    }
    let forced_total = (0..n).filter(|&v| m.partner(v).is_some()).count() / 2;
    forced_seen == forced_total
}

/// Hamilton cycle of `g ∪ M` that contains every edge of `M`.
pub fn robust_hamilton(
    g: &Graph,
    m_edges: &[(usize, usize)],
    restarts: usize,
    seed: u64,
) -> std::result::Result<Vec<usize>, PosaError> {
    let n = g.n();
    if n < 3 {
        return Err(PosaError::Obstruction("fewer than 3 vertices".into()));
    }
    let m = Forced::new(n, m_edges)?;
    let mut host = g.clone();
    for &(u, v) in m_edges {
        host.add_edge(u, v);
    }
    if host.components().len() > 1 {
        return Err(PosaError::Obstruction("disconnected".into()));
    }
    if n == 3 && m_edges.len() > 1 {
        return Err(PosaError::Obstruction("M is not a matching".into()));
    }
    for attempt in 0..restarts.max(1) {
        let mut a = Attempt { g, m: &m, path: Vec::new(), on: vec![false; n], r: rng::rng(derive_seed(seed, "posa", attempt as u64)) };
        if let Some(c) = a.run() {
            debug_assert!(is_valid_cycle(g, &m, &c));
            if is_valid_cycle(g, &m, &c) {
                return Ok(c);
            }
        }
    }
    Err(PosaError::Exhausted(restarts))
}

/// Edges lying in at least `|verts|` of the listed colors, relabelled to `verts` order.
pub fn final_step_graph(f: &ColoredFamily, verts: &[usize], colors: &[usize]) -> Result<Graph> {
    if colors.len() < verts.len() {
        return Err(Error::Precondition("need at least as many colors as vertices".into()));
    }
    let k = verts.len();
    let mut g = Graph::new(k);
    for i in 0..k {
        for j in i + 1..k {
            if f.multiplicity(verts[i], verts[j], colors) >= k {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}
