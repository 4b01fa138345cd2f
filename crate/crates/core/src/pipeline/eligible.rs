//! Random eligible edges: unused color, no cycle, path-system degrees.

use rand::seq::SliceRandom;

use crate::family::ColoredFamily;
use crate::graph::{iter_bits, Graph, VertexSet};
use crate::rng::Rng;

/// A growing rainbow linear forest.
#[derive(Clone, Debug)]
pub struct Forest {
    deg: Vec<u8>,
    root: Vec<usize>,
    used: Vec<bool>,
    pub edges: Vec<(usize, usize, Option<usize>)>,
}

impl Forest {
    pub fn new(n: usize, m: usize) -> Forest {
        Forest { deg: vec![0; n], root: (0..n).collect(), used: vec![false; m], edges: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.root[x] != x {
            x = self.root[x];
        }
        x
    }

    pub fn degree(&self, v: usize) -> usize {
        self.deg[v] as usize
    }

    pub fn touched(&self, v: usize) -> bool {
        self.deg[v] > 0
    }

    pub fn color_used(&self, c: usize) -> bool {
        self.used[c]
    }

    pub fn use_color(&mut self, c: usize) {
        self.used[c] = true;
    }

    pub fn can_add(&self, u: usize, v: usize) -> bool {
        u != v && self.deg[u] < 2 && self.deg[v] < 2 && self.find(u) != self.find(v)
    }

    pub fn add(&mut self, u: usize, v: usize, c: Option<usize>) {
        debug_assert!(self.can_add(u, v));
        self.deg[u] += 1;
        self.deg[v] += 1;
        let (ru, rv) = (self.find(u), self.find(v));
        self.root[ru] = rv;
        if let Some(c) = c {
            self.used[c] = true;
        }
        self.edges.push((u, v, c));
    }

    /// Connected pieces as vertex sequences (isolated vertices skipped).
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let n = self.deg.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.deg[s] != 1 {
                continue;
            }
            let mut p = vec![s];
            seen[s] = true;
            let mut cur = s;
            while let Some(&nx) = adj[cur].iter().find(|&&x| !seen[x]) {
                seen[nx] = true;
                p.push(nx);
                cur = nx;
            }
            out.push(p);
        }
        out
    }

    pub fn color_of(&self, u: usize, v: usize) -> Option<Option<usize>> {
        self.edges.iter().find(|&&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)).map(|e| e.2)
    }
}

/// Where candidate edges may lie.
#[derive(Clone, Copy, Debug)]
pub enum Scope<'a> {
    /// Edges `x—y` with `y` in the set.
    From(usize, &'a VertexSet),
    /// Edges with both ends in the set.
    Within(&'a VertexSet),
    /// Edges with one end in each set.
    Between(&'a VertexSet, &'a VertexSet),
}

/// Eligible edges of `g` in `scope`, also passing `extra`.
pub fn eligible_edges(g: &Graph, forest: &Forest, scope: Scope, extra: &dyn Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut push = |u: usize, v: usize| {
        if forest.can_add(u, v) && extra(u, v) {
            out.push((u, v));
        }
    };
    match scope {
        Scope::From(x, s) => {
            let masked: Vec<u64> = g.row(x).iter().zip(s.words()).map(|(a, b)| a & b).collect();
            for y in iter_bits(&masked) {
                push(x, y);
            }
        }
        Scope::Within(s) => {
            for u in s.iter() {
                let masked: Vec<u64> = g.row(u).iter().zip(s.words()).map(|(a, b)| a & b).collect();
                for v in iter_bits(&masked).filter(|&v| v > u) {
                    push(u, v);
                }
            }
        }
        Scope::Between(a, b) => {
            for u in a.iter() {
                let masked: Vec<u64> = g.row(u).iter().zip(b.words()).map(|(x, y)| x & y).collect();
                for v in iter_bits(&masked) {
                    push(u, v);
                }
            }
        }
    }
    out
}

/// A uniformly random color of `colors` (unused in `forest`) that has an eligible
/// edge, then a uniformly random such edge.
pub fn random_eligible(
    f: &ColoredFamily,
    forest: &Forest,
    colors: &[usize],
    scope: Scope,
    extra: &dyn Fn(usize, usize) -> bool,
    r: &mut Rng,
) -> Option<(usize, usize, usize)> {
    let mut order: Vec<usize> = colors.iter().copied().filter(|&c| !forest.color_used(c)).collect();
    order.shuffle(r);
    for c in order {
        let edges = eligible_edges(f.color(c), forest, scope, extra);
        if let Some(&(u, v)) = edges.choose(r) {
            return Some((u, v, c));
        }
    }
    None
}

/// A uniformly random eligible edge of a single graph.
pub fn random_eligible_in(g: &Graph, forest: &Forest, scope: Scope, extra: &dyn Fn(usize, usize) -> bool, r: &mut Rng) -> Option<(usize, usize)> {
    eligible_edges(g, forest, scope, extra).choose(r).copied()
}
