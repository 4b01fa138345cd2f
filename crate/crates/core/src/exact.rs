//! Exact backtracking search, counting and packing of transversals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::ColoredFamily;
use crate::graph::Graph;
use crate::transversal::Transversal;

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
pub const DEFAULT_COUNT_CAP: usize = 8;
pub const PACK_EXACT_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Transversal),
    /// Search space exhausted without a hit.
    NoneExists,
    /// Node budget hit; existence unknown.
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Transversal> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, SearchOutcome::BudgetExhausted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

enum Flow {
    Stop,
    Continue,
}

/// Depth-first path extension with an incremental edge-to-color matching.
struct Searcher<'a> {
    f: &'a ColoredFamily,
    union: Graph,
    n: usize,
    path: Vec<usize>,
    on_path: Vec<bool>,
    /// Color assigned to each edge position (position `i` is `path[i] path[i+1]`).
    edge_color: Vec<Option<usize>>,
    color_edge: Vec<Option<usize>>,
    edge_ends: Vec<(usize, usize)>,
    target: usize,
    closed: bool,
    canonical: bool,
    /// Only report cycles whose vertex sequence is lexicographically above this one.
    floor: Option<Vec<usize>>,
    tight: bool,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Searcher<'a> {
    fn new(f: &'a ColoredFamily, start: usize, target: usize, closed: bool, budget: u64) -> Self {
        let n = f.n();
        let mut on_path = vec![false; n];
        on_path[start] = true;
        Searcher {
            f,
            union: f.union_graph(),
            n,
            path: vec![start],
            on_path,
            edge_color: Vec::new(),
            color_edge: vec![None; f.m()],
            edge_ends: Vec::new(),
            target,
            closed,
            canonical: false,
            floor: None,
            tight: true,
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    /// Kuhn augmenting path from edge position `pos`.
    fn augment(&mut self, pos: usize, seen: &mut [bool]) -> bool {
        let (u, v) = self.edge_ends[pos];
        for c in 0..self.f.m() {
            if seen[c] || !self.f.has(c, u, v) {
                continue;
            }
            seen[c] = true;
            let ok = match self.color_edge[c] {
                None => true,
                Some(other) => self.augment(other, seen),
            };
            if ok {
                self.edge_color[pos] = Some(c);
                self.color_edge[c] = Some(pos);
                return true;
            }
        }
        false
    }

    /// Adds edge `u v` as the next position; returns the snapshot to restore on failure or undo.
    fn push_edge(&mut self, u: usize, v: usize) -> Option<(Vec<Option<usize>>, Vec<Option<usize>>)> {
        let snapshot = (self.edge_color.clone(), self.color_edge.clone());
        self.edge_ends.push((u, v));
        self.edge_color.push(None);
        let pos = self.edge_ends.len() - 1;
        let mut seen = vec![false; self.f.m()];
        if self.augment(pos, &mut seen) {
            Some(snapshot)
        } else {
            self.edge_ends.pop();
            self.edge_color = snapshot.0;
            self.color_edge = snapshot.1;
            None
        }
    }

    fn pop_edge(&mut self, snapshot: (Vec<Option<usize>>, Vec<Option<usize>>)) {
        self.edge_ends.pop();
        self.edge_color = snapshot.0;
        self.color_edge = snapshot.1;
    }

    /// Necessary conditions for completing the current path.
    fn feasible(&self) -> bool {
        let end = *self.path.last().expect("non-empty path");
        let remaining: Vec<usize> = (0..self.n).filter(|&v| !self.on_path[v]).collect();
        if remaining.is_empty() {
            return true;
        }
        // every remaining vertex reachable from the endpoint through remaining vertices
        let mut reach = vec![false; self.n];
        let mut stack = vec![end];
        let mut count = 0;
        while let Some(x) = stack.pop() {
            for w in self.union.neighbors(x) {
                if !self.on_path[w] && !reach[w] {
                    reach[w] = true;
                    count += 1;
                    if w != self.target || self.closed {
                        stack.push(w);
                    }
                }
            }
        }
        if count < remaining.len() {
            return false;
        }
        // degree: interior vertices need two usable neighbours
        let start = self.path[0];
        for &w in &remaining {
            let usable = self
                .union
                .neighbors(w)
                .filter(|&x| !self.on_path[x] || x == end || (self.closed && x == start))
                .count();
            let need = if !self.closed && w == self.target { 1 } else { 2 };
            if usable < need {
                return false;
            }
        }
        // every unmatched color must still have a usable edge
        let mut open = vec![false; self.n];
        for &w in &remaining {
            open[w] = true;
        }
        open[end] = true;
        if self.closed {
            open[start] = true;
        }
        // colors with no open edge must sit on placed edges; a matching covering them
        // coexists with the current one covering every placed edge
        let stuck: Vec<usize> = (0..self.f.m())
            .filter(|&c| {
                let g = self.f.color(c);
                !(0..self.n).any(|x| open[x] && g.neighbors(x).any(|y| y > x && open[y]))
            })
            .collect();
        if stuck.is_empty() {
            return true;
        }
        if stuck.len() > self.edge_ends.len() {
            return false;
        }
        let adj: Vec<Vec<usize>> = stuck
            .iter()
            .map(|&c| (0..self.edge_ends.len()).filter(|&i| self.f.has(c, self.edge_ends[i].0, self.edge_ends[i].1)).collect())
            .collect();
        crate::matching::matching_size(&crate::matching::hopcroft_karp(&adj, self.edge_ends.len())) == stuck.len()
    }

    fn current(&self) -> Transversal {
        let colors = self.edge_color.iter().map(|c| c.expect("all positions matched")).collect();
        Transversal { vertices: self.path.clone(), colors, closed: self.closed }
    }

    fn dfs(&mut self, visit: &mut dyn FnMut(Transversal) -> Flow) -> Flow {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return Flow::Stop;
        }
        let end = *self.path.last().expect("non-empty path");
        if self.path.len() == self.n {
            if self.closed {
                if self.canonical && self.path[1] > self.path[self.n - 1] {
                    return Flow::Continue;
                }
                if self.floor.is_some() && self.tight {
                    return Flow::Continue;
                }
                if !self.union.has_edge(end, self.path[0]) {
                    return Flow::Continue;
                }
                let Some(snap) = self.push_edge(end, self.path[0]) else {
                    return Flow::Continue;
                };
                let flow = visit(self.current());
                self.pop_edge(snap);
                return flow;
            }
            return visit(self.current());
        }
        let cands: Vec<usize> = self.union.neighbors(end).filter(|&w| !self.on_path[w]).collect();
        for w in cands {
            if !self.closed && w == self.target && self.path.len() + 1 != self.n {
                continue;
            }
            let was_tight = self.tight;
            if let (Some(fl), true) = (&self.floor, self.tight) {
                let bound = fl[self.path.len()];
                if w < bound {
                    continue;
                }
                self.tight = w == bound;
            }
            let Some(snap) = self.push_edge(end, w) else {
                self.tight = was_tight;
                continue;
            };
            self.path.push(w);
            self.on_path[w] = true;
            let flow = if self.feasible() { self.dfs(visit) } else { Flow::Continue };
            self.on_path[w] = false;
            self.path.pop();
            self.pop_edge(snap);
            self.tight = was_tight;
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}

fn check_family(f: &ColoredFamily, edges: usize) -> Result<()> {
    if f.n() < 2 {
        return Err(Error::Precondition("need at least 2 vertices".into()));
    }
    if f.m() != edges {
        return Err(Error::Precondition(format!("family has {} colors, {edges} needed", f.m())));
    }
    Ok(())
}

fn run(mut s: Searcher) -> SearchResult {
    let mut found = None;
    if s.feasible() {
        s.dfs(&mut |t| {
            found = Some(t);
            Flow::Stop
        });
    }
    let outcome = match found {
        Some(t) => SearchOutcome::Found(t),
        None if s.exhausted => SearchOutcome::BudgetExhausted,
        None => SearchOutcome::NoneExists,
    };
    SearchResult { outcome, nodes: s.nodes }
}

/// Rainbow Hamilton cycle using every color exactly once.
pub fn find_transversal(f: &ColoredFamily, budget: u64) -> Result<SearchResult> {
    if f.n() < 3 {
        return Err(Error::Precondition("need n >= 3".into()));
    }
    check_family(f, f.n())?;
    Ok(run(Searcher::new(f, 0, 0, true, budget)))
}

/// Rainbow Hamilton `u`–`v` path using each of the `n-1` colors once.
pub fn find_transversal_path(f: &ColoredFamily, u: usize, v: usize, budget: u64) -> Result<SearchResult> {
    if u == v {
        return Err(Error::Precondition("endpoints must differ".into()));
    }
    if u >= f.n() || v >= f.n() {
        return Err(Error::VertexOutOfRange);
    }
    check_family(f, f.n() - 1)?;
    Ok(run(Searcher::new(f, u, v, false, budget)))
}

/// Hamilton cycles of `g`, each edge set once (start at 0, `v_1 < v_{n-1}`).
pub fn hamilton_cycles(g: &Graph, mut visit: impl FnMut(&[usize])) {
    fn rec(g: &Graph, path: &mut Vec<usize>, used: &mut [bool], visit: &mut dyn FnMut(&[usize])) {
        let n = g.n();
        let end = *path.last().expect("non-empty");
        if path.len() == n {
            if path[1] < path[n - 1] && g.has_edge(end, path[0]) {
                visit(path);
            }
            return;
        }
        let cands: Vec<usize> = g.neighbors(end).filter(|&w| !used[w]).collect();
        for w in cands {
            used[w] = true;
            path.push(w);
            rec(g, path, used, visit);
            path.pop();
            used[w] = false;
        }
    }
    let n = g.n();
    if n < 3 {
        return;
    }
    let mut used = vec![false; n];
    used[0] = true;
    rec(g, &mut vec![0], &mut used, &mut visit);
}

/// Permanent of a square 0/1 matrix (Ryser).
pub fn permanent(a: &[Vec<bool>]) -> u128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut total: i128 = 0;
    for s in 1u32..(1 << n) {
        let mut prod: i128 = 1;
        for row in a {
            let sum = (0..n).filter(|&j| s >> j & 1 == 1 && row[j]).count() as i128;
            prod *= sum;
            if prod == 0 {
                break;
            }
        }
        let sign = if (n as u32 - s.count_ones()) % 2 == 0 { 1 } else { -1 };
        total += sign * prod;
    }
    total as u128
}

/// Number of pairs (Hamilton cycle, color bijection).
pub fn count_transversals(f: &ColoredFamily, cap: usize) -> Result<u128> {
    let n = f.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n < 3 {
        return Err(Error::Precondition("need n >= 3".into()));
    }
    check_family(f, n)?;
    let mut total = 0u128;
    hamilton_cycles(&f.union_graph(), |cyc| {
        let a: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                let (u, v) = (cyc[i], cyc[(i + 1) % n]);
                (0..f.m()).map(|c| f.has(c, u, v)).collect()
            })
            .collect();
        total += permanent(&a);
    });
    Ok(total)
}

/// Every transversal, listed as cycles from vertex 0 with `v_1 < v_{n-1}`.
pub fn all_transversals(f: &ColoredFamily, cap: usize) -> Result<Vec<Transversal>> {
    let n = f.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n < 3 {
        return Err(Error::Precondition("need n >= 3".into()));
    }
    check_family(f, n)?;
    fn assign(f: &ColoredFamily, cyc: &[usize], i: usize, used: &mut [bool], cols: &mut Vec<usize>, out: &mut Vec<Transversal>) {
        let n = cyc.len();
        if i == n {
            out.push(Transversal::cycle(cyc.to_vec(), cols.clone()));
            return;
        }
        let (u, v) = (cyc[i], cyc[(i + 1) % n]);
        for c in 0..f.m() {
            if !used[c] && f.has(c, u, v) {
                used[c] = true;
                cols.push(c);
                assign(f, cyc, i + 1, used, cols, out);
                cols.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    hamilton_cycles(&f.union_graph(), |cyc| {
        assign(f, cyc, 0, &mut vec![false; f.m()], &mut Vec::new(), &mut out);
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PackStrategy {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packing {
    pub transversals: Vec<Transversal>,
    /// Budget ran out before the search finished.
    pub budget_hit: bool,
}

fn remove_edges(f: &ColoredFamily, used: &[(usize, usize)]) -> ColoredFamily {
    f.map_colors(|_, g| {
        let mut h = g.clone();
        for &(u, v) in used {
            h.remove_edge(u, v);
        }
        h
    })
}

/// Up to `k` pairwise edge-disjoint transversals.
pub fn pack_edge_disjoint(f: &ColoredFamily, k: usize, strategy: PackStrategy, budget: u64) -> Result<Packing> {
    if k == 0 {
        return Ok(Packing { transversals: vec![], budget_hit: false });
    }
    match strategy {
        PackStrategy::Greedy => {
            let mut out = Vec::new();
            let mut used = Vec::new();
            let mut budget_hit = false;
            while out.len() < k {
                let res = find_transversal(&remove_edges(f, &used), budget)?;
                match res.outcome {
                    SearchOutcome::Found(t) => {
                        used.extend(t.edges());
                        out.push(t);
                    }
                    SearchOutcome::NoneExists => break,
                    SearchOutcome::BudgetExhausted => {
                        budget_hit = true;
                        break;
                    }
                }
            }
            Ok(Packing { transversals: out, budget_hit })
        }
        PackStrategy::Exact => {
            if f.n() > PACK_EXACT_CAP {
                return Err(Error::CapExceeded { n: f.n(), cap: PACK_EXACT_CAP });
            }
            check_family(f, f.n())?;
            let mut best = Vec::new();
            let mut nodes = 0u64;
            let mut budget_hit = false;
            pack_rec(f, k, &mut Vec::new(), &mut best, &mut nodes, budget, &mut budget_hit);
            Ok(Packing { transversals: best, budget_hit })
        }
    }
}

fn pack_rec(
    f: &ColoredFamily,
    k: usize,
    current: &mut Vec<Transversal>,
    best: &mut Vec<Transversal>,
    nodes: &mut u64,
    budget: u64,
    budget_hit: &mut bool,
) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if best.len() >= k || *budget_hit {
        return;
    }
    let used: Vec<(usize, usize)> = current.iter().flat_map(|t| t.edges()).collect();
    let rest = remove_edges(f, &used);
    // cycles are taken in increasing canonical order to skip permuted packings
    let mut after = current.last().map(cycle_key);
    loop {
        let mut s = Searcher::new(&rest, 0, 0, true, budget.saturating_sub(*nodes));
        s.canonical = true;
        s.floor = after.clone();
        let mut next = None;
        if s.feasible() {
            s.dfs(&mut |t| {
                next = Some(t);
                Flow::Stop
            });
        }
        *nodes += s.nodes;
        if s.exhausted {
            *budget_hit = true;
        }
        let Some(t) = next else { return };
        after = Some(t.vertices.clone());
        current.push(t);
        pack_rec(f, k, current, best, nodes, budget, budget_hit);
        current.pop();
        if best.len() >= k || *budget_hit {
            return;
        }
    }
}

/// Canonical vertex sequence of a cycle: from 0, in the direction with the smaller second vertex.
fn cycle_key(t: &Transversal) -> Vec<usize> {
    let n = t.vertices.len();
    let p = t.vertices.iter().position(|&v| v == 0).unwrap_or(0);
    let fwd: Vec<usize> = (0..n).map(|i| t.vertices[(p + i) % n]).collect();
    let bwd: Vec<usize> = (0..n).map(|i| t.vertices[(p + n - i) % n]).collect();
    fwd.min(bwd)
}
