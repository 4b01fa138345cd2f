//! Cleanups for extremal families: a rainbow prefix path plus a residual frame
//! on which the bipartite path sampler finishes the cycle.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::bipartite::BipartiteParams;
use super::eligible::{random_eligible, Forest, Scope};
use crate::error::{retries, Error, Result};
use crate::family::ColoredFamily;
use crate::graph::VertexSet;
use crate::rng::{self, derive_seed, Rng};
use crate::transversal::Transversal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalParams {
    /// A color is near-bipartite for `A` if `e(A) + e(Ā) ≤ eps·n²`.
    pub eps: f64,
    /// Case I when at least `case_split·n` colors are near-bipartite.
    pub case_split: f64,
    /// Vertices whose summed degree falls below this fraction of the maximum get covered.
    pub low_frac: f64,
    /// Fresh single vertices joined in with the pieces, as a fraction of `n`.
    pub pool_frac: f64,
    pub frame_density: f64,
    pub clique_density: f64,
    /// Residual sides must have at least `omega·n` vertices.
    pub omega: f64,
    pub retries: usize,
    pub connector_tries: usize,
    pub bipartite: BipartiteParams,
}

impl Default for ExtremalParams {
    fn default() -> Self {
        ExtremalParams {
            eps: 0.01,
            case_split: 0.8,
            low_frac: 0.999,
            pool_frac: 0.02,
            frame_density: 0.995,
            clique_density: 0.999,
            omega: 0.05,
            retries: 30,
            connector_tries: 60,
            bipartite: BipartiteParams::default(),
        }
    }
}

/// Residual equibipartition for the bipartite path sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteFrame {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub colors: Vec<usize>,
    pub v1: usize,
    pub v2: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CleanupI {
    /// Rainbow path from `frame.v1` to `frame.v2`.
    pub prefix: Transversal,
    pub frame: BipartiteFrame,
    pub balance: i64,
    pub low_vertices: usize,
    pub notes: Vec<String>,
    pub attempts: usize,
}

/// Residual halves for the two-clique case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueFrame {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub colors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CleanupII {
    /// Runs from `A` to `B`; uses every color of `C_1 ∪ C_2`.
    pub p1: Transversal,
    /// A single crossing edge.
    pub p2: Transversal,
    pub frame: CliqueFrame,
    pub class_sizes: [usize; 3],
    /// Set when `|C_1 ∪ C_2|` is even and one extra crossing edge fixes the parity.
    pub parity_edge: bool,
    pub notes: Vec<String>,
    pub attempts: usize,
}

pub(crate) fn set_of(n: usize, xs: impl IntoIterator<Item = usize>) -> VertexSet {
    VertexSet::from_iter(n, xs)
}

pub(crate) fn complement(_n: usize, s: &VertexSet) -> VertexSet {
    s.complement()
}

/// `e(A) + e(Ā) ≤ eps·n²`.
pub fn near_bipartite_colors(f: &ColoredFamily, a: &VertexSet, eps: f64) -> Vec<usize> {
    let n = f.n();
    let b = complement(n, a);
    (0..f.m())
        .filter(|&c| {
            let g = f.color(c);
            (g.edges_within(a) + g.edges_within(&b)) as f64 <= eps * (n * n) as f64
        })
        .collect()
}

fn summed_degree(f: &ColoredFamily, colors: &[usize], v: usize, into: &VertexSet) -> usize {
    colors.iter().map(|&c| f.color(c).degree_into(v, into)).sum()
}

/// Moves vertices with at least two thirds of their (summed) degree on their own side.
fn relocate_two_thirds(f: &ColoredFamily, a: &mut VertexSet, colors: &[usize], same_side: bool) -> usize {
    let n = f.n();
    let mut moves = 0;
    let mut changed = true;
    while changed && moves < 4 * n {
        changed = false;
        for v in 0..n {
            let own = if a.contains(v) { a.clone() } else { complement(n, a) };
            let other = complement(n, &own);
            let tot: usize = colors.iter().map(|&c| f.color(c).degree(v)).sum();
            let key = summed_degree(f, colors, v, if same_side { &own } else { &other });
            if tot > 0 && 3 * key >= 2 * tot {
                if a.contains(v) {
                    a.remove(v);
                } else {
                    a.insert(v);
                }
                moves += 1;
                changed = true;
            }
        }
    }
    moves
}

pub(super) struct Ctx<'a> {
    pub f: &'a ColoredFamily,
    pub forest: Forest,
    /// Vertices that may not be used by new edges.
    pub blocked: VertexSet,
    pub r: Rng,
}

impl Ctx<'_> {
    pub fn fresh(&self, v: usize) -> bool {
        !self.blocked.contains(v) && !self.forest.touched(v)
    }

    /// Random unused color of `colors` with an edge `x—y`, `y` fresh in `target`.
    pub fn step(&mut self, colors: &[usize], x: usize, target: &VertexSet) -> Option<(usize, usize)> {
        let blocked = self.blocked.clone();
        let fo = self.forest.clone();
        let extra = move |_: usize, y: usize| !blocked.contains(y) && !fo.touched(y);
        let (u, y, c) = random_eligible(self.f, &self.forest, colors, Scope::From(x, target), &extra, &mut self.r)?;
        debug_assert_eq!(u, x);
        self.forest.add(x, y, Some(c));
        Some((y, c))
    }

    /// Random unused color of `colors` with a fresh edge in `scope`.
    pub fn matching_edge(&mut self, colors: &[usize], scope: Scope) -> Option<(usize, usize, usize)> {
        let blocked = self.blocked.clone();
        let fo = self.forest.clone();
        let extra = move |u: usize, v: usize| !blocked.contains(u) && !blocked.contains(v) && !fo.touched(u) && !fo.touched(v);
        let e = random_eligible(self.f, &self.forest, colors, scope, &extra, &mut self.r)?;
        self.forest.add(e.0, e.1, Some(e.2));
        Some(e)
    }

    /// Joins `x` to `y` through one fresh vertex per entry of `mids`, taken from
    /// that set; returns the new interior vertices.
    pub fn connect(&mut self, colors: &[usize], x: usize, y: usize, mids: &[&VertexSet], tries: usize) -> Option<Vec<usize>> {
        for _ in 0..tries {
            let saved = self.forest.clone();
            let mut inner = Vec::new();
            let mut cur = x;
            for m in mids {
                match self.step(colors, cur, m) {
                    Some((nx, _)) => {
                        inner.push(nx);
                        cur = nx;
                    }
                    None => break,
                }
            }
            if inner.len() == mids.len() {
                let target = set_of(self.f.n(), [y]);
                let fo = self.forest.clone();
                let extra = |_: usize, _: usize| true;
                if let Some((_, _, c)) = random_eligible(self.f, &fo, colors, Scope::From(cur, &target), &extra, &mut self.r) {
                    self.forest.add(cur, y, Some(c));
                    return Some(inner);
                }
            }
            self.forest = saved;
        }
        None
    }

    /// Concatenates pieces in order, joining consecutive ends with crossing connectors
    /// (length 2 between same-side ends, 3 otherwise).
    pub fn join_crossing(&mut self, colors: &[usize], a: &VertexSet, b: &VertexSet, pieces: &[Vec<usize>], tries: usize) -> Option<Vec<usize>> {
        let mut path = pieces[0].clone();
        for pc in &pieces[1..] {
            let x = *path.last().unwrap();
            let sx = a.contains(x);
            let opp = |s: bool| if s { b } else { a };
            let mids: Vec<&VertexSet> = if sx == a.contains(pc[0]) { vec![opp(sx)] } else { vec![opp(sx), opp(!sx)] };
            let inner = self.connect(colors, x, pc[0], &mids, tries)?;
            path.extend(inner);
            path.extend_from_slice(pc);
        }
        Some(path)
    }

    pub fn path_transversal(&self, path: &[usize]) -> Transversal {
        let colors = path
            .windows(2)
            .map(|w| self.forest.color_of(w[0], w[1]).flatten().expect("colored forest edge"))
            .collect();
        Transversal::path(path.to_vec(), colors)
    }
}

fn side_of(a: &VertexSet, v: usize) -> bool {
    a.contains(v)
}

pub fn validate_bipartite_frame(f: &ColoredFamily, fr: &BipartiteFrame, p: &ExtremalParams) -> Vec<String> {
    let n = f.n();
    let mut out = Vec::new();
    let a = set_of(n, fr.a.iter().copied());
    let b = set_of(n, fr.b.iter().copied());
    if !a.contains(fr.v1) || !b.contains(fr.v2) {
        out.push("(1) endpoints are not on their sides".into());
    }
    if fr.a.len() != fr.b.len() || fr.a.iter().any(|&v| b.contains(v)) {
        out.push("sides are not an equipartition".into());
    }
    if fr.colors.len() + 1 != 2 * fr.a.len() {
        out.push(format!("{} colors for sides of {}", fr.colors.len(), fr.a.len()));
    }
    let (na, nb, nc) = (fr.a.len() as f64, fr.b.len() as f64, fr.colors.len() as f64);
    let d = p.frame_density;
    for &c in &fr.colors {
        if (f.color(c).edges_between(&a, &b) as f64) < d * na * nb - 1e-9 {
            out.push(format!("(2) color {c} is sparse across the sides"));
            break;
        }
    }
    for (side, other, size) in [(&fr.b, &a, na), (&fr.a, &b, nb)] {
        for &v in side {
            if (summed_degree(f, &fr.colors, v, other) as f64) < d * size * nc - 1e-9 {
                out.push(format!("(3/4) vertex {v} has low summed degree"));
                break;
            }
        }
    }
    if na < p.omega * n as f64 || nc < p.omega * n as f64 {
        out.push("(5) residual is too small".into());
    }
    out
}

pub fn validate_clique_frame(f: &ColoredFamily, fr: &CliqueFrame, ends: [usize; 4], p: &ExtremalParams) -> Vec<String> {
    let n = f.n();
    let mut out = Vec::new();
    let a = set_of(n, fr.a.iter().copied());
    let b = set_of(n, fr.b.iter().copied());
    if !(a.contains(ends[0]) && a.contains(ends[2]) && b.contains(ends[1]) && b.contains(ends[3])) {
        out.push("(1) path ends are not on their sides".into());
    }
    for (w, set) in [(&fr.a, &a), (&fr.b, &b)] {
        let pairs = (w.len() * w.len().saturating_sub(1) / 2) as f64;
        for &c in &fr.colors {
            if (f.color(c).edges_within(set) as f64) < p.clique_density * pairs - 1e-9 {
                out.push(format!("(2) color {c} is sparse inside a side"));
                break;
            }
        }
        if w.len() % 2 != 0 {
            out.push("(3) side of odd size".into());
        }
        if (w.len() as f64) < p.omega * n as f64 {
            out.push("(3) side is too small".into());
        }
    }
    if fr.colors.len() + 2 != fr.a.len() + fr.b.len() {
        out.push("color count does not match the residual".into());
    }
    out
}

/// Residual after removing path interiors.
fn residual(n: usize, side: &VertexSet, paths: &[&[usize]]) -> Vec<usize> {
    let mut interior = vec![false; n];
    for p in paths {
        for &v in &p[1..p.len() - 1] {
            interior[v] = true;
        }
    }
    side.iter().filter(|&v| !interior[v]).collect()
}

fn unused(all: usize, fo: &Forest) -> Vec<usize> {
    (0..all).filter(|&c| !fo.color_used(c)).collect()
}

/// Case I: most colors are near-bipartite for the half-set `a0`.
pub fn cleanup_bipartite_with(f: &ColoredFamily, a0: &[usize], p: &ExtremalParams, seed: u64) -> Result<CleanupI> {
    let n = f.n();
    if f.m() != n {
        return Err(Error::Precondition("need as many colors as vertices".into()));
    }
    let a0s = set_of(n, a0.iter().copied());
    let c_bip = near_bipartite_colors(f, &a0s, p.eps);
    if (c_bip.len() as f64) < p.case_split * n as f64 {
        return Err(Error::Precondition(format!("only {} near-bipartite colors", c_bip.len())));
    }
    let mut last = String::new();
    for i in 0..p.retries.max(1) {
        match cleanup_bipartite_once(f, &a0s, &c_bip, p, derive_seed(seed, "cleanup-bipartite", i as u64)) {
            Ok(mut c) => {
                c.attempts = i + 1;
                return Ok(c);
            }
            Err(e @ Error::Precondition(_)) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    Err(retries("cleanup-bipartite", last))
}

fn cleanup_bipartite_once(f: &ColoredFamily, a0: &VertexSet, c_bip: &[usize], p: &ExtremalParams, seed: u64) -> Result<CleanupI> {
    let n = f.n();
    let mut notes = Vec::new();
    let mut a = a0.clone();
    relocate_two_thirds(f, &mut a, c_bip, true);
    if a.len() * 2 < n {
        a = complement(n, &a);
    }
    let thr = 0.0001 * (n * n) as f64;
    loop {
        let b = complement(n, &a);
        if a.len() <= b.len() + 1 {
            break;
        }
        let cand = a.iter().map(|v| (summed_degree(f, c_bip, v, &a), v)).filter(|&(s, _)| s as f64 >= thr).max();
        match cand {
            Some((_, v)) => a.remove(v),
            None => break,
        }
    }
    let b = complement(n, &a);
    let d = a.len() as i64 - b.len() as i64;
    let in_c: Vec<bool> = (0..f.m()).map(|c| c_bip.binary_search(&c).is_ok()).collect();
    let non_c: Vec<usize> = (0..f.m()).filter(|&c| !in_c[c]).collect();

    let mut cx = Ctx { f, forest: Forest::new(n, f.m()), blocked: VertexSet::new(n), r: rng::rng(seed) };
    // internal edges: non-C colors on alternating sides, then C colors to reach the balance d
    let mut order = non_c.clone();
    order.shuffle(&mut cx.r);
    let (mut ka, mut kb) = (0i64, 0i64);
    for c in order {
        let prefer_a = match ka.cmp(&kb) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => cx.r.gen(),
        };
        let sides = if prefer_a { [(&a, true), (&b, false)] } else { [(&b, false), (&a, true)] };
        let mut placed = false;
        for (s, is_a) in sides {
            if cx.matching_edge(&[c], Scope::Within(s)).is_some() {
                if is_a {
                    ka += 1;
                } else {
                    kb += 1;
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(retries("cleanup-bipartite", format!("color {c} has no free internal edge")));
        }
    }
    let need = d - (ka - kb);
    let (side, count) = if need >= 0 { (&a, need) } else { (&b, -need) };
    for _ in 0..count {
        cx.matching_edge(c_bip, Scope::Within(side))
            .ok_or_else(|| retries("cleanup-bipartite", "no near-bipartite color has a free internal edge"))?;
    }

    // low-degree vertices become interior through crossing edges
    let max_a = (c_bip.len() * b.len()) as f64;
    let max_b = (c_bip.len() * a.len()) as f64;
    let low: Vec<usize> = (0..n)
        .filter(|&v| {
            let (into, max) = if a.contains(v) { (&b, max_a) } else { (&a, max_b) };
            (summed_degree(f, c_bip, v, into) as f64) < p.low_frac * max
        })
        .collect();
    for &v in &low {
        cx.blocked.insert(v);
    }
    let mut low_order = low.clone();
    low_order.shuffle(&mut cx.r);
    for v in low_order {
        let other = if a.contains(v) { &b } else { &a };
        while cx.forest.degree(v) < 2 {
            cx.step(c_bip, v, other).ok_or_else(|| retries("cleanup-bipartite", format!("cannot cover low vertex {v}")))?;
        }
    }

    // join the pieces and a pool of fresh vertices
    let mut pieces = cx.forest.paths();
    let fresh: Vec<usize> = (0..n).filter(|&v| cx.fresh(v)).collect();
    let pool_size = ((p.pool_frac * n as f64).round() as usize).max(1).min(fresh.len());
    for v in rng::sample_k(&fresh, pool_size, &mut cx.r) {
        cx.blocked.insert(v);
        pieces.push(vec![v]);
    }
    pieces.shuffle(&mut cx.r);
    for pc in &mut pieces {
        if cx.r.gen::<bool>() {
            pc.reverse();
        }
    }
    let mut path = cx
        .join_crossing(c_bip, &a, &b, &pieces, p.connector_tries)
        .ok_or_else(|| retries("cleanup-bipartite", "no connector between pieces"))?;
    let (s0, s1) = (side_of(&a, path[0]), side_of(&a, *path.last().unwrap()));
    if s0 == s1 {
        let x = *path.last().unwrap();
        let other = if s1 { &b } else { &a };
        let (y, _) = cx.step(c_bip, x, other).ok_or_else(|| retries("cleanup-bipartite", "no closing edge"))?;
        path.push(y);
    }
    if !a.contains(path[0]) {
        path.reverse();
    }
    let prefix = cx.path_transversal(&path);
    let (v1, v2) = (path[0], *path.last().unwrap());
    let frame = BipartiteFrame {
        a: residual(n, &a, &[&path]),
        b: residual(n, &b, &[&path]),
        colors: unused(f.m(), &cx.forest),
        v1,
        v2,
    };
    let bad = validate_bipartite_frame(f, &frame, p);
    if !bad.is_empty() {
        return Err(retries("cleanup-bipartite", format!("frame check: {}", bad.join("; "))));
    }
    if d != 0 {
        notes.push(format!("side imbalance {d} absorbed by internal edges"));
    }
    Ok(CleanupI { prefix, frame, balance: d, low_vertices: low.len(), notes, attempts: 0 })
}

/// Case II: many colors are far from bipartite for the half-set `a0`.
pub fn cleanup_cliques_with(f: &ColoredFamily, a0: &[usize], p: &ExtremalParams, seed: u64) -> Result<CleanupII> {
    let n = f.n();
    if f.m() != n {
        return Err(Error::Precondition("need as many colors as vertices".into()));
    }
    let a0s = set_of(n, a0.iter().copied());
    let b0s = complement(n, &a0s);
    let c1 = near_bipartite_colors(f, &a0s, p.eps);
    let c2: Vec<usize> = (0..f.m())
        .filter(|c| c1.binary_search(c).is_err())
        .filter(|&c| f.color(c).edges_between(&a0s, &b0s) as f64 >= 0.1 * (n * n) as f64)
        .collect();
    let c3: Vec<usize> = (0..f.m()).filter(|c| c1.binary_search(c).is_err() && !c2.contains(c)).collect();
    if (c3.len() as f64) < (1.0 - p.case_split) * n as f64 {
        return Err(Error::Precondition(format!("only {} clique-like colors", c3.len())));
    }
    let mut last = String::new();
    for i in 0..p.retries.max(1) {
        match cleanup_cliques_once(f, &a0s, [&c1, &c2, &c3], p, derive_seed(seed, "cleanup-cliques", i as u64)) {
            Ok(mut c) => {
                c.attempts = i + 1;
                return Ok(c);
            }
            Err(e @ Error::Precondition(_)) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    Err(retries("cleanup-cliques", last))
}

fn cleanup_cliques_once(f: &ColoredFamily, a0: &VertexSet, classes: [&[usize]; 3], p: &ExtremalParams, seed: u64) -> Result<CleanupII> {
    let n = f.n();
    let [c1, c2, c3] = classes;
    let notes = Vec::new();
    let mut a = a0.clone();
    relocate_two_thirds(f, &mut a, c3, false);
    let b = complement(n, &a);
    let mut cx = Ctx { f, forest: Forest::new(n, f.m()), blocked: VertexSet::new(n), r: rng::rng(seed) };
    let fail = |s: &str| retries("cleanup-cliques", s.to_string());

    // low-degree vertices of each side go inside a short path in that side
    let mut same_side: Vec<(Vec<usize>, bool)> = Vec::new();
    for (side, is_a) in [(&a, true), (&b, false)] {
        let max = (c3.len() * side.len().saturating_sub(1)) as f64;
        let low: Vec<usize> = side.iter().filter(|&v| (summed_degree(f, c3, v, side) as f64) < p.low_frac * max).collect();
        for &v in &low {
            cx.blocked.insert(v);
        }
        if low.is_empty() {
            continue;
        }
        let order = rng::shuffled(&low, &mut cx.r);
        cx.step(c3, order[0], side).ok_or_else(|| fail("cannot start a low-degree path"))?;
        for w in order.windows(2) {
            cx.connect(c3, w[0], w[1], &[side], p.connector_tries).ok_or_else(|| fail("cannot link low-degree vertices"))?;
        }
        let tail = *order.last().unwrap();
        cx.step(c3, tail, side).ok_or_else(|| fail("cannot end a low-degree path"))?;
        let piece = cx.forest.paths().into_iter().find(|q| q.contains(&tail)).unwrap();
        same_side.push((piece, is_a));
    }

    // P_2: one crossing edge of a clique-like color
    let (x2, y2, _) = cx.matching_edge(c3, Scope::Between(&a, &b)).ok_or_else(|| fail("no crossing edge for P_2"))?;
    let p2_path = if a.contains(x2) { vec![x2, y2] } else { vec![y2, x2] };
    cx.blocked.insert(x2);
    cx.blocked.insert(y2);

    let mut crossing: Vec<Vec<usize>> = Vec::new();
    let parity_edge = (c1.len() + c2.len()) % 2 == 0;
    if parity_edge {
        let (u, v, _) = cx.matching_edge(c3, Scope::Between(&a, &b)).ok_or_else(|| fail("no parity edge"))?;
        crossing.push(vec![u, v]);
    }
    for &c in &rng::shuffled(c2, &mut cx.r) {
        let (u, v, _) = cx.matching_edge(&[c], Scope::Between(&a, &b)).ok_or_else(|| fail("no crossing edge for a dense color"))?;
        crossing.push(vec![u, v]);
    }
    let long_path = c1.len() as f64 > p.eps.sqrt() * n as f64;
    if long_path {
        let order = rng::shuffled(c1, &mut cx.r);
        let (u, v, _) = cx.matching_edge(&order[..1], Scope::Between(&a, &b)).ok_or_else(|| fail("no start for the bipartite path"))?;
        let mut path = vec![u, v];
        for &c in &order[1..] {
            let x = *path.last().unwrap();
            let other = if a.contains(x) { &b } else { &a };
            let (y, _) = cx.step(&[c], x, other).ok_or_else(|| fail("bipartite path got stuck"))?;
            path.push(y);
        }
        if a.contains(path[0]) == a.contains(*path.last().unwrap()) {
            same_side.push((path.clone(), a.contains(path[0])));
        } else {
            crossing.push(path);
        }
    } else {
        for &c in &rng::shuffled(c1, &mut cx.r) {
            let (u, v, _) = cx.matching_edge(&[c], Scope::Between(&a, &b)).ok_or_else(|| fail("no crossing edge for a bipartite color"))?;
            crossing.push(vec![u, v]);
        }
    }
    if crossing.is_empty() {
        return Err(fail("no crossing piece"));
    }

    // crossing pieces alternate A→B, B→A; same-side pieces sit where the walk is on their side
    crossing.shuffle(&mut cx.r);
    for (i, pc) in crossing.iter_mut().enumerate() {
        let start_a = i % 2 == 0;
        if a.contains(pc[0]) != start_a {
            pc.reverse();
        }
    }
    let k = crossing.len();
    let mut slots: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k + 1];
    for (pc, is_a) in same_side {
        let valid: Vec<usize> = (0..=k).filter(|&s| (s % 2 == 0) == is_a).collect();
        let &s = valid.choose(&mut cx.r).ok_or_else(|| fail("no slot for a same-side piece"))?;
        slots[s].push(pc);
    }
    let mut seq: Vec<Vec<usize>> = Vec::new();
    for s in 0..=k {
        let mut here = std::mem::take(&mut slots[s]);
        here.shuffle(&mut cx.r);
        for mut pc in here {
            if cx.r.gen::<bool>() {
                pc.reverse();
            }
            seq.push(pc);
        }
        if s < k {
            seq.push(crossing[s].clone());
        }
    }
    let mut p1_path = seq[0].clone();
    for w in 0..seq.len() - 1 {
        let x = *seq[w].last().unwrap();
        let y = seq[w + 1][0];
        let side = if a.contains(x) { &a } else { &b };
        if a.contains(y) != a.contains(x) {
            return Err(Error::Inconsistent("piece arrangement crosses sides".into()));
        }
        let inner = cx.connect(c3, x, y, &[side], p.connector_tries).ok_or_else(|| fail("no connector inside a side"))?;
        p1_path.extend(inner);
        p1_path.extend_from_slice(&seq[w + 1]);
    }

    // even residual sides
    for (side, at_end) in [(&a, false), (&b, true)] {
        let res = residual(n, side, &[&p1_path, &p2_path]);
        if res.len() % 2 == 1 {
            let x = if at_end { *p1_path.last().unwrap() } else { p1_path[0] };
            let (y, _) = cx.step(c3, x, side).ok_or_else(|| fail("cannot fix side parity"))?;
            if at_end {
                p1_path.push(y);
            } else {
                p1_path.insert(0, y);
            }
        }
    }
    let frame = CliqueFrame {
        a: residual(n, &a, &[&p1_path, &p2_path]),
        b: residual(n, &b, &[&p1_path, &p2_path]),
        colors: unused(f.m(), &cx.forest),
    };
    let ends = [p1_path[0], *p1_path.last().unwrap(), p2_path[0], p2_path[1]];
    let bad = validate_clique_frame(f, &frame, ends, p);
    if !bad.is_empty() {
        return Err(fail(&format!("frame check: {}", bad.join("; "))));
    }
    Ok(CleanupII {
        p1: cx.path_transversal(&p1_path),
        p2: cx.path_transversal(&p2_path),
        frame,
        class_sizes: [c1.len(), c2.len(), c3.len()],
        parity_edge,
        notes,
        attempts: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn residual_drops_interiors() {
        let side = set_of(8, [0, 1, 2, 3]);
        assert_eq!(residual(8, &side, &[&[0, 5, 1, 6][..]]), vec![0, 2, 3]);
    }

    #[test]
    fn relocation_fixes_a_misplaced_vertex() {
        let n = 8;
        let truth = set_of(n, 0..4);
        let f = ColoredFamily::uniform(&Graph::complete_bipartite(n, &truth), n);
        let mut a = set_of(n, [0, 1, 2, 4]);
        relocate_two_thirds(&f, &mut a, &(0..n).collect::<Vec<_>>(), true);
        assert!(a == truth || a == complement(n, &truth));
    }
}
