//! Rainbow `a`–`b` Hamilton paths in near-complete bipartite families.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::eligible::{random_eligible_in, Forest, Scope};
use crate::error::{retries, Error, Result};
use crate::exact::{find_transversal_path, SearchOutcome};
use crate::family::ColoredFamily;
use crate::graph::{iter_bits, Graph, VertexSet};
use crate::matching::{hopcroft_karp, matching_size};
use crate::posa::robust_hamilton;
use crate::rng::{self, derive_seed, Rng};
use crate::transversal::Transversal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteParams {
    pub eps: f64,
    /// Reject inputs violating the density conditions instead of noting them.
    pub strict: bool,
    /// Edges of the multiplicity graph lie in at least this fraction of the colors.
    pub g_frac: f64,
    pub lookahead: f64,
    pub retries: usize,
    /// Sides of at most this size are solved exactly.
    pub exact_t: usize,
    /// Sides below this size skip the three-path construction.
    pub full_t: usize,
    pub exact_budget: u64,
    pub ham_retries: usize,
    pub posa_restarts: usize,
}

impl Default for BipartiteParams {
    fn default() -> Self {
        BipartiteParams {
            eps: 0.01,
            strict: false,
            g_frac: 0.95,
            lookahead: 0.4,
            retries: 20,
            exact_t: 6,
            full_t: 20,
            exact_budget: 5_000_000,
            ham_retries: 8,
            posa_restarts: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    Exact,
    /// Hamilton path in the multiplicity graph, colored by one matching.
    Direct,
    /// Three paths `P_1, P_2, P_3` and a matching coloring.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartitePath {
    pub path: Transversal,
    pub mode: PathMode,
    pub notes: Vec<String>,
    pub attempts: usize,
}

/// Smallest fractions achieved by the three density conditions:
/// per color `e(A,B)/|A||B|`, and per vertex summed degree over `|other side|·|C|`.
pub fn density_conditions(f: &ColoredFamily, a_side: &[usize], b_side: &[usize], colors: &[usize]) -> (f64, f64) {
    let n = f.n();
    let aset = VertexSet::from_iter(n, a_side.iter().copied());
    let bset = VertexSet::from_iter(n, b_side.iter().copied());
    let denom = (a_side.len() * b_side.len()).max(1) as f64;
    let per_color = colors
        .iter()
        .map(|&c| f.color(c).edges_between(&aset, &bset) as f64 / denom)
        .fold(1.0, f64::min);
    let mut per_vertex: f64 = 1.0;
    for (side, other, size) in [(a_side, &bset, b_side.len()), (b_side, &aset, a_side.len())] {
        for &v in side {
            let s: usize = colors.iter().map(|&c| f.color(c).degree_into(v, other)).sum();
            per_vertex = per_vertex.min(s as f64 / (size * colors.len()).max(1) as f64);
        }
    }
    (per_color, per_vertex)
}

/// `a`–`b` Hamilton path of `g` through a sparsified random subgraph.
pub fn spread_ham_path(g: &Graph, a: usize, b: usize, seed: u64) -> Result<Vec<usize>> {
    spread_ham_path_with(g, a, b, 8, 20, seed)
}

pub fn spread_ham_path_with(g: &Graph, a: usize, b: usize, tries: usize, restarts: usize, seed: u64) -> Result<Vec<usize>> {
    let k = g.n();
    if a == b || a >= k || b >= k {
        return Err(Error::Precondition("endpoints must be distinct vertices".into()));
    }
    if let Some(v) = (0..k).find(|&v| g.degree(v) == 0) {
        return Err(Error::Precondition(format!("vertex {v} has no edges")));
    }
    if k == 2 {
        return Ok(vec![a, b]);
    }
    let t = (k / 2).max(1) as f64;
    let q = (100.0 / t).min(1.0);
    let mut last = String::new();
    for i in 0..tries.max(1) {
        let mut r = rng::rng(derive_seed(seed, "spread-ham", i as u64));
        let mut h = Graph::new(k);
        for v in 0..k {
            let nb: Vec<usize> = g.neighbors(v).collect();
            for w in rng::sample_k(&nb, 100, &mut r) {
                h.add_edge(v, w);
            }
        }
        if q < 1.0 {
            for (u, v) in g.edges() {
                if r.gen::<f64>() < q {
                    h.add_edge(u, v);
                }
            }
        }
        match robust_hamilton(&h, &[(a, b)], restarts, r.gen()) {
            Ok(cyc) => {
                let i = cyc.iter().position(|&x| x == a).expect("a on cycle");
                let path: Vec<usize> = if cyc[(i + 1) % k] == b {
                    (0..k).map(|j| cyc[(i + k - j) % k]).collect()
                } else {
                    (0..k).map(|j| cyc[(i + j) % k]).collect()
                };
                debug_assert_eq!(path[k - 1], b);
                return Ok(path);
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(retries("spread-ham-path", last))
}

/// Perfect matching of the bipartite graph `edges × colors` (`e ~ c` iff `e ∈ G_c`),
/// taken as alternate edges of a Hamilton path; falls back to augmenting paths.
fn color_by_matching(f: &ColoredFamily, edges: &[(usize, usize)], colors: &[usize], r: &mut Rng, notes: &mut Vec<String>) -> Result<Vec<usize>> {
    let s = edges.len();
    if s != colors.len() {
        return Err(Error::Inconsistent(format!("{s} edges but {} colors", colors.len())));
    }
    if s == 0 {
        return Ok(Vec::new());
    }
    let mut h = Graph::new(2 * s);
    for (i, &(u, v)) in edges.iter().enumerate() {
        for (j, &c) in colors.iter().enumerate() {
            if f.has(c, u, v) {
                h.add_edge(i, s + j);
            }
        }
    }
    let start = r.gen_range(0..s);
    let end = s + r.gen_range(0..s);
    if let Ok(p) = spread_ham_path_with(&h, start, end, 3, 10, r.gen()) {
        let mut out = vec![usize::MAX; s];
        for pair in p.chunks(2) {
            let (e, c) = if pair[0] < s { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
            out[e] = colors[c - s];
        }
        if out.iter().all(|&c| c != usize::MAX) {
            return Ok(out);
        }
    }
    let mut perm: Vec<usize> = (0..s).collect();
    perm.shuffle(r);
    let adj: Vec<Vec<usize>> = (0..s)
        .map(|i| {
            let (u, v) = edges[i];
            perm.iter().copied().filter(|&j| f.has(colors[j], u, v)).collect()
        })
        .collect();
    let mate = hopcroft_karp(&adj, s);
    if matching_size(&mate) != s {
        return Err(retries("path-coloring", "edge/color graph has no perfect matching"));
    }
    notes.push("coloring matching from augmenting paths".into());
    Ok(mate.iter().map(|m| colors[m.unwrap()]).collect())
}

fn multiplicity_graph(f: &ColoredFamily, aset: &VertexSet, bset: &VertexSet, colors: &[usize], thr: usize) -> Graph {
    let n = f.n();
    let mut g = Graph::new(n);
    let mut count = vec![0usize; n];
    for x in aset.iter() {
        count.iter_mut().for_each(|c| *c = 0);
        for &c in colors {
            let masked: Vec<u64> = f.color(c).row(x).iter().zip(bset.words()).map(|(p, q)| p & q).collect();
            for y in iter_bits(&masked) {
                count[y] += 1;
            }
        }
        for y in bset.iter() {
            if count[y] >= thr {
                g.add_edge(x, y);
            }
        }
    }
    g
}

fn local_path(g: &Graph, verts: &[usize], from: usize, to: usize, seed: u64, p: &BipartiteParams) -> Result<Vec<usize>> {
    let pos = |x: usize| verts.iter().position(|&v| v == x).expect("endpoint in vertex list");
    let h = g.induced(verts);
    let path = spread_ham_path_with(&h, pos(from), pos(to), p.ham_retries, p.posa_restarts, seed)?;
    Ok(path.into_iter().map(|i| verts[i]).collect())
}

fn exact_path(f: &ColoredFamily, verts: &[usize], aset: &VertexSet, colors: &[usize], a: usize, b: usize, budget: u64) -> Result<Transversal> {
    let k = verts.len();
    let gs: Vec<Graph> = colors
        .iter()
        .map(|&c| {
            let mut g = Graph::new(k);
            for i in 0..k {
                for j in i + 1..k {
                    let (u, v) = (verts[i], verts[j]);
                    if aset.contains(u) != aset.contains(v) && f.has(c, u, v) {
                        g.add_edge(i, j);
                    }
                }
            }
            g
        })
        .collect();
    let local = ColoredFamily::new(k, gs)?;
    let pos = |x: usize| verts.iter().position(|&v| v == x).unwrap();
    let res = find_transversal_path(&local, pos(a), pos(b), budget)?;
    match res.outcome {
        SearchOutcome::Found(t) => Ok(Transversal::path(
            t.vertices.iter().map(|&i| verts[i]).collect(),
            t.colors.iter().map(|&j| colors[j]).collect(),
        )),
        SearchOutcome::NoneExists => Err(Error::Obstruction("no rainbow a-b Hamilton path exists".into())),
        SearchOutcome::BudgetExhausted => Err(retries("bipartite-exact", "node budget exhausted")),
    }
}

/// Checks that `t` is an `a`–`b` path through exactly `verts`, rainbow in `colors`, crossing the bipartition.
pub fn check_bipartite_path(f: &ColoredFamily, t: &Transversal, aset: &VertexSet, verts: &[usize], colors: &[usize]) -> Result<()> {
    let mut vs = t.vertices.clone();
    vs.sort_unstable();
    let mut want = verts.to_vec();
    want.sort_unstable();
    if vs != want {
        return Err(Error::Inconsistent("path does not span the vertex set".into()));
    }
    let mut cs = t.colors.clone();
    cs.sort_unstable();
    let mut wc = colors.to_vec();
    wc.sort_unstable();
    if cs != wc {
        return Err(Error::Inconsistent("path colors are not the color set".into()));
    }
    for ((u, v), c) in t.edges().into_iter().zip(&t.colors) {
        if !f.has(*c, u, v) || aset.contains(u) == aset.contains(v) {
            return Err(Error::Inconsistent(format!("edge {u}-{v} of color {c} invalid")));
        }
    }
    Ok(())
}

/// Samples a rainbow Hamilton `a`–`b` path of the bipartite family on `A ∪ B`
/// using every color of `colors` (`|colors| = 2|A| - 1`).
#[allow(clippy::too_many_arguments)]
pub fn sample_bipartite_path(
    f: &ColoredFamily,
    a_side: &[usize],
    b_side: &[usize],
    colors: &[usize],
    a: usize,
    b: usize,
    p: &BipartiteParams,
    seed: u64,
) -> Result<BipartitePath> {
    let n = f.n();
    let t = a_side.len();
    let aset = VertexSet::from_iter(n, a_side.iter().copied());
    let bset = VertexSet::from_iter(n, b_side.iter().copied());
    if t == 0 || b_side.len() != t || aset.len() != t || bset.len() != t || a_side.iter().any(|&x| bset.contains(x)) {
        return Err(Error::Precondition("need disjoint sides of equal size".into()));
    }
    if !aset.contains(a) || !bset.contains(b) {
        return Err(Error::Precondition("a must lie in A and b in B".into()));
    }
    if colors.len() != 2 * t - 1 {
        return Err(Error::Precondition(format!("need 2t-1 = {} colors, got {}", 2 * t - 1, colors.len())));
    }
    let mut notes = Vec::new();
    let (pc, pv) = density_conditions(f, a_side, b_side, colors);
    if pc < 1.0 - p.eps || pv < 1.0 - p.eps {
        let msg = format!("density conditions hold only at {:.4} / {:.4}", pc, pv);
        if p.strict {
            return Err(Error::Precondition(msg));
        }
        notes.push(msg);
    }
    let verts: Vec<usize> = a_side.iter().chain(b_side).copied().collect();
    if t == 1 {
        let c = colors[0];
        if !f.has(c, a, b) {
            return Err(Error::Obstruction("the single edge is missing".into()));
        }
        return Ok(BipartitePath { path: Transversal::path(vec![a, b], vec![c]), mode: PathMode::Exact, notes, attempts: 1 });
    }
    if t <= p.exact_t {
        let path = exact_path(f, &verts, &aset, colors, a, b, p.exact_budget)?;
        return Ok(BipartitePath { path, mode: PathMode::Exact, notes, attempts: 1 });
    }
    let thr = ((p.g_frac * colors.len() as f64) - 1e-9).ceil() as usize;
    let g = multiplicity_graph(f, &aset, &bset, colors, thr);
    let mut last = String::new();
    for i in 0..p.retries.max(1) {
        let s = derive_seed(seed, "bipartite-path", i as u64);
        let mut local_notes = notes.clone();
        let res = if t < p.full_t {
            direct(f, &g, &verts, colors, a, b, p, s, &mut local_notes).map(|x| (x, PathMode::Direct))
        } else {
            full(f, &g, &aset, &bset, colors, a, b, p, s, &mut local_notes).map(|x| (x, PathMode::Full))
        };
        match res {
            Ok((path, mode)) => {
                check_bipartite_path(f, &path, &aset, &verts, colors)?;
                return Ok(BipartitePath { path, mode, notes: local_notes, attempts: i + 1 });
            }
            Err(e @ Error::Precondition(_)) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    Err(retries("bipartite-path", last))
}

#[allow(clippy::too_many_arguments)]
fn direct(f: &ColoredFamily, g: &Graph, verts: &[usize], colors: &[usize], a: usize, b: usize, p: &BipartiteParams, seed: u64, notes: &mut Vec<String>) -> Result<Transversal> {
    let mut r = rng::rng(seed);
    let path = local_path(g, verts, a, b, r.gen(), p)?;
    let edges: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).collect();
    let cols = color_by_matching(f, &edges, colors, &mut r, notes)?;
    Ok(Transversal::path(path, cols))
}

#[allow(clippy::too_many_arguments)]
fn full(
    f: &ColoredFamily,
    g: &Graph,
    aset: &VertexSet,
    bset: &VertexSet,
    colors: &[usize],
    a: usize,
    b: usize,
    p: &BipartiteParams,
    seed: u64,
    notes: &mut Vec<String>,
) -> Result<Transversal> {
    let n = f.n();
    let t = aset.len();
    let mut r = rng::rng(seed);
    let mut forest = Forest::new(n, f.m());
    let mut free = aset.clone();
    for v in bset.iter() {
        free.insert(v);
    }
    free.remove(a);
    free.remove(b);
    let other = |x: usize, free: &VertexSet| -> VertexSet {
        let side = if aset.contains(x) { bset } else { aset };
        let mut s = VertexSet::new(n);
        for y in side.iter().filter(|&y| free.contains(y)) {
            s.insert(y);
        }
        s
    };

    // P_1: random eligible edges of the multiplicity graph from a, avoiding b
    let len1 = (1.7 * t as f64).floor() as usize;
    let mut p1 = vec![a];
    while p1.len() < len1 {
        let cur = *p1.last().unwrap();
        let tgt = other(cur, &free);
        let (_, y) = random_eligible_in(g, &forest, Scope::From(cur, &tgt), &|_, _| true, &mut r)
            .ok_or_else(|| retries("bipartite-p1", "path got stuck"))?;
        forest.add(cur, y, None);
        free.remove(y);
        p1.push(y);
    }
    let e1: Vec<(usize, usize)> = p1.windows(2).map(|w| (w[0], w[1])).collect();

    // C_1: colors present on most of P_1, trimmed
    let k1 = ((1.95 * t as f64).round() as usize).min(colors.len());
    let need = 1.6 / 1.7 * e1.len() as f64;
    let mut cover: Vec<(usize, usize)> =
        colors.iter().map(|&c| (e1.iter().filter(|&&(u, v)| f.has(c, u, v)).count(), c)).collect();
    cover.shuffle(&mut r);
    let mut good: Vec<usize> = cover.iter().filter(|x| x.0 as f64 >= need).map(|x| x.1).collect();
    if good.len() >= k1 {
        good.truncate(k1);
    } else {
        notes.push(format!("only {} colors cover most of P_1; filled by coverage", good.len()));
        cover.sort_by(|x, y| y.0.cmp(&x.0));
        good = cover.iter().take(k1).map(|x| x.1).collect();
    }
    let mut c1 = good;
    let in_c1 = |c: usize, c1: &[usize]| c1.contains(&c);

    // P_2: rainbow through the colors outside C_1
    let v = *p1.last().unwrap();
    let vsize = free.len() + 2;
    let look = p.lookahead * vsize as f64;
    let tgt = other(v, &free);
    let mut c0_cands: Vec<usize> =
        c1.iter().copied().filter(|&c| f.color(c).degree_into(v, &tgt) as f64 >= look).collect();
    if c0_cands.is_empty() {
        c0_cands = c1.iter().copied().filter(|&c| f.color(c).degree_into(v, &tgt) > 0).collect();
    }
    let &c0 = c0_cands.choose(&mut r).ok_or_else(|| retries("bipartite-p2", "no starting color"))?;
    let mut rest: Vec<usize> = colors.iter().copied().filter(|&c| !in_c1(c, &c1)).collect();
    rest.shuffle(&mut r);
    let spare: Vec<usize> = rng::sample_k(&c1.iter().copied().filter(|&c| c != c0).collect::<Vec<_>>(), 2, &mut r);
    if spare.len() < 2 {
        return Err(retries("bipartite-p2", "C_1 too small"));
    }
    let mut seq = vec![c0];
    seq.extend(rest.iter().copied());
    let main = seq.len();
    seq.push(spare[0]);
    let mut lookahead_relaxed = false;
    let mut p2 = vec![v];
    let mut p2c = Vec::new();
    let mut step = |i: usize, p2: &mut Vec<usize>, p2c: &mut Vec<usize>, free: &mut VertexSet, forest: &mut Forest, r: &mut Rng| -> Result<()> {
        let cur = *p2.last().unwrap();
        let c = seq[i];
        let next = if i + 1 < seq.len() { seq[i + 1] } else { spare[1] };
        let tgt = other(cur, free);
        let gn = f.color(next);
        let free_now = free.clone();
        let ahead = |_: usize, y: usize| {
            let masked = gn.row(y).iter().zip(free_now.words()).map(|(p, q)| (p & q).count_ones() as usize).sum::<usize>();
            masked as f64 >= look
        };
        let mut e = random_eligible_in(f.color(c), forest, Scope::From(cur, &tgt), &ahead, r);
        if e.is_none() {
            lookahead_relaxed = true;
            e = random_eligible_in(f.color(c), forest, Scope::From(cur, &tgt), &|_, _| true, r);
        }
        let (_, y) = e.ok_or_else(|| retries("bipartite-p2", format!("no edge of color {c}")))?;
        forest.add(cur, y, Some(c));
        free.remove(y);
        p2.push(y);
        p2c.push(c);
        Ok(())
    };
    for i in 0..main {
        step(i, &mut p2, &mut p2c, &mut free, &mut forest, &mut r)?;
    }
    c1.retain(|&c| c != c0);
    if bset.contains(*p2.last().unwrap()) {
        step(main, &mut p2, &mut p2c, &mut free, &mut forest, &mut r)?;
        c1.retain(|&c| c != spare[0]);
    }
    if lookahead_relaxed {
        notes.push("lookahead relaxed on P_2".into());
    }
    let w = *p2.last().unwrap();

    // P_3: Hamilton w-b path on what is left
    let mut rest_v: Vec<usize> = free.iter().collect();
    rest_v.push(w);
    rest_v.push(b);
    let p3 = local_path(g, &rest_v, w, b, r.gen(), p)?;
    let mut edges = e1.clone();
    edges.extend(p3.windows(2).map(|x| (x[0], x[1])));
    let cols = color_by_matching(f, &edges, &c1, &mut r, notes)?;

    let mut vertices = p1.clone();
    vertices.extend_from_slice(&p2[1..]);
    vertices.extend_from_slice(&p3[1..]);
    let mut colors_out = cols[..e1.len()].to_vec();
    colors_out.extend(p2c);
    colors_out.extend_from_slice(&cols[e1.len()..]);
    Ok(Transversal::path(vertices, colors_out))
}
