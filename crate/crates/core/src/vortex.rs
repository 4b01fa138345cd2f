//! Vertex-color vortex and color absorber: sampling and verification.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{retries, Error, Result};
use crate::extremal::{is_family_extremal, is_family_extremal_auto, AnalysisOptions, Mode};
use crate::family::ColoredFamily;
use crate::graph::{Graph, VertexSet};
use crate::matching::{hopcroft_karp, matching_size};
use crate::rng::{self, derive_seed, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    /// Uniform partitions with the target sizes.
    Exact,
    /// Independent per-element assignment with the target probabilities.
    Independent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexParams {
    pub l: usize,
    pub beta: f64,
    pub delta: f64,
    pub eps: f64,
    /// Non-extremality required of the last level.
    pub alpha_prime: f64,
    /// Intermediate constant used by the sampled core `V'`.
    pub alpha_second: f64,
    /// Non-extremality demanded of the input family.
    pub alpha: f64,
    /// `|C_N|` target is `cn_scale · β^{N-1} n / δ`.
    pub cn_scale: f64,
    pub partition: PartitionMode,
    pub retries: usize,
    pub analysis: AnalysisOptions,
    /// Largest `C(|C_N|, |S|)` checked exhaustively.
    pub absorber_exhaustive_cap: u64,
    pub absorber_samples: usize,
    /// Minimum color multiplicity of the edges `e_r`; `None` means `min(2|C_N|², |C*|)`.
    pub edge_color_threshold: Option<usize>,
}

impl Default for VortexParams {
    fn default() -> Self {
        VortexParams::preset("desk").expect("built-in preset")
    }
}

impl VortexParams {
    pub const PRESETS: &'static [&'static str] = &["desk", "reference"];

    /// Named parameter sets. `desk` runs at a few hundred vertices; `reference`
    /// keeps `δ = 1/2` and the 1.5 color factor, which needs far larger `n`.
    pub fn preset(name: &str) -> Option<VortexParams> {
        let desk = VortexParams {
            l: 4,
            beta: 0.3,
            delta: 0.95,
            eps: 0.1,
            alpha_prime: 0.004,
            alpha_second: 0.005,
            alpha: 0.05,
            cn_scale: 1.0,
            partition: PartitionMode::Exact,
            retries: 30,
            analysis: AnalysisOptions { exact_cap: 16, restarts: 3, seed: 0 },
            absorber_exhaustive_cap: 1_000_000,
            absorber_samples: 2000,
            edge_color_threshold: None,
        };
        match name {
            "desk" => Some(desk),
            "reference" => Some(VortexParams { delta: 0.5, cn_scale: 1.5, ..desk }),
            _ => None,
        }
    }
}

/// Minimum `N ≥ 2` with `β^{N-1} n ∈ [L, 2L/β]`.
pub fn levels(n: usize, beta: f64, l: usize) -> Option<usize> {
    if !(beta > 0.0 && beta < 1.0) || l == 0 {
        return None;
    }
    let (lo, hi) = (l as f64, 2.0 * l as f64 / beta);
    let mut x = n as f64 * beta;
    let mut big_n = 2;
    while x >= lo * (1.0 - 1e-12) {
        if x <= hi * (1.0 + 1e-12) {
            return Some(big_n);
        }
        x *= beta;
        big_n += 1;
    }
    None
}

/// Target sizes and the resulting accounting for a given `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub n: usize,
    pub levels: usize,
    pub vertex_sizes: Vec<usize>,
    pub color_sizes: Vec<usize>,
    pub s_size: usize,
    pub r_size: usize,
    pub m_abs: usize,
    pub c_abs: usize,
    /// Forced-matching size entering each level `1..=N`.
    pub forced: Vec<i64>,
    pub issues: Vec<String>,
    pub feasible: bool,
}

pub fn feasibility(n: usize, p: &VortexParams) -> Result<Feasibility> {
    let big_n = levels(n, p.beta, p.l).ok_or_else(|| {
        Error::InfeasibleParams(format!("no N >= 2 with beta^(N-1) n in [L, 2L/beta] for n={n}, beta={}, L={}", p.beta, p.l))
    })?;
    let b3 = p.beta.powi(3);
    let mut v = vec![0usize; big_n];
    let mut c = vec![0usize; big_n];
    let last = p.beta.powi(big_n as i32 - 1) * n as f64;
    v[big_n - 1] = last.round() as usize;
    c[big_n - 1] = (p.cn_scale * last / p.delta - 1e-9).ceil() as usize;
    for i in 1..big_n - 1 {
        v[i] = (p.beta.powi(i as i32) * n as f64).round() as usize;
        c[i] = ((1.0 - b3) * v[i] as f64).round() as usize;
    }
    let mut issues = Vec::new();
    let vs: usize = v[1..].iter().sum();
    let cs: usize = c[1..].iter().sum();
    if vs >= n || cs >= n {
        issues.push("upper levels exhaust the ground set".into());
    }
    v[0] = n.saturating_sub(vs);
    c[0] = n.saturating_sub(cs);
    let vn = v[big_n - 1];
    let cn = c[big_n - 1];
    let s = ((1.0 - b3) * vn as f64 + 1e-9).floor() as usize;
    let r = cn.saturating_sub(s);
    let m_abs = 2 * r * s + r;
    let c_abs = 2 * r * s;
    if s == 0 || r == 0 {
        issues.push(format!("absorber split degenerate: |S|={s}, |R|={r}"));
    }
    if vn <= s {
        issues.push("no forced edge reaches the last level (|V_N| <= |S|)".into());
    }
    let core = (p.l.pow(4) as f64).min(n as f64);
    if (p.l.pow(4) as f64) > n as f64 {
        issues.push(format!("L^4 = {} exceeds n", p.l.pow(4)));
    }
    if (2 * m_abs + vn) as f64 > 0.9 * core {
        issues.push(format!("absorber needs {} core vertices, core has about {core}", 2 * m_abs + vn));
    }
    if (c_abs + cn) as f64 > 0.9 * core {
        issues.push(format!("absorber needs {} core colors, core has about {core}", c_abs + cn));
    }
    if v[0] < 2 * m_abs || c[0] < c_abs {
        issues.push("first level cannot hold the absorber".into());
    }
    let ratio = cn as f64 / vn.max(1) as f64;
    if ratio < 1.0 / p.delta - 1e-12 || ratio > 2.0 / p.delta + 1e-12 {
        issues.push(format!("|C_N|/|V_N| = {ratio:.3} outside [1/delta, 2/delta]"));
    }
    // forced[i] = |M_{i+1}|: paths leaving level i
    let mut forced = vec![m_abs as i64];
    let mut cur = m_abs as i64;
    for i in 0..big_n - 1 {
        let colors = c[i] as i64 - if i == 0 { c_abs as i64 } else { 0 };
        cur += colors - v[i] as i64;
        forced.push(cur);
        let lo = p.beta.powi(6) * v[i] as f64;
        let hi = 0.1 * v[i + 1] as f64;
        if cur < 1 || (cur as f64) < lo {
            issues.push(format!("level {}: color budget {cur} below max(1, beta^6|V_{}|)", i + 1, i + 1));
        } else if cur as f64 > hi + 1e-9 {
            issues.push(format!("level {}: color budget {cur} above 0.1|V_{}|", i + 1, i + 2));
        }
    }
    let feasible = issues.is_empty();
    Ok(Feasibility { n, levels: big_n, vertex_sizes: v, color_sizes: c, s_size: s, r_size: r, m_abs, c_abs, forced, issues, feasible })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    pub v_parts: Vec<Vec<usize>>,
    pub c_parts: Vec<Vec<usize>>,
    pub beta: f64,
    pub delta: f64,
    pub eps: f64,
    pub l: usize,
}

impl Vortex {
    pub fn levels(&self) -> usize {
        self.v_parts.len()
    }
}

/// One switching gadget: `e_r, e1` share `c1`, `e1, e2` share `c2`, `e2 ∈ G_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub r: usize,
    pub s: usize,
    pub e1: (usize, usize),
    pub e2: (usize, usize),
    pub c1: usize,
    pub c2: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    pub m_abs: Vec<(usize, usize)>,
    pub c_abs: Vec<usize>,
    pub r: Vec<usize>,
    pub s: Vec<usize>,
    /// `(r, e_r)`.
    pub e_r: Vec<(usize, (usize, usize))>,
    pub gadgets: Vec<Gadget>,
}

impl Absorber {
    /// Copy with one gadget edge removed from `M_abs`.
    pub fn without_edge(&self, e: (usize, usize)) -> Absorber {
        let mut a = self.clone();
        a.m_abs.retain(|&x| x != e && x != (e.1, e.0));
        a
    }

    pub fn gadget_edges(&self) -> Vec<(usize, usize)> {
        self.gadgets.iter().flat_map(|g| [g.e1, g.e2]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexSample {
    pub vortex: Vortex,
    pub absorber: Absorber,
    pub feasibility: Feasibility,
    pub attempts: usize,
    /// Which core selection rule produced `C*`.
    pub core_rule: String,
    /// True when the core non-extremality was decided heuristically.
    pub heuristic_core: bool,
    /// True when `e_r` needed the relaxed multiplicity `⌈|C*|/2⌉`.
    pub relaxed_edge_threshold: bool,
}

fn fail(stage: &str, msg: impl Into<String>) -> Error {
    retries(stage, msg)
}

struct Core {
    verts: Vec<usize>,
    colors: Vec<usize>,
    graphs: Vec<Graph>,
}

impl Core {
    fn new(f: &ColoredFamily, verts: Vec<usize>, colors: Vec<usize>) -> Core {
        let graphs = colors.iter().map(|&c| f.color(c).induced(&verts)).collect();
        Core { verts, colors, graphs }
    }

    fn family(&self, idx: &[usize]) -> ColoredFamily {
        let gs = idx.iter().map(|&i| self.graphs[i].clone()).collect();
        ColoredFamily::new(self.verts.len(), gs).expect("non-empty core family")
    }
}

/// Bitset adjacency on core color indices: `i ~ j` iff the graphs share `thr` edges.
fn overlap_graph(graphs: &[Graph], idx: &[usize], thr: f64) -> Vec<VertexSet> {
    let k = idx.len();
    let mut adj = vec![VertexSet::new(k); k];
    for a in 0..k {
        for b in a + 1..k {
            if graphs[idx[a]].common_edges(&graphs[idx[b]]) as f64 >= thr {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    adj
}

/// Property (P) over `idx`; on failure returns the violating pair.
fn property_p(adj: &[VertexSet], need: f64) -> std::result::Result<(), (usize, usize)> {
    let k = adj.len();
    for a in 0..k {
        for b in a..k {
            let common = crate::graph::and_count(adj[a].words(), adj[b].words());
            if (common as f64) < need {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

fn not_extremal(fam: &ColoredFamily, alpha: f64, opts: &AnalysisOptions) -> Result<(bool, bool)> {
    let rep = is_family_extremal_auto(fam, alpha, opts)?;
    Ok((!rep.is_extremal(), rep.method == Mode::Heuristic))
}

/// Selects `C*` by property (P) or the three-way case split.
fn choose_core_colors(core: &Core, p: &VortexParams) -> Result<(Vec<usize>, String, bool)> {
    let nv = core.verts.len() as f64;
    let a2 = p.alpha_second;
    let thr = 0.1 * a2 * nv * nv;
    let all: Vec<usize> = (0..core.colors.len()).collect();
    let adj = overlap_graph(&core.graphs, &all, thr);
    let (x, y) = match property_p(&adj, a2 * all.len() as f64) {
        Ok(()) => return Ok((all, "P".into(), false)),
        Err(pair) => pair,
    };
    let common: VertexSet = {
        let mut s = VertexSet::new(all.len());
        for c in 0..all.len() {
            if adj[x].contains(c) && adj[y].contains(c) {
                s.insert(c);
            }
        }
        s
    };
    let rest: Vec<usize> = all.iter().copied().filter(|&c| c != x && c != y && !common.contains(c)).collect();
    let mut a_set: Vec<usize> = rest.iter().copied().filter(|&c| !adj[x].contains(c)).collect();
    let mut b_set: Vec<usize> = rest.iter().copied().filter(|&c| !adj[y].contains(c)).collect();
    if a_set.len() < b_set.len() {
        std::mem::swap(&mut a_set, &mut b_set);
    }
    let pairwise = rest.iter().enumerate().all(|(i, &c1)| rest[i + 1..].iter().all(|&c2| adj[c1].contains(c2)));
    if pairwise && !rest.is_empty() {
        return Ok((rest, "case-1".into(), false));
    }
    if !a_set.is_empty() {
        let (ok, h) = not_extremal(&core.family(&a_set), a2, &p.analysis)?;
        if ok {
            return Ok((a_set, "case-2".into(), h));
        }
    }
    if b_set.len() as f64 >= a2 * all.len() as f64 && !b_set.is_empty() {
        let (ok, h) = not_extremal(&core.family(&b_set), a2, &p.analysis)?;
        if ok {
            return Ok((b_set, "case-3".into(), h));
        }
    }
    Err(fail("vortex-core", "no branch of the case split applies"))
}

fn pick_edge(g: &Graph, used: &[bool], r: &mut Rng) -> Option<(usize, usize)> {
    let edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|&(u, v)| !used[u] && !used[v]).collect();
    edges.choose(r).copied()
}

struct Built {
    v_n: Vec<usize>,
    c_n: Vec<usize>,
    absorber: Absorber,
    rule: String,
    heuristic: bool,
    relaxed: bool,
}

fn build_core_and_absorber(f: &ColoredFamily, p: &VortexParams, feas: &Feasibility, r: &mut Rng) -> Result<Built> {
    let n = f.n();
    let l4 = p.l.pow(4) as f64;
    let prob = (l4 / n as f64).min(1.0);
    let all: Vec<usize> = (0..n).collect();
    let v1 = rng::bernoulli_subset(&all, prob, r);
    let c1 = rng::bernoulli_subset(&all, prob, r);
    let (lo, hi) = (l4 / 2.0, 2.0 * l4);
    for (name, len) in [("V'", v1.len()), ("C'", c1.len())] {
        if (len as f64) < lo.min(n as f64 * 0.5) || len as f64 > hi {
            return Err(fail("vortex-core", format!("|{name}| = {len} outside [L^4/2, 2L^4]")));
        }
    }
    let core = Core::new(f, v1, c1);
    let nv = core.verts.len();
    let min_deg = (0.5 - p.eps / 2.0) * nv as f64;
    for (i, g) in core.graphs.iter().enumerate() {
        if (g.min_degree() as f64) < min_deg {
            return Err(fail("vortex-core", format!("color {} has induced minimum degree below (1/2-eps/2)|V'|", core.colors[i])));
        }
    }
    let all_idx: Vec<usize> = (0..core.colors.len()).collect();
    let (ok, mut heuristic) = not_extremal(&core.family(&all_idx), 10.0 * p.alpha_second, &p.analysis)?;
    if !ok {
        return Err(fail("vortex-core", "sampled core family is 10 alpha''-extremal"));
    }
    let (star, rule, h2) = choose_core_colors(&core, p)?;
    heuristic |= h2;
    if rule != "P" {
        let (ok, h3) = not_extremal(&core.family(&star), p.alpha_second, &p.analysis)?;
        heuristic |= h3;
        if !ok {
            return Err(fail("vortex-core", "selected core colors are alpha''-extremal"));
        }
    }

    // last level
    let (vn_size, cn_size) = (*feas.vertex_sizes.last().unwrap(), *feas.color_sizes.last().unwrap());
    let local_vn: Vec<usize> = match p.partition {
        PartitionMode::Exact => rng::sample_k(&(0..nv).collect::<Vec<_>>(), vn_size, r),
        PartitionMode::Independent => {
            let q = (vn_size as f64 / nv as f64).min(1.0);
            rng::bernoulli_subset(&(0..nv).collect::<Vec<_>>(), q, r)
        }
    };
    let local_cn: Vec<usize> = match p.partition {
        PartitionMode::Exact => rng::sample_k(&star, cn_size, r),
        PartitionMode::Independent => rng::bernoulli_subset(&star, (cn_size as f64 / star.len() as f64).min(1.0), r),
    };
    if local_vn.len() < 3 || local_cn.len() <= feas.s_size {
        return Err(fail("vortex-last", "last level too small"));
    }
    let mut v_n: Vec<usize> = local_vn.iter().map(|&i| core.verts[i]).collect();
    let mut c_n: Vec<usize> = local_cn.iter().map(|&i| core.colors[i]).collect();
    v_n.sort_unstable();
    c_n.sort_unstable();
    let last_fam = f.induced(&v_n, &c_n);
    let rep = is_family_extremal(&last_fam, p.alpha_prime, Mode::Exact, &AnalysisOptions { exact_cap: 32, ..p.analysis })
        .or_else(|_| is_family_extremal_auto(&last_fam, p.alpha_prime, &p.analysis))?;
    if rep.is_extremal() {
        return Err(fail("vortex-last", "last level family is alpha'-extremal"));
    }
    let vn_set = VertexSet::from_iter(n, v_n.iter().copied());
    for &j in &c_n {
        for &v in &v_n {
            if (f.color(j).degree_into(v, &vn_set) as f64) < (0.5 - p.eps) * v_n.len() as f64 {
                return Err(fail("vortex-last", format!("vertex {v} has low degree into V_N in color {j}")));
            }
        }
    }

    // absorber on V* = V' \ V_N
    let in_vn: Vec<bool> = (0..nv).map(|i| vn_set.contains(core.verts[i])).collect();
    let star_local: Vec<usize> = (0..nv).filter(|&i| !in_vn[i]).collect();
    let vstar: Vec<usize> = star_local.iter().map(|&i| core.verts[i]).collect();
    let ns = vstar.len();
    let star_colors: Vec<usize> = star.iter().map(|&i| core.colors[i]).collect();
    let gstar: std::collections::HashMap<usize, Graph> =
        star_colors.iter().map(|&c| (c, f.color(c).induced(&vstar))).collect();
    let mut mult = vec![0u32; ns * ns];
    for g in gstar.values() {
        for (u, v) in g.edges() {
            mult[u * ns + v] += 1;
        }
    }
    let thr = p.edge_color_threshold.unwrap_or_else(|| (2 * c_n.len() * c_n.len()).min(star_colors.len()));
    let mut perm = c_n.clone();
    perm.shuffle(r);
    let s_count = feas.s_size.min(perm.len());
    let mut s_set = perm[..s_count].to_vec();
    let mut r_set = perm[s_count..].to_vec();
    s_set.sort_unstable();
    r_set.sort_unstable();
    let mut used = vec![false; ns];
    let mut used_color: std::collections::HashSet<usize> = c_n.iter().copied().collect();
    let mut e_r = Vec::new();
    let mut relaxed = false;
    for &rc in &r_set {
        let g = &gstar[&rc];
        let pick_at = |t: usize| -> Vec<(usize, usize)> {
            g.edges().into_iter().filter(|&(u, v)| !used[u] && !used[v] && mult[u * ns + v] as usize >= t).collect()
        };
        let mut cand = pick_at(thr);
        if cand.is_empty() && p.edge_color_threshold.is_none() {
            cand = pick_at(star_colors.len().div_ceil(2));
            relaxed = true;
        }
        let &(u, v) = cand.choose(r).ok_or_else(|| fail("absorber", format!("no edge of color {rc} with {thr} colors")))?;
        used[u] = true;
        used[v] = true;
        e_r.push((rc, (u, v)));
    }
    let overlap = 0.05 * p.alpha_prime * (ns * ns) as f64;
    let mut pairs: Vec<(usize, usize)> = r_set.iter().flat_map(|&a| s_set.iter().map(move |&b| (a, b))).collect();
    pairs.shuffle(r);
    let mut gadgets = Vec::new();
    for (rc, sc) in pairs {
        let er = e_r.iter().find(|x| x.0 == rc).expect("edge per r").1;
        let c1s: Vec<usize> =
            star_colors.iter().copied().filter(|c| !used_color.contains(c) && gstar[c].has_edge(er.0, er.1)).collect();
        let &c1 = c1s.choose(r).ok_or_else(|| fail("absorber", "no free color on e_r"))?;
        let g1 = &gstar[&c1];
        let gs = &gstar[&sc];
        let c2s: Vec<usize> = star_colors
            .iter()
            .copied()
            .filter(|&c| {
                c != c1
                    && !used_color.contains(&c)
                    && gstar[&c].common_edges(g1) as f64 >= overlap
                    && gstar[&c].common_edges(gs) as f64 >= overlap
            })
            .collect();
        let &c2 = c2s.choose(r).ok_or_else(|| fail("absorber", "no linking color"))?;
        let mut h1 = g1.clone();
        h1.intersect_with(&gstar[&c2]);
        let e1 = pick_edge(&h1, &used, r).ok_or_else(|| fail("absorber", "no free edge for e1"))?;
        used[e1.0] = true;
        used[e1.1] = true;
        let mut h2 = gstar[&c2].clone();
        h2.intersect_with(gs);
        let e2 = pick_edge(&h2, &used, r).ok_or_else(|| fail("absorber", "no free edge for e2"))?;
        used[e2.0] = true;
        used[e2.1] = true;
        used_color.insert(c1);
        used_color.insert(c2);
        gadgets.push(Gadget { r: rc, s: sc, e1, e2, c1, c2 });
    }
    let map = |(u, v): (usize, usize)| {
        let (a, b) = (vstar[u], vstar[v]);
        (a.min(b), a.max(b))
    };
    let e_r: Vec<(usize, (usize, usize))> = e_r.into_iter().map(|(c, e)| (c, map(e))).collect();
    let gadgets: Vec<Gadget> =
        gadgets.into_iter().map(|g| Gadget { e1: map(g.e1), e2: map(g.e2), ..g }).collect();
    let mut m_abs: Vec<(usize, usize)> = e_r.iter().map(|x| x.1).collect();
    m_abs.extend(gadgets.iter().flat_map(|g| [g.e1, g.e2]));
    let mut c_abs: Vec<usize> = gadgets.iter().flat_map(|g| [g.c1, g.c2]).collect();
    c_abs.sort_unstable();
    let absorber = Absorber { m_abs, c_abs, r: r_set, s: s_set, e_r, gadgets };
    Ok(Built { v_n, c_n, absorber, rule, heuristic, relaxed })
}

fn distribute(items: Vec<usize>, sizes: &[usize], probs: &[f64], mode: PartitionMode, r: &mut Rng) -> Vec<Vec<usize>> {
    let k = sizes.len();
    let mut parts = vec![Vec::new(); k];
    match mode {
        PartitionMode::Exact => {
            let mut items = items;
            items.shuffle(r);
            let mut at = 0;
            for i in 1..k {
                let take = sizes[i].min(items.len() - at);
                parts[i] = items[at..at + take].to_vec();
                at += take;
            }
            parts[0] = items[at..].to_vec();
        }
        PartitionMode::Independent => {
            for v in items {
                let x: f64 = r.gen();
                let mut acc = 0.0;
                let mut slot = 0;
                for (i, &p) in probs.iter().enumerate().skip(1) {
                    acc += p;
                    if x < acc {
                        slot = i;
                        break;
                    }
                }
                parts[slot].push(v);
            }
        }
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    parts
}

fn attempt(f: &ColoredFamily, p: &VortexParams, feas: &Feasibility, seed: u64) -> Result<VortexSample> {
    let mut r = rng::rng(seed);
    let b = build_core_and_absorber(f, p, feas, &mut r)?;
    let n = f.n();
    let big_n = feas.levels;
    let mut taken = vec![false; n];
    for &v in &b.v_n {
        taken[v] = true;
    }
    for &(u, v) in &b.absorber.m_abs {
        taken[u] = true;
        taken[v] = true;
    }
    let mut ctaken = vec![false; f.m()];
    for &c in b.c_n.iter().chain(&b.absorber.c_abs) {
        ctaken[c] = true;
    }
    let free_v: Vec<usize> = (0..n).filter(|&v| !taken[v]).collect();
    let free_c: Vec<usize> = (0..f.m()).filter(|&c| !ctaken[c]).collect();
    let sizes_v = &feas.vertex_sizes[..big_n - 1];
    let sizes_c = &feas.color_sizes[..big_n - 1];
    let mut pv = vec![0.0; big_n - 1];
    let mut pc = vec![0.0; big_n - 1];
    for i in 1..big_n - 1 {
        pv[i] = p.beta.powi(i as i32);
        pc[i] = (1.0 - p.beta.powi(3)) * pv[i];
    }
    let mut v_parts = distribute(free_v, sizes_v, &pv, p.partition, &mut r);
    let mut c_parts = distribute(free_c, sizes_c, &pc, p.partition, &mut r);
    v_parts[0].extend(b.absorber.m_abs.iter().flat_map(|&(u, v)| [u, v]));
    v_parts[0].sort_unstable();
    c_parts[0].extend(b.absorber.c_abs.iter().copied());
    c_parts[0].sort_unstable();
    v_parts.push(b.v_n.clone());
    c_parts.push(b.c_n.clone());
    let vortex = Vortex { v_parts, c_parts, beta: p.beta, delta: p.delta, eps: p.eps, l: p.l };
    let vr = verify_vortex(&vortex, f);
    if !vr.ok {
        return Err(fail("vortex-verify", vr.violations.join("; ")));
    }
    let mode = absorber_mode(&b.absorber, b.c_n.len(), p);
    let ar = verify_absorber(&b.absorber, f, &b.c_n, &b.v_n, mode, seed);
    if !ar.ok {
        return Err(fail("absorber-verify", format!("{} of {} subsets fail", ar.failures.len(), ar.tested)));
    }
    Ok(VortexSample {
        vortex,
        absorber: b.absorber,
        feasibility: feas.clone(),
        attempts: 1,
        core_rule: b.rule,
        heuristic_core: b.heuristic,
        relaxed_edge_threshold: b.relaxed,
    })
}

/// Exhaustive when `C(|C_N|, |S|)` is within the cap, sampled otherwise.
pub fn absorber_mode(a: &Absorber, cn: usize, p: &VortexParams) -> AbsorberMode {
    if binomial(cn as u64, a.s.len() as u64) <= p.absorber_exhaustive_cap {
        AbsorberMode::Exhaustive
    } else {
        AbsorberMode::Sampled(p.absorber_samples)
    }
}

/// Samples `(𝒱, 𝒞, M_abs, C_abs)` with whole-construction retries.
pub fn sample_vortex_absorber(f: &ColoredFamily, p: &VortexParams, seed: u64) -> Result<VortexSample> {
    let n = f.n();
    if f.m() != n {
        return Err(Error::Precondition(format!("vortex needs as many colors as vertices (m={}, n={n})", f.m())));
    }
    let feas = feasibility(n, p)?;
    if !feas.feasible {
        return Err(Error::InfeasibleParams(feas.issues.join("; ")));
    }
    let rep = is_family_extremal_auto(f, p.alpha, &p.analysis)?;
    if rep.is_extremal() {
        return Err(Error::Precondition(format!("family is {}-extremal", p.alpha)));
    }
    let mut last = None;
    for a in 0..p.retries.max(1) {
        match attempt(f, p, &feas, derive_seed(seed, "vortex", a as u64)) {
            Ok(mut s) => {
                s.attempts = a + 1;
                return Ok(s);
            }
            Err(e @ Error::RetriesExhausted { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    let reason = match last {
        Some(Error::RetriesExhausted { stage, reason }) => format!("last failure in {stage}: {reason}"),
        _ => "no attempt made".into(),
    };
    Err(retries("vortex-absorber", reason))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    let tol = 1e-9 * target.abs().max(1.0);
    x >= target * (1.0 - rel) - tol && x <= target * (1.0 + rel) + tol
}

/// Conditions (i)–(iv) of the vortex definition plus partition sanity.
pub fn verify_vortex(v: &Vortex, f: &ColoredFamily) -> VortexReport {
    let mut out = Vec::new();
    let n = f.n();
    let big_n = v.v_parts.len();
    if big_n < 2 || v.c_parts.len() != big_n {
        out.push(format!("need N >= 2 levels with matching color levels (got {big_n} and {})", v.c_parts.len()));
        return VortexReport { ok: false, violations: out };
    }
    for (name, parts, total) in [("vertex", &v.v_parts, n), ("color", &v.c_parts, f.m())] {
        let mut seen = vec![false; total];
        for p in parts.iter() {
            for &x in p {
                if x >= total || seen[x] {
                    out.push(format!("{name} {x} repeated or out of range"));
                } else {
                    seen[x] = true;
                }
            }
        }
        if seen.iter().any(|s| !s) {
            out.push(format!("{name} parts do not cover the ground set"));
        }
    }
    let (beta, nf) = (v.beta, n as f64);
    for i in 1..big_n {
        let target = beta.powi(i as i32) * nf;
        if !within(v.v_parts[i].len() as f64, target, beta / 10.0) {
            out.push(format!("(i) level {}: |V| = {} not within (1±β/10)·{target:.3}", i + 1, v.v_parts[i].len()));
        }
    }
    for i in 1..big_n - 1 {
        let target = (1.0 - beta.powi(3)) * v.v_parts[i].len() as f64;
        if !within(v.c_parts[i].len() as f64, target, beta.powi(4)) {
            out.push(format!("(ii) level {}: |C| = {} not within (1±β⁴)·{target:.3}", i + 1, v.c_parts[i].len()));
        }
    }
    let ratio = v.c_parts[big_n - 1].len() as f64 / v.v_parts[big_n - 1].len().max(1) as f64;
    if ratio < 1.0 / v.delta - 1e-12 || ratio > 2.0 / v.delta + 1e-12 {
        out.push(format!("(iii) level {big_n}: |C_N|/|V_N| = {ratio:.4} outside [1/δ, 2/δ]"));
    }
    let sets: Vec<VertexSet> = v.v_parts.iter().map(|p| VertexSet::from_iter(n, p.iter().copied())).collect();
    for i in 0..big_n - 1 {
        for l in [i, i + 1] {
            let need = (0.5 - v.eps) * v.v_parts[l].len() as f64;
            for &j in v.c_parts[i].iter().chain(&v.c_parts[i + 1]) {
                let g = f.color(j);
                for &u in v.v_parts[i].iter().chain(&v.v_parts[i + 1]) {
                    if (g.degree_into(u, &sets[l]) as f64) < need - 1e-9 {
                        out.push(format!("(iv) vertex {u}, color {j}: degree into level {} below (1/2-ε)|V|", l + 1));
                    }
                }
            }
        }
    }
    out.truncate(64);
    VortexReport { ok: out.is_empty(), violations: out }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsorberMode {
    Exhaustive,
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorberReport {
    pub mode: AbsorberMode,
    pub tested: usize,
    /// Failing subsets `A` (at most 32 kept).
    pub failures: Vec<Vec<usize>>,
    pub failed: usize,
    /// Gadgets that cannot be colored by both `{r,c1,c2}` and `{s,c1,c2}`.
    pub broken_gadgets: Vec<usize>,
    pub ok: bool,
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn has_bijection(a: &Absorber, f: &ColoredFamily, colors: &[usize]) -> bool {
    if colors.len() != a.m_abs.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = a
        .m_abs
        .iter()
        .map(|&(u, v)| (0..colors.len()).filter(|&j| f.has(colors[j], u, v)).collect())
        .collect();
    matching_size(&hopcroft_karp(&adj, colors.len())) == colors.len()
}

/// For every tested `A ⊂ C_N` with `|A| = |S|`, decides whether `M_abs`
/// can be colored bijectively by `C_abs ∪ (C_N \ A)`.
pub fn verify_absorber(a: &Absorber, f: &ColoredFamily, c_n: &[usize], v_n: &[usize], mode: AbsorberMode, seed: u64) -> AbsorberReport {
    let _ = v_n;
    let k = a.s.len();
    let mut failures = Vec::new();
    let mut failed = 0;
    let mut tested = 0;
    let mut check = |sub: &[usize]| {
        tested += 1;
        let mut colors = a.c_abs.clone();
        colors.extend(c_n.iter().copied().filter(|c| !sub.contains(c)));
        if !has_bijection(a, f, &colors) {
            failed += 1;
            if failures.len() < 32 {
                failures.push(sub.to_vec());
            }
        }
    };
    match mode {
        AbsorberMode::Exhaustive => {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let sub: Vec<usize> = idx.iter().map(|&i| c_n[i]).collect();
                check(&sub);
                let mut i = k;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if idx[i] < c_n.len() - k + i {
                        idx[i] += 1;
                        for j in i + 1..k {
                            idx[j] = idx[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        AbsorberMode::Sampled(trials) => {
            let mut r = rng::rng(derive_seed(seed, "absorber-check", 0));
            for _ in 0..trials {
                let mut sub = rng::sample_k(c_n, k, &mut r);
                sub.sort_unstable();
                check(&sub);
            }
        }
    }
    let broken_gadgets: Vec<usize> = a
        .gadgets
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            let er = a.e_r.iter().find(|x| x.0 == g.r).map(|x| x.1);
            let Some(er) = er else { return true };
            let edges = [er, g.e1, g.e2];
            let ok_with = |top: usize| {
                let cols = [top, g.c1, g.c2];
                let adj: Vec<Vec<usize>> =
                    edges.iter().map(|&(u, v)| (0..3).filter(|&j| f.has(cols[j], u, v)).collect()).collect();
                matching_size(&hopcroft_karp(&adj, 3)) == 3
            };
            !(ok_with(g.r) && ok_with(g.s))
        })
        .map(|(i, _)| i)
        .collect();
    let ok = failed == 0 && broken_gadgets.is_empty();
    AbsorberReport { mode, tested, failures, failed, broken_gadgets, ok }
}
