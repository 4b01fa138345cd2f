//! Cover-down: rainbow path covers of a level `U` with ends in the next level `V`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{retries, Error, Result};
use crate::family::ColoredFamily;
use crate::graph::VertexSet;
use crate::rainbow::{RainbowParams, RainbowSampler};
use crate::rng::{self, derive_seed, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverParams {
    pub beta: f64,
    pub gamma: f64,
    pub eps: f64,
    /// Enforce the size, degree and color-balance preconditions.
    pub strict: bool,
    /// Check `|V| = (1±β)β|U|` (off for the first level of a vortex).
    pub check_ratio: bool,
    pub rainbow_eps: f64,
    pub retries: usize,
    /// Draws per consecutive-part matching; the largest is kept.
    pub matching_draws: usize,
}

impl Default for CoverParams {
    fn default() -> Self {
        CoverParams {
            beta: 0.3,
            gamma: 0.25,
            eps: 0.1,
            strict: true,
            check_ratio: true,
            rainbow_eps: 0.1,
            retries: 30,
            matching_draws: 6,
        }
    }
}

/// A path; `colors[i]` colors `vertices[i]—vertices[i+1]`, `None` for forced edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPath {
    pub vertices: Vec<usize>,
    pub colors: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverStats {
    pub parts: usize,
    pub part_size: usize,
    /// True when the last two parts were also joined by a matching.
    pub joined_last: bool,
    /// Paths inside `U` before the ends were matched into `V`.
    pub inner_paths: usize,
    /// `(achieved, largest possible)` per consecutive-part matching.
    pub matchings: Vec<(usize, usize)>,
    /// Whether every matching reached `(1 - 20γ/k)` of its side.
    pub large_matchings: bool,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCover {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub m: Vec<(usize, usize)>,
    pub colors: Vec<usize>,
    pub paths: Vec<CoverPath>,
    pub stats: CoverStats,
}

fn check_preconditions(
    f: &ColoredFamily,
    u: &[usize],
    v: &[usize],
    m: &[(usize, usize)],
    colors: &[usize],
    p: &CoverParams,
) -> Result<i64> {
    let n = f.n();
    let pre = |s: String| Err(Error::Precondition(s));
    if u.is_empty() {
        return pre("U is empty".into());
    }
    let us = VertexSet::from_iter(n, u.iter().copied());
    let vs = VertexSet::from_iter(n, v.iter().copied());
    if us.len() != u.len() || vs.len() != v.len() || u.iter().any(|&x| vs.contains(x)) {
        return pre("U and V must be disjoint vertex sets".into());
    }
    let mut seen = vec![false; n];
    for &(a, b) in m {
        if a == b || !us.contains(a) || !us.contains(b) {
            return pre(format!("M edge ({a},{b}) is not inside U"));
        }
        if seen[a] || seen[b] {
            return pre("M is not a matching".into());
        }
        seen[a] = true;
        seen[b] = true;
    }
    let mut cs = colors.to_vec();
    cs.sort_unstable();
    cs.dedup();
    if cs.len() != colors.len() || colors.iter().any(|&c| c >= f.m()) {
        return pre("colors must be distinct and in range".into());
    }
    let budget = colors.len() as i64 + m.len() as i64 - u.len() as i64;
    if budget < 1 {
        return pre(format!("color balance |C|+|M|-|U| = {budget} is below 1"));
    }
    if 2 * budget as usize > v.len() {
        return pre(format!("V has {} vertices, fewer than twice the balance {budget}", v.len()));
    }
    if p.strict {
        let (nu, nv) = (u.len() as f64, v.len() as f64);
        if p.check_ratio && ((nv - p.beta * nu).abs() > p.beta * p.beta * nu + 1e-9) {
            return pre(format!("|V| = {} is not (1±β)β|U| = {:.1}", v.len(), p.beta * nu));
        }
        if m.len() as f64 > p.gamma * nu + 1e-9 {
            return pre(format!("|M| = {} exceeds γ|U|", m.len()));
        }
        let b = budget as f64;
        if b < p.beta.powi(6) * nu - 1e-9 {
            return pre(format!("color balance {budget} below β⁶|U|"));
        }
        if b > 0.1 * nv + 1e-9 {
            return pre(format!("color balance {budget} above 0.1|V|"));
        }
        for &c in colors {
            let g = f.color(c);
            for &x in u.iter().chain(v) {
                for (w, size) in [(&us, nu), (&vs, nv)] {
                    if (g.degree_into(x, w) as f64) < (0.5 - p.eps) * size - 1e-9 {
                        return pre(format!("color {c}: vertex {x} fails the degree condition"));
                    }
                }
            }
        }
    }
    Ok(budget)
}

/// Samples a `(U, V, M)` path cover using every color of `colors` once.
pub fn cover_down(
    f: &ColoredFamily,
    u: &[usize],
    v: &[usize],
    m: &[(usize, usize)],
    colors: &[usize],
    p: &CoverParams,
    seed: u64,
) -> Result<PathCover> {
    let budget = check_preconditions(f, u, v, m, colors, p)? as usize;
    let mut last = String::new();
    for a in 0..p.retries.max(1) {
        let mut r = rng::rng(derive_seed(seed, "cover-down", a as u64));
        match attempt(f, u, v, m, colors, p, budget, &mut r) {
            Ok(mut pc) => {
                pc.stats.attempts = a + 1;
                return Ok(pc);
            }
            Err(Error::RetriesExhausted { reason, .. }) => last = reason,
            Err(e) => return Err(e),
        }
    }
    Err(retries("cover-down", last))
}

/// Sequential parts of size `s`; an `M`-partner always lands in the next part.
fn partition(u: &[usize], partner: &[usize], s: usize, r: &mut Rng) -> Vec<Vec<usize>> {
    let n = partner.len();
    let order = rng::shuffled(u, r);
    let mut placed = vec![false; n];
    let mut unplaced = u.len();
    let mut pending: Vec<usize> = Vec::new();
    let mut parts = Vec::new();
    let mut at = 0;
    loop {
        let mut part = std::mem::take(&mut pending);
        if part.len() + unplaced <= s {
            part.extend(order.iter().copied().filter(|&x| !placed[x]));
            if !part.is_empty() {
                parts.push(part);
            }
            break;
        }
        while part.len() < s && unplaced > 0 {
            while placed[order[at]] {
                at += 1;
            }
            let x = order[at];
            placed[x] = true;
            unplaced -= 1;
            part.push(x);
            let y = partner[x];
            if y != usize::MAX && !placed[y] {
                placed[y] = true;
                unplaced -= 1;
                pending.push(y);
            }
        }
        parts.push(part);
        if unplaced == 0 && pending.is_empty() {
            break;
        }
    }
    parts
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    f: &ColoredFamily,
    u: &[usize],
    v: &[usize],
    m: &[(usize, usize)],
    colors: &[usize],
    p: &CoverParams,
    budget: usize,
    r: &mut Rng,
) -> Result<PathCover> {
    let n = f.n();
    let mut partner = vec![usize::MAX; n];
    for &(a, b) in m {
        partner[a] = b;
        partner[b] = a;
    }
    let s = (budget / 2).max(1);
    let parts = partition(u, &partner, s, r);
    let k = parts.len();
    let mut part_of = vec![usize::MAX; n];
    for (i, part) in parts.iter().enumerate() {
        for &x in part {
            part_of[x] = i;
        }
    }
    // links: fwd[x] = (y, color) with y one part later (or the same part)
    let mut fwd: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    let mut has_bwd = vec![false; n];
    let mut no_fwd = vec![false; n];
    let mut no_bwd = vec![false; n];
    for &(a, b) in m {
        let (x, y) = if part_of[a] <= part_of[b] { (a, b) } else { (b, a) };
        fwd[x] = Some((y, None));
        has_bwd[y] = true;
        no_fwd[x] = true;
        no_bwd[y] = true;
        if part_of[x] == part_of[y] {
            no_bwd[x] = true;
            no_fwd[y] = true;
        }
    }
    let mut pairs: Vec<usize> = (0..k.saturating_sub(2)).collect();
    let joined_last = k >= 2 && parts[0].len() + parts[k - 1].len() > budget;
    if joined_last {
        pairs.push(k - 2);
    }
    let mut used = vec![false; f.m()];
    let mut matchings = Vec::new();
    let rp = RainbowParams { eps: p.rainbow_eps, strict: false, retries: 1, record: false };
    for &i in &pairs {
        let left: Vec<usize> = parts[i].iter().copied().filter(|&x| !no_fwd[x]).collect();
        let right: Vec<usize> = parts[i + 1].iter().copied().filter(|&x| !no_bwd[x]).collect();
        let cap = left.len().min(right.len());
        if cap == 0 {
            matchings.push((0, 0));
            continue;
        }
        let pool: Vec<usize> = colors.iter().copied().filter(|&c| !used[c]).collect();
        let sampler = RainbowSampler::new(f, &left, &right, &pool, rp)?;
        let mut best: Option<Vec<(usize, usize, usize)>> = None;
        for d in 0..p.matching_draws.max(1) {
            let got = sampler.sample_once(derive_seed(r.gen(), "cover-matching", d as u64)).edges;
            if best.as_ref().is_none_or(|b| got.len() > b.len()) {
                best = Some(got);
            }
            if best.as_ref().unwrap().len() == cap {
                break;
            }
        }
        let best = best.unwrap_or_default();
        matchings.push((best.len(), cap));
        for (a, b, c) in best {
            fwd[a] = Some((b, Some(c)));
            has_bwd[b] = true;
            used[c] = true;
        }
    }
    let kf = k.max(1) as f64;
    let large_matchings = pairs
        .iter()
        .zip(&matchings)
        .all(|(&i, &(got, _))| got as f64 >= (1.0 - 20.0 * p.gamma / kf) * parts[i].len() as f64 - 1e-9);

    let mut inner: Vec<CoverPath> = Vec::new();
    for part in &parts {
        for &x in part {
            if has_bwd[x] {
                continue;
            }
            let mut path = CoverPath { vertices: vec![x], colors: Vec::new() };
            let mut cur = x;
            while let Some((y, c)) = fwd[cur] {
                path.vertices.push(y);
                path.colors.push(c);
                cur = y;
            }
            inner.push(path);
        }
    }
    if inner.len() > budget {
        return Err(retries("cover-down", format!("{} paths inside U exceed the color balance {budget}", inner.len())));
    }

    let inner_paths = inner.len();
    // match every end into V with a fresh color, length-0 paths twice
    let mut ends: Vec<(usize, bool)> = (0..inner.len()).flat_map(|i| [(i, true), (i, false)]).collect();
    ends.shuffle(r);
    let vset = VertexSet::from_iter(n, v.iter().copied());
    let mut v_used = vec![false; n];
    let mut ext: Vec<[Option<(usize, usize)>; 2]> = vec![[None, None]; inner.len()];
    for (i, front) in ends {
        let x = if front { inner[i].vertices[0] } else { *inner[i].vertices.last().unwrap() };
        let mut pool: Vec<usize> = colors.iter().copied().filter(|&c| !used[c]).collect();
        pool.shuffle(r);
        let mut done = false;
        for c in pool {
            let g = f.color(c);
            let nb: Vec<usize> = g.neighbors(x).filter(|&w| vset.contains(w) && !v_used[w]).collect();
            if let Some(&w) = nb.choose(r) {
                v_used[w] = true;
                used[c] = true;
                ext[i][usize::from(!front)] = Some((w, c));
                done = true;
                break;
            }
        }
        if !done {
            return Err(retries("cover-down", format!("end {x} has no free neighbor in V in any unused color")));
        }
    }
    let mut paths: Vec<CoverPath> = inner
        .into_iter()
        .zip(ext)
        .map(|(pth, [a, b])| {
            let (wa, ca) = a.expect("front matched");
            let (wb, cb) = b.expect("back matched");
            let mut vertices = vec![wa];
            vertices.extend(pth.vertices);
            vertices.push(wb);
            let mut cols = vec![Some(ca)];
            cols.extend(pth.colors);
            cols.push(Some(cb));
            CoverPath { vertices, colors: cols }
        })
        .collect();

    // greedy matching on V with the remaining colors
    let mut rest: Vec<usize> = colors.iter().copied().filter(|&c| !used[c]).collect();
    rest.shuffle(r);
    for c in rest {
        let g = f.color(c);
        let free: Vec<usize> = v.iter().copied().filter(|&w| !v_used[w]).collect();
        let mut eligible = Vec::new();
        for (i, &a) in free.iter().enumerate() {
            for &b in &free[i + 1..] {
                if g.has_edge(a, b) {
                    eligible.push((a, b));
                }
            }
        }
        let &(a, b) = eligible.choose(r).ok_or_else(|| retries("cover-down", format!("no free edge of color {c} inside V")))?;
        v_used[a] = true;
        v_used[b] = true;
        paths.push(CoverPath { vertices: vec![a, b], colors: vec![Some(c)] });
    }
    debug_assert_eq!(paths.len(), budget);
    Ok(PathCover {
        u: u.to_vec(),
        v: v.to_vec(),
        m: m.to_vec(),
        colors: colors.to_vec(),
        paths,
        stats: CoverStats {
            parts: k,
            part_size: s,
            joined_last,
            inner_paths,
            matchings,
            large_matchings,
            attempts: 0,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Checks disjointness, end/interior placement, coverage of `U` and `M`,
/// rainbowness, color membership and the path-count identity.
pub fn validate_path_cover(pc: &PathCover, f: &ColoredFamily) -> CoverReport {
    let n = f.n();
    let mut out: Vec<String> = Vec::new();
    let mut push = |s: String| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    let us = VertexSet::from_iter(n, pc.u.iter().copied().filter(|&x| x < n));
    let vs = VertexSet::from_iter(n, pc.v.iter().copied().filter(|&x| x < n));
    let pool: std::collections::HashSet<usize> = pc.colors.iter().copied().collect();
    let mforced: std::collections::HashSet<(usize, usize)> = pc.m.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut seen = vec![false; n];
    let mut used_colors = std::collections::HashSet::new();
    let mut uncolored = std::collections::HashSet::new();
    for (pi, path) in pc.paths.iter().enumerate() {
        let vx = &path.vertices;
        if vx.len() < 2 || path.colors.len() + 1 != vx.len() {
            push(format!("path {pi} is malformed"));
            continue;
        }
        for (j, &x) in vx.iter().enumerate() {
            if x >= n {
                push(format!("vertex {x} out of range"));
                continue;
            }
            if seen[x] {
                push("paths are not disjoint".into());
            }
            seen[x] = true;
            let end = j == 0 || j + 1 == vx.len();
            if end && !vs.contains(x) {
                push("endpoint outside V".into());
            }
            if !end && !us.contains(x) {
                push("interior outside U".into());
            }
        }
        for (j, c) in path.colors.iter().enumerate() {
            let (a, b) = (vx[j], vx[j + 1]);
            let e = (a.min(b), a.max(b));
            match *c {
                None => {
                    if !mforced.contains(&e) {
                        push("uncolored edge not in M".into());
                    }
                    uncolored.insert(e);
                }
                Some(c) => {
                    if mforced.contains(&e) {
                        push("M edge carries a color".into());
                    }
                    if !pool.contains(&c) {
                        push(format!("color {c} outside C"));
                    } else if a < n && b < n && !f.has(c, a, b) {
                        push(format!("edge ({a},{b}) is not in color {c}"));
                    }
                    if !used_colors.insert(c) {
                        push("colored edges are not rainbow".into());
                    }
                }
            }
        }
    }
    if pc.u.iter().any(|&x| x >= n || !seen[x]) {
        push("U not covered".into());
    }
    if mforced.iter().any(|e| !uncolored.contains(e)) {
        push("M edge not covered".into());
    }
    let expect = pc.colors.len() as i64 + pc.m.len() as i64 - pc.u.len() as i64;
    if pc.paths.len() as i64 != expect {
        push(format!("{} paths, expected |C|+|M|-|U| = {expect}", pc.paths.len()));
    }
    if used_colors.len() != pool.len() {
        push(format!("{} of {} colors used", used_colors.len(), pool.len()));
    }
    CoverReport { ok: out.is_empty(), violations: out }
}
