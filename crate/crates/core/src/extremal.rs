//! Half-set analysis: extremality, r(G), exceptional families, expansion and
//! the property-preservation experiment.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::ColoredFamily;
use crate::graph::{Graph, VertexSet};
use crate::rng::{self, derive_seed};
use crate::stats::{wilson95, Interval};

pub const DEFAULT_EXACT_CAP: usize = 24;
pub const DEFAULT_TAU: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub exact_cap: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { exact_cap: DEFAULT_EXACT_CAP, restarts: 50, seed: 0 }
    }
}

/// A half-set `a`, an optional odd color set `c`, and the value they achieve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSetCertificate {
    pub a: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<usize>>,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Extremal,
    NonExtremal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub alpha: f64,
    pub verdict: Verdict,
    pub certificate: Option<HalfSetCertificate>,
    pub method: Mode,
    /// False for heuristic non-extremal verdicts.
    pub certified: bool,
}

impl ExtremalityReport {
    pub fn is_extremal(&self) -> bool {
        self.verdict == Verdict::Extremal
    }
}

pub fn is_half_set(n: usize, k: usize) -> bool {
    2 * k + 1 >= n && 2 * k <= n + 1
}

fn half_sizes(n: usize) -> Vec<usize> {
    (0..=n).filter(|&k| is_half_set(n, k)).collect()
}

/// Per-color counts `(e(A), e(Ā), e(A,Ā))`.
pub fn split_counts(g: &Graph, a: &VertexSet) -> (u64, u64, u64) {
    let b = a.complement();
    let ea = g.edges_within(a) as u64;
    let eb = g.edges_within(&b) as u64;
    (ea, eb, g.edge_count() as u64 - ea - eb)
}

/// `Σ_i min{e_i(A), e_i(A,Ā)}`.
pub fn extremal_value(f: &ColoredFamily, a: &[usize]) -> u64 {
    let set = VertexSet::from_iter(f.n(), a.iter().copied());
    f.colors()
        .iter()
        .map(|g| {
            let (ea, _, x) = split_counts(g, &set);
            ea.min(x)
        })
        .sum()
}

/// `e_C(G, A)`.
pub fn r_value(f: &ColoredFamily, a: &[usize], c: &[usize]) -> u64 {
    let set = VertexSet::from_iter(f.n(), a.iter().copied());
    let mut in_c = vec![false; f.m()];
    for &i in c {
        in_c[i] = true;
    }
    f.colors()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let (ea, eb, x) = split_counts(g, &set);
            if in_c[i] {
                ea + eb
            } else {
                x
            }
        })
        .sum()
}

/// Optimal odd color set for fixed per-color `(inside, crossing)` costs.
pub fn greedy_odd_c(costs: &[(u64, u64)]) -> (Vec<usize>, u64) {
    let mut c: Vec<usize> = Vec::new();
    let mut value = 0;
    for (i, &(inside, cross)) in costs.iter().enumerate() {
        if inside < cross {
            c.push(i);
            value += inside;
        } else {
            value += cross;
        }
    }
    if c.len() % 2 == 0 {
        let (flip, gap) = costs
            .iter()
            .enumerate()
            .map(|(i, &(inside, cross))| (i, inside.abs_diff(cross)))
            .min_by_key(|&(i, gap)| (gap, i))
            .expect("at least one color");
        value += gap;
        match c.binary_search(&flip) {
            Ok(pos) => {
                c.remove(pos);
            }
            Err(pos) => c.insert(pos, flip),
        }
    }
    (c, value)
}

/// Per-color adjacency rows as `u32` masks for exact enumeration.
struct SmallFamily {
    n: usize,
    rows: Vec<Vec<u32>>,
    totals: Vec<u64>,
}

impl SmallFamily {
    fn new(f: &ColoredFamily) -> Self {
        let rows = f
            .colors()
            .iter()
            .map(|g| (0..f.n()).map(|v| g.row(v)[0] as u32).collect())
            .collect();
        let totals = f.colors().iter().map(|g| g.edge_count() as u64).collect();
        SmallFamily { n: f.n(), rows, totals }
    }

    fn counts(&self, c: usize, mask: u32) -> (u64, u64, u64) {
        let full = if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 };
        let comp = full & !mask;
        let (mut ea, mut eb) = (0u64, 0u64);
        for (v, &row) in self.rows[c].iter().enumerate() {
            if mask >> v & 1 == 1 {
                ea += (row & mask).count_ones() as u64;
            } else {
                eb += (row & comp).count_ones() as u64;
            }
        }
        let (ea, eb) = (ea / 2, eb / 2);
        (ea, eb, self.totals[c] - ea - eb)
    }
}

/// All half-set masks of an `n`-set, in increasing numeric order per size.
fn half_set_masks(n: usize) -> impl Iterator<Item = u32> {
    half_sizes(n).into_iter().flat_map(move |k| FixedWeight::new(n, k))
}

struct FixedWeight {
    next: Option<u32>,
    limit: u64,
}

impl FixedWeight {
    fn new(n: usize, k: usize) -> Self {
        let first = if k == 0 { 0 } else { ((1u64 << k) - 1) as u32 };
        FixedWeight { next: if k <= n { Some(first) } else { None }, limit: 1u64 << n }
    }
}

impl Iterator for FixedWeight {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        let cur = self.next?;
        if (cur as u64) >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if cur == 0 {
            None
        } else {
            let c = cur as u64;
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let nxt = (((ripple ^ c) >> 2) / low) | ripple;
            if nxt >= self.limit {
                None
            } else {
                Some(nxt as u32)
            }
        };
        Some(cur)
    }
}

fn mask_vertices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask >> v & 1 == 1).collect()
}

fn check_cap(n: usize, opts: &AnalysisOptions) -> Result<()> {
    if n > opts.exact_cap || n > 32 {
        Err(Error::CapExceeded { n, cap: opts.exact_cap.min(32) })
    } else {
        Ok(())
    }
}

/// Keeps the lowest value, ties to the lexicographically smallest vertex list.
fn better(value: u64, a: &[usize], best: &Option<(u64, Vec<usize>)>) -> bool {
    match best {
        None => true,
        Some((bv, ba)) => value < *bv || (value == *bv && a < ba.as_slice()),
    }
}

fn exact_min_extremal(f: &ColoredFamily) -> HalfSetCertificate {
    let sf = SmallFamily::new(f);
    let mut best: Option<(u64, Vec<usize>)> = None;
    for mask in half_set_masks(f.n()) {
        let value: u64 = (0..f.m())
            .map(|c| {
                let (ea, _, x) = sf.counts(c, mask);
                ea.min(x)
            })
            .sum();
        if best.as_ref().is_none_or(|(bv, _)| value <= *bv) {
            let a = mask_vertices(mask);
            if better(value, &a, &best) {
                best = Some((value, a));
            }
        }
    }
    let (value, a) = best.expect("n >= 1 has half-sets");
    HalfSetCertificate { a, c: None, value }
}

fn exact_r(f: &ColoredFamily) -> HalfSetCertificate {
    let sf = SmallFamily::new(f);
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut best_c = Vec::new();
    let mut costs = vec![(0u64, 0u64); f.m()];
    for mask in half_set_masks(f.n()) {
        for (c, slot) in costs.iter_mut().enumerate() {
            let (ea, eb, x) = sf.counts(c, mask);
            *slot = (ea + eb, x);
        }
        let (cset, value) = greedy_odd_c(&costs);
        if best.as_ref().is_none_or(|(bv, _)| value <= *bv) {
            let a = mask_vertices(mask);
            if better(value, &a, &best) {
                best = Some((value, a));
                best_c = cset;
            }
        }
    }
    let (value, a) = best.expect("n >= 1 has half-sets");
    HalfSetCertificate { a, c: Some(best_c), value }
}

/// Incremental state for local search over half-sets.
struct LocalState<'a> {
    f: &'a ColoredFamily,
    in_a: Vec<bool>,
    deg_a: Vec<Vec<u32>>,
    deg: Vec<Vec<u32>>,
    ea: Vec<u64>,
    eb: Vec<u64>,
    total: Vec<u64>,
}

impl<'a> LocalState<'a> {
    fn new(f: &'a ColoredFamily, a: &[usize]) -> Self {
        let n = f.n();
        let set = VertexSet::from_iter(n, a.iter().copied());
        let mut in_a = vec![false; n];
        for &v in a {
            in_a[v] = true;
        }
        let deg_a = f.colors().iter().map(|g| (0..n).map(|v| g.degree_into(v, &set) as u32).collect()).collect();
        let deg = f.colors().iter().map(|g| (0..n).map(|v| g.degree(v) as u32).collect()).collect();
        let mut s = LocalState { f, in_a, deg_a, deg, ea: vec![], eb: vec![], total: vec![] };
        for g in f.colors() {
            let (ea, eb, x) = split_counts(g, &set);
            s.ea.push(ea);
            s.eb.push(eb);
            s.total.push(ea + eb + x);
        }
        s
    }

    /// Per-color `(e(A), e(Ā))` after moving `x` out of its side and `y` out of its side.
    fn after(&self, c: usize, out_a: Option<usize>, into_a: Option<usize>) -> (u64, u64) {
        let g = self.f.color(c);
        let d = &self.deg_a[c];
        let (mut ea, mut eb) = (self.ea[c] as i64, self.eb[c] as i64);
        if let Some(x) = out_a {
            let da = d[x] as i64;
            let db = self.deg[c][x] as i64 - da;
            ea -= da;
            eb += db;
        }
        if let Some(y) = into_a {
            let mut da = d[y] as i64;
            let mut db = self.deg[c][y] as i64 - da;
            if let Some(x) = out_a {
                if g.has_edge(x, y) {
                    da -= 1;
                    db += 1;
                }
            }
            eb -= db;
            ea += da;
        }
        (ea as u64, eb as u64)
    }

    fn apply(&mut self, out_a: Option<usize>, into_a: Option<usize>) {
        for c in 0..self.f.m() {
            let (ea, eb) = self.after(c, out_a, into_a);
            self.ea[c] = ea;
            self.eb[c] = eb;
        }
        for (c, g) in self.f.colors().iter().enumerate() {
            if let Some(x) = out_a {
                for w in g.neighbors(x) {
                    self.deg_a[c][w] -= 1;
                }
            }
            if let Some(y) = into_a {
                for w in g.neighbors(y) {
                    self.deg_a[c][w] += 1;
                }
            }
        }
        if let Some(x) = out_a {
            self.in_a[x] = false;
        }
        if let Some(y) = into_a {
            self.in_a[y] = true;
        }
    }

    fn a(&self) -> Vec<usize> {
        (0..self.f.n()).filter(|&v| self.in_a[v]).collect()
    }
}

/// Seeded local search minimising `objective(per-color (e(A), e(Ā), e(A,Ā)))`.
fn local_search(
    f: &ColoredFamily,
    opts: &AnalysisOptions,
    objective: &dyn Fn(&[(u64, u64, u64)]) -> u64,
) -> (u64, Vec<usize>) {
    let n = f.n();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut r = rng::rng(derive_seed(opts.seed, "half-set-search", restart as u64));
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let k = half_sizes(n)[r.gen_range(0..half_sizes(n).len())];
        if restart % 2 == 0 && f.m() > 0 {
            // start from a closed neighbourhood in a random color
            let v = r.gen_range(0..n);
            let g = f.color(r.gen_range(0..f.m()));
            let mut nb: Vec<usize> = g.neighbors(v).collect();
            nb.shuffle(&mut r);
            nb.insert(0, v);
            order.retain(|x| !nb.contains(x));
            nb.extend(order);
            order = nb;
        }
        let mut sorted = order[..k].to_vec();
        sorted.sort_unstable();
        let mut st = LocalState::new(f, &sorted);
        let eval = |st: &LocalState, out_a: Option<usize>, into_a: Option<usize>| {
            let per: Vec<(u64, u64, u64)> = (0..f.m())
                .map(|c| {
                    let (ea, eb) = st.after(c, out_a, into_a);
                    (ea, eb, st.total[c] - ea - eb)
                })
                .collect();
            objective(&per)
        };
        let mut current = eval(&st, None, None);
        let tries = 4 * n + 16;
        let mut stale = 0;
        while stale < tries && current > 0 {
            stale += 1;
            let x = r.gen_range(0..n);
            let y = r.gen_range(0..n);
            let size = st.in_a.iter().filter(|&&b| b).count();
            let mv = if st.in_a[x] && !st.in_a[y] {
                (Some(x), Some(y))
            } else if !st.in_a[x] && st.in_a[y] {
                (Some(y), Some(x))
            } else if st.in_a[x] && is_half_set(n, size - 1) {
                (Some(x), None)
            } else if !st.in_a[x] && is_half_set(n, size + 1) {
                (None, Some(x))
            } else {
                continue;
            };
            let v = eval(&st, mv.0, mv.1);
            if v < current {
                st.apply(mv.0, mv.1);
                current = v;
                stale = 0;
            }
        }
        // polish: try the most promising single-vertex moves as swaps
        loop {
            let mut outs: Vec<(u64, usize)> = (0..n).filter(|&v| st.in_a[v]).map(|v| (eval(&st, Some(v), None), v)).collect();
            let mut ins: Vec<(u64, usize)> = (0..n).filter(|&v| !st.in_a[v]).map(|v| (eval(&st, None, Some(v)), v)).collect();
            outs.sort_unstable();
            ins.sort_unstable();
            let mut step = None;
            for &(_, x) in outs.iter().take(4) {
                for &(_, y) in ins.iter().take(4) {
                    let v = eval(&st, Some(x), Some(y));
                    if v < step.map_or(current, |(b, _, _)| b) {
                        step = Some((v, x, y));
                    }
                }
            }
            match step {
                Some((v, x, y)) => {
                    st.apply(Some(x), Some(y));
                    current = v;
                }
                None => break,
            }
        }
        let a = st.a();
        if better(current, &a, &best) {
            best = Some((current, a));
        }
    }
    best.expect("at least one restart")
}

fn family_threshold(f: &ColoredFamily, alpha: f64) -> f64 {
    alpha * (f.m() * f.n() * f.n()) as f64
}

pub fn is_family_extremal(
    f: &ColoredFamily,
    alpha: f64,
    mode: Mode,
    opts: &AnalysisOptions,
) -> Result<ExtremalityReport> {
    let threshold = family_threshold(f, alpha);
    match mode {
        Mode::Exact => {
            check_cap(f.n(), opts)?;
            let cert = exact_min_extremal(f);
            let extremal = cert.value as f64 <= threshold;
            Ok(ExtremalityReport {
                alpha,
                verdict: if extremal { Verdict::Extremal } else { Verdict::NonExtremal },
                certificate: Some(cert),
                method: Mode::Exact,
                certified: true,
            })
        }
        Mode::Heuristic => {
            let (value, a) = local_search(f, opts, &|per| per.iter().map(|&(ea, _, x)| ea.min(x)).sum());
            debug_assert_eq!(value, extremal_value(f, &a));
            let extremal = value as f64 <= threshold;
            Ok(ExtremalityReport {
                alpha,
                verdict: if extremal { Verdict::Extremal } else { Verdict::NonExtremal },
                certificate: extremal.then_some(HalfSetCertificate { a, c: None, value }),
                method: Mode::Heuristic,
                certified: extremal,
            })
        }
    }
}

pub fn is_graph_extremal(g: &Graph, alpha: f64, mode: Mode, opts: &AnalysisOptions) -> Result<ExtremalityReport> {
    is_family_extremal(&ColoredFamily::uniform(g, 1), alpha, mode, opts)
}

/// Exact mode when `n` is within the cap, heuristic otherwise.
pub fn is_family_extremal_auto(f: &ColoredFamily, alpha: f64, opts: &AnalysisOptions) -> Result<ExtremalityReport> {
    let mode = if f.n() <= opts.exact_cap { Mode::Exact } else { Mode::Heuristic };
    is_family_extremal(f, alpha, mode, opts)
}

/// `r(G)` with a witnessing half-set and odd color set.
pub fn compute_r(f: &ColoredFamily, mode: Mode, opts: &AnalysisOptions) -> Result<HalfSetCertificate> {
    match mode {
        Mode::Exact => {
            check_cap(f.n(), opts)?;
            Ok(exact_r(f))
        }
        Mode::Heuristic => {
            let (value, a) = local_search(f, opts, &|per| {
                let costs: Vec<(u64, u64)> = per.iter().map(|&(ea, eb, x)| (ea + eb, x)).collect();
                greedy_odd_c(&costs).1
            });
            let set = VertexSet::from_iter(f.n(), a.iter().copied());
            let costs: Vec<(u64, u64)> = f
                .colors()
                .iter()
                .map(|g| {
                    let (ea, eb, x) = split_counts(g, &set);
                    (ea + eb, x)
                })
                .collect();
            let (c, v) = greedy_odd_c(&costs);
            debug_assert_eq!(v, value);
            Ok(HalfSetCertificate { a, c: Some(c), value })
        }
    }
}

pub fn compute_r_auto(f: &ColoredFamily, opts: &AnalysisOptions) -> Result<HalfSetCertificate> {
    let mode = if f.n() <= opts.exact_cap { Mode::Exact } else { Mode::Heuristic };
    compute_r(f, mode, opts)
}

/// Exceptional iff some half-set and odd color set give `e_C(G,A) <= tau n²`.
pub fn is_exceptional(
    f: &ColoredFamily,
    tau: f64,
    mode: Mode,
    opts: &AnalysisOptions,
) -> Result<(bool, Option<HalfSetCertificate>)> {
    let cert = compute_r(f, mode, opts)?;
    let exceptional = cert.value as f64 <= tau * (f.n() * f.n()) as f64;
    Ok((exceptional, exceptional.then_some(cert)))
}

/// Ordered-pair count `Σ_{a∈A} |N(a) ∩ B|`; edges inside `A ∩ B` count twice.
pub fn pair_edges(g: &Graph, a: &VertexSet, b: &VertexSet) -> u64 {
    a.iter().map(|v| g.degree_into(v, b) as u64).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub alpha: f64,
    pub eps: f64,
    /// Input was α-extremal, so the check does not apply.
    pub extremal_input: bool,
    pub min_degree_ok: bool,
    pub min_pair: Option<(Vec<usize>, Vec<usize>)>,
    pub min_value: Option<u64>,
    pub bound: f64,
    pub holds: Option<bool>,
}

pub const PAIR_CAP: usize = 16;

/// Minimum of `e(A,B)` over all pairs of half-sets, compared against `αn²/3`.
pub fn expansion_check(g: &Graph, alpha: f64, eps: f64, opts: &AnalysisOptions) -> Result<ExpansionReport> {
    let n = g.n();
    check_cap(n, opts)?;
    if n > PAIR_CAP {
        return Err(Error::CapExceeded { n, cap: PAIR_CAP });
    }
    let bound = alpha * (n * n) as f64 / 3.0;
    let extremal = is_graph_extremal(g, alpha, Mode::Exact, opts)?.is_extremal();
    let min_degree_ok = g.min_degree() as f64 >= (0.5 - eps) * n as f64;
    let mut report = ExpansionReport {
        alpha,
        eps,
        extremal_input: extremal,
        min_degree_ok,
        min_pair: None,
        min_value: None,
        bound,
        holds: None,
    };
    if extremal || !min_degree_ok {
        return Ok(report);
    }
    let rows: Vec<u32> = (0..n).map(|v| g.row(v)[0] as u32).collect();
    let masks: Vec<u32> = half_set_masks(n).collect();
    let mut best: Option<(u64, u32, u32)> = None;
    for &ma in &masks {
        for &mb in &masks {
            let mut val = 0u64;
            for (v, &row) in rows.iter().enumerate() {
                if ma >> v & 1 == 1 {
                    val += (row & mb).count_ones() as u64;
                }
            }
            if best.is_none_or(|(bv, _, _)| val < bv) {
                best = Some((val, ma, mb));
            }
        }
    }
    let (val, ma, mb) = best.expect("half-sets exist");
    report.min_pair = Some((mask_vertices(ma), mask_vertices(mb)));
    report.min_value = Some(val);
    report.holds = Some(val as f64 >= bound);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub p: f64,
    pub q: f64,
    pub alpha_prime: f64,
    pub trials: usize,
    pub discarded: usize,
    pub non_extremal: usize,
    pub frequency: Option<f64>,
    pub interval: Option<Interval>,
    /// Whether the input was certified non-α-extremal (exact check within the cap).
    pub input_certified: Option<bool>,
}

/// One draw of `V(p)`, `C(q)`: `None` when fewer than 3 vertices or no color survive,
/// else whether the induced family is not α'-extremal.
pub fn preservation_trial(
    f: &ColoredFamily,
    p: f64,
    q: f64,
    alpha_prime: f64,
    seed: u64,
    opts: &AnalysisOptions,
) -> Result<Option<bool>> {
    let mut r = rng::rng(seed);
    let verts: Vec<usize> = (0..f.n()).collect();
    let cols: Vec<usize> = (0..f.m()).collect();
    let vs = rng::bernoulli_subset(&verts, p, &mut r);
    let cs = rng::bernoulli_subset(&cols, q, &mut r);
    if vs.len() < 3 || cs.is_empty() {
        return Ok(None);
    }
    let sub = f.induced(&vs, &cs);
    let rep = is_family_extremal(&sub, alpha_prime, Mode::Exact, opts)?;
    Ok(Some(!rep.is_extremal()))
}

/// Frequency with which `f_{C(q)}[V(p)]` is not α'-extremal.
#[allow(clippy::too_many_arguments)]
pub fn preservation_experiment(
    f: &ColoredFamily,
    p: f64,
    q: f64,
    alpha: f64,
    alpha_prime: f64,
    trials: usize,
    seed: u64,
    opts: &AnalysisOptions,
) -> Result<PreservationReport> {
    let input_certified = if f.n() <= opts.exact_cap {
        Some(!is_family_extremal(f, alpha, Mode::Exact, opts)?.is_extremal())
    } else {
        None
    };
    let outcomes: Vec<Result<Option<bool>>> = (0..trials)
        .into_par_iter()
        .map(|t| preservation_trial(f, p, q, alpha_prime, derive_seed(seed, "preservation", t as u64), opts))
        .collect();
    let mut discarded = 0;
    let mut non_extremal = 0;
    for o in outcomes {
        match o? {
            None => discarded += 1,
            Some(true) => non_extremal += 1,
            Some(false) => {}
        }
    }
    let decided = trials - discarded;
    Ok(PreservationReport {
        p,
        q,
        alpha_prime,
        trials,
        discarded,
        non_extremal,
        frequency: (decided > 0).then(|| non_extremal as f64 / decided as f64),
        interval: (decided > 0).then(|| wilson95(non_extremal as u64, decided as u64)),
        input_certified,
    })
}
