//! End-to-end transversal samplers and the route dispatcher.

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;

use crate::cover::CoverParams;
use crate::error::{retries, Error, Result};
use crate::exact::find_transversal;
use crate::extremal::{compute_r_auto, is_family_extremal_auto, AnalysisOptions, ExtremalityReport, HalfSetCertificate};
use crate::family::ColoredFamily;
use crate::graph::VertexSet;
use crate::rng::{self, derive_seed};
use crate::transversal::{validate_transversal, Transversal};
use crate::vortex::{feasibility, VortexParams};

mod bipartite;
mod cleanup;
mod eligible;
mod exceptional;
mod nonextremal;

pub use bipartite::{
    check_bipartite_path, density_conditions, sample_bipartite_path, spread_ham_path, spread_ham_path_with, BipartiteParams,
    BipartitePath, PathMode,
};
pub use cleanup::{
    cleanup_bipartite_with, cleanup_cliques_with, near_bipartite_colors, validate_bipartite_frame, validate_clique_frame,
    BipartiteFrame, CleanupI, CleanupII, CliqueFrame, ExtremalParams,
};
pub use eligible::{eligible_edges, random_eligible, random_eligible_in, Forest, Scope};
pub use exceptional::{restricted_family, sample_exceptional_path, witness_valid, witnesses, ExceptionalPath, Witness};
pub use nonextremal::{sample_transversal_nonextremal, LevelStats, NonextremalRun};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub preset: String,
    pub vortex: VortexParams,
    pub cover: CoverParams,
    pub posa_restarts: usize,
    /// Whole-pipeline retries.
    pub retries: usize,
    /// Families with `n` at most this go to the exact solver.
    pub exact_n: usize,
    /// Extremal routes that fail at `n` at most this hand over to the exact solver.
    pub fallback_n: usize,
    pub exact_budget: u64,
    /// Extremality threshold used for routing.
    pub alpha: f64,
    /// Exceptional threshold: `r ≤ tau·n²`.
    pub tau: f64,
    pub extremal: ExtremalParams,
    pub analysis: AnalysisOptions,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams::preset("desk").expect("built-in preset")
    }
}

impl PipelineParams {
    pub const PRESETS: &'static [&'static str] = &["desk", "reference"];

    pub fn preset(name: &str) -> Option<PipelineParams> {
        let vortex = VortexParams::preset(name)?;
        Some(PipelineParams {
            preset: name.to_string(),
            vortex,
            cover: CoverParams::default(),
            posa_restarts: 50,
            retries: 10,
            exact_n: 10,
            fallback_n: 20,
            exact_budget: crate::exact::DEFAULT_NODE_BUDGET,
            alpha: 0.05,
            tau: crate::extremal::DEFAULT_TAU,
            extremal: ExtremalParams::default(),
            analysis: AnalysisOptions { exact_cap: 16, restarts: 3, seed: 0 },
        })
    }
}

/// Which construction produced (or would produce) a transversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Exact,
    Nonextremal,
    Bipartite,
    Cliques,
    Exceptional,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Exact => "exact",
            Route::Nonextremal => "nonextremal",
            Route::Bipartite => "bipartite",
            Route::Cliques => "cliques",
            Route::Exceptional => "exceptional",
        }
    }
}

/// Route requested by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteRequest {
    Auto,
    Nonextremal,
    Extremal,
    Exceptional,
}

impl std::str::FromStr for RouteRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(RouteRequest::Auto),
            "nonextremal" => Ok(RouteRequest::Nonextremal),
            "extremal" => Ok(RouteRequest::Extremal),
            "exceptional" => Ok(RouteRequest::Exceptional),
            _ => Err(Error::Malformed(format!("unknown route {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub route: Route,
    pub extremality: ExtremalityReport,
    /// Present when the family is extremal.
    pub r: Option<HalfSetCertificate>,
    pub near_bipartite: usize,
}

/// Structural class: non-extremal, exceptional, or one of the two extremal cases.
pub fn classify(f: &ColoredFamily, p: &PipelineParams) -> Result<Classification> {
    let n = f.n();
    let ext = is_family_extremal_auto(f, p.alpha, &p.analysis)?;
    if !ext.is_extremal() {
        return Ok(Classification { route: Route::Nonextremal, extremality: ext, r: None, near_bipartite: 0 });
    }
    let r = compute_r_auto(f, &p.analysis)?;
    let a0 = &ext.certificate.as_ref().expect("extremal verdicts carry a certificate").a;
    let near = near_bipartite_colors(f, &VertexSet::from_iter(n, a0.iter().copied()), p.extremal.eps).len();
    let route = if r.value as f64 <= p.tau * (n * n) as f64 {
        Route::Exceptional
    } else if near as f64 >= p.extremal.case_split * n as f64 {
        Route::Bipartite
    } else {
        Route::Cliques
    };
    Ok(Classification { route, extremality: ext, r: Some(r), near_bipartite: near })
}

fn require_class(f: &ColoredFamily, p: &PipelineParams, want: Route) -> Result<Classification> {
    let cl = classify(f, p)?;
    if cl.route != want {
        return Err(Error::Precondition(format!("family is in class {}, not {}", cl.route.name(), want.name())));
    }
    Ok(cl)
}

/// Case I cleanup with the half-set found by the extremality analysis.
pub fn cleanup_bipartite(f: &ColoredFamily, p: &PipelineParams, seed: u64) -> Result<CleanupI> {
    let cl = require_class(f, p, Route::Bipartite)?;
    cleanup_bipartite_with(f, &cl.extremality.certificate.unwrap().a, &p.extremal, seed)
}

/// Case II cleanup with the half-set found by the extremality analysis.
pub fn cleanup_cliques(f: &ColoredFamily, p: &PipelineParams, seed: u64) -> Result<CleanupII> {
    let cl = require_class(f, p, Route::Cliques)?;
    cleanup_cliques_with(f, &cl.extremality.certificate.unwrap().a, &p.extremal, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutput {
    pub transversal: Transversal,
    pub route: Route,
    /// Structural class, when it was computed.
    pub class: Option<Route>,
    /// True when the exact solver stood in for a sampler.
    pub fallback: bool,
    pub preset: String,
    pub attempts: usize,
    pub notes: Vec<String>,
}

/// Joins segments that share consecutive endpoints into a cycle; the last
/// segment must end where the first begins.
fn close_segments(segs: &[(Vec<usize>, Vec<usize>)]) -> Transversal {
    let mut vertices = segs[0].0.clone();
    let mut colors = segs[0].1.clone();
    for (v, c) in &segs[1..] {
        debug_assert_eq!(v[0], *vertices.last().unwrap());
        vertices.extend_from_slice(&v[1..]);
        colors.extend_from_slice(c);
    }
    debug_assert_eq!(vertices.first(), vertices.last());
    vertices.pop();
    Transversal::cycle(vertices, colors)
}

fn rev(t: &Transversal) -> (Vec<usize>, Vec<usize>) {
    let mut v = t.vertices.clone();
    v.reverse();
    let mut c = t.colors.clone();
    c.reverse();
    (v, c)
}

fn fwd(t: &Transversal) -> (Vec<usize>, Vec<usize>) {
    (t.vertices.clone(), t.colors.clone())
}

fn bipartite_route(f: &ColoredFamily, a0: &[usize], p: &PipelineParams, seed: u64) -> Result<(Transversal, Vec<String>)> {
    let c = cleanup_bipartite_with(f, a0, &p.extremal, derive_seed(seed, "cleanup", 0))?;
    let fr = &c.frame;
    let q = sample_bipartite_path(f, &fr.a, &fr.b, &fr.colors, fr.v1, fr.v2, &p.extremal.bipartite, derive_seed(seed, "lemma", 0))?;
    let mut notes = c.notes;
    notes.extend(q.notes);
    notes.push(format!("residual path mode {:?} on sides of {}", q.mode, fr.a.len()));
    Ok((close_segments(&[fwd(&c.prefix), rev(&q.path)]), notes))
}

fn cliques_route(f: &ColoredFamily, a0: &[usize], p: &PipelineParams, seed: u64) -> Result<(Transversal, Vec<String>)> {
    let c = cleanup_cliques_with(f, a0, &p.extremal, derive_seed(seed, "cleanup", 0))?;
    let fr = &c.frame;
    let mut r = rng::rng(derive_seed(seed, "split", 0));
    let colors = rng::shuffled(&fr.colors, &mut r);
    let (ca, cb) = colors.split_at(fr.a.len() - 1);
    let (s1, t1) = (c.p1.vertices[0], *c.p1.vertices.last().unwrap());
    let (s2, t2) = (c.p2.vertices[0], c.p2.vertices[1]);
    let halves = |side: &[usize], x: usize, y: usize, r: &mut rng::Rng| {
        let rest: Vec<usize> = side.iter().copied().filter(|&v| v != x && v != y).collect();
        let rest = rng::shuffled(&rest, r);
        let h = side.len() / 2 - 1;
        let mut one = vec![x];
        one.extend_from_slice(&rest[..h]);
        let mut two = vec![y];
        two.extend_from_slice(&rest[h..]);
        (one, two)
    };
    let (a1, a2) = halves(&fr.a, s1, s2, &mut r);
    let (b1, b2) = halves(&fr.b, t1, t2, &mut r);
    let bp = &p.extremal.bipartite;
    let qa = sample_bipartite_path(f, &a1, &a2, ca, s1, s2, bp, derive_seed(seed, "lemma-a", 0))?;
    let qb = sample_bipartite_path(f, &b1, &b2, cb, t1, t2, bp, derive_seed(seed, "lemma-b", 0))?;
    let mut notes = c.notes;
    notes.extend(qa.notes);
    notes.extend(qb.notes);
    notes.push(format!("classes {:?}, residual sides {} and {}", c.class_sizes, fr.a.len(), fr.b.len()));
    Ok((close_segments(&[fwd(&c.p1), fwd(&qb.path), rev(&c.p2), rev(&qa.path)]), notes))
}

fn exceptional_route(f: &ColoredFamily, cert: &HalfSetCertificate, p: &PipelineParams, seed: u64) -> Result<(Transversal, Vec<String>)> {
    let ws = witnesses(f, cert);
    let mut r = rng::rng(derive_seed(seed, "witness", 0));
    let &w = ws.choose(&mut r).ok_or_else(|| Error::Obstruction("no witness edge for the exceptional certificate".into()))?;
    let ep = sample_exceptional_path(f, cert, w, &p.extremal, derive_seed(seed, "path", 0))?;
    let mut colors = ep.path.colors.clone();
    colors.push(w.color);
    let mut notes = ep.notes;
    notes.push(format!("witness {:?} in color {}, prefix of {} edges", w.edge, w.color, ep.prefix_len));
    Ok((Transversal::cycle(ep.path.vertices, colors), notes))
}

/// Exact search on a seeded relabelling of vertices and colors, mapped back.
fn exact_route(f: &ColoredFamily, p: &PipelineParams, seed: u64) -> Result<Transversal> {
    let n = f.n();
    let mut r = rng::rng(derive_seed(seed, "exact-relabel", 0));
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(&mut r);
    let mut sigma: Vec<usize> = (0..f.m()).collect();
    sigma.shuffle(&mut r);
    let mut colors = vec![crate::graph::Graph::new(n); f.m()];
    for c in 0..f.m() {
        for (u, v) in f.color(c).edges() {
            colors[sigma[c]].add_edge(pi[u], pi[v]);
        }
    }
    let g = ColoredFamily::new(n, colors)?;
    let res = find_transversal(&g, p.exact_budget)?;
    let mut inv_pi = vec![0; n];
    for (v, &w) in pi.iter().enumerate() {
        inv_pi[w] = v;
    }
    let mut inv_sigma = vec![0; f.m()];
    for (c, &d) in sigma.iter().enumerate() {
        inv_sigma[d] = c;
    }
    match res.outcome.found() {
        Some(t) => Ok(Transversal::cycle(
            t.vertices.iter().map(|&v| inv_pi[v]).collect(),
            t.colors.iter().map(|&c| inv_sigma[c]).collect(),
        )),
        None if res.outcome.is_decided() => Err(Error::Obstruction("the family has no transversal".into())),
        None => Err(retries("exact-fallback", format!("search budget {} exhausted", p.exact_budget))),
    }
}

/// Samples a transversal along the structural route.
pub fn sample_transversal(f: &ColoredFamily, p: &PipelineParams, seed: u64) -> Result<SampleOutput> {
    sample_transversal_route(f, p, RouteRequest::Auto, seed)
}

pub fn sample_transversal_route(f: &ColoredFamily, p: &PipelineParams, req: RouteRequest, seed: u64) -> Result<SampleOutput> {
    let n = f.n();
    if f.m() != n {
        return Err(Error::Precondition(format!("{} colors on {n} vertices", f.m())));
    }
    if let Some(c) = (0..f.m()).find(|&c| !f.color(c).is_dirac()) {
        return Err(Error::Precondition(format!("color {c} is not Dirac")));
    }
    let mut out = SampleOutput {
        transversal: Transversal::cycle(Vec::new(), Vec::new()),
        route: Route::Exact,
        class: None,
        fallback: true,
        preset: p.preset.clone(),
        attempts: 1,
        notes: Vec::new(),
    };
    if req == RouteRequest::Auto && n <= p.exact_n {
        out.transversal = exact_route(f, p, seed)?;
        out.notes.push(format!("n = {n} is at most {}", p.exact_n));
        return Ok(out);
    }
    let cl = classify(f, p)?;
    out.class = Some(cl.route);
    let route = match (req, cl.route) {
        (RouteRequest::Auto, r) => r,
        (RouteRequest::Nonextremal, r) => {
            if r != Route::Nonextremal {
                return Err(Error::Precondition(format!("family is in class {}", r.name())));
            }
            r
        }
        (RouteRequest::Extremal, r @ (Route::Bipartite | Route::Cliques)) => r,
        (RouteRequest::Exceptional, Route::Exceptional) => Route::Exceptional,
        (want, r) => return Err(Error::Precondition(format!("route {want:?} requested for a family in class {}", r.name()))),
    };
    if route == Route::Nonextremal && !feasibility(n, &p.vortex).map(|x| x.feasible).unwrap_or(false) {
        out.transversal = exact_route(f, p, seed)?;
        out.notes.push(format!("vortex parameters infeasible at n = {n}"));
        return Ok(out);
    }
    let mut last = String::new();
    let tries = if route == Route::Nonextremal { 1 } else { p.retries.max(1) };
    for t in 0..tries {
        let s = derive_seed(seed, route.name(), t as u64);
        let res = match route {
            Route::Nonextremal => sample_transversal_nonextremal(f, p, s).map(|run| {
                let notes = run.levels.iter().map(|l| format!("level {}: {} forced, {} paths", l.level, l.forced_in, l.paths_out)).collect();
                (run.transversal, notes)
            }),
            Route::Bipartite => bipartite_route(f, &cl.extremality.certificate.as_ref().unwrap().a, p, s),
            Route::Cliques => cliques_route(f, &cl.extremality.certificate.as_ref().unwrap().a, p, s),
            Route::Exceptional => exceptional_route(f, cl.r.as_ref().unwrap(), p, s),
            Route::Exact => unreachable!(),
        };
        match res {
            Ok((t_out, notes)) => {
                validate_transversal(f, &t_out).map_err(|e| Error::Inconsistent(format!("{} route produced an invalid cycle: {e}", route.name())))?;
                out.transversal = t_out;
                out.route = route;
                out.fallback = false;
                out.attempts = t + 1;
                out.notes.extend(notes);
                return Ok(out);
            }
            Err(e @ (Error::Precondition(_) | Error::InfeasibleParams(_) | Error::Obstruction(_))) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    if n <= p.fallback_n {
        out.transversal = exact_route(f, p, seed)?;
        out.notes.push(format!("{} route failed at n = {n}: {last}", route.name()));
        return Ok(out);
    }
    Err(retries(route.name(), last))
}
