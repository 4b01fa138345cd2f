//! Colored graph families: data model, validation, generators, reduction, file format.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rng::{self, Rng};

/// An indexed family of simple graphs on the common vertex set `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredFamily {
    n: usize,
    colors: Vec<Graph>,
}

impl ColoredFamily {
    pub fn new(n: usize, colors: Vec<Graph>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::Inconsistent("family needs at least one color".into()));
        }
        if let Some(i) = colors.iter().position(|g| g.n() != n) {
            return Err(Error::Inconsistent(format!("color {i} is not on {n} vertices")));
        }
        Ok(ColoredFamily { n, colors })
    }

    /// `m` copies of the same graph.
    pub fn uniform(g: &Graph, m: usize) -> Self {
        ColoredFamily { n: g.n(), colors: vec![g.clone(); m] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, c: usize) -> &Graph {
        &self.colors[c]
    }

    pub fn colors(&self) -> &[Graph] {
        &self.colors
    }

    pub fn has(&self, c: usize, u: usize, v: usize) -> bool {
        self.colors[c].has_edge(u, v)
    }

    /// Number of colors among `cs` containing `uv`.
    pub fn multiplicity(&self, u: usize, v: usize, cs: &[usize]) -> usize {
        cs.iter().filter(|&&c| self.colors[c].has_edge(u, v)).count()
    }

    pub fn union_graph(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for c in &self.colors {
            g.union_with(c);
        }
        g
    }

    /// Subfamily on the listed colors, vertices relabelled to `verts` order.
    pub fn induced(&self, verts: &[usize], cols: &[usize]) -> ColoredFamily {
        ColoredFamily {
            n: verts.len(),
            colors: cols.iter().map(|&c| self.colors[c].induced(verts)).collect(),
        }
    }

    pub fn map_colors(&self, f: impl Fn(usize, &Graph) -> Graph) -> ColoredFamily {
        ColoredFamily {
            n: self.n,
            colors: self.colors.iter().enumerate().map(|(i, g)| f(i, g)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            n: self.n,
            m: self.m(),
            colors: self
                .colors
                .iter()
                .map(|g| g.edges().into_iter().map(|(u, v)| [u, v]).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("family serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(s)?;
        file.into_family()
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    n: usize,
    m: usize,
    colors: Vec<Vec<[usize; 2]>>,
}

impl FamilyFile {
    fn into_family(self) -> Result<ColoredFamily> {
        if self.colors.len() != self.m {
            return Err(Error::Inconsistent(format!(
                "m = {} but {} colors listed",
                self.m,
                self.colors.len()
            )));
        }
        let mut colors = Vec::with_capacity(self.m);
        for edges in self.colors {
            let mut g = Graph::new(self.n);
            for [u, v] in edges {
                if u == v {
                    return Err(Error::SelfLoop);
                }
                if u >= self.n || v >= self.n {
                    return Err(Error::VertexOutOfRange);
                }
                g.add_edge(u, v);
            }
            colors.push(g);
        }
        ColoredFamily::new(self.n, colors)
    }
}

/// Per-color degree audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub n: usize,
    pub m: usize,
    pub min_degree: Vec<usize>,
    pub dirac: Vec<bool>,
    pub all_dirac: bool,
    pub violations: Vec<String>,
}

pub fn validate_family(f: &ColoredFamily) -> FamilyReport {
    let min_degree: Vec<usize> = f.colors.iter().map(|g| g.min_degree()).collect();
    let dirac: Vec<bool> = min_degree.iter().map(|&d| 2 * d >= f.n).collect();
    let mut violations = Vec::new();
    for (i, g) in f.colors.iter().enumerate() {
        if g.n() != f.n {
            violations.push(format!("color {i}: vertex count {} != {}", g.n(), f.n));
        }
    }
    FamilyReport {
        n: f.n,
        m: f.m(),
        all_dirac: dirac.iter().all(|&d| d),
        min_degree,
        dirac,
        violations,
    }
}

/// Removes edges in seeded random order while both endpoints exceed `⌈n/2⌉`.
pub fn edge_minimal_reduction(g: &Graph, seed: u64) -> Result<Graph> {
    if !g.is_dirac() {
        return Err(Error::Precondition("input graph is not Dirac".into()));
    }
    let n = g.n();
    let floor = n.div_ceil(2);
    let mut r = rng::rng(seed);
    let mut edges = g.edges();
    edges.shuffle(&mut r);
    let mut out = g.clone();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    for (u, v) in edges {
        if deg[u] > floor && deg[v] > floor {
            out.remove_edge(u, v);
            deg[u] -= 1;
            deg[v] -= 1;
        }
    }
    Ok(out)
}

/// Every edge touches a vertex of degree exactly `⌈n/2⌉` and the graph is Dirac.
pub fn is_edge_minimal_dirac(g: &Graph) -> bool {
    let floor = g.n().div_ceil(2);
    g.is_dirac() && g.edges().iter().all(|&(u, v)| g.degree(u) == floor || g.degree(v) == floor)
}

/// Smallest `α` for which the complement bound is checked at order `n`: below
/// `(3n+1)/(4n²)` the additive terms of the degree count dominate `αn²`.
pub fn complement_alpha_floor(n: usize) -> f64 {
    (3 * n + 1) as f64 / (4 * n * n) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementCheck {
    pub n: usize,
    pub alpha_floor: f64,
    pub half_sets: u64,
    /// Half-sets `A` with `e(Ā) > 3αn²` for some `α ≥ alpha_floor` with `e(A) ≤ αn²`.
    pub violations: Vec<Vec<usize>>,
    /// Largest `e(Ā) / max(e(A), alpha_floor·n²)` seen.
    pub worst_ratio: f64,
}

impl ComplementCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check over half-sets that a sparse side forces a sparse complement:
/// `e(A) ≤ αn²` implies `e(Ā) ≤ 3αn²` for every `α ≥ alpha_floor`.
pub fn complement_sparsity_check(g: &Graph, alpha_floor: f64, cap: usize) -> Result<ComplementCheck> {
    let n = g.n();
    if n > cap || n >= 64 {
        return Err(Error::CapExceeded { n, cap });
    }
    let floor = alpha_floor * (n * n) as f64;
    let mut out = ComplementCheck { n, alpha_floor, half_sets: 0, violations: Vec::new(), worst_ratio: 0.0 };
    for mask in 0u64..(1u64 << n) {
        let k = mask.count_ones() as usize;
        if !(2 * k + 1 >= n && 2 * k <= n + 1) {
            continue;
        }
        out.half_sets += 1;
        let a = VertexSet::from_iter(n, (0..n).filter(|&v| mask >> v & 1 == 1));
        let ea = g.edges_within(&a) as f64;
        let eb = g.edges_within(&a.complement()) as f64;
        let scale = ea.max(floor);
        if eb > 3.0 * scale {
            out.violations.push(a.to_vec());
        }
        if scale > 0.0 {
            out.worst_ratio = out.worst_ratio.max(eb / scale);
        }
    }
    Ok(out)
}

/// Family generator: a kind with its parameters plus a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyGenerator {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// `m` (default `n`) copies of `K_n`.
    AllClique { n: usize, m: Option<usize> },
    /// Colors `0..n-1` are `K_{n/2,n/2}`; the last is two `K_{n/2}` joined by a perfect matching.
    ExtremalConstruction { n: usize },
    /// Each color is `G(n, p0)` conditioned on minimum degree at least `n/2`.
    RandomDirac {
        n: usize,
        p0: f64,
        m: Option<usize>,
        #[serde(default = "default_rejections")]
        max_rejections: usize,
    },
    /// Colors are `K_{n/2,n/2}` over a random bisection plus `noise` random inside edges;
    /// the last `clique_colors` colors are two cliques joined by a random perfect matching.
    RandomBipartiteNearComplete {
        n: usize,
        #[serde(default)]
        noise: usize,
        #[serde(default)]
        clique_colors: usize,
    },
    /// Every color is two `K_{n/2}` over a random bisection, joined by a random perfect
    /// matching plus `noise` random crossing edges.
    RandomTwoCliques {
        n: usize,
        #[serde(default)]
        noise: usize,
    },
    CustomFile { path: String },
}

fn default_rejections() -> usize {
    10_000
}

impl FamilyGenerator {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        FamilyGenerator { kind, seed }
    }
}

pub fn generate(gen: &FamilyGenerator) -> Result<ColoredFamily> {
    let mut r = rng::rng(gen.seed);
    match &gen.kind {
        GeneratorKind::AllClique { n, m } => {
            Ok(ColoredFamily::uniform(&Graph::complete(*n), m.unwrap_or(*n)))
        }
        GeneratorKind::ExtremalConstruction { n } => extremal_construction(*n),
        GeneratorKind::RandomDirac { n, p0, m, max_rejections } => {
            let mut colors = Vec::new();
            for _ in 0..m.unwrap_or(*n) {
                colors.push(random_dirac_graph(*n, *p0, *max_rejections, &mut r)?);
            }
            ColoredFamily::new(*n, colors)
        }
        GeneratorKind::RandomBipartiteNearComplete { n, noise, clique_colors } => {
            let (n, noise, cc) = (*n, *noise, *clique_colors);
            if n % 2 != 0 || n < 4 {
                return Err(Error::Precondition("n must be even and at least 4".into()));
            }
            if cc > n {
                return Err(Error::Precondition("more clique colors than colors".into()));
            }
            let a = random_bisection(n, &mut r);
            let mut colors = Vec::new();
            for c in 0..n {
                if c >= n - cc {
                    colors.push(two_cliques(n, &a, 0, &mut r));
                } else {
                    let mut g = Graph::complete_bipartite(n, &a);
                    add_random_edges(&mut g, noise, |u, v| a.contains(u) == a.contains(v), &mut r);
                    colors.push(g);
                }
            }
            ColoredFamily::new(n, colors)
        }
        GeneratorKind::RandomTwoCliques { n, noise } => {
            if n % 2 != 0 || *n < 4 {
                return Err(Error::Precondition("n must be even and at least 4".into()));
            }
            let a = random_bisection(*n, &mut r);
            let colors = (0..*n).map(|_| two_cliques(*n, &a, *noise, &mut r)).collect();
            ColoredFamily::new(*n, colors)
        }
        GeneratorKind::CustomFile { path } => ColoredFamily::read(Path::new(path)),
    }
}

pub fn extremal_construction(n: usize) -> Result<ColoredFamily> {
    if n % 2 != 0 || n < 4 {
        return Err(Error::Precondition("extremal construction needs even n >= 4".into()));
    }
    let a = VertexSet::from_iter(n, 0..n / 2);
    let mut colors = vec![Graph::complete_bipartite(n, &a); n - 1];
    let mut last = Graph::new(n);
    for side in [0..n / 2, n / 2..n] {
        let vs: Vec<usize> = side.collect();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                last.add_edge(u, v);
            }
        }
    }
    for i in 0..n / 2 {
        last.add_edge(i, i + n / 2);
    }
    colors.push(last);
    ColoredFamily::new(n, colors)
}

fn random_dirac_graph(n: usize, p0: f64, budget: usize, r: &mut Rng) -> Result<Graph> {
    for _ in 0..budget.max(1) {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if r.gen::<f64>() < p0 {
                    g.add_edge(u, v);
                }
            }
        }
        if g.is_dirac() {
            return Ok(g);
        }
    }
    Err(Error::RejectionBudget(budget))
}

fn random_bisection(n: usize, r: &mut Rng) -> VertexSet {
    let all: Vec<usize> = (0..n).collect();
    VertexSet::from_iter(n, rng::sample_k(&all, n / 2, r))
}

fn two_cliques(n: usize, a: &VertexSet, noise: usize, r: &mut Rng) -> Graph {
    let mut g = Graph::new(n);
    let left = a.to_vec();
    let mut right = a.complement().to_vec();
    for side in [&left, &right] {
        for (i, &u) in side.iter().enumerate() {
            for &v in &side[i + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    right.shuffle(r);
    for (&u, &v) in left.iter().zip(&right) {
        g.add_edge(u, v);
    }
    add_random_edges(&mut g, noise, |u, v| a.contains(u) != a.contains(v), r);
    g
}

fn add_random_edges(
    g: &mut Graph,
    count: usize,
    allowed: impl Fn(usize, usize) -> bool,
    r: &mut Rng,
) {
    let n = g.n();
    let mut pool: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if allowed(u, v) && !g.has_edge(u, v) {
                pool.push((u, v));
            }
        }
    }
    for (u, v) in rng::sample_k(&pool, count, r) {
        g.add_edge(u, v);
    }
}
