//! Reproducible experiment campaigns: configs, per-trial records, CSV and plot data, replay.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{count_transversals, find_transversal, pack_edge_disjoint, PackStrategy, SearchOutcome};
use crate::extremal::{compute_r, is_family_extremal, preservation_trial, AnalysisOptions, HalfSetCertificate, Mode};
use crate::family::{
    complement_alpha_floor, complement_sparsity_check, edge_minimal_reduction, generate, FamilyGenerator, GeneratorKind,
};
use crate::pipeline::witness_valid;
use crate::rng::{self, derive_seed};
use crate::spread::{intersect_random, sparsify};
use crate::stats::{wilson95, Interval};
use crate::transversal::Transversal;
use crate::ColoredFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Every color intersected with one shared `G(n, p)`.
    #[default]
    ThresholdShared,
    /// `n` independent copies of `G_p` for the first color's graph.
    ThresholdIndependent,
    /// Each color `G_i` replaced by its own `(G_i)_p`.
    ThresholdDistinctFamilies,
    Counting,
    Packing,
    Preservation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ThresholdShared => "threshold-shared",
            ExperimentKind::ThresholdIndependent => "threshold-independent",
            ExperimentKind::ThresholdDistinctFamilies => "threshold-distinct-families",
            ExperimentKind::Counting => "counting",
            ExperimentKind::Packing => "packing",
            ExperimentKind::Preservation => "preservation",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Precondition(format!("unknown experiment kind '{s}'")))
    }
}

/// Everything that determines a campaign. `out` is excluded from its identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub family: Option<FamilyGenerator>,
    /// Replace every color by a seeded edge-minimal reduction.
    pub reduce: bool,
    pub p_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Node budget per exact search.
    pub budget: u64,
    pub n_min: usize,
    pub n_max: usize,
    /// Edge probability of the random Dirac families in counting campaigns.
    pub dirac_p0: f64,
    pub k: usize,
    pub strategy: PackStrategy,
    pub alpha: f64,
    pub alpha_prime: f64,
    /// Largest `n` for the exhaustive complement-sparsity check.
    pub complement_cap: usize,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::ThresholdShared,
            family: None,
            reduce: false,
            p_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            q_grid: Vec::new(),
            trials: 100,
            seed: 0,
            budget: 5_000_000,
            n_min: 3,
            n_max: 8,
            dirac_p0: 0.7,
            k: 3,
            strategy: PackStrategy::Exact,
            alpha: 0.05,
            alpha_prime: 0.02,
            complement_cap: 14,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical config with `out` cleared.
    pub fn campaign_id(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        hex::encode(Sha256::digest(serde_json::to_vec(&c).expect("config serializes")))
    }

    fn base_family(&self) -> Result<ColoredFamily> {
        let gen = self.family.as_ref().ok_or_else(|| Error::Precondition("config has no family".into()))?;
        let f = generate(gen)?;
        if !self.reduce {
            return Ok(f);
        }
        let colors = f
            .colors()
            .iter()
            .enumerate()
            .map(|(i, g)| edge_minimal_reduction(g, derive_seed(gen.seed, "reduce", i as u64)))
            .collect::<Result<Vec<_>>>()?;
        ColoredFamily::new(f.n(), colors)
    }
}

/// One trial. `digest` covers every other field; replay compares all but `millis`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub experiment: String,
    pub n: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub decided: bool,
    pub success: bool,
    pub route: String,
    pub millis: u64,
    /// Transversal hash, count, or failure reason.
    pub witness: String,
    /// Whether the trial's family spans an edge that breaks the parity obstruction.
    pub witness_edge: Option<bool>,
    pub digest: String,
}

impl TrialResult {
    fn compute_digest(&self) -> String {
        let mut c = self.clone();
        c.digest.clear();
        hex::encode(Sha256::digest(serde_json::to_vec(&c).expect("record serializes")))
    }

    fn seal(mut self) -> Self {
        self.digest = self.compute_digest();
        self
    }

    fn same_outcome(&self, other: &TrialResult) -> bool {
        let strip = |t: &TrialResult| TrialResult { millis: 0, digest: String::new(), ..t.clone() };
        strip(self) == strip(other)
    }
}

struct Row {
    n: usize,
    p: Option<f64>,
    q: Option<f64>,
    trial: usize,
    seed: u64,
}

fn record(kind: ExperimentKind, row: &Row, started: Instant, decided: bool, success: bool, route: &str, witness: String, witness_edge: Option<bool>) -> TrialResult {
    TrialResult {
        experiment: kind.name().into(),
        n: row.n,
        p: row.p,
        q: row.q,
        trial: row.trial,
        seed: row.seed,
        decided,
        success,
        route: route.into(),
        millis: started.elapsed().as_millis() as u64,
        witness,
        witness_edge,
        digest: String::new(),
    }
    .seal()
}

pub fn transversal_hash(t: &Transversal) -> String {
    hex::encode(&Sha256::digest(t.to_json().as_bytes())[..8])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub trials: usize,
    pub decided: usize,
    pub undecided: usize,
    pub successes: usize,
    pub frequency: Option<f64>,
    pub interval: Option<Interval>,
    /// Overlay value at `p`; never used as a pass/fail bound.
    pub reference: f64,
    pub witness_frequency: Option<f64>,
    /// Successful trials whose family had no witness edge.
    pub containment_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub family: String,
    pub n: usize,
    pub count: u128,
    /// `((n-1)!/2)·n!` for the all-clique family.
    pub oracle: Option<u128>,
    pub bound: u128,
    pub below_bound: bool,
    /// `count^{1/(2n)}/n`, non-asymptotic.
    pub empirical_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackRow {
    pub n: usize,
    pub requested: usize,
    pub achieved: usize,
    pub ceiling: usize,
    pub r: Option<u64>,
    pub budget_hit: bool,
    pub edge_disjoint: bool,
    /// Every transversal contains a witness edge, and achieved ≤ r.
    pub witness_consumption: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreservationRow {
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub discarded: usize,
    pub non_extremal: usize,
    pub frequency: Option<f64>,
    pub interval: Option<Interval>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementRow {
    pub color: usize,
    pub alpha_floor: f64,
    pub half_sets: u64,
    pub violations: usize,
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Summary {
    Curve {
        reference: String,
        r: Option<u64>,
        points: Vec<CurvePoint>,
        /// Linear interpolation of the first crossing of frequency 1/2.
        threshold_p: Option<f64>,
    },
    Counting { rows: Vec<CountRow> },
    Packing { rows: Vec<PackRow> },
    Preservation {
        input_non_extremal: Option<bool>,
        rows: Vec<PreservationRow>,
        complement: Vec<ComplementRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub campaign_id: String,
    pub config: ExperimentConfig,
    pub results: Vec<TrialResult>,
    pub summary: Summary,
}

pub fn run_campaign(cfg: &ExperimentConfig) -> Result<Campaign> {
    let (results, summary) = match cfg.kind {
        ExperimentKind::ThresholdShared | ExperimentKind::ThresholdIndependent | ExperimentKind::ThresholdDistinctFamilies => {
            run_threshold(cfg)?
        }
        ExperimentKind::Counting => run_counting(cfg)?,
        ExperimentKind::Packing => run_packing(cfg)?,
        ExperimentKind::Preservation => run_preservation(cfg)?,
    };
    Ok(Campaign { campaign_id: cfg.campaign_id(), config: cfg.clone(), results, summary })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Precondition("empty probability grid".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Precondition(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

fn exact_cert(f: &ColoredFamily) -> Result<Option<HalfSetCertificate>> {
    if f.n() > crate::extremal::DEFAULT_EXACT_CAP || f.m() != f.n() {
        return Ok(None);
    }
    compute_r(f, Mode::Exact, &AnalysisOptions::default()).map(Some)
}

/// Some colored edge of `g` is a witness for `cert`.
pub fn has_witness_edge(g: &ColoredFamily, cert: &HalfSetCertificate) -> bool {
    (0..g.m()).any(|c| {
        g.color(c).edges().into_iter().any(|edge| witness_valid(g, cert, &crate::pipeline::Witness { edge, color: c }))
    })
}

fn run_threshold(cfg: &ExperimentConfig) -> Result<(Vec<TrialResult>, Summary)> {
    check_grid(&cfg.p_grid)?;
    let base = cfg.base_family()?;
    let f = match cfg.kind {
        ExperimentKind::ThresholdIndependent => ColoredFamily::uniform(base.color(0), base.n()),
        _ => base,
    };
    let n = f.n();
    let cert = exact_cert(&f)?;
    let kind = cfg.kind;
    let jobs: Vec<(usize, usize)> = (0..cfg.p_grid.len()).flat_map(|i| (0..cfg.trials).map(move |t| (i, t))).collect();
    let results: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let started = Instant::now();
            let p = cfg.p_grid[i];
            let seed = derive_seed(derive_seed(cfg.seed, kind.name(), i as u64), "trial", t as u64);
            let mut r = rng::rng(seed);
            let sub = match kind {
                ExperimentKind::ThresholdShared => intersect_random(&f, p, &mut r),
                _ => sparsify(&f, p, &mut r),
            };
            let row = Row { n, p: Some(p), q: None, trial: t, seed };
            let witness_edge = cert.as_ref().map(|c| has_witness_edge(&sub, c));
            let res = find_transversal(&sub, cfg.budget)?;
            let (decided, success, witness) = match &res.outcome {
                SearchOutcome::Found(tr) => (true, true, transversal_hash(tr)),
                SearchOutcome::NoneExists => (true, false, "none".to_string()),
                SearchOutcome::BudgetExhausted => (false, false, format!("budget {}", cfg.budget)),
            };
            Ok(record(kind, &row, started, decided, success, "exact", witness, witness_edge))
        })
        .collect::<Result<Vec<_>>>()?;
    let r_val = cert.as_ref().map(|c| c.value);
    let ln_scale = (n as f64).ln() / n as f64;
    let points: Vec<CurvePoint> = cfg
        .p_grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let rows = &results[i * cfg.trials..(i + 1) * cfg.trials];
            let decided = rows.iter().filter(|t| t.decided).count();
            let successes = rows.iter().filter(|t| t.success).count();
            let with_witness: Vec<bool> = rows.iter().filter_map(|t| t.witness_edge).collect();
            let reference = match kind {
                ExperimentKind::ThresholdShared => ln_scale,
                _ => 1.0 - (-p * r_val.unwrap_or(0) as f64).exp(),
            };
            CurvePoint {
                p,
                trials: rows.len(),
                decided,
                undecided: rows.len() - decided,
                successes,
                frequency: (decided > 0).then(|| successes as f64 / decided as f64),
                interval: (decided > 0).then(|| wilson95(successes as u64, decided as u64)),
                reference,
                witness_frequency: (!with_witness.is_empty())
                    .then(|| with_witness.iter().filter(|&&w| w).count() as f64 / with_witness.len() as f64),
                containment_violations: rows.iter().filter(|t| t.success && t.witness_edge == Some(false)).count(),
            }
        })
        .collect();
    let reference = match kind {
        ExperimentKind::ThresholdShared => format!("log n / n = {ln_scale:.6}"),
        _ => "1 - exp(-p r)".to_string(),
    };
    let threshold_p = half_crossing(&points);
    Ok((results, Summary::Curve { reference, r: r_val, points, threshold_p }))
}

fn half_crossing(points: &[CurvePoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter_map(|c| c.frequency.map(|f| (c.p, f))).collect();
    for w in pts.windows(2) {
        let ((p0, f0), (p1, f1)) = (w[0], w[1]);
        if f0 < 0.5 && f1 >= 0.5 {
            return Some(p0 + (0.5 - f0) * (p1 - p0) / (f1 - f0));
        }
    }
    pts.first().filter(|x| x.1 >= 0.5).map(|x| x.0)
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// `((n-1)!/2)·n!`: Hamilton cycles of `K_n` times color bijections.
pub fn all_clique_count(n: usize) -> u128 {
    factorial(n - 1) / 2 * factorial(n)
}

fn run_counting(cfg: &ExperimentConfig) -> Result<(Vec<TrialResult>, Summary)> {
    if cfg.n_min < 3 || cfg.n_max < cfg.n_min || cfg.n_max > 10 {
        return Err(Error::Precondition("counting needs 3 <= n_min <= n_max <= 10".into()));
    }
    let kind = ExperimentKind::Counting;
    let jobs: Vec<(usize, usize)> = (cfg.n_min..=cfg.n_max).flat_map(|n| (0..=cfg.trials).map(move |t| (n, t))).collect();
    let rows: Vec<(TrialResult, CountRow)> = jobs
        .par_iter()
        .map(|&(n, t)| {
            let started = Instant::now();
            let seed = derive_seed(derive_seed(cfg.seed, "counting", n as u64), "trial", t as u64);
            // trial 0 is the all-clique family
            let (f, name, oracle) = if t == 0 {
                (generate(&FamilyGenerator::new(GeneratorKind::AllClique { n, m: None }, seed))?, "all-clique", Some(all_clique_count(n)))
            } else {
                let kind = GeneratorKind::RandomDirac { n, p0: cfg.dirac_p0, m: None, max_rejections: 100_000 };
                (generate(&FamilyGenerator::new(kind, seed))?, "random-dirac", None)
            };
            let count = count_transversals(&f, 10)?;
            let bound = (n as u128).pow(2 * n as u32);
            let row = CountRow {
                family: name.into(),
                n,
                count,
                oracle,
                bound,
                below_bound: count < bound,
                empirical_c: (count as f64).powf(1.0 / (2 * n) as f64) / n as f64,
            };
            let ok = count > 0 && count < bound && oracle.map_or(true, |o| o == count);
            let rec = record(kind, &Row { n, p: None, q: None, trial: t, seed }, started, true, ok, name, count.to_string(), None);
            Ok((rec, row))
        })
        .collect::<Result<Vec<_>>>()?;
    let (results, rows): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok((results, Summary::Counting { rows }))
}

/// Largest `k` a min-degree count allows: `min_i ⌊δ(G_i)/2⌋`.
pub fn packing_ceiling(f: &ColoredFamily) -> usize {
    f.colors().iter().map(|g| g.min_degree() / 2).min().unwrap_or(0)
}

/// Per-transversal witness use plus the `≤ r` count check.
pub fn witness_consumption(f: &ColoredFamily, cert: &HalfSetCertificate, ts: &[Transversal]) -> bool {
    let each = ts.iter().all(|t| {
        t.colored_edges()
            .into_iter()
            .any(|(edge, color)| witness_valid(f, cert, &crate::pipeline::Witness { edge, color }))
    });
    each && ts.len() as u64 <= cert.value
}

fn run_packing(cfg: &ExperimentConfig) -> Result<(Vec<TrialResult>, Summary)> {
    let kind = ExperimentKind::Packing;
    let gen = cfg.family.clone().ok_or_else(|| Error::Precondition("config has no family".into()))?;
    let results_rows: Vec<(TrialResult, PackRow)> = (0..cfg.trials.max(1))
        .into_par_iter()
        .map(|t| {
            let started = Instant::now();
            let seed = derive_seed(cfg.seed, "packing", t as u64);
            let mut g = gen.clone();
            if t > 0 {
                g.seed = derive_seed(gen.seed, "family", t as u64);
            }
            let cfg_t = ExperimentConfig { family: Some(g), ..cfg.clone() };
            let f = cfg_t.base_family()?;
            let cert = exact_cert(&f)?;
            let pk = pack_edge_disjoint(&f, cfg.k, cfg.strategy, cfg.budget)?;
            let mut seen = HashSet::new();
            let edge_disjoint = pk.transversals.iter().flat_map(|t| t.edges()).all(|(u, v)| seen.insert((u.min(v), u.max(v))));
            let valid = pk.transversals.iter().all(|t| crate::transversal::validate_transversal(&f, t).is_ok());
            let wc = cert.as_ref().map(|c| witness_consumption(&f, c, &pk.transversals));
            let row = PackRow {
                n: f.n(),
                requested: cfg.k,
                achieved: pk.transversals.len(),
                ceiling: packing_ceiling(&f),
                r: cert.as_ref().map(|c| c.value),
                budget_hit: pk.budget_hit,
                edge_disjoint,
                witness_consumption: wc,
            };
            let ok = edge_disjoint && valid && wc != Some(false);
            let hashes: Vec<String> = pk.transversals.iter().map(transversal_hash).collect();
            let rec = record(
                kind,
                &Row { n: f.n(), p: None, q: None, trial: t, seed },
                started,
                !pk.budget_hit || pk.transversals.len() >= cfg.k,
                ok,
                match cfg.strategy {
                    PackStrategy::Exact => "exact",
                    PackStrategy::Greedy => "greedy",
                },
                format!("k={} [{}]", pk.transversals.len(), hashes.join(",")),
                wc,
            );
            Ok((rec, row))
        })
        .collect::<Result<Vec<_>>>()?;
    let (results, rows): (Vec<_>, Vec<_>) = results_rows.into_iter().unzip();
    Ok((results, Summary::Packing { rows }))
}

fn run_preservation(cfg: &ExperimentConfig) -> Result<(Vec<TrialResult>, Summary)> {
    check_grid(&cfg.p_grid)?;
    let q_grid = if cfg.q_grid.is_empty() { cfg.p_grid.clone() } else { cfg.q_grid.clone() };
    check_grid(&q_grid)?;
    if q_grid.len() != cfg.p_grid.len() {
        return Err(Error::Precondition("p and q grids differ in length".into()));
    }
    let kind = ExperimentKind::Preservation;
    let f = cfg.base_family()?;
    let n = f.n();
    let opts = AnalysisOptions::default();
    let jobs: Vec<(usize, usize)> = (0..cfg.p_grid.len()).flat_map(|i| (0..cfg.trials).map(move |t| (i, t))).collect();
    let results: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let started = Instant::now();
            let (p, q) = (cfg.p_grid[i], q_grid[i]);
            let seed = derive_seed(derive_seed(cfg.seed, "preservation", i as u64), "trial", t as u64);
            let out = preservation_trial(&f, p, q, cfg.alpha_prime, seed, &opts)?;
            let witness = match out {
                None => "discarded".to_string(),
                Some(true) => "non-extremal".to_string(),
                Some(false) => "extremal".to_string(),
            };
            Ok(record(kind, &Row { n, p: Some(p), q: Some(q), trial: t, seed }, started, out.is_some(), out == Some(true), "exact", witness, None))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = cfg
        .p_grid
        .iter()
        .zip(&q_grid)
        .enumerate()
        .map(|(i, (&p, &q))| {
            let rs = &results[i * cfg.trials..(i + 1) * cfg.trials];
            let decided = rs.iter().filter(|t| t.decided).count();
            let non_extremal = rs.iter().filter(|t| t.success).count();
            PreservationRow {
                p,
                q,
                trials: rs.len(),
                discarded: rs.len() - decided,
                non_extremal,
                frequency: (decided > 0).then(|| non_extremal as f64 / decided as f64),
                interval: (decided > 0).then(|| wilson95(non_extremal as u64, decided as u64)),
            }
        })
        .collect();
    let input_non_extremal = if n <= opts.exact_cap {
        Some(!is_family_extremal(&f, cfg.alpha, Mode::Exact, &opts)?.is_extremal())
    } else {
        None
    };
    let mut complement = Vec::new();
    if n <= cfg.complement_cap {
        for (c, g) in f.colors().iter().enumerate() {
            let chk = complement_sparsity_check(g, complement_alpha_floor(n), cfg.complement_cap)?;
            complement.push(ComplementRow {
                color: c,
                alpha_floor: chk.alpha_floor,
                half_sets: chk.half_sets,
                violations: chk.violations.len(),
                worst_ratio: chk.worst_ratio,
            });
        }
    }
    Ok((results, Summary::Preservation { input_non_extremal, rows, complement }))
}

pub const CSV_HEADER: [&str; 9] = ["experiment", "n", "p", "trial", "seed", "decided", "success", "route", "millis"];

pub fn write_csv(results: &[TrialResult], w: impl std::io::Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(CSV_HEADER).map_err(io)?;
    for t in results {
        let p = t.p.or(t.q).map(|x| x.to_string()).unwrap_or_default();
        out.write_record([
            t.experiment.clone(),
            t.n.to_string(),
            p,
            t.trial.to_string(),
            t.seed.to_string(),
            t.decided.to_string(),
            t.success.to_string(),
            t.route.clone(),
            t.millis.to_string(),
        ])
        .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

/// Whitespace-separated columns for gnuplot.
pub fn gnuplot_data(summary: &Summary) -> Option<String> {
    let Summary::Curve { reference, points, r, threshold_p } = summary else { return None };
    let mut s = String::new();
    let _ = writeln!(s, "# reference: {reference}");
    if let Some(r) = r {
        let _ = writeln!(s, "# r = {r}");
    }
    if let Some(t) = threshold_p {
        let _ = writeln!(s, "# empirical 50% point p = {t:.6}");
    }
    let _ = writeln!(s, "# p frequency lo hi reference witness_frequency decided undecided");
    for c in points {
        let na = |x: Option<f64>| x.map_or("NaN".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            s,
            "{:.6} {} {} {} {:.6} {} {} {}",
            c.p,
            na(c.frequency),
            na(c.interval.map(|i| i.lo)),
            na(c.interval.map(|i| i.hi)),
            c.reference,
            na(c.witness_frequency),
            c.decided,
            c.undecided
        );
    }
    Some(s)
}

#[derive(Serialize, Deserialize)]
struct Header {
    campaign: String,
    experiment: String,
    records: usize,
}

/// Writes `config.json`, `results.csv`, `results.jsonl`, `summary.json` and, for curves, `curve.dat`.
pub fn write_campaign(c: &Campaign, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let config = dir.join("config.json");
    std::fs::write(&config, c.config.to_json())?;
    written.push(config);
    let csv_path = dir.join("results.csv");
    write_csv(&c.results, std::fs::File::create(&csv_path)?)?;
    written.push(csv_path);
    let jsonl = dir.join("results.jsonl");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&jsonl)?);
    let head = Header { campaign: c.campaign_id.clone(), experiment: c.config.kind.name().into(), records: c.results.len() };
    writeln!(w, "{}", serde_json::to_string(&head)?)?;
    for t in &c.results {
        writeln!(w, "{}", serde_json::to_string(t)?)?;
    }
    w.flush()?;
    written.push(jsonl);
    let summary = dir.join("summary.json");
    std::fs::write(&summary, serde_json::to_string_pretty(&c.summary)?)?;
    written.push(summary);
    if let Some(d) = gnuplot_data(&c.summary) {
        let path = dir.join("curve.dat");
        std::fs::write(&path, d)?;
        written.push(path);
    }
    Ok(written)
}

/// Loads a results file, recomputing every record digest.
pub fn load_results(path: &Path) -> Result<(String, Vec<TrialResult>)> {
    let file = BufReader::new(std::fs::File::open(path)?);
    let mut lines = file.lines();
    let head: Header = match lines.next() {
        Some(l) => serde_json::from_str(&l?)?,
        None => return Err(Error::Malformed("empty results file".into())),
    };
    let mut out = Vec::new();
    for (i, l) in lines.enumerate() {
        let l = l?;
        if l.trim().is_empty() {
            continue;
        }
        let t: TrialResult = serde_json::from_str(&l)?;
        if t.compute_digest() != t.digest {
            return Err(Error::Replay(format!("hash mismatch in record {i}")));
        }
        out.push(t);
    }
    if out.len() != head.records {
        return Err(Error::Replay(format!("header lists {} records, file has {}", head.records, out.len())));
    }
    Ok((head.campaign, out))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ReplayVerdict {
    Identical { records: usize },
    DifferentCampaign { expected: String, found: String },
    Diverged { record: usize, detail: String },
}

/// Re-runs `cfg` and compares with stored results.
pub fn replay(cfg: &ExperimentConfig, results: &Path) -> Result<ReplayVerdict> {
    let (stored_id, stored) = load_results(results)?;
    let id = cfg.campaign_id();
    if id != stored_id {
        return Ok(ReplayVerdict::DifferentCampaign { expected: stored_id, found: id });
    }
    let fresh = run_campaign(cfg)?;
    Ok(compare(&stored, &fresh.results))
}

pub fn compare(stored: &[TrialResult], fresh: &[TrialResult]) -> ReplayVerdict {
    if stored.len() != fresh.len() {
        return ReplayVerdict::Diverged { record: stored.len().min(fresh.len()), detail: format!("{} vs {} records", stored.len(), fresh.len()) };
    }
    for (i, (a, b)) in stored.iter().zip(fresh).enumerate() {
        if !a.same_outcome(b) {
            return ReplayVerdict::Diverged { record: i, detail: format!("stored {:?} / rerun {:?}", a.witness, b.witness) };
        }
    }
    ReplayVerdict::Identical { records: stored.len() }
}
