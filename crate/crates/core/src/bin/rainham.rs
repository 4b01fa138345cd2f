use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rainham::exact::{self, PackStrategy, SearchOutcome};
use rainham::extremal::{self, AnalysisOptions, Mode};
use rainham::family::{generate, validate_family, FamilyGenerator};
use rainham::harness::{self, ExperimentConfig, ExperimentKind};
use rainham::pipeline::{self, PipelineParams, RouteRequest};
use rainham::posa::robust_hamilton;
use rainham::spread::{estimate_spread, stratified_probes};
use rainham::{validate_transversal, ColoredFamily, Error, Result};

#[derive(Parser)]
#[command(name = "rainham", version, about = "Transversal Hamilton cycles in Dirac graph families")]
struct Cli {
    /// Master seed; overrides the config's seed when given.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pipeline parameter preset.
    #[arg(long, global = true, default_value = "desk")]
    preset: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Family file (canonical JSON).
    #[arg(long, conflicts_with = "gen")]
    family: Option<PathBuf>,
    /// Generator spec, e.g. '{"kind":"all-clique","n":8}'.
    #[arg(long)]
    gen: Option<String>,
}

impl FamilyArgs {
    fn load(&self) -> Result<ColoredFamily> {
        match (&self.family, &self.gen) {
            (Some(p), _) => ColoredFamily::read(p),
            (None, Some(g)) => generate(&serde_json::from_str::<FamilyGenerator>(g)?),
            (None, None) => Err(Error::Precondition("pass --family FILE or --gen SPEC".into())),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Dirac audit, extremality, r(G) and the exceptional verdict.
    Analyze {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = extremal::DEFAULT_TAU)]
        tau: f64,
    },
    /// Exact search for a transversal (or a transversal path with --path U V).
    Solve {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = exact::DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        path: Option<Vec<usize>>,
    },
    /// Exact transversal count, or a counting campaign with --config.
    Count {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 10)]
        cap: usize,
    },
    /// Edge-disjoint transversal packing, or a packing campaign with --config.
    Pack {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "exact")]
        strategy: String,
        #[arg(long, default_value_t = exact::DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Randomized transversal; with --trials > 1 also a spread probe report.
    Sample {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value = "auto")]
        route: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 1000)]
        singles: usize,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Hamilton cycle through a forced matching in color 0 of the family.
    RobustHam {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Forced edges as "u-v,u-v".
        #[arg(long, default_value = "")]
        forced: String,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
    },
    /// Threshold campaign (kind from the config; default threshold-shared).
    Threshold {
        #[arg(long)]
        kind: Option<String>,
    },
    /// Property-preservation campaign.
    Preserve,
    /// Re-run a stored campaign and compare records.
    Replay {
        #[arg(long)]
        results: PathBuf,
    },
}

fn emit<T: Serialize>(v: &T) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn mode(s: &str) -> Result<Mode> {
    match s {
        "exact" => Ok(Mode::Exact),
        "heuristic" => Ok(Mode::Heuristic),
        _ => Err(Error::Precondition(format!("unknown mode '{s}'"))),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Precondition("this command needs --config FILE".into()))?;
    let mut cfg = ExperimentConfig::read(path)?;
    if let Some(o) = &cli.out {
        cfg.out = Some(o.display().to_string());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn campaign(cfg: &ExperimentConfig) -> Result<()> {
    let c = harness::run_campaign(cfg)?;
    if let Some(dir) = &cfg.out {
        let files = harness::write_campaign(&c, Path::new(dir))?;
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    emit(&serde_json::json!({ "campaign": c.campaign_id, "records": c.results.len(), "summary": c.summary }))
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let opts = AnalysisOptions { seed, ..AnalysisOptions::default() };
    match &cli.cmd {
        Cmd::Analyze { fam, alpha, mode: m, tau } => {
            let f = fam.load()?;
            let m = mode(m)?;
            let ext = extremal::is_family_extremal(&f, *alpha, m, &opts)?;
            let r = extremal::compute_r(&f, m, &opts)?;
            let exceptional = r.value as f64 <= tau * (f.n() * f.n()) as f64;
            emit(&serde_json::json!({
                "family": validate_family(&f),
                "extremality": ext,
                "r": r,
                "tau": tau,
                "exceptional": exceptional,
            }))
        }
        Cmd::Solve { fam, budget, path } => {
            let f = fam.load()?;
            let res = match path {
                Some(p) => exact::find_transversal_path(&f, p[0], p[1], *budget)?,
                None => exact::find_transversal(&f, *budget)?,
            };
            let (status, t) = match &res.outcome {
                SearchOutcome::Found(t) => ("found", Some(t)),
                SearchOutcome::NoneExists => ("none", None),
                SearchOutcome::BudgetExhausted => ("budget-exhausted", None),
            };
            emit(&serde_json::json!({ "outcome": status, "nodes": res.nodes, "transversal": t }))
        }
        Cmd::Count { fam, cap } => {
            if cli.config.is_some() {
                let cfg = load_config(&cli)?;
                return campaign(&ExperimentConfig { kind: ExperimentKind::Counting, ..cfg });
            }
            let f = fam.load()?;
            let count = exact::count_transversals(&f, *cap)?;
            let bound = (f.n() as u128).checked_pow(2 * f.n() as u32);
            emit(&serde_json::json!({
                "n": f.n(),
                "count": count.to_string(),
                "below_n_2n": bound.map(|b| count < b),
            }))
        }
        Cmd::Pack { fam, k, strategy, budget } => {
            if cli.config.is_some() {
                let cfg = load_config(&cli)?;
                return campaign(&ExperimentConfig { kind: ExperimentKind::Packing, ..cfg });
            }
            let f = fam.load()?;
            let strategy: PackStrategy = serde_json::from_value(serde_json::Value::String(strategy.clone()))?;
            let pk = exact::pack_edge_disjoint(&f, *k, strategy, *budget)?;
            emit(&serde_json::json!({
                "achieved": pk.transversals.len(),
                "ceiling": harness::packing_ceiling(&f),
                "budget_hit": pk.budget_hit,
                "transversals": pk.transversals,
            }))
        }
        Cmd::Sample { fam, route, trials, singles, pairs } => {
            let f = fam.load()?;
            let params = PipelineParams::preset(&cli.preset)
                .ok_or_else(|| Error::Precondition(format!("unknown preset '{}'", cli.preset)))?;
            let req: RouteRequest = route.parse()?;
            let out = pipeline::sample_transversal_route(&f, &params, req, seed)?;
            validate_transversal(&f, &out.transversal).map_err(|e| Error::Inconsistent(e.to_string()))?;
            if *trials <= 1 {
                return emit(&out);
            }
            let sampler = |s: u64| pipeline::sample_transversal_route(&f, &params, req, s).map(|o| o.transversal);
            let probes = stratified_probes(&f, *singles, *pairs, seed);
            let sp = estimate_spread(&sampler, &probes, *trials, seed)?;
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let mut w = csv::Writer::from_path(dir.join("spread.csv")).map_err(|e| Error::Io(e.to_string()))?;
                w.write_record(["set", "size", "hits", "trials", "frequency", "lo", "hi", "implied_q"]).map_err(|e| Error::Io(e.to_string()))?;
                for p in &sp.probes {
                    let set: Vec<String> = p.set.iter().map(|(u, v, c)| format!("{u}-{v}:{c}")).collect();
                    let iv = p.interval.expect("sampled probes carry intervals");
                    w.write_record([
                        set.join(" "),
                        p.set.len().to_string(),
                        p.hits.to_string(),
                        sp.trials.to_string(),
                        p.frequency.to_string(),
                        iv.lo.to_string(),
                        iv.hi.to_string(),
                        p.implied_q.to_string(),
                    ])
                    .map_err(|e| Error::Io(e.to_string()))?;
                }
                w.flush()?;
            }
            emit(&serde_json::json!({
                "first": out,
                "trials": sp.trials,
                "failures": sp.failures,
                "probes": sp.probes.len(),
                "q_hat_lower_bound": sp.q_hat,
                "q_hat_upper_interval": sp.q_hat_upper,
                "max_singleton": sp.max_singleton(),
            }))
        }
        Cmd::RobustHam { fam, forced, restarts } => {
            let f = fam.load()?;
            let m: Vec<(usize, usize)> = forced
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    let (a, b) = s.trim().split_once('-').ok_or_else(|| Error::Precondition(format!("bad edge '{s}'")))?;
                    let p = |x: &str| x.parse::<usize>().map_err(|_| Error::Precondition(format!("bad vertex '{x}'")));
                    Ok((p(a)?, p(b)?))
                })
                .collect::<Result<_>>()?;
            let cycle = robust_hamilton(f.color(0), &m, *restarts, seed).map_err(Error::from)?;
            emit(&serde_json::json!({ "cycle": cycle }))
        }
        Cmd::Threshold { kind } => {
            let mut cfg = load_config(&cli)?;
            if let Some(k) = kind {
                cfg.kind = k.parse()?;
            }
            if !matches!(
                cfg.kind,
                ExperimentKind::ThresholdShared | ExperimentKind::ThresholdIndependent | ExperimentKind::ThresholdDistinctFamilies
            ) {
                return Err(Error::Precondition(format!("'{}' is not a threshold experiment", cfg.kind.name())));
            }
            campaign(&cfg)
        }
        Cmd::Preserve => {
            let cfg = load_config(&cli)?;
            campaign(&ExperimentConfig { kind: ExperimentKind::Preservation, ..cfg })
        }
        Cmd::Replay { results } => {
            let cfg = load_config(&cli)?;
            let v = harness::replay(&cfg, results)?;
            emit(&v)?;
            match v {
                harness::ReplayVerdict::Identical { .. } => Ok(()),
                harness::ReplayVerdict::DifferentCampaign { .. } => Err(Error::Replay("different campaign".into())),
                harness::ReplayVerdict::Diverged { record, .. } => Err(Error::Replay(format!("record {record} differs"))),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
