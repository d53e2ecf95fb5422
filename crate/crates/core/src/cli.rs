//! Batch runner behind the `insider` binary.
//!
//! Every command reads one configuration, writes its outputs atomically into
//! `--out` together with a `manifest.txt` that reproduces the run, and maps
//! its outcome to an exit code: 0 pass, 1 fail, 2 inconclusive, 64 usage error.

use crate::config::{ExperimentConfig, InfoName};
use crate::drift::{alpha_exact, drift_surface, InsiderInfo};
use crate::error::{Error, Result};
use crate::estimate::{fit_line, Estimate};
use crate::gauss::pdf;
use crate::market::asset_paths;
use crate::report::{fmt_real, results_table, write_atomic, Method, ResultRow, Status, Table, Verdict};
use crate::rng::path_rng;
use crate::sim::{sample_conditioned, sample_joint, try_run_paths};
use crate::strategies::{
    arbitrage_strategy_interval, arbitrage_strategy_semiinfinite, classify_admissibility, ArbitrageRun,
};
use crate::utility::{
    divergence_diagnostic, insider_utility_trends, insider_value_log, mc_expected_utility, merton_value,
    utility, value_of_information, DiagnosticCase, StrategyKind, UtilitySpec,
};
use crate::verify::{
    alpha_sq_bound_check, classification_table, lemma_i_profile, lemma_i_trapezoid, mixture_zero_sup,
    novikov_estimate, novikov_verdict, pathwise_rms, union_alpha_bound, union_grids, ArbitrageCheck, CHECKS,
    UNION_ALPHA_BOUND, UNION_NUMERATOR_BOUND,
};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};

/// Exit code for malformed invocations and configurations.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "insider", version, about = "Optimal portfolios and arbitrage under initially enlarged filtrations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (flat key = value); defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides sim.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides sim.n_paths.
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Overrides sim.n_steps.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asset paths and wealth ensembles for run.strategy.
    Simulate,
    /// Drift surface α^g(x, t) with conditional masses.
    Drift,
    /// Closed-form, quadrature and Monte Carlo values side by side.
    Value,
    /// Stopping-time arbitrage report.
    Arbitrage,
    /// One named numerical check.
    Verify { check: String },
    /// Finite/diverging classification table with arbitrage flags.
    Table1,
    /// One triggered stopping-time path for plotting.
    FigureTau,
}

/// Failures split by whether the invocation itself was at fault.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Run(_) => Status::Fail.exit_code(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Run(e) => write!(f, "error: {e}"),
        }
    }
}

type CmdResult = std::result::Result<Status, Failure>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(&cli) {
        Ok(status) => {
            println!("status={}", status.tag());
            status.exit_code()
        }
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

pub fn load_config(cli: &Cli) -> std::result::Result<ExperimentConfig, Failure> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| match e {
            Error::Io(io) => Failure::Usage(format!("cannot read {}: {io}", p.display())),
            other => Failure::from(other),
        })?,
        None => ExperimentConfig::default(),
    };
    cfg.with_overrides(cli.seed, cli.paths, cli.steps).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn run(cli: &Cli) -> CmdResult {
    let cfg = load_config(cli)?;
    if let Command::Verify { check } = &cli.command {
        if !CHECKS.contains(&check.as_str()) {
            return Err(Failure::Usage(format!("unknown check '{check}' (one of {})", CHECKS.join(", "))));
        }
    }
    let out = cli.out.as_path();
    write_atomic(&out.join("manifest.txt"), cfg.render().as_bytes())?;
    match &cli.command {
        Command::Simulate => cmd_simulate(&cfg, out),
        Command::Drift => cmd_drift(&cfg, out),
        Command::Value => cmd_value(&cfg, out),
        Command::Arbitrage => cmd_arbitrage(&cfg, out),
        Command::Verify { check } => cmd_verify(&cfg, check, out),
        Command::Table1 => cmd_table1(&cfg, out),
        Command::FigureTau => cmd_figure_tau(&cfg, out),
    }
}

fn written(path: &Path) {
    println!("wrote {}", path.display());
}

fn write_table(table: &Table, path: PathBuf) -> Result<()> {
    table.write(&path)?;
    written(&path);
    Ok(())
}

fn write_verdict(verdict: &Verdict, out: &Path) -> Result<()> {
    let path = out.join(format!("verdict_{}.txt", verdict.check));
    write_atomic(&path, verdict.render().as_bytes())?;
    written(&path);
    Ok(())
}

fn simulation_info(cfg: &ExperimentConfig) -> Result<Option<InsiderInfo>> {
    Ok(match cfg.run.strategy {
        StrategyKind::Insider => Some(cfg.info()?),
        _ => None,
    })
}

/// Per-path data kept for export.
struct PathRecord {
    t: Vec<f64>,
    b: Vec<f64>,
    s: Vec<f64>,
    d: Vec<f64>,
    x: Vec<f64>,
    pi: Vec<f64>,
    admissibility: &'static str,
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> CmdResult {
    let params = &cfg.market;
    let kind = cfg.run.strategy;
    let info = simulation_info(cfg)?;
    let spec = UtilitySpec::new(cfg.gamma)?;
    let settings = &cfg.sim;
    let export = cfg.run.export_paths.min(settings.n_paths);
    let runs = try_run_paths(settings.n_paths, settings.seed, |i, rng| {
        let w = crate::utility::simulate_strategy(kind, info.as_ref(), params, spec.gamma, settings, rng)?;
        let terminal = utility(spec, params.x0 * w.log_wealth.last().unwrap().exp())?;
        if (i as usize) >= export {
            return Ok((terminal, None));
        }
        let assets = asset_paths(params, &w.path)?;
        let x: Vec<f64> = w.log_wealth.iter().map(|l| params.x0 * l.exp()).collect();
        let admissibility = classify_admissibility(&x, params.x0).class.tag();
        Ok((
            terminal,
            Some(PathRecord {
                t: w.grid.nodes().to_vec(),
                b: w.path.values,
                s: assets.stock,
                d: assets.bond,
                x,
                pi: w.pi,
                admissibility,
            }),
        ))
    })?;

    let mut paths = Table::new(&["path_id", "t", "B", "S", "D"]);
    let mut wealth = Table::new(&["path_id", "t", "X", "pi", "admissibility"]);
    for (id, rec) in runs.iter().enumerate().filter_map(|(i, r)| r.1.as_ref().map(|p| (i, p))) {
        for j in 0..rec.t.len() {
            let id = id.to_string();
            paths.push(vec![id.clone(), fmt_real(rec.t[j]), fmt_real(rec.b[j]), fmt_real(rec.s[j]), fmt_real(rec.d[j])]);
            let pi = rec.pi.get(j).copied().unwrap_or(f64::NAN);
            wealth.push(vec![id, fmt_real(rec.t[j]), fmt_real(rec.x[j]), fmt_real(pi), rec.admissibility.into()]);
        }
    }
    write_table(&paths, out.join("paths.csv"))?;
    write_table(&wealth, out.join("wealth.csv"))?;

    let samples: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let case = match &info {
        Some(i) => format!("{kind}_{}", i.name()),
        None => kind.to_string(),
    };
    let row = ResultRow { case, gamma: cfg.gamma, method: Method::MonteCarlo, estimate: Estimate::from_samples(&samples) };
    write_table(&results_table(&[row]), out.join("summary.csv"))?;
    Ok(Status::Pass)
}

pub fn cmd_drift(cfg: &ExperimentConfig, out: &Path) -> CmdResult {
    let info = cfg.info()?;
    let r = &cfg.run;
    let horizon = info.horizon;
    let end = horizon * (1.0 - cfg.sim.delta_frac);
    let ts: Vec<f64> = (0..r.drift_nt).map(|i| end * i as f64 / (r.drift_nt - 1) as f64).collect();
    let xs: Vec<f64> = (0..r.drift_nx)
        .map(|j| r.drift_x_min + (r.drift_x_max - r.drift_x_min) * j as f64 / (r.drift_nx - 1) as f64)
        .collect();
    let mut table = Table::new(&["t", "x", "g", "alpha", "mass"]);
    if info.is_indicator() {
        for p in drift_surface(&info, &ts, &xs)? {
            table.push(vec![fmt_real(p.t), fmt_real(p.x), p.g.to_string(), fmt_real(p.alpha), fmt_real(p.mass)]);
        }
    } else {
        // exact information: g is the terminal value and mass its transition density
        let b = r.b_terminal;
        for &t in &ts {
            let sd = (horizon - t).sqrt();
            for &x in &xs {
                let alpha = alpha_exact(b, x, t, horizon)?;
                let density = pdf((b - x) / sd) / sd;
                table.push(vec![fmt_real(t), fmt_real(x), fmt_real(b), fmt_real(alpha), fmt_real(density)]);
            }
        }
    }
    write_table(&table, out.join("drift.csv"))?;
    Ok(Status::Pass)
}

pub fn cmd_value(cfg: &ExperimentConfig, out: &Path) -> CmdResult {
    let params = &cfg.market;
    let info = cfg.info()?;
    let gamma = cfg.gamma;
    let settings = &cfg.sim;
    let mut rows = Vec::new();
    let row = |case: &str, method, estimate| ResultRow { case: case.into(), gamma, method, estimate };

    if gamma < 1.0 {
        let spec = UtilitySpec::new(gamma)?;
        rows.push(row("merton", Method::ClosedForm, Estimate::exact(merton_value(params, spec)?)));
        rows.push(row("merton", Method::MonteCarlo, mc_expected_utility(StrategyKind::Merton, None, params, spec, settings)?));
    } else {
        let gammas = cfg.run.linear_gammas.clone();
        rows.push(row("merton", Method::ClosedForm, divergence_diagnostic(&DiagnosticCase::LinearUtility { gammas }, params)?));
    }

    let case = format!("insider_{}", info.name());
    if info.is_indicator() && gamma == 0.0 {
        rows.push(row(&format!("information_{}", info.name()), Method::Quadrature, value_of_information(&info)?));
        rows.push(row(&case, Method::Quadrature, insider_value_log(&info, params)?));
        rows.push(row(&case, Method::MonteCarlo, mc_expected_utility(StrategyKind::Insider, Some(&info), params, UtilitySpec::log(), settings)?));
    } else if !info.is_indicator() && gamma == 0.0 {
        let deltas = cfg.run.deltas.clone();
        rows.push(row(&case, Method::ClosedForm, divergence_diagnostic(&DiagnosticCase::Example1Log { delta_fracs: deltas }, params)?));
    }
    if gamma < 1.0 {
        let trend = insider_utility_trends(&info, params, &[gamma], &cfg.run.deltas, settings)?.remove(0);
        rows.push(row(&format!("{case}_truncated"), Method::MonteCarlo, Estimate::from_trend(trend, settings.n_paths)));
    }
    write_table(&results_table(&rows), out.join("results.csv"))?;
    Ok(Status::Pass)
}

pub fn cmd_arbitrage(cfg: &ExperimentConfig, out: &Path) -> CmdResult {
    let params = &cfg.market;
    let info = cfg.info()?;
    let settings = &cfg.sim;
    let epsilon = cfg.run.epsilon_frac * params.s0;
    let leverage = cfg.run.leverage;
    let grid = settings.full_grid(params.horizon)?;
    let bond = params.x0 * (params.r * params.horizon).exp();
    let (c1, strategy) = match cfg.info.kind {
        InfoName::Exact => (0.0, "semi_infinite"),
        InfoName::Interval => (cfg.info.c1, "interval_barrier"),
        InfoName::Union => {
            return Err(Failure::Usage("no stopping-time arbitrage is constructed for the union information".into()))
        }
    };
    let runs: Vec<Option<ArbitrageRun>> = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = match cfg.info.kind {
            InfoName::Interval if cfg.run.conditioned => sample_conditioned(&info, 1, &grid, rng)?,
            _ => sample_joint(&info, &grid, rng)?,
        };
        let paths = asset_paths(params, &draw.path)?;
        match cfg.info.kind {
            InfoName::Exact => Ok(Some(arbitrage_strategy_semiinfinite(params, draw.b_terminal, &paths, epsilon)?)),
            _ if draw.g == 0.0 => Ok(None),
            _ => Ok(Some(arbitrage_strategy_interval(params, c1, draw.b_terminal, &paths, epsilon, leverage)?)),
        }
    })?;
    let mut table = Table::new(&["path_id", "tau", "triggered", "X_T"]);
    let mut summary = Vec::with_capacity(runs.len());
    for (i, run) in runs.iter().enumerate() {
        let (tau, triggered, x_t, hplus) = match run {
            Some(r) => (
                r.rule.realized.map(|(_, t)| t).unwrap_or(f64::NAN),
                r.rule.triggered(),
                r.terminal_wealth,
                r.wealth.admissibility.in_hplus(),
            ),
            None => (f64::NAN, false, bond, true),
        };
        table.push(vec![i.to_string(), fmt_real(tau), (triggered as u8).to_string(), fmt_real(x_t)]);
        summary.push((x_t, hplus, triggered));
    }
    write_table(&table, out.join("stopping.csv"))?;
    let check = ArbitrageCheck::from_runs(strategy, &summary, bond);
    let status = Status::from_bool(check.detected() && (leverage > 1.0 || check.all_hplus));
    let verdict = Verdict::new("arbitrage", status, check.min_excess, -crate::verify::DOMINANCE_TOL)
        .with("strategy", strategy)
        .with("strict_fraction", fmt_real(check.strict_fraction))
        .with("all_hplus", check.all_hplus)
        .with("triggered", check.triggered)
        .with("n", check.n);
    write_verdict(&verdict, out)?;
    Ok(status)
}

pub fn cmd_verify(cfg: &ExperimentConfig, check: &str, out: &Path) -> CmdResult {
    let verdict = verify_check(cfg, check)?;
    write_verdict(&verdict, out)?;
    Ok(verdict.status)
}

/// Runs one of [`CHECKS`] with the configured budgets.
pub fn verify_check(cfg: &ExperimentConfig, check: &str) -> std::result::Result<Verdict, Failure> {
    let params = &cfg.market;
    let horizon = params.horizon;
    let r = &cfg.run;
    let verdict = match check {
        "lemma_I" => {
            let (c1, c2) = (cfg.info.c1, cfg.info.c2);
            let profile = lemma_i_profile(c1, c2, horizon, r.lemma_points)?;
            let mid = 0.5 * horizon;
            let quad = crate::verify::lemma_i_integral(c1, c2, horizon, mid)?.value;
            let trap = lemma_i_trapezoid(c1, c2, horizon, mid, -50.0, 50.0, 1_000_000)?;
            let diff = (quad - trap).abs();
            let finite = profile.values.iter().all(|v| v.is_finite());
            let mut v = Verdict::new("lemma_I", Status::from_bool(finite && diff <= 1e-6), diff, 1e-6)
                .with("sup", fmt_real(profile.sup))
                .with("quadrature_mid", fmt_real(quad))
                .with("trapezoid_mid", fmt_real(trap));
            v.schedule = json!({ "times": profile.times, "values": profile.values }).to_string();
            v
        }
        "alpha_sq_bound" => {
            let info = cfg.info()?;
            let n = r.lemma_points;
            let times: Vec<f64> = (1..=n).map(|i| horizon * i as f64 / (n + 1) as f64).collect();
            let bound = alpha_sq_bound_check(&info, &times)?;
            // the bound must hold with the same K near both ends, so the
            // ratio may not keep growing toward T
            let tail = &bound.ratios[bound.ratios.len() - 3..];
            let growing = tail.windows(2).all(|w| w[1] > w[0] * 1.05);
            let finite_value = bound.half_integral.as_ref().map(|e| e.value.is_finite()).unwrap_or(false);
            let status = Status::from_bool(bound.k.is_finite() && !growing && finite_value);
            let mut v = Verdict::new("alpha_sq_bound", status, bound.k, f64::INFINITY).with("info", info.name());
            if let Some(h) = &bound.half_integral {
                v = v.with("half_integral", fmt_real(h.value));
            }
            v.schedule = json!({ "times": bound.times, "ratios": bound.ratios }).to_string();
            v
        }
        "novikov" => novikov_verdict(&novikov_estimate(&cfg.info()?, &r.deltas, &cfg.sim)?),
        "union_alpha_bound" => {
            let (xs, ts) = union_grids(horizon, r.union_per_period, r.union_t_lo, cfg.sim.delta_frac, r.union_nt);
            let b = union_alpha_bound(horizon, &xs, &ts)?;
            let threshold = UNION_ALPHA_BOUND + 1e-6;
            let ok = b.sup_alpha <= threshold && b.sup_numerator <= UNION_NUMERATOR_BOUND;
            Verdict::new("union_alpha_bound", Status::from_bool(ok), b.sup_alpha, threshold)
                .with("sup_numerator", fmt_real(b.sup_numerator))
                .with("argmax_x", fmt_real(b.argmax.0))
                .with("argmax_t", fmt_real(b.argmax.1))
                .with("points", b.points)
        }
        "pathwise_identity" => {
            let res = pathwise_rms(params, cfg.sim.delta_frac.max(1e-3), r.pathwise_steps, r.pathwise_levels, r.pathwise_paths, cfg.sim.seed)?;
            // residual ∝ Δt^p: fit p on the finest-first levels
            let xs: Vec<f64> = res.steps.iter().map(|&n| -(n as f64).ln()).collect();
            let ys: Vec<f64> = res.residuals.iter().map(|r| r.ln()).collect();
            let (order, _) = fit_line(&xs, &ys);
            let shrinking = res.residuals.windows(2).all(|w| w[0] < w[1]);
            let mut v = Verdict::new("pathwise_identity", Status::from_bool(shrinking && order >= 0.4), order, 0.4)
                .with("finest_rms", fmt_real(res.residuals[0]));
            v.schedule = json!({ "steps": res.steps, "rms_residual": res.residuals }).to_string();
            v
        }
        "mixture_zero" => {
            let mut sup: f64 = 0.0;
            for info in [InsiderInfo::interval(cfg.info.c1, cfg.info.c2, horizon)?, InsiderInfo::unit_union(horizon)?] {
                sup = sup.max(mixture_zero_sup(&info, r.mixture_nx, r.mixture_nt, cfg.sim.delta_frac)?);
            }
            Verdict::new("mixture_zero", Status::from_bool(sup <= 1e-10), sup, 1e-10)
                .with("points", r.mixture_nx * r.mixture_nt)
        }
        other => return Err(Failure::Usage(format!("unknown check '{other}'"))),
    };
    Ok(verdict)
}

pub fn cmd_table1(cfg: &ExperimentConfig, out: &Path) -> CmdResult {
    let table = classification_table(&cfg.market, &cfg.budgets())?;
    write_table(&table.to_table(), out.join("table1.csv"))?;
    let status = table.status();
    let mut v = Verdict::new("table1", status, table.rows.iter().filter(|r| r.status() != Status::Pass).count() as f64, 0.0);
    for row in &table.rows {
        v = v.with(&format!("row_{}", row.filtration), row.status().tag());
    }
    write_verdict(&v, out)?;
    Ok(status)
}

pub fn cmd_figure_tau(cfg: &ExperimentConfig, out: &Path) -> CmdResult {
    if cfg.info.kind != InfoName::Exact {
        return Err(Failure::Usage("figure-tau needs info.kind = exact".into()));
    }
    let params = &cfg.market;
    let info = cfg.info()?;
    let grid = cfg.sim.full_grid(params.horizon)?;
    let epsilon = cfg.run.epsilon_frac * params.s0;
    for seed in cfg.sim.seed..cfg.sim.seed.saturating_add(cfg.run.max_seeds) {
        let draw = sample_joint(&info, &grid, &mut path_rng(seed, 0))?;
        let paths = asset_paths(params, &draw.path)?;
        let run = arbitrage_strategy_semiinfinite(params, draw.b_terminal, &paths, epsilon)?;
        let Some((k, tau)) = run.rule.realized else { continue };
        let s_terminal = *paths.stock.last().unwrap();
        let mut table = Table::new(&["t", "S", "barrier", "triggered_at"]);
        for (i, &t) in grid.nodes().iter().enumerate() {
            table.push(vec![
                fmt_real(t),
                fmt_real(paths.stock[i]),
                fmt_real(run.rule.barrier(params, s_terminal, t)),
                ((i == k) as u8).to_string(),
            ]);
        }
        write_table(&table, out.join("figure_tau.csv"))?;
        let v = Verdict::new("figure_tau", Status::Pass, tau, params.horizon).with("seed", seed);
        write_verdict(&v, out)?;
        return Ok(Status::Pass);
    }
    let v = Verdict::new("figure_tau", Status::Fail, f64::NAN, params.horizon).with("seeds_scanned", cfg.run.max_seeds);
    write_verdict(&v, out)?;
    eprintln!("no triggered path within {} seeds", cfg.run.max_seeds);
    Ok(Status::Fail)
}
