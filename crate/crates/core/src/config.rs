//! Experiment configuration: flat `key = value` text with dotted sections.
//!
//! ```text
//! # market
//! model.r = 0.02
//! model.eta = 0.1            # or a piecewise schedule: 0:0.1, 0.5:0.05
//! info.kind = interval       # exact | interval | union
//! sim.n_paths = 10000
//! ```
//!
//! Blank lines and `#` comments are ignored. Every key is optional, unknown
//! and repeated keys are errors, and every error carries its line number.
//! [`ExperimentConfig::render`] writes a manifest that parses back to the
//! same configuration.

use crate::drift::{InfoKind, InsiderInfo};
use crate::error::{invalid, Error, Result};
use crate::market::{DriftSchedule, MarketParams};
use crate::sim::SimSettings;
use crate::utility::StrategyKind;
use crate::verify::{TableBudgets, DEFAULT_DELTAS};
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfoName {
    Exact,
    Interval,
    Union,
}

impl FromStr for InfoName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(InfoName::Exact),
            "interval" => Ok(InfoName::Interval),
            "union" => Ok(InfoName::Union),
            other => Err(invalid(format!("unknown information kind '{other}' (exact, interval, union)"))),
        }
    }
}

impl std::fmt::Display for InfoName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InfoName::Exact => "exact",
            InfoName::Interval => "interval",
            InfoName::Union => "union",
        })
    }
}

/// The `info.*` section. `c1`, `c2` are kept whatever the kind so the
/// manifest round-trips.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoConfig {
    pub kind: InfoName,
    pub c1: f64,
    pub c2: f64,
}

impl InfoConfig {
    pub fn build(&self, horizon: f64) -> Result<InsiderInfo> {
        let kind = match self.kind {
            InfoName::Exact => InfoKind::ExactTerminal,
            InfoName::Interval => InfoKind::Interval { c1: self.c1, c2: self.c2 },
            InfoName::Union => InfoKind::UnitUnion,
        };
        InsiderInfo::new(kind, horizon)
    }
}

/// Command-specific options, the `run.*` section.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Strategy simulated by `simulate` and valued by `value`.
    pub strategy: StrategyKind,
    /// Paths written out by `simulate` (the ensemble statistics use all of them).
    pub export_paths: usize,
    /// Barrier offset `ε` as a fraction of `S₀`.
    pub epsilon_frac: f64,
    pub leverage: f64,
    /// Draw arbitrage paths on `{G = 1}` only (interval information).
    pub conditioned: bool,
    /// Truncation schedule as fractions of `T`.
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub linear_gammas: Vec<f64>,
    pub drift_x_min: f64,
    pub drift_x_max: f64,
    pub drift_nx: usize,
    pub drift_nt: usize,
    /// Terminal value used for the exact-information drift surface.
    pub b_terminal: f64,
    /// Seeds scanned by `figure-tau` before giving up.
    pub max_seeds: u64,
    pub lemma_points: usize,
    pub union_per_period: usize,
    pub union_t_lo: f64,
    pub union_nt: usize,
    pub mixture_nx: usize,
    pub mixture_nt: usize,
    pub pathwise_steps: usize,
    pub pathwise_levels: usize,
    pub pathwise_paths: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        let budgets = TableBudgets::default();
        RunOptions {
            strategy: StrategyKind::Merton,
            export_paths: 20,
            epsilon_frac: budgets.epsilon_frac,
            leverage: 1.0,
            conditioned: true,
            deltas: DEFAULT_DELTAS.to_vec(),
            gammas: budgets.gammas,
            linear_gammas: budgets.linear_gammas,
            drift_x_min: -3.0,
            drift_x_max: 3.0,
            drift_nx: 121,
            drift_nt: 50,
            b_terminal: 0.0,
            max_seeds: 10_000,
            lemma_points: 50,
            union_per_period: 1000,
            union_t_lo: 0.9,
            union_nt: 50,
            mixture_nx: 100,
            mixture_nt: 100,
            pathwise_steps: 16384,
            pathwise_levels: 4,
            pathwise_paths: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub market: MarketParams,
    pub info: InfoConfig,
    pub sim: SimSettings,
    pub gamma: f64,
    pub run: RunOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            market: MarketParams::reference(),
            info: InfoConfig { kind: InfoName::Interval, c1: -1.0, c2: 1.0 },
            sim: SimSettings::default(),
            gamma: 0.0,
            run: RunOptions::default(),
        }
    }
}

fn parse_num<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse '{value}' as a number"))
}

fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value.split(',').map(|v| parse_num(v.trim())).collect()
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got '{value}'")),
    }
}

/// `0.1` for a constant drift, `0:0.1, 0.5:0.05` for pieces starting at the given times.
fn parse_eta(value: &str) -> std::result::Result<DriftSchedule, String> {
    if !value.contains(':') {
        return Ok(DriftSchedule::constant(parse_num(value)?));
    }
    let mut starts = Vec::new();
    let mut values = Vec::new();
    for piece in value.split(',') {
        let (s, v) = piece.split_once(':').ok_or_else(|| format!("expected start:value, got '{piece}'"))?;
        starts.push(parse_num(s.trim())?);
        values.push(parse_num(v.trim())?);
    }
    DriftSchedule::piecewise(starts, values).map_err(|e| e.to_string())
}

fn render_list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn render_eta(eta: &DriftSchedule) -> String {
    if eta.is_constant() {
        return eta.at(0.0).to_string();
    }
    eta.pieces().map(|(s, v)| format!("{s}:{v}")).collect::<Vec<_>>().join(",")
}

/// Raw model fields, validated together once the whole file is read.
struct ModelFields {
    r: f64,
    eta: DriftSchedule,
    xi: f64,
    horizon: f64,
    s0: f64,
    x0: f64,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let m = &cfg.market;
        let mut model =
            ModelFields { r: m.r, eta: m.eta.clone(), xi: m.xi, horizon: m.horizon, s0: m.s0, x0: m.x0 };
        let mut seen = HashSet::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config { line, msg };
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            cfg.set(&mut model, key, value).map_err(err)?;
        }
        let at_end = |e: Error| Error::Config { line: last_line, msg: e.to_string() };
        cfg.market =
            MarketParams::with_schedule(model.r, model.eta, model.xi, model.horizon, model.s0, model.x0).map_err(at_end)?;
        cfg.validate().map_err(at_end)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn set(&mut self, model: &mut ModelFields, key: &str, value: &str) -> std::result::Result<(), String> {
        let run = &mut self.run;
        match key {
            "model.r" => model.r = parse_num(value)?,
            "model.eta" => model.eta = parse_eta(value)?,
            "model.xi" => model.xi = parse_num(value)?,
            "model.T" => model.horizon = parse_num(value)?,
            "model.s0" => model.s0 = parse_num(value)?,
            "model.x0" => model.x0 = parse_num(value)?,
            "info.kind" => self.info.kind = value.parse().map_err(|e: Error| e.to_string())?,
            "info.c1" => self.info.c1 = parse_num(value)?,
            "info.c2" => self.info.c2 = parse_num(value)?,
            "sim.n_paths" => self.sim.n_paths = parse_num(value)?,
            "sim.n_steps" => self.sim.n_steps = parse_num(value)?,
            "sim.seed" => self.sim.seed = parse_num(value)?,
            "sim.delta_frac" => self.sim.delta_frac = parse_num(value)?,
            "sim.refinement" => self.sim.refinement = value.parse().map_err(|e: Error| e.to_string())?,
            "utility.gamma" => self.gamma = parse_num(value)?,
            "run.strategy" => run.strategy = value.parse().map_err(|e: Error| e.to_string())?,
            "run.export_paths" => run.export_paths = parse_num(value)?,
            "run.epsilon_frac" => run.epsilon_frac = parse_num(value)?,
            "run.leverage" => run.leverage = parse_num(value)?,
            "run.conditioned" => run.conditioned = parse_bool(value)?,
            "run.deltas" => run.deltas = parse_list(value)?,
            "run.gammas" => run.gammas = parse_list(value)?,
            "run.linear_gammas" => run.linear_gammas = parse_list(value)?,
            "run.drift_x_min" => run.drift_x_min = parse_num(value)?,
            "run.drift_x_max" => run.drift_x_max = parse_num(value)?,
            "run.drift_nx" => run.drift_nx = parse_num(value)?,
            "run.drift_nt" => run.drift_nt = parse_num(value)?,
            "run.b_terminal" => run.b_terminal = parse_num(value)?,
            "run.max_seeds" => run.max_seeds = parse_num(value)?,
            "run.lemma_points" => run.lemma_points = parse_num(value)?,
            "run.union_per_period" => run.union_per_period = parse_num(value)?,
            "run.union_t_lo" => run.union_t_lo = parse_num(value)?,
            "run.union_nt" => run.union_nt = parse_num(value)?,
            "run.mixture_nx" => run.mixture_nx = parse_num(value)?,
            "run.mixture_nt" => run.mixture_nt = parse_num(value)?,
            "run.pathwise_steps" => run.pathwise_steps = parse_num(value)?,
            "run.pathwise_levels" => run.pathwise_levels = parse_num(value)?,
            "run.pathwise_paths" => run.pathwise_paths = parse_num(value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Checks everything that does not depend on the command being run.
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.info.build(self.market.horizon)?;
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(invalid(format!("utility.gamma must lie in [0, 1], got {}", self.gamma)));
        }
        let r = &self.run;
        if r.deltas.len() < crate::estimate::MIN_LEVELS || r.deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("run.deltas needs at least 4 strictly decreasing levels"));
        }
        if r.deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return Err(invalid("run.deltas must lie in (0, 1)"));
        }
        if r.drift_nx < 2 || r.drift_nt < 2 || r.drift_x_min >= r.drift_x_max {
            return Err(invalid("drift grid needs two points per axis and x_min < x_max"));
        }
        if !(r.epsilon_frac > 0.0) || !(r.leverage > 0.0) {
            return Err(invalid("run.epsilon_frac and run.leverage must be positive"));
        }
        Ok(())
    }

    /// Applies command-line overrides and revalidates.
    pub fn with_overrides(mut self, seed: Option<u64>, paths: Option<usize>, steps: Option<usize>) -> Result<Self> {
        if let Some(s) = seed {
            self.sim.seed = s;
        }
        if let Some(p) = paths {
            self.sim.n_paths = p;
        }
        if let Some(n) = steps {
            self.sim.n_steps = n;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn info(&self) -> Result<InsiderInfo> {
        self.info.build(self.market.horizon)
    }

    /// Table budgets taken from the simulation and run sections.
    pub fn budgets(&self) -> TableBudgets {
        TableBudgets {
            settings: self.sim.clone(),
            delta_fracs: self.run.deltas.clone(),
            gammas: self.run.gammas.clone(),
            linear_gammas: self.run.linear_gammas.clone(),
            c1: self.info.c1,
            c2: self.info.c2,
            epsilon_frac: self.run.epsilon_frac,
        }
    }

    /// Every key with its value; parses back to an equal configuration.
    pub fn render(&self) -> String {
        let m = &self.market;
        let r = &self.run;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("model.r", m.r.to_string());
        kv("model.eta", render_eta(&m.eta));
        kv("model.xi", m.xi.to_string());
        kv("model.T", m.horizon.to_string());
        kv("model.s0", m.s0.to_string());
        kv("model.x0", m.x0.to_string());
        kv("info.kind", self.info.kind.to_string());
        kv("info.c1", self.info.c1.to_string());
        kv("info.c2", self.info.c2.to_string());
        kv("sim.n_paths", self.sim.n_paths.to_string());
        kv("sim.n_steps", self.sim.n_steps.to_string());
        kv("sim.seed", self.sim.seed.to_string());
        kv("sim.delta_frac", self.sim.delta_frac.to_string());
        kv("sim.refinement", self.sim.refinement.to_string());
        kv("utility.gamma", self.gamma.to_string());
        kv("run.strategy", r.strategy.to_string());
        kv("run.export_paths", r.export_paths.to_string());
        kv("run.epsilon_frac", r.epsilon_frac.to_string());
        kv("run.leverage", r.leverage.to_string());
        kv("run.conditioned", r.conditioned.to_string());
        kv("run.deltas", render_list(&r.deltas));
        kv("run.gammas", render_list(&r.gammas));
        kv("run.linear_gammas", render_list(&r.linear_gammas));
        kv("run.drift_x_min", r.drift_x_min.to_string());
        kv("run.drift_x_max", r.drift_x_max.to_string());
        kv("run.drift_nx", r.drift_nx.to_string());
        kv("run.drift_nt", r.drift_nt.to_string());
        kv("run.b_terminal", r.b_terminal.to_string());
        kv("run.max_seeds", r.max_seeds.to_string());
        kv("run.lemma_points", r.lemma_points.to_string());
        kv("run.union_per_period", r.union_per_period.to_string());
        kv("run.union_t_lo", r.union_t_lo.to_string());
        kv("run.union_nt", r.union_nt.to_string());
        kv("run.mixture_nx", r.mixture_nx.to_string());
        kv("run.mixture_nt", r.mixture_nt.to_string());
        kv("run.pathwise_steps", r.pathwise_steps.to_string());
        kv("run.pathwise_levels", r.pathwise_levels.to_string());
        kv("run.pathwise_paths", r.pathwise_paths.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn comments_and_piecewise_drift() {
        let text = "# header\n\nmodel.eta = 0:0.1, 0.5:0.05  # two pieces\ninfo.kind = union\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.market.eta.at(0.7), 0.05);
        assert_eq!(cfg.info.kind, InfoName::Union);
        assert_eq!(ExperimentConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("model.r = 0.01\n\nmodel.bogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let err = ExperimentConfig::parse("sim.seed = 1\nsim.seed = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = ExperimentConfig::parse("sim.n_steps = many\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        assert!(ExperimentConfig::parse("model.xi = 0\n").is_err());
        assert!(ExperimentConfig::parse("just text\n").is_err());
    }
}
