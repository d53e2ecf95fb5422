//! Numerical checks of the analytic claims: the uniform bound on `∫I(x,t)dx`,
//! the `K/sqrt(t(T-t))` moment bound, Novikov estimates, the union drift
//! bound, the pathwise log-wealth decomposition and the finiteness table.

use crate::drift::{alpha_indicator, alpha_on_path, in_unit_union, log_alpha_sq_mixture, InsiderInfo};
use crate::error::{invalid, Error, Result};
use crate::estimate::{classify_trend, Estimate, Trend, TrendClass};
use crate::market::{asset_paths, make_grid, sample_bridge_with, BrownianPath, MarketParams, Refinement};
use crate::quad::{integrate_with_breaks, QuadResult, Tolerance};
use crate::report::{fmt_real, Status, Table, Verdict};
use crate::sim::{sample_joint, try_run_paths, SimSettings};
use crate::strategies::{arbitrage_strategy_interval, arbitrage_strategy_semiinfinite, log_wealth_fraction};
use crate::utility::{
    crra_functional_trends, divergence_diagnostic, expected_alpha_sq, merton_value, novikov_trend,
    optimal_fractions, simulate_strategy, truncated_alpha_sq_integral, value_of_information, DiagnosticCase,
    StrategyKind, UtilitySpec,
};
use crate::rng::aux_rng;
use serde_json::json;

/// Default truncation schedule, as fractions of `T`.
pub const DEFAULT_DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

fn check_open_time(t: f64, horizon: f64) -> Result<()> {
    if !(t > 0.0 && t < horizon) {
        return Err(Error::TimeOutOfRange { t, range: format!("(0, {horizon})") });
    }
    Ok(())
}

/// `I(x, t) = [φ(z₁) - φ(z₂)]² / (sqrt(T-t) · P(1|x) · P(0|x))` for the interval indicator.
pub fn lemma_integrand(info: &InsiderInfo, x: f64, t: f64) -> Result<f64> {
    Ok(log_alpha_sq_mixture(info, x, t)?.exp() * (info.horizon - t).sqrt())
}

/// Standardized reach of the `x`-integration on each side of the interval.
const LEMMA_REACH: f64 = 40.0;

/// `∫_ℝ I(x, t) dx`, split at `c₁` and `c₂`, absolute tolerance `1e-8`.
pub fn lemma_i_integral(c1: f64, c2: f64, horizon: f64, t: f64) -> Result<QuadResult> {
    check_open_time(t, horizon)?;
    let info = InsiderInfo::interval(c1, c2, horizon)?;
    let sigma = (horizon - t).sqrt();
    let r = integrate_with_breaks(
        |x| lemma_integrand(&info, x, t).unwrap_or(f64::NAN),
        c1 - LEMMA_REACH * sigma,
        c2 + LEMMA_REACH * sigma,
        &[c1, c2],
        Tolerance::absolute(1e-8),
    );
    if !r.value.is_finite() {
        return Err(invalid(format!("lemma integral is not finite at t = {t}")));
    }
    Ok(r)
}

/// Trapezoid rule for `∫ I(x, t) dx` over `[lo, hi]` with `n` points.
pub fn lemma_i_trapezoid(c1: f64, c2: f64, horizon: f64, t: f64, lo: f64, hi: f64, n: usize) -> Result<f64> {
    check_open_time(t, horizon)?;
    let info = InsiderInfo::interval(c1, c2, horizon)?;
    let h = (hi - lo) / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * lemma_integrand(&info, lo + h * i as f64, t)?;
    }
    Ok(acc * h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Empirical uniform bound over the grid.
    pub sup: f64,
}

/// The lemma integral on `n` interior points of `(0, T)`.
pub fn lemma_i_profile(c1: f64, c2: f64, horizon: f64, n: usize) -> Result<LemmaReport> {
    let times: Vec<f64> = (1..=n).map(|i| horizon * i as f64 / (n + 1) as f64).collect();
    let values = times.iter().map(|&t| Ok(lemma_i_integral(c1, c2, horizon, t)?.value)).collect::<Result<Vec<_>>>()?;
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LemmaReport { times, values, sup })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentBound {
    pub times: Vec<f64>,
    /// `E[α_t²] · sqrt(t(T - t))` per time.
    pub ratios: Vec<f64>,
    /// Smallest `K` that works on the grid.
    pub k: f64,
    /// `½∫E[α²]dt` when the information is an indicator.
    pub half_integral: Option<Estimate>,
}

/// Fits the smallest `K` with `E[α_t²] ≤ K / sqrt(t(T-t))` on `times`.
pub fn alpha_sq_bound_check(info: &InsiderInfo, times: &[f64]) -> Result<MomentBound> {
    let horizon = info.horizon;
    let ratios = times
        .iter()
        .map(|&t| Ok(expected_alpha_sq(info, t)? * (t * (horizon - t)).sqrt()))
        .collect::<Result<Vec<f64>>>()?;
    let k = ratios.iter().copied().fold(0.0, f64::max);
    let half_integral = if info.is_indicator() { Some(value_of_information(info)?) } else { None };
    Ok(MomentBound { times: times.to_vec(), ratios, k, half_integral })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NovikovReport {
    pub info: String,
    pub trend: Trend,
    pub class: TrendClass,
    /// Largest sample over the sample mean, per level.
    pub max_mean_ratio: Vec<f64>,
    pub estimate: Estimate,
}

/// Monte Carlo `E[exp(½∫_0^{T-δ}(α^G)²dt)]` along the schedule, classified
/// finite (stabilized), diverging (monotone growth) or inconclusive.
pub fn novikov_estimate(info: &InsiderInfo, delta_fracs: &[f64], settings: &SimSettings) -> Result<NovikovReport> {
    let (trend, max_mean_ratio) = novikov_trend(info, delta_fracs, settings)?;
    let class = trend.classify();
    let estimate = Estimate::from_trend(trend.clone(), settings.n_paths);
    Ok(NovikovReport { info: info.name().into(), trend, class, max_mean_ratio, estimate })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnionBound {
    pub sup_alpha: f64,
    pub argmax: (f64, f64),
    /// `sup |Σ_k φ(z_a) - φ(z_b)|`, the numerator without the `1/sqrt(T-t)` factor.
    pub sup_numerator: f64,
    pub points: usize,
}

/// Bound constant claimed for `α¹` on the complement of the union.
pub const UNION_ALPHA_BOUND: f64 = 3.0;
pub const UNION_NUMERATOR_BOUND: f64 = 2.0;

/// Sup of `α¹(x, t)` for the unit union over `x ∈ A^c` and the given times.
pub fn union_alpha_bound(horizon: f64, xs: &[f64], ts: &[f64]) -> Result<UnionBound> {
    let info = InsiderInfo::unit_union(horizon)?;
    if let Some(x) = xs.iter().find(|&&x| in_unit_union(x)) {
        return Err(invalid(format!("grid point {x} lies inside the union")));
    }
    let mut best = UnionBound { sup_alpha: f64::NEG_INFINITY, argmax: (f64::NAN, f64::NAN), sup_numerator: 0.0, points: 0 };
    for &t in ts {
        for &x in xs {
            let a = alpha_indicator(&info, 1, x, t)?;
            if a > best.sup_alpha {
                best.sup_alpha = a;
                best.argmax = (x, t);
            }
            let num = info.drift_terms(1, x, t)?.numerator.value().abs();
            best.sup_numerator = best.sup_numerator.max(num);
            best.points += 1;
        }
    }
    Ok(best)
}

/// `per_period` interior points in each of `(-2,-1)`, `(0,1)`, `(2,3)` and
/// `n_t` times in `[T·t_lo_frac, T(1 - δ)]` spaced geometrically in `T - t`.
pub fn union_grids(horizon: f64, per_period: usize, t_lo_frac: f64, delta_frac: f64, n_t: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(3 * per_period);
    for start in [-2.0, 0.0, 2.0] {
        xs.extend((0..per_period).map(|j| start + (j as f64 + 0.5) / per_period as f64));
    }
    let hi = horizon * (1.0 - t_lo_frac);
    let lo = horizon * delta_frac;
    let ts = (0..n_t)
        .map(|i| horizon - hi * (lo / hi).powf(i as f64 / (n_t - 1) as f64))
        .collect();
    (xs, ts)
}

/// Analytic `ln X_t` of the log-optimal insider with `G = B_T`, from the
/// decomposition `ln(X_t/(x₀e^{rt})) = ½∫β² + ∫β dB + ½B_T²/T - ½(B_T-B_t)²/(T-t) + ½ln(T/(T-t))`.
///
/// `∫β dB` is summed exactly over the pieces of `η`, whose starts must be grid nodes.
pub fn analytic_log_wealth(params: &MarketParams, path: &BrownianPath, b_terminal: f64, node: usize) -> f64 {
    let nodes = path.grid.nodes();
    let t = nodes[node];
    let horizon = params.horizon;
    let b_at = |s: f64| path.values[path.grid.index_at_or_before(s)];
    let pieces: Vec<(f64, f64)> = params.eta.pieces().collect();
    let mut beta_db = 0.0;
    for (k, &(start, eta)) in pieces.iter().enumerate() {
        if start >= t {
            break;
        }
        let end = pieces.get(k + 1).map(|p| p.0).unwrap_or(f64::INFINITY).min(t);
        beta_db += (eta - params.r) / params.xi * (b_at(end) - b_at(start));
    }
    let y = b_terminal - path.values[node];
    params.x0.ln()
        + params.r * t
        + 0.5 * params.sharpe_sq_integral(t)
        + beta_db
        + 0.5 * b_terminal * b_terminal / horizon
        - 0.5 * y * y / (horizon - t)
        + 0.5 * (horizon / (horizon - t)).ln()
}

/// Simulated minus analytic `ln X_{T-δ}` on one bridge path, at the full
/// grid and at successive coarsenings by 2 of the same path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathwiseResiduals {
    pub steps: Vec<usize>,
    pub residuals: Vec<f64>,
}

pub fn pathwise_log_wealth_identity(
    params: &MarketParams,
    b_terminal: f64,
    delta_frac: f64,
    fine_steps: usize,
    coarsenings: usize,
    seed: u64,
) -> Result<PathwiseResiduals> {
    let horizon = params.horizon;
    let info = InsiderInfo::exact(horizon)?;
    if !fine_steps.is_multiple_of(1 << coarsenings) {
        return Err(invalid("fine step count must be divisible by 2^coarsenings"));
    }
    let fine = make_grid(horizon, fine_steps, delta_frac * horizon, Refinement::Geometric)?;
    let path = sample_bridge_with(&fine, horizon, b_terminal, &mut aux_rng(seed))?;
    let mut steps = Vec::new();
    let mut residuals = Vec::new();
    for level in 0..=coarsenings {
        let factor = 1usize << level;
        let grid = fine.coarsen(factor)?;
        let values = path.values.iter().copied().step_by(factor).collect();
        let p = BrownianPath { grid: grid.clone(), values };
        let alphas = alpha_on_path(&info, b_terminal, &p)?;
        let pi = optimal_fractions(params, &grid, Some(&alphas), 0.0)?;
        let simulated = params.x0.ln() + log_wealth_fraction(params, &pi, &p).last().unwrap();
        let analytic = analytic_log_wealth(params, &p, b_terminal, grid.len() - 1);
        steps.push(grid.steps());
        residuals.push(simulated - analytic);
    }
    Ok(PathwiseResiduals { steps, residuals })
}

/// Root-mean-square pathwise residual over `n_paths` bridge paths with
/// `B_T ~ N(0, T)`, per coarsening level.
pub fn pathwise_rms(
    params: &MarketParams,
    delta_frac: f64,
    fine_steps: usize,
    coarsenings: usize,
    n_paths: usize,
    seed: u64,
) -> Result<PathwiseResiduals> {
    let horizon = params.horizon;
    let runs = try_run_paths(n_paths, seed, |i, rng| {
        let z: f64 = rand::Rng::sample(rng, rand_distr::StandardNormal);
        pathwise_log_wealth_identity(params, horizon.sqrt() * z, delta_frac, fine_steps, coarsenings, seed ^ (i + 1))
    })?;
    let steps = runs[0].steps.clone();
    let residuals = (0..steps.len())
        .map(|j| (runs.iter().map(|r| r.residuals[j].powi(2)).sum::<f64>() / n_paths as f64).sqrt())
        .collect();
    Ok(PathwiseResiduals { steps, residuals })
}

/// Empirical arbitrage certificate for one strategy over an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct ArbitrageCheck {
    pub strategy: String,
    pub n: usize,
    /// `min (X_T - e^{rT} x₀)`.
    pub min_excess: f64,
    /// Share of paths with `X_T > e^{rT} x₀`.
    pub strict_fraction: f64,
    /// Every path keeps strictly positive wealth.
    pub all_hplus: bool,
    pub triggered: usize,
}

/// Tolerance on `X_T - e^{rT}x₀` below zero.
pub const DOMINANCE_TOL: f64 = 1e-12;
/// Share of strictly profitable paths needed to call the certificate.
pub const STRICT_SHARE: f64 = 0.01;

impl ArbitrageCheck {
    pub fn detected(&self) -> bool {
        self.min_excess >= -DOMINANCE_TOL && self.strict_fraction > STRICT_SHARE
    }

    pub fn from_runs(strategy: &str, runs: &[(f64, bool, bool)], bond: f64) -> Self {
        let n = runs.len();
        let min_excess = runs.iter().map(|r| r.0 - bond).fold(f64::INFINITY, f64::min);
        let strict = runs.iter().filter(|r| r.0 - bond > DOMINANCE_TOL).count();
        ArbitrageCheck {
            strategy: strategy.into(),
            n,
            min_excess,
            strict_fraction: strict as f64 / n as f64,
            all_hplus: runs.iter().all(|r| r.1),
            triggered: runs.iter().filter(|r| r.2).count(),
        }
    }
}

/// Buy-and-hold below the discounted `S_T - ε` with `G = B_T`, on free paths.
pub fn semiinfinite_certificate(params: &MarketParams, epsilon: f64, settings: &SimSettings) -> Result<ArbitrageCheck> {
    let grid = settings.full_grid(params.horizon)?;
    let info = InsiderInfo::exact(params.horizon)?;
    let runs = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = sample_joint(&info, &grid, rng)?;
        let paths = asset_paths(params, &draw.path)?;
        let run = arbitrage_strategy_semiinfinite(params, draw.b_terminal, &paths, epsilon)?;
        Ok((run.terminal_wealth, run.wealth.admissibility.in_hplus(), run.rule.triggered()))
    })?;
    Ok(ArbitrageCheck::from_runs("semi_infinite", &runs, params.x0 * (params.r * params.horizon).exp()))
}

/// Interval arbitrage with leverage `M` when `G = 1` and the bond when `G = 0`.
/// With `conditioned`, every path is drawn on `{G = 1}`.
pub fn interval_certificate(
    params: &MarketParams,
    c1: f64,
    c2: f64,
    epsilon: f64,
    leverage: f64,
    conditioned: bool,
    settings: &SimSettings,
) -> Result<ArbitrageCheck> {
    let grid = settings.full_grid(params.horizon)?;
    let info = InsiderInfo::interval(c1, c2, params.horizon)?;
    let bond = params.x0 * (params.r * params.horizon).exp();
    let runs = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = if conditioned {
            crate::sim::sample_conditioned(&info, 1, &grid, rng)?
        } else {
            sample_joint(&info, &grid, rng)?
        };
        if draw.g == 0.0 {
            return Ok((bond, true, false));
        }
        let paths = asset_paths(params, &draw.path)?;
        let run = arbitrage_strategy_interval(params, c1, draw.b_terminal, &paths, epsilon, leverage)?;
        Ok((run.terminal_wealth, run.wealth.admissibility.in_hplus(), run.rule.triggered()))
    })?;
    Ok(ArbitrageCheck::from_runs("interval_barrier", &runs, bond))
}

/// Dominance check for a fraction strategy (Merton or insider log-optimal).
pub fn fraction_certificate(
    kind: StrategyKind,
    info: Option<&InsiderInfo>,
    params: &MarketParams,
    settings: &SimSettings,
) -> Result<ArbitrageCheck> {
    let bond = params.x0 * (params.r * params.horizon).exp();
    let runs = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let w = simulate_strategy(kind, info, params, 0.0, settings, rng)?;
        Ok((params.x0 * w.log_wealth.last().unwrap().exp(), true, false))
    })?;
    Ok(ArbitrageCheck::from_runs(&format!("{kind}_log"), &runs, bond))
}

/// Budgets for the finiteness table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableBudgets {
    pub settings: SimSettings,
    pub delta_fracs: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `γ` levels approaching 1 for the linear-utility column.
    pub linear_gammas: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    /// Barrier offset as a fraction of `S₀`.
    pub epsilon_frac: f64,
}

impl Default for TableBudgets {
    fn default() -> Self {
        TableBudgets {
            settings: SimSettings { n_paths: 20_000, ..SimSettings::default() },
            delta_fracs: DEFAULT_DELTAS.to_vec(),
            gammas: vec![0.25, 0.5, 0.75],
            linear_gammas: vec![0.9, 0.95, 0.99, 0.999],
            c1: -1.0,
            c2: 1.0,
            epsilon_frac: 0.05,
        }
    }
}

/// One cell of the table: the classification, its backing trend and the
/// classification expected from theory (`None` where none is claimed).
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub column: String,
    pub class: TrendClass,
    pub expected: Option<TrendClass>,
    pub trend: Trend,
}

impl Cell {
    fn status(&self) -> Status {
        match self.expected {
            None => Status::Pass,
            Some(e) if e == self.class => Status::Pass,
            Some(_) if self.class == TrendClass::Inconclusive => Status::Inconclusive,
            Some(_) => Status::Fail,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub filtration: String,
    pub cells: Vec<Cell>,
    pub arbitrage: Vec<ArbitrageCheck>,
    pub arbitrage_expected: bool,
}

impl TableRow {
    pub fn arbitrage_detected(&self) -> bool {
        self.arbitrage.iter().any(|a| a.detected())
    }

    pub fn status(&self) -> Status {
        let cells = self.cells.iter().fold(Status::Pass, |s, c| s.and(c.status()));
        cells.and(Status::from_bool(self.arbitrage_detected() == self.arbitrage_expected))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationTable {
    pub rows: Vec<TableRow>,
}

impl ClassificationTable {
    pub fn status(&self) -> Status {
        self.rows.iter().fold(Status::Pass, |s, r| s.and(r.status()))
    }

    pub fn row(&self, name: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.filtration == name)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["filtration", "column", "class", "expected", "status", "trend_json"]);
        for row in &self.rows {
            for c in &row.cells {
                t.push(vec![
                    row.filtration.clone(),
                    c.column.clone(),
                    c.class.tag().into(),
                    c.expected.map(|e| e.tag()).unwrap_or("unstated").into(),
                    c.status().tag().into(),
                    c.trend.to_json().to_string(),
                ]);
            }
            let detected = row.arbitrage_detected();
            let certs: Vec<_> = row
                .arbitrage
                .iter()
                .map(|a| {
                    json!({
                        "strategy": a.strategy,
                        "n": a.n,
                        "min_excess": a.min_excess,
                        "strict_fraction": a.strict_fraction,
                        "all_hplus": a.all_hplus,
                    })
                })
                .collect();
            t.push(vec![
                row.filtration.clone(),
                "arbitrage".into(),
                if detected { "detected" } else { "not_detected" }.into(),
                if row.arbitrage_expected { "detected" } else { "not_detected" }.into(),
                Status::from_bool(detected == row.arbitrage_expected).tag().into(),
                json!(certs).to_string(),
            ]);
        }
        t
    }
}

fn gamma_column(g: f64) -> String {
    format!("v_gamma={g}")
}

/// Finiteness of `u`, `v_γ` and `v` under `F` and under each enlargement,
/// together with the empirical arbitrage indicator.
///
/// `v_γ` under an enlargement is the Monte Carlo exponential representation
/// from [`crra_functional_trends`]; the log column is deterministic quadrature.
pub fn classification_table(params: &MarketParams, budgets: &TableBudgets) -> Result<ClassificationTable> {
    use TrendClass::*;
    let horizon = params.horizon;
    let deltas = &budgets.delta_fracs;
    // deterministic log-utility levels are cheap, so that schedule runs two decades further
    let mut log_deltas = deltas.clone();
    let d_last = *deltas.last().ok_or_else(|| invalid("empty truncation schedule"))?;
    log_deltas.extend([d_last / 10.0, d_last / 100.0]);
    let log_deltas = &log_deltas;
    let epsilon = budgets.epsilon_frac * params.s0;

    let truncated = |d: f64| -> Result<MarketParams> {
        let mut p = params.clone();
        p.horizon = horizon * (1.0 - d);
        Ok(p)
    };
    let merton_trend = |gamma: f64, levels: &Vec<f64>| -> Result<Trend> {
        let values = levels
            .iter()
            .map(|&d| merton_value(&truncated(d)?, UtilitySpec::new(gamma)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Trend::new(levels.clone(), values))
    };
    let linear = divergence_diagnostic(&DiagnosticCase::LinearUtility { gammas: budgets.linear_gammas.clone() }, params)?;
    let linear_trend = linear.divergence.trend().cloned().unwrap_or_else(|| {
        Trend::new(budgets.linear_gammas.clone(), vec![linear.value; budgets.linear_gammas.len()])
    });
    let linear_cell = || Cell {
        column: "v".into(),
        class: classify_trend(&linear_trend.values),
        expected: Some(Diverging),
        trend: linear_trend.clone(),
    };
    let expected_gamma = |row: &str, g: f64| -> Option<TrendClass> {
        match row {
            "F" | "union" => Some(Finite),
            "interval" if g >= 0.5 => Some(Diverging),
            "interval" => None,
            _ => Some(Diverging),
        }
    };

    let mut rows = Vec::new();

    // no information
    let mut cells = vec![{
        let trend = merton_trend(0.0, log_deltas)?;
        Cell { column: "u".into(), class: trend.classify(), expected: Some(Finite), trend }
    }];
    for &g in &budgets.gammas {
        let trend = merton_trend(g, deltas)?;
        cells.push(Cell { column: gamma_column(g), class: trend.classify(), expected: expected_gamma("F", g), trend });
    }
    cells.push(linear_cell());
    let merton_check = fraction_certificate(StrategyKind::Merton, None, params, &budgets.settings)?;
    rows.push(TableRow { filtration: "F".into(), cells, arbitrage: vec![merton_check.clone()], arbitrage_expected: false });

    for info in [
        InsiderInfo::unit_union(horizon)?,
        InsiderInfo::interval(budgets.c1, budgets.c2, horizon)?,
        InsiderInfo::exact(horizon)?,
    ] {
        let name = info.name();
        let log_trend = if info.is_indicator() {
            let values = log_deltas
                .iter()
                .map(|&d| {
                    Ok(merton_value(&truncated(d)?, UtilitySpec::log())? + 0.5 * truncated_alpha_sq_integral(&info, d)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            Trend::new(log_deltas.clone(), values).fit("ln(T/delta)", |d| -d.ln())
        } else {
            divergence_diagnostic(&DiagnosticCase::Example1Log { delta_fracs: log_deltas.clone() }, params)?
                .divergence
                .trend()
                .cloned()
                .ok_or_else(|| invalid("log-utility trend for exact information stabilized"))?
        };
        let mut cells = vec![Cell {
            column: "u".into(),
            class: log_trend.classify(),
            expected: Some(if info.is_indicator() { Finite } else { Diverging }),
            trend: log_trend,
        }];
        let trends = crra_functional_trends(&info, params, &budgets.gammas, deltas, &budgets.settings)?;
        for (&g, trend) in budgets.gammas.iter().zip(trends) {
            cells.push(Cell { column: gamma_column(g), class: trend.classify(), expected: expected_gamma(name, g), trend });
        }
        cells.push(linear_cell());

        let (arbitrage, expected) = match name {
            "union" => (
                vec![
                    merton_check.clone(),
                    fraction_certificate(StrategyKind::Insider, Some(&info), params, &budgets.settings)?,
                ],
                false,
            ),
            "interval" => (
                vec![interval_certificate(params, budgets.c1, budgets.c2, epsilon, 1.0, false, &budgets.settings)?],
                true,
            ),
            _ => (vec![semiinfinite_certificate(params, epsilon, &budgets.settings)?], true),
        };
        rows.push(TableRow { filtration: name.into(), cells, arbitrage, arbitrage_expected: expected });
    }
    Ok(ClassificationTable { rows })
}

/// Checks runnable by name from the command line.
pub const CHECKS: [&str; 6] =
    ["lemma_I", "alpha_sq_bound", "novikov", "union_alpha_bound", "pathwise_identity", "mixture_zero"];

/// Largest `|Σ_g α^g P(G=g|x)|` over an `n_x × n_t` grid of `|x| ≤ 6`,
/// `t ∈ [0, T(1-δ)]`.
pub fn mixture_zero_sup(info: &InsiderInfo, n_x: usize, n_t: usize, delta_frac: f64) -> Result<f64> {
    let horizon = info.horizon;
    let mut sup: f64 = 0.0;
    for i in 0..n_t {
        let t = horizon * (1.0 - delta_frac) * i as f64 / (n_t - 1) as f64;
        for j in 0..n_x {
            let x = -6.0 + 12.0 * j as f64 / (n_x - 1) as f64;
            let one = info.drift_terms(1, x, t)?;
            let zero = info.drift_terms(0, x, t)?;
            let total = one.alpha() * one.mass() + zero.alpha() * zero.mass();
            sup = sup.max(total.abs());
        }
    }
    Ok(sup)
}

/// Renders a trend verdict line set for a Novikov report.
pub fn novikov_verdict(report: &NovikovReport) -> Verdict {
    let expected = if report.info == "union" { TrendClass::Finite } else { TrendClass::Diverging };
    let v = &report.trend.values;
    let n = v.len();
    let change = (v[n - 1] - v[n - 2]).abs() / v[n - 2].abs();
    let status = if report.class == expected {
        Status::Pass
    } else if report.class == TrendClass::Inconclusive {
        Status::Inconclusive
    } else {
        Status::Fail
    };
    let mut verdict = Verdict::new(&format!("novikov_{}", report.info), status, change, crate::estimate::STABLE_REL_CHANGE)
        .with("classification", report.class.tag())
        .with("expected", expected.tag())
        .with("max_mean_ratio", report.max_mean_ratio.iter().map(|r| fmt_real(*r)).collect::<Vec<_>>().join(";"));
    verdict.schedule = report.trend.to_json().to_string();
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_integrand_is_symmetric_for_symmetric_interval() {
        let info = InsiderInfo::interval(-1.0, 1.0, 1.0).unwrap();
        for &x in &[0.1, 0.7, 1.3, 4.0] {
            let a = lemma_integrand(&info, x, 0.4).unwrap();
            let b = lemma_integrand(&info, -x, 0.4).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn union_grid_avoids_the_set() {
        let (xs, ts) = union_grids(1.0, 10, 0.9, 1e-4, 5);
        assert!(xs.iter().all(|&x| !in_unit_union(x)));
        assert!((ts[0] - 0.9).abs() < 1e-12 && (ts[4] - (1.0 - 1e-4)).abs() < 1e-12);
        assert!(union_alpha_bound(1.0, &[1.5], &ts).is_err());
    }

    #[test]
    fn union_drift_vanishes_at_half() {
        let b = union_alpha_bound(1.0, &[0.5], &[0.5, 0.9, 0.999]).unwrap();
        assert!(b.sup_alpha.abs() < 1e-12);
    }
}
