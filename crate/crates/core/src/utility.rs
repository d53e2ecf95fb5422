//! Utility family, closed-form and quadrature values, Monte Carlo expected
//! utilities and divergence diagnostics.
//!
//! `U_γ(x) = (x^γ - 1)/γ + γ` for `γ ∈ (0, 1]` and `U_0 = ln`.

use crate::drift::{alpha_on_path, log_alpha_sq_mixture, InfoKind, InsiderInfo};
use crate::error::{invalid, Error, Result};
use crate::estimate::{Estimate, Trend, MIN_LEVELS};
use crate::gauss::pdf;
use crate::market::{asset_paths, make_grid, sample_brownian_with, BrownianPath, MarketParams, TimeGrid};
use crate::quad::{integrate, integrate_sin2, integrate_with_breaks, Tolerance};
use crate::sim::{sample_conditioned, sample_joint, try_run_paths, SimSettings};
use crate::strategies::{arbitrage_strategy_interval, insider_fraction, log_wealth_fraction, merton_fraction};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtilitySpec {
    pub gamma: f64,
}

impl UtilitySpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(invalid(format!("risk parameter must lie in [0, 1], got {gamma}")));
        }
        Ok(UtilitySpec { gamma })
    }

    pub fn log() -> Self {
        UtilitySpec { gamma: 0.0 }
    }

    pub fn is_log(&self) -> bool {
        self.gamma == 0.0
    }
}

pub fn utility(spec: UtilitySpec, x: f64) -> Result<f64> {
    let g = spec.gamma;
    if g == 0.0 {
        if x <= 0.0 {
            return Err(invalid(format!("logarithmic utility needs positive wealth, got {x}")));
        }
        return Ok(x.ln());
    }
    if x < 0.0 {
        return Err(invalid(format!("power utility needs non-negative wealth, got {x}")));
    }
    Ok((x.powf(g) - 1.0) / g + g)
}

/// Maximal expected utility without extra information.
///
/// `γ = 0`: `ln x₀ + rT + ½∫β²`; `γ ∈ (0,1)`: `(x₀^γ/γ) exp(γrT + ½ γ/(1-γ) ∫β²) + (γ²-1)/γ`.
pub fn merton_value(params: &MarketParams, spec: UtilitySpec) -> Result<f64> {
    let g = spec.gamma;
    let t = params.horizon;
    let beta_sq = params.sharpe_sq_integral(t);
    if g == 0.0 {
        return Ok(params.x0.ln() + params.r * t + 0.5 * beta_sq);
    }
    if g >= 1.0 {
        return Err(invalid("the linear-utility value is infinite; use the divergence diagnostic"));
    }
    Ok(params.x0.powf(g) / g * (g * params.r * t + 0.5 * g / (1.0 - g) * beta_sq).exp() + (g * g - 1.0) / g)
}

/// Standardized half-width of the `B_t` integration range.
const X_RANGE: f64 = 12.0;

/// `E[(α_t^G)²]`: `1/(T-t)` for exact terminal information, otherwise the
/// quadrature of `Σ_g (α^g)² P(G=g | B_t = x)` against the `N(0, t)` law.
pub fn expected_alpha_sq(info: &InsiderInfo, t: f64) -> Result<f64> {
    let horizon = info.horizon;
    if !(t > 0.0 && t < horizon) {
        return Err(Error::TimeOutOfRange { t, range: format!("(0, {horizon})") });
    }
    if info.kind == InfoKind::ExactTerminal {
        return Ok(1.0 / (horizon - t));
    }
    let sd = t.sqrt();
    // the integrand concentrates within a few sqrt(T-t) of each boundary, so
    // every boundary gets a ladder of breaks at that scale
    let width = ((horizon - t) / t).sqrt();
    let mut edges = Vec::new();
    match info.kind {
        InfoKind::Interval { c1, c2 } => edges.extend([c1 / sd, c2 / sd]),
        InfoKind::UnitUnion => {
            let reach = (X_RANGE * sd).ceil() as i64;
            edges.extend((-reach..=reach).map(|k| k as f64 / sd));
        }
        InfoKind::ExactTerminal => unreachable!(),
    }
    let mut breaks = Vec::with_capacity(edges.len() * 9);
    for &e in edges.iter().filter(|e| e.abs() < X_RANGE + 1.0) {
        breaks.push(e);
        for k in [1.0, 4.0, 16.0, 64.0] {
            breaks.extend([e - k * width, e + k * width]);
        }
    }
    let r = integrate_with_breaks(
        |u| match log_alpha_sq_mixture(info, sd * u, t) {
            Ok(l) => l.exp() * pdf(u),
            Err(_) => f64::NAN,
        },
        -X_RANGE,
        X_RANGE,
        &breaks,
        Tolerance::absolute(1e-9),
    );
    if !r.value.is_finite() {
        return Err(invalid(format!("second moment of the drift is not finite at t = {t}")));
    }
    Ok(r.value)
}

/// `∫_0^{T-δ} E[(α_t^G)²] dt` by quadrature.
pub fn truncated_alpha_sq_integral(info: &InsiderInfo, delta_frac: f64) -> Result<f64> {
    if !(delta_frac > 0.0 && delta_frac < 1.0) {
        return Err(invalid(format!("delta fraction must lie in (0, 1), got {delta_frac}")));
    }
    let horizon = info.horizon;
    let end = horizon * (1.0 - delta_frac);
    let tol = Tolerance { abs: 1e-9, rel: 1e-10, max_intervals: 1000 };
    let r = integrate(|t| if t > 0.0 { expected_alpha_sq(info, t).unwrap_or(f64::NAN) } else { 0.0 }, 0.0, end, tol);
    Ok(r.value)
}

fn require_indicator(info: &InsiderInfo) -> Result<()> {
    if info.is_indicator() {
        Ok(())
    } else {
        Err(Error::UnsupportedInfo(
            "the value of exact terminal information is infinite; use the divergence diagnostic".into(),
        ))
    }
}

/// `½ ∫_0^T E[(α_t^G)²] dt` under the `t = T sin²θ` substitution.
pub fn value_of_information(info: &InsiderInfo) -> Result<Estimate> {
    require_indicator(info)?;
    // the inner quadrature is good to 1e-9, so the outer one cannot ask for more
    let tol = Tolerance { abs: 1e-7, rel: 1e-8, max_intervals: 500 };
    let r = integrate_sin2(|t| expected_alpha_sq(info, t).unwrap_or(f64::NAN), info.horizon, tol);
    if !r.value.is_finite() {
        return Err(invalid("value of information quadrature produced a non-finite value"));
    }
    let mut est = Estimate::quadrature(0.5 * r.value, 0.5 * r.abs_error, r.evaluations);
    if !r.converged {
        est.quad_error = Some(f64::INFINITY);
    }
    Ok(est)
}

/// Insider log utility: the Merton value plus the value of information.
pub fn insider_value_log(info: &InsiderInfo, params: &MarketParams) -> Result<Estimate> {
    check_horizon(info, params)?;
    let mut voi = value_of_information(info)?;
    voi.value += merton_value(params, UtilitySpec::log())?;
    Ok(voi)
}

fn check_horizon(info: &InsiderInfo, params: &MarketParams) -> Result<()> {
    if info.horizon != params.horizon {
        return Err(invalid(format!(
            "information horizon {} differs from market horizon {}",
            info.horizon, params.horizon
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    /// Everything in the bond.
    Bond,
    Merton,
    /// Optimal fraction using the information drift.
    Insider,
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bond" => Ok(StrategyKind::Bond),
            "merton" => Ok(StrategyKind::Merton),
            "insider" => Ok(StrategyKind::Insider),
            other => Err(invalid(format!("unknown strategy '{other}' (bond, merton, insider)"))),
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StrategyKind::Bond => "bond",
            StrategyKind::Merton => "merton",
            StrategyKind::Insider => "insider",
        })
    }
}

/// Fraction per step of the optimal rule for `γ`; `alphas` switches on the insider term.
pub fn optimal_fractions(params: &MarketParams, grid: &TimeGrid, alphas: Option<&[f64]>, gamma: f64) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    (0..grid.steps())
        .map(|i| match alphas {
            Some(a) => insider_fraction(params, a[i], nodes[i], gamma),
            None => merton_fraction(params, nodes[i], gamma),
        })
        .collect()
}

/// One simulated terminal wealth (at `T`, or at `T - δ` for exact information).
pub struct SimulatedWealth {
    pub grid: TimeGrid,
    pub pi: Vec<f64>,
    pub log_wealth: Vec<f64>,
    pub path: BrownianPath,
    pub b_terminal: f64,
    pub g: Option<f64>,
}

/// Simulates one path of the given strategy; the fraction uses `gamma`.
pub fn simulate_strategy<R: rand::Rng + ?Sized>(
    kind: StrategyKind,
    info: Option<&InsiderInfo>,
    params: &MarketParams,
    gamma: f64,
    settings: &SimSettings,
    rng: &mut R,
) -> Result<SimulatedWealth> {
    let (grid, path, g, alphas) = match kind {
        StrategyKind::Bond | StrategyKind::Merton => {
            let grid = settings.full_grid(params.horizon)?;
            let path = sample_brownian_with(&grid, rng);
            (grid, path, None, None)
        }
        StrategyKind::Insider => {
            let info = info.ok_or_else(|| invalid("the insider strategy needs insider information"))?;
            let grid = settings.insider_grid(info)?;
            let draw = sample_joint(info, &grid, rng)?;
            let alphas = alpha_on_path(info, draw.g, &draw.path)?;
            (grid, draw.path, Some(draw.g), Some(alphas))
        }
    };
    let pi = match kind {
        StrategyKind::Bond => vec![0.0; grid.steps()],
        _ => optimal_fractions(params, &grid, alphas.as_deref(), gamma)?,
    };
    let log_wealth = log_wealth_fraction(params, &pi, &path);
    Ok(SimulatedWealth { b_terminal: path.last(), grid, pi, log_wealth, path, g })
}

/// Monte Carlo mean of `U_γ(X_T)` under the chosen strategy.
pub fn mc_expected_utility(
    kind: StrategyKind,
    info: Option<&InsiderInfo>,
    params: &MarketParams,
    spec: UtilitySpec,
    settings: &SimSettings,
) -> Result<Estimate> {
    settings.validate()?;
    if let Some(info) = info {
        check_horizon(info, params)?;
    }
    let samples = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let w = simulate_strategy(kind, info, params, spec.gamma, settings, rng)?;
        utility(spec, params.x0 * w.log_wealth.last().unwrap().exp())
    })?;
    Ok(Estimate::from_samples(&samples))
}

/// Nodes of `grid` at `T(1 - δ)` for each fraction `δ`.
fn level_indices(grid: &TimeGrid, delta_fracs: &[f64]) -> Vec<usize> {
    let horizon = grid.horizon();
    delta_fracs.iter().map(|d| grid.index_at_or_before(horizon * (1.0 - d))).collect()
}

fn check_schedule(levels: &[f64]) -> Result<()> {
    if levels.len() < MIN_LEVELS {
        return Err(invalid(format!("truncation schedule needs at least {MIN_LEVELS} levels, got {}", levels.len())));
    }
    Ok(())
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("delta schedule must be strictly decreasing fractions in (0, 1)"));
    }
    Ok(())
}

/// Monte Carlo `E[U_γ(X_{T-δ})]` of the insider-optimal strategy for every
/// `γ` in `gammas` and every `δ` (a fraction of `T`) in the schedule.
///
/// All levels and all `γ` share the same paths, on one grid refined towards
/// the smallest `δ`. One trend per `γ`, with standard errors.
pub fn insider_utility_trends(
    info: &InsiderInfo,
    params: &MarketParams,
    gammas: &[f64],
    delta_fracs: &[f64],
    settings: &SimSettings,
) -> Result<Vec<Trend>> {
    settings.validate()?;
    check_horizon(info, params)?;
    check_deltas(delta_fracs)?;
    let specs: Vec<UtilitySpec> = gammas.iter().map(|&g| UtilitySpec::new(g)).collect::<Result<_>>()?;
    let horizon = params.horizon;
    let d_min = *delta_fracs.last().unwrap();
    let grid = make_grid(horizon, settings.n_steps, d_min * horizon, settings.refinement)?;
    let idx = level_indices(&grid, delta_fracs);
    let levels = delta_fracs.len();
    let rows = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = sample_joint(info, &grid, rng)?;
        let alphas = alpha_on_path(info, draw.g, &draw.path)?;
        let mut row = Vec::with_capacity(specs.len() * levels);
        for spec in &specs {
            let pi = optimal_fractions(params, &grid, Some(&alphas), spec.gamma)?;
            let lw = log_wealth_fraction(params, &pi, &draw.path);
            for &i in &idx {
                row.push(utility(*spec, params.x0 * lw[i].exp())?);
            }
        }
        Ok(row)
    })?;
    let mut trends = Vec::with_capacity(specs.len());
    for k in 0..specs.len() {
        let mut values = Vec::with_capacity(levels);
        let mut errors = Vec::with_capacity(levels);
        for j in 0..levels {
            let col: Vec<f64> = rows.iter().map(|r| r[k * levels + j]).collect();
            let e = Estimate::from_samples(&col);
            values.push(e.value);
            errors.push(e.std_error.unwrap());
        }
        let mut trend = Trend::new(delta_fracs.to_vec(), values).fit("ln(T/delta)", |d| -d.ln());
        trend.std_errors = Some(errors);
        trends.push(trend);
    }
    Ok(trends)
}

/// The exponential representation of the insider CRRA value,
/// `x₀^γ/γ · E[exp(γ r t + ½ γ/(1-γ) ∫_0^t θ_s² ds)] + (γ²-1)/γ` with
/// `θ = β + α^G`, by Monte Carlo at `t = T(1 - δ)` for every level.
///
/// Shares paths and grid across levels and `γ`, like [`insider_utility_trends`].
pub fn crra_functional_trends(
    info: &InsiderInfo,
    params: &MarketParams,
    gammas: &[f64],
    delta_fracs: &[f64],
    settings: &SimSettings,
) -> Result<Vec<Trend>> {
    settings.validate()?;
    check_horizon(info, params)?;
    check_deltas(delta_fracs)?;
    if gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
        return Err(invalid("the exponential representation needs γ in (0, 1)"));
    }
    let horizon = params.horizon;
    let d_min = *delta_fracs.last().unwrap();
    let grid = make_grid(horizon, settings.n_steps, d_min * horizon, settings.refinement)?;
    let idx = level_indices(&grid, delta_fracs);
    let nodes = grid.nodes().to_vec();
    let rows = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = sample_joint(info, &grid, rng)?;
        let alphas = alpha_on_path(info, draw.g, &draw.path)?;
        let mut cum = vec![0.0; nodes.len()];
        for i in 0..grid.steps() {
            let theta = params.sharpe(nodes[i]) + alphas[i];
            cum[i + 1] = cum[i] + theta * theta * (nodes[i + 1] - nodes[i]);
        }
        Ok(idx.iter().map(|&i| (nodes[i], cum[i])).collect::<Vec<(f64, f64)>>())
    })?;
    let mut trends = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let mut values = Vec::with_capacity(delta_fracs.len());
        let mut errors = Vec::with_capacity(delta_fracs.len());
        for j in 0..delta_fracs.len() {
            let col: Vec<f64> = rows
                .iter()
                .map(|r| {
                    let (t, q) = r[j];
                    params.x0.powf(g) / g * (g * params.r * t + 0.5 * g / (1.0 - g) * q).exp() + (g * g - 1.0) / g
                })
                .collect();
            let e = Estimate::from_samples(&col);
            values.push(e.value);
            errors.push(e.std_error.unwrap());
        }
        let mut trend = Trend::new(delta_fracs.to_vec(), values).fit("ln(T/delta)", |d| -d.ln());
        trend.std_errors = Some(errors);
        trends.push(trend);
    }
    Ok(trends)
}

/// Quantities proved infinite, examined along a truncation schedule.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagnosticCase {
    /// Insider log utility with `G = B_T`, truncated at `T - δ` (closed form per level).
    Example1Log { delta_fracs: Vec<f64> },
    /// Monte Carlo CRRA utility of the interval insider at `T - δ`.
    GammaGeHalfInterval { c1: f64, c2: f64, gamma: f64, delta_fracs: Vec<f64>, settings: SimSettings },
    /// CRRA value without information as `γ → 1`.
    LinearUtility { gammas: Vec<f64> },
    /// Mean terminal wealth of the interval arbitrage as the leverage grows.
    LeverageInterval { c1: f64, c2: f64, epsilon: f64, leverages: Vec<f64>, settings: SimSettings },
}

impl DiagnosticCase {
    pub fn name(&self) -> &'static str {
        match self {
            DiagnosticCase::Example1Log { .. } => "example1_log",
            DiagnosticCase::GammaGeHalfInterval { .. } => "gamma_ge_half_interval",
            DiagnosticCase::LinearUtility { .. } => "linear_utility_any",
            DiagnosticCase::LeverageInterval { .. } => "leverage_interval",
        }
    }
}

/// Sequence of truncated values with a fitted growth law.
///
/// The returned estimate is flagged diverging only when the values grow over
/// every level without stabilizing; the trend is always attached otherwise.
pub fn divergence_diagnostic(case: &DiagnosticCase, params: &MarketParams) -> Result<Estimate> {
    match case {
        DiagnosticCase::Example1Log { delta_fracs } => {
            check_schedule(delta_fracs)?;
            check_deltas(delta_fracs)?;
            let info = InsiderInfo::exact(params.horizon)?;
            let horizon = params.horizon;
            let values = delta_fracs
                .iter()
                .map(|&d| {
                    let end = horizon * (1.0 - d);
                    let info_part = truncated_alpha_sq_integral(&info, d)?;
                    Ok(params.x0.ln() + params.r * end + 0.5 * params.sharpe_sq_integral(end) + 0.5 * info_part)
                })
                .collect::<Result<Vec<f64>>>()?;
            let trend = Trend::new(delta_fracs.clone(), values).fit("ln(T/delta)", |d| -d.ln());
            Ok(Estimate::from_trend(trend, 1))
        }
        DiagnosticCase::GammaGeHalfInterval { c1, c2, gamma, delta_fracs, settings } => {
            check_schedule(delta_fracs)?;
            let info = InsiderInfo::interval(*c1, *c2, params.horizon)?;
            let trend = insider_utility_trends(&info, params, &[*gamma], delta_fracs, settings)?.remove(0);
            Ok(Estimate::from_trend(trend, settings.n_paths))
        }
        DiagnosticCase::LinearUtility { gammas } => {
            check_schedule(gammas)?;
            if gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) || gammas.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("γ schedule must increase strictly inside (0, 1)"));
            }
            let values = gammas
                .iter()
                .map(|&g| merton_value(params, UtilitySpec::new(g)?))
                .collect::<Result<Vec<f64>>>()?;
            let trend = Trend::new(gammas.clone(), values).fit_log("1/(1-gamma)", |g| 1.0 / (1.0 - g));
            Ok(Estimate::from_trend(trend, 1))
        }
        DiagnosticCase::LeverageInterval { c1, c2, epsilon, leverages, settings } => {
            check_schedule(leverages)?;
            settings.validate()?;
            if leverages.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("leverage schedule must increase strictly"));
            }
            let info = InsiderInfo::interval(*c1, *c2, params.horizon)?;
            let grid = settings.full_grid(params.horizon)?;
            let rows = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
                let draw = sample_conditioned(&info, 1, &grid, rng)?;
                let paths = asset_paths(params, &draw.path)?;
                leverages
                    .iter()
                    .map(|&m| {
                        Ok(arbitrage_strategy_interval(params, *c1, draw.b_terminal, &paths, *epsilon, m)?
                            .terminal_wealth)
                    })
                    .collect::<Result<Vec<f64>>>()
            })?;
            let mut values = Vec::new();
            let mut errors = Vec::new();
            for j in 0..leverages.len() {
                let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                let e = Estimate::from_samples(&col);
                values.push(e.value);
                errors.push(e.std_error.unwrap());
            }
            let mut trend = Trend::new(leverages.clone(), values).fit("leverage", |m| m);
            trend.std_errors = Some(errors);
            Ok(Estimate::from_trend(trend, settings.n_paths))
        }
    }
}

/// `E[exp(½ ∫_0^{T-δ} (α_t^G)² dt)]` per level, with the max/mean ratio of
/// the samples at each level as a heavy-tail indicator.
pub fn novikov_trend(
    info: &InsiderInfo,
    delta_fracs: &[f64],
    settings: &SimSettings,
) -> Result<(Trend, Vec<f64>)> {
    settings.validate()?;
    check_deltas(delta_fracs)?;
    let horizon = info.horizon;
    let d_min = *delta_fracs.last().unwrap();
    let grid = make_grid(horizon, settings.n_steps, d_min * horizon, settings.refinement)?;
    let idx = level_indices(&grid, delta_fracs);
    let nodes = grid.nodes().to_vec();
    let rows = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = sample_joint(info, &grid, rng)?;
        let alphas = alpha_on_path(info, draw.g, &draw.path)?;
        let mut cum = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..grid.steps() {
            acc += alphas[i] * alphas[i] * (nodes[i + 1] - nodes[i]);
            cum.push(acc);
        }
        Ok(idx.iter().map(|&i| (0.5 * cum[i]).exp()).collect::<Vec<f64>>())
    })?;
    let mut values = Vec::new();
    let mut errors = Vec::new();
    let mut ratios = Vec::new();
    for j in 0..delta_fracs.len() {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let e = Estimate::from_samples(&col);
        let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ratios.push(max / e.value);
        values.push(e.value);
        errors.push(e.std_error.unwrap());
    }
    let mut trend = Trend::new(delta_fracs.to_vec(), values).fit_log("ln(T/delta)", |d| -d.ln());
    trend.std_errors = Some(errors);
    Ok((trend, ratios))
}

/// Monte Carlo mean of `Σ_i α_i² Δt_i` against the quadrature value, used by
/// the examples to show the two routes to `∫E[α²]` side by side.
pub fn mc_alpha_sq_integral(info: &InsiderInfo, settings: &SimSettings) -> Result<Estimate> {
    settings.validate()?;
    let grid = settings.truncated_grid(info.horizon)?;
    let nodes = grid.nodes().to_vec();
    let samples = try_run_paths(settings.n_paths, settings.seed, |_, rng| {
        let draw = sample_joint(info, &grid, rng)?;
        let alphas = alpha_on_path(info, draw.g, &draw.path)?;
        Ok((0..grid.steps()).map(|i| alphas[i] * alphas[i] * (nodes[i + 1] - nodes[i])).sum::<f64>())
    })?;
    Ok(Estimate::from_samples(&samples))
}

/// Brute-force `E[(α_t^G)²]` from independent draws of `(B_t, B_T - B_t)`.
pub fn mc_expected_alpha_sq(info: &InsiderInfo, t: f64, n: usize, seed: u64) -> Result<Estimate> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let horizon = info.horizon;
    if !(t > 0.0 && t < horizon) {
        return Err(Error::TimeOutOfRange { t, range: format!("(0, {horizon})") });
    }
    let samples = try_run_paths(n, seed, |_, rng| {
        let x = t.sqrt() * rng.sample::<f64, _>(StandardNormal);
        let b_terminal = x + (horizon - t).sqrt() * rng.sample::<f64, _>(StandardNormal);
        let g = info.realize(b_terminal);
        let a = match info.kind {
            InfoKind::ExactTerminal => crate::drift::alpha_exact(b_terminal, x, t, horizon)?,
            _ => crate::drift::alpha_indicator(info, g as u8, x, t)?,
        };
        Ok(a * a)
    })?;
    Ok(Estimate::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utility_family() {
        for g in [0.0, 0.25, 0.5, 1.0] {
            assert!((utility(UtilitySpec::new(g).unwrap(), 1.0).unwrap() - g).abs() < 1e-15);
        }
        assert!((utility(UtilitySpec::new(1.0).unwrap(), 3.7).unwrap() - 3.7).abs() < 1e-15);
        assert!((utility(UtilitySpec::log(), std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(utility(UtilitySpec::log(), 0.0).is_err());
        assert!(UtilitySpec::new(1.5).is_err());
    }

    #[test]
    fn merton_values() {
        let p = MarketParams::reference();
        assert!((merton_value(&p, UtilitySpec::log()).unwrap() - 0.10).abs() < 1e-15);
        // 2 e^{0.09} - 1.5
        let crra = merton_value(&p, UtilitySpec::new(0.5).unwrap()).unwrap();
        assert!((crra - 0.688_348_567_410_420_7).abs() < 1e-13, "{crra}");
        let flat = MarketParams::new(0.03, 0.03, 0.2, 2.0, 1.0, 1.5).unwrap();
        assert!((merton_value(&flat, UtilitySpec::log()).unwrap() - (1.5f64.ln() + 0.06)).abs() < 1e-15);
        assert!(merton_value(&p, UtilitySpec::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn exact_terminal_second_moment() {
        let info = InsiderInfo::exact(1.0).unwrap();
        assert_eq!(expected_alpha_sq(&info, 0.75).unwrap(), 4.0);
        assert!(expected_alpha_sq(&info, 1.0).is_err());
        assert!(value_of_information(&info).is_err());
    }
}
