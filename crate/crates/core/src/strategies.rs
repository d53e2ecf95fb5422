//! Allocation rules, wealth integration and admissibility classification.
//!
//! All sums are left-point: the holdings or fraction fixed at node `i` are
//! applied over `(t_i, t_{i+1}]`.

use crate::error::{invalid, Error, Result};
use crate::market::{asset_paths, AssetPaths, BrownianPath, MarketParams, TimeGrid};

/// Holdings per node, either as unit counts `(M, N)` of bond and stock or as
/// the fraction `π` of wealth held in stock.
#[derive(Clone, Debug, PartialEq)]
pub enum Allocation {
    Shares { bond: Vec<f64>, stock: Vec<f64> },
    Fraction(Vec<f64>),
}

/// Admissibility class of a wealth path.
#[derive(Clone, Debug, PartialEq)]
pub enum Admissibility {
    /// Strictly positive wealth at every node.
    InHplus,
    /// Bounded below but touching or crossing zero, without recovery to a
    /// non-negative terminal value after a negative excursion.
    InHa,
    /// Negative wealth at the listed nodes while the terminal wealth is non-negative.
    TemporaryBankruptcy(Vec<usize>),
}

impl Admissibility {
    pub fn tag(&self) -> &'static str {
        match self {
            Admissibility::InHplus => "in_Hplus",
            Admissibility::InHa => "in_Ha",
            Admissibility::TemporaryBankruptcy(_) => "temporary_bankruptcy",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub class: Admissibility,
    /// Smallest `a ≥ 0` with `X_t - x0 ≥ -a` at every node.
    pub a: f64,
}

impl AdmissibilityReport {
    pub fn in_hplus(&self) -> bool {
        self.class == Admissibility::InHplus
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WealthPath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub admissibility: AdmissibilityReport,
}

impl WealthPath {
    fn new(grid: TimeGrid, values: Vec<f64>, x0: f64) -> Self {
        let admissibility = classify_admissibility(&values, x0);
        WealthPath { grid, values, admissibility }
    }

    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

pub fn classify_admissibility(values: &[f64], x0: f64) -> AdmissibilityReport {
    let a = values.iter().fold(0.0f64, |acc, &x| acc.max(x0 - x));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let class = if min > 0.0 {
        Admissibility::InHplus
    } else {
        let negative: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, &x)| x < 0.0)
            .map(|(i, _)| i)
            .collect();
        match values.last() {
            Some(&last) if last >= 0.0 && !negative.is_empty() => Admissibility::TemporaryBankruptcy(negative),
            _ => Admissibility::InHa,
        }
    };
    AdmissibilityReport { class, a }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(invalid(format!("risk parameter must lie in [0, 1), got {gamma}")));
    }
    Ok(())
}

/// Optimal fraction without extra information: `(η_t - r)/((1-γ) ξ²)`.
pub fn merton_fraction(params: &MarketParams, t: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((params.eta.at(t) - params.r) / ((1.0 - gamma) * params.xi * params.xi))
}

/// Optimal fraction for the insider: `((η_t - r)/ξ² + α_t/ξ)/(1-γ)`.
pub fn insider_fraction(params: &MarketParams, alpha_t: f64, t: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let xi = params.xi;
    Ok(((params.eta.at(t) - params.r) / (xi * xi) + alpha_t / xi) / (1.0 - gamma))
}

/// Discretization of the fraction form of the wealth equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FractionScheme {
    /// `ln X` accumulated with left-point sums; exact for constant `π`, always positive.
    #[default]
    LogEuler,
    /// `X_{i+1} = X_i [1 + (1-π_i)(D_{i+1}/D_i - 1) + π_i (S_{i+1}/S_i - 1)]`, the
    /// same increments as holding `(M, N)` units over the step.
    SelfFinancing,
}

fn check_fraction_len(pi: &[f64], grid: &TimeGrid) -> Result<()> {
    if pi.len() != grid.steps() && pi.len() != grid.len() {
        return Err(invalid(format!(
            "fraction has {} entries for a grid of {} steps",
            pi.len(),
            grid.steps()
        )));
    }
    if let Some(bad) = pi.iter().take(grid.steps()).find(|p| !p.is_finite()) {
        return Err(invalid(format!("non-finite fraction {bad}")));
    }
    Ok(())
}

/// Log-wealth integration of a fraction strategy.
pub fn integrate_wealth_fraction(params: &MarketParams, pi: &[f64], bpath: &BrownianPath) -> Result<WealthPath> {
    integrate_wealth_fraction_with(params, pi, bpath, FractionScheme::LogEuler)
}

pub fn integrate_wealth_fraction_with(
    params: &MarketParams,
    pi: &[f64],
    bpath: &BrownianPath,
    scheme: FractionScheme,
) -> Result<WealthPath> {
    let grid = &bpath.grid;
    check_fraction_len(pi, grid)?;
    let values = match scheme {
        FractionScheme::LogEuler => log_wealth_fraction(params, pi, bpath)
            .into_iter()
            .map(|l| params.x0 * l.exp())
            .collect(),
        FractionScheme::SelfFinancing => {
            let paths = asset_paths(params, bpath)?;
            let mut x = params.x0;
            let mut values = Vec::with_capacity(grid.len());
            values.push(x);
            for i in 0..grid.steps() {
                let bond_ret = paths.bond[i + 1] / paths.bond[i] - 1.0;
                let stock_ret = paths.stock[i + 1] / paths.stock[i] - 1.0;
                x *= 1.0 + (1.0 - pi[i]) * bond_ret + pi[i] * stock_ret;
                values.push(x);
            }
            values
        }
    };
    Ok(WealthPath::new(grid.clone(), values, params.x0))
}

/// `ln(X_t / x0)` per node under the log-Euler scheme.
pub fn log_wealth_fraction(params: &MarketParams, pi: &[f64], bpath: &BrownianPath) -> Vec<f64> {
    let nodes = bpath.grid.nodes();
    let (r, xi) = (params.r, params.xi);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(nodes.len());
    out.push(0.0);
    for i in 0..nodes.len() - 1 {
        let dt = nodes[i + 1] - nodes[i];
        let eta_dt = params.eta.integral(nodes[i + 1]) - params.eta.integral(nodes[i]);
        let p = pi[i];
        let db = bpath.values[i + 1] - bpath.values[i];
        acc += r * (1.0 - p) * dt + p * eta_dt - 0.5 * p * p * xi * xi * dt + p * xi * db;
        out.push(acc);
    }
    out
}

/// Self-financing wealth `X_t = X_0 + Σ M ΔD + Σ N ΔS`.
pub fn integrate_wealth_shares(
    params: &MarketParams,
    bond_units: &[f64],
    stock_units: &[f64],
    paths: &AssetPaths,
) -> Result<WealthPath> {
    let steps = paths.grid.steps();
    if bond_units.len() < steps || stock_units.len() < steps {
        return Err(invalid("share allocation shorter than the number of steps"));
    }
    let mut x = params.x0;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(x);
    for i in 0..steps {
        x += bond_units[i] * (paths.bond[i + 1] - paths.bond[i]) + stock_units[i] * (paths.stock[i + 1] - paths.stock[i]);
        values.push(x);
    }
    Ok(WealthPath::new(paths.grid.clone(), values, params.x0))
}

/// Unit holdings `(M, N)` that realize fraction `π` on a given wealth path.
pub fn fraction_to_shares(pi: &[f64], wealth: &[f64], paths: &AssetPaths) -> Result<(Vec<f64>, Vec<f64>)> {
    let steps = paths.grid.steps();
    if pi.len() < steps || wealth.len() < steps {
        return Err(invalid("fraction or wealth shorter than the number of steps"));
    }
    if let Some(i) = wealth.iter().take(steps).position(|&x| x <= 0.0) {
        return Err(invalid(format!("fraction form undefined at node {i}: wealth is not positive")));
    }
    let stock = (0..steps).map(|i| pi[i] * wealth[i] / paths.stock[i]).collect();
    let bond = (0..steps).map(|i| (1.0 - pi[i]) * wealth[i] / paths.bond[i]).collect();
    Ok((bond, stock))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StoppingKind {
    /// `τ = inf{t : S_t < e^{-r(T-t)}(S_T - ε)}` with full knowledge of `S_T`.
    SemiInfinite { epsilon: f64 },
    /// `τ = inf{t : S_t < e^{-r(T-t)}(b₁ - ε)}` knowing only `S_T ≥ b₁`; buys
    /// `leverage` times the wealth.
    IntervalLower { b1: f64, epsilon: f64, leverage: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingRule {
    pub kind: StoppingKind,
    /// `(node index, time)` of the first detection, `None` if never triggered.
    pub realized: Option<(usize, f64)>,
}

impl StoppingRule {
    pub fn triggered(&self) -> bool {
        self.realized.is_some()
    }

    /// Barrier level at time `t`.
    pub fn barrier(&self, params: &MarketParams, s_terminal: f64, t: f64) -> f64 {
        let level = match self.kind {
            StoppingKind::SemiInfinite { epsilon } => s_terminal - epsilon,
            StoppingKind::IntervalLower { b1, epsilon, .. } => b1 - epsilon,
        };
        (-params.r * (params.horizon - t)).exp() * level
    }
}

/// Result of running a buy-hold-sell arbitrage on one path.
#[derive(Clone, Debug, PartialEq)]
pub struct ArbitrageRun {
    pub rule: StoppingRule,
    pub wealth: WealthPath,
    pub bond_units: Vec<f64>,
    pub stock_units: Vec<f64>,
    /// Wealth at `T`, valued with the realized terminal price.
    pub terminal_wealth: f64,
    /// The value obtained when the purchase happens exactly on the barrier.
    pub barrier_terminal_wealth: f64,
}

fn run_barrier_strategy(
    params: &MarketParams,
    paths: &AssetPaths,
    s_terminal: f64,
    kind: StoppingKind,
) -> Result<ArbitrageRun> {
    let horizon = params.horizon;
    let x0 = params.x0;
    let leverage = match kind {
        StoppingKind::SemiInfinite { .. } => 1.0,
        StoppingKind::IntervalLower { leverage, .. } => leverage,
    };
    let mut rule = StoppingRule { kind, realized: None };
    let nodes = paths.grid.nodes();
    // detection on the discrete grid, strictly before T
    for (i, &t) in nodes.iter().enumerate().take(paths.grid.steps()) {
        if t >= horizon {
            break;
        }
        if paths.stock[i] < rule.barrier(params, s_terminal, t) {
            rule.realized = Some((i, t));
            break;
        }
    }
    let steps = paths.grid.steps();
    let mut bond_units = vec![x0; steps];
    let mut stock_units = vec![0.0; steps];
    let (terminal_wealth, barrier_terminal_wealth) = match rule.realized {
        None => {
            let bond_only = x0 * (params.r * horizon).exp();
            (bond_only, bond_only)
        }
        Some((k, tau)) => {
            let shares = leverage * x0 * (params.r * tau).exp() / paths.stock[k];
            let bond = x0 * (1.0 - leverage);
            for i in k..steps {
                stock_units[i] = shares;
                bond_units[i] = bond;
            }
            let grow = (params.r * horizon).exp();
            let level = match kind {
                StoppingKind::SemiInfinite { epsilon } => s_terminal - epsilon,
                StoppingKind::IntervalLower { b1, epsilon, .. } => b1 - epsilon,
            };
            (
                shares * s_terminal + bond * grow,
                grow * x0 * (leverage * s_terminal / level + 1.0 - leverage),
            )
        }
    };
    let wealth = integrate_wealth_shares(params, &bond_units, &stock_units, paths)?;
    Ok(ArbitrageRun { rule, wealth, bond_units, stock_units, terminal_wealth, barrier_terminal_wealth })
}

/// Buy-and-hold after the price drops below the discounted `S_T - ε`.
pub fn arbitrage_strategy_semiinfinite(
    params: &MarketParams,
    b_terminal: f64,
    paths: &AssetPaths,
    epsilon: f64,
) -> Result<ArbitrageRun> {
    let s_terminal = params.stock_price(params.horizon, b_terminal);
    if !(epsilon > 0.0 && epsilon < s_terminal) {
        return Err(invalid(format!("need 0 < ε < S_T = {s_terminal}, got ε = {epsilon}")));
    }
    run_barrier_strategy(params, paths, s_terminal, StoppingKind::SemiInfinite { epsilon })
}

/// Lower price bound implied by `B_T ≥ c₁`.
pub fn price_bound(params: &MarketParams, c: f64) -> f64 {
    params.stock_price(params.horizon, c)
}

/// Leveraged buy-and-hold for an insider who knows `c₁ ≤ B_T ≤ c₂`.
pub fn arbitrage_strategy_interval(
    params: &MarketParams,
    c1: f64,
    b_terminal: f64,
    paths: &AssetPaths,
    epsilon: f64,
    leverage: f64,
) -> Result<ArbitrageRun> {
    let b1 = price_bound(params, c1);
    if !(epsilon > 0.0 && epsilon < 0.5 * b1) {
        return Err(invalid(format!("need 0 < ε < b₁/2 = {}, got ε = {epsilon}", 0.5 * b1)));
    }
    if !(leverage > 0.0 && leverage.is_finite()) {
        return Err(invalid(format!("leverage must be positive, got {leverage}")));
    }
    if b_terminal < c1 {
        return Err(Error::InconsistentInfo(format!(
            "terminal value {b_terminal} below c1 = {c1} while G = 1"
        )));
    }
    let s_terminal = params.stock_price(params.horizon, b_terminal);
    run_barrier_strategy(params, paths, s_terminal, StoppingKind::IntervalLower { b1, epsilon, leverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{make_grid, sample_brownian, Refinement};

    fn grid(n: usize) -> TimeGrid {
        make_grid(1.0, n, 0.0, Refinement::Uniform).unwrap()
    }

    #[test]
    fn merton_and_insider_fractions() {
        let p = MarketParams::reference();
        assert!((merton_fraction(&p, 0.0, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((merton_fraction(&p, 0.0, 0.5).unwrap() - 4.0).abs() < 1e-12);
        assert!(merton_fraction(&p, 0.0, 1.0).is_err());
        let flat = MarketParams::new(0.05, 0.05, 0.3, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(merton_fraction(&flat, 0.3, 0.7).unwrap(), 0.0);

        assert!((insider_fraction(&p, 0.0, 0.2, 0.3).unwrap() - merton_fraction(&p, 0.2, 0.3).unwrap()).abs() < 1e-14);
        assert!((insider_fraction(&p, 0.4, 0.0, 0.0).unwrap() - 4.0).abs() < 1e-12);
        // α = ξ gives exactly one extra unit of stock fraction
        let a = 0.2;
        assert!((insider_fraction(&p, a, 0.5, 0.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fraction_integration_limits() {
        let p = MarketParams::reference();
        let b = sample_brownian(&grid(64), 2);
        let bond = integrate_wealth_fraction(&p, &vec![0.0; 64], &b).unwrap();
        for (t, x) in b.grid.nodes().iter().zip(&bond.values) {
            assert!((x - (0.02 * t).exp()).abs() < 1e-14);
        }
        let stock = integrate_wealth_fraction(&p, &vec![1.0; 64], &b).unwrap();
        let s = asset_paths(&p, &b).unwrap();
        for (x, st) in stock.values.iter().zip(&s.stock) {
            assert!((x - st).abs() < 1e-13 * st);
        }
        assert!(integrate_wealth_fraction(&p, &[f64::NAN; 64], &b).is_err());
        assert!(integrate_wealth_fraction(&p, &[0.0; 10], &b).is_err());
    }

    #[test]
    fn share_integration_cases() {
        let cash = MarketParams::new(0.0, 0.1, 0.2, 1.0, 1.0, 2.0).unwrap();
        let b = sample_brownian(&grid(32), 9);
        let paths = asset_paths(&cash, &b).unwrap();
        let w = integrate_wealth_shares(&cash, &[2.0; 32], &[0.0; 32], &paths).unwrap();
        assert!(w.values.iter().all(|&x| x == 2.0));

        // one share financed by borrowing s0 under r = 0: X_t = x0 + S_t - s0
        let w = integrate_wealth_shares(&cash, &[1.0; 32], &[1.0; 32], &paths).unwrap();
        for (x, s) in w.values.iter().zip(&paths.stock) {
            assert!((x - (2.0 + s - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn leveraged_long_with_negative_bond_leg_stays_in_hplus() {
        let p = MarketParams::reference();
        let b = sample_brownian(&grid(50), 4);
        let paths = asset_paths(&p, &b).unwrap();
        // 1.5 shares bought with 1.0 of wealth: bond leg is -0.5
        let w = integrate_wealth_shares(&p, &[-0.5; 50], &[1.5; 50], &paths).unwrap();
        assert!(w.values.iter().all(|&x| x > 0.0));
        assert!(w.admissibility.in_hplus());
    }

    #[test]
    fn admissibility_classes() {
        let r = classify_admissibility(&[1.0, 1.0, 1.0], 1.0);
        assert_eq!(r.class, Admissibility::InHplus);
        assert_eq!(r.a, 0.0);
        let r = classify_admissibility(&[1.0, 0.5, -1.0, 2.0], 1.0);
        assert_eq!(r.class, Admissibility::TemporaryBankruptcy(vec![2]));
        assert_eq!(r.a, 2.0);
        let r = classify_admissibility(&[1.0, -0.5, -0.2], 1.0);
        assert_eq!(r.class, Admissibility::InHa);
        assert_eq!(r.a, 1.5);
    }

    #[test]
    fn untriggered_arbitrage_is_bond_only() {
        let p = MarketParams::reference();
        let g = grid(100);
        // a steady decline stays above the discounted terminal level minus ε
        let values: Vec<f64> = g.nodes().iter().map(|t| -3.0 * t).collect();
        let b = BrownianPath { grid: g, values };
        let paths = asset_paths(&p, &b).unwrap();
        let run = arbitrage_strategy_semiinfinite(&p, -3.0, &paths, 0.05).unwrap();
        assert!(!run.rule.triggered());
        assert!((run.terminal_wealth - 0.02f64.exp()).abs() < 1e-15);
        assert!((run.wealth.last() - 0.02f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn triggered_arbitrage_dominates_the_barrier_value() {
        let p = MarketParams::reference();
        let g = grid(200);
        // dip to -1 at t = 0.5, end at 0
        let values: Vec<f64> = g.nodes().iter().map(|&t| if t <= 0.5 { -2.0 * t } else { -2.0 * (1.0 - t) }).collect();
        let b = BrownianPath { grid: g, values };
        let paths = asset_paths(&p, &b).unwrap();
        let run = arbitrage_strategy_semiinfinite(&p, 0.0, &paths, 0.05).unwrap();
        assert!(run.rule.triggered());
        let (k, tau) = run.rule.realized.unwrap();
        let s_t = p.stock_price(1.0, 0.0);
        assert!(paths.stock[k] < run.rule.barrier(&p, s_t, tau));
        let exact = 0.02f64.exp() * s_t / (s_t - 0.05);
        assert!((run.barrier_terminal_wealth - exact).abs() < 1e-15);
        assert!(run.terminal_wealth >= exact);
        assert!((run.wealth.last() - run.terminal_wealth).abs() < 1e-12);
        assert!(run.wealth.admissibility.in_hplus());
    }

    #[test]
    fn arbitrage_parameter_errors() {
        let p = MarketParams::reference();
        let b = sample_brownian(&grid(10), 1);
        let paths = asset_paths(&p, &b).unwrap();
        assert!(arbitrage_strategy_semiinfinite(&p, 0.0, &paths, 0.0).is_err());
        assert!(arbitrage_strategy_semiinfinite(&p, 0.0, &paths, 10.0).is_err());
        assert!(arbitrage_strategy_interval(&p, -1.0, 0.0, &paths, 0.6, 1.0).is_err());
        assert!(arbitrage_strategy_interval(&p, -1.0, 0.0, &paths, 0.05, 0.0).is_err());
        assert!(arbitrage_strategy_interval(&p, -1.0, -1.5, &paths, 0.05, 1.0).is_err());
    }
}
