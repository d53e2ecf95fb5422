//! Bond/stock market with deterministic coefficients, time grids and Brownian
//! path sampling (free and bridge-pinned).

use crate::error::{invalid, Error, Result};
use crate::rng::aux_rng;
use rand::Rng;
use rand_distr::StandardNormal;

/// Piecewise-constant deterministic drift `η(t)`.
///
/// `starts[0] == 0`; `values[i]` applies on `[starts[i], starts[i+1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftSchedule {
    starts: Vec<f64>,
    values: Vec<f64>,
}

impl DriftSchedule {
    pub fn constant(eta: f64) -> Self {
        DriftSchedule { starts: vec![0.0], values: vec![eta] }
    }

    pub fn piecewise(starts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if starts.is_empty() || starts.len() != values.len() || starts[0] != 0.0 {
            return Err(invalid("drift schedule needs matching starts/values with starts[0] = 0"));
        }
        if starts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("drift schedule starts must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("drift values must be finite"));
        }
        Ok(DriftSchedule { starts, values })
    }

    pub fn at(&self, t: f64) -> f64 {
        let idx = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        self.values[idx]
    }

    /// `∫_0^t η(u) du`.
    pub fn integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, (&s, &v)) in self.starts.iter().zip(&self.values).enumerate() {
            if s >= t {
                break;
            }
            let end = self.starts.get(i + 1).copied().unwrap_or(f64::INFINITY).min(t);
            acc += v * (end - s);
        }
        acc
    }

    /// `∫_0^t g(η(u)) du` for a function of the drift value.
    pub fn integral_of(&self, t: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (i, (&s, &v)) in self.starts.iter().zip(&self.values).enumerate() {
            if s >= t {
                break;
            }
            let end = self.starts.get(i + 1).copied().unwrap_or(f64::INFINITY).min(t);
            acc += g(v) * (end - s);
        }
        acc
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.starts.iter().copied().zip(self.values.iter().copied())
    }
}

/// Interest rate, drift, volatility, horizon, initial price and wealth.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketParams {
    pub r: f64,
    pub eta: DriftSchedule,
    pub xi: f64,
    pub horizon: f64,
    pub s0: f64,
    pub x0: f64,
}

impl MarketParams {
    pub fn new(r: f64, eta: f64, xi: f64, horizon: f64, s0: f64, x0: f64) -> Result<Self> {
        Self::with_schedule(r, DriftSchedule::constant(eta), xi, horizon, s0, x0)
    }

    pub fn with_schedule(
        r: f64,
        eta: DriftSchedule,
        xi: f64,
        horizon: f64,
        s0: f64,
        x0: f64,
    ) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid(format!("interest rate must be finite and >= 0, got {r}")));
        }
        if !(xi > 0.0 && xi.is_finite() && (1.0 / xi).is_finite()) {
            return Err(invalid(format!("volatility must be positive with finite inverse, got {xi}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if !(s0 > 0.0 && s0.is_finite()) || !(x0 > 0.0 && x0.is_finite()) {
            return Err(invalid("initial price and wealth must be positive"));
        }
        Ok(MarketParams { r, eta, xi, horizon, s0, x0 })
    }

    /// The desk-scale reference market: r = 0.02, η = 0.1, ξ = 0.2, T = 1, S₀ = X₀ = 1.
    pub fn reference() -> Self {
        MarketParams::new(0.02, 0.1, 0.2, 1.0, 1.0, 1.0).expect("valid reference market")
    }

    /// Market price of risk `β(t) = (η(t) - r)/ξ`.
    pub fn sharpe(&self, t: f64) -> f64 {
        (self.eta.at(t) - self.r) / self.xi
    }

    /// `∫_0^t β(u)² du`.
    pub fn sharpe_sq_integral(&self, t: f64) -> f64 {
        let (r, xi) = (self.r, self.xi);
        self.eta.integral_of(t, |eta| ((eta - r) / xi).powi(2))
    }

    /// Exact price `S_t` given the Brownian value `B_t`.
    pub fn stock_price(&self, t: f64, b: f64) -> f64 {
        self.s0 * (self.eta.integral(t) - 0.5 * self.xi * self.xi * t + self.xi * b).exp()
    }

    /// Brownian level at which `S_T = s`.
    pub fn brownian_for_price(&self, t: f64, s: f64) -> f64 {
        ((s / self.s0).ln() - self.eta.integral(t) + 0.5 * self.xi * self.xi * t) / self.xi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refinement {
    Uniform,
    /// Remaining time `T - t` shrinks geometrically down to the terminal gap.
    Geometric,
}

impl std::str::FromStr for Refinement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Refinement::Uniform),
            "geometric" => Ok(Refinement::Geometric),
            other => Err(invalid(format!("unknown refinement '{other}'"))),
        }
    }
}

impl std::fmt::Display for Refinement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Refinement::Uniform => "uniform",
            Refinement::Geometric => "geometric",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    horizon: f64,
    terminal_gap: f64,
}

impl TimeGrid {
    /// Builds a grid from explicit nodes on `[0, horizon]`.
    pub fn from_nodes(nodes: Vec<f64>, horizon: f64) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(invalid("grid needs at least two nodes starting at 0"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid nodes must be strictly increasing"));
        }
        let last = *nodes.last().unwrap();
        if last > horizon {
            return Err(invalid(format!("grid ends at {last} beyond horizon {horizon}")));
        }
        Ok(TimeGrid { terminal_gap: horizon - last, nodes, horizon })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }
    pub fn terminal_gap(&self) -> f64 {
        self.terminal_gap
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }
    pub fn last(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
    pub fn ends_at_horizon(&self) -> bool {
        self.terminal_gap == 0.0
    }

    /// Index of the last node `≤ t` (within a relative tolerance of `1e-9`).
    pub fn index_at_or_before(&self, t: f64) -> usize {
        let slack = 1e-9 * self.horizon;
        self.nodes.partition_point(|&u| u <= t + slack).saturating_sub(1)
    }

    /// Keeps every `factor`-th step; `factor` must divide the step count.
    pub fn coarsen(&self, factor: usize) -> Result<TimeGrid> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(invalid(format!("cannot coarsen {} steps by {factor}", self.steps())));
        }
        let nodes = self.nodes.iter().copied().step_by(factor).collect();
        TimeGrid::from_nodes(nodes, self.horizon)
    }
}

/// Grid on `[0, T - gap]` with `n_steps` steps.
pub fn make_grid(horizon: f64, n_steps: usize, terminal_gap: f64, refinement: Refinement) -> Result<TimeGrid> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    if n_steps < 1 {
        return Err(invalid("need at least one step"));
    }
    if !(terminal_gap >= 0.0 && terminal_gap < horizon) {
        return Err(invalid(format!("terminal gap {terminal_gap} must lie in [0, T)")));
    }
    let end = horizon - terminal_gap;
    let n = n_steps as f64;
    let mut nodes: Vec<f64> = match refinement {
        Refinement::Uniform => (0..=n_steps).map(|i| end * i as f64 / n).collect(),
        Refinement::Geometric => {
            if terminal_gap <= 0.0 {
                return Err(invalid("geometric refinement needs a positive terminal gap"));
            }
            let ratio = terminal_gap / horizon;
            (0..=n_steps).map(|i| horizon - horizon * ratio.powf(i as f64 / n)).collect()
        }
    };
    nodes[0] = 0.0;
    nodes[n_steps] = end;
    TimeGrid::from_nodes(nodes, horizon)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl BrownianPath {
    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

pub fn sample_brownian_with<R: Rng + ?Sized>(grid: &TimeGrid, rng: &mut R) -> BrownianPath {
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut b = 0.0;
    for w in grid.nodes().windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        b += (w[1] - w[0]).sqrt() * z;
        values.push(b);
    }
    BrownianPath { grid: grid.clone(), values }
}

/// Free Brownian path; identical output for identical seed.
pub fn sample_brownian(grid: &TimeGrid, seed: u64) -> BrownianPath {
    sample_brownian_with(grid, &mut aux_rng(seed))
}

/// Brownian path conditioned on `B_T = terminal_value`, sampled forward with
/// the exact bridge transition.
pub fn sample_bridge_with<R: Rng + ?Sized>(
    grid: &TimeGrid,
    terminal_time: f64,
    terminal_value: f64,
    rng: &mut R,
) -> Result<BrownianPath> {
    if !terminal_value.is_finite() {
        return Err(invalid("bridge terminal value must be finite"));
    }
    let last = grid.last();
    if last > terminal_time {
        return Err(invalid(format!(
            "grid node {last} lies beyond the pinned time {terminal_time}"
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut b = 0.0;
    for w in grid.nodes().windows(2) {
        let (t, u) = (w[0], w[1]);
        if u >= terminal_time {
            b = terminal_value;
        } else {
            let remaining = terminal_time - t;
            let dt = u - t;
            let mean = b + dt * (terminal_value - b) / remaining;
            let var = dt * (remaining - dt) / remaining;
            let z: f64 = rng.sample(StandardNormal);
            b = mean + var.sqrt() * z;
        }
        values.push(b);
    }
    Ok(BrownianPath { grid: grid.clone(), values })
}

pub fn sample_bridge(grid: &TimeGrid, terminal_time: f64, terminal_value: f64, seed: u64) -> Result<BrownianPath> {
    sample_bridge_with(grid, terminal_time, terminal_value, &mut aux_rng(seed))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssetPaths {
    pub grid: TimeGrid,
    pub bond: Vec<f64>,
    pub stock: Vec<f64>,
}

/// Bond `D_t = e^{rt}` and stock from the exact exponential solution, nodewise.
pub fn asset_paths(params: &MarketParams, bpath: &BrownianPath) -> Result<AssetPaths> {
    if bpath.grid.last() > params.horizon + 1e-12 * params.horizon {
        return Err(invalid("Brownian path extends beyond the market horizon"));
    }
    let nodes = bpath.grid.nodes();
    let bond = nodes.iter().map(|&t| (params.r * t).exp()).collect();
    let stock = nodes
        .iter()
        .zip(&bpath.values)
        .map(|(&t, &b)| params.stock_price(t, b))
        .collect();
    Ok(AssetPaths { grid: bpath.grid.clone(), bond, stock })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_rng;

    #[test]
    fn uniform_grid_nodes() {
        let g = make_grid(1.0, 4, 0.0, Refinement::Uniform).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = make_grid(1.0, 4, 0.1, Refinement::Uniform).unwrap();
        assert!((g.last() - 0.9).abs() < 1e-15);
        assert!((g.terminal_gap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn geometric_grid_refines_toward_end() {
        let g = make_grid(1.0, 100, 1e-4, Refinement::Geometric).unwrap();
        let n = g.nodes();
        assert_eq!(n[0], 0.0);
        assert!((n[100] - (1.0 - 1e-4)).abs() < 1e-15);
        assert!(n[100] - n[99] < n[1] - n[0]);
        let steps: Vec<f64> = n.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(steps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn grid_errors() {
        assert!(make_grid(0.0, 4, 0.0, Refinement::Uniform).is_err());
        assert!(make_grid(1.0, 4, 1.0, Refinement::Uniform).is_err());
        assert!(make_grid(1.0, 0, 0.0, Refinement::Uniform).is_err());
        assert!(make_grid(1.0, 4, 0.0, Refinement::Geometric).is_err());
    }

    #[test]
    fn brownian_starts_at_zero_and_is_deterministic() {
        let g = make_grid(1.0, 50, 0.0, Refinement::Uniform).unwrap();
        let a = sample_brownian(&g, 11);
        let b = sample_brownian(&g, 11);
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a, b);
        assert_ne!(a, sample_brownian(&g, 12));
    }

    #[test]
    fn bridge_pins_terminal_value() {
        let g = make_grid(1.0, 20, 0.0, Refinement::Uniform).unwrap();
        let p = sample_bridge(&g, 1.0, 0.7, 3).unwrap();
        assert_eq!(p.last(), 0.7);
        assert!(sample_bridge(&g, 0.5, 0.0, 3).is_err());
        assert!(sample_bridge(&g, 1.0, f64::NAN, 3).is_err());
    }

    #[test]
    fn asset_paths_exact_solution() {
        let params = MarketParams::new(0.02, 0.1, 0.2, 1.0, 1.0, 1.0).unwrap();
        let g = make_grid(1.0, 10, 0.0, Refinement::Uniform).unwrap();
        let flat = BrownianPath { values: vec![0.0; g.len()], grid: g.clone() };
        let a = asset_paths(&params, &flat).unwrap();
        // S_T = exp(0.1 - 0.02) with B_T = 0
        assert!((a.stock[10] - 0.08f64.exp()).abs() < 1e-15);
        assert_eq!(a.bond[0], 1.0);
        assert!(a.bond.windows(2).all(|w| w[1] > w[0]));

        let zero_rate = MarketParams::new(0.0, 0.0, 1e-3, 1.0, 2.0, 1.0).unwrap();
        let b = asset_paths(&zero_rate, &flat).unwrap();
        assert!(b.bond.iter().all(|&d| d == 1.0));
        for (t, s) in g.nodes().iter().zip(&b.stock) {
            assert!((s - 2.0 * (-0.5e-6 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn asset_paths_are_causal() {
        let params = MarketParams::reference();
        let g = make_grid(1.0, 30, 0.0, Refinement::Uniform).unwrap();
        let p = sample_brownian_with(&g, &mut path_rng(5, 0));
        let mut q = p.clone();
        for v in q.values.iter_mut().skip(20) {
            *v += 1.0;
        }
        let (a, b) = (asset_paths(&params, &p).unwrap(), asset_paths(&params, &q).unwrap());
        assert_eq!(a.stock[..20], b.stock[..20]);
    }

    #[test]
    fn piecewise_drift_integral() {
        let d = DriftSchedule::piecewise(vec![0.0, 0.5], vec![0.1, 0.3]).unwrap();
        assert!((d.integral(1.0) - 0.2).abs() < 1e-15);
        assert!((d.integral(0.25) - 0.025).abs() < 1e-15);
        assert_eq!(d.at(0.5), 0.3);
        assert!(DriftSchedule::piecewise(vec![0.1], vec![0.1]).is_err());
    }
}
