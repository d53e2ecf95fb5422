//! Monte Carlo ensembles: settings, parallel path loops and joint sampling of
//! the insider's information with the Brownian path.
//!
//! The joint law of `(B, G)` is sampled exactly: draw `B_T ~ N(0, T)`, set
//! `G` from it, then fill in the path with a Brownian bridge pinned at `B_T`.

use crate::drift::{InfoKind, InsiderInfo};
use crate::error::{invalid, Error, Result};
use crate::gauss::log_interval_prob;
use crate::market::{make_grid, sample_bridge_with, BrownianPath, Refinement, TimeGrid};
use crate::rng::path_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Ensembles below this size are refused.
pub const MIN_PATHS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct SimSettings {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// Terminal gap as a fraction of the horizon.
    pub delta_frac: f64,
    pub refinement: Refinement,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings { n_paths: 10_000, n_steps: 1000, seed: 1, delta_frac: 1e-4, refinement: Refinement::Geometric }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < MIN_PATHS {
            return Err(invalid(format!("need at least {MIN_PATHS} paths, got {}", self.n_paths)));
        }
        if self.n_steps < 1 {
            return Err(invalid("need at least one step"));
        }
        if !(self.delta_frac > 0.0 && self.delta_frac < 1.0) {
            return Err(invalid(format!("delta_frac must lie in (0, 1), got {}", self.delta_frac)));
        }
        Ok(())
    }

    /// Uniform grid on `[0, T]`, used where nothing is singular at `T`.
    pub fn full_grid(&self, horizon: f64) -> Result<TimeGrid> {
        make_grid(horizon, self.n_steps, 0.0, Refinement::Uniform)
    }

    /// Grid on `[0, T - δ]` with the configured refinement.
    pub fn truncated_grid(&self, horizon: f64) -> Result<TimeGrid> {
        make_grid(horizon, self.n_steps, self.delta_frac * horizon, self.refinement)
    }

    /// Grid for the insider strategy: truncated at `T - δ` for exact terminal
    /// information (the fraction blows up at `T`), and for the indicator kinds
    /// the truncated grid plus one last step to `T`, held with the drift at `T - δ`.
    pub fn insider_grid(&self, info: &InsiderInfo) -> Result<TimeGrid> {
        let grid = self.truncated_grid(info.horizon)?;
        if info.is_indicator() {
            let mut nodes = grid.nodes().to_vec();
            nodes.push(info.horizon);
            TimeGrid::from_nodes(nodes, info.horizon)
        } else {
            Ok(grid)
        }
    }
}

/// Runs `f` once per path with that path's own random stream and returns the
/// results in path order, whatever the worker count.
pub fn run_paths<T, F>(n_paths: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            f(i, &mut rng)
        })
        .collect()
}

/// As [`run_paths`], stopping at the first error in path order.
pub fn try_run_paths<T, F>(n_paths: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync + Send,
{
    run_paths(n_paths, seed, f).into_iter().collect()
}

/// One draw of the insider's information together with a compatible path.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDraw {
    pub b_terminal: f64,
    /// Realized `G`: `B_T` itself or the indicator value.
    pub g: f64,
    pub path: BrownianPath,
}

/// `B_T ~ N(0, T)`, `G` from it, and a bridge on `grid` pinned at `B_T`.
pub fn sample_joint<R: Rng + ?Sized>(info: &InsiderInfo, grid: &TimeGrid, rng: &mut R) -> Result<JointDraw> {
    let z: f64 = rng.sample(StandardNormal);
    let b_terminal = info.horizon.sqrt() * z;
    let path = sample_bridge_with(grid, info.horizon, b_terminal, rng)?;
    Ok(JointDraw { b_terminal, g: info.realize(b_terminal), path })
}

/// Same as [`sample_joint`] but conditioned on `G = g` (indicator kinds only).
pub fn sample_conditioned<R: Rng + ?Sized>(
    info: &InsiderInfo,
    g: u8,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<JointDraw> {
    let b_terminal = sample_terminal_given(info, g, rng)?;
    let path = sample_bridge_with(grid, info.horizon, b_terminal, rng)?;
    Ok(JointDraw { b_terminal, g: g as f64, path })
}

const MAX_REJECTIONS: usize = 1_000_000;

/// `B_T` drawn from `N(0, T)` restricted to `{G = g}`.
pub fn sample_terminal_given<R: Rng + ?Sized>(info: &InsiderInfo, g: u8, rng: &mut R) -> Result<f64> {
    if !info.is_indicator() {
        return Err(Error::UnsupportedInfo("conditioning needs indicator information".into()));
    }
    if g > 1 {
        return Err(invalid(format!("indicator value must be 0 or 1, got {g}")));
    }
    let sd = info.horizon.sqrt();
    let target = g as f64;
    if let (InfoKind::Interval { c1, c2 }, 1) = (info.kind, g) {
        // narrow or remote intervals: uniform proposal with Gaussian acceptance
        if log_interval_prob(c1 / sd, c2 / sd) < (0.05f64).ln() {
            let nearest = if c1 > 0.0 { c1 } else if c2 < 0.0 { c2 } else { 0.0 };
            for _ in 0..MAX_REJECTIONS {
                let b = c1 + (c2 - c1) * rng.random::<f64>();
                let accept = (-(b * b - nearest * nearest) / (2.0 * info.horizon)).exp();
                if rng.random::<f64>() < accept {
                    return Ok(b);
                }
            }
            return Err(invalid("conditioned sampling did not accept within the rejection budget"));
        }
    }
    for _ in 0..MAX_REJECTIONS {
        let z: f64 = rng.sample(StandardNormal);
        let b = sd * z;
        if info.realize(b) == target {
            return Ok(b);
        }
    }
    Err(invalid("conditioned sampling did not accept within the rejection budget"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_path_order() {
        let a = run_paths(500, 9, |i, rng| (i, rng.random::<u64>()));
        let b = run_paths(500, 9, |i, rng| (i, rng.random::<u64>()));
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(k, (i, _))| k as u64 == *i));
    }

    #[test]
    fn joint_draw_is_consistent() {
        let info = InsiderInfo::interval(-1.0, 1.0, 1.0).unwrap();
        let grid = make_grid(1.0, 20, 0.0, Refinement::Uniform).unwrap();
        let mut rng = path_rng(3, 0);
        for _ in 0..50 {
            let d = sample_joint(&info, &grid, &mut rng).unwrap();
            assert_eq!(d.path.last(), d.b_terminal);
            assert_eq!(d.g, info.realize(d.b_terminal));
        }
    }

    #[test]
    fn conditioned_draws_respect_the_event() {
        let mut rng = path_rng(4, 0);
        let narrow = InsiderInfo::interval(2.0, 2.001, 1.0).unwrap();
        let union = InsiderInfo::unit_union(1.0).unwrap();
        for _ in 0..200 {
            let b = sample_terminal_given(&narrow, 1, &mut rng).unwrap();
            assert!((2.0..=2.001).contains(&b));
            assert_eq!(union.realize(sample_terminal_given(&union, 0, &mut rng).unwrap()), 0.0);
        }
        assert!(sample_terminal_given(&InsiderInfo::exact(1.0).unwrap(), 1, &mut rng).is_err());
    }

    #[test]
    fn settings_validation() {
        let s = SimSettings { n_paths: 10, ..Default::default() };
        assert!(s.validate().is_err());
        let grid = SimSettings::default().insider_grid(&InsiderInfo::unit_union(1.0).unwrap()).unwrap();
        assert!(grid.ends_at_horizon());
        let grid = SimSettings::default().insider_grid(&InsiderInfo::exact(1.0).unwrap()).unwrap();
        assert!((grid.terminal_gap() - 1e-4).abs() < 1e-15);
    }
}
