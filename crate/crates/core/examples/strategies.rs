//! Merton and insider log-optimal strategies on the same market, and the
//! equivalence of the fraction and share descriptions of wealth.
//!
//! `cargo run --release --example strategies`

use insider::drift::InsiderInfo;
use insider::market::{asset_paths, MarketParams};
use insider::rng::aux_rng;
use insider::sim::SimSettings;
use insider::strategies::{
    fraction_to_shares, integrate_wealth_fraction_with, integrate_wealth_shares, merton_fraction, FractionScheme,
};
use insider::utility::{mc_expected_utility, merton_value, simulate_strategy, StrategyKind, UtilitySpec};

fn main() -> insider::Result<()> {
    let params = MarketParams::reference();
    println!("Merton fraction, log utility: {}", merton_fraction(&params, 0.0, 0.0)?);

    let settings = SimSettings { n_paths: 20_000, n_steps: 500, ..SimSettings::default() };
    let closed = merton_value(&params, UtilitySpec::log())?;
    let mc = mc_expected_utility(StrategyKind::Merton, None, &params, UtilitySpec::log(), &settings)?;
    println!("E[ln X_T] Merton: closed form {closed:.6}, MC {:.6} ± {:.6}", mc.value, mc.std_error.unwrap());

    let info = InsiderInfo::interval(-1.0, 1.0, params.horizon)?;
    let ins = mc_expected_utility(StrategyKind::Insider, Some(&info), &params, UtilitySpec::log(), &settings)?;
    println!("E[ln X_T] insider (interval): MC {:.6} ± {:.6}", ins.value, ins.std_error.unwrap());

    // one insider path, carried over to unit holdings (M, N) and back
    let w = simulate_strategy(StrategyKind::Insider, Some(&info), &params, 0.0, &settings, &mut aux_rng(5))?;
    let sf = integrate_wealth_fraction_with(&params, &w.pi, &w.path, FractionScheme::SelfFinancing)?;
    let prices = asset_paths(&params, &w.path)?;
    let (bond, stock) = fraction_to_shares(&w.pi, &sf.values, &prices)?;
    let shares = integrate_wealth_shares(&params, &bond, &stock, &prices)?;
    let gap = sf.values.iter().zip(&shares.values).map(|(a, b)| (a - b).abs() / a).fold(0.0, f64::max);
    println!("G = {:?}, X_T = {:.6}, fraction vs share max relative gap {gap:e}", w.g, sf.last());
    println!("admissibility: {}", sf.admissibility.class.tag());
    Ok(())
}
