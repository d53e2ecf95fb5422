//! Buy-and-hold arbitrages of an insider who knows `S_T` exactly, or only
//! that `B_T` lies in an interval.
//!
//! `cargo run --release --example arbitrage`

use insider::market::{asset_paths, make_grid, sample_bridge, MarketParams, Refinement};
use insider::sim::SimSettings;
use insider::strategies::{arbitrage_strategy_semiinfinite, price_bound};
use insider::verify::{interval_certificate, semiinfinite_certificate};

fn main() -> insider::Result<()> {
    let params = MarketParams::reference();
    let eps = 0.05 * params.s0;

    // one path with B_T = 0.3: wait for the dip, buy, hold
    let grid = make_grid(params.horizon, 1000, 0.0, Refinement::Uniform)?;
    let path = sample_bridge(&grid, params.horizon, 0.3, 21)?;
    let prices = asset_paths(&params, &path)?;
    let run = arbitrage_strategy_semiinfinite(&params, 0.3, &prices, eps)?;
    println!("τ = {:?}, X_T = {:.6}, bond = {:.6}", run.rule.realized, run.terminal_wealth, params.x0 * (params.r * params.horizon).exp());

    let settings = SimSettings { n_paths: 10_000, ..SimSettings::default() };
    let semi = semiinfinite_certificate(&params, eps, &settings)?;
    println!("\nsemi-infinite: min excess {:e}, strictly better on {:.3}, detected {}", semi.min_excess, semi.strict_fraction, semi.detected());

    println!("price bound b₁ for B_T ≥ -1: {:.6}", price_bound(&params, -1.0));
    for leverage in [1.0, 5.0] {
        let c = interval_certificate(&params, -1.0, 1.0, eps, leverage, true, &settings)?;
        println!(
            "interval, leverage {leverage}: min excess {:e}, strict {:.3}, all in H+ {}, detected {}",
            c.min_excess, c.strict_fraction, c.all_hplus, c.detected()
        );
    }
    Ok(())
}
