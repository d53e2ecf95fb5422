//! Grids, free and bridged Brownian paths, and the bond/stock prices on them.
//!
//! `cargo run --release --example market_paths`

use insider::market::{asset_paths, make_grid, sample_bridge, sample_brownian, MarketParams, Refinement};
use insider::rng::path_rng;
use insider::sim::{run_paths, sample_joint};
use insider::drift::InsiderInfo;

fn main() -> insider::Result<()> {
    let params = MarketParams::reference();
    let uniform = make_grid(params.horizon, 8, 0.0, Refinement::Uniform)?;
    let geometric = make_grid(params.horizon, 8, 1e-3, Refinement::Geometric)?;
    println!("uniform nodes   {:?}", uniform.nodes());
    println!("geometric nodes {:?}", geometric.nodes());

    let free = sample_brownian(&uniform, 7);
    let prices = asset_paths(&params, &free)?;
    println!("\n{:>6} {:>10} {:>10} {:>10}", "t", "B", "S", "D");
    for i in 0..uniform.len() {
        println!("{:>6.3} {:>10.5} {:>10.5} {:>10.5}", uniform.nodes()[i], free.values[i], prices.stock[i], prices.bond[i]);
    }

    // a bridge pinned at B_T = 0.5 hits its endpoint exactly
    let fine = make_grid(params.horizon, 1000, 0.0, Refinement::Uniform)?;
    let bridge = sample_bridge(&fine, params.horizon, 0.5, 11)?;
    println!("\nbridge end value {}", bridge.last());

    // joint draws: B_T first, then the indicator, then a bridge; check Var(B_{T/2}) = T/2
    let info = InsiderInfo::interval(-1.0, 1.0, params.horizon)?;
    let half = make_grid(params.horizon, 2, 0.0, Refinement::Uniform)?;
    let mid: Vec<f64> = run_paths(200_000, 3, |_, rng| sample_joint(&info, &half, rng).unwrap().path.values[1]);
    let var = mid.iter().map(|x| x * x).sum::<f64>() / mid.len() as f64;
    println!("Var(B_(T/2)) over 200000 joint draws = {var:.4} (exact 0.5)");

    // every path owns a counter-based stream, so results do not depend on thread count
    let a: f64 = rand::Rng::random(&mut path_rng(3, 17));
    let b: f64 = rand::Rng::random(&mut path_rng(3, 17));
    assert_eq!(a, b);
    Ok(())
}
