//! The information drift `α` for exact, interval and union information.
//!
//! `cargo run --release --example information_drift`

use insider::drift::{alpha_exact, alpha_indicator, conditional_mass, drift_surface, InsiderInfo};
use insider::verify::mixture_zero_sup;

fn main() -> insider::Result<()> {
    let horizon = 1.0;
    println!("exact: α_0.5 with B_T = 1, B_t = 0.2 -> {}", alpha_exact(1.0, 0.2, 0.5, horizon)?);

    let interval = InsiderInfo::interval(-1.0, 1.0, horizon)?;
    let union = InsiderInfo::unit_union(horizon)?;
    println!("\n{:>5} {:>6} {:>12} {:>12} {:>12} {:>12}", "t", "x", "α¹ interval", "α⁰ interval", "α¹ union", "P(G=1|x)");
    for t in [0.1, 0.5, 0.9, 0.999] {
        for x in [-1.5, 0.0, 0.9] {
            println!(
                "{t:>5} {x:>6} {:>12.5} {:>12.5} {:>12.5} {:>12.5}",
                alpha_indicator(&interval, 1, x, t)?,
                alpha_indicator(&interval, 0, x, t)?,
                alpha_indicator(&union, 1, x, t)?,
                conditional_mass(&interval, 1, x, t)?,
            );
        }
    }

    // far in the tails the probabilities underflow but the drift does not
    println!("\nα¹(x = -40, t = 0.5) = {}", alpha_indicator(&interval, 1, -40.0, 0.5)?);

    // the drift averages to zero under P: Σ_g P(G=g|x) α^g = 0
    let sup = mixture_zero_sup(&interval, 100, 100, 1e-4)?;
    println!("sup |Σ_g P(G=g|x) α^g| over a 100 x 100 grid = {sup:e}");

    let surface = drift_surface(&interval, &[0.5], &[-1.0, 0.0, 1.0])?;
    for p in surface {
        println!("t={} x={} g={} α={:.6} mass={:.6}", p.t, p.x, p.g, p.alpha, p.mass);
    }
    Ok(())
}
