//! Numerical checks of the analytic claims: the lemma integral bound, the
//! moment bound on `E[α²]`, the union drift bound, Novikov's condition and
//! the pathwise log-wealth identity.
//!
//! `cargo run --release --example verification`

use insider::drift::InsiderInfo;
use insider::market::MarketParams;
use insider::sim::SimSettings;
use insider::verify::*;

fn main() -> insider::Result<()> {
    let lemma = lemma_i_profile(-1.0, 1.0, 1.0, 20)?;
    println!("lemma integral: sup over 20 times = {:.4}", lemma.sup);

    let interval = InsiderInfo::interval(-1.0, 1.0, 1.0)?;
    let bound = alpha_sq_bound_check(&interval, &[0.1, 0.5, 0.9, 0.99, 0.999])?;
    println!("E[α²]·sqrt(t(T-t)) ratios {:?}, K = {:.4}", bound.ratios, bound.k);

    let (xs, ts) = union_grids(1.0, 200, 0.9, 1e-4, 20);
    let u = union_alpha_bound(1.0, &xs, &ts)?;
    println!("union α¹ on A^c: sup {:.2} at {:?} (claimed bound {UNION_ALPHA_BOUND})", u.sup_alpha, u.argmax);

    let settings = SimSettings { n_paths: 2000, ..SimSettings::default() };
    let nov = novikov_estimate(&interval, &DEFAULT_DELTAS, &settings)?;
    println!("Novikov functional, interval: {:?} -> {}", nov.trend.values, nov.class.tag());

    let params = MarketParams::reference();
    let rms = pathwise_rms(&params, 1e-3, 4096, 3, 50, 1)?;
    for (n, r) in rms.steps.iter().zip(&rms.residuals) {
        println!("pathwise identity: {n:>5} steps, rms residual {r:.5}");
    }
    Ok(())
}
