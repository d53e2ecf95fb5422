//! The value of information `½∫E[α_t²]dt`, by quadrature, against the entropy
//! of the indicator, and the insider's expected log utility.
//!
//! `cargo run --release --example value_of_information`

use insider::drift::InsiderInfo;
use insider::gauss::cdf;
use insider::market::MarketParams;
use insider::utility::{expected_alpha_sq, insider_value_log, mc_expected_alpha_sq, merton_value, value_of_information, UtilitySpec};

fn entropy(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

fn main() -> insider::Result<()> {
    let params = MarketParams::reference();
    let interval = InsiderInfo::interval(-1.0, 1.0, 1.0)?;
    let p = cdf(1.0) - cdf(-1.0);
    let voi = value_of_information(&interval)?;
    println!("interval(-1,1): ½∫E[α²] = {:.15}, entropy = {:.15}", voi.value, entropy(p));

    let union = InsiderInfo::unit_union(1.0)?;
    let voi = value_of_information(&union)?;
    println!("unit union:     ½∫E[α²] = {:.15}, ln 2    = {:.15}", voi.value, 2f64.ln());

    println!("\n{:>8} {:>14} {:>14}", "t", "quadrature", "MC (1e6)");
    for t in [0.1, 0.5, 0.9] {
        let q = expected_alpha_sq(&interval, t)?;
        let m = mc_expected_alpha_sq(&interval, t, 1_000_000, 1)?;
        println!("{t:>8} {q:>14.6} {:>14.6}", m.value);
    }
    println!("E[α²] at t = 1 - 1e-8: {:.1} (integrable spike)", expected_alpha_sq(&interval, 1.0 - 1e-8)?);

    let merton = merton_value(&params, UtilitySpec::log())?;
    let insider = insider_value_log(&interval, &params)?;
    println!("\nlog value: Merton {merton:.6}, insider {:.6}", insider.value);
    Ok(())
}
