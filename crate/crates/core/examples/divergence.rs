//! Expected utilities that are infinite, seen through truncation schedules.
//!
//! `cargo run --release --example divergence`

use insider::market::MarketParams;
use insider::sim::SimSettings;
use insider::utility::{divergence_diagnostic, DiagnosticCase};

fn main() -> insider::Result<()> {
    let params = MarketParams::reference();
    let cases = [
        DiagnosticCase::Example1Log { delta_fracs: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6] },
        DiagnosticCase::LinearUtility { gammas: vec![0.9, 0.95, 0.99, 0.999] },
        DiagnosticCase::GammaGeHalfInterval {
            c1: -1.0,
            c2: 1.0,
            gamma: 0.75,
            delta_fracs: vec![1e-1, 1e-2, 1e-3, 1e-4],
            settings: SimSettings { n_paths: 5000, ..SimSettings::default() },
        },
        DiagnosticCase::LeverageInterval {
            c1: -1.0,
            c2: 1.0,
            epsilon: 0.05,
            leverages: vec![1.0, 10.0, 100.0, 1000.0],
            settings: SimSettings { n_paths: 2000, ..SimSettings::default() },
        },
    ];
    for case in &cases {
        let e = divergence_diagnostic(case, &params)?;
        println!("{:<24} {:<12} value {}", case.name(), e.divergence.tag(), e.value);
        if let Some(t) = e.divergence.trend() {
            println!("  {}", t.to_json());
        }
    }
    Ok(())
}
