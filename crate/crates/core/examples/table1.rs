//! The finiteness and arbitrage classification of the four filtrations on a
//! reduced budget. The `table1` command runs the full budget.
//!
//! `cargo run --release --example table1`

use insider::market::MarketParams;
use insider::sim::SimSettings;
use insider::verify::{classification_table, TableBudgets};

fn main() -> insider::Result<()> {
    let budgets = TableBudgets {
        settings: SimSettings { n_paths: 2000, n_steps: 500, ..SimSettings::default() },
        ..TableBudgets::default()
    };
    let table = classification_table(&MarketParams::reference(), &budgets)?;
    for row in &table.rows {
        let cells: Vec<String> = row.cells.iter().map(|c| format!("{}={}", c.column, c.class.tag())).collect();
        println!("{:<10} {} arbitrage={} -> {}", row.filtration, cells.join(" "), row.arbitrage_detected(), row.status().tag());
    }
    print!("{}", String::from_utf8_lossy(&table.to_table().to_bytes()?));
    Ok(())
}
