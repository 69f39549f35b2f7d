//! The closed formula, its period and a lattice cross-check over one period.
//!
//! Usage: `cargo run --release --example census_table -- 3`

use k3_fano::census::{census, max_curves_formula, period};
use k3_fano::geometricity::DecideOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d: i64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let m = period(d);
    let counts: Vec<u32> = (1..=m).map(|n| max_curves_formula(n, d)).collect::<Result<_, _>>()?;
    println!("d = {d}, period {m}, formula over one period: {counts:?}");

    let table = census(d, true, DecideOptions::default())?;
    table.write_csv(std::io::stdout())?;
    println!("all rows agree: {}", table.all_agree());
    Ok(())
}
