//! Admissibility, subgeometricity and geometricity of one graph.
//!
//! Usage: `cargo run --release --example decide_graph -- 8tA2 501 3`

use k3_fano::geometricity::{decide, DecideOptions};
use k3_fano::graph::ConfigGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let graph: ConfigGraph = args.first().map(String::as_str).unwrap_or("8tA2").parse()?;
    let n: i64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(501);
    let d: i64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(3);

    let v = decide(&graph, n, d, DecideOptions::default())?;
    println!("{} in degree {} with respect to d = {}: {}", graph.pretty(), 2 * n, d, v.status);
    for p in &v.per_prime {
        println!("  p = {}: length {}, kernel order {}, nodes {}", p.p, p.length, p.kernel_order, p.nodes);
    }
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}
