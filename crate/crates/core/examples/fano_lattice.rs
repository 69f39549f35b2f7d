//! Fano lattices of configuration graphs and the auxiliary polarization.

use k3_fano::fqf::discriminant_form;
use k3_fano::graph::{fano_lattice, ConfigGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, d) = (503, 3);
    for text in ["12tA1", "8tA2", "6tA3", "7tA2+A1", "4tA4+2A1"] {
        let graph: ConfigGraph = text.parse()?;
        let fano = fano_lattice(&graph, n, d)?;
        let disc = discriminant_form(&fano.lattice)?;
        let hbar = fano
            .hbar_square()
            .map(|h| h.to_string())
            .unwrap_or_else(|_| "-".to_string());
        println!(
            "{:10} rank {:2} det {:>12} |discr| {:>10} f {} hbar^2 {}",
            graph.pretty(),
            fano.rank(),
            fano.lattice.det(),
            disc.form().order(),
            fano.f,
            hbar
        );
    }
    Ok(())
}
