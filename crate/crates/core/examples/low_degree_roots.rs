//! Roots of low degree in a finite index extension: for 4Ã4+2A1 and d = 3,
//! the kernel generated by k/3 produces twenty lines.

use k3_fano::fqf::IsotropicSubgroup;
use k3_fano::geometricity::{exceptional_classes, low_degree_roots};
use k3_fano::graph::{fano_lattice, ConfigGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph: ConfigGraph = "4tA4+2A1".parse()?;
    let fano = fano_lattice(&graph, 503, 3)?;
    let (classes, exceptional) = exceptional_classes(&fano)?;
    let form = classes.form();
    println!("|discr| = {}, {} exceptional classes", form.order(), exceptional.len());

    // k/(df) has order df = 15, so k/3 is five times it
    let k3 = form.scale(5, &classes.k_class);
    let kernel = IsotropicSubgroup::generated(form, &[k3])?;
    let roots = low_degree_roots(&fano, &classes, &kernel, 1);
    let lines: Vec<_> = roots.iter().filter(|r| r.degree == 1).collect();
    println!("degree 0: {}, degree 1: {}", roots.len() - lines.len(), lines.len());
    for r in &lines {
        let coords: Vec<String> = r.coords.iter().map(|c| c.to_string()).collect();
        println!("  [{}]", coords.join(", "));
    }
    Ok(())
}
