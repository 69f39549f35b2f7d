//! Gram lattices, determinants and discriminant groups.

use k3_fano::fqf::discriminant_form;
use k3_fano::lattice::{k3_lattice, root_lattice, RootKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k3 = k3_lattice();
    println!("K3 lattice: rank {}, det {}, signature {:?}", k3.rank(), k3.det(), k3.signature());

    for (kind, rank) in [(RootKind::A, 1), (RootKind::A, 4), (RootKind::D, 4), (RootKind::E, 6)] {
        let l = root_lattice(kind, rank)?;
        let disc = discriminant_form(&l)?;
        let f = disc.form();
        println!("{kind:?}{rank}: det {}, discriminant orders {:?}, Brown {}", l.det(), f.orders(), f.brown()?);
    }

    let a2 = root_lattice(RootKind::A, 2)?;
    let twelve = (1..4).fold(a2.clone(), |acc, _| acc.direct_sum(&a2));
    let disc = discriminant_form(&twelve)?;
    println!("4A2: |discr| = {}, length {}", disc.form().order(), disc.form().length());
    Ok(())
}
