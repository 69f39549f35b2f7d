//! Invariants of finite quadratic forms: length, parity, determinant class and
//! the Brown invariant.

use k3_fano::fqf::FiniteQuadraticForm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let forms = [
        ("U_2", FiniteQuadraticForm::u_block(1)),
        ("V_2", FiniteQuadraticForm::v_block(1)),
        ("U_4", FiniteQuadraticForm::u_block(2)),
        ("<1/2>", FiniteQuadraticForm::cyclic(2, 1, 2)?),
        ("<2/3>", FiniteQuadraticForm::cyclic(3, 2, 3)?),
        ("<4/5>", FiniteQuadraticForm::cyclic(5, 4, 5)?),
    ];
    for (name, f) in &forms {
        let t = f.invariant_tuple(1 << 16)?;
        println!("{name:6} order {:3} length {} parity {:?} brown {} dets {:?}", f.order(), f.length(), t.parity, t.brown, t.dets);
    }

    let v2 = FiniteQuadraticForm::v_block(1);
    let quotient = v2.direct_sum(&v2).direct_sum(&v2).direct_sum(&FiniteQuadraticForm::u_block(2));
    println!("V_2^3 + U_4: brown {}, length {}", quotient.brown()?, quotient.length());
    Ok(())
}
