mod common;

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use k3_fano::census::{self, census, max_curves_formula, max_curves_lattice, period, representative, verify};
use k3_fano::fqf::{discriminant_form, FiniteQuadraticForm, IsotropicSubgroup};
use k3_fano::geometricity::{
    decide, exceptional_classes, low_degree_roots, threshold, Clause, DecideOptions, Engine, Status,
};
use k3_fano::graph::{fano_lattice, ConfigGraph};
use k3_fano::lattice::GramLattice;

use common::report;

fn graph(s: &str) -> ConfigGraph {
    s.parse().unwrap()
}

fn pow(b: i64, e: u32) -> BigInt {
    BigInt::from(b).pow(e)
}

#[test]
fn criterion_1_determinants() {
    let mut ok = true;
    for (d, n) in [(3, 11), (5, 13), (7, 101)] {
        let f = fano_lattice(&graph("12tA1"), n, d).unwrap();
        ok &= f.lattice.det() == -(pow(2, 14) * pow(d, 2));
    }
    for (m, s) in [(8u32, 0u32), (7, 1), (6, 3)] {
        let text = if s == 0 { format!("{m}tA2") } else { format!("{m}tA2+{s}A1") };
        for d in [3, 5] {
            let f = fano_lattice(&graph(&text), 1001, d).unwrap();
            let order = discriminant_form(&f.lattice).unwrap().form().order();
            ok &= BigInt::from(order) == pow(3, 2 + m) * pow(2, s) * pow(d, 2);
        }
    }
    report(1, "determinant and discriminant golden values", ok, "12tA1 at 3 pairs, mtA2+sA1 at 6 pairs");
    assert!(ok);
}

#[test]
fn criterion_2_twelve_a1_pipeline() {
    let start = Instant::now();
    let v2 = FiniteQuadraticForm::v_block(1);
    let expected = v2.direct_sum(&v2).direct_sum(&v2).direct_sum(&FiniteQuadraticForm::u_block(2));
    let g = graph("12tA1");
    let mut pairs = Vec::new();
    for d in [3, 5, 7, 9] {
        let t = threshold(d, 2);
        let n0 = (t + 1) | 1;
        pairs.push((n0, d));
        pairs.push((n0 + 2, d));
    }
    let mut ok = true;
    let mut seen = 0;
    for &(n, d) in &pairs {
        let fano = fano_lattice(&g, n, d).unwrap();
        let engine = Engine::new(fano, DecideOptions::default()).unwrap();
        let cands = engine.candidates(2, &engine.admissibility_set(), engine.corank() as usize).unwrap();
        ok &= !cands.is_empty();
        for c in &cands {
            seen += 1;
            ok &= c.kernel.order() == 4;
            ok &= c.quotient.brown().unwrap() == 4;
            ok &= c.quotient.same_invariants(&expected, 1 << 16).unwrap();
            ok &= !c.check.passed && c.check.clause == Clause::FullLengthWrongUnit;
        }
        ok &= engine.decide().unwrap().status == Status::AdmissibleNotSubgeometric;
    }
    let detail = format!("{} pairs, {seen} candidate kernels, {:.1?}", pairs.len(), start.elapsed());
    report(2, "12tA1: only V2^3+U4 quotients, rejected at p = 2", ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_3_propositions() {
    let start = Instant::now();
    let ds = [3, 5, 7, 9];
    let mut ok = true;
    let mut lines = Vec::new();
    for id in ["11A1", "6A3-odd", "5A3+2A1", "5A3+A2", "8A2", "7A2", "7A2+A1", "6A2+3A1"] {
        let prop = census::proposition(id).unwrap();
        let samples = prop.samples(&ds);
        let rep = verify(id, &samples, DecideOptions::default()).unwrap();
        let good = rep.passed() && rep.cases.len() >= 8;
        for m in rep.mismatches() {
            println!("  mismatch {id}: n={} d={} expected {:?} got {}", m.n, m.d, m.expected, m.status);
        }
        // the equivalences must see every residue of 2n mod 3
        if ["8A2", "7A2", "7A2+A1", "6A2+3A1"].contains(&id) {
            for d in ds {
                let res: HashSet<i64> = rep.cases.iter().filter(|c| c.d == d).map(|c| (2 * c.n).rem_euclid(3)).collect();
                ok &= res.len() == 3;
            }
        }
        lines.push(format!("{id}:{}", rep.cases.len()));
        ok &= good;
    }
    let detail = format!("{} in {:.1?}", lines.join(" "), start.elapsed());
    report(3, "proposition suite", ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_4_four_a4_two_a1() {
    let start = Instant::now();
    let mut ok = true;
    let prop = census::proposition("4A4+2A1").unwrap();
    let samples = prop.samples(&[3, 9]);
    ok &= samples.len() == 30 + 90;
    let rep = verify("4A4+2A1", &samples, DecideOptions::default()).unwrap();
    ok &= rep.passed();
    for m in rep.mismatches() {
        println!("  mismatch: n={} d={} expected {:?} got {}", m.n, m.d, m.expected, m.status);
    }
    let cubic_cell: Vec<_> = rep.cases.iter().filter(|c| c.d == 9 && (2 * c.n).rem_euclid(90) == 24).collect();
    ok &= !cubic_cell.is_empty() && cubic_cell.iter().all(|c| c.status != Status::Geometric);
    let geometric = rep.cases.iter().filter(|c| c.status == Status::Geometric).count();
    let detail = format!("{} cases, {geometric} geometric, {:.1?}", rep.cases.len(), start.elapsed());
    report(4, "4tA4+2A1 geometric iff 2n = 4d^2 mod 5 and q-balanced", ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_5_census() {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = 0;
    for d in [3, 5, 7, 9] {
        let table = census(d, false, DecideOptions::default()).unwrap();
        ok &= table.rows.len() as i64 == period(d);
        ok &= table.all_agree();
        for r in table.rows.iter().filter(|r| !r.agree) {
            println!("  disagreement d={d} n={}: formula {} lattice {}", r.representative_n, r.formula_count, r.lattice_count);
        }
        rows += table.rows.len();
    }
    for (n, d, want) in [(10, 3, 24), (9, 3, 24), (13, 3, 22), (7, 3, 21)] {
        ok &= max_curves_formula(n, d).unwrap() == want;
        let big = representative(n, period(d), d);
        ok &= max_curves_lattice(big, d, DecideOptions::default()).unwrap().count == want;
    }
    let detail = format!("{rows} rows, spot cells checked, {:.1?}", start.elapsed());
    report(5, "census agrees with the closed formula", ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_6_low_degree_roots() {
    let fano = fano_lattice(&graph("4tA4+2A1"), 503, 3).unwrap();
    let (classes, _) = exceptional_classes(&fano).unwrap();
    let form = classes.form();
    let k3 = form.scale(5, &classes.k_class);
    let kernel = IsotropicSubgroup::generated(form, &[k3]).unwrap();
    let roots = low_degree_roots(&fano, &classes, &kernel, 1);
    let deg0 = roots.iter().filter(|r| r.degree == 0).count();
    let deg1: Vec<_> = roots.iter().filter(|r| r.degree == 1).collect();
    let mut ok = deg0 == 0 && deg1.len() == 20;
    // each line has degree 1, lies in k^perp and meets at least two vertices
    let g = fano.lattice.gram_i64();
    for r in &deg1 {
        let pair: Vec<BigInt> = (0..fano.rank())
            .map(|j| {
                let s: num_rational::BigRational =
                    r.coords.iter().enumerate().map(|(i, c)| c * common::q(g[i][j])).sum();
                s.to_integer()
            })
            .collect();
        let ones = pair.iter().filter(|x| **x == BigInt::from(1)).count();
        ok &= pair[fano.h_index] == BigInt::from(1) && pair[fano.k_index] == BigInt::from(0);
        ok &= ones >= 2;
    }
    report(6, "k/3 kernel on 4tA4+2A1, d = 3", ok, &format!("{} degree-1 roots, {deg0} of degree 0", deg1.len()));
    assert!(ok);
}

#[test]
fn criterion_7_oracles() {
    let mut runner = TestRunner::new(Config { cases: 50, failure_persistence: None, ..Config::default() });
    let strategy = (1usize..=5).prop_flat_map(|n| {
        (proptest::collection::vec(-1i64..=1, n * n), proptest::collection::vec(1i64..=2, n)).prop_map(move |(u, dg)| {
            // -M^T A_n M with M = upper unit triangular times diagonal
            let mut m = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = if i == j { dg[j] } else if j > i { u[i * n + j] * dg[j] } else { 0 };
                }
            }
            let r = |a: usize, b: usize| if a == b { 2 } else if a.abs_diff(b) == 1 { -1 } else { 0 };
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| -(0..n).map(|a| (0..n).map(|b| m[a][i] * r(a, b) * m[b][j]).sum::<i64>()).sum::<i64>())
                        .collect::<Vec<i64>>()
                })
                .collect::<Vec<_>>()
        })
    });
    let lattices = runner
        .run(&strategy, |g| {
            let l = GramLattice::from_i64(&g).unwrap();
            let f = discriminant_form(&l).unwrap().into_form();
            let t = f.invariant_tuple(1 << 16).unwrap();
            prop_assert_eq!(t.q_distribution, common::brute_discriminant(&g));
            Ok(())
        })
        .is_ok();
    let mut graphs_ok = true;
    let names: Vec<&str> = census::TIERS.iter().flat_map(|(_, g)| g.iter().copied()).collect();
    for name in &names {
        let fano = fano_lattice(&graph(name), 1001, 3).unwrap();
        let (classes, exc) = exceptional_classes(&fano).unwrap();
        let naive = common::naive_exceptional(&fano, &classes);
        if naive != exc {
            println!("  {name}: engine {} classes, naive {}", exc.len(), naive.len());
            graphs_ok = false;
        }
    }
    let ok = lattices && graphs_ok;
    report(7, "oracle equivalence", ok, &format!("50 random lattices: {lattices}, {} graphs: {graphs_ok}", names.len()));
    assert!(ok);
}

#[test]
fn criterion_8_periodicity() {
    let start = Instant::now();
    let mut ok = true;
    let mut checked = 0;
    let opts = DecideOptions::default();
    for name in census::TIERS.iter().flat_map(|(_, g)| g.iter().copied()) {
        let g = graph(name);
        let f = g.degree().unwrap() as i64;
        for d in [3, 5] {
            let base = threshold(d, f) + 1;
            for r in 0..f {
                let statuses: Vec<Status> =
                    (0..4).map(|j| decide(&g, base + r + j * f, d, opts).unwrap().status).collect();
                checked += statuses.len();
                if statuses.iter().any(|s| *s != statuses[0]) {
                    println!("  {name} d={d} n={}: {statuses:?}", base + r);
                    ok = false;
                }
            }
        }
    }
    report(8, "decide is periodic in n with period deg", ok, &format!("{checked} decisions, {:.1?}", start.elapsed()));
    assert!(ok);
}

#[test]
fn criterion_9_period_formula() {
    let mut ok = period(3) == 30 && period(9) == 90 && period(49) == 1470;
    let mut found = Vec::new();
    for d in [3, 9, 15, 49] {
        let m = period(d);
        let start = census::census_threshold(d);
        let seq: Vec<u32> = (start..start + 3 * m).map(|n| max_curves_formula(n, d).unwrap()).collect();
        let p = (1..=m).find(|&p| (0..(2 * m) as usize).all(|i| seq[i] == seq[i + p as usize])).unwrap();
        found.push(format!("d={d}:{p}|{m}"));
        ok &= m % p == 0;
    }
    report(9, "period formula", ok, &found.join(" "));
    assert!(ok);
}
