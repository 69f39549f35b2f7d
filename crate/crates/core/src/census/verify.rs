//! Registry of per-graph statements checked against [`decide`].

use serde::{Deserialize, Serialize};

use super::{balanced, period, representative, CensusError};
use crate::geometricity::{decide, DecideOptions, Status, Verdict};
use crate::graph::ConfigGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    NotSubgeometric,
    Geometric,
    NotGeometric,
}

impl Expectation {
    pub fn holds(self, status: Status) -> bool {
        match self {
            Expectation::NotSubgeometric => !status.is_subgeometric(),
            Expectation::Geometric => status == Status::Geometric,
            Expectation::NotGeometric => status != Status::Geometric,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Proposition {
    pub id: &'static str,
    pub graph: &'static str,
    pub statement: &'static str,
    /// Whether the statement applies to `(n, d)`.
    pub applies: fn(i64, i64) -> bool,
    pub expect: fn(i64, i64) -> Expectation,
    /// Residues of `n` sampled by default, as `(modulus, odd only)`.
    pub grid: fn(i64) -> (i64, bool),
}

fn both_odd(n: i64, d: i64) -> bool {
    n % 2 != 0 && d % 2 != 0
}

fn any(_: i64, _: i64) -> bool {
    true
}

fn d_odd(_: i64, d: i64) -> bool {
    d % 2 != 0
}

fn never(_: i64, _: i64) -> Expectation {
    Expectation::NotSubgeometric
}

fn iff(b: bool) -> Expectation {
    if b {
        Expectation::Geometric
    } else {
        Expectation::NotGeometric
    }
}

fn m3(x: i64) -> i64 {
    x.rem_euclid(3)
}

fn odd_grid(_: i64) -> (i64, bool) {
    (6, true)
}

fn mod6_grid(_: i64) -> (i64, bool) {
    (6, false)
}

/// Every registered statement.
pub fn registry() -> Vec<Proposition> {
    let negative = |id, graph, statement| Proposition {
        id,
        graph,
        statement,
        applies: both_odd,
        expect: never,
        grid: odd_grid,
    };
    vec![
        negative("12A1", "12tA1", "12tA1 is not subgeometric for n, d odd"),
        negative("11A1", "11tA1", "11tA1 is not subgeometric for n, d odd"),
        negative("6A3-odd", "6tA3", "6tA3 is not subgeometric for n, d odd"),
        negative("5A3+2A1", "5tA3+2A1", "5tA3+2A1 is not subgeometric for n, d odd"),
        negative("5A3+A2", "5tA3+A2", "5tA3+A2 is not subgeometric for n, d odd"),
        Proposition {
            id: "8A2",
            graph: "8tA2",
            statement: "8tA2 is geometric iff 2n = 2d^2 mod 3",
            applies: any,
            expect: |n, d| iff(m3(2 * n - 2 * d * d) == 0),
            grid: mod6_grid,
        },
        Proposition {
            id: "7A2",
            graph: "7tA2",
            statement: "7tA2 is geometric iff 2n != d^2 - 1 mod 3",
            applies: any,
            expect: |n, d| iff(m3(2 * n - d * d + 1) != 0),
            grid: mod6_grid,
        },
        Proposition {
            id: "7A2+A1",
            graph: "7tA2+A1",
            statement: "7tA2+A1 is geometric iff 2n = 2d^2 mod 3",
            applies: any,
            expect: |n, d| iff(m3(2 * n - 2 * d * d) == 0),
            grid: mod6_grid,
        },
        Proposition {
            id: "6A2+3A1",
            graph: "6tA2+3A1",
            statement: "6tA2+3A1 is geometric iff 2n != 1 mod 3",
            applies: any,
            expect: |n, _| iff(m3(2 * n) != 1),
            grid: mod6_grid,
        },
        Proposition {
            id: "4A4+2A1",
            graph: "4tA4+2A1",
            statement: "for d odd, 4tA4+2A1 is geometric iff 2n = 4d^2 mod 5 and (2n, d) is q-balanced for all q = 3 mod 4",
            applies: d_odd,
            expect: |n, d| iff((2 * n - 4 * d * d).rem_euclid(5) == 0 && balanced(n, d)),
            grid: |d| (period(d), false),
        },
    ]
}

pub fn proposition(id: &str) -> Result<Proposition, CensusError> {
    registry().into_iter().find(|p| p.id == id).ok_or_else(|| CensusError::UnknownProposition(id.to_string()))
}

impl Proposition {
    /// Default sample: the proposition's residue grid for each `d`, with
    /// representatives above the large-`n` threshold.
    pub fn samples(&self, d_list: &[i64]) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for &d in d_list {
            let (modulus, odd) = (self.grid)(d);
            for r in 0..modulus {
                let n = representative(r, modulus, d);
                if (!odd || n % 2 != 0) && (self.applies)(n, d) {
                    out.push((n, d));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyCase {
    pub n: i64,
    pub d: i64,
    pub expected: Expectation,
    pub status: Status,
    pub ok: bool,
    /// Full verdict, kept for mismatches only.
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    pub statement: String,
    pub cases: Vec<VerifyCase>,
    /// Sample points outside the statement's hypotheses.
    pub skipped: Vec<(i64, i64)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|c| c.ok)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &VerifyCase> {
        self.cases.iter().filter(|c| !c.ok)
    }
}

/// Runs [`decide`] on every sample and compares with the statement.
pub fn verify(id: &str, samples: &[(i64, i64)], opts: DecideOptions) -> Result<VerifyReport, CensusError> {
    use rayon::prelude::*;
    let prop = proposition(id)?;
    let graph = ConfigGraph::parse(prop.graph).expect("built-in graph");
    let (inside, skipped): (Vec<_>, Vec<_>) = samples.iter().partition(|&&(n, d)| (prop.applies)(n, d));
    let cases = inside
        .par_iter()
        .map(|&(n, d)| {
            let v = decide(&graph, n, d, opts)?;
            let expected = (prop.expect)(n, d);
            let ok = expected.holds(v.status);
            Ok(VerifyCase { n, d, expected, status: v.status, ok, verdict: (!ok).then_some(v) })
        })
        .collect::<Result<Vec<_>, CensusError>>()?;
    Ok(VerifyReport { id: prop.id.to_string(), statement: prop.statement.to_string(), cases, skipped })
}
