//! Configuration graphs built from affine `Ã_k` and finite `A_k` components,
//! and the polarized Fano lattices attached to them.
//!
//! Graphs are written in a small text format: terms joined by `+`, each term
//! an optional count (optionally followed by `*`), an optional `t` (tilde,
//! i.e. affine) and `A<index>`. Examples: `12tA1`, `4tA4+2A1`, `5tA3 + A2`,
//! `3*tA2`. `Ã` and `~A` are accepted for `tA`.

mod fano;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::GramLattice;

pub use fano::{fano_lattice, hbar_square, FanoError, PolarizedFano, VertexRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Affine `Ã_k`: a `(k+1)`-cycle, or a double edge for `k = 1`.
    Affine,
    /// Finite `A_k`: a chain.
    Finite,
}

/// A component type with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub index: usize,
    pub multiplicity: usize,
}

impl Component {
    pub fn vertex_count(&self) -> usize {
        match self.kind {
            ComponentKind::Affine => self.index + 1,
            ComponentKind::Finite => self.index,
        }
    }
}

/// Degree `deg(Σ)` of a connected parabolic component: all marks of `Ã_k` are 1.
pub fn component_degree(kind: ComponentKind, index: usize) -> Option<usize> {
    match kind {
        ComponentKind::Affine => Some(index + 1),
        ComponentKind::Finite => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported component type '{symbol}' at position {position}: only A and tA (affine A) are supported")]
    Unsupported { position: usize, symbol: char },
    #[error("empty graph description")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfigGraph {
    components: Vec<Component>,
}

impl ConfigGraph {
    pub fn new(components: Vec<Component>) -> Result<Self, ParseError> {
        if components.is_empty() || components.iter().any(|c| c.multiplicity == 0 || c.index == 0) {
            return Err(ParseError::Empty);
        }
        Ok(ConfigGraph { components })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser { chars: text.chars().collect(), pos: 0 }.graph()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// One entry per connected component, in input order.
    pub fn expanded(&self) -> Vec<(ComponentKind, usize)> {
        self.components
            .iter()
            .flat_map(|c| std::iter::repeat((c.kind, c.index)).take(c.multiplicity))
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(|c| c.vertex_count() * c.multiplicity).sum()
    }

    /// Common degree of the parabolic components, if they agree.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.components.iter().filter_map(|c| component_degree(c.kind, c.index));
        let first = degs.next()?;
        degs.all(|x| x == first).then_some(first)
    }

    pub fn is_parabolic(&self) -> bool {
        self.components.iter().any(|c| c.kind == ComponentKind::Affine)
    }

    /// `∂Γ`: every `Ã_k` replaced by `A_k`.
    pub fn strip(&self) -> ConfigGraph {
        let components = self
            .components
            .iter()
            .map(|c| Component { kind: ComponentKind::Finite, ..*c })
            .collect();
        ConfigGraph { components }
    }

    /// Shape `mÃ_{p-1} ⊕ sA1` as `(p, m, s)`.
    pub fn auxiliary_shape(&self) -> Option<(u64, usize, usize)> {
        let mut affine: Option<(usize, usize)> = None;
        let mut s = 0;
        for c in &self.components {
            match c.kind {
                ComponentKind::Affine => {
                    if let Some((idx, m)) = affine {
                        if idx != c.index {
                            return None;
                        }
                        affine = Some((idx, m + c.multiplicity));
                    } else {
                        affine = Some((c.index, c.multiplicity));
                    }
                }
                ComponentKind::Finite if c.index == 1 => s += c.multiplicity,
                ComponentKind::Finite => return None,
            }
        }
        let (idx, m) = affine?;
        match idx + 1 {
            3 | 5 => Some((idx as u64 + 1, m, s)),
            _ => None,
        }
    }

    /// `ZΓ`: vertices of square −2, pairings given by edge multiplicities.
    pub fn graph_lattice(&self) -> GramLattice {
        let mut labels = Vec::new();
        let mut blocks: Vec<Vec<Vec<i64>>> = Vec::new();
        let (mut na, mut nb) = (0, 0);
        for (kind, index) in self.expanded() {
            let size = match kind {
                ComponentKind::Affine => index + 1,
                ComponentKind::Finite => index,
            };
            let mut g = vec![vec![0i64; size]; size];
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = -2;
            }
            for i in 1..size {
                g[i - 1][i] += 1;
                g[i][i - 1] += 1;
            }
            if kind == ComponentKind::Affine {
                // close the cycle; for Ã1 this doubles the edge
                g[size - 1][0] += 1;
                g[0][size - 1] += 1;
                na += 1;
                labels.extend((0..size).map(|r| format!("a{na}^{r}")));
            } else {
                nb += 1;
                if index == 1 {
                    labels.push(format!("b{nb}"));
                } else {
                    labels.extend((1..=size).map(|r| format!("b{nb}^{r}")));
                }
            }
            blocks.push(g);
        }
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        let mut gram = vec![vec![BigInt::zero(); n]; n];
        let mut off = 0;
        for b in &blocks {
            for i in 0..b.len() {
                for j in 0..b.len() {
                    gram[off + i][off + j] = BigInt::from(b[i][j]);
                }
            }
            off += b.len();
        }
        GramLattice::new(labels, gram).expect("graph lattices are even")
    }

    /// Compact text form, e.g. `4tA4+2A1`.
    pub fn dsl(&self) -> String {
        self.to_string()
    }

    /// Display form with a tilde, e.g. `4Ã4+2A1`.
    pub fn pretty(&self) -> String {
        self.fmt_with("Ã")
    }

    fn fmt_with(&self, tilde: &str) -> String {
        self.components
            .iter()
            .map(|c| {
                let count = if c.multiplicity == 1 { String::new() } else { c.multiplicity.to_string() };
                let t = if c.kind == ComponentKind::Affine { tilde } else { "A" };
                format!("{count}{t}{}", c.index)
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for ConfigGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("tA"))
    }
}

impl FromStr for ConfigGraph {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConfigGraph::parse(s)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, message: &str) -> ParseError {
        ParseError::Syntax { position: self.pos, message: message.to_string() }
    }

    fn number(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().ok()
    }

    fn graph(&mut self) -> Result<ConfigGraph, ParseError> {
        self.skip_ws();
        if self.peek().is_none() {
            return Err(ParseError::Empty);
        }
        let mut comps: Vec<Component> = Vec::new();
        loop {
            self.skip_ws();
            let c = self.term()?;
            if let Some(prev) = comps.iter_mut().find(|p| p.kind == c.kind && p.index == c.index) {
                prev.multiplicity += c.multiplicity;
            } else {
                comps.push(c);
            }
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => self.pos += 1,
                Some(_) => return Err(self.err("expected '+' or end of input")),
            }
        }
        ConfigGraph::new(comps)
    }

    fn term(&mut self) -> Result<Component, ParseError> {
        let multiplicity = match self.number() {
            Some(0) => return Err(self.err("multiplicity must be positive")),
            Some(m) => {
                self.skip_ws();
                if self.peek() == Some('*') {
                    self.pos += 1;
                    self.skip_ws();
                }
                m
            }
            None => 1,
        };
        let kind = match self.peek() {
            Some('t') | Some('~') => {
                self.pos += 1;
                ComponentKind::Affine
            }
            Some('Ã') => ComponentKind::Affine,
            _ => ComponentKind::Finite,
        };
        match self.peek() {
            Some('A') | Some('Ã') => self.pos += 1,
            Some(c @ ('D' | 'E')) => return Err(ParseError::Unsupported { position: self.pos, symbol: c }),
            _ => return Err(self.err("expected component symbol 'A' or 'tA'")),
        }
        let index = match self.number() {
            Some(0) | None => return Err(self.err("expected a positive component index")),
            Some(i) => i,
        };
        Ok(Component { kind, index, multiplicity })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let g = ConfigGraph::parse("12tA1").unwrap();
        assert_eq!(g.components(), &[Component { kind: ComponentKind::Affine, index: 1, multiplicity: 12 }]);
        let g = ConfigGraph::parse("4tA4+2A1").unwrap();
        assert_eq!(g.vertex_count(), 22);
        assert_eq!(g.degree(), Some(5));
        let g = ConfigGraph::parse("5tA3 + A2").unwrap();
        assert_eq!(g.components()[1], Component { kind: ComponentKind::Finite, index: 2, multiplicity: 1 });
        assert_eq!(ConfigGraph::parse("3*tA2").unwrap().to_string(), "3tA2");
        assert_eq!(ConfigGraph::parse("8Ã2").unwrap().to_string(), "8tA2");
        assert_eq!(ConfigGraph::parse("4tA4+2A1").unwrap().pretty(), "4Ã4+2A1");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ConfigGraph::parse("4tD4"), Err(ParseError::Unsupported { symbol: 'D', position: 2 })));
        assert!(matches!(ConfigGraph::parse("E8"), Err(ParseError::Unsupported { .. })));
        assert!(matches!(ConfigGraph::parse("4tA4+"), Err(ParseError::Syntax { position: 5, .. })));
        assert!(matches!(ConfigGraph::parse("tA0"), Err(ParseError::Syntax { .. })));
        assert!(matches!(ConfigGraph::parse("  "), Err(ParseError::Empty)));
        assert!(matches!(ConfigGraph::parse("2tA2 x"), Err(ParseError::Syntax { position: 5, .. })));
    }

    #[test]
    fn graph_lattices() {
        let g = ConfigGraph::parse("tA1").unwrap().graph_lattice();
        assert_eq!(g.gram_i64(), vec![vec![-2, 2], vec![2, -2]]);
        let g = ConfigGraph::parse("tA2").unwrap().graph_lattice();
        assert_eq!(g.gram_i64(), vec![vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]]);
        let g = ConfigGraph::parse("12tA1").unwrap().graph_lattice();
        assert_eq!(g.radical().len(), 12);
    }

    #[test]
    fn strip_and_degrees() {
        let g = ConfigGraph::parse("5tA3+2A1").unwrap();
        assert_eq!(g.strip().to_string(), "5A3+2A1");
        assert_eq!(component_degree(ComponentKind::Affine, 1), Some(2));
        assert_eq!(component_degree(ComponentKind::Affine, 3), Some(4));
        assert_eq!(ConfigGraph::parse("tA2+tA3").unwrap().degree(), None);
        assert_eq!(ConfigGraph::parse("8tA2").unwrap().auxiliary_shape(), Some((3, 8, 0)));
        assert_eq!(ConfigGraph::parse("4tA4+2A1").unwrap().auxiliary_shape(), Some((5, 4, 2)));
        assert_eq!(ConfigGraph::parse("5tA3+A2").unwrap().auxiliary_shape(), None);
    }
}
