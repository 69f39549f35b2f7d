//! Prime-by-prime kernel search and its assembly into a global kernel.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::nikulin::{nikulin_at_prime, Clause, PrimeCheck};
use super::{DecideError, DecideOptions, LowDegreeRoot, RootClasses, Status, Verdict};
use crate::fqf::{FiniteQuadraticForm, FormError, IsotropicSubgroup, PerpQuotient, SubgroupSearch, Visit};
use crate::graph::PolarizedFano;

/// The `p`-part of the discriminant together with the maps to and from the
/// ambient coordinates.
#[derive(Clone, Debug)]
struct PrimePart {
    p: u64,
    form: FiniteQuadraticForm,
    /// Ambient images of the generators of `form`.
    gens: Vec<Vec<i64>>,
    /// For each generator: ambient coordinate index and cofactor `o_i / p^{v}`.
    src: Vec<(usize, i64)>,
    /// Order of the prime-to-`p` part of the discriminant.
    other: u64,
}

impl PrimePart {
    fn project(&self, x: &[i64]) -> Vec<i64> {
        self.src
            .iter()
            .zip(self.form.orders())
            .map(|(&(i, cof), &pp)| (x[i].rem_euclid(pp) * crate::fqf::mod_inverse(cof.rem_euclid(pp), pp)).rem_euclid(pp))
            .collect()
    }

    fn to_ambient(&self, ambient: &FiniteQuadraticForm, y: &[i64]) -> Vec<i64> {
        let mut v = ambient.zero();
        for (c, g) in y.iter().zip(&self.gens) {
            if *c != 0 {
                v = ambient.add(&v, &ambient.scale(*c, g));
            }
        }
        v
    }
}

/// What happened at one prime.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeOutcome {
    pub p: u64,
    /// `ℓ(discr_p F)`.
    pub length: usize,
    /// Kernel generators (ambient coordinates) when one was found.
    pub kernel: Option<Vec<Vec<i64>>>,
    pub kernel_order: u64,
    /// Nikulin check of `(K^⊥/K)_p` for the reported kernel.
    pub check: Option<PrimeCheck>,
    pub nodes: u64,
    pub obstruction: Option<String>,
}

/// Result of a kernel search against one forbidden set.
#[derive(Clone, Debug)]
pub struct KernelSearch {
    /// Ambient codes of all elements of the kernel found.
    pub kernel: Option<HashSet<u64>>,
    pub generators: Vec<Vec<i64>>,
    pub per_prime: Vec<PrimeOutcome>,
    pub gap_warning: bool,
}

/// A subgroup met by [`Engine::candidates`], with its quotient.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub kernel: IsotropicSubgroup,
    /// `(K^⊥/K)_p`.
    pub quotient: FiniteQuadraticForm,
    pub check: PrimeCheck,
    /// Kernel generators in ambient coordinates.
    pub generators: Vec<Vec<i64>>,
}

/// Decision engine for one polarized Fano lattice.
pub struct Engine {
    pub fano: PolarizedFano,
    pub classes: RootClasses,
    pub exceptional: HashSet<u64>,
    pub fractional_k: HashSet<u64>,
    pub degree_d: HashSet<u64>,
    parts: Vec<PrimePart>,
    symmetries: Vec<Vec<Vec<i64>>>,
    opts: DecideOptions,
}

struct Split {
    zero: bool,
    pure: Vec<Bits>,
    mixed: Vec<Vec<u64>>,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: u64) -> Self {
        Bits(vec![0; (n as usize).div_ceil(64)])
    }
    fn set(&mut self, i: u64) {
        self.0[(i / 64) as usize] |= 1 << (i % 64);
    }
    fn get(&self, i: u64) -> bool {
        self.0[(i / 64) as usize] >> (i % 64) & 1 == 1
    }
}

impl Engine {
    pub fn new(fano: PolarizedFano, opts: DecideOptions) -> Result<Self, FormError> {
        let classes = RootClasses::new(&fano)?;
        let exceptional = classes.exceptional_codes();
        let fractional_k = classes.fractional_k_codes();
        let zero = 0u64;
        let degree_d: HashSet<u64> = classes.degree_d_codes().into_iter().filter(|&c| c != zero).collect();
        let form = classes.form().clone();
        let order = form.order();
        let parts = form
            .primes()
            .into_iter()
            .map(|p| {
                let (fp, gens) = form.p_part(p);
                let src = gens
                    .iter()
                    .map(|g| {
                        let i = g.iter().position(|&x| x != 0).expect("non-zero generator");
                        (i, g[i])
                    })
                    .collect();
                let other = order / fp.order();
                PrimePart { p, form: fp, gens, src, other }
            })
            .collect();
        let symmetries = fano
            .automorphism_generators()
            .iter()
            .map(|m| {
                (0..form.num_generators())
                    .map(|i| {
                        let rep = classes.disc.generator_rep(i);
                        let mut img = vec![BigRational::zero(); fano.rank()];
                        for (c, row) in rep.iter().zip(m) {
                            if c.is_zero() {
                                continue;
                            }
                            for (t, &x) in row.iter().enumerate() {
                                if x != 0 {
                                    img[t] += c * BigRational::from_integer(BigInt::from(x));
                                }
                            }
                        }
                        classes.disc.class_of(&img)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Engine { fano, classes, exceptional, fractional_k, degree_d, parts, symmetries, opts })
    }

    pub fn form(&self) -> &FiniteQuadraticForm {
        self.classes.form()
    }

    pub fn corank(&self) -> i64 {
        22 - self.fano.rank() as i64
    }

    /// Forbidden set for subgeometric kernels.
    pub fn admissibility_set(&self) -> HashSet<u64> {
        self.exceptional.union(&self.fractional_k).copied().collect()
    }

    /// Forbidden set for geometric kernels.
    pub fn geometric_set(&self) -> HashSet<u64> {
        let mut s = self.admissibility_set();
        s.extend(self.degree_d.iter().copied());
        s
    }

    fn split(&self, forbidden: &HashSet<u64>) -> Split {
        let f = self.form();
        let mut pure: Vec<Bits> = self.parts.iter().map(|pp| Bits::new(pp.form.order())).collect();
        let mut mixed = Vec::new();
        let mut zero = false;
        for &code in forbidden {
            let x = f.decode(code);
            let codes: Vec<u64> = self.parts.iter().map(|pp| pp.form.encode(&pp.project(&x))).collect();
            let nz: Vec<usize> = (0..codes.len()).filter(|&i| codes[i] != 0).collect();
            match nz.len() {
                0 => zero = true,
                1 => pure[nz[0]].set(codes[nz[0]]),
                _ => mixed.push(codes),
            }
        }
        Split { zero, pure, mixed }
    }

    fn check(&self, i: usize, q: &PerpQuotient) -> PrimeCheck {
        let pp = &self.parts[i];
        nikulin_at_prime(pp.p, &q.form, pp.other, self.corank(), self.opts.reading)
            .expect("quotient of a non-degenerate form")
    }

    fn symmetries_at(&self, i: usize) -> Vec<Vec<Vec<i64>>> {
        let pp = &self.parts[i];
        let f = self.form();
        self.symmetries
            .iter()
            .map(|imgs| {
                pp.gens
                    .iter()
                    .map(|g| {
                        let mut v = f.zero();
                        for (c, img) in g.iter().zip(imgs) {
                            if *c != 0 {
                                v = f.add(&v, &f.scale(*c, img));
                            }
                        }
                        pp.project(&v)
                    })
                    .collect()
            })
            .collect()
    }

    /// Minimal subgroups at prime index `i` avoiding `bits` whose quotient passes
    /// the Nikulin clause at that prime.
    fn minimal_valid(&self, i: usize, bits: &Bits) -> Result<(Vec<(IsotropicSubgroup, PrimeCheck)>, u64, bool), FormError> {
        let pp = &self.parts[i];
        let excl = |y: &[i64]| bits.get(pp.form.encode(y));
        let mut found = Vec::new();
        let mut gap = false;
        let target = self.corank() as usize;
        let search = SubgroupSearch::new(&pp.form, pp.p)?.exclude(&excl).node_cap(self.opts.node_cap);
        let stats = search.run_to_length(target, |k, q, last| {
            let codes = k.element_codes();
            if found.iter().any(|(m, _): &(IsotropicSubgroup, PrimeCheck)| {
                m.element_codes().iter().all(|c| codes.binary_search(c).is_ok())
            }) {
                return Visit::Prune;
            }
            if last {
                let c = self.check(i, q);
                gap |= c.clause == Clause::GapLength && !c.passed;
                if c.passed {
                    found.push((k.clone(), c));
                }
            }
            Visit::Continue
        })?;
        Ok((found, stats.nodes, gap))
    }

    /// Searches for a kernel avoiding `forbidden` whose quotient satisfies
    /// Nikulin's conditions at every prime.
    pub fn search(&self, forbidden: &HashSet<u64>) -> Result<KernelSearch, FormError> {
        let n_parts = self.parts.len();
        let mut per_prime: Vec<PrimeOutcome> = self
            .parts
            .iter()
            .map(|pp| PrimeOutcome {
                p: pp.p,
                length: pp.form.length_at(pp.p),
                kernel: None,
                kernel_order: 0,
                check: None,
                nodes: 0,
                obstruction: None,
            })
            .collect();
        let fail = |per_prime, gap_warning| KernelSearch { kernel: None, generators: vec![], per_prime, gap_warning };
        if self.corank() < 2 {
            for o in &mut per_prime {
                o.obstruction = Some("rank exceeds 20".into());
            }
            return Ok(fail(per_prime, false));
        }
        let split = self.split(forbidden);
        if split.zero {
            for o in &mut per_prime {
                o.obstruction = Some("the zero class is forbidden".into());
            }
            return Ok(fail(per_prime, false));
        }
        if n_parts == 0 {
            return Ok(KernelSearch { kernel: Some(HashSet::from([0])), generators: vec![], per_prime, gap_warning: false });
        }
        let main = (0..n_parts).max_by_key(|&i| (self.parts[i].form.order(), self.parts[i].p)).unwrap();
        let mut gap_warning = false;
        let mut lists: Vec<Vec<(IsotropicSubgroup, PrimeCheck)>> = vec![vec![]; n_parts];
        for i in 0..n_parts {
            if i == main {
                continue;
            }
            let (found, nodes, gap) = self.minimal_valid(i, &split.pure[i])?;
            gap_warning |= gap;
            per_prime[i].nodes = nodes;
            if found.is_empty() {
                per_prime[i].obstruction = Some(format!("no admissible kernel passes the clause at p = {}", self.parts[i].p));
                return Ok(fail(per_prime, gap_warning));
            }
            lists[i] = found;
        }
        // every combination of the other primes' kernels
        let others: Vec<usize> = (0..n_parts).filter(|&i| i != main).collect();
        let mut idx = vec![0usize; others.len()];
        let mp = &self.parts[main];
        loop {
            let chosen: Vec<&IsotropicSubgroup> = others.iter().zip(&idx).map(|(&i, &j)| &lists[i][j].0).collect();
            let contained = |codes: &[u64]| {
                others.iter().zip(&chosen).all(|(&i, k)| k.contains_code(codes[i]))
            };
            let mut bits = split.pure[main].clone();
            let mut dead = false;
            for codes in &split.mixed {
                if contained(codes) {
                    if codes[main] == 0 {
                        dead = true;
                        break;
                    }
                    bits.set(codes[main]);
                }
            }
            if !dead {
                let all_trivial = chosen.iter().all(|k| k.order() == 1);
                let excl = |y: &[i64]| bits.get(mp.form.encode(y));
                let mut search = SubgroupSearch::new(&mp.form, mp.p)?.exclude(&excl).node_cap(self.opts.node_cap);
                if all_trivial {
                    search = search.symmetries(self.symmetries_at(main));
                }
                let mut hit: Option<(IsotropicSubgroup, PrimeCheck)> = None;
                let stats = search.run_to_length(self.corank() as usize, |k, q, last| {
                    if !last {
                        return Visit::Continue;
                    }
                    let c = self.check(main, q);
                    gap_warning |= c.clause == Clause::GapLength && !c.passed;
                    if c.passed {
                        hit = Some((k.clone(), c));
                        Visit::Stop
                    } else {
                        Visit::Continue
                    }
                })?;
                per_prime[main].nodes += stats.nodes;
                if let Some((k, c)) = hit {
                    let mut kernels: Vec<(usize, IsotropicSubgroup, PrimeCheck)> = vec![(main, k, c)];
                    for (&i, &j) in others.iter().zip(&idx) {
                        kernels.push((i, lists[i][j].0.clone(), lists[i][j].1.clone()));
                    }
                    return Ok(self.assemble(kernels, per_prime, gap_warning));
                }
            }
            // next combination
            let mut t = 0;
            loop {
                if t == others.len() {
                    per_prime[main].obstruction =
                        Some(format!("no admissible kernel passes the clause at p = {}", mp.p));
                    return Ok(fail(per_prime, gap_warning));
                }
                idx[t] += 1;
                if idx[t] < lists[others[t]].len() {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
        }
    }

    fn assemble(
        &self,
        kernels: Vec<(usize, IsotropicSubgroup, PrimeCheck)>,
        mut per_prime: Vec<PrimeOutcome>,
        gap_warning: bool,
    ) -> KernelSearch {
        let f = self.form();
        let mut elements: HashSet<u64> = HashSet::from([0]);
        let mut generators = Vec::new();
        for (i, k, c) in kernels {
            let pp = &self.parts[i];
            let gens: Vec<Vec<i64>> = k.generators.iter().map(|g| pp.to_ambient(f, g)).collect();
            let mut next = HashSet::new();
            for &code in k.element_codes() {
                let y = pp.to_ambient(f, &pp.form.decode(code));
                for &e in &elements {
                    next.insert(f.encode(&f.add(&f.decode(e), &y)));
                }
            }
            elements = next;
            per_prime[i].kernel_order = k.order();
            per_prime[i].kernel = Some(gens.clone());
            per_prime[i].check = Some(c);
            generators.extend(gens);
        }
        KernelSearch { kernel: Some(elements), generators, per_prime, gap_warning }
    }

    /// All subgroups of `discr_p` avoiding the pure-`p` part of `forbidden`
    /// whose quotient has length at most `max_length`, up to the symmetry
    /// reduction of the first level.
    pub fn candidates(&self, p: u64, forbidden: &HashSet<u64>, max_length: usize) -> Result<Vec<Candidate>, FormError> {
        let Some(i) = self.parts.iter().position(|pp| pp.p == p) else {
            return Ok(vec![]);
        };
        let split = self.split(forbidden);
        let pp = &self.parts[i];
        let bits = &split.pure[i];
        let excl = |y: &[i64]| bits.get(pp.form.encode(y));
        let mut out = Vec::new();
        SubgroupSearch::new(&pp.form, p)?
            .exclude(&excl)
            .symmetries(self.symmetries_at(i))
            .node_cap(self.opts.node_cap)
            .run_to_length(max_length, |k, q, last| {
                if last {
                    out.push(Candidate {
                        kernel: k.clone(),
                        quotient: q.form.clone(),
                        check: self.check(i, q),
                        generators: k.generators.iter().map(|g| pp.to_ambient(self.form(), g)).collect(),
                    });
                }
                Visit::Continue
            })?;
        Ok(out)
    }

    /// A `(mod p)`-geometric kernel: avoids the pure-`p` exceptional and
    /// fractional-`k` classes and passes the clause at `p`.
    pub fn partial_kernel(&self, p: u64) -> Result<Option<Candidate>, FormError> {
        let Some(i) = self.parts.iter().position(|pp| pp.p == p) else {
            return Ok(None);
        };
        let split = self.split(&self.admissibility_set());
        if split.zero {
            return Ok(None);
        }
        let pp = &self.parts[i];
        let bits = &split.pure[i];
        let excl = |y: &[i64]| bits.get(pp.form.encode(y));
        let mut hit = None;
        SubgroupSearch::new(&pp.form, p)?
            .exclude(&excl)
            .symmetries(self.symmetries_at(i))
            .node_cap(self.opts.node_cap)
            .run_to_length(self.corank() as usize, |k, q, last| {
                if !last {
                    return Visit::Continue;
                }
                let c = self.check(i, q);
                if c.passed {
                    hit = Some(Candidate {
                        kernel: k.clone(),
                        quotient: q.form.clone(),
                        check: c,
                        generators: k.generators.iter().map(|g| pp.to_ambient(self.form(), g)).collect(),
                    });
                    Visit::Stop
                } else {
                    Visit::Continue
                }
            })?;
        Ok(hit)
    }

    /// Whether the prime `p` divides the discriminant.
    pub fn has_prime(&self, p: u64) -> bool {
        self.parts.iter().any(|pp| pp.p == p)
    }

    /// Roots of degree `≤ max_degree` in `k^⊥` of the extension by the kernel.
    pub fn roots_in(&self, kernel: &HashSet<u64>, max_degree: i64) -> Vec<LowDegreeRoot> {
        self.classes.roots_in(&self.fano, kernel, max_degree)
    }

    pub fn decide(&self) -> Result<Verdict, DecideError> {
        let mut verdict = Verdict {
            graph: self.fano.graph.to_string(),
            n: self.fano.n,
            d: self.fano.d,
            status: Status::NotAdmissible,
            per_prime: vec![],
            witness_kernel: None,
            witness_vectors: vec![],
            low_degree_roots: vec![],
            extra_degree_d_roots: 0,
            nikulin_gap_warning: false,
        };
        let f = self.form();
        let two_kappa = f.scale(2, &self.classes.k_class);
        if self.exceptional.contains(&0) || self.fractional_k.contains(&0) || f.encode(&two_kappa) == 0 {
            return Ok(verdict);
        }
        let geo = self.search(&self.geometric_set())?;
        let (status, res) = if geo.kernel.is_some() {
            (Status::Geometric, geo)
        } else {
            let sub = self.search(&self.admissibility_set())?;
            let gap = geo.gap_warning || sub.gap_warning;
            if sub.kernel.is_some() {
                (Status::Subgeometric, KernelSearch { gap_warning: gap, ..sub })
            } else {
                (Status::AdmissibleNotSubgeometric, KernelSearch { gap_warning: gap, ..sub })
            }
        };
        if res.gap_warning {
            log::warn!(
                "{} (n = {}, d = {}): the 2-adic clause hit the case l = r - 1, read as {:?}",
                verdict.graph,
                verdict.n,
                verdict.d,
                self.opts.reading
            );
        }
        verdict.status = status;
        verdict.nikulin_gap_warning = res.gap_warning;
        verdict.per_prime = res.per_prime;
        if let Some(k) = &res.kernel {
            let d = self.fano.d;
            let roots = self.roots_in(k, d);
            verdict.low_degree_roots = roots.iter().filter(|r| r.degree < d).cloned().collect();
            verdict.extra_degree_d_roots = roots.iter().filter(|r| r.degree == d && r.class.iter().any(|&c| c != 0)).count();
            verdict.witness_vectors = res.generators.iter().map(|g| self.classes.disc.representative(g)).collect();
            verdict.witness_kernel = Some(res.generators);
        }
        Ok(verdict)
    }
}
