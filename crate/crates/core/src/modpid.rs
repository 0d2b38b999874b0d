//! Finitely generated modules over the supported principal ideal domains.
//!
//! Every module is canonicalized to a [`StructureDescriptor`]: a free rank `r` and an
//! invariant-factor chain `d1 | d2 | ... | dk` of non-zero non-units, so that
//! `M = D^r + D/(d1) + ... + D/(dk)`. Two modules are isomorphic exactly when their
//! descriptors are equal.
//!
//! Operations that need the prime factors of the invariant factors work over the
//! integers and F_p[x]; over Q[x] they succeed when rational-root splitting decides
//! the factorization and fail with [`ModError::UnsupportedRing`] otherwise.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{self, factor_decidable, ArithError, Element, RingTag};
use crate::smith::{smith_normal_form, MatrixOverDomain, SmithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingTag, right: RingTag },
    #[error("unsupported ring {ring} for {operation}")]
    UnsupportedRing { ring: RingTag, operation: String },
    #[error("the unit ideal is not a proper ideal")]
    UnitIdeal,
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error(transparent)]
    Arith(ArithError),
    #[error(transparent)]
    Smith(#[from] SmithError),
}

impl From<ArithError> for ModError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::RingMismatch { left, right } => ModError::RingMismatch { left, right },
            other => ModError::Arith(other),
        }
    }
}

fn unsupported(ring: RingTag, operation: &str, cause: ArithError) -> ModError {
    match cause {
        ArithError::UnsupportedRing { operation: detail } => ModError::UnsupportedRing {
            ring,
            operation: format!("{operation} ({detail})"),
        },
        other => ModError::Arith(other),
    }
}

fn check_rings(a: RingTag, b: RingTag) -> Result<(), ModError> {
    if a != b {
        return Err(ModError::RingMismatch { left: a, right: b });
    }
    Ok(())
}

/// Cokernel presentation `D^g / rowspace(relations)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    ring: RingTag,
    generators: usize,
    relations: MatrixOverDomain,
}

impl Presentation {
    pub fn new(ring: RingTag, generators: usize, relations: MatrixOverDomain) -> Result<Self, ModError> {
        check_rings(ring, relations.ring())?;
        if relations.cols() != generators {
            return Err(SmithError::ShapeMismatch(format!(
                "relation matrix has {} columns but there are {generators} generators",
                relations.cols()
            ))
            .into());
        }
        Ok(Presentation { ring, generators, relations })
    }

    pub fn free(ring: RingTag, generators: usize) -> Self {
        Presentation { ring, generators, relations: MatrixOverDomain::zero(ring, 0, generators) }
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &MatrixOverDomain {
        &self.relations
    }
}

/// Canonical form of a finitely generated module: free rank plus invariant factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructureDescriptor {
    ring: RingTag,
    free_rank: usize,
    invariant_factors: Vec<Element>,
}

impl StructureDescriptor {
    /// Validates that the factors form a chain of canonical non-zero non-units.
    pub fn new(ring: RingTag, free_rank: usize, invariant_factors: Vec<Element>) -> Result<Self, ModError> {
        for d in &invariant_factors {
            check_rings(ring, d.ring())?;
            if d.is_zero() || d.is_unit() {
                return Err(ModError::InvalidDescriptor(format!("{d} is zero or a unit")));
            }
            if *d != d.canonical() {
                return Err(ModError::InvalidDescriptor(format!("{d} is not a canonical associate")));
            }
        }
        if let Some(w) = invariant_factors.windows(2).find(|w| !w[0].divides(&w[1])) {
            return Err(ModError::InvalidDescriptor(format!("{} does not divide {}", w[0], w[1])));
        }
        Ok(StructureDescriptor { ring, free_rank, invariant_factors })
    }

    /// Canonicalizes `D^free_rank + sum D/(e)` for arbitrary entries `e`: zeros add to
    /// the free rank, units vanish, the rest is brought into a divisibility chain by
    /// repeated `(a, b) -> (gcd, lcm)` exchanges.
    pub fn from_diagonal(ring: RingTag, free_rank: usize, entries: &[Element]) -> Result<Self, ModError> {
        let mut rank = free_rank;
        let mut chain = Vec::new();
        for e in entries {
            check_rings(ring, e.ring())?;
            if e.is_zero() {
                rank += 1;
            } else if !e.is_unit() {
                chain.push(e.canonical());
            }
        }
        for i in 0..chain.len() {
            for j in i + 1..chain.len() {
                let g = chain[i].gcd(&chain[j]);
                let l = chain[i].lcm(&chain[j]);
                chain[i] = g;
                chain[j] = l;
            }
        }
        chain.retain(|d| !d.is_unit());
        Ok(StructureDescriptor { ring, free_rank: rank, invariant_factors: chain })
    }

    pub fn zero(ring: RingTag) -> Self {
        StructureDescriptor { ring, free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(ring: RingTag, rank: usize) -> Self {
        StructureDescriptor { ring, free_rank: rank, invariant_factors: Vec::new() }
    }

    /// `D/(d)`.
    pub fn cyclic(d: &Element) -> Result<Self, ModError> {
        Self::from_diagonal(d.ring(), 0, std::slice::from_ref(d))
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[Element] {
        &self.invariant_factors
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank == 0
    }

    /// Minimal number of generators.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }

    /// Diagonal presentation with `generator_count()` generators.
    pub fn to_presentation(&self) -> Presentation {
        let k = self.invariant_factors.len();
        let g = self.free_rank + k;
        let mut rel = MatrixOverDomain::zero(self.ring, k, g);
        for (i, d) in self.invariant_factors.iter().enumerate() {
            rel.set(i, i, d.clone());
        }
        Presentation { ring: self.ring, generators: g, relations: rel }
    }
}

impl fmt::Display for StructureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.ring {
            RingTag::Integers => "Z".to_string(),
            RingTag::PolyOverPrimeField(p) => format!("F{p}[x]"),
            RingTag::PolyOverRationals => "Q[x]".to_string(),
        };
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push(base.clone()),
            r => parts.push(format!("{base}^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("{base}/({d})"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Per-prime exponent partitions of the torsion part, plus the free rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimaryDecomposition {
    pub ring: RingTag,
    pub free_rank: usize,
    /// Exponents in ascending order for each canonical prime.
    pub components: BTreeMap<Element, Vec<u32>>,
}

impl PrimaryDecomposition {
    /// Pairs the largest exponents of every prime into the last invariant factor, the next
    /// largest into the one before, and so on.
    pub fn reassemble(&self) -> StructureDescriptor {
        let k = self.components.values().map(Vec::len).max().unwrap_or(0);
        let mut chain = vec![self.ring.one(); k];
        for (p, exps) in &self.components {
            let offset = k - exps.len();
            for (i, e) in exps.iter().enumerate() {
                chain[offset + i] = &chain[offset + i] * &p.pow(*e);
            }
        }
        StructureDescriptor { ring: self.ring, free_rank: self.free_rank, invariant_factors: chain }
    }

    /// Number of primary cyclic summands.
    pub fn component_count(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    /// `#{i : exponent_i >= t}` for prime `p`.
    pub fn count_at_least(&self, p: &Element, t: u32) -> usize {
        self.components
            .get(p)
            .map_or(0, |exps| exps.iter().filter(|&&e| e >= t).count())
    }
}

/// Descriptor of the cokernel of the relation matrix.
pub fn structure(p: &Presentation) -> StructureDescriptor {
    let diag = smith_normal_form(&p.relations).diagonal();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    StructureDescriptor {
        ring: p.ring,
        free_rank: p.generators - nonzero,
        invariant_factors: diag.into_iter().filter(|d| !d.is_zero() && !d.is_unit()).collect(),
    }
}

pub fn is_isomorphic(a: &StructureDescriptor, b: &StructureDescriptor) -> Result<bool, ModError> {
    check_rings(a.ring, b.ring)?;
    Ok(a == b)
}

pub fn direct_sum(a: &StructureDescriptor, b: &StructureDescriptor) -> Result<StructureDescriptor, ModError> {
    check_rings(a.ring, b.ring)?;
    let entries: Vec<Element> = a.invariant_factors.iter().chain(&b.invariant_factors).cloned().collect();
    StructureDescriptor::from_diagonal(a.ring, a.free_rank + b.free_rank, &entries)
}

/// Direct sum of a list of descriptors over `ring`.
pub fn direct_sum_all<'a>(
    ring: RingTag,
    parts: impl IntoIterator<Item = &'a StructureDescriptor>,
) -> Result<StructureDescriptor, ModError> {
    parts
        .into_iter()
        .try_fold(StructureDescriptor::zero(ring), |acc, s| direct_sum(&acc, s))
}

/// Torsion part (free rank zero) and the free rank.
pub fn torsion_free_split(s: &StructureDescriptor) -> (StructureDescriptor, usize) {
    let torsion = StructureDescriptor {
        ring: s.ring,
        free_rank: 0,
        invariant_factors: s.invariant_factors.clone(),
    };
    (torsion, s.free_rank)
}

/// Canonical prime powers of a non-zero non-unit element.
pub(crate) fn prime_powers(d: &Element, operation: &str) -> Result<Vec<(Element, u32)>, ModError> {
    factor_decidable(d)
        .map(|f| f.factors)
        .map_err(|e| unsupported(d.ring(), operation, e))
}

pub fn primary_decomposition(s: &StructureDescriptor) -> Result<PrimaryDecomposition, ModError> {
    let mut components: BTreeMap<Element, Vec<u32>> = BTreeMap::new();
    for d in &s.invariant_factors {
        for (p, e) in prime_powers(d, "primary decomposition")? {
            components.entry(p).or_default().push(e);
        }
    }
    // the chain order already makes each prime's exponents ascending
    Ok(PrimaryDecomposition { ring: s.ring, free_rank: s.free_rank, components })
}

/// Largest semisimple submodule: one copy of `D/(p)` per primary cyclic component.
///
/// Over Q[x] the socle of `D/(d)` is `D/(rad d)` with `rad d = d / gcd(d, d')`, so no
/// factorization is needed.
pub fn socle(s: &StructureDescriptor) -> Result<StructureDescriptor, ModError> {
    let entries: Vec<Element> = match s.ring {
        RingTag::PolyOverRationals => s
            .invariant_factors
            .iter()
            .map(|d| d.exact_div(&d.gcd(&d.derivative())))
            .collect(),
        _ => {
            let pd = primary_decomposition(s)?;
            pd.components
                .iter()
                .flat_map(|(p, exps)| std::iter::repeat_n(p.clone(), exps.len()))
                .collect()
        }
    };
    StructureDescriptor::from_diagonal(s.ring, 0, &entries)
}

/// Free rank plus the number of primary cyclic components.
pub fn uniform_dimension(s: &StructureDescriptor) -> Result<usize, ModError> {
    Ok(s.free_rank + primary_decomposition(s)?.component_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum KrullDimension {
    /// The zero module.
    NoDimension,
    Dim(u32),
}

pub fn krull_dimension(s: &StructureDescriptor) -> KrullDimension {
    if s.is_zero() {
        KrullDimension::NoDimension
    } else if s.free_rank == 0 {
        KrullDimension::Dim(0)
    } else {
        KrullDimension::Dim(1)
    }
}

/// Whether `a` is isomorphic to a submodule of `b`: the free rank may not drop and, for
/// every prime `p` and every `t >= 1`, `a` has at most as many `p`-components of
/// exponent `>= t` as `b` does.
pub fn embeds(a: &StructureDescriptor, b: &StructureDescriptor) -> Result<bool, ModError> {
    check_rings(a.ring, b.ring)?;
    if a.free_rank > b.free_rank {
        return Ok(false);
    }
    let pa = primary_decomposition(a)?;
    let pb = primary_decomposition(b)?;
    for (p, exps) in &pa.components {
        let top = exps.iter().copied().max().unwrap_or(0);
        if (1..=top).any(|t| pa.count_at_least(p, t) > pb.count_at_least(p, t)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mutual embeddability.
pub fn subisomorphic(a: &StructureDescriptor, b: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(embeds(a, b)? && embeds(b, a)?)
}

fn divisors(d: &Element) -> Result<Vec<Element>, ModError> {
    let mut divs = vec![d.ring().one()];
    for (p, e) in prime_powers(d, "divisor enumeration")? {
        let mut next = Vec::new();
        for q in &divs {
            let mut acc = q.clone();
            for _ in 0..=e {
                next.push(acc.clone());
                acc = &acc * &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// Whether the principal ideal `(d)` is quasi-prime, decided from the definition: every
/// pair of ideals `A = (a)`, `B = (b)` with `AB <= (d) <= A ∩ B` must have `A <= (d)` or
/// `B <= (d)`. Ideals containing `(d)` are generated by divisors of `d`, so the search
/// over divisor pairs is complete.
pub fn is_quasi_prime_ideal(d: &Element) -> Result<bool, ModError> {
    if !d.ring().supports_factor() {
        return Err(ModError::UnsupportedRing {
            ring: d.ring(),
            operation: "quasi-prime ideal test".into(),
        });
    }
    if d.is_unit() {
        return Err(ModError::UnitIdeal);
    }
    if d.is_zero() {
        // in a domain ab = 0 forces a = 0 or b = 0
        return Ok(true);
    }
    let divs = divisors(d)?;
    for a in &divs {
        for b in &divs {
            let product_inside = d.divides(&(a * b));
            if product_inside && !d.divides(a) && !d.divides(b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `d` is a prime element, when decidable for its ring.
pub fn is_prime(d: &Element) -> Result<bool, ModError> {
    if matches!(d, Element::Rat(_)) && !d.is_zero() && !d.is_unit() && !d.gcd(&d.derivative()).is_unit() {
        return Ok(false);
    }
    arith::is_prime_element(d).map_err(|e| unsupported(d.ring(), "primality", e))
}
