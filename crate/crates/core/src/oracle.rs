//! Brute-force ground truth on explicit finite abelian groups.
//!
//! Everything here works on element tables: subgroups are bitsets over element indices
//! and isomorphism types are recovered by counting element orders, never through the
//! Smith form. The fast predicates of [`crate::modpid`] and [`crate::taxonomy`] are
//! compared against these checks by [`validate`].
//!
//! Only finite `Z`-modules are modelled. Validation over `F_p[x]` and `Q[x]` relabels
//! each rational prime `p` of a group as a linear prime `x + c`; `D/((x + c)^e)` has the
//! same submodule lattice shape as `Z/(p^e)`, and the fast predicates only see exponent
//! patterns.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Element, RingTag};
use crate::modpid::{self, ModError, StructureDescriptor};
use crate::taxonomy;

/// Hard cap on group order: subgroups are stored as 256-bit sets.
pub const MAX_ORDER: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("group of order {order} exceeds the oracle bound {bound}")]
    BoundExceeded { order: usize, bound: usize },
    #[error("unknown predicate {0:?}")]
    UnknownPredicate(String),
    #[error("cyclic orders must be at least 2, got {0}")]
    InvalidOrder(u64),
    #[error("descriptor {0} is not a finite abelian group")]
    NotFinite(String),
    #[error("cannot relabel {primes} primes over {ring}")]
    RelabelUnavailable { primes: usize, ring: RingTag },
    #[error(transparent)]
    Mod(#[from] ModError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Largest group order accepted at all.
    pub max_order: usize,
    /// Largest order for which summands are found by complement search rather than
    /// the purity criterion.
    pub complement_bound: usize,
    /// Largest order for which quasi-injectivity enumerates every homomorphism
    /// instead of counting.
    pub enumeration_bound: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_order: MAX_ORDER, complement_bound: 64, enumeration_bound: 16 }
    }
}

impl OracleConfig {
    pub fn with_max_order(max_order: usize) -> Self {
        OracleConfig { max_order: max_order.min(MAX_ORDER), ..Self::default() }
    }
}

type Bits = [u64; 4];

const EMPTY: Bits = [0; 4];

fn bit(b: &Bits, i: usize) -> bool {
    b[i >> 6] >> (i & 63) & 1 == 1
}

fn set_bit(b: &mut Bits, i: usize) {
    b[i >> 6] |= 1 << (i & 63);
}

fn count(b: &Bits) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn and(a: &Bits, b: &Bits) -> Bits {
    [a[0] & b[0], a[1] & b[1], a[2] & b[2], a[3] & b[3]]
}

fn subset(a: &Bits, b: &Bits) -> bool {
    and(a, b) == *a
}

fn members(b: &Bits, n: usize) -> impl Iterator<Item = usize> + '_ {
    (0..n).filter(move |&i| bit(b, i))
}

fn small_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Isomorphism type from per-prime exponent lists (any order).
fn type_from_primary(primary: &BTreeMap<u64, Vec<u32>>) -> StructureDescriptor {
    let len = primary.values().map(Vec::len).max().unwrap_or(0);
    let mut factors: Vec<u64> = vec![1; len];
    for (&p, exps) in primary {
        let mut e = exps.clone();
        e.sort_unstable_by(|a, b| b.cmp(a));
        for (j, &k) in e.iter().enumerate() {
            factors[j] *= p.pow(k);
        }
    }
    factors.reverse();
    let z = RingTag::Integers;
    StructureDescriptor::new(z, 0, factors.iter().map(|&f| z.from_i64(f as i64)).collect())
        .expect("prime-power products form a divisibility chain")
}

/// Exponent partition of a `p`-group from `killed[k]` = number of elements killed by `p^k`.
fn exponents_from_counts(p: u64, killed: &[usize]) -> Vec<u32> {
    let mut at_least = Vec::new();
    for k in 1..killed.len() {
        let mut ratio = killed[k] / killed[k - 1];
        let mut m = 0;
        while ratio > 1 {
            ratio /= p as usize;
            m += 1;
        }
        if m == 0 {
            break;
        }
        at_least.push(m);
    }
    // conjugate partition
    let parts = at_least.first().copied().unwrap_or(0);
    (0..parts).map(|i| at_least.iter().filter(|&&c| c > i).count() as u32).collect()
}

/// A finite abelian group `Z/n_1 + ... + Z/n_k` with full addition tables.
#[derive(Clone)]
pub struct FiniteModule {
    cyclic_orders: Vec<u64>,
    order: usize,
    add: Vec<u16>,
    neg: Vec<u16>,
    elem_order: Vec<u16>,
}

impl fmt::Debug for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteModule({self})")
    }
}

impl fmt::Display for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cyclic_orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.cyclic_orders.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PartialEq for FiniteModule {
    fn eq(&self, other: &Self) -> bool {
        self.cyclic_orders == other.cyclic_orders
    }
}

impl Eq for FiniteModule {}

impl FiniteModule {
    pub fn new(cyclic_orders: &[u64], config: &OracleConfig) -> Result<Self, OracleError> {
        if let Some(&n) = cyclic_orders.iter().find(|&&n| n < 2) {
            return Err(OracleError::InvalidOrder(n));
        }
        let bound = config.max_order.min(MAX_ORDER);
        let mut order: usize = 1;
        for &n in cyclic_orders {
            order = order.saturating_mul(usize::try_from(n).unwrap_or(usize::MAX));
        }
        if order > bound {
            return Err(OracleError::BoundExceeded { order, bound });
        }
        let mut g = FiniteModule {
            cyclic_orders: cyclic_orders.to_vec(),
            order,
            add: vec![0; order * order],
            neg: vec![0; order],
            elem_order: vec![0; order],
        };
        let decoded: Vec<Vec<u64>> = (0..order).map(|i| g.element(i)).collect();
        for a in 0..order {
            for b in 0..order {
                let sum: Vec<u64> = decoded[a]
                    .iter()
                    .zip(&decoded[b])
                    .zip(&g.cyclic_orders)
                    .map(|((x, y), n)| (x + y) % n)
                    .collect();
                g.add[a * order + b] = g.index(&sum) as u16;
            }
            let neg: Vec<u64> =
                decoded[a].iter().zip(&g.cyclic_orders).map(|(x, n)| (n - x) % n).collect();
            g.neg[a] = g.index(&neg) as u16;
            let ord = decoded[a]
                .iter()
                .zip(&g.cyclic_orders)
                .map(|(&x, &n)| n / gcd(x, n))
                .fold(1u64, |l, k| l / gcd(l, k) * k);
            g.elem_order[a] = ord as u16;
        }
        Ok(g)
    }

    /// The group with the isomorphism type of a finite `Z`-descriptor.
    pub fn from_descriptor(s: &StructureDescriptor, config: &OracleConfig) -> Result<Self, OracleError> {
        if s.ring() != RingTag::Integers || s.free_rank() > 0 {
            return Err(OracleError::NotFinite(s.to_string()));
        }
        let orders = s
            .invariant_factors()
            .iter()
            .map(|d| {
                d.as_int()
                    .and_then(|v| u64::try_from(v).ok())
                    .ok_or_else(|| OracleError::NotFinite(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&orders, config)
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Residue tuple of element `i` (first coordinate varies fastest).
    pub fn element(&self, mut i: usize) -> Vec<u64> {
        self.cyclic_orders
            .iter()
            .map(|&n| {
                let r = i as u64 % n;
                i /= n as usize;
                r
            })
            .collect()
    }

    pub fn index(&self, residues: &[u64]) -> usize {
        let mut i = 0;
        let mut stride = 1;
        for (r, &n) in residues.iter().zip(&self.cyclic_orders) {
            i += (r % n) as usize * stride;
            stride *= n as usize;
        }
        i
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    pub fn scale(&self, k: u64, a: usize) -> usize {
        let r: Vec<u64> = self
            .element(a)
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &n)| (x as u128 * k as u128 % n as u128) as u64)
            .collect();
        self.index(&r)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.elem_order[a] as u64
    }

    fn full(&self) -> Bits {
        let mut b = EMPTY;
        for i in 0..self.order {
            set_bit(&mut b, i);
        }
        b
    }

    fn zero_bits() -> Bits {
        let mut b = EMPTY;
        set_bit(&mut b, 0);
        b
    }

    /// `S + <g>` for a subgroup `S`.
    fn extend(&self, s: &Bits, g: usize) -> Bits {
        let elems: Vec<usize> = members(s, self.order).collect();
        let mut out = *s;
        let mut m = g;
        while !bit(s, m) {
            for &x in &elems {
                set_bit(&mut out, self.add(x, m));
            }
            m = self.add(m, g);
        }
        out
    }

    fn span(&self, gens: impl IntoIterator<Item = usize>) -> Bits {
        gens.into_iter().fold(Self::zero_bits(), |s, g| self.extend(&s, g))
    }

    fn image(&self, k: u64, s: &Bits) -> Bits {
        let mut out = EMPTY;
        for x in members(s, self.order) {
            set_bit(&mut out, self.scale(k, x));
        }
        out
    }

    fn primes(&self) -> Vec<u64> {
        small_factor(self.order as u64).into_iter().map(|(p, _)| p).collect()
    }

    /// Isomorphism type of the subgroup `s`, by counting elements killed by `p^k`.
    fn subgroup_type(&self, s: &Bits) -> StructureDescriptor {
        let size = count(s);
        let mut primary = BTreeMap::new();
        for (p, e) in small_factor(size as u64) {
            let mut killed = vec![1usize];
            for k in 1..=e {
                let pk = p.pow(k);
                killed.push(members(s, self.order).filter(|&x| pk % self.element_order(x) == 0).count());
            }
            primary.insert(p, exponents_from_counts(p, &killed));
        }
        type_from_primary(&primary)
    }

    /// Isomorphism type of `G / a`: a coset `x + a` is killed by `p^k` iff `p^k x` lies in `a`.
    fn quotient_type(&self, a: &Bits) -> StructureDescriptor {
        let size = self.order / count(a);
        let mut primary = BTreeMap::new();
        for (p, e) in small_factor(size as u64) {
            let mut killed = vec![1usize];
            for k in 1..=e {
                let pk = p.pow(k);
                let n = (0..self.order).filter(|&x| bit(a, self.scale(pk, x))).count();
                killed.push(n / count(a));
            }
            primary.insert(p, exponents_from_counts(p, &killed));
        }
        type_from_primary(&primary)
    }

    /// Isomorphism type of the whole group.
    pub fn descriptor(&self) -> StructureDescriptor {
        self.subgroup_type(&self.full())
    }
}

/// A subgroup with its element set, a generating set and its isomorphism type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submodule {
    bits: Bits,
    size: usize,
    generators: Vec<usize>,
    descriptor: StructureDescriptor,
}

impl Submodule {
    fn from_bits(g: &FiniteModule, bits: Bits) -> Self {
        let mut generators = Vec::new();
        let mut span = FiniteModule::zero_bits();
        for x in members(&bits, g.order) {
            if !bit(&span, x) {
                span = g.extend(&span, x);
                generators.push(x);
            }
        }
        Submodule { bits, size: count(&bits), generators, descriptor: g.subgroup_type(&bits) }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, x: usize) -> bool {
        bit(&self.bits, x)
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..MAX_ORDER).filter(|&i| bit(&self.bits, i)).collect()
    }

    /// Greedy generators: each is the smallest element index outside the span of the
    /// previous ones.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn descriptor(&self) -> &StructureDescriptor {
        &self.descriptor
    }

    pub fn is_subgroup_of(&self, other: &Submodule) -> bool {
        subset(&self.bits, &other.bits)
    }

    pub fn meets_trivially(&self, other: &Submodule) -> bool {
        count(&and(&self.bits, &other.bits)) == 1
    }
}

fn check_bound(g: &FiniteModule, bound: usize) -> Result<(), OracleError> {
    if g.order > bound {
        return Err(OracleError::BoundExceeded { order: g.order, bound });
    }
    Ok(())
}

/// Every subgroup exactly once, sorted by size and then by element set.
pub fn enumerate_submodules(g: &FiniteModule, config: &OracleConfig) -> Result<Vec<Submodule>, OracleError> {
    check_bound(g, config.max_order)?;
    let start = FiniteModule::zero_bits();
    let mut seen: HashSet<Bits> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let mut covered = s;
        for x in 0..g.order {
            if bit(&covered, x) {
                continue;
            }
            // S + <x> only depends on the coset x + S
            for y in members(&s, g.order) {
                set_bit(&mut covered, g.add(x, y));
            }
            let t = g.extend(&s, x);
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    let mut all: Vec<Bits> = seen.into_iter().collect();
    all.sort_by_key(|b| (count(b), *b));
    Ok(all.into_iter().map(|b| Submodule::from_bits(g, b)).collect())
}

/// A complement `B` of `a` (`a ∩ B = 0`, `a + B = G`) among the given subgroups.
pub fn complement<'a>(g: &FiniteModule, subgroups: &'a [Submodule], a: &Submodule) -> Option<&'a Submodule> {
    subgroups
        .iter()
        .find(|b| a.size * b.size == g.order && a.meets_trivially(b))
}

/// Purity test: `a` is a summand iff `a ∩ p^k G = p^k a` for all primes `p` and `k ≥ 1`.
pub fn is_summand_by_purity(g: &FiniteModule, a: &Submodule) -> bool {
    let full = g.full();
    for (p, e) in small_factor(g.order as u64) {
        for k in 1..=e {
            let pk = p.pow(k);
            if and(&a.bits, &g.image(pk, &full)) != g.image(pk, &a.bits) {
                return false;
            }
        }
    }
    true
}

fn is_summand(g: &FiniteModule, subgroups: &[Submodule], a: &Submodule, config: &OracleConfig) -> bool {
    if g.order <= config.complement_bound {
        complement(g, subgroups, a).is_some()
    } else {
        is_summand_by_purity(g, a)
    }
}

pub fn summand_types_by_complement(
    g: &FiniteModule,
    config: &OracleConfig,
) -> Result<BTreeSet<StructureDescriptor>, OracleError> {
    check_bound(g, config.complement_bound)?;
    let subs = enumerate_submodules(g, config)?;
    Ok(subs
        .iter()
        .filter(|a| complement(g, &subs, a).is_some())
        .map(|a| a.descriptor.clone())
        .collect())
}

pub fn summand_types_by_purity(
    g: &FiniteModule,
    config: &OracleConfig,
) -> Result<BTreeSet<StructureDescriptor>, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    Ok(subs
        .iter()
        .filter(|a| is_summand_by_purity(g, a))
        .map(|a| a.descriptor.clone())
        .collect())
}

/// Isomorphism types of direct summands: complement search up to the complement
/// bound, the purity criterion above it.
pub fn summand_types(g: &FiniteModule, config: &OracleConfig) -> Result<BTreeSet<StructureDescriptor>, OracleError> {
    if g.order <= config.complement_bound {
        summand_types_by_complement(g, config)
    } else {
        summand_types_by_purity(g, config)
    }
}

pub fn is_vss_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    let types: BTreeSet<&StructureDescriptor> = subs
        .iter()
        .filter(|a| is_summand(g, &subs, a, config))
        .map(|a| &a.descriptor)
        .collect();
    Ok(subs.iter().all(|a| types.contains(&a.descriptor)))
}

pub fn is_virtually_simple_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    let whole = g.descriptor();
    Ok(g.order > 1 && subs.iter().skip(1).all(|a| a.descriptor == whole))
}

/// Every subgroup is a direct summand.
pub fn is_semisimple_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    Ok(subs.iter().all(|a| is_summand(g, &subs, a, config)))
}

fn all_types_vss(types: BTreeSet<StructureDescriptor>, config: &OracleConfig) -> Result<bool, OracleError> {
    for t in types {
        if !is_vss_bruteforce(&FiniteModule::from_descriptor(&t, config)?, config)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every subgroup is itself virtually semisimple.
pub fn is_completely_vss_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    all_types_vss(subs.into_iter().map(|a| a.descriptor).collect(), config)
}

/// Every quotient is virtually semisimple.
pub fn is_fully_vss_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    all_types_vss(subs.iter().map(|a| g.quotient_type(&a.bits)).collect(), config)
}

/// Types of all quotients `G / A`.
pub fn quotient_types(g: &FiniteModule, config: &OracleConfig) -> Result<BTreeSet<StructureDescriptor>, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    Ok(subs.iter().map(|a| g.quotient_type(&a.bits)).collect())
}

/// The subgroup generated by all elements of prime order.
pub fn socle(g: &FiniteModule, config: &OracleConfig) -> Result<Submodule, OracleError> {
    check_bound(g, config.max_order)?;
    let primes = g.primes();
    let bits = g.span((0..g.order).filter(|&x| primes.contains(&g.element_order(x))));
    Ok(Submodule::from_bits(g, bits))
}

/// Size of a maximal independent family of minimal subgroups, built greedily.
pub fn uniform_dimension_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<usize, OracleError> {
    check_bound(g, config.max_order)?;
    let primes = g.primes();
    let mut span = FiniteModule::zero_bits();
    let mut family = 0;
    for x in 0..g.order {
        if primes.contains(&g.element_order(x)) && !bit(&span, x) {
            span = g.extend(&span, x);
            family += 1;
        }
    }
    Ok(family)
}

/// Searches for an injective homomorphism by assigning images to the standard
/// generators of `a` one at a time. A partial assignment is injective iff its image has
/// the product order, and the continuations only depend on that image, so visited
/// images are pruned.
pub fn embeds_bruteforce(a: &FiniteModule, b: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    check_bound(a, config.max_order)?;
    check_bound(b, config.max_order)?;
    if a.order > b.order {
        return Ok(false);
    }
    let orders = a.cyclic_orders.clone();
    let mut seen: Vec<HashSet<Bits>> = vec![HashSet::new(); orders.len() + 1];
    fn go(
        b: &FiniteModule,
        orders: &[u64],
        level: usize,
        image: Bits,
        seen: &mut [HashSet<Bits>],
    ) -> bool {
        if level == orders.len() {
            return true;
        }
        if !seen[level].insert(image) {
            return false;
        }
        let n = orders[level];
        let target = count(&image) * n as usize;
        for y in 0..b.order {
            if b.element_order(y) != n {
                continue;
            }
            let next = b.extend(&image, y);
            if count(&next) == target && go(b, orders, level + 1, next, seen) {
                return true;
            }
        }
        false
    }
    Ok(go(b, &orders, 0, FiniteModule::zero_bits(), &mut seen))
}

fn hom_count(a: &StructureDescriptor, b: &StructureDescriptor) -> BigUint {
    let ints = |s: &StructureDescriptor| -> Vec<u64> {
        s.invariant_factors()
            .iter()
            .map(|d| u64::try_from(d.as_int().expect("integer descriptor")).expect("small"))
            .collect()
    };
    let (x, y) = (ints(a), ints(b));
    let mut total = BigUint::from(1u32);
    for &m in &x {
        for &n in &y {
            total *= gcd(m, n);
        }
    }
    total
}

/// Quasi-injectivity by counting: restriction `End(G) -> Hom(A, G)` has kernel
/// `Hom(G/A, G)`, so it is onto iff `|End G| = |Hom(A, G)| * |Hom(G/A, G)|`. Hom groups
/// between cyclic sums are counted with `|Hom(Z/m, Z/n)| = gcd(m, n)`, on types
/// recovered by element counting.
pub fn quasi_injective_by_counting(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    let whole = g.descriptor();
    let end = hom_count(&whole, &whole);
    Ok(subs.iter().all(|a| {
        hom_count(&a.descriptor, &whole) * hom_count(&g.quotient_type(&a.bits), &whole) == end
    }))
}

/// Every endomorphism of `G` as its table of images.
fn endomorphisms(g: &FiniteModule) -> Vec<Vec<u16>> {
    let gens: Vec<usize> = (0..g.cyclic_orders.len())
        .map(|i| {
            let mut r = vec![0; g.cyclic_orders.len()];
            r[i] = 1;
            g.index(&r)
        })
        .collect();
    let choices: Vec<Vec<usize>> = g
        .cyclic_orders
        .iter()
        .map(|&n| (0..g.order).filter(|&y| n % g.element_order(y) == 0).collect())
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; gens.len()];
    loop {
        let mut table = vec![0u16; g.order];
        for (x, slot) in table.iter_mut().enumerate() {
            let mut v = 0;
            for (i, r) in g.element(x).into_iter().enumerate() {
                v = g.add(v, g.scale(r, choices[i][pick[i]]));
            }
            *slot = v as u16;
        }
        out.push(table);
        let mut i = 0;
        loop {
            if i == pick.len() {
                return out;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Extends generator images to a map on `span(gens)`; `None` if not well defined.
fn hom_from_generators(g: &FiniteModule, gens: &[usize], images: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut map: BTreeMap<usize, usize> = BTreeMap::from([(0, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let fx = map[&x];
        for (&s, &t) in gens.iter().zip(images) {
            let (y, fy) = (g.add(x, s), g.add(fx, t));
            match map.get(&y) {
                Some(&old) if old != fy => return None,
                Some(_) => {}
                None => {
                    map.insert(y, fy);
                    queue.push_back(y);
                }
            }
        }
    }
    Some(map.into_iter().collect())
}

/// Quasi-injectivity by listing every homomorphism from every subgroup and looking
/// for an endomorphism restricting to it.
pub fn quasi_injective_by_enumeration(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    check_bound(g, config.enumeration_bound)?;
    let subs = enumerate_submodules(g, config)?;
    let ends = endomorphisms(g);
    for a in &subs {
        let elems = a.elements();
        let restrictions: HashSet<Vec<u16>> =
            ends.iter().map(|f| elems.iter().map(|&x| f[x]).collect()).collect();
        let k = a.generators.len();
        let mut images = vec![0usize; k];
        loop {
            if let Some(map) = hom_from_generators(g, &a.generators, &images) {
                let table: Vec<u16> = map.iter().map(|&(_, y)| y as u16).collect();
                if !restrictions.contains(&table) {
                    return Ok(false);
                }
            }
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                images[i] += 1;
                if images[i] < g.order {
                    break;
                }
                images[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(true)
}

/// Enumeration up to the enumeration bound, counting above it.
pub fn is_quasi_injective_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<bool, OracleError> {
    if g.order <= config.enumeration_bound {
        quasi_injective_by_enumeration(g, config)
    } else {
        quasi_injective_by_counting(g, config)
    }
}

/// `{0}` together with every `x` having a non-zero multiple in `a`. A subgroup `B`
/// containing `a` has `a` essential in it iff `B` lies inside this set.
fn essential_hull(g: &FiniteModule, a: &Bits) -> Bits {
    let mut out = FiniteModule::zero_bits();
    for x in 1..g.order {
        let mut m = x;
        while m != 0 {
            if bit(a, m) {
                set_bit(&mut out, x);
                break;
            }
            m = g.add(m, x);
        }
    }
    out
}

/// `a` is essential in `b`: every non-zero subgroup of `b` meets `a`, checked against
/// the full subgroup list.
pub fn is_essential_in(a: &Submodule, b: &Submodule, subgroups: &[Submodule]) -> bool {
    a.is_subgroup_of(b)
        && subgroups
            .iter()
            .filter(|c| c.size > 1 && c.is_subgroup_of(b))
            .all(|c| !c.meets_trivially(a))
}

/// Subgroups with no proper essential extension.
pub fn closed_subgroups(g: &FiniteModule, config: &OracleConfig) -> Result<Vec<Submodule>, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    Ok(subs
        .into_iter()
        .filter(|a| {
            let hull = essential_hull(g, &a.bits);
            let outside: Vec<usize> = members(&hull, g.order).filter(|&x| !a.contains(x)).collect();
            outside.into_iter().all(|x| !subset(&g.extend(&a.bits, x), &hull))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendingVerdict {
    pub value: bool,
    /// A closed subgroup that is not a direct summand.
    pub witness: Option<Submodule>,
}

/// Every closed subgroup is a direct summand.
pub fn is_extending_bruteforce(g: &FiniteModule, config: &OracleConfig) -> Result<ExtendingVerdict, OracleError> {
    let subs = enumerate_submodules(g, config)?;
    let witness = closed_subgroups(g, config)?
        .into_iter()
        .find(|a| !is_summand(g, &subs, a, config));
    Ok(ExtendingVerdict { value: witness.is_none(), witness })
}

/// All abelian groups of order at most `bound`, as primary cyclic orders, sorted by
/// order and then by cyclic orders.
pub fn groups_up_to(bound: usize) -> Vec<Vec<u64>> {
    fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=n.min(max)).rev() {
            for mut rest in partitions(n - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for n in 1..=bound as u64 {
        let mut groups: Vec<Vec<u64>> = vec![vec![]];
        for (p, e) in small_factor(n) {
            let mut next = Vec::new();
            for g in &groups {
                for part in partitions(e, e) {
                    let mut h = g.clone();
                    h.extend(part.iter().rev().map(|&k| p.pow(k)));
                    next.push(h);
                }
            }
            groups = next;
        }
        groups.sort();
        out.extend(groups);
    }
    out
}

fn p_groups_up_to(bound: usize) -> BTreeMap<u64, Vec<Vec<u64>>> {
    let mut out: BTreeMap<u64, Vec<Vec<u64>>> = BTreeMap::new();
    for g in groups_up_to(bound) {
        let primes: BTreeSet<u64> = g.iter().map(|&q| small_factor(q)[0].0).collect();
        if primes.len() == 1 {
            out.entry(*primes.first().unwrap()).or_default().push(g);
        }
    }
    for list in out.values_mut() {
        list.insert(0, vec![]);
    }
    out
}

pub const PREDICATES: &[&str] = &[
    "virtually_semisimple",
    "virtually_simple",
    "completely_virtually_semisimple",
    "fully_virtually_semisimple",
    "semisimple",
    "quasi_injective",
    "embeds",
    "summand_via_purity",
    "socle",
    "uniform_dimension",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub input: String,
    pub fast: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub predicate: String,
    pub bound: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relabeled_over: Option<RingTag>,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Moves a `Z`-descriptor to `ring`, sending the `i`-th prime of `primes` to `x + i`.
fn relabel(s: &StructureDescriptor, ring: RingTag, primes: &[u64]) -> Result<StructureDescriptor, OracleError> {
    if ring == RingTag::Integers {
        return Ok(s.clone());
    }
    if let RingTag::PolyOverPrimeField(p) = ring {
        if primes.len() as u64 > p {
            return Err(OracleError::RelabelUnavailable { primes: primes.len(), ring });
        }
    }
    let factors: Vec<Element> = s
        .invariant_factors()
        .iter()
        .map(|d| {
            let n = u64::try_from(d.as_int().expect("integer descriptor")).expect("small");
            small_factor(n).into_iter().fold(ring.one(), |acc, (q, e)| {
                let i = primes.iter().position(|&r| r == q).expect("prime listed");
                let linear = &ring.x().expect("polynomial ring") + &ring.from_i64(i as i64);
                &acc * &linear.pow(e)
            })
        })
        .collect();
    Ok(StructureDescriptor::new(ring, s.free_rank(), factors)?)
}

fn primes_of(orders: &[u64]) -> Vec<u64> {
    let set: BTreeSet<u64> = orders.iter().flat_map(|&n| small_factor(n)).map(|(p, _)| p).collect();
    set.into_iter().collect()
}

fn bool_mismatch(input: String, fast: bool, oracle: bool) -> Option<Mismatch> {
    (fast != oracle).then(|| Mismatch { input, fast: fast.to_string(), oracle: oracle.to_string() })
}

fn check_one(
    predicate: &str,
    orders: &[u64],
    ring: RingTag,
    config: &OracleConfig,
) -> Result<Option<Mismatch>, OracleError> {
    let g = FiniteModule::new(orders, config)?;
    let primes = primes_of(orders);
    let s = relabel(&g.descriptor(), ring, &primes)?;
    let input = g.to_string();
    Ok(match predicate {
        "virtually_semisimple" => {
            bool_mismatch(input, taxonomy::is_virtually_semisimple(&s)?, is_vss_bruteforce(&g, config)?)
        }
        "virtually_simple" => {
            bool_mismatch(input, taxonomy::is_virtually_simple(&s)?, is_virtually_simple_bruteforce(&g, config)?)
        }
        "completely_virtually_semisimple" => bool_mismatch(
            input,
            taxonomy::is_completely_virtually_semisimple(&s)?,
            is_completely_vss_bruteforce(&g, config)?,
        ),
        "fully_virtually_semisimple" => bool_mismatch(
            input,
            taxonomy::is_fully_virtually_semisimple(&s)?,
            is_fully_vss_bruteforce(&g, config)?,
        ),
        "semisimple" => bool_mismatch(input, taxonomy::is_semisimple(&s)?, is_semisimple_bruteforce(&g, config)?),
        "quasi_injective" => {
            bool_mismatch(input, taxonomy::is_quasi_injective(&s)?, is_quasi_injective_bruteforce(&g, config)?)
        }
        "summand_via_purity" => {
            let by_complement = summand_types_by_complement(&g, config)?;
            let by_purity = summand_types_by_purity(&g, config)?;
            let show = |t: &BTreeSet<StructureDescriptor>| {
                t.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
            };
            (by_complement != by_purity).then(|| Mismatch {
                input,
                fast: show(&by_purity),
                oracle: show(&by_complement),
            })
        }
        "socle" => {
            let fast = modpid::socle(&s)?;
            let oracle = relabel(socle(&g, config)?.descriptor(), ring, &primes)?;
            (fast != oracle).then(|| Mismatch { input, fast: fast.to_string(), oracle: oracle.to_string() })
        }
        "uniform_dimension" => {
            let fast = modpid::uniform_dimension(&s)?;
            let oracle = uniform_dimension_bruteforce(&g, config)?;
            (fast != oracle).then(|| Mismatch { input, fast: fast.to_string(), oracle: oracle.to_string() })
        }
        other => return Err(OracleError::UnknownPredicate(other.to_string())),
    })
}

fn check_pair(a: &[u64], b: &[u64], ring: RingTag, config: &OracleConfig) -> Result<Option<Mismatch>, OracleError> {
    let (ga, gb) = (FiniteModule::new(a, config)?, FiniteModule::new(b, config)?);
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    let primes = primes_of(&both);
    let fast = modpid::embeds(&relabel(&ga.descriptor(), ring, &primes)?, &relabel(&gb.descriptor(), ring, &primes)?)?;
    let oracle = embeds_bruteforce(&ga, &gb, config)?;
    Ok(bool_mismatch(format!("{ga} -> {gb}"), fast, oracle))
}

/// Runs a fast predicate against the oracle on every abelian group of order at most
/// `bound` (for `embeds`: every ordered pair of `p`-groups for the same prime).
pub fn validate(predicate: &str, bound: usize, config: &OracleConfig) -> Result<ValidationReport, OracleError> {
    validate_over(predicate, bound, RingTag::Integers, config)
}

/// As [`validate`], with the fast side evaluated on descriptors relabeled over `ring`.
pub fn validate_over(
    predicate: &str,
    bound: usize,
    ring: RingTag,
    config: &OracleConfig,
) -> Result<ValidationReport, OracleError> {
    if !PREDICATES.contains(&predicate) {
        return Err(OracleError::UnknownPredicate(predicate.to_string()));
    }
    let limit = if predicate == "summand_via_purity" { config.complement_bound } else { config.max_order };
    if bound > limit {
        return Err(OracleError::BoundExceeded { order: bound, bound: limit });
    }
    let results: Vec<Result<Option<Mismatch>, OracleError>> = if predicate == "embeds" {
        let pairs: Vec<(Vec<u64>, Vec<u64>)> = p_groups_up_to(bound)
            .into_values()
            .flat_map(|list| {
                list.iter()
                    .flat_map(|a| list.iter().map(move |b| (a.clone(), b.clone())))
                    .collect::<Vec<_>>()
            })
            .collect();
        pairs.par_iter().map(|(a, b)| check_pair(a, b, ring, config)).collect()
    } else {
        groups_up_to(bound).par_iter().map(|g| check_one(predicate, g, ring, config)).collect()
    };
    let checked = results.len();
    let mut mismatches = Vec::new();
    for r in results {
        if let Some(m) = r? {
            mismatches.push(m);
        }
    }
    Ok(ValidationReport {
        predicate: predicate.to_string(),
        bound,
        relabeled_over: (ring != RingTag::Integers).then_some(ring),
        checked,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn g(orders: &[u64]) -> FiniteModule {
        FiniteModule::new(orders, &cfg()).unwrap()
    }

    fn zd(f: &[i64]) -> StructureDescriptor {
        let z = RingTag::Integers;
        StructureDescriptor::new(z, 0, f.iter().map(|&v| z.from_i64(v)).collect()).unwrap()
    }

    #[test]
    fn tables_and_types() {
        let h = g(&[4, 6]);
        assert_eq!(h.order(), 24);
        assert_eq!(h.descriptor(), zd(&[2, 12]));
        let x = h.index(&[1, 5]);
        assert_eq!(h.element_order(x), 12);
        assert_eq!(h.add(x, h.neg(x)), 0);
        assert_eq!(h.element(h.scale(3, x)), vec![3, 3]);
        assert_eq!(g(&[]).descriptor(), StructureDescriptor::zero(RingTag::Integers));
        assert!(matches!(FiniteModule::new(&[1], &cfg()), Err(OracleError::InvalidOrder(1))));
        assert!(matches!(
            FiniteModule::new(&[16, 32], &cfg()),
            Err(OracleError::BoundExceeded { order: 512, .. })
        ));
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(enumerate_submodules(&g(&[4]), &cfg()).unwrap().len(), 3);
        assert_eq!(enumerate_submodules(&g(&[2, 2]), &cfg()).unwrap().len(), 5);
        assert_eq!(enumerate_submodules(&g(&[6]), &cfg()).unwrap().len(), 4);
        for p in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(enumerate_submodules(&g(&[p, p]), &cfg()).unwrap().len() as u64, p + 3);
        }
        for n in 2..=60u64 {
            let divisors = (1..=n).filter(|d| n % d == 0).count();
            assert_eq!(enumerate_submodules(&g(&[n]), &cfg()).unwrap().len(), divisors, "Z/{n}");
        }
        // subspaces of F_2^4: 1 + 15 + 35 + 15 + 1
        assert_eq!(enumerate_submodules(&g(&[2, 2, 2, 2]), &cfg()).unwrap().len(), 67);
    }

    #[test]
    fn subgroups_are_closed_and_typed_consistently() {
        let h = g(&[2, 4, 3]);
        let subs = enumerate_submodules(&h, &cfg()).unwrap();
        for s in &subs {
            for x in s.elements() {
                assert!(s.contains(h.neg(x)));
                for y in s.elements() {
                    assert!(s.contains(h.add(x, y)));
                }
            }
            let rebuilt = FiniteModule::from_descriptor(s.descriptor(), &cfg()).unwrap();
            assert_eq!(rebuilt.order(), s.size());
            assert_eq!(h.span(s.generators().iter().copied()), s.bits);
        }
        assert!(subs.windows(2).all(|w| (w[0].size, w[0].bits) < (w[1].size, w[1].bits)));
    }

    #[test]
    fn summand_type_examples() {
        let types = |o: &[u64]| summand_types(&g(o), &cfg()).unwrap();
        assert_eq!(types(&[4]), BTreeSet::from([zd(&[]), zd(&[4])]));
        assert_eq!(types(&[2, 4]), BTreeSet::from([zd(&[]), zd(&[2]), zd(&[4]), zd(&[2, 4])]));
        assert_eq!(types(&[2, 2]), BTreeSet::from([zd(&[]), zd(&[2]), zd(&[2, 2])]));
        for o in [&[2u64, 8][..], &[4, 4], &[2, 2, 4], &[3, 9]] {
            assert_eq!(summand_types_by_purity(&g(o), &cfg()).unwrap(), types(o));
        }
    }

    #[test]
    fn vss_and_virtually_simple_examples() {
        assert!(!is_vss_bruteforce(&g(&[4]), &cfg()).unwrap());
        assert!(!is_vss_bruteforce(&g(&[2, 4]), &cfg()).unwrap());
        assert!(is_vss_bruteforce(&g(&[6]), &cfg()).unwrap());
        assert!(is_virtually_simple_bruteforce(&g(&[5]), &cfg()).unwrap());
        assert!(!is_virtually_simple_bruteforce(&g(&[4]), &cfg()).unwrap());
        assert!(!is_virtually_simple_bruteforce(&g(&[2, 2]), &cfg()).unwrap());
        assert!(!is_virtually_simple_bruteforce(&g(&[]), &cfg()).unwrap());
        assert!(!is_virtually_simple_bruteforce(&g(&[6]), &cfg()).unwrap());
    }

    #[test]
    fn embedding_examples() {
        let e = |a: &[u64], b: &[u64]| embeds_bruteforce(&g(a), &g(b), &cfg()).unwrap();
        assert!(!e(&[2, 2], &[4]));
        assert!(e(&[4], &[8]));
        assert!(e(&[2], &[2, 4]));
        assert!(!e(&[3], &[2, 5]));
        assert!(e(&[2, 2], &[4, 4]));
        assert!(!e(&[4, 4], &[2, 16]));
        assert!(e(&[], &[3]));
    }

    #[test]
    fn quasi_injective_examples() {
        let c = cfg();
        for (o, want) in [(&[2u64, 2][..], true), (&[2, 4], false), (&[8], true), (&[4, 4], true), (&[2, 8], false)] {
            assert_eq!(quasi_injective_by_enumeration(&g(o), &c).unwrap(), want, "{o:?}");
            assert_eq!(quasi_injective_by_counting(&g(o), &c).unwrap(), want, "{o:?}");
        }
    }

    #[test]
    fn quasi_injective_routes_agree() {
        let c = cfg();
        for o in groups_up_to(16) {
            let h = g(&o);
            assert_eq!(
                quasi_injective_by_enumeration(&h, &c).unwrap(),
                quasi_injective_by_counting(&h, &c).unwrap(),
                "{h}"
            );
        }
    }

    #[test]
    fn essential_hull_matches_definition() {
        let c = cfg();
        for o in [&[2u64, 4][..], &[8, 2], &[2, 2, 2], &[4, 3]] {
            let h = g(o);
            let subs = enumerate_submodules(&h, &c).unwrap();
            let closed = closed_subgroups(&h, &c).unwrap();
            for a in &subs {
                let by_definition = !subs.iter().any(|b| b != a && is_essential_in(a, b, &subs));
                assert_eq!(closed.contains(a), by_definition, "{h}: {:?}", a.descriptor());
            }
        }
    }

    #[test]
    fn extending_examples() {
        let c = cfg();
        let bad = is_extending_bruteforce(&g(&[8, 2]), &c).unwrap();
        assert!(!bad.value);
        let w = bad.witness.unwrap();
        let h = g(&[8, 2]);
        assert!(complement(&h, &enumerate_submodules(&h, &c).unwrap(), &w).is_none());
        assert!(is_extending_bruteforce(&g(&[2, 2]), &c).unwrap().value);
        assert!(is_extending_bruteforce(&g(&[4, 2]), &c).unwrap().value);
        assert!(is_extending_bruteforce(&g(&[8]), &c).unwrap().value);
    }

    #[test]
    fn socle_and_uniform_dimension() {
        let c = cfg();
        assert_eq!(socle(&g(&[2, 4]), &c).unwrap().descriptor(), &zd(&[2, 2]));
        assert_eq!(socle(&g(&[4, 9]), &c).unwrap().descriptor(), &zd(&[6]));
        assert_eq!(uniform_dimension_bruteforce(&g(&[6]), &c).unwrap(), 2);
        assert_eq!(uniform_dimension_bruteforce(&g(&[2, 4, 8]), &c).unwrap(), 3);
    }

    #[test]
    fn group_enumeration() {
        let gs = groups_up_to(16);
        // number of abelian groups of order 1..=16
        let per_order = [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5];
        assert_eq!(gs.len(), per_order.iter().sum::<usize>());
        for o in &gs {
            assert!(o.iter().all(|&n| small_factor(n).len() == 1));
        }
        assert!(gs.contains(&vec![2, 2, 4]));
    }

    #[test]
    fn validation_small_bounds() {
        let c = cfg();
        for p in PREDICATES {
            let bound = if *p == "completely_virtually_semisimple" || *p == "fully_virtually_semisimple" { 32 } else { 48 };
            let r = validate(p, bound, &c).unwrap();
            assert!(r.mismatches.is_empty(), "{p}: {:?}", r.mismatches);
            assert!(r.checked > 0);
        }
        assert!(matches!(validate("nope", 10, &c), Err(OracleError::UnknownPredicate(_))));
        assert!(matches!(
            validate("summand_via_purity", 128, &c),
            Err(OracleError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn validation_over_polynomial_rings() {
        let c = cfg();
        for ring in [RingTag::poly_fp(5).unwrap(), RingTag::poly_fp(3).unwrap(), RingTag::PolyOverRationals] {
            for p in ["virtually_semisimple", "virtually_simple", "quasi_injective", "socle", "embeds"] {
                let r = validate_over(p, 24, ring, &c).unwrap();
                assert!(r.mismatches.is_empty(), "{p} over {ring}: {:?}", r.mismatches);
                assert_eq!(r.relabeled_over, Some(ring));
            }
        }
        assert!(matches!(
            validate_over("socle", 30, RingTag::poly_fp(2).unwrap(), &c),
            Err(OracleError::RelabelUnavailable { .. })
        ));
    }

    #[test]
    fn report_json_shape() {
        let r = validate("virtually_simple", 12, &cfg()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["predicate"], "virtually_simple");
        assert_eq!(v["bound"], 12);
        assert!(v["mismatches"].as_array().unwrap().is_empty());
        assert!(v.get("relabeled_over").is_none());
        assert_eq!(serde_json::from_value::<ValidationReport>(v).unwrap(), r);
    }
}
