//! Decision procedures for the virtually simple / virtually semisimple taxonomy on
//! canonical descriptors, decomposition into virtually simple summands, and
//! Krull-Schmidt pairing certificates.
//!
//! Over the supported commutative PIDs the predicates reduce to statements about the
//! invariant factors:
//!
//! | predicate                         | holds iff                                   |
//! |-----------------------------------|---------------------------------------------|
//! | virtually simple                  | `M = D`, or `M = D/(p)` with `p` prime      |
//! | virtually semisimple              | torsion part squarefree                     |
//! | completely virtually semisimple   | same as virtually semisimple                |
//! | fully virtually semisimple        | semisimple: free rank 0, torsion squarefree |
//! | quasi-injective                   | free rank 0, each primary part homocyclic   |
//!
//! These characterizations are established for these rings only, and each one is
//! cross-checked against the definitional brute force in [`crate::oracle`] on all
//! finite abelian groups within the configured bounds. They are not claimed for
//! arbitrary rings.

use thiserror::Error;

use crate::arith::{Element, RingTag};
use crate::modpid::{
    direct_sum_all, embeds, is_prime, primary_decomposition, prime_powers, ModError,
    StructureDescriptor,
};

/// Short anchors naming the result each verdict rests on.
pub mod citation {
    pub const VIRTUALLY_SIMPLE: &str = "def. virtually simple: isomorphic to every non-zero submodule";
    pub const VIRTUALLY_SEMISIMPLE: &str =
        "def. virtually semisimple: every submodule isomorphic to a direct summand";
    pub const COMPLETELY_VSS: &str =
        "def. completely virtually semisimple: every submodule virtually semisimple";
    pub const FULLY_VSS: &str =
        "def. fully virtually semisimple: every quotient virtually semisimple";
    pub const SEMISIMPLE: &str = "def. semisimple: every submodule a direct summand";
    pub const QUASI_INJECTIVE: &str =
        "quasi-injective virtually semisimple modules are semisimple";
    pub const NON_VSS_CYCLIC: &str = "Z/4Z is not virtually semisimple, although Z is";
    pub const DECOMPOSITION: &str =
        "completely virtually semisimple f.g. modules split into virtually simple summands, unique up to permutation";
    pub const KRULL_SCHMIDT: &str =
        "subisomorphic sums of virtually simple modules agree up to a permutation";
    pub const MATRIX_RINGS: &str =
        "R = prod M_n(D) with D a PID: the regular module is a sum of virtually simple column modules";
    pub const V_DOMAIN: &str =
        "all f.g. modules virtually semisimple iff R = prod M_n(D) with D a principal ideal V-domain";
    pub const SEMISIMPLE_RING: &str =
        "every module virtually semisimple iff R is semisimple";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VirtualError {
    #[error(transparent)]
    Mod(#[from] ModError),
    #[error("not virtually semisimple: ({base})^2 divides the invariant factor {factor}")]
    NotDecomposable { base: Element, factor: Element },
    #[error("entry {index} of the {side} multiset is not virtually simple")]
    NotVirtuallySimpleEntry { side: Side, index: usize },
    #[error(
        "sums are not subisomorphic (left embeds in right: {left_into_right}, right embeds in left: {right_into_left})"
    )]
    NotSubisomorphic { left_into_right: bool, right_into_left: bool },
    #[error("invariant breach: {0}")]
    InvariantBreach(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Evidence attached to a negative verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `base^2` divides the invariant factor `factor`; `base` is prime whenever the
    /// ring can decide it.
    SquareFactor { base: Element, factor: Element },
    /// A non-zero submodule that is not isomorphic to the module.
    Submodule(StructureDescriptor),
    /// A quotient that is not virtually semisimple.
    Quotient(StructureDescriptor),
    /// The primary component at `prime` has unequal exponents.
    NonHomocyclic { prime: Element, exponents: Vec<u32> },
    /// The module has a free summand of this rank.
    FreePart { rank: usize },
    ZeroModule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub predicate: &'static str,
    pub value: bool,
    pub witness: Option<Witness>,
    pub citation: &'static str,
}

impl Verdict {
    fn yes(predicate: &'static str, citation: &'static str) -> Self {
        Verdict { predicate, value: true, witness: None, citation }
    }

    fn no(predicate: &'static str, citation: &'static str, witness: Witness) -> Self {
        Verdict { predicate, value: false, witness: Some(witness), citation }
    }
}

/// A non-squarefree invariant factor together with an element whose square divides it.
fn square_witness(s: &StructureDescriptor) -> Result<Option<Witness>, ModError> {
    // every factor divides the last one, so only the last needs inspection
    let Some(d) = s.invariant_factors().last() else {
        return Ok(None);
    };
    let repeated = match s.ring() {
        RingTag::PolyOverRationals => {
            let g = d.gcd(&d.derivative());
            if g.is_unit() {
                return Ok(None);
            }
            // radical of gcd(d, d') is the product of the repeated primes
            let base = g.exact_div(&g.gcd(&g.derivative()));
            match prime_powers(&base, "prime witness") {
                Ok(f) => f[0].0.clone(),
                Err(_) => base,
            }
        }
        _ => match prime_powers(d, "squarefree test")?.into_iter().find(|(_, e)| *e >= 2) {
            Some((p, _)) => p,
            None => return Ok(None),
        },
    };
    Ok(Some(Witness::SquareFactor { base: repeated, factor: d.clone() }))
}

pub fn check_virtually_simple(s: &StructureDescriptor) -> Result<Verdict, ModError> {
    const NAME: &str = "virtually_simple";
    let cite = citation::VIRTUALLY_SIMPLE;
    let ring = s.ring();
    let factors = s.invariant_factors();
    Ok(match (s.free_rank(), factors.len()) {
        (0, 0) => Verdict::no(NAME, cite, Witness::ZeroModule),
        (1, 0) => Verdict::yes(NAME, cite),
        (r, _) if r >= 1 => Verdict::no(NAME, cite, Witness::Submodule(StructureDescriptor::free(ring, 1))),
        (0, 1) => {
            let d = &factors[0];
            if is_prime(d)? {
                Verdict::yes(NAME, cite)
            } else {
                // (d/p)D/(d) is isomorphic to D/(p) for any divisor p of d
                let sub = match prime_powers(d, "virtual simplicity") {
                    Ok(mut f) => StructureDescriptor::cyclic(&f.swap_remove(0).0)?,
                    Err(e) => match square_witness(s)? {
                        Some(Witness::SquareFactor { base, .. }) => StructureDescriptor::cyclic(&d.exact_div(&base))?,
                        _ => return Err(e),
                    },
                };
                Verdict::no(NAME, cite, Witness::Submodule(sub))
            }
        }
        _ => Verdict::no(NAME, cite, Witness::Submodule(StructureDescriptor::cyclic(&factors[0])?)),
    })
}

pub fn is_virtually_simple(s: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(check_virtually_simple(s)?.value)
}

pub fn check_virtually_semisimple(s: &StructureDescriptor) -> Result<Verdict, ModError> {
    const NAME: &str = "virtually_semisimple";
    Ok(match square_witness(s)? {
        None => Verdict::yes(NAME, citation::VIRTUALLY_SEMISIMPLE),
        Some(w) => Verdict::no(NAME, citation::NON_VSS_CYCLIC, w),
    })
}

pub fn is_virtually_semisimple(s: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(check_virtually_semisimple(s)?.value)
}

/// Submodules of `D^r + (squarefree torsion)` have the same shape, so over these rings
/// this coincides with virtual semisimplicity.
pub fn check_completely_virtually_semisimple(s: &StructureDescriptor) -> Result<Verdict, ModError> {
    let mut v = check_virtually_semisimple(s)?;
    v.predicate = "completely_virtually_semisimple";
    v.citation = citation::COMPLETELY_VSS;
    Ok(v)
}

pub fn is_completely_virtually_semisimple(s: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(check_completely_virtually_semisimple(s)?.value)
}

/// Semisimplicity with a quotient witness: a free summand maps onto `D/(p^2)`, and a
/// torsion factor divisible by `q^2` maps onto `D/(q^2)`.
pub fn check_fully_virtually_semisimple(s: &StructureDescriptor) -> Result<Verdict, ModError> {
    const NAME: &str = "fully_virtually_semisimple";
    let cite = citation::FULLY_VSS;
    if s.free_rank() > 0 {
        let p = s.ring().smallest_prime();
        return Ok(Verdict::no(NAME, cite, Witness::Quotient(StructureDescriptor::cyclic(&p.pow(2))?)));
    }
    Ok(match square_witness(s)? {
        None => Verdict::yes(NAME, cite),
        Some(Witness::SquareFactor { base, .. }) => {
            Verdict::no(NAME, cite, Witness::Quotient(StructureDescriptor::cyclic(&base.pow(2))?))
        }
        Some(other) => Verdict::no(NAME, cite, other),
    })
}

pub fn is_fully_virtually_semisimple(s: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(check_fully_virtually_semisimple(s)?.value)
}

pub fn check_semisimple(s: &StructureDescriptor) -> Result<Verdict, ModError> {
    const NAME: &str = "semisimple";
    let cite = citation::SEMISIMPLE;
    if s.free_rank() > 0 {
        return Ok(Verdict::no(NAME, cite, Witness::FreePart { rank: s.free_rank() }));
    }
    Ok(match square_witness(s)? {
        None => Verdict::yes(NAME, cite),
        Some(w) => Verdict::no(NAME, cite, w),
    })
}

pub fn is_semisimple(s: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(check_semisimple(s)?.value)
}

pub fn check_quasi_injective(s: &StructureDescriptor) -> Result<Verdict, ModError> {
    const NAME: &str = "quasi_injective";
    let cite = citation::QUASI_INJECTIVE;
    if s.free_rank() > 0 {
        return Ok(Verdict::no(NAME, cite, Witness::FreePart { rank: s.free_rank() }));
    }
    let pd = primary_decomposition(s)?;
    for (p, exps) in &pd.components {
        if exps.windows(2).any(|w| w[0] != w[1]) {
            return Ok(Verdict::no(
                NAME,
                cite,
                Witness::NonHomocyclic { prime: p.clone(), exponents: exps.clone() },
            ));
        }
    }
    Ok(Verdict::yes(NAME, cite))
}

pub fn is_quasi_injective(s: &StructureDescriptor) -> Result<bool, ModError> {
    Ok(check_quasi_injective(s)?.value)
}

/// Every descriptor-level verdict for `s`, in a fixed order. Predicates that cannot be
/// decided for the ring are returned separately with their error.
pub fn all_verdicts(s: &StructureDescriptor) -> (Vec<Verdict>, Vec<(&'static str, ModError)>) {
    let checks: [(&'static str, fn(&StructureDescriptor) -> Result<Verdict, ModError>); 6] = [
        ("virtually_simple", check_virtually_simple),
        ("virtually_semisimple", check_virtually_semisimple),
        ("completely_virtually_semisimple", check_completely_virtually_semisimple),
        ("fully_virtually_semisimple", check_fully_virtually_semisimple),
        ("semisimple", check_semisimple),
        ("quasi_injective", check_quasi_injective),
    ];
    let mut verdicts = Vec::new();
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check(s) {
            Ok(v) => verdicts.push(v),
            Err(e) => failures.push((name, e)),
        }
    }
    (verdicts, failures)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummandTag {
    FreeOfRankOneOverBase,
    Simple,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Summand {
    pub descriptor: StructureDescriptor,
    pub tag: SummandTag,
}

/// A multiset of virtually simple summands, kept sorted so that decompositions of
/// isomorphic modules compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VsDecomposition {
    pub summands: Vec<Summand>,
}

impl VsDecomposition {
    pub fn new(mut summands: Vec<Summand>) -> Self {
        summands.sort();
        VsDecomposition { summands }
    }

    pub fn descriptors(&self) -> Vec<StructureDescriptor> {
        self.summands.iter().map(|s| s.descriptor.clone()).collect()
    }

    pub fn reassemble(&self, ring: RingTag) -> Result<StructureDescriptor, ModError> {
        direct_sum_all(ring, self.summands.iter().map(|s| &s.descriptor))
    }
}

/// Splits a virtually semisimple module into `r` copies of `D` and one `D/(p)` for each
/// prime factor of each invariant factor.
pub fn decompose_virtually_simple(s: &StructureDescriptor) -> Result<VsDecomposition, VirtualError> {
    if let Some(Witness::SquareFactor { base, factor }) = square_witness(s)? {
        return Err(VirtualError::NotDecomposable { base, factor });
    }
    let mut summands: Vec<Summand> = (0..s.free_rank())
        .map(|_| Summand {
            descriptor: StructureDescriptor::free(s.ring(), 1),
            tag: SummandTag::FreeOfRankOneOverBase,
        })
        .collect();
    for d in s.invariant_factors() {
        let primes: Vec<Element> = if is_prime(d).unwrap_or(false) {
            vec![d.clone()]
        } else {
            prime_powers(d, "splitting into simple summands")?.into_iter().map(|(p, _)| p).collect()
        };
        for p in primes {
            summands.push(Summand { descriptor: StructureDescriptor::cyclic(&p)?, tag: SummandTag::Simple });
        }
    }
    Ok(VsDecomposition::new(summands))
}

/// A bijection between two summand lists with isomorphic partners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsCertificate {
    /// `(i, j)` pairs left entry `i` with right entry `j`.
    pub pairing: Vec<(usize, usize)>,
}

impl KsCertificate {
    /// Bijection with equal descriptors at every pair.
    pub fn verify(&self, left: &[StructureDescriptor], right: &[StructureDescriptor]) -> bool {
        if left.len() != right.len() || self.pairing.len() != left.len() {
            return false;
        }
        let mut seen_l = vec![false; left.len()];
        let mut seen_r = vec![false; right.len()];
        for &(i, j) in &self.pairing {
            if i >= left.len() || j >= right.len() || seen_l[i] || seen_r[j] || left[i] != right[j] {
                return false;
            }
            seen_l[i] = true;
            seen_r[j] = true;
        }
        true
    }
}

/// Pairs the virtually simple summands of two subisomorphic sums.
pub fn ks_certify(
    left: &[StructureDescriptor],
    right: &[StructureDescriptor],
) -> Result<KsCertificate, VirtualError> {
    let ring = left.first().or(right.first()).map_or(RingTag::Integers, |s| s.ring());
    for (side, list) in [(Side::Left, left), (Side::Right, right)] {
        for (index, s) in list.iter().enumerate() {
            if s.ring() != ring {
                return Err(ModError::RingMismatch { left: ring, right: s.ring() }.into());
            }
            if !is_virtually_simple(s)? {
                return Err(VirtualError::NotVirtuallySimpleEntry { side, index });
            }
        }
    }
    let sum_l = direct_sum_all(ring, left)?;
    let sum_r = direct_sum_all(ring, right)?;
    let left_into_right = embeds(&sum_l, &sum_r)?;
    let right_into_left = embeds(&sum_r, &sum_l)?;
    if !(left_into_right && right_into_left) {
        return Err(VirtualError::NotSubisomorphic { left_into_right, right_into_left });
    }
    let mut used = vec![false; right.len()];
    let mut pairing = Vec::with_capacity(left.len());
    for (i, s) in left.iter().enumerate() {
        let j = (0..right.len())
            .find(|&j| !used[j] && right[j] == *s)
            .ok_or_else(|| VirtualError::InvariantBreach(format!("no partner for left summand {i} ({s})")))?;
        used[j] = true;
        pairing.push((i, j));
    }
    if used.iter().any(|u| !u) {
        return Err(VirtualError::InvariantBreach("unpaired right summand".into()));
    }
    Ok(KsCertificate { pairing })
}
