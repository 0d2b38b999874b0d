//! Exact arithmetic for the supported Euclidean domains: the integers and univariate
//! polynomials over a prime field F_p or over the rationals.

mod intfactor;
mod poly;
mod polyfactor;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use intfactor::is_prime_u64;
pub(crate) use poly::gcd_int;
pub use poly::{CoeffField, Poly, PrimeField, Rationals};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero element has no canonical associate")]
    ZeroElement,
    #[error("division by zero")]
    DivisionByZero,
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingTag, right: RingTag },
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("expected a non-zero non-unit element")]
    ZeroOrUnit,
    #[error("unsupported ring for {operation}")]
    UnsupportedRing { operation: &'static str },
    #[error("factorization too hard: cofactor of {value} exceeds 64 bits after trial division")]
    FactorizationTooHard { value: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
}

/// One of the supported principal ideal domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingTag {
    Integers,
    PolyOverPrimeField(u64),
    PolyOverRationals,
}

impl RingTag {
    /// F_p[x]; refuses composite `p`.
    pub fn poly_fp(p: u64) -> Result<Self, ArithError> {
        if is_prime_u64(p) {
            Ok(RingTag::PolyOverPrimeField(p))
        } else {
            Err(ArithError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> Element {
        match *self {
            RingTag::Integers => Element::Int(BigInt::zero()),
            RingTag::PolyOverPrimeField(p) => Element::Fp(Poly::zero(PrimeField::new(p))),
            RingTag::PolyOverRationals => Element::Rat(Poly::zero(Rationals)),
        }
    }

    pub fn one(&self) -> Element {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Element {
        match *self {
            RingTag::Integers => Element::Int(BigInt::from(v)),
            RingTag::PolyOverPrimeField(p) => {
                let field = PrimeField::new(p);
                Element::Fp(Poly::constant(field, field.reduce_i64(v)))
            }
            RingTag::PolyOverRationals => {
                Element::Rat(Poly::constant(Rationals, BigRational::from_integer(v.into())))
            }
        }
    }

    /// The indeterminate `x`; `None` over the integers.
    pub fn x(&self) -> Option<Element> {
        match *self {
            RingTag::Integers => None,
            RingTag::PolyOverPrimeField(p) => Some(Element::Fp(Poly::x(PrimeField::new(p)))),
            RingTag::PolyOverRationals => Some(Element::Rat(Poly::x(Rationals))),
        }
    }

    /// A fixed prime element: 2 over the integers, `x` over polynomial rings.
    pub fn smallest_prime(&self) -> Element {
        self.x().unwrap_or_else(|| self.from_i64(2))
    }

    /// Whether [`factor`] is available for this ring.
    pub fn supports_factor(&self) -> bool {
        !matches!(self, RingTag::PolyOverRationals)
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingTag::Integers => write!(f, "int"),
            RingTag::PolyOverPrimeField(p) => write!(f, "fpx:{p}"),
            RingTag::PolyOverRationals => write!(f, "qx"),
        }
    }
}

impl FromStr for RingTag {
    type Err = ArithError;

    /// Accepts `int`, `fpx:<p>`, `qx` and the aliases `Z`, `ZZ`, `F<p>[x]`, `GF(<p>)[x]`,
    /// `Q[x]`, `QQ[x]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "int" | "Z" | "ZZ" | "integers" => return Ok(RingTag::Integers),
            "qx" | "Q[x]" | "QQ[x]" | "rat" => return Ok(RingTag::PolyOverRationals),
            _ => {}
        }
        let digits = t
            .strip_prefix("fpx:")
            .or_else(|| t.strip_prefix("GF(").and_then(|r| r.strip_suffix(")[x]")))
            .or_else(|| t.strip_prefix('F').and_then(|r| r.strip_suffix("[x]")));
        match digits.map(|d| d.parse::<u64>()) {
            Some(Ok(p)) => RingTag::poly_fp(p),
            _ => Err(ArithError::Parse { what: "ring tag", detail: s.to_string() }),
        }
    }
}

impl serde::Serialize for RingTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for RingTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of one of the supported rings.
///
/// Arithmetic operators panic when the operands live in different rings; the checked
/// entry points ([`euclidean_divide`], [`extended_gcd`]) report [`ArithError::RingMismatch`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Int(BigInt),
    Fp(Poly<PrimeField>),
    Rat(Poly<Rationals>),
}

macro_rules! same_ring {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (Element::Int($x), Element::Int($y)) => Element::Int($body),
            (Element::Fp($x), Element::Fp($y)) => Element::Fp($body),
            (Element::Rat($x), Element::Rat($y)) => Element::Rat($body),
            (a, b) => panic!("ring mismatch: {} vs {}", a.ring(), b.ring()),
        }
    };
}

impl Element {
    pub fn ring(&self) -> RingTag {
        match self {
            Element::Int(_) => RingTag::Integers,
            Element::Fp(p) => RingTag::PolyOverPrimeField(p.field().modulus()),
            Element::Rat(_) => RingTag::PolyOverRationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Int(n) => n.is_zero(),
            Element::Fp(p) => p.is_zero(),
            Element::Rat(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Element::Int(n) => n.is_one(),
            Element::Fp(p) => p.is_one(),
            Element::Rat(p) => p.is_one(),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            Element::Int(n) => n.magnitude().is_one(),
            Element::Fp(p) => p.degree() == Some(0),
            Element::Rat(p) => p.degree() == Some(0),
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Element::Int(n) => Some(n),
            _ => None,
        }
    }

    /// Euclidean size: absolute value for integers, degree for polynomials (`None` for 0).
    pub fn euclidean_size(&self) -> Option<BigInt> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Element::Int(n) => n.abs(),
            Element::Fp(p) => BigInt::from(p.degree().unwrap()),
            Element::Rat(p) => BigInt::from(p.degree().unwrap()),
        })
    }

    /// Total bit length of the coefficients; zero outside `Q[x]`.
    pub fn coefficient_height(&self) -> u64 {
        match self {
            Element::Rat(p) => p.coeffs().iter().map(|c| c.numer().bits() + c.denom().bits()).sum(),
            _ => 0,
        }
    }

    /// The inverse of a unit, `None` otherwise.
    pub fn unit_inverse(&self) -> Option<Element> {
        if !self.is_unit() {
            return None;
        }
        Some(match self {
            Element::Int(n) => Element::Int(n.clone()),
            Element::Fp(p) => {
                let f = *p.field();
                Element::Fp(Poly::constant(f, f.inv(&p.coeffs()[0])))
            }
            Element::Rat(p) => Element::Rat(Poly::constant(Rationals, Rationals.inv(&p.coeffs()[0]))),
        })
    }

    /// Division with remainder; panics on zero divisor or ring mismatch.
    pub fn div_rem(&self, b: &Element) -> (Element, Element) {
        assert!(!b.is_zero(), "division by zero");
        match (self, b) {
            (Element::Int(a), Element::Int(b)) => {
                let r = a.mod_floor(&b.abs());
                let q = (a - &r) / b;
                (Element::Int(q), Element::Int(r))
            }
            (Element::Fp(a), Element::Fp(b)) => {
                let (q, r) = a.div_rem(b);
                (Element::Fp(q), Element::Fp(r))
            }
            (Element::Rat(a), Element::Rat(b)) => {
                let (q, r) = a.div_rem(b);
                (Element::Rat(q), Element::Rat(r))
            }
            (a, b) => panic!("ring mismatch: {} vs {}", a.ring(), b.ring()),
        }
    }

    /// Whether `self` divides `other` (zero divides only zero).
    pub fn divides(&self, other: &Element) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Exact quotient; panics if `b` does not divide `self`.
    pub fn exact_div(&self, b: &Element) -> Element {
        let (q, r) = self.div_rem(b);
        assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn derivative(&self) -> Element {
        match self {
            Element::Int(_) => self.ring().zero(),
            Element::Fp(p) => Element::Fp(p.derivative()),
            Element::Rat(p) => Element::Rat(p.derivative()),
        }
    }

    pub fn pow(&self, e: u32) -> Element {
        (0..e).fold(self.ring().one(), |acc, _| &acc * self)
    }

    /// Gcd as canonical associate; zero iff both are zero.
    pub fn gcd(&self, other: &Element) -> Element {
        if self.is_zero() && other.is_zero() {
            return self.ring().zero();
        }
        extended_gcd(self, other).expect("same ring, not both zero").0
    }

    pub fn lcm(&self, other: &Element) -> Element {
        if self.is_zero() || other.is_zero() {
            return self.ring().zero();
        }
        let g = self.gcd(other);
        let l = &self.exact_div(&g) * other;
        normalize_unit(&l).expect("non-zero").1
    }

    /// Canonical associate of a possibly zero element.
    pub fn canonical(&self) -> Element {
        if self.is_zero() {
            self.clone()
        } else {
            normalize_unit(self).expect("non-zero").1
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        same_ring!(self, rhs, |a, b| a.add(b))
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        same_ring!(self, rhs, |a, b| a.sub(b))
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        same_ring!(self, rhs, |a, b| a.mul(b))
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        match self {
            Element::Int(n) => Element::Int(-n),
            Element::Fp(p) => Element::Fp(p.neg()),
            Element::Rat(p) => Element::Rat(p.neg()),
        }
    }
}

fn fmt_poly<K: CoeffField>(
    f: &mut fmt::Formatter<'_>,
    p: &Poly<K>,
    show: impl Fn(&K::C) -> String,
) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut terms = Vec::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if p.field().is_zero(c) {
            continue;
        }
        let coef = show(c);
        let coef = if coef.contains('/') || coef.starts_with('-') && k > 0 {
            format!("({coef})")
        } else {
            coef
        };
        let term = match (k, p.field().is_one(c)) {
            (0, _) => coef,
            (1, true) => "x".to_string(),
            (1, false) => format!("{coef}*x"),
            (_, true) => format!("x^{k}"),
            (_, false) => format!("{coef}*x^{k}"),
        };
        terms.push(term);
    }
    write!(f, "{}", terms.join(" + "))
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Int(n) => write!(f, "{n}"),
            Element::Fp(p) => fmt_poly(f, p, |c| c.to_string()),
            Element::Rat(p) => fmt_poly(f, p, |c| c.to_string()),
        }
    }
}

/// Unit times canonical prime powers. Primes are sorted and pairwise non-associate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Element,
    pub factors: Vec<(Element, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> Element {
        self.factors
            .iter()
            .fold(self.unit.clone(), |acc, (p, e)| &acc * &p.pow(*e))
    }
}

fn check_same_ring(a: &Element, b: &Element) -> Result<(), ArithError> {
    if a.ring() != b.ring() {
        return Err(ArithError::RingMismatch { left: a.ring(), right: b.ring() });
    }
    Ok(())
}

/// Splits `e` into an invertible unit and the positive / monic associate.
pub fn normalize_unit(e: &Element) -> Result<(Element, Element), ArithError> {
    if e.is_zero() {
        return Err(ArithError::ZeroElement);
    }
    Ok(match e {
        Element::Int(n) => {
            let unit = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
            (Element::Int(unit), Element::Int(n.abs()))
        }
        Element::Fp(p) => {
            let (lead, m) = p.monic_split();
            (Element::Fp(Poly::constant(*p.field(), lead)), Element::Fp(m))
        }
        Element::Rat(p) => {
            let (lead, m) = p.monic_split();
            (Element::Rat(Poly::constant(Rationals, lead)), Element::Rat(m))
        }
    })
}

/// `a = q*b + r` with `0 <= r < |b|` over the integers and `deg r < deg b` for polynomials.
pub fn euclidean_divide(a: &Element, b: &Element) -> Result<(Element, Element), ArithError> {
    check_same_ring(a, b)?;
    if b.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    Ok(a.div_rem(b))
}

/// `(g, u, v)` with `u*a + v*b = g` and `g` the canonical gcd.
pub fn extended_gcd(a: &Element, b: &Element) -> Result<(Element, Element, Element), ArithError> {
    check_same_ring(a, b)?;
    if a.is_zero() && b.is_zero() {
        return Err(ArithError::BothZero);
    }
    Ok(match (a, b) {
        (Element::Int(a), Element::Int(b)) => {
            let e = a.extended_gcd(b);
            let (g, x, y) = if e.gcd.is_negative() {
                (-e.gcd, -e.x, -e.y)
            } else {
                (e.gcd, e.x, e.y)
            };
            (Element::Int(g), Element::Int(x), Element::Int(y))
        }
        (Element::Fp(a), Element::Fp(b)) => {
            let (g, u, v) = a.ext_gcd(b);
            (Element::Fp(g), Element::Fp(u), Element::Fp(v))
        }
        (Element::Rat(a), Element::Rat(b)) => {
            let (g, u, v) = a.ext_gcd(b);
            (Element::Rat(g), Element::Rat(u), Element::Rat(v))
        }
        _ => unreachable!(),
    })
}

fn require_nonzero_nonunit(d: &Element) -> Result<(), ArithError> {
    if d.is_zero() || d.is_unit() {
        return Err(ArithError::ZeroOrUnit);
    }
    Ok(())
}

/// No prime squared divides `d`. Polynomials use the derivative gcd, integers factor.
pub fn is_squarefree(d: &Element) -> Result<bool, ArithError> {
    require_nonzero_nonunit(d)?;
    match d {
        Element::Int(_) => Ok(factor(d)?.factors.iter().all(|(_, e)| *e == 1)),
        // F_p is perfect, so gcd(d, d') is a unit exactly when d is squarefree.
        Element::Rat(_) | Element::Fp(_) => Ok(d.gcd(&d.derivative()).is_unit()),
    }
}

/// Complete factorization into canonical primes over the integers or F_p[x].
pub fn factor(d: &Element) -> Result<Factorization, ArithError> {
    require_nonzero_nonunit(d)?;
    let (unit, canonical) = normalize_unit(d)?;
    let factors = match &canonical {
        Element::Int(n) => intfactor::factor_bigint(n)?
            .into_iter()
            .map(|(p, e)| (Element::Int(p), e))
            .collect(),
        Element::Fp(p) => polyfactor::factor_fp_monic(p)
            .into_iter()
            .map(|(q, e)| (Element::Fp(q), e))
            .collect(),
        Element::Rat(_) => {
            return Err(ArithError::UnsupportedRing { operation: "factor over Q[x]" })
        }
    };
    Ok(Factorization { unit, factors })
}

/// Like [`factor`], but over Q[x] falls back to rational-root splitting and succeeds
/// whenever that decides the factorization (see the module docs of the callers).
pub fn factor_decidable(d: &Element) -> Result<Factorization, ArithError> {
    match d {
        Element::Rat(_) => {
            require_nonzero_nonunit(d)?;
            let (unit, canonical) = normalize_unit(d)?;
            let Element::Rat(m) = &canonical else { unreachable!() };
            let factors = polyfactor::factor_rational_partial(m)?
                .into_iter()
                .map(|(q, e)| (Element::Rat(q), e))
                .collect();
            Ok(Factorization { unit, factors })
        }
        _ => factor(d),
    }
}

/// Whether `d` is a prime element, when that can be decided for its ring.
pub fn is_prime_element(d: &Element) -> Result<bool, ArithError> {
    if d.is_zero() || d.is_unit() {
        return Ok(false);
    }
    let f = factor_decidable(d)?;
    Ok(f.factors.len() == 1 && f.factors[0].1 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Element {
        Element::Int(v.into())
    }

    fn fp(p: u64, c: &[u64]) -> Element {
        Element::Fp(Poly::new(PrimeField::new(p), c.to_vec()))
    }

    fn qx(c: &[i64]) -> Element {
        Element::Rat(Poly::new(
            Rationals,
            c.iter().map(|&v| BigRational::from_integer(v.into())).collect(),
        ))
    }

    #[test]
    fn normalize_unit_examples() {
        assert_eq!(normalize_unit(&int(-6)).unwrap(), (int(-1), int(6)));
        assert_eq!(normalize_unit(&qx(&[3, 3])).unwrap(), (qx(&[3]), qx(&[1, 1])));
        assert_eq!(normalize_unit(&int(1)).unwrap(), (int(1), int(1)));
        assert_eq!(normalize_unit(&int(0)), Err(ArithError::ZeroElement));
    }

    #[test]
    fn euclidean_divide_examples() {
        assert_eq!(euclidean_divide(&int(7), &int(3)).unwrap(), (int(2), int(1)));
        assert_eq!(
            euclidean_divide(&fp(2, &[1, 0, 1]), &fp(2, &[1, 1])).unwrap(),
            (fp(2, &[1, 1]), fp(2, &[]))
        );
        assert_eq!(euclidean_divide(&int(0), &int(5)).unwrap(), (int(0), int(0)));
        assert_eq!(euclidean_divide(&int(-7), &int(3)).unwrap(), (int(-3), int(2)));
        assert_eq!(euclidean_divide(&int(7), &int(-3)).unwrap(), (int(-2), int(1)));
        assert_eq!(euclidean_divide(&int(1), &int(0)), Err(ArithError::DivisionByZero));
        assert!(matches!(
            euclidean_divide(&int(1), &qx(&[1])),
            Err(ArithError::RingMismatch { .. })
        ));
    }

    #[test]
    fn extended_gcd_examples() {
        let (g, u, v) = extended_gcd(&int(4), &int(6)).unwrap();
        assert_eq!(g, int(2));
        assert_eq!(&(&u * &int(4)) + &(&v * &int(6)), int(2));
        assert_eq!(extended_gcd(&qx(&[0, 0, 1]), &qx(&[0, 1])).unwrap().0, qx(&[0, 1]));
        assert_eq!(extended_gcd(&int(5), &int(0)).unwrap(), (int(5), int(1), int(0)));
        assert_eq!(extended_gcd(&int(-5), &int(0)).unwrap(), (int(5), int(-1), int(0)));
        assert_eq!(extended_gcd(&int(0), &int(0)), Err(ArithError::BothZero));
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(&int(6)).unwrap());
        assert!(!is_squarefree(&int(4)).unwrap());
        assert!(!is_squarefree(&qx(&[1, 2, 1])).unwrap());
        assert!(!is_squarefree(&fp(2, &[1, 0, 1])).unwrap());
        assert_eq!(is_squarefree(&int(-1)), Err(ArithError::ZeroOrUnit));
        assert_eq!(is_squarefree(&int(0)), Err(ArithError::ZeroOrUnit));
    }

    #[test]
    fn factor_examples() {
        let f = factor(&int(12)).unwrap();
        assert_eq!(f.unit, int(1));
        assert_eq!(f.factors, vec![(int(2), 2), (int(3), 1)]);
        let g = factor(&fp(2, &[0, 1, 1])).unwrap();
        assert_eq!(g.factors, vec![(fp(2, &[0, 1]), 1), (fp(2, &[1, 1]), 1)]);
        assert!(matches!(
            factor(&qx(&[1, 0, 1])),
            Err(ArithError::UnsupportedRing { .. })
        ));
        assert_eq!(factor(&int(-12)).unwrap().unit, int(-1));
    }

    #[test]
    fn ring_tag_parsing() {
        assert_eq!("int".parse::<RingTag>().unwrap(), RingTag::Integers);
        assert_eq!("fpx:5".parse::<RingTag>().unwrap(), RingTag::PolyOverPrimeField(5));
        assert_eq!("GF(7)[x]".parse::<RingTag>().unwrap(), RingTag::PolyOverPrimeField(7));
        assert_eq!("F3[x]".parse::<RingTag>().unwrap(), RingTag::PolyOverPrimeField(3));
        assert_eq!("QQ[x]".parse::<RingTag>().unwrap(), RingTag::PolyOverRationals);
        assert_eq!("fpx:6".parse::<RingTag>(), Err(ArithError::NotPrime(6)));
        assert!("R".parse::<RingTag>().is_err());
        for tag in [RingTag::Integers, RingTag::PolyOverPrimeField(11), RingTag::PolyOverRationals] {
            assert_eq!(tag.to_string().parse::<RingTag>().unwrap(), tag);
        }
    }

    #[test]
    fn display_polynomials() {
        assert_eq!(fp(5, &[1, 0, 3]).to_string(), "3*x^2 + 1");
        assert_eq!(qx(&[1, 1]).to_string(), "x + 1");
        assert_eq!(qx(&[]).to_string(), "0");
    }
}
