//! Dense univariate polynomials over an exact coefficient field.

use std::cmp::Ordering;
use std::fmt::{self, Debug};
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact field arithmetic used for polynomial coefficients.
pub trait CoeffField: Clone + Eq + Hash + Debug {
    type C: Clone + Eq + Hash + Ord + Debug;

    fn zero(&self) -> Self::C;
    fn one(&self) -> Self::C;
    fn is_zero(&self, a: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self, a: &Self::C) -> Self::C;
    fn from_u64(&self, n: u64) -> Self::C;

    fn sub(&self, a: &Self::C, b: &Self::C) -> Self::C {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::C) -> bool {
        *a == self.one()
    }

    /// Sum of coefficient vectors; the result may have trailing zeros.
    fn poly_add(&self, a: &[Self::C], b: &[Self::C]) -> Vec<Self::C> {
        let zero = self.zero();
        (0..a.len().max(b.len()))
            .map(|k| self.add(a.get(k).unwrap_or(&zero), b.get(k).unwrap_or(&zero)))
            .collect()
    }

    /// Product of coefficient vectors (ascending, non-empty).
    fn poly_mul(&self, a: &[Self::C], b: &[Self::C]) -> Vec<Self::C> {
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        out
    }

    /// Quotient and remainder of `a` by `b`, where `b` has no trailing zero and
    /// `a.len() >= b.len()`.
    fn poly_div_rem(&self, a: &[Self::C], b: &[Self::C]) -> (Vec<Self::C>, Vec<Self::C>) {
        let dd = b.len() - 1;
        let inv_lead = self.inv(&b[dd]);
        let mut rem = a.to_vec();
        let mut quot = vec![self.zero(); a.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = self.mul(&rem[k + dd], &inv_lead);
            if self.is_zero(&c) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                rem[k + j] = self.sub(&rem[k + j], &self.mul(&c, y));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (quot, rem)
    }
}

/// `(numerators, d)` with `v[k] = numerators[k] / d`.
fn common_denominator(v: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    use num_integer::Integer;
    let d = v.iter().fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { acc.lcm(c.denom()) });
    let nums = if d.is_one() {
        v.iter().map(|c| c.numer().clone()).collect()
    } else {
        v.iter().map(|c| c.numer() * (&d / c.denom())).collect()
    };
    (nums, d)
}

/// `n / d` in lowest terms, for `d > 0`.
fn over(n: BigInt, d: &BigInt) -> BigRational {
    if d.is_one() || n.is_zero() {
        return BigRational::from_integer(n);
    }
    let g = gcd_int(&n, d);
    if g.is_one() {
        BigRational::new_raw(n, d.clone())
    } else {
        BigRational::new_raw(n / &g, d / &g)
    }
}

/// The prime field F_p. Primality of `p` is checked by [`crate::arith::RingTag`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub(crate) fn new(p: u64) -> Self {
        debug_assert!(p >= 2);
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = ((v % &p) + &p) % &p;
        u64::try_from(r).expect("residue fits")
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }
}

impl CoeffField for PrimeField {
    type C = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in F_{}", self.p);
        self.pow(*a, self.p - 2)
    }
    fn from_u64(&self, n: u64) -> u64 {
        n % self.p
    }
}

/// The rational numbers, as exact reduced fractions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Rationals;

impl CoeffField for Rationals {
    type C = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero in Q");
        a.recip()
    }
    fn from_u64(&self, n: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn poly_add(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let integral = |v: &[BigRational]| v.iter().all(|c| c.denom().is_one());
        if !(integral(a) && integral(b)) {
            let zero = BigRational::zero();
            return (0..a.len().max(b.len()))
                .map(|k| a.get(k).unwrap_or(&zero) + b.get(k).unwrap_or(&zero))
                .collect();
        }
        let zero = BigInt::zero();
        (0..a.len().max(b.len()))
            .map(|k| {
                let x = a.get(k).map_or(&zero, |c| c.numer());
                let y = b.get(k).map_or(&zero, |c| c.numer());
                BigRational::from_integer(x + y)
            })
            .collect()
    }

    fn poly_mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let (a, da) = common_denominator(a);
        let (b, db) = common_denominator(b);
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        let d = da * db;
        out.into_iter().map(|n| over(n, &d)).collect()
    }

    /// Fraction-free long division on integer numerators: the remainder is kept as
    /// `rem / den` and each step multiplies through by the divisor's leading coefficient.
    fn poly_div_rem(&self, a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        use num_integer::Integer;
        let (mut rem, da) = common_denominator(a);
        let (b, db) = common_denominator(b);
        let dd = b.len() - 1;
        let lead = &b[dd];
        // a = rem / da and b = B / db, so a / b = (rem / B) * db / da
        let mut den = BigInt::one();
        let mut quot = vec![BigRational::zero(); a.len() - dd];
        for k in (0..quot.len()).rev() {
            let t = rem[k + dd].clone();
            if t.is_zero() {
                continue;
            }
            let (qn, qd) = (&t * &db, &den * lead * &da);
            quot[k] = if qd.is_negative() { over(-qn, &-qd) } else { over(qn, &qd) };
            let g = gcd_int(&t, lead);
            let (mut mul, mut sub) = (lead / &g, t / &g);
            if mul.is_negative() {
                mul = -mul;
                sub = -sub;
            }
            if !mul.is_one() {
                for c in rem[..k + dd].iter_mut() {
                    *c *= &mul;
                }
                den *= &mul;
            }
            for (j, y) in b.iter().enumerate().take(dd) {
                rem[k + j] -= &sub * y;
            }
            rem[k + dd] = BigInt::zero();
            if !den.is_one() {
                let g = rem[..k + dd].iter().fold(den.clone(), |acc, c| if acc.is_one() { acc } else { acc.gcd(c) });
                if !g.is_one() {
                    for c in rem[..k + dd].iter_mut() {
                        *c /= &g;
                    }
                    den /= &g;
                }
            }
        }
        rem.truncate(dd);
        let d = den * da;
        (quot, rem.into_iter().map(|n| over(n, &d)).collect())
    }
}

/// A polynomial with coefficients in ascending degree; never has a trailing zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<K: CoeffField> {
    field: K,
    coeffs: Vec<K::C>,
}

impl<K: CoeffField> Debug for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Poly").field(&self.coeffs).finish()
    }
}

impl<K: CoeffField> PartialOrd for Poly<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl<K: CoeffField> Ord for Poly<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl<K: CoeffField> Poly<K> {
    pub fn new(field: K, mut coeffs: Vec<K::C>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: K) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: K) -> Self {
        let one = field.one();
        Poly::new(field, vec![one])
    }

    pub fn constant(field: K, c: K::C) -> Self {
        Poly::new(field, vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(field: K, c: K::C, k: usize) -> Self {
        let mut coeffs = vec![field.zero(); k];
        coeffs.push(c);
        Poly::new(field, coeffs)
    }

    pub fn x(field: K) -> Self {
        let one = field.one();
        Poly::monomial(field, one, 1)
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn coeffs(&self) -> &[K::C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&K::C> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> K::C {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| self.field.is_one(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.field.poly_add(&self.coeffs, &other.coeffs);
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let coeffs = self.field.poly_mul(&self.coeffs, &other.coeffs);
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn scale(&self, c: &K::C) -> Self {
        if self.field.is_zero(c) {
            return Poly::zero(self.field.clone());
        }
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Poly { field: self.field.clone(), coeffs }
    }

    /// Long division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let f = &self.field;
        let dd = divisor.degree().expect("polynomial division by zero");
        if self.coeffs.len() <= dd {
            return (Poly::zero(f.clone()), self.clone());
        }
        let (quot, rem) = f.poly_div_rem(&self.coeffs, &divisor.coeffs);
        (Poly::new(f.clone(), quot), Poly::new(f.clone(), rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// `(lead, monic)` with `self = lead * monic`. Panics on zero.
    pub fn monic_split(&self) -> (K::C, Self) {
        let lead = self.lead().expect("monic part of zero polynomial").clone();
        let inv = self.field.inv(&lead);
        (lead, self.scale(&inv))
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| f.mul(c, &f.from_u64(k as u64)))
            .collect();
        Poly::new(f.clone(), coeffs)
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic_split().1
        }
    }

    /// `(g, u, v)` with `u*self + v*other = g`, `g` monic (or zero when both are zero).
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let field = self.field.clone();
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(field.clone()), Poly::zero(field.clone()));
        let (mut t0, mut t1) = (Poly::zero(field.clone()), Poly::one(field.clone()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let (lead, g) = r0.monic_split();
        let inv = field.inv(&lead);
        (g, s0.scale(&inv), t0.scale(&inv))
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, exp: &BigUint, modulus: &Self) -> Self {
        let mut acc = Poly::one(self.field.clone()).rem(modulus);
        let base = self.rem(modulus);
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(&acc).rem(modulus);
            if exp.bit(i) {
                acc = acc.mul(&base).rem(modulus);
            }
        }
        acc
    }

    pub fn eval(&self, x: &K::C) -> K::C {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }
}

/// `gcd(a, b)`, reducing by remainder first when one side fits in a machine word.
pub(crate) fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let small = |x: &BigInt, y: &BigInt| -> Option<BigInt> {
        let s = x.magnitude().to_u64().filter(|&s| s != 0)?;
        let mut r = (y.magnitude() % s).to_u64().expect("remainder fits");
        let mut g = s;
        while r != 0 {
            (g, r) = (r, g % r);
        }
        Some(BigInt::from(g))
    };
    small(a, b).or_else(|| small(b, a)).unwrap_or_else(|| a.gcd(b))
}

impl Poly<Rationals> {
    /// For integral `self` and `divisor`, integers `c > 0` and integral `q`, `r` with
    /// `c * self = q * divisor + r` and `deg r < deg divisor`. `None` when either side
    /// has a non-integral coefficient.
    pub fn pseudo_div_rem(&self, divisor: &Self) -> Option<(BigInt, Self, Self)> {
        let integral = |p: &Self| p.coeffs.iter().all(|c| c.denom().is_one());
        if !integral(self) || !integral(divisor) {
            return None;
        }
        let b: Vec<BigInt> = divisor.coeffs.iter().map(|c| c.numer().clone()).collect();
        let dd = divisor.degree().expect("polynomial division by zero");
        let mut rem: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
        let mut c = BigInt::one();
        let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(dd)];
        let lead = &b[dd];
        for k in (0..quot.len()).rev() {
            let t = std::mem::take(&mut rem[k + dd]);
            if t.is_zero() {
                continue;
            }
            let g = gcd_int(&t, lead);
            let (mut mul, mut sub) = (lead / &g, t / &g);
            if mul.is_negative() {
                mul = -mul;
                sub = -sub;
            }
            if !mul.is_one() {
                for x in rem[..k + dd].iter_mut().chain(quot.iter_mut()) {
                    *x *= &mul;
                }
                c *= &mul;
            }
            for (j, y) in b.iter().enumerate().take(dd) {
                rem[k + j] -= &sub * y;
            }
            quot[k] = sub;
        }
        rem.truncate(dd);
        let lift = |v: Vec<BigInt>| Poly::new(Rationals, v.into_iter().map(BigRational::from_integer).collect());
        Some((c, lift(quot), lift(rem)))
    }

    /// Rescales to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_integer_part(&self) -> Vec<BigInt> {
        use num_integer::Integer;
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        if content.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &content * &sign).collect()
    }
}
