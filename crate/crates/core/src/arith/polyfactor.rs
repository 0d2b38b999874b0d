//! Factorization over F_p[x] (squarefree, distinct-degree, equal-degree splitting)
//! and the partial splitting available over Q[x] (rational roots plus low-degree
//! irreducibility).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::intfactor::factor_bigint;
use super::poly::{CoeffField, Poly, PrimeField, Rationals};
use super::ArithError;

type FpPoly = Poly<PrimeField>;
type QPoly = Poly<Rationals>;

const EDF_SEED: u64 = 0x5eed_f00d;

/// Squarefree decomposition of a monic polynomial: `f = prod g_i^{e_i}` with each `g_i`
/// squarefree. The `g_i` are not necessarily coprime across different calls but are
/// coprime within one result.
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let field = *f.field();
    let p = field.modulus();
    let mut out = Vec::new();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while w.degree() > Some(0) {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.degree() > Some(0) {
            out.push((fac, i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    if c.degree() > Some(0) {
        // c is a p-th power; coefficients of F_p are their own p-th roots.
        let root_coeffs = c.coeffs().iter().step_by(p as usize).cloned().collect();
        let root = Poly::new(field, root_coeffs);
        for (g, e) in squarefree_decomposition(&root) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let field = *f.field();
    let p = BigUint::from(field.modulus());
    let x = Poly::x(field);
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.pow_mod(&p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.degree() > Some(0) {
        let deg = rest.degree().unwrap();
        out.push((rest, deg));
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting of a product of irreducibles of degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = f.degree().unwrap();
    if n == d {
        out.push(f.clone());
        return;
    }
    let field = *f.field();
    let p = field.modulus();
    let exponent = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let coeffs = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let a = Poly::new(field, coeffs);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map GF(2^d) -> GF(2)
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            a.pow_mod(&exponent, f).sub(&Poly::one(field))
        };
        let g = b.gcd(f);
        if g.degree() > Some(0) && g.degree() < f.degree() {
            let h = f.div_rem(&g).0;
            equal_degree(&g, d, rng, out);
            equal_degree(&h, d, rng, out);
            return;
        }
    }
}

/// Monic irreducible factors with multiplicity of a monic polynomial of positive degree,
/// sorted and merged.
pub fn factor_fp_monic(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut out: Vec<(FpPoly, u32)> = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for (block, d) in distinct_degree(&g) {
            let mut irreducibles = Vec::new();
            equal_degree(&block, d, &mut rng, &mut irreducibles);
            out.extend(irreducibles.into_iter().map(|q| (q, e)));
        }
    }
    out.sort();
    let mut merged: Vec<(FpPoly, u32)> = Vec::new();
    for (q, e) in out {
        match merged.last_mut() {
            Some((r, m)) if *r == q => *m += e,
            _ => merged.push((q, e)),
        }
    }
    merged
}

fn positive_divisors(n: &BigInt) -> Result<Vec<BigInt>, ArithError> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor_bigint(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// Factorization over Q[x] restricted to what rational-root search decides: linear
/// factors are split off, a leftover of degree 2 or 3 without rational roots is
/// irreducible, and anything of higher degree is reported as undecidable.
///
/// Input must be monic of positive degree.
pub fn factor_rational_partial(f: &QPoly) -> Result<Vec<(QPoly, u32)>, ArithError> {
    let mut rest = f.clone();
    let mut out: Vec<(QPoly, u32)> = Vec::new();
    let x = Poly::x(Rationals);

    let mut zero_mult = 0;
    while rest.coeff(0).is_zero() && rest.degree() > Some(0) {
        rest = rest.div_rem(&x).0;
        zero_mult += 1;
    }
    if zero_mult > 0 {
        out.push((x.clone(), zero_mult));
    }

    if rest.degree() > Some(0) {
        let ints = rest.primitive_integer_part();
        let constant = ints[0].abs();
        let lead = ints.last().unwrap().abs();
        let numerators = positive_divisors(&constant)?;
        let denominators = positive_divisors(&lead)?;
        'search: for a in &numerators {
            for b in &denominators {
                for sign in [1i32, -1] {
                    let root = BigRational::new(a * BigInt::from(sign), b.clone());
                    if *root.denom() != *b {
                        continue; // non-reduced candidate, covered elsewhere
                    }
                    let linear = Poly::new(Rationals, vec![-root.clone(), Rationals.one()]);
                    let mut mult = 0;
                    while rest.degree() > Some(0) && rest.eval(&root).is_zero() {
                        rest = rest.div_rem(&linear).0;
                        mult += 1;
                    }
                    if mult > 0 {
                        out.push((linear, mult));
                    }
                    if rest.degree() == Some(0) {
                        break 'search;
                    }
                }
            }
        }
    }

    match rest.degree() {
        Some(0) | None => {}
        Some(1..=3) => {
            let (_, m) = rest.monic_split();
            out.push((m, 1));
        }
        Some(_) => {
            return Err(ArithError::UnsupportedRing {
                operation: "irreducible factorization over Q[x] beyond rational roots",
            })
        }
    }
    out.sort();
    Ok(out)
}
