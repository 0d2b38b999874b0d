//! Integer factorization: trial division followed by Pollard-Brent on 64-bit cofactors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::ArithError;

const TRIAL_LIMIT: u64 = 1 << 12;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Finds a non-trivial divisor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let step = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in 1..n {
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = step(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys, c);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard_brent called on a prime")
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = if n.is_multiple_of(2) { 2 } else { pollard_brent(n) };
    split_u64(d, out);
    split_u64(n / d, out);
}

/// Prime factorization of `|n|` as sorted `(prime, exponent)` pairs. `n` must be non-zero.
pub fn factor_bigint(n: &BigInt) -> Result<Vec<(BigInt, u32)>, ArithError> {
    debug_assert!(!n.is_zero());
    let mut rest = n.magnitude().clone();
    let mut primes: Vec<u64> = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT && rest > One::one() {
        while (&rest % p).is_zero() {
            rest /= p;
            primes.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > One::one() {
        let small = rest.to_u64().ok_or_else(|| ArithError::FactorizationTooHard {
            value: n.to_string(),
        })?;
        split_u64(small, &mut primes);
    }
    primes.sort_unstable();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == BigInt::from(p) => *e += 1,
            _ => out.push((BigInt::from(p), 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factors_semiprime_beyond_trial_range() {
        let n = BigInt::from(4_294_967_291u64) * BigInt::from(4_294_967_279u64);
        let f = factor_bigint(&n).unwrap();
        assert_eq!(
            f,
            vec![
                (BigInt::from(4_294_967_279u64), 1),
                (BigInt::from(4_294_967_291u64), 1)
            ]
        );
    }

    #[test]
    fn cofactor_over_64_bits_is_refused() {
        let big = BigInt::from(18_446_744_073_709_551_557u64) * BigInt::from(18_446_744_073_709_551_533u64);
        assert!(matches!(
            factor_bigint(&big),
            Err(ArithError::FactorizationTooHard { .. })
        ));
    }

    #[test]
    fn small_powers() {
        let f = factor_bigint(&BigInt::from(-720)).unwrap();
        let expect: Vec<(BigInt, u32)> = vec![(2.into(), 4), (3.into(), 2), (5.into(), 1)];
        assert_eq!(f, expect);
    }
}
