//! Small exact-arithmetic helpers shared across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// Formats as `p/q` with `q >= 1`.
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// p-adic valuation of a nonzero integer.
pub fn ord_p_int(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn ord_p(x: &Rational, p: u64) -> i64 {
    ord_p_int(x.numer(), p) as i64 - ord_p_int(x.denom(), p) as i64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Trial-division factorization; ascending primes.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn factor_big(n: &BigInt) -> Vec<(u64, u32)> {
    factor(n.abs().to_u64().expect("integer too large to factor"))
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflows u64")
}

/// Reduces a p-integral rational modulo `modulus` (a power of p).
pub fn rational_mod(x: &Rational, modulus: u64) -> Result<u64> {
    let m = BigInt::from(modulus);
    let num = x.numer().mod_floor(&m);
    let den = x.denom().mod_floor(&m);
    let inv = mod_inv(&den, &m).ok_or_else(|| {
        Error::NegativeValuation(format!("{} is not integral at the modulus {modulus}", x))
    })?;
    Ok(((num * inv).mod_floor(&m)).to_u64().unwrap())
}

pub fn mod_inv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

pub fn mod_inv_u64(a: u64, m: u64) -> Option<u64> {
    mod_inv(&BigInt::from(a), &BigInt::from(m)).map(|x| x.to_u64().unwrap())
}

/// Writes `n = s * f^2` with `s` squarefree carrying the sign of `n`.
pub fn squarefree_part(n: &BigInt) -> (BigInt, BigInt) {
    assert!(!n.is_zero());
    let mut s = BigInt::from(n.signum());
    let mut f = BigInt::one();
    for (p, e) in factor_big(n) {
        let p = BigInt::from(p);
        if e % 2 == 1 {
            s *= &p;
        }
        f *= num_traits::pow(p, (e / 2) as usize);
    }
    (s, f)
}

pub fn rational_pow(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let x = parse_rational("-6/4").unwrap();
        assert_eq!(fmt_rational(&x), "-3/2");
        assert_eq!(fmt_rational(&parse_rational("7").unwrap()), "7/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn valuations_and_factoring() {
        assert_eq!(ord_p(&rat(3, 8), 2), -3);
        assert_eq!(ord_p(&rat(12, 5), 2), 2);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(squarefree_part(&BigInt::from(-72)), (BigInt::from(-2), BigInt::from(6)));
    }

    #[test]
    fn modular_reduction() {
        // 1/3 mod 8 = 3
        assert_eq!(rational_mod(&rat(1, 3), 8).unwrap(), 3);
        assert!(rational_mod(&rat(1, 2), 8).is_err());
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
    }
}
