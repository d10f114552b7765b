//! Quadratic characters, divisor sums, Bernoulli numbers and Dirichlet L-values.

use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::num::{divisors, factor, factor_big, squarefree_part, Rational};

pub mod interval;
mod symbolic;

pub use interval::{pi_interval, rational_reconstruct, Interval};
pub use symbolic::SymbolicReal;

/// Jacobi symbol `(a / n)` for odd positive `n`.
fn jacobi(a: i128, n: i128) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(d / a)`.
pub fn kronecker(d: i64, a: i64) -> i32 {
    let d = d as i128;
    let mut a = a as i128;
    if a == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut r = 1;
    if a < 0 {
        a = -a;
        if d < 0 {
            r = -r;
        }
    }
    while a % 2 == 0 {
        a /= 2;
        if d % 2 == 0 {
            return 0;
        }
        let m = d.rem_euclid(8);
        if m == 3 || m == 5 {
            r = -r;
        }
    }
    r * jacobi(d, a)
}

pub fn moebius(a: i64) -> i32 {
    assert!(a >= 1, "moebius needs a positive argument");
    let f = factor(a as u64);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `n -> (D / n)`, together with its primitive part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticCharacter {
    pub d: i64,
    pub d0: i64,
    pub conductor: u64,
    pub parity: i32,
}

impl QuadraticCharacter {
    pub fn new(d: impl Into<BigInt>) -> Result<Self> {
        let d: BigInt = d.into();
        let d_small = d.to_i64().ok_or(Error::Overflow("character discriminant"))?;
        if d.is_zero() {
            return Err(Error::InvalidInput("character discriminant must be nonzero".into()));
        }
        let (s, _) = squarefree_part(&d);
        let s = s.to_i64().ok_or(Error::Overflow("fundamental discriminant"))?;
        let d0 = if s.rem_euclid(4) == 1 { s } else { 4 * s };
        Ok(QuadraticCharacter { d: d_small, d0, conductor: d0.unsigned_abs(), parity: if d0 < 0 { -1 } else { 1 } })
    }

    pub fn trivial() -> Self {
        Self::new(1).unwrap()
    }

    pub fn is_trivial(&self) -> bool {
        self.d0 == 1 && self.d.abs() == 1
    }

    /// Whether `D` is itself a fundamental discriminant (or 1).
    pub fn is_primitive(&self) -> bool {
        self.d == self.d0
    }

    /// Value at `n`, with the Kronecker-symbol semantics of `D`.
    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.d, n)
    }

    /// Value of the primitive character `chi_{D0}` at `n`.
    pub fn eval_primitive(&self, n: i64) -> i32 {
        kronecker(self.d0, n)
    }

    /// Primes dividing `D` but not `D0`, where the primitive character must be corrected.
    pub fn imprimitive_primes(&self) -> Vec<u64> {
        factor_big(&BigInt::from(self.d))
            .into_iter()
            .map(|(p, _)| p)
            .filter(|&p| self.d0 % p as i64 != 0)
            .collect()
    }
}

fn rational_pow_int(base: u64, e: i64) -> Rational {
    let b = BigInt::from(base);
    if e >= 0 {
        Rational::from_integer(b.pow(e as u32))
    } else {
        Rational::new(BigInt::one(), b.pow((-e) as u32))
    }
}

/// `sum_{d | a} chi(d) d^s`.
pub fn sigma(s: i64, a: u64, chi: &QuadraticCharacter) -> Rational {
    assert!(a >= 1);
    divisors(a)
        .into_iter()
        .map(|d| {
            let c = chi.eval(d as i64);
            rational_pow_int(d, s) * Rational::from_integer(BigInt::from(c))
        })
        .sum()
}

static BERNOULLI: LazyLock<Mutex<Vec<Rational>>> = LazyLock::new(|| Mutex::new(vec![Rational::one()]));

/// Classical Bernoulli number with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // sum_{k<m+1} C(m+1,k) B_k = 0
        let mut s = Rational::zero();
        let mut binom = BigInt::one();
        for (k, b) in cache.iter().enumerate() {
            s += b * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        cache.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    cache[n].clone()
}

/// Bernoulli polynomial `B_n(x)`.
pub fn bernoulli_poly(n: usize, x: &Rational) -> Rational {
    let mut s = Rational::zero();
    let mut binom = BigInt::one();
    let mut xp = Vec::with_capacity(n + 1);
    let mut acc = Rational::one();
    for _ in 0..=n {
        xp.push(acc.clone());
        acc *= x;
    }
    for k in 0..=n {
        s += bernoulli(k) * Rational::from_integer(binom.clone()) * &xp[n - k];
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    s
}

/// Generalized Bernoulli number `B_{n,chi}` of a primitive character.
pub fn bernoulli_gen(n: usize, chi: &QuadraticCharacter) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidInput("bernoulli_gen needs n >= 1".into()));
    }
    if !chi.is_primitive() {
        return Err(Error::NonPrimitive(format!("character of discriminant {} is not primitive", chi.d)));
    }
    let f = chi.conductor;
    let fr = Rational::from_integer(BigInt::from(f));
    let mut s = Rational::zero();
    for a in 1..=f {
        let c = chi.eval_primitive(a as i64);
        if c != 0 {
            let x = Rational::new(BigInt::from(a), BigInt::from(f));
            s += bernoulli_poly(n, &x) * Rational::from_integer(BigInt::from(c));
        }
    }
    let out = s * crate::num::rational_pow(&fr, n as i64 - 1);
    let vanishes = (chi.parity == 1) != (n % 2 == 0) && !(n == 1 && chi.is_trivial());
    if vanishes {
        assert!(out.is_zero(), "B_{{{n},chi}} must vanish for mismatched parity");
    }
    Ok(out)
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// `prod_p (1 - chi0(p) p^-s)` over the primes where `chi_D` and `chi_{D0}` differ.
fn euler_correction(s: i64, chi: &QuadraticCharacter) -> Rational {
    chi.imprimitive_primes()
        .into_iter()
        .map(|p| {
            let c = Rational::from_integer(BigInt::from(chi.eval_primitive(p as i64)));
            Rational::one() - c * rational_pow_int(p, -s)
        })
        .product()
}

fn check_l_input(s: i64, chi: &QuadraticCharacter) -> Result<()> {
    if s < 1 || (s == 1 && chi.is_trivial()) {
        return Err(Error::InvalidInput(format!("L-value at s = {s} is outside the supported range")));
    }
    if chi.d.rem_euclid(4) == 3 {
        return Err(Error::InvalidInput(format!("discriminant {} = 3 mod 4 has no Dirichlet L-series here", chi.d)));
    }
    Ok(())
}

/// `L(s, chi)` in closed form when `chi(-1) = (-1)^s`.
pub fn l_value_exact(s: i64, chi: &QuadraticCharacter) -> Result<SymbolicReal> {
    check_l_input(s, chi)?;
    let delta = if chi.parity == 1 { 0 } else { 1 };
    if (s - delta) % 2 != 0 {
        return Err(Error::ParityMismatch(format!(
            "chi_{}(-1) = {} does not match (-1)^{s}",
            chi.d, chi.parity
        )));
    }
    let prim = QuadraticCharacter::new(chi.d0)?;
    let b = bernoulli_gen(s as usize, &prim)?;
    let f = Rational::from_integer(BigInt::from(chi.conductor));
    let sign = if ((s - delta) / 2) % 2 == 0 { -1 } else { 1 };
    // sqrt|D0| (2 pi)^s B_{s,chi} / (2 f^s s!)
    let q = Rational::from_integer(BigInt::from(sign) * (BigInt::one() << s as usize)) * b
        / (Rational::from_integer(BigInt::from(2) * factorial(s as u64)) * crate::num::rational_pow(&f, s));
    let root = SymbolicReal::sqrt(&Rational::from_integer(BigInt::from(chi.conductor)))?;
    let val = &(&SymbolicReal::pi_pow(s) * &root) * &SymbolicReal::rational(q);
    Ok(val.scale(&euler_correction(s, chi)))
}

fn pow_neg(x: &Rational, s: i64) -> Rational {
    crate::num::rational_pow(x, -s)
}

/// Enclosure of `zeta(s, x)` for integer `s >= 2` and `0 < x <= 1` by Euler-Maclaurin.
fn hurwitz_interval(s: i64, x: &Rational, prec: u32) -> Interval {
    let work = prec + 16;
    let n_terms = (prec as i64 / 2 + 2 * s + 8) as usize;
    let big_n = x + Rational::from_integer(BigInt::from(n_terms));
    let mut acc = Interval::zero(work);
    for k in 0..n_terms {
        let t = x + Rational::from_integer(BigInt::from(k));
        acc = acc.add(&Interval::from_rational(&pow_neg(&t, s), work));
    }
    let s_r = Rational::from_integer(BigInt::from(s));
    let tail = pow_neg(&big_n, s - 1) / (&s_r - Rational::one()) + pow_neg(&big_n, s) / Rational::from_integer(BigInt::from(2));
    acc = acc.add(&Interval::from_rational(&tail, work));
    let eps = Rational::new(BigInt::one(), BigInt::one() << (prec + 8));
    // rising factorial s (s+1) ... (s+2j-2) and (2j)! tracked incrementally
    let mut rising = s_r.clone();
    let mut fact = Rational::from_integer(BigInt::from(2));
    let mut j: i64 = 1;
    loop {
        let term = bernoulli(2 * j as usize) / &fact * &rising * pow_neg(&big_n, s + 2 * j - 1);
        let next_rising = &rising * Rational::from_integer(BigInt::from((s + 2 * j - 1) * (s + 2 * j)));
        let next_fact = &fact * Rational::from_integer(BigInt::from((2 * j + 1) * (2 * j + 2)));
        let next = bernoulli(2 * j as usize + 2) / &next_fact * &next_rising * pow_neg(&big_n, s + 2 * j + 1);
        acc = acc.add(&Interval::from_rational(&term, work));
        let bound = next.abs() * Rational::from_integer(BigInt::from(2));
        if bound < eps || j > 4 * n_terms as i64 {
            let b = Interval::from_bounds(&-bound.clone(), &bound, work);
            acc = acc.add(&b);
            break;
        }
        rising = next_rising;
        fact = next_fact;
        j += 1;
    }
    acc.coarsen(prec)
}

/// Certified enclosure of `L(s, chi)` for integer `s >= 2`.
pub fn l_value_interval(s: i64, chi: &QuadraticCharacter, prec_bits: u32) -> Result<Interval> {
    check_l_input(s, chi)?;
    if s < 2 {
        return Err(Error::InvalidInput("interval L-values need s >= 2".into()));
    }
    let f = chi.conductor;
    let work = prec_bits + 16;
    let mut acc = Interval::zero(work);
    for a in 1..=f {
        let c = chi.eval_primitive(a as i64);
        if c == 0 {
            continue;
        }
        let h = hurwitz_interval(s, &Rational::new(BigInt::from(a), BigInt::from(f)), work);
        acc = if c > 0 { acc.add(&h) } else { acc.sub(&h) };
    }
    let scale = pow_neg(&Rational::from_integer(BigInt::from(f)), s) * euler_correction(s, chi);
    let out = acc.scale(&scale);
    Ok(out.coarsen(prec_bits))
}

/// Numeric enclosure of a `SymbolicReal`.
pub fn symbolic_interval(x: &SymbolicReal, prec: u32) -> Interval {
    let work = prec + 16;
    let mut v = Interval::from_rational(&x.q, work);
    if !x.d.is_one() {
        v = v.mul(&Interval::sqrt_int(&x.d, work));
    }
    if x.pi2 != 0 {
        let pi = pi_interval(work);
        let base = if x.pi2 % 2 == 0 {
            pi
        } else {
            // sqrt(pi) from sqrt(floor/ceil) bounds
            let lo = (&pi.lo << work).sqrt();
            let hi = (&pi.hi << work).sqrt() + 1;
            Interval { lo, hi, prec: work }
        };
        let e = if x.pi2 % 2 == 0 { x.pi2 / 2 } else { x.pi2 };
        let p = base.pow(e.unsigned_abs() as u32);
        v = if e >= 0 { v.mul(&p) } else { v.mul(&p.recip().expect("pi power is positive")) };
    }
    v.coarsen(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn kronecker_examples() {
        for a in 1..50 {
            assert_eq!(kronecker(1, a), 1);
        }
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(17, 4), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(12, 3), 0);
    }

    #[test]
    fn kronecker_multiplicative() {
        for d in -50i64..50 {
            if d == 0 {
                continue;
            }
            for a in 1..50i64 {
                for b in 1..50i64 {
                    assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b), "d={d} a={a} b={b}");
                }
            }
        }
        for a in 1..60i64 {
            for d in [-7i64, -4, 5, 8, 12] {
                for e in [-3i64, 13, 24] {
                    assert_eq!(kronecker(d * e, a), kronecker(d, a) * kronecker(e, a));
                }
            }
        }
    }

    #[test]
    fn moebius_and_sigma() {
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(1), 1);
        let t = QuadraticCharacter::trivial();
        assert_eq!(sigma(3, 1, &t), rat(1, 1));
        assert_eq!(sigma(3, 2, &t), rat(9, 1));
        let m4 = QuadraticCharacter::new(-4).unwrap();
        assert_eq!(sigma(-3, 4, &m4), rat(1, 1));
        for a in 1..30u64 {
            for b in 1..30u64 {
                if num_integer::gcd(a, b) == 1 {
                    assert_eq!(sigma(-2, a * b, &m4), sigma(-2, a, &m4) * sigma(-2, b, &m4));
                }
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        let t = QuadraticCharacter::trivial();
        assert_eq!(bernoulli_gen(2, &t).unwrap(), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        let m4 = QuadraticCharacter::new(-4).unwrap();
        assert_eq!(bernoulli_gen(1, &m4).unwrap(), rat(-1, 2));
        assert!(matches!(bernoulli_gen(2, &QuadraticCharacter::new(-16).unwrap()), Err(Error::NonPrimitive(_))));
    }

    fn fundamental(d: i64) -> bool {
        QuadraticCharacter::new(d).map(|c| c.is_primitive()).unwrap_or(false)
    }

    #[test]
    fn bernoulli_parity_vanishing() {
        for d in -24i64..=24 {
            if d == 0 || !fundamental(d) {
                continue;
            }
            let chi = QuadraticCharacter::new(d).unwrap();
            for n in 1..=8usize {
                let even = n % 2 == 0;
                if (chi.parity == 1) != even && !(n == 1 && chi.is_trivial()) {
                    assert!(bernoulli_gen(n, &chi).unwrap().is_zero(), "d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn exact_l_values() {
        let t = QuadraticCharacter::trivial();
        let z2 = l_value_exact(2, &t).unwrap();
        assert_eq!((z2.q.clone(), z2.pi2, z2.d.clone()), (rat(1, 6), 4, BigInt::one()));
        let z4 = l_value_exact(4, &t).unwrap();
        assert_eq!((z4.q.clone(), z4.pi2), (rat(1, 90), 8));
        let l = l_value_exact(1, &QuadraticCharacter::new(-4).unwrap()).unwrap();
        assert_eq!((l.q.clone(), l.pi2, l.d.clone()), (rat(1, 4), 2, BigInt::one()));
        assert!(matches!(l_value_exact(2, &QuadraticCharacter::new(-4).unwrap()), Err(Error::ParityMismatch(_))));
        // L(2, chi_5) = 4 pi^2 / (25 sqrt 5)
        let l5 = l_value_exact(2, &QuadraticCharacter::new(5).unwrap()).unwrap();
        let want = 4.0 * std::f64::consts::PI.powi(2) / (25.0 * 5f64.sqrt());
        assert!((l5.to_f64() - want).abs() < 1e-12, "{}", l5);
    }

    #[test]
    fn interval_l_values() {
        let t = QuadraticCharacter::trivial();
        let z2 = l_value_interval(2, &t, 64).unwrap();
        let exact = symbolic_interval(&l_value_exact(2, &t).unwrap(), 96);
        assert!(z2.encloses(&exact) || exact.lower() <= z2.upper() && z2.lower() <= exact.upper());
        assert!(z2.contains(&exact.lower()) || z2.contains(&exact.upper()));
        assert!(z2.width() < Rational::new(BigInt::one(), BigInt::one() << 60));
        let cat = l_value_interval(2, &QuadraticCharacter::new(-4).unwrap(), 64).unwrap();
        let c = Rational::new(BigInt::from(915_965_594_177_219_015u64), BigInt::from(10u64).pow(18));
        let tol = Rational::new(BigInt::one(), BigInt::from(10u64).pow(18));
        assert!(cat.lower() < &c + &tol && cat.upper() > &c - &tol, "{cat}");
        let c128 = l_value_interval(2, &QuadraticCharacter::new(-4).unwrap(), 128).unwrap();
        assert!(cat.encloses(&c128));
    }

    #[test]
    fn exact_and_interval_agree() {
        let mut pairs = 0;
        for d in -40i64..=40 {
            if d == 0 || d.rem_euclid(4) == 3 || d.rem_euclid(4) == 2 {
                continue;
            }
            let chi = QuadraticCharacter::new(d).unwrap();
            for s in 2..=8i64 {
                let Ok(ex) = l_value_exact(s, &chi) else { continue };
                let iv = l_value_interval(s, &chi, 80).unwrap();
                let exi = symbolic_interval(&ex, 100);
                assert!(iv.encloses(&exi), "d={d} s={s}: {iv} vs {exi}");
                pairs += 1;
            }
        }
        assert!(pairs >= 50);
    }

    #[test]
    fn reconstruction() {
        let x = Interval::from_bounds(&rat(3333330, 10_000_000), &rat(3333337, 10_000_000), 64);
        assert_eq!(rational_reconstruct(&x, &BigInt::from(10)).unwrap(), Some(rat(1, 3)));
        let pi = pi_interval(80);
        assert_eq!(rational_reconstruct(&pi, &BigInt::from(10)).unwrap(), None);
        let eps = Rational::new(BigInt::one(), BigInt::from(10u64).pow(20));
        let x = Interval::from_bounds(&(rat(240, 1) - &eps), &(rat(240, 1) + &eps), 90);
        assert_eq!(rational_reconstruct(&x, &BigInt::from(1_000_000)).unwrap(), Some(rat(240, 1)));
        let wide = Interval::from_bounds(&rat(0, 1), &rat(1, 2), 64);
        assert!(matches!(rational_reconstruct(&wide, &BigInt::from(10)), Err(Error::AmbiguousInterval)));
    }
}
