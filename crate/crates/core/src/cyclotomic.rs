//! Exact arithmetic in cyclotomic fields `Q(zeta_M)`.
//!
//! Elements are stored in the power basis `1, z, ..., z^(phi(M)-1)` as integer
//! numerators over one positive common denominator.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::{divisors, Rational};

static PHI_CACHE: LazyLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Coefficients (ascending) of the M-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    if let Some(p) = PHI_CACHE.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by every Phi_d with d | m, d < m
    let mut poly = vec![BigInt::zero(); m as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[m as usize] = BigInt::one();
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let div = cyclotomic_polynomial(d);
        poly = exact_div_monic(&poly, &div);
    }
    let poly = Arc::new(poly);
    PHI_CACHE.lock().unwrap().entry(m).or_insert(poly).clone()
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut q = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        q[k] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

/// Euler's phi.
pub fn euler_phi(m: u64) -> u64 {
    crate::num::factor(m).iter().fold(1, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        let n = euler_phi(order) as usize;
        Cyclotomic { order, coeffs: vec![BigInt::zero(); n], den: BigInt::one() }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(order, &Rational::one())
    }

    pub fn from_rational(order: u64, q: &Rational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = q.numer().clone();
        z.den = q.denom().clone();
        z
    }

    /// `zeta_M^k` for any integer `k`.
    pub fn root(order: u64, k: i64) -> Self {
        let mut g = vec![BigInt::zero(); order as usize];
        g[k.rem_euclid(order as i64) as usize] = BigInt::one();
        Self::from_group_ring(order, &g, BigInt::one())
    }

    /// Image of `sum_k g[k] zeta^k / den` (k ranging over `0..len`, taken mod M).
    pub fn from_group_ring(order: u64, g: &[BigInt], den: BigInt) -> Self {
        let mut poly = vec![BigInt::zero(); order as usize];
        for (k, c) in g.iter().enumerate() {
            if !c.is_zero() {
                poly[k % order as usize] += c;
            }
        }
        let coeffs = reduce(order, poly);
        let mut z = Cyclotomic { order, coeffs, den };
        z.normalize();
        z
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.coeffs.iter_mut() {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.coeffs {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            for c in self.coeffs.iter_mut() {
                *c /= &g;
            }
            self.den /= &g;
        }
        if self.coeffs.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(Rational::new(self.coeffs[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Rational coordinates in the power basis.
    pub fn coords(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| Rational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut z = Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q.numer()).collect(),
            den: &self.den * q.denom(),
        };
        z.normalize();
        z
    }

    /// The automorphism `zeta -> zeta^a`, `gcd(a, M) = 1`.
    pub fn galois(&self, a: i64) -> Self {
        let m = self.order as i64;
        let mut g = vec![BigInt::zero(); self.order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                g[((j as i64) * a).rem_euclid(m) as usize] += c;
            }
        }
        Self::from_group_ring(self.order, &g, self.den.clone())
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Same element in `Q(zeta_N)`, `M | N`.
    pub fn embed(&self, order: u64) -> Self {
        assert!(order % self.order == 0, "cannot embed Q(zeta_{}) into Q(zeta_{order})", self.order);
        let step = (order / self.order) as usize;
        let mut g = vec![BigInt::zero(); order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            g[j * step] = c.clone();
        }
        Self::from_group_ring(order, &g, self.den.clone())
    }

    /// Absolute trace to Q.
    pub fn trace(&self) -> Rational {
        let mut s = BigInt::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                s += c * ramanujan_sum(self.order, j as u64);
            }
        }
        Rational::new(s, self.den.clone())
    }

    /// `sqrt(n)` inside `Q(zeta_M)`, when the field contains it.
    pub fn sqrt(order: u64, n: u64) -> Option<Self> {
        let mut out = Self::one(order);
        for (p, e) in crate::num::factor(n) {
            let half = Rational::from_integer(BigInt::from(p).pow(e / 2));
            out = &out * &Self::from_rational(order, &half);
            if e % 2 == 1 {
                out = &out * &Self::sqrt_prime(order, p)?;
            }
        }
        Some(out)
    }

    fn sqrt_prime(order: u64, p: u64) -> Option<Self> {
        if p == 2 {
            if order % 8 != 0 {
                return None;
            }
            let s = order as i64 / 8;
            return Some(&Self::root(order, s) + &Self::root(order, -s));
        }
        let needs_i = p % 4 == 3;
        if order % p != 0 || (needs_i && order % 4 != 0) {
            return None;
        }
        let step = (order / p) as i64;
        let mut gauss = Self::zero(order);
        for x in 0..p as i64 {
            gauss = &gauss + &Self::root(order, step * ((x * x) % p as i64));
        }
        Some(if needs_i { &gauss * &Self::root(order, -(order as i64) / 4) } else { gauss })
    }
}

/// Ramanujan sum `c_M(j)`, the trace of `zeta_M^j`.
pub fn ramanujan_sum(m: u64, j: u64) -> BigInt {
    let g = m.gcd(&j);
    let mut s = BigInt::zero();
    for d in divisors(g) {
        let mu = crate::arith::moebius((m / d) as i64);
        s += BigInt::from(mu) * BigInt::from(d);
    }
    s
}

fn reduce(order: u64, mut poly: Vec<BigInt>) -> Vec<BigInt> {
    let phi = cyclotomic_polynomial(order);
    let n = phi.len() - 1;
    let support: Vec<(usize, &BigInt)> = phi.iter().enumerate().take(n).filter(|(_, d)| !d.is_zero()).collect();
    for k in (n..poly.len()).rev() {
        let c = std::mem::take(&mut poly[k]);
        if c.is_zero() {
            continue;
        }
        for &(i, d) in &support {
            poly[k - n + i] -= &c * d;
        }
    }
    poly.truncate(n);
    poly.resize(n, BigInt::zero());
    poly
}

fn check_orders(a: &Cyclotomic, b: &Cyclotomic) {
    assert_eq!(a.order, b.order, "cyclotomic orders differ");
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        check_orders(self, rhs);
        let coeffs = if self.den == rhs.den {
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect()
        } else {
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a * &rhs.den + b * &self.den).collect()
        };
        let den = if self.den == rhs.den { self.den.clone() } else { &self.den * &rhs.den };
        let mut z = Cyclotomic { order: self.order, coeffs, den };
        z.normalize();
        z
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        check_orders(self, rhs);
        let n = self.coeffs.len();
        if self.is_zero() || rhs.is_zero() {
            return Cyclotomic::zero(self.order);
        }
        let mut poly = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j] += a * b;
                }
            }
        }
        let coeffs = reduce(self.order, poly);
        let mut z = Cyclotomic { order: self.order, coeffs, den: &self.den * &rhs.den };
        z.normalize();
        z
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let q = Rational::new(c.clone(), self.den.clone());
                if j == 0 {
                    format!("{q}")
                } else {
                    format!("({q})*z{}^{j}", self.order)
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn cyclotomic_polynomials() {
        let p = cyclotomic_polynomial(12);
        let want: Vec<BigInt> = [1, 0, -1, 0, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(*p, want);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(cyclotomic_polynomial(8).len(), 5);
    }

    #[test]
    fn roots_of_unity() {
        for m in [1u64, 2, 3, 4, 8, 12, 15, 24] {
            let z = Cyclotomic::root(m, 1);
            let mut acc = Cyclotomic::one(m);
            for _ in 0..m {
                acc = &acc * &z;
            }
            assert_eq!(acc, Cyclotomic::one(m), "order {m}");
        }
    }

    #[test]
    fn square_roots() {
        for (m, n) in [(8u64, 2u64), (12, 3), (20, 5), (24, 6), (4, 4), (28, 7), (16, 8)] {
            let s = Cyclotomic::sqrt(m, n).unwrap();
            assert_eq!((&s * &s).to_rational(), Some(rat(n as i64, 1)), "sqrt {n} in order {m}");
        }
        assert!(Cyclotomic::sqrt(4, 3).is_none());
    }

    #[test]
    fn trace_and_conjugation() {
        // Tr(zeta_8) = 0, Tr(1) = 4
        assert_eq!(Cyclotomic::root(8, 1).trace(), rat(0, 1));
        assert_eq!(Cyclotomic::one(8).trace(), rat(4, 1));
        let z = Cyclotomic::root(5, 2);
        assert_eq!(&z * &z.conj(), Cyclotomic::one(5));
        assert_eq!(Cyclotomic::root(3, 1).trace(), rat(-1, 1));
        let e = Cyclotomic::root(4, 1).embed(8);
        assert_eq!(e, Cyclotomic::root(8, 2));
    }
}
