//! Fixed-point intervals with outward rounding.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::num::Rational;

/// `[lo / 2^prec, hi / 2^prec]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let scaled = q.numer() << prec;
        Interval { lo: floor_div(&scaled, q.denom()), hi: ceil_div(&scaled, q.denom()), prec }
    }

    pub fn from_bounds(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        let a = Self::from_rational(lo, prec);
        let b = Self::from_rational(hi, prec);
        Interval { lo: a.lo, hi: b.hi, prec }
    }

    /// Rounds outward to a coarser precision.
    pub fn coarsen(&self, prec: u32) -> Self {
        assert!(prec <= self.prec);
        let d = self.prec - prec;
        let s = BigInt::one() << d;
        Interval { lo: floor_div(&self.lo, &s), hi: ceil_div(&self.hi, &s), prec }
    }

    pub fn zero(prec: u32) -> Self {
        Interval { lo: BigInt::zero(), hi: BigInt::zero(), prec }
    }

    pub fn lower(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.prec)
    }

    pub fn upper(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.prec)
    }

    pub fn width(&self) -> Rational {
        self.upper() - self.lower()
    }

    pub fn mid_f64(&self) -> f64 {
        let m: BigInt = (&self.lo + &self.hi) / 2;
        m.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.prec as i32)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower() <= q && q <= &self.upper()
    }

    /// `other` is a sub-interval of `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn add(&self, o: &Interval) -> Interval {
        assert_eq!(self.prec, o.prec);
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        assert_eq!(self.prec, o.prec);
        let prods = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = prods.iter().min().unwrap();
        let hi = prods.iter().max().unwrap();
        let s = BigInt::one() << self.prec;
        Interval { lo: floor_div(lo, &s), hi: ceil_div(hi, &s), prec: self.prec }
    }

    pub fn scale(&self, q: &Rational) -> Interval {
        self.mul(&Interval::from_rational(q, self.prec))
    }

    /// Reciprocal of an interval excluding 0.
    pub fn recip(&self) -> Result<Interval> {
        if !(self.lo.is_positive() || self.hi.is_negative()) {
            return Err(Error::Internal("interval reciprocal straddles zero".into()));
        }
        let s2 = BigInt::one() << (2 * self.prec);
        Ok(Interval { lo: floor_div(&s2, &self.hi), hi: ceil_div(&s2, &self.lo), prec: self.prec })
    }

    pub fn pow(&self, e: u32) -> Interval {
        let mut out = Interval::from_rational(&Rational::one(), self.prec);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `sqrt(n)` for a non-negative integer.
    pub fn sqrt_int(n: &BigInt, prec: u32) -> Interval {
        let s = (n << (2 * prec)).sqrt();
        let hi = if &s * &s == (n << (2 * prec)) { s.clone() } else { &s + 1 };
        Interval { lo: s, hi, prec }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lower_f64(), self.upper_f64())
    }
}

impl Interval {
    fn lower_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.prec as i32)
    }
    fn upper_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.prec as i32)
    }
}

/// Rational enclosure of `atan(1/x)` by the alternating Taylor series.
fn atan_inv(x: u64, prec: u32) -> (Rational, Rational) {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let eps = Rational::new(BigInt::one(), BigInt::one() << (prec + 4));
    let mut sum = Rational::zero();
    let mut pw = BigInt::from(x);
    let mut k: u64 = 0;
    loop {
        let term = Rational::new(BigInt::one(), &pw * BigInt::from(2 * k + 1));
        if term < eps {
            // alternating with decreasing terms: the tail lies between 0 and the next term
            return if k % 2 == 0 { (sum.clone(), sum + term) } else { (sum.clone() - term, sum) };
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pw *= &x2;
        k += 1;
    }
}

/// Certified enclosure of pi via Machin's formula.
pub fn pi_interval(prec: u32) -> Interval {
    let (a_lo, a_hi) = atan_inv(5, prec);
    let (b_lo, b_hi) = atan_inv(239, prec);
    let r16 = Rational::from_integer(BigInt::from(16));
    let r4 = Rational::from_integer(BigInt::from(4));
    let lo = &r16 * a_lo - &r4 * b_hi;
    let hi = &r16 * a_hi - &r4 * b_lo;
    Interval::from_bounds(&lo, &hi, prec)
}

/// The rational with the smallest denominator in `[lo, hi]`.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        // the smallest integer in range; for negatives prefer the one nearest zero
        if lo.is_negative() && hi.is_positive() {
            return Rational::zero();
        }
        if hi.is_negative() || hi.is_zero() {
            return hi.floor();
        }
        return next;
    }
    let inner = simplest_between(&(Rational::one() / (hi - &fl)), &(Rational::one() / (lo - &fl)));
    fl + Rational::one() / inner
}

/// Unique rational with denominator at most `den_bound` inside `x`, if any.
pub fn rational_reconstruct(x: &Interval, den_bound: &BigInt) -> Result<Option<Rational>> {
    let (lo, hi) = (x.lower(), x.upper());
    let b2 = Rational::from_integer(den_bound * den_bound * 2);
    if x.width() * b2 >= Rational::one() {
        return Err(Error::AmbiguousInterval);
    }
    let cand = simplest_between(&lo, &hi);
    Ok((cand.denom() <= den_bound).then_some(cand))
}
