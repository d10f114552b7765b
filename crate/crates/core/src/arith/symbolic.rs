use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::num::{squarefree_part, Rational};

/// `q * pi^(pi2/2) * sqrt(d)` with `d` squarefree and positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicReal {
    pub q: Rational,
    /// Twice the exponent of pi.
    pub pi2: i64,
    pub d: BigInt,
}

impl SymbolicReal {
    pub fn rational(q: Rational) -> Self {
        SymbolicReal { q, pi2: 0, d: BigInt::one() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn pi_pow(a: i64) -> Self {
        SymbolicReal { q: Rational::one(), pi2: 2 * a, d: BigInt::one() }
    }

    pub fn sqrt_pi() -> Self {
        SymbolicReal { q: Rational::one(), pi2: 1, d: BigInt::one() }
    }

    /// `sqrt(x)` for a non-negative rational.
    pub fn sqrt(x: &Rational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::InvalidInput(format!("sqrt of negative {x}")));
        }
        if x.is_zero() {
            return Ok(Self::int(0));
        }
        // sqrt(a/b) = sqrt(ab)/b
        let ab = x.numer() * x.denom();
        let (s, f) = squarefree_part(&ab);
        Ok(SymbolicReal { q: Rational::new(f, x.denom().clone()), pi2: 0, d: s })
    }

    /// Exponent of pi (may be half-integral).
    pub fn pi_exponent(&self) -> Rational {
        Rational::new(BigInt::from(self.pi2), BigInt::from(2))
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero() || (self.pi2 == 0 && self.d.is_one())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.q.clone())
    }

    pub fn inv(&self) -> Self {
        assert!(!self.q.is_zero(), "inverse of zero");
        // 1/(q sqrt d) = sqrt(d) / (q d)
        SymbolicReal {
            q: Rational::one() / (&self.q * Rational::from_integer(self.d.clone())),
            pi2: -self.pi2,
            d: self.d.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = SymbolicReal::int(1);
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        SymbolicReal { q: &self.q * r, pi2: self.pi2, d: self.d.clone() }
    }

    /// Sum of two values sharing the same pi exponent and radicand.
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if self.q.is_zero() {
            return Ok(o.clone());
        }
        if o.q.is_zero() {
            return Ok(self.clone());
        }
        if self.pi2 != o.pi2 || self.d != o.d {
            return Err(Error::InvalidInput(format!("cannot add {self} and {o}")));
        }
        Ok(SymbolicReal { q: &self.q + &o.q, pi2: self.pi2, d: self.d.clone() })
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.q.numer().to_f64().unwrap_or(f64::NAN) / self.q.denom().to_f64().unwrap_or(f64::NAN);
        q * std::f64::consts::PI.powf(self.pi2 as f64 / 2.0) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl Mul for &SymbolicReal {
    type Output = SymbolicReal;
    fn mul(self, o: &SymbolicReal) -> SymbolicReal {
        let g = self.d.gcd(&o.d);
        let d = &self.d * &o.d / (&g * &g);
        SymbolicReal { q: &self.q * &o.q * Rational::from_integer(g), pi2: self.pi2 + o.pi2, d }
    }
}

impl Div for &SymbolicReal {
    type Output = SymbolicReal;
    fn div(self, o: &SymbolicReal) -> SymbolicReal {
        self * &o.inv()
    }
}

impl fmt::Display for SymbolicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)?;
        if self.pi2 != 0 {
            write!(f, "*pi^({})", self.pi_exponent())?;
        }
        if !self.d.is_one() {
            write!(f, "*sqrt({})", self.d)?;
        }
        Ok(())
    }
}
