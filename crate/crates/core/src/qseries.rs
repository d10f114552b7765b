//! Vector-valued formal q-expansions with rational exponents.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{CosetSign, DiscriminantForm};
use crate::num::{is_integer, Rational};

/// Scalar q-series with integral exponents `start, start+1, ..`, complete below `trunc()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    pub start: i64,
    pub coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn trunc(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    pub fn coeff(&self, e: i64) -> Result<Rational> {
        if e >= self.trunc() {
            return Err(Error::TruncationInsufficient { need: format!("{}", e + 1), have: format!("{}", self.trunc()) });
        }
        Ok(if e < self.start { Rational::zero() } else { self.coeffs[(e - self.start) as usize].clone() })
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        QSeries { start: self.start + o.start, coeffs: out }
    }
}

/// `prod_{j>=1} (1 - q^j)` up to (excluding) degree `len`, by the pentagonal number theorem.
fn euler_product(len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = (kk * (3 * kk - 1) / 2) as usize;
            if e < len {
                any = true;
                let s = if kk.abs() % 2 == 0 { 1 } else { -1 };
                out[e] += Rational::from_integer(BigInt::from(s));
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    out
}

/// `A^alpha` for a power series with constant term 1.
fn series_power(a: &[Rational], alpha: i64) -> Vec<Rational> {
    let n = a.len();
    let mut b = vec![Rational::zero(); n];
    if n == 0 {
        return b;
    }
    b[0] = Rational::one();
    let al = Rational::from_integer(BigInt::from(alpha));
    for m in 1..n {
        let mut s = Rational::zero();
        for k in 1..=m {
            if a[k].is_zero() {
                continue;
            }
            let w = (&al + Rational::one()) * Rational::from_integer(BigInt::from(k)) - Rational::from_integer(BigInt::from(m));
            s += w * &a[k] * &b[m - k];
        }
        b[m] = s / Rational::from_integer(BigInt::from(m));
    }
    b
}

/// `Delta^b` with all coefficients of exponent `< trunc`.
pub fn delta_power(b: i64, trunc: i64) -> Result<QSeries> {
    if trunc < b + 1 {
        return Err(Error::InvalidInput(format!("delta_power({b}) needs trunc >= {}", b + 1)));
    }
    let len = (trunc - b) as usize;
    let coeffs = series_power(&euler_product(len), 24 * b);
    Ok(QSeries { start: b, coeffs })
}

/// Vector-valued q-series; component `mu` is supported on `sign * Q(mu) + Z`.
#[derive(Clone, Debug)]
pub struct VVQSeries {
    disc: Arc<DiscriminantForm>,
    den: u64,
    sign: CosetSign,
    coeffs: BTreeMap<(i64, usize), Rational>,
    trunc: Rational,
}

impl PartialEq for VVQSeries {
    fn eq(&self, o: &Self) -> bool {
        self.sign == o.sign
            && self.trunc == o.trunc
            && self.disc.elements().len() == o.disc.elements().len()
            && self.disc.invariants() == o.disc.invariants()
            && self.coeffs == o.coeffs
    }
}

fn exp_key(e: &Rational, den: u64) -> Option<i64> {
    let x = e * Rational::from_integer(BigInt::from(den));
    if x.is_integer() {
        use num_traits::ToPrimitive;
        x.to_integer().to_i64()
    } else {
        None
    }
}

impl VVQSeries {
    pub fn zero(disc: Arc<DiscriminantForm>, sign: CosetSign, trunc: Rational) -> Self {
        let den = disc.level().max(1);
        VVQSeries { disc, den, sign, coeffs: BTreeMap::new(), trunc }
    }

    /// Scalar (trivial discriminant form) series from a `QSeries`.
    pub fn from_scalar(disc: Arc<DiscriminantForm>, s: &QSeries) -> Result<Self> {
        if disc.order() != 1 {
            return Err(Error::IncompatibleDiscriminantForms);
        }
        let mut f = Self::zero(disc, CosetSign::Plus, Rational::from_integer(BigInt::from(s.trunc())));
        for (k, c) in s.coeffs.iter().enumerate() {
            f.set(&Rational::from_integer(BigInt::from(s.start + k as i64)), 0, c.clone())?;
        }
        Ok(f)
    }

    pub fn disc(&self) -> &DiscriminantForm {
        &self.disc
    }

    pub fn disc_arc(&self) -> Arc<DiscriminantForm> {
        self.disc.clone()
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn sign(&self) -> CosetSign {
        self.sign
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    /// Does exponent `e` belong to component `mu`?
    pub fn exponent_allowed(&self, e: &Rational, mu: usize) -> bool {
        let q = self.disc.q(mu);
        match self.sign {
            CosetSign::Plus => is_integer(&(e - q)),
            CosetSign::Minus => is_integer(&(e + q)),
        }
    }

    pub fn set(&mut self, e: &Rational, mu: usize, c: Rational) -> Result<()> {
        if mu >= self.disc.order() {
            return Err(Error::InvalidInput(format!("component {mu} out of range")));
        }
        if !self.exponent_allowed(e, mu) {
            return Err(Error::CosetMismatch(format!("exponent {e} is not allowed in component {mu}")));
        }
        if e >= &self.trunc {
            return Err(Error::TruncationInsufficient { need: format!("> {e}"), have: format!("{}", self.trunc) });
        }
        let k = exp_key(e, self.den).ok_or_else(|| Error::Internal(format!("exponent {e} off the grid")))?;
        if c.is_zero() {
            self.coeffs.remove(&(k, mu));
        } else {
            self.coeffs.insert((k, mu), c);
        }
        Ok(())
    }

    pub fn get(&self, e: &Rational, mu: usize) -> Result<Rational> {
        if e >= &self.trunc {
            return Err(Error::TruncationInsufficient { need: format!("> {e}"), have: format!("{}", self.trunc) });
        }
        Ok(exp_key(e, self.den)
            .and_then(|k| self.coeffs.get(&(k, mu)).cloned())
            .unwrap_or_else(Rational::zero))
    }

    /// Nonzero coefficients in (exponent, component) order.
    pub fn iter(&self) -> impl Iterator<Item = (Rational, usize, &Rational)> + '_ {
        let den = BigInt::from(self.den);
        self.coeffs.iter().map(move |(&(k, mu), c)| (Rational::new(BigInt::from(k), den.clone()), mu, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        if self.sign != o.sign || self.disc.order() != o.disc.order() || self.disc.invariants() != o.disc.invariants() {
            return Err(Error::IncompatibleDiscriminantForms);
        }
        for i in 0..self.disc.order() {
            if self.disc.q(i) != o.disc.q(i) {
                return Err(Error::IncompatibleDiscriminantForms);
            }
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let trunc = self.trunc.clone().min(o.trunc.clone());
        let mut out = Self::zero(self.disc.clone(), self.sign, trunc);
        for src in [self, o] {
            for (e, mu, c) in src.iter() {
                if e < out.trunc {
                    let cur = out.get(&e, mu)?;
                    out.set(&e, mu, cur + c)?;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.disc.clone(), self.sign, self.trunc.clone());
        if !r.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, c)| (*k, c * r)).collect();
        }
        out
    }

    /// Smallest exponent carrying a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<Rational> {
        self.coeffs.keys().next().map(|&(k, _)| Rational::new(BigInt::from(k), BigInt::from(self.den)))
    }

    /// Product with a scalar series.
    pub fn mul_scalar(&self, s: &QSeries) -> Self {
        let a_f = self.min_exponent().unwrap_or_else(|| self.trunc.clone());
        let t_s = Rational::from_integer(BigInt::from(s.trunc()));
        let s_start = Rational::from_integer(BigInt::from(s.start));
        let trunc = (&self.trunc + s_start).min(t_s + a_f);
        let mut out = Self::zero(self.disc.clone(), self.sign, trunc);
        for (e, mu, c) in self.iter() {
            for (k, d) in s.coeffs.iter().enumerate() {
                if d.is_zero() {
                    continue;
                }
                let ee = &e + Rational::from_integer(BigInt::from(s.start + k as i64));
                if ee >= out.trunc {
                    break;
                }
                let key = (exp_key(&ee, self.den).unwrap(), mu);
                let v = out.coeffs.entry(key).or_insert_with(Rational::zero);
                *v += c * d;
            }
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    /// Product of two series, one of them scalar-valued.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        let (v, s) = if o.disc.order() == 1 {
            (self, o)
        } else if self.disc.order() == 1 {
            (o, self)
        } else {
            return Err(Error::IncompatibleDiscriminantForms);
        };
        let start = s.min_exponent().unwrap_or_else(|| s.trunc.clone());
        if !start.is_integer() || !s.trunc.is_integer() && s.trunc.ceil() != s.trunc {
            return Err(Error::InvalidInput("scalar factor must have integral exponents".into()));
        }
        let st = start.to_integer();
        let tr = s.trunc.ceil().to_integer();
        use num_traits::ToPrimitive;
        let (st, tr) = (st.to_i64().unwrap(), tr.to_i64().unwrap());
        let coeffs = (st..tr).map(|e| s.get(&Rational::from_integer(BigInt::from(e)), 0).unwrap()).collect();
        Ok(v.mul_scalar(&QSeries { start: st, coeffs }))
    }

    /// `Delta^l * f`.
    pub fn mul_delta_pow(&self, l: i64) -> Result<Self> {
        if l == 0 {
            return Ok(self.clone());
        }
        let a_f = self.min_exponent().unwrap_or_else(|| self.trunc.clone());
        // enough terms of Delta^l so that the product is limited by f's own truncation
        let need = (&self.trunc - a_f).ceil().to_integer();
        use num_traits::ToPrimitive;
        let need = need.to_i64().unwrap().max(1);
        let d = delta_power(l, l + need)?;
        Ok(self.mul_scalar(&d))
    }

    /// Largest pole order; `None` when no negative exponents occur.
    pub fn pole_order(&self) -> Option<Rational> {
        self.min_exponent().filter(|e| e.is_negative()).map(|e| -e)
    }

    /// Copy restricted to exponents below `trunc`.
    pub fn truncate(&self, trunc: &Rational) -> Self {
        let mut out = self.clone();
        if trunc < &self.trunc {
            out.trunc = trunc.clone();
            let den = BigInt::from(self.den);
            out.coeffs.retain(|&(k, _), _| Rational::new(BigInt::from(k), den.clone()) < *trunc);
        }
        out
    }

    pub fn principal_part(&self) -> Result<PrincipalPart> {
        let mut entries = BTreeMap::new();
        let mut const_term = Rational::zero();
        for (e, mu, c) in self.iter() {
            if e.is_negative() {
                entries.insert((-e, mu), c.clone());
            } else if e.is_zero() && mu == 0 {
                const_term = c.clone();
            }
        }
        PrincipalPart::new(self.disc.clone(), self.sign, entries, const_term)
    }
}

/// Principal part `sum c(-m, mu) q^-m e_mu` plus the constant `c(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    pub sign: CosetSign,
    pub entries: BTreeMap<(Rational, usize), Rational>,
    pub const_term: Rational,
    /// All entries are integers; the constant term may be any rational.
    pub integral: bool,
}

impl PrincipalPart {
    /// Checks positivity of `m`, the exponent congruence `-m = sign * Q(mu)` mod 1
    /// and the symmetry `c(-m, mu) = c(-m, -mu)`.
    pub fn new(
        disc: Arc<DiscriminantForm>,
        sign: CosetSign,
        entries: BTreeMap<(Rational, usize), Rational>,
        const_term: Rational,
    ) -> Result<Self> {
        let entries: BTreeMap<_, _> = entries.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        for ((m, mu), c) in &entries {
            if !m.is_positive() {
                return Err(Error::InvalidInput(format!("principal part index m = {m} must be positive")));
            }
            if *mu >= disc.order() {
                return Err(Error::InvalidInput(format!("component {mu} out of range")));
            }
            let q = disc.q(*mu);
            let ok = match sign {
                CosetSign::Plus => is_integer(&(m + q)),
                CosetSign::Minus => is_integer(&(m - q)),
            };
            if !ok {
                return Err(Error::CosetMismatch(format!("q^-{m} cannot occur in component {mu}")));
            }
            let partner = entries.get(&(m.clone(), disc.neg(*mu)));
            if partner != Some(c) {
                return Err(Error::InvalidInput(format!(
                    "principal part is not symmetric under mu -> -mu at (m = {m}, mu = {mu})"
                )));
            }
        }
        let integral = entries.values().all(|c| c.is_integer());
        Ok(PrincipalPart { sign, entries, const_term, integral })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `m` with a nonzero entry.
    pub fn pole_order(&self) -> Option<Rational> {
        self.entries.keys().map(|(m, _)| m.clone()).max()
    }

    pub fn get(&self, m: &Rational, mu: usize) -> Rational {
        self.entries.get(&(m.clone(), mu)).cloned().unwrap_or_else(Rational::zero)
    }
}

pub fn trunc_int(t: i64) -> Rational {
    Rational::from_integer(BigInt::from(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::e8;
    use crate::num::rat;
    use crate::EvenLattice;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn delta_expansions() {
        let d = delta_power(1, 5).unwrap();
        assert_eq!(d.start, 1);
        assert_eq!(d.coeffs, ints(&[1, -24, 252, -1472]));
        let di = delta_power(-1, 2).unwrap();
        assert_eq!(di.start, -1);
        assert_eq!(di.coeffs, ints(&[1, 24, 324]));
        let d2 = delta_power(-2, 30).unwrap();
        assert!(d2.coeffs.iter().all(|c| c.is_positive()));
        for b in 1..=3 {
            let p = delta_power(b, 12).unwrap().mul(&delta_power(-b, 12).unwrap());
            assert_eq!(p.start, 0);
            assert_eq!(p.coeff(0).unwrap(), rat(1, 1));
            for e in 1..p.trunc() {
                assert!(p.coeff(e).unwrap().is_zero(), "b={b} e={e}");
            }
            assert!(p.trunc() >= 12 - b);
        }
    }

    #[test]
    fn vector_valued_ops() {
        let triv = e8().disc_arc();
        let di = VVQSeries::from_scalar(triv.clone(), &delta_power(-1, 5).unwrap()).unwrap();
        let prod = di.mul_delta_pow(1).unwrap();
        assert_eq!(prod.get(&rat(0, 1), 0).unwrap(), rat(1, 1));
        assert!(prod.iter().all(|(e, _, _)| e.is_zero()));
        assert!(prod.trunc() >= &rat(5, 1));
        assert_eq!(di.pole_order(), Some(rat(1, 1)));
        assert_eq!(prod.pole_order(), None);
        let z = VVQSeries::zero(triv.clone(), CosetSign::Plus, rat(5, 1));
        assert_eq!(di.add(&z).unwrap(), di);
        let s0 = di.scale(&rat(0, 1));
        assert!(s0.is_empty());
        assert_eq!(s0.trunc(), di.trunc());
        let pp = di.principal_part().unwrap();
        assert_eq!(pp.entries.len(), 1);
        assert_eq!(pp.get(&rat(1, 1), 0), rat(1, 1));
        assert_eq!(pp.const_term, rat(24, 1));
        assert!(matches!(di.get(&rat(5, 1), 0), Err(Error::TruncationInsufficient { .. })));
    }

    #[test]
    fn symmetry_enforced() {
        // <2> + <2>: components (1/2, 0) and (0, 1/2) are their own negatives; use <6> for a real pair
        let l = EvenLattice::new(vec![vec![6]]).unwrap();
        let d = l.disc_arc();
        let mu = (1..d.order()).find(|&i| d.neg(i) != i).unwrap();
        let m = -d.q(mu) + rat(1, 1);
        let mut e = BTreeMap::new();
        e.insert((m.clone(), mu), rat(1, 1));
        assert!(PrincipalPart::new(d.clone(), CosetSign::Plus, e.clone(), rat(0, 1)).is_err());
        e.insert((m, d.neg(mu)), rat(1, 1));
        assert!(PrincipalPart::new(d.clone(), CosetSign::Plus, e, rat(0, 1)).is_ok());
        let mut f = VVQSeries::zero(d.clone(), CosetSign::Minus, rat(3, 1));
        assert!(f.set(&d.q(mu).clone(), mu, rat(1, 1)).is_err());
        assert!(f.set(&-d.q(mu).clone(), mu, rat(1, 1)).is_ok());
    }
}
