//! Fourier coefficients of the vector-valued Eisenstein series `E_{kappa,L}`, `kappa = rank/2`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    l_value_exact, l_value_interval, moebius, rational_reconstruct, sigma, symbolic_interval, Interval,
    QuadraticCharacter, SymbolicReal,
};
use crate::error::{Error, Result};
use crate::lattice::{CosetSign, CosetValue, EvenLattice, Representation};
use crate::localdata::{self, CountConfig};
use crate::num::{factor_big, ord_p, pow_u64, Rational};
use crate::qseries::VVQSeries;

/// Sign convention for the odd-rank character discriminant `D'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OddRankCharacterSign {
    /// `D' = 2 (-1)^((b+ + b- + 1)/2) m0 det(L)`.
    AsPrinted,
    /// The same expression computed for `(L, -Q)`, i.e. the opposite sign.
    LatticeNegated,
}

#[derive(Clone, Debug)]
pub struct EisOptions {
    pub odd_sign: OddRankCharacterSign,
    pub prec_bits: u32,
    pub den_bound: BigInt,
    pub count: CountConfig,
    /// Skip the closed-form L-values and always use certified intervals.
    pub force_interval: bool,
}

impl Default for EisOptions {
    fn default() -> Self {
        EisOptions {
            odd_sign: OddRankCharacterSign::LatticeNegated,
            prec_bits: 256,
            den_bound: BigInt::one() << 64,
            count: CountConfig::default(),
            force_interval: false,
        }
    }
}

/// Read-only data shared by all coefficients of one lattice.
#[derive(Clone, Debug)]
pub struct EisensteinContext {
    lattice: EvenLattice,
    /// `2 kappa = rank`.
    kappa2: i64,
    bminus: usize,
    /// `(-1)^kappa det(L)` in even rank.
    disc_d: Option<BigInt>,
    primes: Vec<u64>,
    pub options: EisOptions,
}

impl EisensteinContext {
    pub fn new(lattice: &EvenLattice) -> Result<Self> {
        Self::with_options(lattice, EisOptions::default())
    }

    pub fn with_options(lattice: &EvenLattice, options: EisOptions) -> Result<Self> {
        let (bp, bm) = lattice.signature();
        let kappa2 = (bp + bm) as i64;
        if kappa2 < 4 {
            return Err(Error::KappaTooSmall(format!("kappa = {}/2 < 2", kappa2)));
        }
        if bm % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "b- = {bm} is odd, so kappa = rank/2 violates 2 kappa = b+ - b- mod 4"
            )));
        }
        let disc_d = (kappa2 % 2 == 0).then(|| {
            let s = if (kappa2 / 2) % 2 == 0 { 1 } else { -1 };
            lattice.det() * BigInt::from(s)
        });
        Ok(EisensteinContext {
            lattice: lattice.clone(),
            kappa2,
            bminus: bm,
            disc_d,
            primes: lattice.bad_primes(),
            options,
        })
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lattice
    }

    pub fn kappa(&self) -> Rational {
        Rational::new(BigInt::from(self.kappa2), BigInt::from(2))
    }

    /// `kappa = 2`: constant term may carry a non-holomorphic correction.
    pub fn hecke_trick_flag(&self) -> bool {
        self.kappa2 == 4
    }

    /// Sign `(-1)^((2 kappa - b+ + b-)/4)` that makes every coefficient non-negative.
    pub fn coefficient_sign(&self) -> i32 {
        let (bp, bm) = self.lattice.signature();
        let e = (self.kappa2 - bp as i64 + bm as i64) / 4;
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `(-1)^(b-/2)`.
    pub fn bminus_sign(&self) -> i32 {
        if (self.bminus / 2) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The character discriminant `D'` of the odd-rank formula for a given `m0`.
    pub fn odd_discriminant(&self, m0: &BigInt) -> BigInt {
        let e = (self.kappa2 + 1) / 2;
        let mut s: i64 = if e % 2 == 0 { 1 } else { -1 };
        if self.options.odd_sign == OddRankCharacterSign::LatticeNegated {
            s = -s;
        }
        BigInt::from(2 * s) * m0 * self.lattice.det()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Exact,
    Interval,
    Constant,
}

fn rint(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `x^(t/2)` for a positive rational `x`.
fn pow_half(x: &Rational, t: i64) -> Result<SymbolicReal> {
    let fl = t.div_euclid(2);
    let base = SymbolicReal::rational(crate::num::rational_pow(x, fl));
    if t.rem_euclid(2) == 0 {
        Ok(base)
    } else {
        Ok(&base * &SymbolicReal::sqrt(x)?)
    }
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// `Gamma(t/2)` for a positive integer `t`.
fn gamma_half(t: i64) -> SymbolicReal {
    if t % 2 == 0 {
        SymbolicReal::rational(rint(factorial(t / 2 - 1)))
    } else {
        // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi)
        let k = (t - 1) / 2;
        let q = Rational::new(factorial(2 * k), (BigInt::one() << (2 * k) as usize) * factorial(k));
        &SymbolicReal::rational(q) * &SymbolicReal::sqrt_pi()
    }
}

/// The factors of one coefficient that do not involve L-values.
struct Assembly {
    rest: SymbolicReal,
    /// L-value `(s, chi)` multiplying `rest`
    l_num: Option<(i64, QuadraticCharacter)>,
    /// L-value dividing `rest`
    l_den: (i64, QuadraticCharacter),
}

impl EisensteinContext {
    fn archimedean(&self, m: &Rational) -> Result<SymbolicReal> {
        let two_pi_k = &pow_half(&rint(2), self.kappa2)? * &SymbolicReal { q: Rational::one(), pi2: self.kappa2, d: BigInt::one() };
        let m_pow = pow_half(m, self.kappa2 - 2)?;
        let sign = SymbolicReal::int(self.bminus_sign() as i64);
        let order = rint(self.lattice.disc().order() as u64);
        let root = SymbolicReal::sqrt(&order)?;
        let num = &(&two_pi_k * &m_pow) * &sign;
        Ok(&num / &(&root * &gamma_half(self.kappa2)))
    }

    fn local_counts(&self, m: &Rational, mu: usize) -> Result<Vec<(u64, u32, BigInt)>> {
        let mut out = Vec::new();
        for &p in &self.primes {
            let w = localdata::w_p(&self.lattice, m, mu, p)?;
            let c = localdata::count(&self.lattice, m, mu, pow_u64(p, w), &self.options.count)?;
            out.push((p, w, c.count));
        }
        Ok(out)
    }

    fn assemble(&self, m: &Rational, mu: usize) -> Result<Assembly> {
        let d_mu = self.lattice.disc().elem_order(mu);
        let arch = self.archimedean(m)?;
        let counts = self.local_counts(m, mu)?;
        let k2m1 = self.kappa2 - 1;
        if let Some(dd) = &self.disc_d {
            let kappa = self.kappa2 / 2;
            let chi = QuadraticCharacter::new(dd * BigInt::from(4))?;
            let dm = m * rint(d_mu * d_mu);
            let dm = dm.to_integer().to_u64().ok_or(Error::Overflow("d_mu^2 m"))?;
            let sig = sigma(1 - kappa, dm, &chi);
            let mut local = Rational::one();
            for (p, w, n) in &counts {
                local *= Rational::new(n.clone(), BigInt::from(*p).pow(k2m1 as u32 * w));
            }
            let rest = &(&arch * &SymbolicReal::rational(sig)) * &SymbolicReal::rational(local);
            return Ok(Assembly { rest, l_num: None, l_den: (kappa, chi) });
        }
        // odd rank: m d_mu^2 = m0 f^2, f coprime to 2N
        let md2 = (m * rint(d_mu * d_mu)).to_integer();
        let mut f = BigInt::one();
        for (p, e) in factor_big(&md2) {
            if !self.primes.contains(&p) {
                f *= BigInt::from(p).pow(e / 2);
            }
        }
        let m0 = &md2 / (&f * &f);
        let dprime = self.odd_discriminant(&m0);
        let chi = QuadraticCharacter::new(dprime)?;
        let fu = f.to_u64().ok_or(Error::Overflow("f"))?;
        let half_minus_kappa = (1 - self.kappa2) / 2;
        let mut twisted = Rational::zero();
        let triv = QuadraticCharacter::trivial();
        for d in crate::num::divisors(fu) {
            let mu_d = moebius(d as i64);
            if mu_d == 0 {
                continue;
            }
            let c = chi.eval(d as i64);
            if c == 0 {
                continue;
            }
            twisted += rint(mu_d * c)
                * crate::num::rational_pow(&rint(d), half_minus_kappa)
                * sigma(2 - self.kappa2, fu / d, &triv);
        }
        let mut local = Rational::one();
        for (p, w, n) in &counts {
            let pr = rint(*p);
            let norm = Rational::one() - crate::num::rational_pow(&pr, 1 - self.kappa2);
            local *= Rational::new(n.clone(), BigInt::from(*p).pow(k2m1 as u32 * w)) / norm;
        }
        let rest = &(&arch * &SymbolicReal::rational(twisted)) * &SymbolicReal::rational(local);
        Ok(Assembly {
            rest,
            l_num: Some(((self.kappa2 - 1) / 2, chi)),
            l_den: (self.kappa2 - 1, triv),
        })
    }
}

impl EisensteinContext {
    fn exact_value(&self, a: &Assembly) -> Result<SymbolicReal> {
        let den = l_value_exact(a.l_den.0, &a.l_den.1)?;
        let mut v = &a.rest / &den;
        if let Some((s, chi)) = &a.l_num {
            v = &v * &l_value_exact(*s, chi)?;
        }
        Ok(v)
    }

    fn interval_value(&self, a: &Assembly, prec: u32) -> Result<Interval> {
        let work = prec + 32;
        let mut v = symbolic_interval(&a.rest, work);
        let den = l_value_interval(a.l_den.0, &a.l_den.1, work)?;
        v = v.mul(&den.recip()?);
        if let Some((s, chi)) = &a.l_num {
            v = v.mul(&l_value_interval(*s, chi, work)?);
        }
        Ok(v.coarsen(prec))
    }

    fn reconstruct(&self, a: &Assembly, m: &Rational, mu: usize) -> Result<Rational> {
        let p = self.options.prec_bits;
        let fail = |why: &str| Error::NonRationalResidue(format!("e({m}, {mu}): {why}"));
        let iv = self.interval_value(a, p)?;
        let cand = rational_reconstruct(&iv, &self.options.den_bound)
            .map_err(|_| fail("interval too wide for the denominator bound"))?
            .ok_or_else(|| fail("no rational with bounded denominator in the certified interval"))?;
        let fine = self.interval_value(a, 2 * p)?;
        if !fine.contains(&cand) {
            return Err(fail("candidate rejected at doubled precision"));
        }
        match rational_reconstruct(&fine, &self.options.den_bound) {
            Ok(Some(c)) if c == cand => Ok(cand),
            _ => Err(fail("reconstruction unstable under doubled precision")),
        }
    }

    /// `e_{kappa,L}(m, mu)` and the evaluation path that produced it.
    pub fn coefficient_with_path(&self, m: &Rational, mu: usize) -> Result<(Rational, EvalPath)> {
        if m.is_zero() {
            if mu >= self.lattice.disc().order() {
                return Err(Error::InvalidInput(format!("element index {mu} out of range")));
            }
            let v = if mu == 0 { Rational::one() } else { Rational::zero() };
            return Ok((v, EvalPath::Constant));
        }
        if m.is_negative() {
            return Err(Error::InvalidInput(format!("Eisenstein coefficients need m >= 0, got {m}")));
        }
        self.lattice.check_coset(m, mu, CosetSign::Plus)?;
        let a = self.assemble(m, mu)?;
        if a.rest.q.is_zero() {
            return Ok((Rational::zero(), EvalPath::Exact));
        }
        if !self.options.force_interval {
            match self.exact_value(&a) {
                Ok(v) => {
                    return v
                        .to_rational()
                        .map(|r| (r, EvalPath::Exact))
                        .ok_or_else(|| Error::NonRationalResidue(format!("e({m}, {mu}) = {v}")));
                }
                Err(Error::ParityMismatch(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok((self.reconstruct(&a, m, mu)?, EvalPath::Interval))
    }

    pub fn coefficient(&self, m: &Rational, mu: usize) -> Result<Rational> {
        self.coefficient_with_path(m, mu).map(|x| x.0)
    }
}

/// `e_{kappa,L}(m, mu)` with default options.
pub fn eis_coefficient(lattice: &EvenLattice, m: &Rational, mu: usize) -> Result<Rational> {
    EisensteinContext::new(lattice)?.coefficient(m, mu)
}

/// An expansion plus the `kappa = 2` caveat on its constant term.
#[derive(Clone, Debug)]
pub struct EisExpansion {
    pub series: VVQSeries,
    pub hecke_trick_flag: bool,
}

impl EisensteinContext {
    /// All `(m, mu)` with `0 <= m < trunc`, `m = Q(mu) mod 1`, in series order.
    pub fn index_set(&self, trunc: &Rational) -> Vec<(Rational, usize)> {
        let disc = self.lattice.disc();
        let mut out = Vec::new();
        for mu in 0..disc.order() {
            let mut m = disc.q(mu).clone();
            while &m < trunc {
                out.push((m.clone(), mu));
                m += Rational::one();
            }
        }
        out.sort();
        out
    }

    pub fn expansion(&self, trunc: &Rational) -> Result<EisExpansion> {
        let idx = self.index_set(trunc);
        let vals: Vec<Result<Rational>> = idx.par_iter().map(|(m, mu)| self.coefficient(m, *mu)).collect();
        let mut series = VVQSeries::zero(self.lattice.disc_arc(), CosetSign::Plus, trunc.clone());
        for ((m, mu), v) in idx.iter().zip(vals) {
            series.set(m, *mu, v?)?;
        }
        Ok(EisExpansion { series, hecke_trick_flag: self.hecke_trick_flag() })
    }
}

pub fn eis_expansion(lattice: &EvenLattice, trunc: &Rational) -> Result<EisExpansion> {
    EisensteinContext::new(lattice)?.expansion(trunc)
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundRow {
    pub m: String,
    pub mu: usize,
    pub coefficient: String,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub exponent: f64,
    pub rows: Vec<LowerBoundRow>,
    pub running_min: Vec<f64>,
    pub all_positive: bool,
}

impl EisensteinContext {
    /// Checks (1) representability and (2) `ord_p(m) <= bound` at every `p | 2N`.
    pub fn check_admissible_pair(&self, pair: &CosetValue, bound: i64, radius: i64) -> Result<()> {
        let rep = self.lattice.coset_represents(&pair.m, pair.mu, pair.sign, radius)?;
        if rep != Representation::Represented {
            return Err(Error::NotAdmissible(format!(
                "({}, {}) is not represented by mu + L ({rep:?})",
                pair.m, pair.mu
            )));
        }
        for &p in &self.primes {
            let o = ord_p(&pair.m, p);
            if o > bound {
                return Err(Error::NotAdmissible(format!("ord_{p}({}) = {o} exceeds A = {bound}", pair.m)));
            }
        }
        Ok(())
    }

    /// Ratios `(-1)^(b-/2) e(m, mu) / m^(kappa - 1 - eps)` with their running minimum.
    pub fn lower_bound_report(&self, pairs: &[CosetValue], bound: i64, eps: f64, radius: i64) -> Result<LowerBoundReport> {
        let exponent = (self.kappa2 as f64) / 2.0 - 1.0 - if self.hecke_trick_flag() { eps } else { 0.0 };
        let mut rows = Vec::new();
        let mut running_min = Vec::new();
        let mut cur = f64::INFINITY;
        for pair in pairs {
            self.check_admissible_pair(pair, bound, radius)?;
            let e = self.coefficient(&pair.m, pair.mu)?;
            let signed = &e * rint(self.bminus_sign() as i64);
            let mf = pair.m.numer().to_f64().unwrap() / pair.m.denom().to_f64().unwrap();
            let ef = signed.numer().to_f64().unwrap() / signed.denom().to_f64().unwrap();
            let ratio = ef / mf.powf(exponent);
            if !signed.is_positive() {
                return Err(Error::PositivityViolation(format!(
                    "(-1)^(b-/2) e({}, {}) = {signed} is not positive",
                    pair.m, pair.mu
                )));
            }
            cur = cur.min(ratio);
            running_min.push(cur);
            rows.push(LowerBoundRow { m: crate::num::fmt_rational(&pair.m), mu: pair.mu, coefficient: crate::num::fmt_rational(&e), ratio });
        }
        Ok(LowerBoundReport { exponent, rows, running_min, all_positive: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::coset_value_counts;
    use crate::lattice::standard::{dn_gram, e8, fixture_12_2};
    use crate::num::rat;

    fn theta_counts(l: &EvenLattice, mu: usize, bound: i64) -> std::collections::BTreeMap<Rational, u64> {
        coset_value_counts(l.gram(), &l.disc().element(mu).rep, &rat(bound, 1))
    }

    #[test]
    fn e8_siegel_weil() {
        let l = e8();
        let ctx = EisensteinContext::new(&l).unwrap();
        let counts = theta_counts(&l, 0, 4);
        for m in 1..=4 {
            let e = ctx.coefficient(&rat(m, 1), 0).unwrap();
            assert_eq!(e, rat(counts[&rat(m, 1)] as i64, 1), "m={m}");
        }
        assert_eq!(ctx.coefficient(&rat(1, 1), 0).unwrap(), rat(240, 1));
        assert_eq!(ctx.coefficient(&rat(0, 1), 0).unwrap(), rat(1, 1));
    }

    #[test]
    fn d5_odd_rank_matches_theta() {
        let l = EvenLattice::new(dn_gram(5)).unwrap();
        let ctx = EisensteinContext::new(&l).unwrap();
        for mu in 0..l.disc().order() {
            let counts = theta_counts(&l, mu, 3);
            for (m, c) in counts {
                if m.is_zero() {
                    continue;
                }
                let (e, path) = ctx.coefficient_with_path(&m, mu).unwrap();
                assert_eq!(path, EvalPath::Exact);
                assert_eq!(e, rat(c as i64, 1), "mu={mu} m={m}");
            }
        }
    }

    #[test]
    fn printed_odd_sign_is_not_rational() {
        let l = EvenLattice::new(dn_gram(5)).unwrap();
        let opts = EisOptions { odd_sign: OddRankCharacterSign::AsPrinted, prec_bits: 128, ..Default::default() };
        let ctx = EisensteinContext::with_options(&l, opts).unwrap();
        assert!(matches!(ctx.coefficient(&rat(1, 1), 0), Err(Error::NonRationalResidue(_))));
    }

    #[test]
    fn interval_path_agrees() {
        for gram in [dn_gram(5), crate::lattice::standard::d4_gram()] {
            let l = EvenLattice::new(gram).unwrap();
            let ex = EisensteinContext::new(&l).unwrap();
            let opts = EisOptions { force_interval: true, ..Default::default() };
            let iv = EisensteinContext::with_options(&l, opts).unwrap();
            for (m, mu) in ex.index_set(&rat(3, 1)) {
                if m.is_zero() {
                    continue;
                }
                let (a, pa) = ex.coefficient_with_path(&m, mu).unwrap();
                let (b, pb) = iv.coefficient_with_path(&m, mu).unwrap();
                assert_eq!((pa, pb), (EvalPath::Exact, EvalPath::Interval));
                assert_eq!(a, b, "m={m} mu={mu}");
            }
        }
    }

    #[test]
    fn fixture_rational_and_signed() {
        let l = fixture_12_2();
        let ctx = EisensteinContext::new(&l).unwrap();
        assert_eq!(ctx.coefficient_sign(), -1);
        let ex = ctx.expansion(&rat(2, 1)).unwrap();
        assert!(!ex.hecke_trick_flag);
        let d = l.disc();
        for (e, mu, c) in ex.series.iter() {
            if e.is_zero() {
                continue;
            }
            assert!(!c.is_positive(), "e({e},{mu}) = {c}");
            assert_eq!(ex.series.get(&e, d.neg(mu)).unwrap(), c.clone());
        }
        assert!(ex.series.get(&rat(1, 1), 0).unwrap().is_negative());
    }

    #[test]
    fn kappa_two_flag_and_errors() {
        let l = EvenLattice::new(crate::lattice::standard::d4_gram()).unwrap();
        let ctx = EisensteinContext::new(&l).unwrap();
        assert!(ctx.hecke_trick_flag());
        assert!(matches!(EisensteinContext::new(&EvenLattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap()), Err(Error::KappaTooSmall(_))));
        // D4 is a single-class genus too: theta coefficient r(1) = 24
        assert_eq!(ctx.coefficient(&rat(1, 1), 0).unwrap(), rat(24, 1));
    }
}
