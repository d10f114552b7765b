//! Even lattices, their discriminant forms, and coset representability.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::localdata::{self, CountConfig, JordanBlockDecomposition};
use crate::matrix;
use crate::num::{frac, is_integer, lcm_u64, prime_divisors, rat, rint, Rational};

pub mod standard;

/// A vector of `L'` written as `num / den` in the lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualVector {
    pub num: Vec<i64>,
    pub den: i64,
}

/// One element of `L'/L`.
#[derive(Debug, Clone)]
pub struct DiscElement {
    /// Residues against the Smith generators.
    pub residues: Vec<u64>,
    /// Representative with coordinates in `[0, 1)`.
    pub rep: DualVector,
    /// `Q(rep)` mod 1, in `[0, 1)`.
    pub q: Rational,
    /// `Q(rep)` exactly.
    pub q_raw: Rational,
    /// `gram * rep`, an integer vector since `rep` lies in the dual.
    pub gram_rep: Vec<i64>,
    pub order: u64,
}

/// The finite quadratic module `L'/L` with `Q` valued in `Q/Z`.
#[derive(Debug, Clone)]
pub struct DiscriminantForm {
    gram: Vec<Vec<i64>>,
    invariants: Vec<u64>,
    generators: Vec<DualVector>,
    elements: Vec<DiscElement>,
}

impl DiscriminantForm {
    fn build(gram: &[Vec<i64>], invariants: Vec<u64>, generators: Vec<DualVector>) -> Result<Self> {
        let n = gram.len();
        let exponent = invariants.iter().fold(1u64, |a, &b| lcm_u64(a, b)) as i64;
        let order: u64 = invariants.iter().product();
        let mut elements = Vec::with_capacity(order as usize);
        for idx in 0..order {
            let mut residues = vec![0u64; invariants.len()];
            let mut rest = idx;
            for (k, &d) in invariants.iter().enumerate().rev() {
                residues[k] = rest % d;
                rest /= d;
            }
            let mut num = vec![0i64; n];
            for (k, g) in generators.iter().enumerate() {
                let scale = exponent / g.den * residues[k] as i64;
                for i in 0..n {
                    num[i] += g.num[i] * scale;
                }
            }
            for x in num.iter_mut() {
                *x = x.rem_euclid(exponent);
            }
            let rep = DualVector { num, den: exponent };
            let gram_rep = dual_image(gram, &rep)?;
            let q_raw = quad_value(gram, &rep);
            let el_order = invariants
                .iter()
                .zip(&residues)
                .fold(1u64, |acc, (&d, &a)| lcm_u64(acc, d / d.gcd(&a)));
            elements.push(DiscElement { residues, q: frac(&q_raw), q_raw, rep, gram_rep, order: el_order });
        }
        Ok(DiscriminantForm { gram: gram.to_vec(), invariants, generators, elements })
    }

    /// Same group with `Q` replaced by `-Q`.
    pub fn negated(&self) -> Self {
        let gram: Vec<Vec<i64>> = self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let elements = self
            .elements
            .iter()
            .map(|e| DiscElement {
                residues: e.residues.clone(),
                rep: e.rep.clone(),
                q: frac(&-e.q_raw.clone()),
                q_raw: -e.q_raw.clone(),
                gram_rep: e.gram_rep.iter().map(|x| -x).collect(),
                order: e.order,
            })
            .collect();
        DiscriminantForm {
            gram,
            invariants: self.invariants.clone(),
            generators: self.generators.clone(),
            elements,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn generators(&self) -> &[DualVector] {
        &self.generators
    }

    pub fn elements(&self) -> &[DiscElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &DiscElement {
        &self.elements[i]
    }

    pub fn q(&self, i: usize) -> &Rational {
        &self.elements[i].q
    }

    pub fn elem_order(&self, i: usize) -> u64 {
        self.elements[i].order
    }

    pub fn index_of(&self, residues: &[u64]) -> Option<usize> {
        if residues.len() != self.invariants.len() {
            return None;
        }
        let mut idx = 0u64;
        for (&a, &d) in residues.iter().zip(&self.invariants) {
            if a >= d {
                return None;
            }
            idx = idx * d + a;
        }
        Some(idx as usize)
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let r: Vec<u64> = self.elements[i]
            .residues
            .iter()
            .zip(&self.elements[j].residues)
            .zip(&self.invariants)
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        self.index_of(&r).unwrap()
    }

    pub fn neg(&self, i: usize) -> usize {
        let r: Vec<u64> = self.elements[i]
            .residues
            .iter()
            .zip(&self.invariants)
            .map(|(a, d)| (d - a) % d)
            .collect();
        self.index_of(&r).unwrap()
    }

    /// `(mu, nu)` mod 1.
    pub fn bilinear(&self, i: usize, j: usize) -> Rational {
        let a = &self.elements[i].rep;
        let b = &self.elements[j].rep;
        let mut s = BigInt::zero();
        for (k, &x) in a.num.iter().enumerate() {
            s += BigInt::from(x) * BigInt::from(self.elements[j].gram_rep[k]);
        }
        let _ = b;
        frac(&Rational::new(s, BigInt::from(a.den)))
    }

    /// Smallest `N` with `N Q(mu) in Z` for every element.
    pub fn level(&self) -> u64 {
        let mut level = 1u64;
        let k = self.generators.len();
        for i in 0..k {
            let gi = self.generator_index(i);
            level = lcm_u64(level, self.elements[gi].q.denom().to_u64().unwrap());
            for j in i + 1..k {
                let gj = self.generator_index(j);
                level = lcm_u64(level, self.bilinear(gi, gj).denom().to_u64().unwrap());
            }
        }
        level
    }

    fn generator_index(&self, k: usize) -> usize {
        let mut r = vec![0u64; self.invariants.len()];
        r[k] = 1;
        self.index_of(&r).unwrap()
    }
}

fn dual_image(gram: &[Vec<i64>], v: &DualVector) -> Result<Vec<i64>> {
    gram.iter()
        .map(|row| {
            let s: i128 = row.iter().zip(&v.num).map(|(&a, &b)| a as i128 * b as i128).sum();
            if s % v.den as i128 != 0 {
                return Err(Error::Internal("generator is not a dual vector".into()));
            }
            i64::try_from(s / v.den as i128).map_err(|_| Error::Overflow("dual image"))
        })
        .collect()
}

fn quad_value(gram: &[Vec<i64>], v: &DualVector) -> Rational {
    let mut s = BigInt::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            s += BigInt::from(v.num[i]) * BigInt::from(g) * BigInt::from(v.num[j]);
        }
    }
    Rational::new(s, BigInt::from(2) * BigInt::from(v.den) * BigInt::from(v.den))
}

/// Which quadratic form a coset value refers to: `Q` of the lattice, or `-Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CosetSign {
    Plus,
    Minus,
}

/// A pair `(m, mu)` with `m = ±Q(mu)` mod 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetValue {
    pub m: Rational,
    pub mu: usize,
    pub sign: CosetSign,
}

/// Outcome of a representability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Represented,
    /// Certified: a local or archimedean obstruction, or an exhausted complete search.
    NotRepresented,
    /// The bounded search found nothing; no certificate either way.
    NotFoundWithinBound,
}

impl Representation {
    pub fn decided(self) -> Option<bool> {
        match self {
            Representation::Represented => Some(true),
            Representation::NotRepresented => Some(false),
            Representation::NotFoundWithinBound => None,
        }
    }
}

/// Lower bound for the Witt rank, exact when certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WittRank {
    pub lower: usize,
    pub exact: bool,
}

/// An even lattice given by its integral Gram matrix.
#[derive(Debug, Clone)]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
    sig_pos: usize,
    sig_neg: usize,
    det: BigInt,
    level: u64,
    disc: Arc<DiscriminantForm>,
    jordan_cache: Arc<Mutex<HashMap<u64, Arc<JordanBlockDecomposition>>>>,
}

impl EvenLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::NotEven(i));
            }
        }
        let det = matrix::det_bareiss(&gram);
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let (sig_pos, sig_neg) = matrix::signature(&gram);
        let (_, d, v) = matrix::smith_normal_form(&gram);
        let mut invariants = Vec::new();
        let mut generators = Vec::new();
        for (i, di) in d.iter().enumerate() {
            let di = di.to_u64().ok_or(Error::Overflow("invariant factor"))?;
            if di == 1 {
                continue;
            }
            let num = v
                .iter()
                .map(|row| row[i].to_i64().ok_or(Error::Overflow("smith transform")))
                .collect::<Result<Vec<_>>>()?;
            invariants.push(di);
            generators.push(DualVector { num, den: di as i64 });
        }
        let disc = DiscriminantForm::build(&gram, invariants, generators)?;
        if BigInt::from(disc.order()) != det.abs() {
            return Err(Error::Internal("discriminant group order differs from |det|".into()));
        }
        let level = disc.level();
        Ok(EvenLattice {
            gram,
            sig_pos,
            sig_neg,
            det,
            level,
            disc: Arc::new(disc),
            jordan_cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    /// The lattice `(L, -Q)` sharing this lattice's element enumeration.
    pub fn negated(&self) -> Self {
        let gram: Vec<Vec<i64>> = self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let det = if self.rank() % 2 == 0 { self.det.clone() } else { -self.det.clone() };
        EvenLattice {
            gram,
            sig_pos: self.sig_neg,
            sig_neg: self.sig_pos,
            det,
            level: self.level,
            disc: Arc::new(self.disc.negated()),
            jordan_cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn direct_sum(&self, other: &EvenLattice) -> Result<Self> {
        EvenLattice::new(standard::block_sum(&[self.gram.clone(), other.gram.clone()]))
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }
    pub fn rank(&self) -> usize {
        self.gram.len()
    }
    pub fn signature(&self) -> (usize, usize) {
        (self.sig_pos, self.sig_neg)
    }
    pub fn det(&self) -> &BigInt {
        &self.det
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn disc(&self) -> &DiscriminantForm {
        &self.disc
    }
    pub fn disc_arc(&self) -> Arc<DiscriminantForm> {
        self.disc.clone()
    }
    pub fn is_indefinite(&self) -> bool {
        self.sig_pos > 0 && self.sig_neg > 0
    }

    /// Primes dividing `2N`.
    pub fn bad_primes(&self) -> Vec<u64> {
        prime_divisors(2 * self.level)
    }

    /// Exact `Q(x)` for an integer vector.
    pub fn q_int(&self, x: &[i64]) -> i64 {
        let mut s = 0i64;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                s += x[i] * g * x[j];
            }
        }
        s / 2
    }

    pub(crate) fn jordan(&self, p: u64) -> Arc<JordanBlockDecomposition> {
        if let Some(j) = self.jordan_cache.lock().unwrap().get(&p) {
            return j.clone();
        }
        // computed outside the lock; concurrent duplicates are identical
        let j = Arc::new(localdata::jordan_exact(self, p));
        self.jordan_cache.lock().unwrap().entry(p).or_insert(j).clone()
    }

    /// Checks `m = ±Q(mu)` mod 1.
    pub fn check_coset(&self, m: &Rational, mu: usize, sign: CosetSign) -> Result<()> {
        if mu >= self.disc.order() {
            return Err(Error::InvalidInput(format!("element index {mu} out of range")));
        }
        let q = match sign {
            CosetSign::Plus => self.disc.q(mu).clone(),
            CosetSign::Minus => -self.disc.q(mu).clone(),
        };
        if !is_integer(&(m - q)) {
            return Err(Error::CosetMismatch(format!(
                "m = {m} is not congruent to {}Q(mu) = {} mod 1",
                if sign == CosetSign::Minus { "-" } else { "" },
                self.disc.q(mu)
            )));
        }
        Ok(())
    }

    /// Does `mu + L` contain a vector `lambda` with `±Q(lambda) = m`?
    ///
    /// Indefinite lattices of rank at least 4 are decided by the local counts at
    /// the Hensel exponent for every `p | 2N`. Smaller or definite lattices fall back to
    /// a search over coefficient vectors of sup-norm at most `radius`.
    pub fn coset_represents(
        &self,
        m: &Rational,
        mu: usize,
        sign: CosetSign,
        radius: i64,
    ) -> Result<Representation> {
        self.check_coset(m, mu, sign)?;
        if sign == CosetSign::Minus {
            return self.negated().coset_represents(m, mu, CosetSign::Plus, radius);
        }
        if m.is_zero() && mu == 0 {
            return Ok(Representation::Represented);
        }
        if (m.is_positive() && self.sig_pos == 0) || (m.is_negative() && self.sig_neg == 0) {
            return Ok(Representation::NotRepresented);
        }
        if !m.is_zero() {
            for p in self.bad_primes() {
                let w = localdata::w_p(self, m, mu, p)?;
                let c = localdata::count(self, m, mu, crate::num::pow_u64(p, w), &CountConfig::default())?;
                if c.count.is_zero() {
                    return Ok(Representation::NotRepresented);
                }
            }
            if self.is_indefinite() && self.rank() >= 4 {
                return Ok(Representation::Represented);
            }
        }
        self.bounded_search(m, mu, radius)
    }

    fn bounded_search(&self, m: &Rational, mu: usize, radius: i64) -> Result<Representation> {
        let rep = &self.disc.element(mu).rep;
        if !self.is_indefinite() {
            let (flip, target) = if self.sig_pos > 0 { (1, m.clone()) } else { (-1, -m.clone()) };
            let gram: Vec<Vec<i64>> =
                self.gram.iter().map(|r| r.iter().map(|x| flip * x).collect()).collect();
            let max_abs = crate::enumerate::coordinate_bound(&gram, &target);
            let found = crate::enumerate::coset_vectors_with_norm(&gram, rep, &target)
                .into_iter()
                .any(|x| x.iter().all(|c| c.abs() <= radius));
            return Ok(if found {
                Representation::Represented
            } else if max_abs.iter().all(|&b| b <= radius) {
                Representation::NotRepresented
            } else {
                Representation::NotFoundWithinBound
            });
        }
        let n = self.rank();
        let mut x = vec![-radius; n];
        loop {
            if self.coset_q(rep, &x) == *m {
                return Ok(Representation::Represented);
            }
            let mut k = 0;
            loop {
                if k == n {
                    return Ok(Representation::NotFoundWithinBound);
                }
                x[k] += 1;
                if x[k] <= radius {
                    break;
                }
                x[k] = -radius;
                k += 1;
            }
        }
    }

    /// `Q(rep + x)` for an integer shift `x`.
    pub fn coset_q(&self, rep: &DualVector, x: &[i64]) -> Rational {
        let v: Vec<i64> = rep.num.iter().zip(x).map(|(&a, &b)| a + b * rep.den).collect();
        quad_value(&self.gram, &DualVector { num: v, den: rep.den })
    }

    /// `t_mu = min{-Q(lambda) > 0 : lambda in mu + L}` for a lattice of signature `(n, 2)`.
    pub fn t_mu(&self, mu: usize, radius: i64) -> Result<Rational> {
        if self.sig_neg != 2 || self.sig_pos == 0 {
            return Err(Error::InvalidInput("t_mu needs signature (n, 2) with n >= 1".into()));
        }
        let minus = self.negated();
        let start = frac(&-self.disc.q(mu).clone());
        let mut v = if start.is_zero() { Rational::one() } else { start };
        for _ in 0..256 {
            match minus.coset_represents(&v, mu, CosetSign::Plus, radius)? {
                Representation::Represented => return Ok(v),
                Representation::NotRepresented => v += Rational::one(),
                Representation::NotFoundWithinBound => {
                    return Err(Error::InconclusiveBoundedSearch(format!(
                        "value {v} on coset {mu} undecided within radius {radius}"
                    )))
                }
            }
        }
        Err(Error::InconclusiveBoundedSearch(format!("no value found for coset {mu}")))
    }

    /// `T = max_mu t_mu`.
    pub fn t_max(&self, radius: i64) -> Result<Rational> {
        let mut best = Rational::zero();
        for mu in 0..self.disc.order() {
            best = best.max(self.t_mu(mu, radius)?);
        }
        Ok(best)
    }

    /// Searches vectors of sup-norm at most `radius` for totally isotropic sublattices.
    pub fn witt_rank_bounded(&self, radius: i64) -> WittRank {
        let cap = self.sig_pos.min(self.sig_neg);
        if cap == 0 {
            return WittRank { lower: 0, exact: true };
        }
        let n = self.rank();
        let mut isotropic: Vec<Vec<i64>> = Vec::new();
        let total = (2 * radius + 1).checked_pow(n as u32).unwrap_or(i64::MAX);
        const VECTOR_CAP: i64 = 4_000_000;
        const KEEP: usize = 400;
        if total <= VECTOR_CAP {
            let mut x = vec![-radius; n];
            'outer: loop {
                let first = x.iter().find(|&&c| c != 0).copied();
                if first.map_or(false, |c| c > 0) && gcd_vec(&x) == 1 && self.q_int(&x) == 0 {
                    isotropic.push(x.clone());
                    if isotropic.len() >= KEEP {
                        break;
                    }
                }
                let mut k = 0;
                loop {
                    if k == n {
                        break 'outer;
                    }
                    x[k] += 1;
                    if x[k] <= radius {
                        break;
                    }
                    x[k] = -radius;
                    k += 1;
                }
            }
        }
        let mut best = 0;
        let mut chosen: Vec<usize> = Vec::new();
        self.extend_isotropic(&isotropic, 0, &mut chosen, &mut best, cap);
        WittRank { lower: best, exact: best == cap }
    }

    fn extend_isotropic(
        &self,
        vs: &[Vec<i64>],
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut usize,
        cap: usize,
    ) {
        *best = (*best).max(chosen.len());
        if *best == cap {
            return;
        }
        for i in start..vs.len() {
            let ok = chosen.iter().all(|&j| self.bilinear_int(&vs[i], &vs[j]) == 0);
            if !ok {
                continue;
            }
            let mut rows: Vec<Vec<Rational>> =
                chosen.iter().map(|&j| vs[j].iter().map(|&c| rint(c)).collect()).collect();
            rows.push(vs[i].iter().map(|&c| rint(c)).collect());
            if matrix::rank(&rows) != rows.len() {
                continue;
            }
            chosen.push(i);
            self.extend_isotropic(vs, i + 1, chosen, best, cap);
            chosen.pop();
            if *best == cap {
                return;
            }
        }
    }

    pub fn bilinear_int(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                s += x[i] * g * y[j];
            }
        }
        s
    }
}

fn gcd_vec(x: &[i64]) -> i64 {
    x.iter().fold(0i64, |a, &b| a.gcd(&b))
}

/// `-Q(mu)` brought into `(0, 1]`.
pub fn smallest_positive_in_class(q: &Rational) -> Rational {
    let f = frac(q);
    if f.is_zero() {
        rat(1, 1)
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;

    #[test]
    fn hyperbolic_plane_metadata() {
        let l = EvenLattice::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(l.rank(), 2);
        assert_eq!(l.signature(), (1, 1));
        assert_eq!(*l.det(), BigInt::from(-1));
        assert_eq!(l.level(), 1);
        assert_eq!(l.disc().order(), 1);
    }

    #[test]
    fn rank_one_metadata() {
        let l = EvenLattice::new(vec![vec![2]]).unwrap();
        assert_eq!(l.signature(), (1, 0));
        assert_eq!(*l.det(), BigInt::from(2));
        assert_eq!(l.level(), 4);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(EvenLattice::new(vec![vec![1, 0], vec![0, 1]]), Err(Error::NotEven(0))));
        assert!(matches!(EvenLattice::new(vec![vec![2, 1], vec![0, 2]]), Err(Error::NotSymmetric)));
        assert!(matches!(EvenLattice::new(vec![vec![2, 2], vec![2, 2]]), Err(Error::Singular)));
        assert!(matches!(EvenLattice::new(vec![vec![2, 2]]), Err(Error::NotSquare)));
    }

    #[test]
    fn discriminant_forms() {
        let l = EvenLattice::new(vec![vec![-2]]).unwrap();
        assert_eq!(l.disc().order(), 2);
        assert_eq!(*l.disc().q(1), rat(3, 4));
        let e8 = EvenLattice::new(e8_gram()).unwrap();
        assert_eq!(e8.disc().order(), 1);
        assert_eq!(e8.level(), 1);
        let d4 = EvenLattice::new(d4_gram()).unwrap();
        assert_eq!(d4.disc().order(), 4);
        assert_eq!(d4.level(), 2);
        let nonzero: Vec<_> = (1..4).map(|i| d4.disc().q(i).clone()).collect();
        assert!(nonzero.iter().all(|q| *q == rat(1, 2)));
    }

    #[test]
    fn fixture_lattice_invariants() {
        let l = fixture_12_2();
        assert_eq!(l.signature(), (12, 2));
        assert_eq!(*l.det(), BigInt::from(16));
        assert_eq!(l.level(), 4);
        let d = l.disc();
        for i in 0..d.order() {
            for j in 0..d.order() {
                let lhs = frac(&(d.q(d.add(i, j)) - d.q(i) - d.q(j)));
                assert_eq!(lhs, d.bilinear(i, j));
            }
            assert_eq!(d.elem_order(i) == 1, i == 0);
        }
    }

    #[test]
    fn coset_representation() {
        let l = EvenLattice::new(block_sum(&[u_gram(), vec![vec![-2]]])).unwrap();
        let r = l.coset_represents(&rat(1, 1), 0, CosetSign::Minus, 3).unwrap();
        assert_eq!(r, Representation::Represented);
        assert!(matches!(
            l.coset_represents(&rat(1, 2), 0, CosetSign::Plus, 3),
            Err(Error::CosetMismatch(_))
        ));
        let e8 = EvenLattice::new(e8_gram()).unwrap();
        let r = e8.coset_represents(&rat(1, 1), 0, CosetSign::Plus, 3).unwrap();
        assert_eq!(r, Representation::Represented);
        let r = e8.coset_represents(&rat(3, 1), 0, CosetSign::Plus, 0).unwrap();
        assert_eq!(r, Representation::NotFoundWithinBound);
        // x^2 + 14y^2 shares its genus with 2x^2 + 7y^2, which represents 2
        let f = EvenLattice::new(vec![vec![2, 0], vec![0, 28]]).unwrap();
        let r = f.coset_represents(&rat(2, 1), 0, CosetSign::Plus, 10).unwrap();
        assert_eq!(r, Representation::NotRepresented);
        let r = f.coset_represents(&rat(3, 1), 0, CosetSign::Plus, 10).unwrap();
        assert_eq!(r, Representation::NotRepresented);
        let r = f.coset_represents(&rat(15, 1), 0, CosetSign::Plus, 10).unwrap();
        assert_eq!(r, Representation::Represented);
        let r = e8.coset_represents(&rat(2, 1), 0, CosetSign::Plus, 3).unwrap();
        assert_eq!(r, Representation::Represented);
        let r = e8.coset_represents(&rat(-1, 1), 0, CosetSign::Plus, 3).unwrap();
        assert_eq!(r, Representation::NotRepresented);
    }

    #[test]
    fn t_values() {
        let l = EvenLattice::new(block_sum(&[u_gram(), vec![vec![-2]]])).unwrap();
        assert_eq!(l.disc().order(), 2);
        assert_eq!(l.t_mu(0, 4).unwrap(), rat(1, 1));
        assert_eq!(l.t_mu(1, 4).unwrap(), rat(1, 4));
        assert_eq!(l.t_max(4).unwrap(), rat(1, 1));
        let un = EvenLattice::new(block_sum(&[u_gram(), u_gram(), e8_gram()]).iter().map(|r| r.iter().map(|x| -x).collect()).collect());
        // signature (2, 10) negated back to (10, 2)
        let un = un.unwrap().negated();
        assert_eq!(un.signature(), (10, 2));
        assert_eq!(un.t_mu(0, 2).unwrap(), rat(1, 1));
    }

    #[test]
    fn witt_ranks() {
        let e8 = EvenLattice::new(e8_gram()).unwrap();
        assert_eq!(e8.witt_rank_bounded(1), WittRank { lower: 0, exact: true });
        let uu = EvenLattice::new(block_sum(&[u_gram(), u_gram()])).unwrap();
        assert_eq!(uu.witt_rank_bounded(1), WittRank { lower: 2, exact: true });
        let aniso = EvenLattice::new(vec![
            vec![2, 0, 0, 0],
            vec![0, 2, 0, 0],
            vec![0, 0, -6, 0],
            vec![0, 0, 0, -6],
        ])
        .unwrap();
        let w = aniso.witt_rank_bounded(2);
        assert!(!w.exact);
        assert_eq!(w.lower, 0);
    }
}
