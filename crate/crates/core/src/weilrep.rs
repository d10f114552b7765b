//! The Weil representation on `C[L'/L]` in exact cyclotomic arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cyclotomic::Cyclotomic;
use crate::lattice::DiscriminantForm;
use crate::matrix::kernel;
use crate::num::{lcm_u64, Rational};

pub type CycMatrix = Vec<Vec<Cyclotomic>>;

#[derive(Clone, Debug)]
pub struct WeilMatrices {
    pub order: u64,
    /// `b+ - b-`.
    pub signature: i64,
    /// Diagonal of `rho(T)`.
    pub t: Vec<Cyclotomic>,
    /// `rho(S)`, column `mu` is the image of `e_mu`.
    pub s: CycMatrix,
    /// Index of `-mu`.
    pub neg: Vec<usize>,
}

fn exp_index(x: &Rational, order: u64) -> i64 {
    let v = x * Rational::from_integer(BigInt::from(order));
    assert!(v.is_integer(), "root of unity e({x}) is not in Q(zeta_{order})");
    use num_traits::ToPrimitive;
    v.to_integer().to_i64().unwrap()
}

/// `rho_L(T)` and `rho_L(S)` for a discriminant form of signature `(b+, b-)`.
pub fn weil_matrices(disc: &DiscriminantForm, signature: (usize, usize)) -> WeilMatrices {
    let n = disc.order();
    let abs_d = n as u64;
    let order = lcm_u64(lcm_u64(8, disc.level().max(1)), 4 * abs_d);
    let sig = signature.0 as i64 - signature.1 as i64;
    let t = (0..n).map(|mu| Cyclotomic::root(order, exp_index(disc.q(mu), order))).collect();
    // e(-sig/8) / sqrt|D| = e(-sig/8) sqrt|D| / |D|
    let root = Cyclotomic::sqrt(order, abs_d).expect("sqrt|D| lies in Q(zeta_M)");
    let eighth = Cyclotomic::root(order, -sig * order as i64 / 8);
    let pref = (&eighth * &root).scale(&Rational::new(BigInt::one(), BigInt::from(abs_d)));
    let mut s = vec![vec![Cyclotomic::zero(order); n]; n];
    for nu in 0..n {
        for mu in nu..n {
            let e = Cyclotomic::root(order, -exp_index(&disc.bilinear(mu, nu), order));
            let v = &pref * &e;
            s[nu][mu] = v.clone();
            s[mu][nu] = v;
        }
    }
    let neg = (0..n).map(|mu| disc.neg(mu)).collect();
    WeilMatrices { order, signature: sig, t, s, neg }
}

fn mat_mul(a: &CycMatrix, b: &CycMatrix, order: u64) -> CycMatrix {
    let n = a.len();
    let mut out = vec![vec![Cyclotomic::zero(order); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

impl WeilMatrices {
    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn t_matrix(&self) -> CycMatrix {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { self.t[i].clone() } else { Cyclotomic::zero(self.order) }).collect())
            .collect()
    }

    fn scalar_perm(&self, c: &Cyclotomic, perm: Option<&[usize]>) -> CycMatrix {
        let n = self.dim();
        let mut out = vec![vec![Cyclotomic::zero(self.order); n]; n];
        for mu in 0..n {
            let row = perm.map(|p| p[mu]).unwrap_or(mu);
            out[row][mu] = c.clone();
        }
        out
    }

    /// Checks symmetry and unitarity of `S`, `S^2 = e(-sig/4) (mu -> -mu)`,
    /// `(ST)^3 = S^2` and `S^4 = (-1)^sig`.
    pub fn verify_relations(&self) -> bool {
        let n = self.dim();
        let m = self.order;
        let s = &self.s;
        for i in 0..n {
            for j in 0..n {
                if s[i][j] != s[j][i] {
                    return false;
                }
            }
        }
        let conj_t: CycMatrix = (0..n).map(|i| (0..n).map(|j| s[j][i].conj()).collect()).collect();
        if mat_mul(s, &conj_t, m) != self.scalar_perm(&Cyclotomic::one(m), None) {
            return false;
        }
        let s2 = mat_mul(s, s, m);
        let z = Cyclotomic::root(m, -self.signature * m as i64 / 4);
        if s2 != self.scalar_perm(&z, Some(&self.neg)) {
            return false;
        }
        let st = mat_mul(s, &self.t_matrix(), m);
        let st3 = mat_mul(&mat_mul(&st, &st, m), &st, m);
        if st3 != s2 {
            return false;
        }
        let sign = if self.signature.rem_euclid(2) == 0 { 1 } else { -1 };
        let s4 = mat_mul(&s2, &s2, m);
        s4 == self.scalar_perm(&Cyclotomic::from_rational(m, &Rational::from_integer(BigInt::from(sign))), None)
    }

    /// Q-basis of rational vectors fixed by `T` and `S`.
    pub fn invariants(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let one = Cyclotomic::one(self.order);
        for mu in 0..n {
            // T e_mu = t_mu e_mu: rational v needs v_mu = 0 unless t_mu = 1
            if self.t[mu] != one {
                let mut r = vec![Rational::zero(); n];
                r[mu] = Rational::one();
                rows.push(r);
            }
            // row mu of S - I, split into rational coordinates
            let entries: Vec<Vec<Rational>> = (0..n)
                .map(|nu| {
                    let e = if mu == nu { &self.s[mu][nu] - &one } else { self.s[mu][nu].clone() };
                    e.coords()
                })
                .collect();
            let k = entries[0].len();
            for c in 0..k {
                let r: Vec<Rational> = (0..n).map(|nu| entries[nu][c].clone()).collect();
                if r.iter().any(|x| !x.is_zero()) {
                    rows.push(r);
                }
            }
        }
        if rows.is_empty() {
            return (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        }
        kernel(&rows, n)
    }

    /// Does `v` satisfy `T v = v` and `S v = v` exactly?
    pub fn is_invariant(&self, v: &[Rational]) -> bool {
        let n = self.dim();
        let m = self.order;
        for mu in 0..n {
            let vm = Cyclotomic::from_rational(m, &v[mu]);
            if &self.t[mu] * &vm != vm {
                return false;
            }
            let mut acc = Cyclotomic::zero(m);
            for nu in 0..n {
                acc = &acc + &(&self.s[mu][nu] * &Cyclotomic::from_rational(m, &v[nu]));
            }
            if acc != vm {
                return false;
            }
        }
        true
    }
}

#[derive(Serialize)]
pub struct WeilDoc {
    pub order: u64,
    pub signature: i64,
    pub t: Vec<Vec<String>>,
    pub s: Vec<Vec<Vec<String>>>,
}

/// Power-basis coordinates as `"p/q"` strings.
pub fn weil_doc(w: &WeilMatrices) -> WeilDoc {
    let f = |c: &Cyclotomic| c.coords().iter().map(crate::num::fmt_rational).collect::<Vec<_>>();
    WeilDoc {
        order: w.order,
        signature: w.signature,
        t: w.t.iter().map(f).collect(),
        s: w.s.iter().map(|r| r.iter().map(f).collect()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{standard, EvenLattice};

    fn lat(g: Vec<Vec<i64>>) -> EvenLattice {
        EvenLattice::new(g).unwrap()
    }

    fn weil(l: &EvenLattice) -> WeilMatrices {
        weil_matrices(l.disc(), l.signature())
    }

    #[test]
    fn trivial_disc() {
        let w = weil(&standard::e8());
        assert_eq!(w.dim(), 1);
        assert!(w.verify_relations());
        assert_eq!(w.invariants().len(), 1);
    }

    #[test]
    fn minus_two() {
        let l = lat(vec![vec![-2]]);
        let w = weil(&l);
        assert_eq!(w.t[0], Cyclotomic::one(w.order));
        assert_eq!(w.t[1], Cyclotomic::root(4, 3).embed(w.order));
        assert!(w.verify_relations());
        let mut bad = w.clone();
        bad.t[1] = Cyclotomic::root(4, 1).embed(w.order);
        assert!(!bad.verify_relations());
    }

    #[test]
    fn invariants_small_cases() {
        assert!(weil(&lat(vec![vec![2, 0], vec![0, 2]])).invariants().is_empty());
        let w = weil(&lat(vec![vec![-2, 0], vec![0, 2]]));
        let inv = w.invariants();
        assert_eq!(inv.len(), 1);
        assert!(w.is_invariant(&inv[0]));
        assert!(!inv[0][0].is_zero());
        // U + U(2): isotropic subgroups give invariants
        let u2 = lat(vec![vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 2], vec![0, 0, 2, 0]]);
        let w = weil(&u2);
        let inv = w.invariants();
        assert!(!inv.is_empty());
        assert!(inv.iter().all(|v| w.is_invariant(v)));
        assert!(inv.iter().any(|v| !v[0].is_zero()));
    }

    #[test]
    fn relations_on_small_discs() {
        let mut cases: Vec<Vec<Vec<i64>>> = Vec::new();
        for d in 1..=8i64 {
            cases.push(vec![vec![2 * d]]);
            cases.push(vec![vec![-2 * d]]);
        }
        cases.push(vec![vec![2, 1], vec![1, 2]]);
        cases.push(vec![vec![2, 1], vec![1, 4]]);
        cases.push(vec![vec![2, 0], vec![0, 4]]);
        cases.push(vec![vec![2, 0], vec![0, -6]]);
        cases.push(vec![vec![4, 0], vec![0, -4]]);
        cases.push(vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]]);
        cases.push(vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, -2]]);
        cases.push(vec![vec![2, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 0, 2]]);
        for g in cases {
            let l = lat(g.clone());
            assert!(l.disc().order() <= 16);
            let w = weil(&l);
            assert!(w.verify_relations(), "relations fail for {g:?}");
            for v in w.invariants() {
                assert!(w.is_invariant(&v));
            }
        }
        let d4 = EvenLattice::new(standard::d4_gram()).unwrap();
        assert!(weil(&d4).verify_relations());
        let f = standard::fixture_12_2();
        assert!(weil(&f).verify_relations());
    }
}
