//! Congruence representation numbers `N_{m,mu}(a)` and Hensel exponents.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::lattice::EvenLattice;
use crate::num::{factor, ord_p, pow_u64, rational_mod, Rational};

#[derive(Clone, Debug)]
pub struct CountConfig {
    /// Largest `a^rank` the naive loop is allowed to visit.
    pub naive_cap: u128,
    /// Run both evaluation paths when the naive one fits under `naive_cap`.
    pub cross_check: bool,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            naive_cap: 100_000_000,
            cross_check: std::env::var("BORCHERDS_CROSS_CHECK").map(|v| v == "1" || v == "true").unwrap_or(false),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Naive,
    Gauss,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepCount {
    pub m: Rational,
    pub mu: usize,
    pub modulus: u64,
    pub count: BigInt,
    pub method: CountMethod,
}

/// One Jordan constituent. `entries` is the bilinear block (1x1 or 2x2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanBlock {
    pub scale: u32,
    pub entries: Vec<Vec<Rational>>,
}

impl JordanBlock {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Clone, Debug)]
pub struct JordanBlockDecomposition {
    pub p: u64,
    /// 0 for the exact decomposition over `Z_(p)`.
    pub precision: u32,
    pub blocks: Vec<JordanBlock>,
    /// Columns are the new basis vectors; `basechange^T G basechange` is block diagonal.
    pub basechange: Vec<Vec<Rational>>,
}

impl JordanBlockDecomposition {
    pub fn max_scale(&self) -> u32 {
        self.blocks.iter().map(|b| b.scale).max().unwrap_or(0)
    }

    /// Block entries reduced to integers mod `p^precision`.
    pub fn reduced_blocks(&self) -> Vec<Vec<Vec<u64>>> {
        let modulus = pow_u64(self.p, self.precision);
        self.blocks
            .iter()
            .map(|b| {
                b.entries
                    .iter()
                    .map(|r| r.iter().map(|x| rational_mod(x, modulus).expect("p-integral")).collect())
                    .collect()
            })
            .collect()
    }
}

/// `1 + 2 ord_p(2 d_mu m)`.
pub fn w_p(lat: &EvenLattice, m: &Rational, mu: usize, p: u64) -> Result<u32> {
    if m.is_zero() {
        return Err(Error::InvalidInput("w_p needs m != 0".into()));
    }
    let d = lat.disc().elem_order(mu);
    let x = m * Rational::from_integer(BigInt::from(2 * d));
    let o = ord_p(&x, p);
    if o < 0 {
        return Err(Error::NegativeValuation(format!("ord_{p}(2 d_mu m) = {o} for m = {m}")));
    }
    Ok(1 + 2 * o as u32)
}

/// Integer data of the congruence `Q(r) + r.g + c = 0 (mod a)` equivalent to
/// `Q(r + mu) = m (mod a)`.
fn congruence_data(lat: &EvenLattice, m: &Rational, mu: usize) -> Result<(Vec<i64>, BigInt)> {
    let el = lat.disc().element(mu);
    let c = &el.q_raw - m;
    if !c.is_integer() {
        return Err(Error::CosetMismatch(format!("m = {m} is not congruent to Q(mu) = {} mod 1", el.q)));
    }
    Ok((el.gram_rep.clone(), c.to_integer()))
}

fn umod(x: &BigInt, a: u64) -> u64 {
    let r = x % BigInt::from(a);
    let r = if r.is_negative() { r + BigInt::from(a) } else { r };
    r.to_u64().unwrap()
}

/// Exhaustive loop over `L / aL`.
pub fn count_naive(lat: &EvenLattice, m: &Rational, mu: usize, a: u64, cap: u128) -> Result<RepCount> {
    let n = lat.rank();
    let needed = (a as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::BudgetExceeded { needed, cap });
    }
    let (g, c) = congruence_data(lat, m, mu)?;
    let count = if a == 1 {
        1u64
    } else {
        naive_loop(lat.gram(), &g, umod(&c, a), a)
    };
    Ok(RepCount { m: m.clone(), mu, modulus: a, count: BigInt::from(count), method: CountMethod::Naive })
}

fn naive_loop(gram: &[Vec<i64>], g: &[i64], c: u64, a: u64) -> u64 {
    let n = gram.len();
    let a128 = a as i128;
    let md = |x: i128| x.rem_euclid(a128);
    // per coordinate: increment of value is (G r)_i + G_ii/2 + g_i, then G r += G e_i
    let step0: Vec<i128> = (0..n).map(|i| md(gram[i][i] as i128 / 2 + g[i] as i128)).collect();
    let cols: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| md(gram[j][i] as i128)).collect()).collect();
    let mut r = vec![0u64; n];
    let mut gr = vec![0i128; n];
    let mut val = c as i128;
    let mut count = 0u64;
    loop {
        if val == 0 {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return count;
            }
            val += gr[k] + step0[k];
            if val >= a128 {
                val -= a128;
            }
            if val >= a128 {
                val -= a128;
            }
            for (x, y) in gr.iter_mut().zip(&cols[k]) {
                *x += y;
                if *x >= a128 {
                    *x -= a128;
                }
            }
            r[k] += 1;
            if r[k] < a {
                break;
            }
            r[k] = 0;
            k += 1;
        }
    }
}

fn val_or_max(x: &Rational, p: u64) -> i64 {
    if x.is_zero() {
        i64::MAX
    } else {
        ord_p(x, p)
    }
}

/// Exact Jordan splitting over `Z_(p)` by symmetric elimination with rational arithmetic.
pub fn jordan_exact(lat: &EvenLattice, p: u64) -> JordanBlockDecomposition {
    let n = lat.rank();
    let mut a: Vec<Vec<Rational>> = lat
        .gram()
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut b: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut blocks = Vec::new();
    let mut k = 0;
    while k < n {
        // minimal valuation in the trailing submatrix
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..n {
            for j in i..n {
                let v = val_or_max(&a[i][j], p);
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best.unwrap();
        if v == i64::MAX {
            // remaining form is zero; cannot happen for a nondegenerate lattice
            unreachable!("degenerate gram in jordan splitting");
        }
        if i == j {
            swap_basis(&mut a, &mut b, k, i);
            eliminate(&mut a, &mut b, k, 1);
            blocks.push(JordanBlock { scale: v as u32, entries: vec![vec![a[k][k].clone()]] });
            k += 1;
        } else if p != 2 {
            // e_i += e_j makes the diagonal carry the minimal valuation
            add_basis(&mut a, &mut b, i, j);
            swap_basis(&mut a, &mut b, k, i);
            eliminate(&mut a, &mut b, k, 1);
            blocks.push(JordanBlock { scale: v as u32, entries: vec![vec![a[k][k].clone()]] });
            k += 1;
        } else {
            swap_basis(&mut a, &mut b, k, i);
            let j = if j == k { i } else { j };
            swap_basis(&mut a, &mut b, k + 1, j);
            eliminate(&mut a, &mut b, k, 2);
            blocks.push(JordanBlock {
                scale: v as u32,
                entries: vec![
                    vec![a[k][k].clone(), a[k][k + 1].clone()],
                    vec![a[k + 1][k].clone(), a[k + 1][k + 1].clone()],
                ],
            });
            k += 2;
        }
    }
    JordanBlockDecomposition { p, precision: 0, blocks, basechange: b }
}

fn swap_basis(a: &mut [Vec<Rational>], b: &mut [Vec<Rational>], x: usize, y: usize) {
    if x == y {
        return;
    }
    a.swap(x, y);
    for row in a.iter_mut() {
        row.swap(x, y);
    }
    for row in b.iter_mut() {
        row.swap(x, y);
    }
}

/// Basis change `e_x <- e_x + e_y`.
fn add_basis(a: &mut [Vec<Rational>], b: &mut [Vec<Rational>], x: usize, y: usize) {
    add_multiple(a, b, x, y, &Rational::one());
}

/// Basis change `e_x <- e_x + c e_y`.
fn add_multiple(a: &mut [Vec<Rational>], b: &mut [Vec<Rational>], x: usize, y: usize, c: &Rational) {
    let n = a.len();
    for r in 0..n {
        let t = &a[r][y] * c;
        a[r][x] += t;
    }
    for col in 0..n {
        let t = &a[y][col] * c;
        a[x][col] += t;
    }
    for row in b.iter_mut() {
        let t = &row[y] * c;
        row[x] += t;
    }
}

/// Clears the coupling between the `dim`-block at `k` and all later basis vectors.
fn eliminate(a: &mut [Vec<Rational>], b: &mut [Vec<Rational>], k: usize, dim: usize) {
    let n = a.len();
    for j in k + dim..n {
        if dim == 1 {
            if a[k][j].is_zero() {
                continue;
            }
            let c = -(&a[k][j] / &a[k][k]);
            add_multiple(a, b, j, k, &c);
        } else {
            let (p, q, r) = (&a[k][k], &a[k][k + 1], &a[k + 1][k + 1]);
            let det = p * r - q * q;
            let (u, v) = (a[k][j].clone(), a[k + 1][j].clone());
            if u.is_zero() && v.is_zero() {
                continue;
            }
            // solve M (x, y) = (u, v), then e_j -= x e_k + y e_{k+1}
            let x = (r * &u - q * &v) / &det;
            let y = (p * &v - q * &u) / &det;
            add_multiple(a, b, j, k, &-x);
            add_multiple(a, b, j, k + 1, &-y);
        }
    }
}

/// Jordan splitting reduced mod `p^e`.
pub fn jordan_decompose(lat: &EvenLattice, p: u64, e: u32) -> Result<JordanBlockDecomposition> {
    let exact = lat.jordan(p);
    let need = exact.max_scale() + 3;
    if e < need {
        return Err(Error::PrecisionTooLow { got: e, need });
    }
    let mut out = (*exact).clone();
    out.precision = e;
    Ok(out)
}

/// `scalar * surd^k * zeta_M^phase`, where `surd` is `g_p` (p odd) or `sqrt 2`.
#[derive(Clone, Debug)]
struct Mono {
    scalar: BigInt,
    surd: u32,
    phase: u64,
}

impl Mono {
    fn int(s: BigInt) -> Self {
        Mono { scalar: s, surd: 0, phase: 0 }
    }
    fn mul(&mut self, o: &Mono, big_m: u64) {
        self.scalar *= &o.scalar;
        self.surd += o.surd;
        self.phase = (self.phase + o.phase) % big_m;
    }
}

struct GaussCtx {
    p: u64,
    /// order of the ambient cyclotomic field
    big_m: u64,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn ord_capped(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut x = x;
    let mut k = 0;
    while x % p == 0 && k < cap {
        x /= p;
        k += 1;
    }
    k
}

fn inv_mod(a: u64, m: u64) -> u64 {
    crate::num::mod_inv_u64(a % m, m).expect("unit")
}

fn bigpow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

impl GaussCtx {
    /// `zeta_M` exponent of `e(k / p^r)`.
    fn phase(&self, k: u64, r: u32) -> u64 {
        let pr = pow_u64(self.p, r);
        mulmod(k % pr, self.big_m / pr, self.big_m)
    }

    fn legendre(&self, u: u64) -> i64 {
        let p = self.p;
        let mut r = 1u64;
        let mut b = u % p;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b, p);
            }
            b = mulmod(b, b, p);
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    /// `sum_{x mod p^R} e((A x^2 + B x) / p^R)`, one variable.
    fn sum1(&self, a_coef: u64, b_coef: u64, r_exp: u32) -> Option<Mono> {
        let p = self.p;
        if r_exp == 0 {
            return Some(Mono::int(BigInt::one()));
        }
        let pr = pow_u64(p, r_exp);
        let a = ord_capped(a_coef, p, r_exp);
        if a == r_exp {
            return (b_coef % pr == 0).then(|| Mono::int(bigpow(p, r_exp)));
        }
        let b = ord_capped(b_coef, p, r_exp);
        if p != 2 {
            if b < a {
                return None;
            }
            let r = r_exp - a;
            let pr2 = pow_u64(p, r);
            let a1 = (a_coef / pow_u64(p, a)) % pr2;
            let b1 = (b_coef / pow_u64(p, a)) % pr2;
            let k = (pr2 - mulmod(mulmod(b1, b1, pr2), inv_mod(mulmod(4, a1, pr2), pr2), pr2)) % pr2;
            let mut out = Mono { scalar: bigpow(p, a), surd: 0, phase: self.phase(k, r) };
            if r % 2 == 0 {
                out.scalar *= bigpow(p, r / 2);
            } else {
                out.scalar *= bigpow(p, (r - 1) / 2) * self.legendre(a1);
                out.surd = 1;
            }
            return Some(out);
        }
        if b > a {
            let r = r_exp - a;
            let pr2 = pow_u64(2, r);
            let a1 = (a_coef >> a) % pr2;
            let b1 = (b_coef >> (a + 1)) % pr2;
            let k = (pr2 - mulmod(mulmod(b1, b1, pr2), inv_mod(a1, pr2), pr2)) % pr2;
            let mut g = self.gauss2(a1, r)?;
            g.scalar *= bigpow(2, a);
            g.phase = (g.phase + self.phase(k, r)) % self.big_m;
            return Some(g);
        }
        if r_exp >= a + 2 {
            return None;
        }
        ((a_coef + b_coef) % pr == 0).then(|| Mono::int(bigpow(2, r_exp)))
    }

    /// `sum_{x mod 2^r} e(u x^2 / 2^r)` for odd `u`.
    fn gauss2(&self, u: u64, r: u32) -> Option<Mono> {
        match r {
            0 => Some(Mono::int(BigInt::one())),
            1 => None,
            _ => {
                let kron = if u % 8 == 1 || u % 8 == 7 { 1 } else { -1 };
                let sign = if r % 2 == 1 { kron } else { 1 };
                let e8 = self.big_m / 8;
                Some(Mono {
                    scalar: bigpow(2, (r + 1) / 2) * sign,
                    surd: (r + 1) % 2,
                    phase: if u % 4 == 1 { e8 } else { self.big_m - e8 },
                })
            }
        }
    }

    /// Two-variable dyadic block `a x^2 + b xy + c y^2 + beta.v` over `Z / 2^R`.
    fn sum2(&self, coef: [u64; 3], beta: [u64; 2], r_exp: u32) -> Option<Mono> {
        if r_exp == 0 {
            return Some(Mono::int(BigInt::one()));
        }
        let pr = pow_u64(2, r_exp);
        let s = ord_capped(coef[1], 2, r_exp);
        if s == r_exp {
            return (beta[0] % pr == 0 && beta[1] % pr == 0).then(|| Mono::int(bigpow(2, 2 * r_exp)));
        }
        if beta[0] % (1 << s) != 0 || beta[1] % (1 << s) != 0 {
            return None;
        }
        let r = r_exp - s;
        let m = pow_u64(2, r);
        let a0 = (coef[0] >> s) % m;
        let b0 = (coef[1] >> s) % m;
        let c0 = (coef[2] >> s) % m;
        let (u, v) = ((beta[0] >> s) % m, (beta[1] >> s) % m);
        // M0 = [[2a0, b0], [b0, 2c0]]
        let det = (mulmod(4 * a0 % m, c0, m) + m - mulmod(b0, b0, m)) % m;
        let dinv = inv_mod(det, m);
        let x = mulmod((mulmod(2 * c0 % m, u, m) + m - mulmod(b0, v, m)) % m, dinv, m);
        let y = mulmod((mulmod(2 * a0 % m, v, m) + m - mulmod(b0, u, m)) % m, dinv, m);
        let q0 = (mulmod(a0, mulmod(x, x, m), m) + mulmod(b0, mulmod(x, y, m), m) + mulmod(c0, mulmod(y, y, m), m)) % m;
        let sign: i64 = if (a0 * c0) % 2 == 1 && r % 2 == 1 { -1 } else { 1 };
        Some(Mono {
            scalar: bigpow(2, 2 * s + r) * sign,
            surd: 0,
            phase: self.phase((m - q0) % m, r),
        })
    }
}

/// Character-sum evaluation of `N_{m,mu}(p^w)` through the Jordan splitting.
pub fn count_gauss(lat: &EvenLattice, m: &Rational, mu: usize, p: u64, w: u32) -> Result<RepCount> {
    if w == 0 {
        return Err(Error::InvalidInput("count_gauss needs w >= 1".into()));
    }
    let (g, c) = congruence_data(lat, m, mu)?;
    let q = pow_u64(p, w);
    let big_m = if p == 2 { q.max(8) } else { q };
    let ctx = GaussCtx { p, big_m };
    let jd = lat.jordan(p);
    let n = lat.rank();
    let modq = |x: &Rational| rational_mod(x, q);
    let two = Rational::from_integer(BigInt::from(2));

    // linear term in the new basis: beta_col = sum_i B[i][col] g_i
    let beta: Vec<u64> = (0..n)
        .map(|col| {
            let s: Rational = (0..n)
                .map(|i| &jd.basechange[i][col] * Rational::from_integer(BigInt::from(g[i])))
                .sum();
            modq(&s)
        })
        .collect::<Result<_>>()?;

    enum Blk {
        One(u64, u64),
        Two([u64; 3], [u64; 2]),
    }
    let mut blks = Vec::new();
    let mut idx = 0;
    for b in &jd.blocks {
        if b.dim() == 1 {
            blks.push(Blk::One(modq(&(&b.entries[0][0] / &two))?, beta[idx]));
            idx += 1;
        } else {
            let coef = [modq(&(&b.entries[0][0] / &two))?, modq(&b.entries[0][1])?, modq(&(&b.entries[1][1] / &two))?];
            blks.push(Blk::Two(coef, [beta[idx], beta[idx + 1]]));
            idx += 2;
        }
    }
    let c_mod = umod(&c, q);

    let mut acc0 = vec![BigInt::zero(); big_m as usize];
    let mut acc1 = vec![BigInt::zero(); big_m as usize];
    for t in 0..q {
        let j = ord_capped(t, p, w);
        let r = w - j;
        let pr = pow_u64(p, r);
        let tp = if r == 0 { 0 } else { (t / pow_u64(p, j)) % pr };
        let mut prod = Mono { scalar: BigInt::one(), surd: 0, phase: ctx.phase(mulmod(t, c_mod, q), w) };
        let mut dead = false;
        for blk in &blks {
            let mono = match blk {
                Blk::One(a, b) => ctx.sum1(mulmod(tp, *a, pr.max(1)), mulmod(tp, *b, pr.max(1)), r).map(|mut x| {
                    x.scalar *= bigpow(p, j);
                    x
                }),
                Blk::Two(cf, bt) => {
                    let pm = pr.max(1);
                    let cf = [mulmod(tp, cf[0], pm), mulmod(tp, cf[1], pm), mulmod(tp, cf[2], pm)];
                    let bt = [mulmod(tp, bt[0], pm), mulmod(tp, bt[1], pm)];
                    ctx.sum2(cf, bt, r).map(|mut x| {
                        x.scalar *= bigpow(p, 2 * j);
                        x
                    })
                }
            };
            match mono {
                Some(x) => prod.mul(&x, big_m),
                None => {
                    dead = true;
                    break;
                }
            }
        }
        if dead {
            continue;
        }
        if prod.surd >= 2 {
            let pstar: i64 = if p == 2 {
                2
            } else if p % 4 == 1 {
                p as i64
            } else {
                -(p as i64)
            };
            prod.scalar *= BigInt::from(pstar).pow(prod.surd / 2);
            prod.surd %= 2;
        }
        let slot = if prod.surd == 0 { &mut acc0 } else { &mut acc1 };
        slot[prod.phase as usize] += prod.scalar;
    }

    // fold the surd part back into the group ring
    let surd: Vec<u64> = if p == 2 {
        vec![big_m / 8, big_m - big_m / 8]
    } else {
        (0..p).map(|x| mulmod(x * x % p, big_m / p, big_m)).collect()
    };
    for (k, v) in acc1.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for &s in &surd {
            acc0[(k + s as usize) % big_m as usize] += v;
        }
    }
    let value = Cyclotomic::from_group_ring(big_m, &acc0, BigInt::one())
        .to_rational()
        .ok_or_else(|| Error::NonIntegralResult(format!("character sum for p^w = {q} is not rational")))?;
    let qb = Rational::from_integer(BigInt::from(q));
    let count = value / qb;
    if !count.is_integer() || count.is_negative() {
        return Err(Error::NonIntegralResult(format!("N_(m={m},mu={mu})({q}) evaluated to {count}")));
    }
    Ok(RepCount { m: m.clone(), mu, modulus: q, count: count.to_integer(), method: CountMethod::Gauss })
}

/// `N_{m,mu}(a)` as a product of prime-power counts.
pub fn count(lat: &EvenLattice, m: &Rational, mu: usize, a: u64, cfg: &CountConfig) -> Result<RepCount> {
    if a == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    lat.check_coset(m, mu, crate::lattice::CosetSign::Plus)?;
    let n = lat.rank() as u32;
    let mut total = BigInt::one();
    let mut method = CountMethod::Naive;
    for (p, e) in factor(a) {
        let pe = pow_u64(p, e);
        let size = (pe as u128).checked_pow(n).unwrap_or(u128::MAX);
        let part = if size <= 4096 {
            count_naive(lat, m, mu, pe, cfg.naive_cap)?
        } else {
            method = CountMethod::Gauss;
            let g = count_gauss(lat, m, mu, p, e)?;
            if cfg.cross_check && size <= cfg.naive_cap {
                let nv = count_naive(lat, m, mu, pe, cfg.naive_cap)?;
                if nv.count != g.count {
                    return Err(Error::Internal(format!(
                        "count paths disagree at p^e = {pe}: naive {} vs gauss {}",
                        nv.count, g.count
                    )));
                }
            }
            g
        };
        total *= part.count;
    }
    Ok(RepCount { m: m.clone(), mu, modulus: a, count: total, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::{block_sum, e8_gram, u_gram};
    use crate::num::rat;

    fn lat(g: Vec<Vec<i64>>) -> EvenLattice {
        EvenLattice::new(g).unwrap()
    }

    #[test]
    fn hensel_exponents() {
        let e8 = lat(e8_gram());
        assert_eq!(w_p(&e8, &rat(1, 1), 0, 2).unwrap(), 3);
        assert_eq!(w_p(&e8, &rat(1, 1), 0, 3).unwrap(), 1);
        // <-2>: the nonzero class has order 2 and Q = -1/4, so m = 1/4 lives on the negated form
        let l = lat(vec![vec![2]]);
        let mu = 1;
        assert_eq!(l.disc().elem_order(mu), 2);
        assert_eq!(w_p(&l, &rat(1, 4), mu, 2).unwrap(), 1);
        assert!(matches!(w_p(&l, &rat(1, 8), mu, 2), Err(Error::NegativeValuation(_))));
    }

    #[test]
    fn naive_examples() {
        let l = lat(vec![vec![2]]);
        assert_eq!(count_naive(&l, &rat(1, 1), 0, 2, 100).unwrap().count, BigInt::from(1));
        assert_eq!(count_naive(&l, &rat(1, 1), 0, 1, 100).unwrap().count, BigInt::from(1));
        let u = lat(u_gram());
        assert_eq!(count_naive(&u, &rat(0, 1), 0, 2, 100).unwrap().count, BigInt::from(3));
        assert!(matches!(count_naive(&u, &rat(0, 1), 0, 11, 100), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn jordan_examples() {
        let j = jordan_decompose(&lat(vec![vec![2, 0], vec![0, 6]]), 3, 8).unwrap();
        let mut scales: Vec<u32> = j.blocks.iter().map(|b| b.scale).collect();
        scales.sort();
        assert_eq!(scales, vec![0, 1]);
        assert!(j.blocks.iter().all(|b| b.dim() == 1));

        let j = jordan_decompose(&lat(u_gram()), 2, 4).unwrap();
        assert_eq!(j.blocks.len(), 1);
        assert_eq!(j.blocks[0].dim(), 2);
        assert_eq!(j.blocks[0].scale, 0);

        let j = jordan_decompose(&lat(vec![vec![2, 0, 0], vec![0, 4, 0], vec![0, 0, 8]]), 2, 6).unwrap();
        let scales: Vec<u32> = j.blocks.iter().map(|b| b.scale).collect();
        assert_eq!(scales, vec![1, 2, 3]);
        assert!(matches!(
            jordan_decompose(&lat(vec![vec![2, 0, 0], vec![0, 4, 0], vec![0, 0, 8]]), 2, 5),
            Err(Error::PrecisionTooLow { got: 5, need: 6 })
        ));
    }

    fn check_basechange(l: &EvenLattice, p: u64) {
        let j = jordan_exact(l, p);
        let n = l.rank();
        let g: Vec<Vec<Rational>> =
            l.gram().iter().map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()).collect();
        let b = &j.basechange;
        let mut ordered = Vec::new();
        for blk in &j.blocks {
            ordered.push(blk.entries.clone());
        }
        let mut expect = vec![vec![Rational::zero(); n]; n];
        let mut k = 0;
        for e in ordered {
            for i in 0..e.len() {
                for jj in 0..e.len() {
                    expect[k + i][k + jj] = e[i][jj].clone();
                }
            }
            k += e.len();
        }
        for r in 0..n {
            for c in 0..n {
                let mut s = Rational::zero();
                for i in 0..n {
                    for jj in 0..n {
                        s += &b[i][r] * &g[i][jj] * &b[jj][c];
                    }
                }
                assert_eq!(s, expect[r][c]);
            }
        }
        for row in b {
            for x in row {
                assert!(x.is_zero() || ord_p(x, p) >= 0);
            }
        }
    }

    #[test]
    fn jordan_basechange_is_exact() {
        check_basechange(&lat(e8_gram()), 2);
        check_basechange(&lat(vec![vec![4, 2, 0], vec![2, 6, 3], vec![0, 3, 12]]), 2);
        check_basechange(&lat(vec![vec![4, 2, 0], vec![2, 6, 3], vec![0, 3, 12]]), 3);
        check_basechange(&crate::lattice::standard::fixture_12_2(), 2);
    }

    #[test]
    fn gauss_matches_naive_small() {
        let l = lat(vec![vec![2]]);
        assert_eq!(count_gauss(&l, &rat(1, 1), 0, 2, 1).unwrap().count, BigInt::from(1));
        let u = lat(u_gram());
        let n = count_naive(&u, &rat(0, 1), 0, 4, 1000).unwrap().count;
        assert_eq!(count_gauss(&u, &rat(0, 1), 0, 2, 2).unwrap().count, n);
        let l = lat(vec![vec![2, 1], vec![1, 2]]);
        for w in 1..4 {
            for m in [1i64, 2, 3, 4] {
                let a = pow_u64(2, w);
                assert_eq!(
                    count_gauss(&l, &rat(m, 1), 0, 2, w).unwrap().count,
                    count_naive(&l, &rat(m, 1), 0, a, 1 << 20).unwrap().count,
                    "A2 m={m} a={a}"
                );
            }
        }
    }

    #[test]
    fn multiplicativity_example() {
        let l = lat(vec![vec![2, 1], vec![1, 4]]);
        let cfg = CountConfig { naive_cap: 1 << 20, cross_check: true };
        let c6 = count(&l, &rat(1, 1), 0, 6, &cfg).unwrap().count;
        let c2 = count(&l, &rat(1, 1), 0, 2, &cfg).unwrap().count;
        let c3 = count(&l, &rat(1, 1), 0, 3, &cfg).unwrap().count;
        assert_eq!(c6, c2 * c3);
        assert_eq!(count(&l, &rat(1, 1), 0, 12, &cfg).unwrap().count, count_naive(&l, &rat(1, 1), 0, 12, 1 << 20).unwrap().count);
        assert_eq!(count(&l, &rat(1, 1), 0, 1, &cfg).unwrap().count, BigInt::one());
    }

    #[test]
    fn e8_gauss_value() {
        let e8 = lat(e8_gram());
        assert_eq!(count_gauss(&e8, &rat(1, 1), 0, 2, 3).unwrap().count, BigInt::from(1_966_080u64));
        let big = block_sum(&[e8_gram(), u_gram()]);
        let c = count_gauss(&lat(big), &rat(5, 1), 0, 3, 5).unwrap();
        assert!(c.count.is_positive());
    }
}
