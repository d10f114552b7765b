//! Principal parts of weakly holomorphic forms feeding Borcherds products.
//!
//! All operations take the lattice `L` of signature `(n, 2)`. Input forms have
//! weight `1 - n/2` and live on `-Q(mu) + Z` (sign `Minus`), so a principal part
//! entry `(m, mu)` has `m = Q(mu)` mod 1. Cusp forms and `E_{kappa,L}` with
//! `kappa = 1 + n/2` live on `Q(mu) + Z`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eisenstein::EisensteinContext;
use crate::error::{Error, Result};
use crate::json::{series_doc, series_from_doc, SeriesDoc};
use crate::lattice::{CosetSign, DiscriminantForm, EvenLattice, Representation};
use crate::num::{fmt_rational, ord_p, parse_rational, Rational};
use crate::qseries::{PrincipalPart, VVQSeries};
use crate::weilrep::weil_matrices;

pub const DEFAULT_RADIUS: i64 = 3;

/// Which pairs an admissible set contains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    All,
    /// Only the zero coset.
    ZeroCoset,
    /// Only integral `m`.
    IntegralM,
}

#[derive(Clone, Debug)]
pub enum Members {
    Explicit(Vec<(Rational, usize)>),
    /// Every `(m, mu)` with `0 < m <= ceiling` satisfying the predicate.
    Generator { predicate: Predicate, ceiling: Rational },
}

#[derive(Clone, Debug)]
pub struct AdmissibleSetSpec {
    pub bound: i64,
    pub members: Members,
}

impl AdmissibleSetSpec {
    pub fn explicit(bound: i64, members: Vec<(Rational, usize)>) -> Self {
        AdmissibleSetSpec { bound, members: Members::Explicit(members) }
    }

    /// Members in candidate order: ascending `m`, then element index.
    pub fn enumerate(&self, disc: &DiscriminantForm) -> Vec<(Rational, usize)> {
        let mut out = match &self.members {
            Members::Explicit(v) => v.clone(),
            Members::Generator { predicate, ceiling } => {
                let mut v = Vec::new();
                for mu in 0..disc.order() {
                    if *predicate == Predicate::ZeroCoset && mu != 0 {
                        continue;
                    }
                    let mut m = disc.q(mu).clone();
                    if m.is_zero() {
                        m = Rational::one();
                    }
                    while &m <= ceiling {
                        if *predicate != Predicate::IntegralM || m.is_integer() {
                            v.push((m.clone(), mu));
                        }
                        m += Rational::one();
                    }
                }
                v
            }
        };
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub m: String,
    pub mu: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub accepted: Vec<(Rational, usize)>,
    pub rejected: Vec<Rejection>,
}

impl AdmissibilityReport {
    pub fn into_result(self) -> Result<Vec<(Rational, usize)>> {
        if self.rejected.is_empty() {
            return Ok(self.accepted);
        }
        let items: Vec<String> =
            self.rejected.iter().map(|r| format!("({}, {}): {}", r.m, r.mu, r.reason)).collect();
        Err(Error::NotAdmissible(items.join("; ")))
    }
}

/// Verifies representability and the valuation bound for every member.
pub fn check_admissible(lat: &EvenLattice, spec: &AdmissibleSetSpec, radius: i64) -> AdmissibilityReport {
    let primes = lat.bad_primes();
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for (m, mu) in spec.enumerate(lat.disc()) {
        let reject = |reason: String| Rejection { m: fmt_rational(&m), mu, reason };
        if !m.is_positive() {
            rejected.push(reject("m must be positive".into()));
            continue;
        }
        match lat.coset_represents(&m, mu, CosetSign::Plus, radius) {
            Ok(Representation::Represented) => {}
            Ok(r) => {
                rejected.push(reject(format!("not represented by mu + L ({r:?})")));
                continue;
            }
            Err(e) => {
                rejected.push(reject(e.to_string()));
                continue;
            }
        }
        if let Some(&p) = primes.iter().find(|&&p| ord_p(&m, p) > spec.bound) {
            rejected.push(reject(format!("ord_{p}(m) = {} exceeds A = {}", ord_p(&m, p), spec.bound)));
            continue;
        }
        accepted.push((m, mu));
    }
    AdmissibilityReport { accepted, rejected }
}

/// A list of modular forms supplied as external data.
#[derive(Clone, Debug)]
pub struct ModularBasisFixture {
    pub weight: Rational,
    pub elements: Vec<VVQSeries>,
    pub cusp_flags: Vec<bool>,
    pub provenance: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FixtureElementDoc {
    #[serde(default)]
    pub cusp: bool,
    pub series: SeriesDoc,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FixtureDoc {
    pub weight: String,
    #[serde(default)]
    pub provenance: String,
    #[serde(default)]
    pub elements: Vec<FixtureElementDoc>,
}

impl ModularBasisFixture {
    pub fn empty(weight: Rational) -> Self {
        ModularBasisFixture { weight, elements: Vec::new(), cusp_flags: Vec::new(), provenance: "empty".into() }
    }

    pub fn new(weight: Rational, elements: Vec<VVQSeries>, cusp_flags: Vec<bool>, provenance: String) -> Result<Self> {
        let f = ModularBasisFixture { weight, elements, cusp_flags, provenance };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.len() != self.cusp_flags.len() {
            return Err(Error::InvalidInput("one cusp flag per fixture element".into()));
        }
        if let Some(first) = self.elements.first() {
            if self.elements.iter().any(|g| g.trunc() != first.trunc()) {
                return Err(Error::InvalidInput("fixture truncation is not uniform".into()));
            }
        }
        for (i, (g, &cusp)) in self.elements.iter().zip(&self.cusp_flags).enumerate() {
            if cusp && g.iter().any(|(e, _, _)| !e.is_positive()) {
                return Err(Error::InvalidInput(format!("cusp-flagged element {i} has a non-positive exponent")));
            }
        }
        Ok(())
    }

    pub fn trunc(&self) -> Option<&Rational> {
        self.elements.first().map(|g| g.trunc())
    }

    pub fn cusp_forms(&self) -> Vec<&VVQSeries> {
        self.elements.iter().zip(&self.cusp_flags).filter(|(_, &c)| c).map(|(g, _)| g).collect()
    }

    pub fn to_doc(&self) -> FixtureDoc {
        FixtureDoc {
            weight: fmt_rational(&self.weight),
            provenance: self.provenance.clone(),
            elements: self
                .elements
                .iter()
                .zip(&self.cusp_flags)
                .map(|(g, &cusp)| FixtureElementDoc { cusp, series: series_doc(g) })
                .collect(),
        }
    }

    pub fn from_doc(doc: &FixtureDoc, disc: Arc<DiscriminantForm>) -> Result<Self> {
        let weight = parse_rational(&doc.weight)?;
        let mut elements = Vec::new();
        let mut flags = Vec::new();
        for e in &doc.elements {
            elements.push(series_from_doc(&e.series, disc.clone())?);
            flags.push(e.cusp);
        }
        Self::new(weight, elements, flags, doc.provenance.clone())
    }

    pub fn parse(text: &str, disc: Arc<DiscriminantForm>) -> Result<Self> {
        let doc: FixtureDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc, disc)
    }
}

/// The cusp-form coefficients `b(m, mu)` seen by one candidate.
#[derive(Clone, Debug)]
pub struct FunctionalRow {
    pub m: Rational,
    pub mu: usize,
    pub vector: Vec<Rational>,
    pub origin: String,
}

impl FunctionalRow {
    /// Symmetrized over `mu` and `-mu`, matching a principal part with both entries equal to 1.
    pub fn new(disc: &DiscriminantForm, cusps: &[&VVQSeries], m: &Rational, mu: usize) -> Result<Self> {
        let nm = disc.neg(mu);
        let mut vector = Vec::with_capacity(cusps.len());
        for g in cusps {
            if m >= g.trunc() {
                return Err(Error::TruncationInsufficient { need: format!("> {m}"), have: fmt_rational(g.trunc()) });
            }
            let mut v = g.get(m, mu)?;
            if nm != mu {
                v += g.get(m, nm)?;
            }
            vector.push(v);
        }
        Ok(FunctionalRow { m: m.clone(), mu, vector, origin: format!("a({}, {mu})", fmt_rational(m)) })
    }
}

fn n_of(lat: &EvenLattice) -> Result<usize> {
    let (n, m) = lat.signature();
    if m != 2 {
        return Err(Error::InvalidInput(format!("lattice must have signature (n, 2), got ({n}, {m})")));
    }
    Ok(n)
}

fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn lcm_of_dens<'a>(xs: impl Iterator<Item = &'a Rational>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn pp_from(sign: CosetSign, entries: BTreeMap<(Rational, usize), Rational>, const_term: Rational) -> PrincipalPart {
    let entries: BTreeMap<_, _> = entries.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let integral = entries.values().all(|c| c.is_integer());
    PrincipalPart { sign, entries, const_term, integral }
}

pub fn pp_scale(p: &PrincipalPart, r: &Rational) -> PrincipalPart {
    pp_from(p.sign, p.entries.iter().map(|(k, c)| (k.clone(), c * r)).collect(), &p.const_term * r)
}

pub fn pp_add(a: &PrincipalPart, b: &PrincipalPart) -> PrincipalPart {
    let mut e = a.entries.clone();
    for (k, c) in &b.entries {
        *e.entry(k.clone()).or_insert_with(Rational::zero) += c;
    }
    pp_from(a.sign, e, &a.const_term + &b.const_term)
}

pub fn pp_sub(a: &PrincipalPart, b: &PrincipalPart) -> PrincipalPart {
    pp_add(a, &pp_scale(b, &-Rational::one()))
}

/// Entries (not the constant term) are all `>= 0`.
pub fn pp_nonneg(p: &PrincipalPart) -> bool {
    p.entries.values().all(|c| !c.is_negative())
}

/// Source of the weight `k` form `E` in `h = Delta^-b E`.
#[derive(Clone, Debug)]
pub enum Provider {
    /// `E_{k}` of `(L, -Q)`; legal only for `n = 12 b`.
    Eisenstein,
    /// A fixture form of the given weight on `-Q(mu) + Z`.
    Series { weight: Rational, form: VVQSeries },
}

/// `k = 1 - n/2 + 12 b`.
pub fn h_weight(n: usize, b: i64) -> Rational {
    rint(1 + 12 * b) - Rational::new(BigInt::from(n), BigInt::from(2))
}

impl Provider {
    pub fn legal(&self, n: usize, b: i64) -> bool {
        match self {
            Provider::Eisenstein => n as i64 == 12 * b,
            Provider::Series { weight, .. } => *weight == h_weight(n, b),
        }
    }
}

/// `h = Delta^-b E` together with `T = max t_mu`.
#[derive(Clone, Debug)]
pub struct HSeries {
    pub b: i64,
    pub t: Rational,
    pub series: VVQSeries,
}

/// Moves a series on `(L, -Q)` with sign `Plus` onto `L` with sign `Minus`.
fn relabel_minus(src: &VVQSeries, disc: Arc<DiscriminantForm>) -> Result<VVQSeries> {
    let mut out = VVQSeries::zero(disc, CosetSign::Minus, src.trunc().clone());
    for (e, mu, c) in src.iter() {
        out.set(&e, mu, c.clone())?;
    }
    Ok(out)
}

pub fn build_h(lat: &EvenLattice, b: i64, provider: &Provider, trunc: &Rational, radius: i64) -> Result<HSeries> {
    let n = n_of(lat)?;
    let k = h_weight(n, b);
    if b < 1 || k <= rint(2) {
        return Err(Error::UnsupportedWeight(format!("k = 1 - n/2 + 12b = {k} must exceed 2 (b = {b})")));
    }
    if !provider.legal(n, b) {
        return Err(Error::UnsupportedWeight(format!("provider does not supply weight {k} for b = {b}, n = {n}")));
    }
    let need = trunc + rint(b);
    let e = match provider {
        Provider::Eisenstein => {
            let ctx = EisensteinContext::new(&lat.negated())?;
            relabel_minus(&ctx.expansion(&need)?.series, lat.disc_arc())?
        }
        Provider::Series { form, .. } => {
            if form.sign() != CosetSign::Minus || form.disc().order() != lat.disc().order() {
                return Err(Error::IncompatibleDiscriminantForms);
            }
            if form.trunc() < &need {
                return Err(Error::TruncationInsufficient { need: fmt_rational(&need), have: fmt_rational(form.trunc()) });
            }
            if let Some((e, mu, c)) = form.iter().find(|(e, _, c)| e < &need && c.is_negative()) {
                return Err(Error::PositivityViolation(format!("provider coefficient at ({e}, {mu}) is {c}")));
            }
            form.truncate(&need)
        }
    };
    let h = e.mul_delta_pow(-b)?;
    if h.trunc() < trunc {
        return Err(Error::Internal(format!("h known only below {}", h.trunc())));
    }
    let h = h.truncate(trunc);
    if let Some((e, mu, c)) = h.iter().find(|(_, _, c)| c.is_negative()) {
        return Err(Error::PositivityViolation(format!("c_h({e}, {mu}) = {c} < 0")));
    }
    let t = lat.t_max(radius)?;
    let start = &t - rint(b);
    let disc = lat.disc();
    for mu in 0..disc.order() {
        let r = crate::num::frac(&-disc.q(mu).clone());
        let mut l = &r + (&start - &r).ceil();
        while &l < trunc {
            if !h.get(&l, mu)?.is_positive() {
                return Err(Error::PositivityViolation(format!("c_h({l}, {mu}) vanishes although l >= T - b")));
            }
            l += Rational::one();
        }
    }
    Ok(HSeries { b, t, series: h })
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    /// Only accept `b` with `b - T > pole order`, as in the existence proof.
    pub strict_paper: bool,
    /// Allow `c = 0` when `f` is already non-negative.
    pub minimal: bool,
    pub radius: i64,
    /// Extra provider for weights the Eisenstein path does not cover.
    pub fixture: Option<Provider>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { strict_paper: false, minimal: false, radius: DEFAULT_RADIUS, fixture: None }
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub b: i64,
    pub t: Rational,
    pub c: BigInt,
    /// Principal part of `h`, constant term included.
    pub h: PrincipalPart,
    pub f1: PrincipalPart,
    pub f2: PrincipalPart,
}

fn required_c(f: &PrincipalPart, h: &PrincipalPart) -> Option<BigInt> {
    let mut c = BigInt::zero();
    for ((m, mu), cf) in &f.entries {
        if cf.is_negative() {
            let ch = h.get(m, *mu);
            if !ch.is_positive() {
                return None;
            }
            c = c.max((-cf / ch).ceil().to_integer());
        }
    }
    Some(c)
}

/// Writes `f = f1 - f2` with non-negative principal parts, `f2 = c h`.
pub fn decompose(lat: &EvenLattice, f: &PrincipalPart, opts: &DecomposeOptions) -> Result<Decomposition> {
    let n = n_of(lat)?;
    if f.sign != CosetSign::Minus {
        return Err(Error::InvalidInput("decompose expects a principal part with sign '-'".into()));
    }
    let pole = f.pole_order().unwrap_or_else(Rational::zero);
    let mut providers: Vec<(i64, Provider)> = Vec::new();
    if n % 12 == 0 && n > 0 {
        providers.push(((n / 12) as i64, Provider::Eisenstein));
    }
    if let Some(p @ Provider::Series { weight, .. }) = &opts.fixture {
        let b12 = weight - rint(1) + Rational::new(BigInt::from(n), BigInt::from(2));
        let b = &b12 / rint(12);
        if b.is_integer() && b.is_positive() {
            use num_traits::ToPrimitive;
            providers.push((b.to_integer().to_i64().unwrap(), p.clone()));
        }
    }
    providers.sort_by_key(|(b, _)| *b);
    if providers.is_empty() {
        return Err(Error::UnsupportedWeight(format!("no provider-legal b for n = {n}")));
    }
    let t = lat.t_max(opts.radius)?;
    let mut chosen = None;
    for (b, p) in &providers {
        if rint(*b) - &t > pole {
            chosen = Some((*b, p.clone()));
            break;
        }
    }
    let mut h = None;
    if chosen.is_none() && !opts.strict_paper {
        // fall back to any legal b whose h is positive at every negative slot of f
        for (b, p) in &providers {
            let hb = build_h(lat, *b, p, &rint(1), opts.radius)?;
            let hp = hb.series.principal_part()?;
            if required_c(f, &hp).is_some() {
                chosen = Some((*b, p.clone()));
                h = Some(hp);
                break;
            }
        }
    }
    let (b, provider) = chosen.ok_or_else(|| {
        Error::UnsupportedWeight(format!("no provider-legal b with b - T > {pole} (T = {t})"))
    })?;
    let h = match h {
        Some(h) => h,
        None => build_h(lat, b, &provider, &rint(1), opts.radius)?.series.principal_part()?,
    };
    let need = required_c(f, &h)
        .ok_or_else(|| Error::Internal("h vanishes at a negative slot of f".into()))?;
    let step = if f.integral { lcm_of_dens(h.entries.values()) } else { BigInt::one() };
    let floor = if opts.minimal { need } else { need.max(BigInt::one()) };
    let c = if floor.is_positive() { floor.div_ceil(&step) * &step } else { BigInt::zero() };
    let f2 = pp_scale(&h, &Rational::from_integer(c.clone()));
    let f1 = pp_add(f, &f2);
    if !pp_nonneg(&f1) || !pp_nonneg(&f2) {
        return Err(Error::Internal("decomposition is not non-negative".into()));
    }
    let smaller = &c - &step;
    let lowest = if opts.minimal { BigInt::zero() } else { BigInt::one() };
    if smaller >= lowest && pp_nonneg(&pp_add(f, &pp_scale(&h, &Rational::from_integer(smaller)))) {
        return Err(Error::Internal(format!("c = {c} is not minimal")));
    }
    if pp_sub(&f1, &f2) != *f {
        return Err(Error::Internal("f1 - f2 differs from f".into()));
    }
    Ok(Decomposition { b, t, c, h, f1, f2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub element: usize,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub ok: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

/// Pairs `pp` against every cusp-flagged fixture element.
pub fn obstruction_check(pp: &PrincipalPart, fixture: &ModularBasisFixture) -> Result<ObstructionReport> {
    let mut violations = Vec::new();
    let mut checked = 0;
    for (i, (g, &cusp)) in fixture.elements.iter().zip(&fixture.cusp_flags).enumerate() {
        if !cusp {
            continue;
        }
        checked += 1;
        if let Some(p) = pp.pole_order() {
            if &p >= g.trunc() {
                return Err(Error::TruncationInsufficient { need: format!("> {p}"), have: fmt_rational(g.trunc()) });
            }
        }
        let mut s = Rational::zero();
        for ((m, mu), c) in &pp.entries {
            s += c * g.get(m, *mu)?;
        }
        if !s.is_zero() {
            violations.push(Violation { element: i, value: fmt_rational(&s) });
        }
    }
    Ok(ObstructionReport { ok: violations.is_empty(), checked, violations })
}

/// Checks `n > 2`, or `n = 2` with Witt rank below 2 (only by assumption).
pub fn check_hypothesis(lat: &EvenLattice, assume_witt_below_two: bool, radius: i64) -> Result<()> {
    let n = n_of(lat)?;
    if n > 2 {
        return Ok(());
    }
    if n < 2 {
        return Err(Error::HypothesisNotVerified(format!("n = {n} < 2")));
    }
    let w = lat.witt_rank_bounded(radius);
    if w.exact {
        return Err(Error::HypothesisNotVerified("n = 2 and the Witt rank is 2".into()));
    }
    if assume_witt_below_two {
        return Ok(());
    }
    Err(Error::HypothesisNotVerified(format!(
        "n = 2 and the Witt rank is only known to be >= {}",
        w.lower
    )))
}

fn pairing_with_eisenstein(ctx: &EisensteinContext, pp: &PrincipalPart) -> Result<Rational> {
    let terms: Vec<Result<Rational>> =
        pp.entries.par_iter().map(|((m, mu), c)| ctx.coefficient(m, *mu).map(|e| c * e)).collect();
    let mut s = Rational::zero();
    for t in terms {
        s += t?;
    }
    Ok(s)
}

/// `c(0, 0) = -sum c(-l, nu) e_{kappa,L}(l, nu)`.
pub fn constant_term(lat: &EvenLattice, pp: &PrincipalPart, assume_witt_below_two: bool, radius: i64) -> Result<Rational> {
    if pp.sign != CosetSign::Minus {
        return Err(Error::InvalidInput("constant_term expects a principal part with sign '-'".into()));
    }
    check_hypothesis(lat, assume_witt_below_two, radius)?;
    if pp.is_empty() {
        return Ok(Rational::zero());
    }
    let ctx = EisensteinContext::new(lat)?;
    Ok(-pairing_with_eisenstein(&ctx, pp)?)
}

#[derive(Clone, Debug)]
pub struct PrescribeOptions {
    /// Maximal number of candidates examined.
    pub budget: usize,
    pub radius: i64,
    pub assume_witt_below_two: bool,
}

impl Default for PrescribeOptions {
    fn default() -> Self {
        PrescribeOptions { budget: 64, radius: DEFAULT_RADIUS, assume_witt_below_two: false }
    }
}

#[derive(Clone, Debug)]
pub struct PrescribeResult {
    pub pp: PrincipalPart,
    pub candidates_tried: usize,
    /// Kernel candidates whose Eisenstein value vanished.
    pub vanishing: Vec<(Rational, usize)>,
    /// Invariant vector added in the `n = 2 = r(L)` branch.
    pub f0: Option<Vec<Rational>>,
    /// Correctness depends on the cusp fixture being a basis of sufficient precision.
    pub conditional_on_fixture: bool,
}

struct BasisRow {
    pivot: usize,
    vector: Vec<Rational>,
    combo: BTreeMap<usize, Rational>,
}

fn fixture_rank_check(cusps: &[&VVQSeries]) -> Result<()> {
    if cusps.is_empty() {
        return Ok(());
    }
    let mut keys: Vec<(Rational, usize)> = cusps.iter().flat_map(|g| g.iter().map(|(e, mu, _)| (e, mu))).collect();
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<Rational>> =
        cusps.iter().map(|g| keys.iter().map(|(e, mu)| g.get(e, *mu).unwrap()).collect()).collect();
    let r = crate::matrix::rank(&rows);
    if r != cusps.len() {
        return Err(Error::FixtureNotABasis(format!("{} cusp forms span a space of dimension {r}", cusps.len())));
    }
    Ok(())
}

fn symmetric_key(disc: &DiscriminantForm, m: &Rational, mu: usize) -> (Rational, usize) {
    (m.clone(), mu.min(disc.neg(mu)))
}

fn invariant_with_chi0(lat: &EvenLattice) -> Option<Vec<Rational>> {
    let (n, _) = lat.signature();
    let w = weil_matrices(lat.negated().disc(), (2, n));
    let v = w.invariants().into_iter().find(|v| !v[0].is_zero())?;
    let den = lcm_of_dens(v.iter());
    let s = Rational::from_integer(if v[0].is_negative() { -den } else { den });
    Some(v.iter().map(|x| x * &s).collect())
}

fn prescribe_core(
    lat: &EvenLattice,
    cands: &[(Rational, usize)],
    fixture: &ModularBasisFixture,
    opts: &PrescribeOptions,
    seed: Option<usize>,
) -> Result<PrescribeResult> {
    let n = n_of(lat)?;
    if n < 2 {
        return Err(Error::InvalidInput(format!("prescribe needs n >= 2, got {n}")));
    }
    let f0_branch = if n == 2 {
        match check_hypothesis(lat, opts.assume_witt_below_two, opts.radius) {
            Ok(()) => false,
            Err(_) if lat.witt_rank_bounded(opts.radius).exact => true,
            Err(e) => return Err(e),
        }
    } else {
        false
    };
    let disc = lat.disc();
    let cusps = fixture.cusp_forms();
    fixture_rank_check(&cusps)?;
    let ctx = EisensteinContext::new(lat)?;
    let mut basis: Vec<BasisRow> = Vec::new();
    let mut evals: HashMap<usize, Rational> = HashMap::new();
    let mut vanishing = Vec::new();
    let limit = cands.len().min(opts.budget);
    const CHUNK: usize = 8;
    for i in 0..limit {
        if i % CHUNK == 0 {
            let hi = (i + CHUNK).min(limit);
            let vals: Vec<Result<Rational>> = (i..hi)
                .into_par_iter()
                .map(|j| {
                    let (m, mu) = &cands[j];
                    let nm = disc.neg(*mu);
                    let mut e = ctx.coefficient(m, *mu)?;
                    if nm != *mu {
                        e += ctx.coefficient(m, nm)?;
                    }
                    Ok(e)
                })
                .collect();
            for (j, v) in (i..hi).zip(vals) {
                evals.insert(j, v?);
            }
        }
        let (m, mu) = &cands[i];
        let row = FunctionalRow::new(disc, &cusps, m, *mu)?;
        let mut v = row.vector;
        let mut combo: BTreeMap<usize, Rational> = BTreeMap::from([(i, Rational::one())]);
        for b in &basis {
            if v[b.pivot].is_zero() {
                continue;
            }
            let f = &v[b.pivot] / &b.vector[b.pivot];
            for (x, y) in v.iter_mut().zip(&b.vector) {
                *x -= &f * y;
            }
            for (k, c) in &b.combo {
                *combo.entry(*k).or_insert_with(Rational::zero) -= &f * c;
            }
        }
        combo.retain(|_, c| !c.is_zero());
        if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
            if basis.len() == cusps.len() {
                return Err(Error::FixtureNotABasis("more independent projections than cusp forms".into()));
            }
            basis.push(BasisRow { pivot, vector: v, combo });
            continue;
        }
        if let Some(s) = seed {
            if !combo.contains_key(&s) {
                continue;
            }
        }
        let val: Rational = combo.iter().map(|(j, c)| c * &evals[j]).sum();
        if val.is_zero() && !f0_branch {
            vanishing.push((m.clone(), *mu));
            continue;
        }
        let den = Rational::from_integer(lcm_of_dens(combo.values()));
        let mut entries = BTreeMap::new();
        for (j, c) in &combo {
            let (mj, muj) = &cands[*j];
            entries.insert((mj.clone(), *muj), c * &den);
            entries.insert((mj.clone(), disc.neg(*muj)), c * &den);
        }
        let mut pp = pp_from(CosetSign::Minus, entries, -(&val * &den));
        let check = -pairing_with_eisenstein(&ctx, &pp)?;
        if check != pp.const_term {
            return Err(Error::Internal("constant term disagrees with the Eisenstein pairing".into()));
        }
        let mut f0 = None;
        if f0_branch && pp.const_term.is_zero() {
            let v = invariant_with_chi0(lat).ok_or_else(|| {
                Error::HypothesisNotVerified("no invariant vector with non-zero chi_0 component".into())
            })?;
            pp = pp_from(CosetSign::Minus, pp.entries.clone(), v[0].clone());
            f0 = Some(v);
        }
        let obs = obstruction_check(&pp, fixture)?;
        if !obs.ok {
            return Err(Error::Internal("prescribed principal part fails the obstruction check".into()));
        }
        if pp.const_term.is_zero() || !pp.integral {
            return Err(Error::Internal("prescribed principal part violates its postconditions".into()));
        }
        return Ok(PrescribeResult {
            pp,
            candidates_tried: i + 1,
            vanishing,
            f0,
            conditional_on_fixture: !cusps.is_empty(),
        });
    }
    Err(Error::BudgetExhausted {
        tried: limit,
        report: vanishing.iter().map(|(m, mu)| format!("({}, {mu}) -> 0", fmt_rational(m))).collect(),
    })
}

/// Deduplicates `mu` against `-mu`, keeping candidate order.
fn symmetric_candidates(disc: &DiscriminantForm, pairs: Vec<(Rational, usize)>) -> Vec<(Rational, usize)> {
    let mut seen = std::collections::BTreeSet::new();
    pairs
        .into_iter()
        .map(|(m, mu)| symmetric_key(disc, &m, mu))
        .filter(|k| seen.insert(k.clone()))
        .collect()
}

/// An integral principal part supported on `spec` with non-zero constant term
/// that pairs to zero with every cusp form of the fixture.
pub fn prescribe(
    lat: &EvenLattice,
    spec: &AdmissibleSetSpec,
    fixture: &ModularBasisFixture,
    opts: &PrescribeOptions,
) -> Result<PrescribeResult> {
    let accepted = check_admissible(lat, spec, opts.radius).into_result()?;
    let cands = symmetric_candidates(lat.disc(), accepted);
    prescribe_core(lat, &cands, fixture, opts, None)
}

#[derive(Clone, Debug)]
pub struct VanishResult {
    pub prescribed: PrescribeResult,
    pub decomposition: Decomposition,
}

impl VanishResult {
    pub fn pp(&self) -> &PrincipalPart {
        &self.decomposition.f1
    }
}

/// A non-negative integral principal part with a positive entry at `(m, mu)`.
pub fn vanish_on(
    lat: &EvenLattice,
    m: &Rational,
    mu: usize,
    fixture: &ModularBasisFixture,
    popts: &PrescribeOptions,
    dopts: &DecomposeOptions,
) -> Result<VanishResult> {
    let disc = lat.disc();
    if mu >= disc.order() {
        return Err(Error::InvalidInput(format!("element index {mu} out of range")));
    }
    let seed = symmetric_key(disc, m, mu);
    let seed_spec = AdmissibleSetSpec::explicit(i64::MAX, vec![seed.clone()]);
    check_admissible(lat, &seed_spec, popts.radius).into_result()?;
    let mut pairs = vec![seed.clone()];
    if let Some(t) = fixture.trunc().filter(|_| !fixture.cusp_forms().is_empty()) {
        let ceiling = t - Rational::new(BigInt::one(), BigInt::from(disc.level().max(1)));
        let gen = AdmissibleSetSpec { bound: i64::MAX, members: Members::Generator { predicate: Predicate::All, ceiling } };
        pairs.extend(check_admissible(lat, &gen, popts.radius).accepted);
    }
    let cands = symmetric_candidates(disc, pairs);
    let mut prescribed = prescribe_core(lat, &cands, fixture, popts, Some(0))?;
    let at_seed = prescribed.pp.get(&seed.0, seed.1);
    if at_seed.is_negative() {
        prescribed.pp = pp_scale(&prescribed.pp, &-Rational::one());
    } else if at_seed.is_zero() {
        return Err(Error::Internal("prescribed principal part misses the seed".into()));
    }
    let decomposition = decompose(lat, &prescribed.pp, dopts)?;
    if !decomposition.f1.get(&seed.0, seed.1).is_positive() || !decomposition.f1.integral {
        return Err(Error::Internal("vanish_on output lost its seed entry".into()));
    }
    Ok(VanishResult { prescribed, decomposition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::eis_coefficient;
    use crate::lattice::standard::{block_sum, fixture_12_2, u_gram};
    use crate::num::rat;

    fn pp(disc: &DiscriminantForm, entries: &[((i64, i64), usize, i64)]) -> PrincipalPart {
        let mut e = BTreeMap::new();
        for &((p, q), mu, c) in entries {
            e.insert((rat(p, q), mu), rint(c));
            e.insert((rat(p, q), disc.neg(mu)), rint(c));
        }
        pp_from(CosetSign::Minus, e, Rational::zero())
    }

    fn fake_cusp(lat: &EvenLattice, coeffs: &[(i64, i64)], trunc: i64) -> ModularBasisFixture {
        let mut g = VVQSeries::zero(lat.disc_arc(), CosetSign::Plus, rint(trunc));
        for &(m, c) in coeffs {
            g.set(&rint(m), 0, rint(c)).unwrap();
        }
        ModularBasisFixture::new(rat(7, 1), vec![g], vec![true], "test".into()).unwrap()
    }

    fn small_class(lat: &EvenLattice, q: Rational) -> usize {
        (0..lat.disc().order()).find(|&i| *lat.disc().q(i) == q).unwrap()
    }

    #[test]
    fn admissibility() {
        let l = EvenLattice::new(block_sum(&[u_gram(), u_gram(), vec![vec![2]]])).unwrap();
        let spec = AdmissibleSetSpec::explicit(1, vec![(rat(1, 1), 0), (rat(1, 2), 0), (rat(4, 1), 0), (rat(1, 4), 1)]);
        let r = check_admissible(&l, &spec, DEFAULT_RADIUS);
        assert_eq!(r.accepted, vec![(rat(1, 4), 1), (rat(1, 1), 0)]);
        assert_eq!(r.rejected.len(), 2);
        assert!(r.rejected.iter().any(|x| x.reason.contains("ord_2")));
        assert!(matches!(r.into_result(), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn fixture_json_round_trip() {
        let l = fixture_12_2();
        let f = fake_cusp(&l, &[(1, 1), (2, -3)], 4);
        let text = crate::json::to_pretty(&f.to_doc());
        let g = ModularBasisFixture::parse(&text, l.disc_arc()).unwrap();
        assert_eq!(g.elements, f.elements);
        assert_eq!(g.cusp_flags, f.cusp_flags);
        let mut bad = VVQSeries::zero(l.disc_arc(), CosetSign::Plus, rint(4));
        bad.set(&rint(0), 0, rint(1)).unwrap();
        assert!(ModularBasisFixture::new(rat(7, 1), vec![bad], vec![true], String::new()).is_err());
    }

    #[test]
    fn h_rejections() {
        let l = fixture_12_2();
        assert!(matches!(build_h(&l, 0, &Provider::Eisenstein, &rint(1), 3), Err(Error::UnsupportedWeight(_))));
        assert!(matches!(build_h(&l, 2, &Provider::Eisenstein, &rint(1), 3), Err(Error::UnsupportedWeight(_))));
        let mut form = VVQSeries::zero(l.disc_arc(), CosetSign::Minus, rint(3));
        form.set(&rint(0), 0, rint(1)).unwrap();
        form.set(&rint(1), 0, rint(-5)).unwrap();
        let p = Provider::Series { weight: rat(7, 1), form };
        assert!(matches!(build_h(&l, 1, &p, &rint(1), 3), Err(Error::PositivityViolation(_))));
    }

    #[test]
    fn obstruction_controls() {
        let triv = crate::lattice::standard::e8();
        let p = pp(triv.disc(), &[((1, 1), 0, 1)]);
        let empty = ModularBasisFixture::empty(rat(12, 1));
        assert!(obstruction_check(&p, &empty).unwrap().ok);
        let l = fixture_12_2();
        let f = fake_cusp(&l, &[(1, 1)], 3);
        let r = obstruction_check(&pp(l.disc(), &[((1, 1), 0, 1)]), &f).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations[0].element, 0);
        assert_eq!(r.violations[0].value, "1/1");
        let deep = pp(l.disc(), &[((3, 1), 0, 1)]);
        assert!(matches!(obstruction_check(&deep, &f), Err(Error::TruncationInsufficient { .. })));
    }

    #[test]
    fn constant_terms() {
        let l = fixture_12_2();
        let empty = pp(l.disc(), &[]);
        assert_eq!(constant_term(&l, &empty, false, 3).unwrap(), Rational::zero());
        let e1 = eis_coefficient(&l, &rint(1), 0).unwrap();
        let e2 = eis_coefficient(&l, &rint(2), 0).unwrap();
        let a = pp(l.disc(), &[((1, 1), 0, 1)]);
        let b = pp(l.disc(), &[((2, 1), 0, 3)]);
        assert_eq!(constant_term(&l, &a, false, 3).unwrap(), -e1.clone());
        let both = constant_term(&l, &pp_add(&a, &b), false, 3).unwrap();
        assert_eq!(both, -e1 - e2 * rint(3));
        let uu = EvenLattice::new(block_sum(&[u_gram(), u_gram()])).unwrap();
        assert!(matches!(constant_term(&uu, &pp(uu.disc(), &[((1, 1), 0, 1)]), false, 2), Err(Error::HypothesisNotVerified(_))));
    }

    #[test]
    fn prescribe_empty_fixture() {
        let l = fixture_12_2();
        let spec = AdmissibleSetSpec::explicit(4, vec![(rint(1), 0), (rint(2), 0), (rint(3), 0)]);
        let r = prescribe(&l, &spec, &ModularBasisFixture::empty(rat(7, 1)), &PrescribeOptions::default()).unwrap();
        assert_eq!(r.candidates_tried, 1);
        assert_eq!(r.pp.entries.len(), 1);
        assert_eq!(r.pp.get(&rint(1), 0), rint(1));
        assert_eq!(r.pp.const_term, -eis_coefficient(&l, &rint(1), 0).unwrap());
        assert!(!r.conditional_on_fixture);
    }

    #[test]
    fn prescribe_kills_cusp_projection() {
        let l = fixture_12_2();
        let f = fake_cusp(&l, &[(1, 1), (2, 2)], 4);
        let spec = AdmissibleSetSpec::explicit(4, vec![(rint(1), 0), (rint(2), 0)]);
        let r = prescribe(&l, &spec, &f, &PrescribeOptions::default()).unwrap();
        assert_eq!(r.pp.get(&rint(1), 0), rint(-2));
        assert_eq!(r.pp.get(&rint(2), 0), rint(1));
        assert!(obstruction_check(&r.pp, &f).unwrap().ok);
        assert!(r.conditional_on_fixture);
        let one = AdmissibleSetSpec::explicit(4, vec![(rint(1), 0)]);
        assert!(matches!(prescribe(&l, &one, &f, &PrescribeOptions::default()), Err(Error::BudgetExhausted { .. })));
    }

    #[test]
    fn decompose_mixed_signs() {
        let l = fixture_12_2();
        let half = small_class(&l, rat(1, 2));
        let f = pp(l.disc(), &[((1, 1), 0, -3), ((1, 2), half, 2)]);
        let d = decompose(&l, &f, &DecomposeOptions::default()).unwrap();
        assert_eq!(d.b, 1);
        assert_eq!(d.h.get(&rint(1), 0), rint(1));
        // c_h(-1, 0) = 1 forces c >= 3; integrality of c h pushes c to the denominator 61
        assert_eq!(d.c, BigInt::from(61));
        assert!(d.f1.integral && d.f2.integral);
        assert!(pp_nonneg(&d.f1) && pp_nonneg(&d.f2));
        assert_eq!(pp_sub(&d.f1, &d.f2), f);
        assert!(!pp_nonneg(&pp_add(&f, &pp_scale(&d.h, &rint(2)))));
        assert!(!pp_add(&f, &pp_scale(&d.h, &rint(60))).integral);
        let strict = DecomposeOptions { strict_paper: true, ..Default::default() };
        assert!(matches!(decompose(&l, &f, &strict), Err(Error::UnsupportedWeight(_))));
        let pos = pp(l.disc(), &[((1, 1), 0, 2)]);
        let d = decompose(&l, &pos, &DecomposeOptions::default()).unwrap();
        assert_eq!(d.c, BigInt::from(61));
        let m = decompose(&l, &pos, &DecomposeOptions { minimal: true, ..Default::default() }).unwrap();
        assert!(m.c.is_zero() && m.f2.is_empty());
    }

    #[test]
    fn vanish_on_fixture() {
        let l = fixture_12_2();
        let empty = ModularBasisFixture::empty(rat(7, 1));
        let r = vanish_on(&l, &rint(2), 0, &empty, &PrescribeOptions::default(), &DecomposeOptions::default()).unwrap();
        let out = r.pp();
        assert!(pp_nonneg(out) && out.integral);
        assert!(out.get(&rint(2), 0).is_positive());
        assert!(r.prescribed.pp.get(&rint(2), 0).is_positive());
        let q = small_class(&l, rat(1, 2));
        let bad = vanish_on(&l, &rint(1), q, &empty, &PrescribeOptions::default(), &DecomposeOptions::default());
        assert!(matches!(bad, Err(Error::NotAdmissible(_))));
    }
}
