//! The acceptance battery. Each criterion compares library output with an
//! independent oracle and reports a single pass/fail row. Reports contain no
//! timings so that repeated runs are byte-identical.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::borcherds::{
    build_h, check_admissible, decompose, obstruction_check, pp_add, pp_nonneg, pp_scale, pp_sub, prescribe,
    AdmissibleSetSpec, DecomposeOptions, ModularBasisFixture, PrescribeOptions, Provider, DEFAULT_RADIUS,
};
use crate::eisenstein::{EisOptions, EisensteinContext, EvalPath};
use crate::enumerate::coset_value_counts;
use crate::error::{Error, Result};
use crate::json;
use crate::lattice::standard::{self, block_sum};
use crate::lattice::{CosetSign, CosetValue, EvenLattice};
use crate::localdata::{count_gauss, count_naive};
use crate::num::{fmt_rational, rat, Rational};
use crate::qseries::{PrincipalPart, VVQSeries};
use crate::weilrep::{weil_doc, weil_matrices};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

impl BatteryReport {
    pub fn lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| format!("criterion {} {}: {} ({})", c.id, c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail))
            .collect()
    }
}

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "siegel-weil-e8"),
    (2, "count-path-equivalence"),
    (3, "fixture-rationality-and-sign"),
    (4, "fixture-growth"),
    (5, "h-positivity-window"),
    (6, "decompose-round-trip"),
    (7, "prescribe-pipeline"),
    (8, "weil-relations"),
    (9, "determinism-and-round-trip"),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Internal(msg()))
    }
}

fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn run_criterion(id: u32) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let out = match id {
        1 => siegel_weil(),
        2 => count_paths(),
        3 => fixture_rationality().map(|(d, _)| d),
        4 => fixture_growth(),
        5 => h_window(),
        6 => decompose_round_trip(),
        7 => prescribe_pipeline(),
        8 => weil_relations(),
        9 => determinism(),
        _ => Err(Error::InvalidInput(format!("no criterion {id}"))),
    };
    match out {
        Ok(detail) => CriterionResult { id, name, passed: true, detail },
        Err(e) => CriterionResult { id, name, passed: false, detail: e.to_string() },
    }
}

pub fn run_battery(ids: &[u32]) -> BatteryReport {
    let criteria: Vec<CriterionResult> = ids.iter().map(|&i| run_criterion(i)).collect();
    let all_passed = criteria.iter().all(|c| c.passed);
    BatteryReport { criteria, all_passed }
}

pub fn run_all() -> BatteryReport {
    run_battery(&CRITERIA.iter().map(|c| c.0).collect::<Vec<_>>())
}

fn siegel_weil() -> Result<String> {
    let l = standard::e8();
    let ctx = EisensteinContext::new(&l)?;
    let counts = coset_value_counts(l.gram(), &l.disc().element(0).rep, &rint(8));
    for m in 1..=8 {
        let e = ctx.coefficient(&rint(m), 0)?;
        let r = counts.get(&rint(m)).copied().unwrap_or(0);
        ensure(e == rint(r as i64), || format!("e(8, {m}) = {e} but the lattice has {r} vectors"))?;
    }
    ensure(counts[&rint(1)] == 240, || "E8 does not have 240 roots".into())?;
    Ok("e(m, 0) equals the E8 vector count for m = 1..8".into())
}

fn random_even_gram(rng: &mut ChaCha8Rng) -> EvenLattice {
    loop {
        let rank = rng.gen_range(1..=3usize);
        let mut g = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            g[i][i] = 2 * rng.gen_range(-3..=3i64);
            for j in i + 1..rank {
                let x = rng.gen_range(-6..=6i64);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        if let Ok(l) = EvenLattice::new(g) {
            return l;
        }
    }
}

fn count_paths() -> Result<String> {
    const PRIME_POWERS: [(u64, u32); 12] =
        [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let instances = 200;
    for k in 0..instances {
        let l = random_even_gram(&mut rng);
        let (p, w) = PRIME_POWERS[rng.gen_range(0..PRIME_POWERS.len())];
        let mu = rng.gen_range(0..l.disc().order());
        let m = l.disc().q(mu) + rint(rng.gen_range(-3..6i64));
        let naive = count_naive(&l, &m, mu, p.pow(w), 1 << 30)?;
        let gauss = count_gauss(&l, &m, mu, p, w)?;
        ensure(naive.count == gauss.count, || {
            format!("instance {k}: gram {:?}, m = {m}, a = {}: naive {} vs gauss {}", l.gram(), p.pow(w), naive.count, gauss.count)
        })?;
    }
    let e8 = standard::e8();
    let naive = count_naive(&e8, &rint(1), 0, 8, 1 << 30)?;
    let gauss = count_gauss(&e8, &rint(1), 0, 2, 3)?;
    ensure(naive.count == gauss.count, || format!("E8 a = 8: naive {} vs gauss {}", naive.count, gauss.count))?;
    Ok(format!("{instances} random instances and E8 (a = 8, count {}) agree", gauss.count))
}

/// Every `e(m, mu)` with `0 < m < 4` on the fixture, with the sign rule applied.
fn fixture_rationality() -> Result<(String, BTreeMap<(Rational, usize), Rational>)> {
    let l = standard::fixture_12_2();
    let ctx = EisensteinContext::new(&l)?;
    let sign = rint(ctx.coefficient_sign() as i64);
    let idx: Vec<_> = ctx.index_set(&rint(4)).into_iter().filter(|(m, _)| m.is_positive()).collect();
    let mut values = BTreeMap::new();
    for (m, mu) in idx {
        let (e, path) = ctx.coefficient_with_path(&m, mu)?;
        ensure(path == EvalPath::Exact, || format!("e({m}, {mu}) needed the {path:?} path"))?;
        ensure(!(&e * &sign).is_negative(), || format!("sign rule fails at ({m}, {mu}): e = {e}"))?;
        values.insert((m, mu), e);
    }
    Ok((format!("{} coefficients exact and sign-consistent", values.len()), values))
}

fn fixture_growth() -> Result<String> {
    let l = standard::fixture_12_2();
    let ctx = EisensteinContext::new(&l)?;
    let pairs: Vec<CosetValue> = (1..=12).map(|m| CosetValue { m: rint(m), mu: 0, sign: CosetSign::Plus }).collect();
    let report = ctx.lower_bound_report(&pairs, 4, 0.0, DEFAULT_RADIUS)?;
    ensure(report.all_positive && report.rows.iter().all(|r| r.ratio > 0.0), || "a ratio is not positive".into())?;
    let lo = report.rows[..6].iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = report.rows[6..].iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    ensure(hi >= 1e-3 * lo, || format!("min ratio over m = 7..12 is {hi:e}, below 1e-3 x {lo:e}"))?;
    Ok(format!("ratios positive; min over 1..6 = {lo:.6e}, min over 7..12 = {hi:.6e}"))
}

/// `1 / prod (1 - q^n)^24` by the divisor-sum recurrence.
fn inverse_eta24(len: usize) -> Vec<BigInt> {
    let sigma: Vec<BigInt> = (0..len)
        .map(|k| BigInt::from((1..=k.max(1)).filter(|d| k > 0 && k % d == 0).sum::<usize>()))
        .collect();
    let mut a = vec![BigInt::zero(); len];
    a[0] = BigInt::one();
    for n in 1..len {
        let s: BigInt = (1..=n).map(|k| &sigma[k] * &a[n - k]).sum();
        a[n] = s * 24 / BigInt::from(n);
    }
    a
}

fn h_window() -> Result<String> {
    let l = standard::fixture_12_2();
    let trunc = 5i64;
    let h = build_h(&l, 1, &Provider::Eisenstein, &rint(trunc), DEFAULT_RADIUS)?;
    let neg = EisensteinContext::new(&l.negated())?;
    let a = inverse_eta24(trunc as usize + 2);
    let disc = l.disc();
    let mut checked = 0;
    for mu in 0..disc.order() {
        let r = crate::num::frac(&-disc.q(mu).clone());
        let mut e = &r - rint(1);
        while e < rint(trunc) {
            let mut c = Rational::zero();
            let mut j = 0usize;
            while &e + rint(1) - rint(j as i64) >= Rational::zero() {
                let x = &e + rint(1) - rint(j as i64);
                c += Rational::from_integer(a[j].clone()) * neg.coefficient(&x, mu)?;
                j += 1;
            }
            let got = h.series.get(&e, mu)?;
            ensure(got == c, || format!("c_h({e}, {mu}) = {got}, direct sum gives {c}"))?;
            ensure(!c.is_negative(), || format!("c_h({e}, {mu}) = {c} < 0"))?;
            if e >= &h.t - rint(1) {
                ensure(c.is_positive(), || format!("c_h({e}, {mu}) = 0 inside the window"))?;
                checked += 1;
            }
            e += rint(1);
        }
    }
    Ok(format!("T = {}; {checked} window coefficients positive, all coefficients match the direct product", h.t))
}

fn class_with_q(l: &EvenLattice, q: Rational) -> Result<usize> {
    (0..l.disc().order())
        .find(|&i| *l.disc().q(i) == q)
        .ok_or_else(|| Error::Internal(format!("no class with Q = {q}")))
}

pub fn mixed_sign_fixture(l: &EvenLattice) -> Result<PrincipalPart> {
    let half = class_with_q(l, rat(1, 2))?;
    let disc = l.disc();
    let mut e = BTreeMap::new();
    e.insert((rint(1), 0), rint(-3));
    e.insert((rat(1, 2), half), rint(2));
    e.insert((rat(1, 2), disc.neg(half)), rint(2));
    PrincipalPart::new(l.disc_arc(), CosetSign::Minus, e, Rational::zero())
}

fn decompose_round_trip() -> Result<String> {
    let l = standard::fixture_12_2();
    let f = mixed_sign_fixture(&l)?;
    let d = decompose(&l, &f, &DecomposeOptions::default())?;
    ensure(pp_nonneg(&d.f1) && pp_nonneg(&d.f2), || "negative entry in f1 or f2".into())?;
    ensure(d.f1.integral && d.f2.integral, || "f1 or f2 not integral".into())?;
    ensure(pp_sub(&d.f1, &d.f2) == f, || "f1 - f2 != f".into())?;
    let c = Rational::from_integer(d.c.clone());
    let below = pp_add(&f, &pp_scale(&d.h, &(c - rint(1))));
    ensure(!(pp_nonneg(&below) && below.integral), || "c - 1 still works".into())?;
    Ok(format!("b = {}, c = {}, c_h(-1, 0) = {}", d.b, d.c, fmt_rational(&d.h.get(&rint(1), 0))))
}

fn prescribe_pipeline() -> Result<String> {
    let l = standard::fixture_12_2();
    let members = vec![(rint(1), 0), (rint(2), 0), (rint(3), 0)];
    let spec = AdmissibleSetSpec::explicit(4, members.clone());
    let empty = ModularBasisFixture::empty(rat(7, 1));
    let r = prescribe(&l, &spec, &empty, &PrescribeOptions::default())?;
    ensure(r.pp.integral, || "entries not integral".into())?;
    ensure(r.pp.entries.keys().all(|k| members.contains(k)), || "entry outside the spec".into())?;
    let (_, values) = fixture_rationality()?;
    let first = check_admissible(&l, &spec, DEFAULT_RADIUS).accepted[0].clone();
    let e = values[&first].clone();
    let interval = EisensteinContext::with_options(&l, EisOptions { force_interval: true, ..Default::default() })?
        .coefficient(&first.0, first.1)?;
    ensure(interval == e, || format!("interval path gives {interval}, exact path {e}"))?;
    ensure(r.pp.const_term == -e.clone() && !e.is_zero(), || format!("const_term {} != -{e}", r.pp.const_term))?;
    ensure(obstruction_check(&r.pp, &empty)?.ok, || "obstruction check failed".into())?;
    Ok(format!("pp = {{(1, 0): 1}}, const_term = {}", fmt_rational(&r.pp.const_term)))
}

fn weil_test_lattices() -> Vec<EvenLattice> {
    let mut grams: Vec<Vec<Vec<i64>>> = Vec::new();
    for d in 1..=8i64 {
        grams.push(vec![vec![2 * d]]);
        grams.push(vec![vec![-2 * d]]);
    }
    grams.push(standard::an_gram(2));
    grams.push(standard::an_gram(3));
    grams.push(standard::d4_gram());
    grams.push(standard::dn_gram(5));
    grams.push(standard::e8_gram());
    grams.push(block_sum(&[standard::u_gram(), standard::u_gram(), vec![vec![-2]]]));
    grams.push(block_sum(&[vec![vec![2]], vec![vec![2]]]));
    grams.push(block_sum(&[vec![vec![-2]], vec![vec![2]]]));
    grams.push(block_sum(&[vec![vec![2]], vec![vec![-6]]]));
    grams.push(block_sum(&[vec![vec![4]], vec![vec![-4]]]));
    grams.push(standard::fixture_12_2_gram());
    grams.into_iter().filter_map(|g| EvenLattice::new(g).ok()).collect()
}

fn weil_relations() -> Result<String> {
    let lats = weil_test_lattices();
    for l in &lats {
        ensure(l.disc().order() <= 16, || format!("|D| = {} too large", l.disc().order()))?;
        let w = weil_matrices(l.disc(), l.signature());
        ensure(w.verify_relations(), || format!("relations fail for {:?}", l.gram()))?;
    }
    let e8 = standard::e8();
    let inv = weil_matrices(e8.disc(), e8.signature()).invariants();
    ensure(inv == vec![vec![Rational::one()]], || format!("E8 invariants {inv:?}"))?;
    Ok(format!("{} discriminant forms satisfy the relations; E8 invariants = constants", lats.len()))
}

fn random_series(rng: &mut ChaCha8Rng, l: &EvenLattice) -> Result<VVQSeries> {
    let sign = if rng.gen_bool(0.5) { CosetSign::Plus } else { CosetSign::Minus };
    let trunc = rint(rng.gen_range(1..6i64));
    let mut f = VVQSeries::zero(l.disc_arc(), sign, trunc.clone());
    let disc = l.disc();
    for _ in 0..rng.gen_range(0..20) {
        let mu = rng.gen_range(0..disc.order());
        let base = match sign {
            CosetSign::Plus => crate::num::frac(disc.q(mu)),
            CosetSign::Minus => crate::num::frac(&-disc.q(mu).clone()),
        };
        let e = base + rint(rng.gen_range(-3..5i64));
        if e >= trunc {
            continue;
        }
        let c = Rational::new(BigInt::from(rng.gen_range(-1000..1000i64)), BigInt::from(rng.gen_range(1..50i64)));
        f.set(&e, mu, c)?;
    }
    Ok(f)
}

fn deterministic_outputs() -> Result<Vec<String>> {
    let d4 = EvenLattice::new(standard::d4_gram())?;
    let fix = standard::fixture_12_2();
    let mut out = vec![json::series_to_json(&EisensteinContext::new(&d4)?.expansion(&rint(3))?.series)];
    out.push(json::to_pretty(&weil_doc(&weil_matrices(d4.disc(), d4.signature()))));
    let spec = AdmissibleSetSpec::explicit(4, vec![(rint(1), 0), (rint(2), 0)]);
    let r = prescribe(&fix, &spec, &ModularBasisFixture::empty(rat(7, 1)), &PrescribeOptions::default())?;
    out.push(json::principal_part_to_json(&r.pp, fix.disc()));
    let d = decompose(&fix, &mixed_sign_fixture(&fix)?, &DecomposeOptions::default())?;
    out.push(json::principal_part_to_json(&d.f1, fix.disc()));
    Ok(out)
}

fn determinism() -> Result<String> {
    let a = deterministic_outputs()?;
    let b = deterministic_outputs()?;
    ensure(a == b, || "outputs differ between runs".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let lats = [standard::fixture_12_2(), EvenLattice::new(standard::an_gram(2))?, standard::e8()];
    for k in 0..50 {
        let l = &lats[k % lats.len()];
        let f = random_series(&mut rng, l)?;
        let text = json::series_to_json(&f);
        let g = json::parse_series(&text, l.disc_arc())?;
        ensure(g == f, || format!("series {k} changed in a round trip"))?;
        ensure(json::series_to_json(&g) == text, || format!("series {k} re-serializes differently"))?;
    }
    Ok(format!("{} outputs byte-identical across runs; 50 random series round-trip", a.len()))
}
