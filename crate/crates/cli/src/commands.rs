use std::path::{Path, PathBuf};

use borcherds_core::battery::{run_all, run_battery};
use borcherds_core::borcherds::{
    build_h, decompose, obstruction_check, prescribe, vanish_on, AdmissibleSetSpec, DecomposeOptions, Members,
    ModularBasisFixture, PrescribeOptions, Predicate, Provider,
};
use borcherds_core::eisenstein::{EisOptions, EisensteinContext, OddRankCharacterSign};
use borcherds_core::json::{self, element_index, PrincipalPartDoc};
use borcherds_core::localdata::{count, count_gauss, count_naive, w_p, CountConfig};
use borcherds_core::num::{factor, fmt_rational, parse_rational};
use borcherds_core::qseries::PrincipalPart;
use borcherds_core::weilrep::{weil_doc, weil_matrices};
use borcherds_core::{DiscriminantForm, Error, EvenLattice, Rational, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cache::{self, Cache};
use crate::config::Config;
use crate::{Cli, Command, Method};

pub struct Output {
    pub text: String,
    pub code: u8,
}

fn ok(text: String) -> Result<Output> {
    Ok(Output { text, code: 0 })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_lattice(arg: &Option<PathBuf>, cfg: &Config) -> Result<(EvenLattice, String)> {
    let path = arg
        .as_ref()
        .or(cfg.lattice.as_ref())
        .ok_or_else(|| Error::InvalidInput("no lattice given (argument, config or BORCHERDS_LATTICE)".into()))?;
    let l = json::parse_lattice(&read(path)?)?;
    let canon = json::lattice_to_json(&l);
    Ok((l, canon))
}

fn parse_mu(disc: &DiscriminantForm, s: &str) -> Result<usize> {
    let residues: Vec<u64> = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad residue {x:?}"))))
        .collect::<Result<_>>()?;
    if residues.iter().all(|&r| r == 0) {
        return Ok(0);
    }
    element_index(disc, &residues)
}

fn residues(disc: &DiscriminantForm, mu: usize) -> Vec<u64> {
    disc.element(mu).residues.clone()
}

fn eis_options(cfg: &Config, interval: bool, as_printed: bool) -> EisOptions {
    EisOptions {
        odd_sign: if as_printed { OddRankCharacterSign::AsPrinted } else { OddRankCharacterSign::LatticeNegated },
        prec_bits: cfg.prec_bits,
        den_bound: BigInt::from(cfg.den_bound),
        count: CountConfig { naive_cap: cfg.naive_cap, cross_check: cfg.cross_check },
        force_interval: interval,
    }
}

fn load_fixture(path: &Option<PathBuf>, lat: &EvenLattice) -> Result<ModularBasisFixture> {
    match path {
        Some(p) => ModularBasisFixture::parse(&read(p)?, lat.disc_arc()),
        None => {
            let (n, m) = lat.signature();
            Ok(ModularBasisFixture::empty(Rational::new(BigInt::from(n + m), BigInt::from(2))))
        }
    }
}

fn load_provider(path: &Option<PathBuf>, index: usize, lat: &EvenLattice) -> Result<Option<Provider>> {
    let Some(p) = path else { return Ok(None) };
    let f = ModularBasisFixture::parse(&read(p)?, lat.disc_arc())?;
    let form = f
        .elements
        .get(index)
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("provider fixture has no element {index}")))?;
    Ok(Some(Provider::Series { weight: f.weight, form }))
}

fn pp_doc(pp: &PrincipalPart, disc: &DiscriminantForm) -> PrincipalPartDoc {
    json::principal_part_doc(pp, disc)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberDoc {
    m: String,
    #[serde(default)]
    mu: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    predicate: Predicate,
    ceiling: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    bound: i64,
    #[serde(default)]
    members: Vec<MemberDoc>,
    generator: Option<GeneratorDoc>,
}

fn load_spec(path: &Option<PathBuf>, members: &[String], bound: i64, disc: &DiscriminantForm) -> Result<AdmissibleSetSpec> {
    if let Some(p) = path {
        let doc: SpecDoc = serde_json::from_str(&read(p)?).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(g) = doc.generator {
            if !doc.members.is_empty() {
                return Err(Error::InvalidInput("spec has both members and a generator".into()));
            }
            return Ok(AdmissibleSetSpec {
                bound: doc.bound,
                members: Members::Generator { predicate: g.predicate, ceiling: parse_rational(&g.ceiling)? },
            });
        }
        let mut v = Vec::new();
        for m in &doc.members {
            v.push((parse_rational(&m.m)?, element_index(disc, &m.mu)?));
        }
        return Ok(AdmissibleSetSpec::explicit(doc.bound, v));
    }
    if members.is_empty() {
        return Err(Error::InvalidInput("give --spec or at least one --member".into()));
    }
    let mut v = Vec::new();
    for s in members {
        let (m, mu) = s.split_once('@').unwrap_or((s.as_str(), "0"));
        v.push((parse_rational(m)?, parse_mu(disc, mu)?));
    }
    Ok(AdmissibleSetSpec::explicit(bound, v))
}

pub fn run(cli: &Cli) -> Result<Output> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(d) = &cli.cache_dir {
        cfg.cache_dir = Some(d.clone());
    }
    if cli.no_cache {
        cfg.cache_dir = None;
    }
    let cache = Cache::new(cfg.cache_dir.as_deref());
    match &cli.cmd {
        Command::Info { lattice } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let (p, n) = l.signature();
            ok(json::to_pretty(&json!({
                "rank": l.rank(),
                "signature": [p, n],
                "det": l.det().to_string(),
                "level": l.level(),
                "disc_order": l.disc().order(),
                "invariants": l.disc().invariants(),
                "bad_primes": l.bad_primes(),
                "indefinite": l.is_indefinite(),
            })))
        }
        Command::Repnum { lattice, m, mu, modulus, method } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let m = parse_rational(m)?;
            let mu = parse_mu(l.disc(), mu)?;
            let a = *modulus;
            let r = match method {
                Method::Auto => count(&l, &m, mu, a, &CountConfig { naive_cap: cfg.naive_cap, cross_check: cfg.cross_check })?,
                Method::Naive => count_naive(&l, &m, mu, a, cfg.naive_cap)?,
                Method::Gauss => {
                    let f = factor(a);
                    if f.len() != 1 {
                        return Err(Error::InvalidInput(format!("--method gauss needs a prime power, got {a}")));
                    }
                    count_gauss(&l, &m, mu, f[0].0, f[0].1)?
                }
            };
            let hensel: Vec<_> = l
                .bad_primes()
                .iter()
                .filter_map(|&p| w_p(&l, &m, mu, p).ok().map(|w| json!({"p": p, "w": w})))
                .collect();
            ok(json::to_pretty(&json!({
                "m": fmt_rational(&m),
                "mu": residues(l.disc(), mu),
                "modulus": a,
                "count": r.count.to_string(),
                "method": r.method,
                "hensel_exponents": hensel,
            })))
        }
        Command::Eis { lattice, max_exp, m, mu, interval, as_printed } => {
            let (l, canon) = load_lattice(lattice, &cfg)?;
            let ctx = EisensteinContext::with_options(&l, eis_options(&cfg, *interval, *as_printed))?;
            let opts = format!("{} {} {} {} {:?}", cfg.prec_bits, cfg.den_bound, interval, as_printed, (max_exp, m, mu));
            let key = cache::key(&[&canon, "eis", &opts]);
            let text = cache.get_or_compute(&key, || {
                if let Some(m) = m {
                    let m = parse_rational(m)?;
                    let mu = parse_mu(l.disc(), mu)?;
                    let (e, path) = ctx.coefficient_with_path(&m, mu)?;
                    return Ok(json::to_pretty(&json!({
                        "m": fmt_rational(&m),
                        "mu": residues(l.disc(), mu),
                        "coefficient": fmt_rational(&e),
                        "path": path,
                        "hecke_trick_flag": ctx.hecke_trick_flag(),
                    })));
                }
                let max = parse_rational(max_exp.as_deref().unwrap_or("3"))?;
                let trunc = max + Rational::new(BigInt::from(1), BigInt::from(l.level()));
                let ex = ctx.expansion(&trunc)?;
                let mut doc = json::series_doc(&ex.series);
                doc.hecke_trick_flag = ex.hecke_trick_flag;
                Ok(json::to_pretty(&doc))
            })?;
            ok(text)
        }
        Command::Weil { lattice, invariants } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let w = weil_matrices(l.disc(), l.signature());
            let mut v = serde_json::to_value(weil_doc(&w)).expect("serializable");
            v["relations_ok"] = json!(w.verify_relations());
            if *invariants {
                let inv: Vec<Vec<String>> =
                    w.invariants().iter().map(|x| x.iter().map(fmt_rational).collect()).collect();
                v["invariants"] = json!(inv);
            }
            ok(json::to_pretty(&v))
        }
        Command::HSeries { lattice, b, trunc, provider, provider_index, radius } => {
            let (l, canon) = load_lattice(lattice, &cfg)?;
            let prov = load_provider(provider, *provider_index, &l)?.unwrap_or(Provider::Eisenstein);
            let trunc = parse_rational(trunc)?;
            let compute = || {
                let h = build_h(&l, *b, &prov, &trunc, *radius)?;
                Ok(json::series_to_json(&h.series))
            };
            let text = if provider.is_none() {
                let key = cache::key(&[&canon, "h-series", &format!("{b} {trunc} {radius}")]);
                cache.get_or_compute(&key, compute)?
            } else {
                compute()?
            };
            ok(text)
        }
        Command::Decompose { lattice, pp, strict_paper, minimal, provider, provider_index, radius } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let f = json::parse_principal_part(&read(pp)?, l.disc_arc())?;
            let opts = DecomposeOptions {
                strict_paper: *strict_paper,
                minimal: *minimal,
                radius: *radius,
                fixture: load_provider(provider, *provider_index, &l)?,
            };
            let d = decompose(&l, &f, &opts)?;
            ok(json::to_pretty(&json!({
                "b": d.b,
                "t": fmt_rational(&d.t),
                "c": d.c.to_string(),
                "f1": pp_doc(&d.f1, l.disc()),
                "f2": pp_doc(&d.f2, l.disc()),
            })))
        }
        Command::Obstruct { lattice, pp, fixture } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let f = json::parse_principal_part(&read(pp)?, l.disc_arc())?;
            let fx = ModularBasisFixture::parse(&read(fixture)?, l.disc_arc())?;
            let r = obstruction_check(&f, &fx)?;
            ok(json::to_pretty(&json!({"ok": r.ok, "checked": r.checked, "violations": r.violations, "provenance": fx.provenance})))
        }
        Command::Prescribe { lattice, spec, members, bound, fixture, budget, assume_witt_below_two, required_trunc, radius } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let s = load_spec(spec, members, *bound, l.disc())?;
            let fx = load_fixture(fixture, &l)?;
            if *required_trunc {
                return required_trunc_report(&l, &s, &fx, *budget);
            }
            let opts = PrescribeOptions { budget: *budget, radius: *radius, assume_witt_below_two: *assume_witt_below_two };
            let r = prescribe(&l, &s, &fx, &opts)?;
            #[derive(Serialize)]
            struct Doc {
                #[serde(flatten)]
                pp: PrincipalPartDoc,
                candidates_tried: usize,
                vanishing: Vec<(String, Vec<u64>)>,
                f0: Option<Vec<String>>,
                conditional_on_fixture: bool,
                provenance: String,
            }
            let doc = Doc {
                pp: pp_doc(&r.pp, l.disc()),
                candidates_tried: r.candidates_tried,
                vanishing: r.vanishing.iter().map(|(m, mu)| (fmt_rational(m), residues(l.disc(), *mu))).collect(),
                f0: r.f0.map(|v| v.iter().map(fmt_rational).collect()),
                conditional_on_fixture: r.conditional_on_fixture,
                provenance: fx.provenance.clone(),
            };
            ok(json::to_pretty(&doc))
        }
        Command::VanishOn { lattice, m, mu, fixture, budget, radius } => {
            let (l, _) = load_lattice(lattice, &cfg)?;
            let fx = load_fixture(fixture, &l)?;
            let m = parse_rational(m)?;
            let mu = parse_mu(l.disc(), mu)?;
            let popts = PrescribeOptions { budget: *budget, radius: *radius, assume_witt_below_two: false };
            let dopts = DecomposeOptions { radius: *radius, ..Default::default() };
            let r = vanish_on(&l, &m, mu, &fx, &popts, &dopts)?;
            ok(json::to_pretty(&json!({
                "principal_part": pp_doc(r.pp(), l.disc()),
                "prescribed": pp_doc(&r.prescribed.pp, l.disc()),
                "b": r.decomposition.b,
                "c": r.decomposition.c.to_string(),
                "conditional_on_fixture": r.prescribed.conditional_on_fixture,
            })))
        }
        Command::Battery { criteria } => {
            let report = if criteria.is_empty() { run_all() } else { run_battery(criteria) };
            for line in report.lines() {
                eprintln!("{line}");
            }
            Ok(Output { text: json::to_pretty(&report), code: if report.all_passed { 0 } else { 4 } })
        }
    }
}

fn required_trunc_report(l: &EvenLattice, spec: &AdmissibleSetSpec, fx: &ModularBasisFixture, budget: usize) -> Result<Output> {
    let cands = spec.enumerate(l.disc());
    let need = cands.iter().take(budget).map(|(m, _)| m.clone()).max();
    let have = fx.trunc().cloned();
    let sufficient = match (&need, &have) {
        (Some(n), Some(h)) => n < h,
        _ => true,
    };
    let text = json::to_pretty(&json!({
        "required_trunc": need.as_ref().map(|n| format!("> {}", fmt_rational(n))),
        "fixture_trunc": have.as_ref().map(fmt_rational),
        "sufficient": sufficient,
    }));
    if !sufficient {
        eprint!("{text}");
        return Err(Error::TruncationInsufficient {
            need: format!("> {}", fmt_rational(need.as_ref().unwrap())),
            have: fmt_rational(have.as_ref().unwrap()),
        });
    }
    ok(text)
}
