//! JSON documents. Rationals are always strings `"p/q"`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CosetSign, DiscriminantForm, EvenLattice};
use crate::num::{fmt_rational, parse_rational, Rational};
use crate::qseries::{PrincipalPart, VVQSeries};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    pub gram: Vec<Vec<i64>>,
}

pub fn parse_lattice(text: &str) -> Result<EvenLattice> {
    let doc: LatticeDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    EvenLattice::new(doc.gram)
}

pub fn lattice_to_json(l: &EvenLattice) -> String {
    to_pretty(&LatticeDoc { gram: l.gram().to_vec() })
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CoeffDoc {
    pub exp: String,
    pub mu: Vec<u64>,
    pub c: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub den: u64,
    pub trunc: String,
    pub sign: String,
    pub coeffs: Vec<CoeffDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hecke_trick_flag: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub m: String,
    pub mu: Vec<u64>,
    pub c: String,
}

/// Extra keys are ignored so that `prescribe` output can be fed back in.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct PrincipalPartDoc {
    pub sign: String,
    pub principal_part: Vec<EntryDoc>,
    pub const_term: String,
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn sign_str(s: CosetSign) -> &'static str {
    match s {
        CosetSign::Plus => "+",
        CosetSign::Minus => "-",
    }
}

pub fn parse_sign(s: &str) -> Result<CosetSign> {
    match s {
        "+" => Ok(CosetSign::Plus),
        "-" => Ok(CosetSign::Minus),
        _ => Err(Error::Parse(format!("sign must be \"+\" or \"-\", got {s:?}"))),
    }
}

pub fn element_index(disc: &DiscriminantForm, mu: &[u64]) -> Result<usize> {
    if disc.invariants().is_empty() && (mu.is_empty() || mu == [0]) {
        return Ok(0);
    }
    disc.index_of(mu).ok_or_else(|| Error::Parse(format!("{mu:?} is not an element of the discriminant group")))
}

pub fn series_doc(f: &VVQSeries) -> SeriesDoc {
    SeriesDoc {
        den: f.den(),
        trunc: fmt_rational(f.trunc()),
        sign: sign_str(f.sign()).into(),
        coeffs: f
            .iter()
            .map(|(e, mu, c)| CoeffDoc {
                exp: fmt_rational(&e),
                mu: f.disc().element(mu).residues.clone(),
                c: fmt_rational(c),
            })
            .collect(),
        hecke_trick_flag: false,
    }
}

pub fn series_to_json(f: &VVQSeries) -> String {
    to_pretty(&series_doc(f))
}

pub fn series_from_doc(doc: &SeriesDoc, disc: Arc<DiscriminantForm>) -> Result<VVQSeries> {
    let trunc = parse_rational(&doc.trunc)?;
    let mut f = VVQSeries::zero(disc.clone(), parse_sign(&doc.sign)?, trunc);
    if f.den() != doc.den {
        return Err(Error::Parse(format!("series den {} does not match the lattice level {}", doc.den, f.den())));
    }
    for c in &doc.coeffs {
        let mu = element_index(&disc, &c.mu)?;
        f.set(&parse_rational(&c.exp)?, mu, parse_rational(&c.c)?)?;
    }
    Ok(f)
}

pub fn parse_series(text: &str, disc: Arc<DiscriminantForm>) -> Result<VVQSeries> {
    let doc: SeriesDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    series_from_doc(&doc, disc)
}

pub fn principal_part_doc(pp: &PrincipalPart, disc: &DiscriminantForm) -> PrincipalPartDoc {
    PrincipalPartDoc {
        sign: sign_str(pp.sign).into(),
        principal_part: pp
            .entries
            .iter()
            .map(|((m, mu), c)| EntryDoc { m: fmt_rational(m), mu: disc.element(*mu).residues.clone(), c: fmt_rational(c) })
            .collect(),
        const_term: fmt_rational(&pp.const_term),
    }
}

pub fn principal_part_to_json(pp: &PrincipalPart, disc: &DiscriminantForm) -> String {
    to_pretty(&principal_part_doc(pp, disc))
}

pub fn principal_part_from_doc(doc: &PrincipalPartDoc, disc: Arc<DiscriminantForm>) -> Result<PrincipalPart> {
    let mut entries: BTreeMap<(Rational, usize), Rational> = BTreeMap::new();
    for e in &doc.principal_part {
        let mu = element_index(&disc, &e.mu)?;
        let key = (parse_rational(&e.m)?, mu);
        if entries.insert(key, parse_rational(&e.c)?).is_some() {
            return Err(Error::Parse(format!("duplicate principal part entry m = {}, mu = {:?}", e.m, e.mu)));
        }
    }
    PrincipalPart::new(disc, parse_sign(&doc.sign)?, entries, parse_rational(&doc.const_term)?)
}

pub fn parse_principal_part(text: &str, disc: Arc<DiscriminantForm>) -> Result<PrincipalPart> {
    let doc: PrincipalPartDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    principal_part_from_doc(&doc, disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::fixture_12_2;
    use crate::num::rat;

    #[test]
    fn lattice_round_trip() {
        let l = parse_lattice(r#"{"gram": [[2, 1], [1, 2]]}"#).unwrap();
        assert_eq!(l.det(), &num_bigint::BigInt::from(3));
        assert_eq!(parse_lattice(&lattice_to_json(&l)).unwrap().gram(), l.gram());
        assert!(parse_lattice(r#"{"gram": [[2]], "extra": 1}"#).is_err());
        assert!(matches!(parse_lattice(r#"{"gram": [[1]]}"#), Err(Error::NotEven(_))));
    }

    #[test]
    fn series_round_trip() {
        let l = fixture_12_2();
        let d = l.disc_arc();
        let mut f = VVQSeries::zero(d.clone(), CosetSign::Minus, rat(3, 1));
        for mu in 0..d.order() {
            let e = -d.q(mu) + rat(1, 1);
            f.set(&e, mu, rat(mu as i64 + 1, 3)).unwrap();
        }
        let s = series_to_json(&f);
        let g = parse_series(&s, d.clone()).unwrap();
        assert_eq!(f, g);
        assert_eq!(series_to_json(&g), s);
        assert!(s.contains("\"sign\": \"-\""));
    }
}
