//! JSON form of series and cyclotomic numbers.
//!
//! ```json
//! {"denom": 24, "trunc": "200/1",
//!  "coeffs": [{"exp": "1/24", "val": {"conductor": 1, "coeffs": {"0": "1/1"}}}]}
//! ```

use std::collections::BTreeMap;

use num_rational::Ratio;
use rug::Rational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cyclotomic::CyclotomicNumber;
use super::qseries::{Exponent, QSeries};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct CycloJson {
    conductor: u32,
    coeffs: BTreeMap<u32, String>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: String,
    val: CycloJson,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    denom: i64,
    trunc: String,
    coeffs: Vec<TermJson>,
}

fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn fmt_exponent(e: &Exponent) -> String {
    format!("{}/{}", e.numer(), e.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::parse(s.trim())
        .map(Rational::from)
        .map_err(|e| Error::Parse(format!("rational {s:?}: {e}")))
}

pub fn parse_exponent(s: &str) -> Result<Exponent> {
    let bad = || Error::Parse(format!("exponent {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

impl From<&CyclotomicNumber> for CycloJson {
    fn from(c: &CyclotomicNumber) -> Self {
        Self {
            conductor: c.conductor(),
            coeffs: c
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| (i as u32, fmt_rational(a)))
                .collect(),
        }
    }
}

impl TryFrom<CycloJson> for CyclotomicNumber {
    type Error = Error;
    fn try_from(j: CycloJson) -> Result<Self> {
        if j.conductor == 0 {
            return Err(Error::Parse("conductor 0".into()));
        }
        let mut terms = Vec::new();
        for (i, v) in j.coeffs {
            terms.push((i as i64, parse_rational(&v)?));
        }
        Ok(CyclotomicNumber::from_power_terms(j.conductor, terms))
    }
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CycloJson::deserialize(d)?.try_into().map_err(D::Error::custom)
    }
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            denom: self.denom(),
            trunc: fmt_exponent(&self.trunc()),
            coeffs: self
                .terms()
                .map(|(e, c)| TermJson {
                    exp: fmt_exponent(&e),
                    val: c.into(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl TryFrom<SeriesJson> for QSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        if j.denom <= 0 {
            return Err(Error::Parse(format!("denom {}", j.denom)));
        }
        let trunc = parse_exponent(&j.trunc)?;
        let mut terms = Vec::new();
        for t in j.coeffs {
            let e = parse_exponent(&t.exp)?;
            if e >= trunc {
                return Err(Error::Parse(format!("term q^{e} at or past trunc {trunc}")));
            }
            terms.push((e, t.val.try_into()?));
        }
        Ok(QSeries::from_terms(terms, trunc))
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(d)?.try_into().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qseries::exponent;

    #[test]
    fn round_trip() {
        let z = CyclotomicNumber::root_of_unity(8, 3);
        let s = QSeries::from_terms(
            [
                (exponent(-1, 24), CyclotomicNumber::from_int(1, 1)),
                (exponent(5, 24), z),
                (exponent(2, 1), CyclotomicNumber::from_rational(1, Rational::from((-3, 7)))),
            ],
            exponent(10, 1),
        );
        let text = serde_json::to_string(&s).unwrap();
        let back: QSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(text.contains("\"trunc\":\"10/1\""));
    }

    #[test]
    fn rejects_term_past_trunc() {
        let text = r#"{"denom":1,"trunc":"2/1","coeffs":[{"exp":"3/1","val":{"conductor":1,"coeffs":{"0":"1/1"}}}]}"#;
        assert!(serde_json::from_str::<QSeries>(text).is_err());
    }
}
