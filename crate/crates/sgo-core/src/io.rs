//! JSON formats shared by the CLI and the Python bindings.
//!
//! Matrix: `{"n": int, "precision": int | "inf", "entries": [[[[e, p, q], …], …], …]}`
//! where each entry is a list of exponent/numerator/denominator triples.

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::{LaurentScalar, TruncatedSeries};
use crate::loopmat::LoopMatrix;
use crate::orbits::OrbitPoint;
use crate::rational::Rational;

pub const SCHEMA: &str = "sgo/1";

/// An output document: `{"schema": "sgo/1", …body}`.
#[derive(Serialize)]
pub struct Versioned<T: Serialize> {
    pub schema: &'static str,
    #[serde(flatten)]
    pub body: T,
}

pub fn versioned<T: Serialize>(body: T) -> Versioned<T> {
    Versioned { schema: SCHEMA, body }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Finite(i64),
    Infinite,
}

impl Serialize for Precision {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Precision::Finite(p) => s.serialize_i64(*p),
            Precision::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Precision {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(p) => Ok(Precision::Finite(p)),
            Raw::Str(s) if s == "inf" => Ok(Precision::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("precision must be an integer or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub precision: Precision,
    pub entries: Vec<Vec<Vec<(i64, i64, i64)>>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<LoopMatrix> {
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::Parse(format!("entries must form a {0}x{0} array", self.n)));
        }
        let prec = match self.precision {
            Precision::Finite(p) => Some(p),
            Precision::Infinite => None,
        };
        let mut out = Vec::with_capacity(self.n * self.n);
        for row in &self.entries {
            for triples in row {
                if triples.iter().any(|&(_, _, q)| q == 0) {
                    return Err(Error::Parse("zero denominator".into()));
                }
                let poly = LaurentScalar::from_terms(triples.iter().map(|&(e, p, q)| (e, Rational::new(p, q))));
                out.push(TruncatedSeries::new(poly, prec));
            }
        }
        Ok(LoopMatrix::new(self.n, out))
    }

    pub fn from_matrix(a: &LoopMatrix) -> Result<Self> {
        let n = a.n();
        let small = |r: &Rational| -> Result<(i64, i64)> {
            match (r.numer().to_i64(), r.denom().to_i64()) {
                (Some(p), Some(q)) => Ok((p, q)),
                _ => Err(Error::Parse("coefficient does not fit the 64-bit file format".into())),
            }
        };
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        a.get(i, j)
                            .poly()
                            .terms()
                            .map(|(e, c)| small(c).map(|(p, q)| (e, p, q)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let precision = match a.precision() {
            Some(p) => Precision::Finite(p),
            None => Precision::Infinite,
        };
        Ok(MatrixJson { n, precision, entries })
    }
}

pub fn parse_matrix(text: &str) -> Result<LoopMatrix> {
    serde_json::from_str::<MatrixJson>(text).map_err(|e| Error::Parse(e.to_string()))?.to_matrix()
}

pub fn matrix_to_json(a: &LoopMatrix) -> Result<String> {
    serde_json::to_string(&MatrixJson::from_matrix(a)?).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Deserialize)]
struct PointJson {
    #[serde(rename = "grM")]
    gr_m: Option<MatrixJson>,
    #[serde(rename = "grN")]
    gr_n: MatrixJson,
}

/// Either `{"grM": matrix | null, "grN": matrix}` or a bare matrix.
pub fn parse_point_or_matrix(text: &str) -> Result<std::result::Result<OrbitPoint, LoopMatrix>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("grN").is_some() {
        let p: PointJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        let gr_m = p.gr_m.map(|m| m.to_matrix()).transpose()?;
        return Ok(Ok(OrbitPoint { gr_m, gr_n: p.gr_n.to_matrix()? }));
    }
    let m: MatrixJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Err(m.to_matrix()?))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
